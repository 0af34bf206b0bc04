#include "evcharge/rbf.hpp"

#include <cmath>
#include <map>

#include "evcharge/error.hpp"

namespace evcharge {

const char* to_string(RbfKernel kernel) {
  return kernel == RbfKernel::cubic ? "cubic" : "gaussian";
}

double rbf_phi(RbfKernel kernel, double r, double gamma) {
  if (kernel == RbfKernel::cubic) return r * r * r;
  return std::exp(-gamma * r * r);
}

double SurrogateModel::operator()(const Eigen::VectorXd& x) const {
  double s = a + b.dot(x);
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    const double r = (centers.row(i).transpose() - x).norm();
    s += lambda[i] * rbf_phi(kernel, r, gamma);
  }
  return s;
}

double SurrogateModel::operator()(const std::vector<int>& u) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(u.size()));
  for (std::size_t k = 0; k < u.size(); ++k) x[static_cast<Eigen::Index>(k)] = u[k];
  return (*this)(x);
}

SurrogateModel fit_rbf(std::span<const EvaluatedPoint> points, RbfKernel kernel, double gamma) {
  if (points.empty()) throw InputError("fit_rbf needs at least one point");
  std::map<std::vector<int>, double> unique;
  std::vector<const EvaluatedPoint*> kept;
  for (const auto& p : points) {
    if (p.u.size() != points.front().u.size()) throw InputError("fit_rbf: points differ in dimension");
    auto [it, fresh] = unique.emplace(p.u, p.value);
    if (fresh) {
      kept.push_back(&p);
    } else if (it->second != p.value) {
      throw InputError("fit_rbf: duplicate layout with different values");
    }
  }
  const auto n = static_cast<Eigen::Index>(kept.size());
  const auto d = static_cast<Eigen::Index>(points.front().u.size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = kept[static_cast<std::size_t>(i)]->u[static_cast<std::size_t>(k)];
    f[i] = kept[static_cast<std::size_t>(i)]->value;
  }
  return fit_rbf(x, f, kernel, gamma);
}

SurrogateModel fit_rbf(const Eigen::MatrixXd& centers, const Eigen::VectorXd& values,
                       RbfKernel kernel, double gamma) {
  const Eigen::Index n = centers.rows();
  const Eigen::Index d = centers.cols();
  if (n == 0) throw InputError("fit_rbf needs at least one point");
  if (values.size() != n) throw InputError("fit_rbf: value count does not match center count");

  SurrogateModel m;
  m.kernel = kernel;
  m.gamma = gamma;
  m.centers = centers;
  m.b = Eigen::VectorXd::Zero(d);

  // Greedy rank-revealing choice of tail columns: keep a column only if it raises the rank.
  Eigen::MatrixXd full(n, d + 1);
  full.col(0).setOnes();
  full.rightCols(d) = centers;
  Eigen::MatrixXd p(n, 0);
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c <= d; ++c) {
    Eigen::MatrixXd trial(n, p.cols() + 1);
    trial << p, full.col(c);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() > rank) {
      p = std::move(trial);
      rank = qr.rank();
      m.tail.push_back(static_cast<int>(c));
    }
  }

  const Eigen::Index q = p.cols();
  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      phi(i, j) = rbf_phi(kernel, (centers.row(i) - centers.row(j)).norm(), gamma);

  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + q, n + q);
  sys.topLeftCorner(n, n) = phi;
  sys.topRightCorner(n, q) = p;
  sys.bottomLeftCorner(q, n) = p.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + q);
  rhs.head(n) = values;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  Eigen::VectorXd sol;
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  bool ok = lu.isInvertible();
  if (ok) {
    sol = lu.solve(rhs);
    ok = (sys * sol - rhs).cwiseAbs().maxCoeff() < 1e-9 * scale;
  }
  if (!ok) {
    sys.topLeftCorner(n, n) += 1e-8 * Eigen::MatrixXd::Identity(n, n);
    sol = sys.completeOrthogonalDecomposition().solve(rhs);
    m.regularized = true;
  }
  m.lambda = sol.head(n);
  for (Eigen::Index t = 0; t < q; ++t) {
    const int c = m.tail[static_cast<std::size_t>(t)];
    if (c == 0) {
      m.a = sol[n + t];
    } else {
      m.b[c - 1] = sol[n + t];
    }
  }
  return m;
}

}  // namespace evcharge
