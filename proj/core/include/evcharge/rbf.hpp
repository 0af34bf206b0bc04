#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace evcharge {

enum class RbfKernel { cubic, gaussian };

const char* to_string(RbfKernel kernel);

// phi(r): r^3 for cubic, exp(-gamma r^2) for gaussian.
double rbf_phi(RbfKernel kernel, double r, double gamma);

struct EvaluatedPoint {
  std::vector<int> u;
  double value = 0.0;
};

// s(x) = sum_i lambda_i phi(|x - c_i|) + b.x + a
struct SurrogateModel {
  RbfKernel kernel = RbfKernel::cubic;
  double gamma = 0.5;
  Eigen::MatrixXd centers;  // one center per row
  Eigen::VectorXd lambda;
  Eigen::VectorXd b;        // zero for coordinates dropped from the tail
  double a = 0.0;
  std::vector<int> tail;    // kept tail columns: 0 = constant, k = coordinate k-1
  bool regularized = false; // ridge fallback was needed

  double operator()(const Eigen::VectorXd& x) const;
  double operator()(const std::vector<int>& u) const;
};

// Interpolates the points exactly. Tail columns that are linearly dependent on earlier ones
// (e.g. when every layout sums to the same total) are dropped. Repeated u with equal values are
// merged; repeated u with different values throw InputError.
SurrogateModel fit_rbf(std::span<const EvaluatedPoint> points, RbfKernel kernel = RbfKernel::cubic,
                       double gamma = 0.5);

// Same, over real-valued centers.
SurrogateModel fit_rbf(const Eigen::MatrixXd& centers, const Eigen::VectorXd& values,
                       RbfKernel kernel = RbfKernel::cubic, double gamma = 0.5);

}  // namespace evcharge
