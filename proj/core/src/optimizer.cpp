#include "evcharge/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "evcharge/error.hpp"
#include "evcharge/simulator.hpp"

namespace evcharge {

LayoutSpace::LayoutSpace(std::vector<int> caps, int total) : caps_(std::move(caps)), total_(total) {
  if (total_ < 0) throw InputError("layout total must be non-negative");
  for (int c : caps_)
    if (c < 0) throw InputError("site caps must be non-negative");
  const std::size_t k = caps_.size();
  ways_.assign(k + 1, std::vector<double>(static_cast<std::size_t>(total_) + 1, 0.0));
  ways_[k][0] = 1.0;
  for (std::size_t s = k; s-- > 0;) {
    for (int r = 0; r <= total_; ++r) {
      double w = 0.0;
      for (int v = 0; v <= std::min(r, caps_[s]); ++v) w += ways_[s + 1][static_cast<std::size_t>(r - v)];
      ways_[s][static_cast<std::size_t>(r)] = w;
    }
  }
}

LayoutSpace LayoutSpace::from_sites(const std::vector<Site>& sites, int total) {
  std::vector<int> caps;
  for (const auto& s : sites) caps.push_back(s.fast_charger_cap);
  return LayoutSpace(std::move(caps), total);
}

double LayoutSpace::ways(std::size_t from_site, int remaining) const {
  if (remaining < 0 || remaining > total_) return 0.0;
  return ways_[from_site][static_cast<std::size_t>(remaining)];
}

double LayoutSpace::count() const { return ways(0, total_); }

bool LayoutSpace::contains(const Layout& u) const {
  if (u.size() != caps_.size()) return false;
  int sum = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] < 0 || u[k] > caps_[k]) return false;
    sum += u[k];
  }
  return sum == total_;
}

Layout LayoutSpace::sample(Rng& rng) const {
  if (empty()) throw InputError("no feasible layout: site caps sum below the charger total");
  Layout u(caps_.size(), 0);
  int remaining = total_;
  for (std::size_t s = 0; s < caps_.size(); ++s) {
    double x = rng.uniform() * ways(s, remaining);
    int pick = std::min(remaining, caps_[s]);
    for (int v = 0; v <= std::min(remaining, caps_[s]); ++v) {
      const double w = ways(s + 1, remaining - v);
      if (x < w) {
        pick = v;
        break;
      }
      x -= w;
    }
    // Guard against rounding landing on a dead branch.
    while (ways(s + 1, remaining - pick) == 0.0) --pick;
    u[s] = pick;
    remaining -= pick;
  }
  return u;
}

std::vector<Layout> LayoutSpace::neighbours(const Layout& u) const {
  std::vector<Layout> out;
  for (std::size_t from = 0; from < u.size(); ++from) {
    if (u[from] == 0) continue;
    for (std::size_t to = 0; to < u.size(); ++to) {
      if (to == from || u[to] >= caps_[to]) continue;
      Layout v = u;
      --v[from];
      ++v[to];
      out.push_back(std::move(v));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Layout> enumerate_layouts(const LayoutSpace& space, double limit) {
  const double n = space.count();
  if (n > limit) {
    std::ostringstream msg;
    msg << "refusing to enumerate " << n << " layouts (limit " << limit << ")";
    throw InputError(msg.str());
  }
  std::vector<Layout> out;
  out.reserve(static_cast<std::size_t>(n));
  const auto& caps = space.caps();
  Layout u(caps.size(), 0);
  // Suffix capacity to prune dead branches.
  std::vector<int> suffix(caps.size() + 1, 0);
  for (std::size_t s = caps.size(); s-- > 0;) suffix[s] = suffix[s + 1] + caps[s];
  std::function<void(std::size_t, int)> rec = [&](std::size_t s, int remaining) {
    if (s == caps.size()) {
      if (remaining == 0) out.push_back(u);
      return;
    }
    for (int v = 0; v <= std::min(caps[s], remaining); ++v) {
      if (remaining - v > suffix[s + 1]) continue;
      u[s] = v;
      rec(s + 1, remaining - v);
    }
    u[s] = 0;
  };
  if (space.total() <= suffix[0]) rec(0, space.total());
  return out;
}

namespace {

double distance(const Layout& a, const Layout& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

std::vector<MeritScore> merit_scores(const std::vector<Layout>& candidates,
                                     const SurrogateModel& model,
                                     const std::vector<Layout>& evaluated, double w) {
  std::vector<MeritScore> out(candidates.size());
  if (candidates.empty()) return out;
  double s_min = std::numeric_limits<double>::infinity(), s_max = -s_min;
  double d_min = s_min, d_max = -s_min;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& m = out[i];
    m.surrogate = model(candidates[i]);
    m.distance = std::numeric_limits<double>::infinity();
    for (const auto& q : evaluated) m.distance = std::min(m.distance, distance(candidates[i], q));
    if (evaluated.empty()) m.distance = 0.0;
    s_min = std::min(s_min, m.surrogate);
    s_max = std::max(s_max, m.surrogate);
    d_min = std::min(d_min, m.distance);
    d_max = std::max(d_max, m.distance);
  }
  for (auto& m : out) {
    m.a = s_max > s_min ? (m.surrogate - s_min) / (s_max - s_min) : 1.0;
    m.b = d_max > d_min ? (d_max - m.distance) / (d_max - d_min) : 1.0;
    m.merit = w * m.a + (1.0 - w) * m.b;
  }
  return out;
}

std::size_t merit_select(const std::vector<Layout>& candidates, const SurrogateModel& model,
                         const std::vector<Layout>& evaluated, double w) {
  if (candidates.empty()) throw InputError("merit_select needs at least one candidate");
  const auto scores = merit_scores(candidates, model, evaluated, w);
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (scores[i].merit < scores[best].merit ||
        (scores[i].merit == scores[best].merit && candidates[i] < candidates[best]))
      best = i;
  }
  return best;
}

std::vector<Layout> sample_candidates(const LayoutSpace& space, const Layout& incumbent,
                                      const std::set<Layout>& seen, std::size_t n, Rng& rng) {
  if (space.empty()) throw InputError("no feasible layout: site caps sum below the charger total");
  if (n == 0) throw InputError("sample_candidates needs n >= 1");

  const double unseen = space.count() - static_cast<double>(seen.size());
  if (unseen <= static_cast<double>(n) && space.count() <= kEnumerateLimit) {
    std::vector<Layout> all;
    for (auto& u : enumerate_layouts(space))
      if (!seen.count(u)) all.push_back(std::move(u));
    return all;
  }

  std::set<Layout> taken;
  std::vector<Layout> out;
  const auto accept = [&](Layout u) {
    if (!space.contains(u) || seen.count(u) || taken.count(u)) return;
    taken.insert(u);
    out.push_back(std::move(u));
  };
  const std::size_t n_local = space.contains(incumbent) ? n / 2 : 0;
  const std::size_t max_attempts = 20 * n + 100;
  for (std::size_t tries = 0; out.size() < n_local && tries < max_attempts; ++tries) {
    Layout u = incumbent;
    int moves = 1;
    while (rng.uniform() < 0.5) ++moves;
    for (int m = 0; m < moves; ++m) {
      const auto nb = space.neighbours(u);
      if (nb.empty()) break;
      u = nb[rng.below(nb.size())];
    }
    accept(std::move(u));
  }
  for (std::size_t tries = 0; out.size() < n && tries < max_attempts; ++tries) accept(space.sample(rng));
  return out;
}

SoResult so_optimize(const Blackbox& blackbox, const LayoutSpace& space, const SoOptions& options) {
  if (space.empty()) throw InputError("no feasible layout: site caps sum below the charger total");
  if (options.weights.empty()) throw InputError("weight cycle must not be empty");
  for (double w : options.weights)
    if (w < 0.0 || w > 1.0) throw InputError("weights must lie in [0, 1]");
  const int k = static_cast<int>(space.dim());
  const int n0 = std::min(options.budget, options.initial_points.value_or(2 * (k + 1)));
  if (options.budget < 1 || n0 < 1) throw InputError("budget must be at least 1");
  const auto n_cand =
      static_cast<std::size_t>(options.candidates.value_or(100 * std::max(1, std::min(k, 10))));

  Rng rng(options.seed);
  SoResult res;
  res.best_z = std::numeric_limits<double>::infinity();
  std::set<Layout> seen;
  std::vector<EvaluatedPoint> points;
  int since_improvement = 0;

  const auto evaluate = [&](const Layout& u) {
    seen.insert(u);
    ++res.evaluations;
    double z;
    try {
      z = blackbox(u);
      if (!std::isfinite(z)) throw ModelViolation("blackbox returned a non-finite value");
    } catch (const std::exception& e) {
      res.failures.push_back({u, e.what()});
      ++since_improvement;
      return;
    }
    points.push_back({u, z});
    if (z < res.best_z) {
      res.best_z = z;
      res.best = u;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    res.trace.push_back({static_cast<int>(res.trace.size()), u, z, res.best_z});
  };

  // Initial design: distinct uniform samples.
  const double space_size = space.count();
  for (int tries = 0; static_cast<int>(seen.size()) < n0 &&
                      static_cast<double>(seen.size()) < space_size && tries < 1000 * n0;
       ++tries) {
    Layout u = space.sample(rng);
    if (!seen.count(u)) evaluate(u);
  }

  std::size_t cycle = 0;
  while (res.evaluations < options.budget && since_improvement < options.patience) {
    auto cands = sample_candidates(space, res.best.empty() ? space.sample(rng) : res.best, seen,
                                   n_cand, rng);
    if (cands.empty()) break;
    std::size_t pick = 0;
    if (!points.empty()) {
      const SurrogateModel model = fit_rbf(points, options.kernel, options.gamma);
      std::vector<Layout> evaluated;
      for (const auto& p : points) evaluated.push_back(p.u);
      const double w = options.weights[cycle++ % options.weights.size()];
      pick = merit_select(cands, model, evaluated, w);
    }
    evaluate(cands[pick]);
  }
  if (points.empty()) throw ModelViolation("every blackbox evaluation failed");
  return res;
}

KMeansResult kmeans(const std::vector<Point>& points, int k, std::uint64_t seed, int max_iterations) {
  if (k < 1) throw InputError("k-means needs k >= 1");
  if (points.size() < static_cast<std::size_t>(k)) throw InputError("k-means needs at least k points");
  Rng rng(seed);
  const auto d2 = [](const Point& a, const Point& b) {
    return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
  };
  KMeansResult res;
  // k-means++ seeding.
  res.centroids.push_back(points[rng.below(points.size())]);
  std::vector<double> nearest(points.size());
  while (res.centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::numeric_limits<double>::infinity();
      for (const auto& c : res.centroids) nearest[i] = std::min(nearest[i], d2(points[i], c));
      total += nearest[i];
    }
    std::size_t pick = rng.below(points.size());
    if (total > 0.0) {
      double x = rng.uniform() * total;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (x < nearest[i]) {
          pick = i;
          break;
        }
        x -= nearest[i];
      }
    }
    res.centroids.push_back(points[pick]);
  }

  res.label.assign(points.size(), -1);
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c)
        if (d2(points[i], res.centroids[static_cast<std::size_t>(c)]) <
            d2(points[i], res.centroids[static_cast<std::size_t>(best)]))
          best = c;
      if (res.label[i] != best) {
        res.label[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<Point> sum(static_cast<std::size_t>(k), Point{0.0, 0.0});
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(res.label[i]);
      sum[c].x += points[i].x;
      sum[c].y += points[i].y;
      ++count[c];
    }
    for (std::size_t c = 0; c < sum.size(); ++c) {
      if (count[c] == 0) continue;  // empty cluster keeps its centroid
      res.centroids[c] = {sum[c].x / count[c], sum[c].y / count[c]};
    }
  }
  return res;
}

ChargerLayout kmeans_layout(const std::vector<Point>& dropoffs, const std::vector<Site>& sites,
                            int total, std::uint64_t seed) {
  ChargerLayout layout;
  if (total == 0) return layout;
  int capacity = 0;
  for (const auto& s : sites) capacity += s.fast_charger_cap;
  if (capacity < total) throw InputError("no feasible layout: site caps sum below the charger total");
  const KMeansResult km = kmeans(dropoffs, total, seed);
  std::vector<int> used(sites.size(), 0);
  for (const Point& c : km.centroids) {
    std::vector<std::size_t> order(sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::hypot(sites[a].coord.x - c.x, sites[a].coord.y - c.y) <
             std::hypot(sites[b].coord.x - c.x, sites[b].coord.y - c.y);
    });
    for (std::size_t s : order) {
      if (used[s] < sites[s].fast_charger_cap) {
        ++used[s];
        ++layout.counts[sites[s].id];
        break;
      }
    }
  }
  return layout;
}

std::uint64_t layout_hash(const Layout& u) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (int v : u) h = mix_seed(h, static_cast<std::uint64_t>(v) + 1);
  return h;
}

std::string layout_to_string(const Layout& u) {
  std::string s;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(u[k]);
  }
  return s;
}

Blackbox simulation_blackbox(const Scenario& scenario, std::vector<std::vector<Request>> demands,
                             Policy policy, std::uint64_t master_seed) {
  if (demands.empty()) throw InputError("simulation blackbox needs at least one demand set");
  auto shared = std::make_shared<const std::vector<std::vector<Request>>>(std::move(demands));
  return [scenario, shared, policy, master_seed](const Layout& u) {
    const ChargerLayout layout = ChargerLayout::from_vector(scenario.sites, u);
    SimulationOptions opts;
    opts.policy = policy;
    opts.seed = mix_seed(master_seed, layout_hash(u));
    double z = 0.0;
    for (const auto& d : *shared) z += objective(run_simulation(scenario, layout, d, opts));
    return z / static_cast<double>(shared->size());
  };
}

}  // namespace evcharge
