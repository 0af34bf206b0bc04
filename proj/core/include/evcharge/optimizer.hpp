#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evcharge/model.hpp"
#include "evcharge/policies.hpp"
#include "evcharge/random.hpp"
#include "evcharge/rbf.hpp"

namespace evcharge {

using Layout = std::vector<int>;

// Integer layouts u with sum(u) == total and 0 <= u_k <= caps[k].
class LayoutSpace {
 public:
  LayoutSpace(std::vector<int> caps, int total);
  static LayoutSpace from_sites(const std::vector<Site>& sites, int total);

  const std::vector<int>& caps() const { return caps_; }
  int total() const { return total_; }
  std::size_t dim() const { return caps_.size(); }
  // Number of feasible layouts (as a double; exact below 2^53).
  double count() const;
  bool empty() const { return count() == 0.0; }
  bool contains(const Layout& u) const;
  // Uniform draw over the feasible set. Throws InputError when it is empty.
  Layout sample(Rng& rng) const;
  // Every layout reachable by moving one charger from one site to another.
  std::vector<Layout> neighbours(const Layout& u) const;

 private:
  double ways(std::size_t from_site, int remaining) const;

  std::vector<int> caps_;
  int total_;
  std::vector<std::vector<double>> ways_;  // ways_[k][r]: fillings of sites k.. summing to r
};

inline constexpr double kEnumerateLimit = 1e6;

// All feasible layouts in lexicographic order. Throws InputError above `limit` layouts.
std::vector<Layout> enumerate_layouts(const LayoutSpace& space, double limit = kEnumerateLimit);

struct MeritScore {
  double surrogate = 0.0;
  double distance = 0.0;  // Euclidean distance to the nearest evaluated layout
  double a = 0.0;         // normalized surrogate value in [0, 1]
  double b = 0.0;         // normalized (negated) distance in [0, 1]
  double merit = 0.0;     // w a + (1 - w) b
};

std::vector<MeritScore> merit_scores(const std::vector<Layout>& candidates,
                                     const SurrogateModel& model,
                                     const std::vector<Layout>& evaluated, double w);

// Index of the candidate with the lowest merit; ties go to the lexicographically smallest u.
std::size_t merit_select(const std::vector<Layout>& candidates, const SurrogateModel& model,
                         const std::vector<Layout>& evaluated, double w);

// Half uniform samples, half perturbations of `incumbent` (one charger moved between two sites,
// repeated 1 + Geometric(1/2) times). Excludes `seen` and duplicates. When the unseen part of the
// space has at most n layouts, all of them are returned.
std::vector<Layout> sample_candidates(const LayoutSpace& space, const Layout& incumbent,
                                      const std::set<Layout>& seen, std::size_t n, Rng& rng);

struct SoOptions {
  int budget = 100;
  std::uint64_t seed = 0;
  RbfKernel kernel = RbfKernel::cubic;
  double gamma = 0.5;
  std::optional<int> initial_points;  // default 2(K+1)
  std::optional<int> candidates;      // default 100 min(K, 10)
  std::vector<double> weights{0.3, 0.5, 0.8, 0.95};
  int patience = 15;
};

struct TraceEntry {
  int iteration = 0;
  Layout u;
  double z = 0.0;
  double best_so_far = 0.0;
};

struct EvaluationFailure {
  Layout u;
  std::string message;
};

struct SoResult {
  Layout best;
  double best_z = 0.0;
  std::vector<TraceEntry> trace;
  std::vector<EvaluationFailure> failures;
  int evaluations = 0;  // including failed ones
};

using Blackbox = std::function<double(const Layout&)>;

// Surrogate optimization: initial uniform design, then fit -> sample -> merit select -> evaluate
// until the budget is spent or the best value has not improved for `patience` evaluations.
// A blackbox that throws marks the layout as failed; the search continues.
SoResult so_optimize(const Blackbox& blackbox, const LayoutSpace& space, const SoOptions& options);

// Lloyd's k-means (k = U, k-means++ seeding, at most 100 iterations) on drop-off points; each
// centroid takes one charger at its nearest site with spare capacity.
ChargerLayout kmeans_layout(const std::vector<Point>& dropoffs, const std::vector<Site>& sites,
                            int total, std::uint64_t seed);

struct KMeansResult {
  std::vector<Point> centroids;
  std::vector<int> label;
  int iterations = 0;
};

KMeansResult kmeans(const std::vector<Point>& points, int k, std::uint64_t seed,
                    int max_iterations = 100);

// Z(u) from the simulator. Each layout gets a seed derived from (master seed, u); with several
// demand sets the objective is averaged over them.
Blackbox simulation_blackbox(const Scenario& scenario, std::vector<std::vector<Request>> demands,
                             Policy policy, std::uint64_t master_seed);

std::uint64_t layout_hash(const Layout& u);
std::string layout_to_string(const Layout& u);

}  // namespace evcharge
