#include "evcharge/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evcharge/error.hpp"

namespace evcharge {

namespace {

struct Padded {
  std::size_t size = 0;
  std::vector<double> cost;
  std::vector<char> real;
  double offset = 0.0;  // cost of the unavoidable padding in any max-cardinality assignment
};

double assignment_cost(const Padded& p, const std::vector<std::size_t>& col_of_row) {
  double sum = 0.0;
  for (std::size_t r = 0; r < p.size; ++r) sum += p.cost[r * p.size + col_of_row[r]];
  return sum;
}

// Repairs the column choices of the relaxed problem into a full assignment, then applies
// pairwise column swaps until none improves.
std::vector<std::size_t> repair(const Padded& p, const std::vector<double>& lambda,
                                const std::vector<std::size_t>& choice) {
  const std::size_t n = p.size;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> col_of_row(n, kNone), row_of_col(n, kNone);
  // Each row keeps the chosen column with the lowest reduced cost.
  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
    return p.cost[choice[a] * n + a] - lambda[choice[a]] <
           p.cost[choice[b] * n + b] - lambda[choice[b]];
  });
  for (std::size_t c : cols) {
    const std::size_t r = choice[c];
    if (col_of_row[r] == kNone) {
      col_of_row[r] = c;
      row_of_col[c] = r;
    }
  }
  // Remaining rows take the cheapest free column, cheapest pairs first.
  std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> open;
  for (std::size_t r = 0; r < n; ++r) {
    if (col_of_row[r] != kNone) continue;
    for (std::size_t c = 0; c < n; ++c)
      if (row_of_col[c] == kNone) open.push_back({p.cost[r * n + c], {r, c}});
  }
  std::stable_sort(open.begin(), open.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [_, rc] : open) {
    const auto [r, c] = rc;
    if (col_of_row[r] == kNone && row_of_col[c] == kNone) {
      col_of_row[r] = c;
      row_of_col[c] = r;
    }
  }
  for (int pass = 0; pass < 20; ++pass) {
    bool improved = false;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const std::size_t ca = col_of_row[a];
        const std::size_t cb = col_of_row[b];
        const double before = p.cost[a * n + ca] + p.cost[b * n + cb];
        const double after = p.cost[a * n + cb] + p.cost[b * n + ca];
        if (after < before - 1e-12) {
          col_of_row[a] = cb;
          col_of_row[b] = ca;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
  return col_of_row;
}

}  // namespace

LagrangianResult solve_lagrangian(const AssignmentInstance& instance, double gap_target,
                                  const LagrangianOptions& options) {
  if (!(gap_target > 0.0)) throw InputError("solve_lagrangian: gap_target must be > 0");
  const ArcMatrix arcs = build_arc_costs(instance);
  const std::size_t nv = instance.vehicles.size();
  const std::size_t nc = instance.chargers.size();
  LagrangianResult result;
  if (nv == 0 || nc == 0) {
    result.solution = make_solution(instance, arcs, {});
    return result;
  }

  Padded p;
  p.size = std::max(nv, nc);
  double max_total = 0.0;
  for (std::size_t i = 0; i < nv; ++i)
    for (std::size_t j = 0; j < nc; ++j)
      if (arcs(i, j).feasible) max_total = std::max(max_total, arcs(i, j).total);
  const double big = (static_cast<double>(std::min(nv, nc)) + 1.0) * (max_total + 1.0);
  p.cost.assign(p.size * p.size, big);
  p.real.assign(p.size * p.size, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (!arcs(i, j).feasible) continue;
      p.cost[i * p.size + j] = arcs(i, j).total;
      p.real[i * p.size + j] = 1;
    }
  }
  const std::size_t kmax = max_feasible_cardinality(instance);
  p.offset = big * static_cast<double>(p.size - kmax);

  const std::size_t n = p.size;
  std::vector<double> lambda(n);
  for (std::size_t r = 0; r < n; ++r)
    lambda[r] = *std::min_element(p.cost.begin() + static_cast<std::ptrdiff_t>(r * n),
                                  p.cost.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));

  std::vector<std::size_t> best_primal;
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double scale = 2.0;
  int since_improvement = 0;
  std::vector<std::size_t> choice(n);
  std::vector<double> grad(n);
  std::vector<double> col_min(n);
  double lower_polished = -std::numeric_limits<double>::infinity();

  const auto gap_of = [&](double ub, double lb) {
    const double primal = ub - p.offset;
    if (primal <= 0.0) return ub - lb <= 1e-9 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::max(0.0, (ub - lb) / primal);
  };

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    double value = std::accumulate(lambda.begin(), lambda.end(), 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < n; ++r) {
        const double reduced = p.cost[r * n + c] - lambda[r];
        if (reduced < best) {
          best = reduced;
          arg = r;
        }
      }
      choice[c] = arg;
      col_min[c] = best;
      value += best;
    }
    // Raising each row multiplier to its tightest value against the column minima keeps the
    // dual feasible, so this is a second valid bound, never below `value`.
    double polished = std::accumulate(col_min.begin(), col_min.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < n; ++c) m = std::min(m, p.cost[r * n + c] - col_min[c]);
      polished += m;
    }
    polished = std::max(polished, value);
    if (polished > lower + 1e-12) lower_polished = std::max(lower_polished, polished);
    const bool better_bound = value > lower + 1e-12;
    if (better_bound) {
      lower = value;
      since_improvement = 0;
    } else if (++since_improvement >= options.halve_after) {
      scale *= 0.5;
      since_improvement = 0;
    }
    if (better_bound || it % 10 == 0) {
      auto primal = repair(p, lambda, choice);
      const double cost = assignment_cost(p, primal);
      if (cost < upper) {
        upper = cost;
        best_primal = std::move(primal);
      }
    }
    if (gap_of(upper, std::max(lower, lower_polished)) <= gap_target) break;
    if (scale < options.min_step_scale) break;

    std::fill(grad.begin(), grad.end(), 1.0);
    for (std::size_t c = 0; c < n; ++c) grad[choice[c]] -= 1.0;
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    if (norm2 == 0.0) {
      // The relaxed solution is itself an assignment, hence optimal.
      lower = upper = std::min(upper, value);
      break;
    }
    const double step = scale * (upper - value) / norm2;
    for (std::size_t r = 0; r < n; ++r) lambda[r] += step * grad[r];
  }
  result.iterations = it;

  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (std::size_t r = 0; r < nv; ++r) {
    const std::size_t c = best_primal[r];
    if (c < nc && p.real[r * n + c]) chosen.emplace_back(r, c);
  }
  result.solution = make_solution(instance, arcs, chosen);
  result.dual_bound = std::min(std::max(lower, lower_polished) - p.offset, result.solution.objective);

  const bool max_card = chosen.size() == kmax;
  const double gap = result.solution.objective > 0.0
                         ? (result.solution.objective - result.dual_bound) / result.solution.objective
                         : 0.0;
  if (!max_card || gap > gap_target) {
    // Stalled: the exact optimum is certified by its own optimal dual.
    result.solution = solve_exact(instance);
    result.dual_bound = result.solution.objective;
    result.reported_gap = 0.0;
    result.used_fallback = true;
    return result;
  }
  result.reported_gap = std::max(0.0, gap);
  return result;
}

}  // namespace evcharge
