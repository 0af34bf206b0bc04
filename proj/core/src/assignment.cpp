#include "evcharge/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "evcharge/error.hpp"

namespace evcharge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> order_by_id(const auto& items) {
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return items[a].id < items[b].id; });
  return idx;
}

// Dense square Hungarian method (shortest augmenting paths with potentials). On return
// cost(i, j) - row_pot[i] - col_pot[j] >= 0 everywhere, with equality on the matching.
struct Hungarian {
  std::vector<int> row_of_col;  // 0-based
  std::vector<int> col_of_row;
  std::vector<double> row_pot;
  std::vector<double> col_pot;
};

Hungarian hungarian(const std::vector<double>& cost, std::size_t n) {
  const auto at = [&](std::size_t i, std::size_t j) { return cost[(i - 1) * n + (j - 1)]; };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Hungarian h;
  h.row_of_col.assign(n, -1);
  h.col_of_row.assign(n, -1);
  h.row_pot.assign(u.begin() + 1, u.end());
  h.col_pot.assign(v.begin() + 1, v.end());
  for (std::size_t j = 1; j <= n; ++j) {
    h.row_of_col[j - 1] = static_cast<int>(p[j] - 1);
    h.col_of_row[p[j] - 1] = static_cast<int>(j - 1);
  }
  return h;
}

}  // namespace

std::vector<std::string> AssignmentInstance::problems() const {
  std::vector<std::string> out = params.problems();
  std::set<int> vids, cids;
  for (const auto& v : vehicles) {
    if (!vids.insert(v.id).second) out.push_back("duplicate vehicle id " + std::to_string(v.id));
    if (!(v.soc >= 0.0 && v.soc <= params.battery_capacity))
      out.push_back("vehicle " + std::to_string(v.id) + " soc outside [0, B]");
  }
  for (const auto& c : chargers) {
    if (!cids.insert(c.id).second) out.push_back("duplicate charger id " + std::to_string(c.id));
    if (!(c.power > 0.0)) out.push_back("charger " + std::to_string(c.id) + " power must be > 0");
    if (!(c.available_in >= 0.0))
      out.push_back("charger " + std::to_string(c.id) + " availability must be >= 0");
  }
  return out;
}

ArcCost arc_cost(const AssignmentInstance::Vehicle& v, const AssignmentInstance::Charger& c,
                 const FleetParams& params) {
  const Leg leg = travel(v.location, c.location, params);
  ArcCost a;
  a.travel = leg.minutes;
  a.distance_km = leg.km;
  a.arrival_soc = v.soc - params.efficiency * leg.km;
  a.feasible = a.arrival_soc >= params.e_min;
  a.energy = std::max(0.0, params.e_max - a.arrival_soc);
  a.charge = a.energy / c.power;
  a.wait = std::max(0.0, c.available_in - a.travel);
  a.total = a.travel + a.charge + a.wait;
  return a;
}

ArcMatrix build_arc_costs(const AssignmentInstance& instance) {
  ArcMatrix m(instance.vehicles.size(), instance.chargers.size());
  for (std::size_t i = 0; i < instance.vehicles.size(); ++i) {
    for (std::size_t j = 0; j < instance.chargers.size(); ++j) {
      m(i, j) = arc_cost(instance.vehicles[i], instance.chargers[j], instance.params);
    }
  }
  return m;
}

AssignmentSolution make_solution(const AssignmentInstance& instance, const ArcMatrix& arcs,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& chosen) {
  AssignmentSolution sol;
  for (const auto& [i, j] : chosen) {
    const int vid = instance.vehicles[i].id;
    sol.pairs[vid] = instance.chargers[j].id;
    sol.per_pair[vid] = arcs(i, j);
  }
  for (const auto& v : instance.vehicles) {
    if (!sol.pairs.contains(v.id)) sol.deferred.insert(v.id);
  }
  for (const auto& [_, arc] : sol.per_pair) sol.objective += arc.total;
  return sol;
}

std::vector<std::string> AssignmentSolution::problems(const AssignmentInstance& instance) const {
  std::vector<std::string> out;
  std::map<int, std::size_t> vpos, cpos;
  for (std::size_t i = 0; i < instance.vehicles.size(); ++i) vpos[instance.vehicles[i].id] = i;
  for (std::size_t j = 0; j < instance.chargers.size(); ++j) cpos[instance.chargers[j].id] = j;

  std::set<int> used_chargers;
  double sum = 0.0;
  for (const auto& [vid, cid] : pairs) {
    if (!vpos.contains(vid) || !cpos.contains(cid)) {
      out.push_back("pair references unknown id " + std::to_string(vid) + "->" +
                    std::to_string(cid));
      continue;
    }
    if (!used_chargers.insert(cid).second)
      out.push_back("charger " + std::to_string(cid) + " assigned twice");
    if (deferred.contains(vid)) out.push_back("vehicle " + std::to_string(vid) + " both paired and deferred");
    const ArcCost arc = arc_cost(instance.vehicles[vpos[vid]], instance.chargers[cpos[cid]],
                                 instance.params);
    if (!arc.feasible) out.push_back("vehicle " + std::to_string(vid) + " on infeasible arc");
    auto it = per_pair.find(vid);
    if (it == per_pair.end()) {
      out.push_back("missing per-pair cost for vehicle " + std::to_string(vid));
    } else {
      const ArcCost& a = it->second;
      if (std::abs(a.total - (a.travel + a.charge + a.wait)) > 1e-9)
        out.push_back("arc total does not decompose for vehicle " + std::to_string(vid));
      if (a.travel < 0 || a.charge < 0 || a.wait < 0)
        out.push_back("negative cost component for vehicle " + std::to_string(vid));
      if (std::abs(a.arrival_soc + a.energy - std::max(instance.params.e_max, a.arrival_soc)) > 1e-9)
        out.push_back("post-charge level differs from e_max for vehicle " + std::to_string(vid));
      sum += a.total;
    }
  }
  if (per_pair.size() != pairs.size()) out.emplace_back("per_pair and pairs differ in size");
  if (pairs.size() + deferred.size() != instance.vehicles.size())
    out.emplace_back("paired + deferred does not cover the vehicle set");
  if (std::abs(sum - objective) > 1e-9 * std::max(1.0, std::abs(objective)))
    out.emplace_back("objective differs from the sum of arc totals");
  const std::size_t target = max_feasible_cardinality(instance);
  if (pairs.size() != target)
    out.push_back("matching has " + std::to_string(pairs.size()) + " pairs, maximum is " +
                  std::to_string(target));
  return out;
}

AssignmentSolution solve_exact(const AssignmentInstance& instance) {
  const ArcMatrix arcs = build_arc_costs(instance);
  const std::size_t n = instance.vehicles.size();
  const std::size_t m = instance.chargers.size();
  if (n == 0 || m == 0) return make_solution(instance, arcs, {});

  const auto rows = order_by_id(instance.vehicles);
  const auto cols = order_by_id(instance.chargers);
  const std::size_t size = std::max(n, m);

  double max_total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (arcs(i, j).feasible) max_total = std::max(max_total, arcs(i, j).total);
  // Any loss of one feasible pair costs more than every cost difference between matchings,
  // so the square problem maximises cardinality first.
  const double big = (static_cast<double>(std::min(n, m)) + 1.0) * (max_total + 1.0);

  // Square problem in id order: rows/cols beyond n/m are padding.
  std::vector<double> cost(size * size, big);
  std::vector<char> real(size * size, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      const ArcCost& a = arcs(rows[r], cols[c]);
      if (a.feasible) {
        cost[r * size + c] = a.total;
        real[r * size + c] = 1;
      }
    }
  }
  Hungarian h = hungarian(cost, size);

  const double eps = 1e-11 * std::max(1.0, big);
  const auto tight = [&](std::size_t r, std::size_t c) {
    return cost[r * size + c] - h.row_pot[r] - h.col_pot[c] <= eps;
  };
  const auto rank = [&](std::size_t r, std::size_t c) {
    return real[r * size + c] ? c : std::numeric_limits<std::size_t>::max();
  };

  // Among optimal matchings pick the lexicographically smallest in (vehicle id, charger id):
  // optimal matchings are the perfect matchings of the tight subgraph, so each improvement is an
  // alternating cycle through tight edges of rows that are not yet fixed.
  std::vector<char> fixed(size, 0);
  const auto movable = [&](std::size_t row) {
    return !fixed[row] || !real[row * size + static_cast<std::size_t>(h.col_of_row[row])];
  };
  std::vector<int> parent_col(size);
  std::vector<char> seen(size);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t current = static_cast<std::size_t>(h.col_of_row[r]);
    const std::size_t current_rank = rank(r, current);
    for (std::size_t c = 0; c < m && c < current_rank; ++c) {
      if (!real[r * size + c] || !tight(r, c)) continue;
      const std::size_t owner = static_cast<std::size_t>(h.row_of_col[c]);
      if (!movable(owner)) continue;
      // BFS over columns: from `owner` find a tight path ending at r's current column.
      std::fill(seen.begin(), seen.end(), 0);
      std::fill(parent_col.begin(), parent_col.end(), -1);
      std::vector<std::size_t> frontier{owner};
      std::vector<std::size_t> via_col(size, size);  // column through which a row was reached
      std::vector<char> row_seen(size, 0);
      row_seen[owner] = 1;
      row_seen[r] = 1;
      seen[c] = 1;
      std::ptrdiff_t found_row = -1;
      for (std::size_t f = 0; f < frontier.size() && found_row < 0; ++f) {
        const std::size_t row = frontier[f];
        for (std::size_t col = 0; col < size; ++col) {
          if (seen[col] || !tight(row, col)) continue;
          // A fixed row without a real pair may only move to another non-real column.
          if (fixed[row] && real[row * size + col]) continue;
          seen[col] = 1;
          parent_col[col] = static_cast<int>(row);
          if (col == current) {
            found_row = static_cast<std::ptrdiff_t>(row);
            break;
          }
          const std::size_t next = static_cast<std::size_t>(h.row_of_col[col]);
          if (!movable(next) || row_seen[next]) continue;
          row_seen[next] = 1;
          via_col[next] = col;
          frontier.push_back(next);
        }
      }
      if (found_row < 0) continue;
      // Rotate: each row on the path takes the column it reached next.
      std::size_t col = current;
      std::size_t row = static_cast<std::size_t>(found_row);
      while (true) {
        const std::size_t prev_col = row == owner ? c : via_col[row];
        h.col_of_row[row] = static_cast<int>(col);
        h.row_of_col[col] = static_cast<int>(row);
        if (row == owner) break;
        col = prev_col;
        row = static_cast<std::size_t>(parent_col[col]);
      }
      h.col_of_row[r] = static_cast<int>(c);
      h.row_of_col[c] = static_cast<int>(r);
      break;
    }
    fixed[r] = 1;
  }

  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = static_cast<std::size_t>(h.col_of_row[r]);
    if (c < m && real[r * size + c]) chosen.emplace_back(rows[r], cols[c]);
  }
  return make_solution(instance, arcs, chosen);
}

namespace {

double matching_count(std::size_t n, std::size_t m) {
  // sum_k C(n, k) * m! / (m - k)!
  double total = 0.0;
  double binom = 1.0;
  double perm = 1.0;
  for (std::size_t k = 0; k <= std::min(n, m); ++k) {
    if (k > 0) {
      binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
      perm *= static_cast<double>(m - k + 1);
    }
    total += binom * perm;
  }
  return total;
}

}  // namespace

AssignmentSolution brute_force(const AssignmentInstance& instance) {
  const std::size_t n = instance.vehicles.size();
  const std::size_t m = instance.chargers.size();
  if (std::min(n, m) > kBruteForceMaxSide)
    throw InputError("brute_force: min(|I|, |J|) = " + std::to_string(std::min(n, m)) +
                     " exceeds the limit of " + std::to_string(kBruteForceMaxSide));
  if (matching_count(n, m) > 5e7)
    throw InputError("brute_force: more than 5e7 matchings to enumerate");

  const ArcMatrix arcs = build_arc_costs(instance);
  const auto rows = order_by_id(instance.vehicles);
  const auto cols = order_by_id(instance.chargers);

  std::vector<std::pair<std::size_t, std::size_t>> current, best;
  std::size_t best_card = 0;
  double best_cost = kInf;
  std::vector<char> used(m, 0);

  // Depth-first in (vehicle id, charger id) order visits matchings lexicographically, so only a
  // strictly better matching replaces the incumbent.
  auto recurse = [&](auto&& self, std::size_t r, double cost) -> void {
    if (r == n) {
      const std::size_t card = current.size();
      if (card > best_card || (card == best_card && cost < best_cost - 1e-9) ||
          best_cost == kInf) {
        best_card = card;
        best_cost = cost;
        best = current;
      }
      return;
    }
    for (std::size_t c = 0; c < m; ++c) {
      if (used[c]) continue;
      const ArcCost& a = arcs(rows[r], cols[c]);
      if (!a.feasible) continue;
      used[c] = 1;
      current.emplace_back(rows[r], cols[c]);
      self(self, r + 1, cost + a.total);
      current.pop_back();
      used[c] = 0;
    }
    self(self, r + 1, cost);
  };
  recurse(recurse, 0, 0.0);
  return make_solution(instance, arcs, best);
}

std::size_t max_feasible_cardinality(const AssignmentInstance& instance) {
  const ArcMatrix arcs = build_arc_costs(instance);
  const std::size_t n = arcs.rows();
  const std::size_t m = arcs.cols();
  std::vector<int> owner(m, -1);
  std::vector<char> visited;
  auto augment = [&](auto&& self, std::size_t i) -> bool {
    for (std::size_t j = 0; j < m; ++j) {
      if (!arcs(i, j).feasible || visited[j]) continue;
      visited[j] = 1;
      if (owner[j] < 0 || self(self, static_cast<std::size_t>(owner[j]))) {
        owner[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  };
  std::size_t size = 0;
  for (std::size_t i = 0; i < n; ++i) {
    visited.assign(m, 0);
    if (augment(augment, i)) ++size;
  }
  return size;
}

void write_solution_csv(std::ostream& out, const AssignmentSolution& solution) {
  out << "vehicle,charger,travel,charge,wait,total\n";
  for (const auto& [vid, cid] : solution.pairs) {
    const ArcCost& a = solution.per_pair.at(vid);
    out << vid << ',' << cid << ',' << a.travel << ',' << a.charge << ',' << a.wait << ','
        << a.total << '\n';
  }
  for (int vid : solution.deferred) out << vid << ",,,,,\n";
}

}  // namespace evcharge
