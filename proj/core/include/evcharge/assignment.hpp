#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <vector>

#include "evcharge/model.hpp"

namespace evcharge {

// One epoch's vehicle-to-charger matching problem. Ids only need to be unique within the
// instance; ties between equal-cost matchings are broken by ascending (vehicle id, charger id).
struct AssignmentInstance {
  struct Vehicle {
    int id = 0;
    double soc = 0.0;  // kWh at the start of the epoch
    Point location;
  };
  struct Charger {
    int id = 0;
    double power = kFastPowerKwhPerMin;  // kWh per minute
    double available_in = 0.0;           // minutes from epoch start until the charger is free
    Point location;
  };

  std::vector<Vehicle> vehicles;
  std::vector<Charger> chargers;
  FleetParams params;

  std::vector<std::string> problems() const;
};

// Cost data of sending vehicle i to charger j. Everything is in minutes except `energy` (kWh).
struct ArcCost {
  bool feasible = false;
  double travel = 0.0;
  double distance_km = 0.0;
  double arrival_soc = 0.0;
  double energy = 0.0;  // recharged amount, e_max - arrival_soc
  double charge = 0.0;  // energy / power
  double wait = 0.0;    // max(0, available_in - travel)
  double total = 0.0;   // travel + charge + wait
};

// Row-major |I| x |J| matrix, indexed in instance order.
class ArcMatrix {
 public:
  ArcMatrix() = default;
  ArcMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const ArcCost& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  ArcCost& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ArcCost> data_;
};

ArcCost arc_cost(const AssignmentInstance::Vehicle& v, const AssignmentInstance::Charger& c,
                 const FleetParams& params);
ArcMatrix build_arc_costs(const AssignmentInstance& instance);

struct AssignmentSolution {
  std::map<int, int> pairs;          // vehicle id -> charger id
  std::map<int, ArcCost> per_pair;   // vehicle id -> cost of its arc
  std::set<int> deferred;            // vehicles left unassigned this epoch
  double objective = 0.0;            // sum of per_pair totals, in vehicle-id order

  // Empty when the solution respects one-to-one assignment, feasibility and the cost sum.
  std::vector<std::string> problems(const AssignmentInstance& instance) const;
};

// Largest number of vehicles that can be matched over feasible arcs (augmenting paths).
std::size_t max_feasible_cardinality(const AssignmentInstance& instance);

// Builds a solution record from (vehicle index, charger index) pairs.
AssignmentSolution make_solution(const AssignmentInstance& instance, const ArcMatrix& arcs,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& chosen);

// Maximum-cardinality, then minimum-cost matching over feasible arcs. Infeasible arcs are
// excluded outright.
AssignmentSolution solve_exact(const AssignmentInstance& instance);

inline constexpr std::size_t kBruteForceMaxSide = 8;

// Exhaustive enumeration with the same contract as solve_exact. Refuses (InputError) when
// min(|I|, |J|) exceeds kBruteForceMaxSide or the matching count exceeds 5e7.
AssignmentSolution brute_force(const AssignmentInstance& instance);

// Audit dump: `vehicle,charger,travel,charge,wait,total`, deferred vehicles with empty cells.
void write_solution_csv(std::ostream& out, const AssignmentSolution& solution);

}  // namespace evcharge
