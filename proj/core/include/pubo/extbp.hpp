#pragma once

// Extended bin packing: trains (bins) with a usage cost and a per-group
// benefit, customer groups (items) that may ride at most one accepted train,
// and a carriage capacity of CMax groups per opened train.
//
// Variable layout shared by every encoding:
//   x_0 .. x_{n-1}                   train i is used
//   y_i_j for each train i, j in T_i  group j rides train i (train-major, T_i order)
//   QUBO only: s_j for each group with >= 2 accepted trains, then r_i_k bits per train.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pubo/pbf.hpp"

namespace pubo::extbp {

struct Train {
  double cost = 1.0;
  double benefit = 1.0;
  std::vector<int> groups;  // accepted groups; y variables follow this order
};

struct Instance {
  std::string name;
  int num_groups = 0;
  int cmax = 1;
  std::vector<Train> trains;

  std::size_t num_trains() const { return trains.size(); }
  /// q: total number of (train, group) pairs, one y variable each.
  std::size_t num_y() const;
  /// Throws std::invalid_argument on out-of-range or duplicate groups, cmax < 1,
  /// or negative cost/benefit.
  void validate() const;
  /// G_j: indices of trains that accept group j.
  std::vector<std::vector<int>> trains_of_group() const;
  /// Position of y_i_j in the y block, or -1 when group j does not accept train i.
  int y_index(int train, int group) const;
};

/// Built-in instances "A", "B", "C". Throws std::invalid_argument otherwise.
Instance builtin_instance(const std::string& name);
std::vector<std::string> builtin_names();

struct Assignment {
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> y;  // y block order

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// Splits a packed bit pattern (x first, then y) into an Assignment.
Assignment unpack(const Instance& inst, std::uint64_t bits);
std::uint64_t pack(const Instance& inst, const Assignment& a);
/// Takes the first n + q entries of a full encoding state.
Assignment project(const Instance& inst, std::span<const std::uint8_t> state);

double objective_value(const Instance& inst, const Assignment& a);
bool is_feasible(const Instance& inst, const Assignment& a);

enum class Classification { Optimal, FeasibleNonOptimal, Infeasible };
const char* to_string(Classification c);
Classification classify(const Instance& inst, const Assignment& a, double optimum);

struct BruteForceResult {
  double optimum = 0.0;
  std::vector<Assignment> optima;  // ascending packed order
};

inline constexpr std::size_t kBruteForceMaxBits = 30;

/// Exhaustive scan over all 2^(n+q) patterns.
BruteForceResult brute_force(const Instance& inst);

enum class Formulation { Pubo, Qubo };
const char* to_string(Formulation f);
Formulation parse_formulation(const std::string& s);

struct Encoding {
  Formulation formulation = Formulation::Pubo;
  Polynomial poly;
  VarTable vars;
  std::size_t qubit_count = 0;
  std::size_t num_decision = 0;  // n + q
  double lambda_uni = 0.0;
  double lambda_capa = 0.0;
};

/// Objective sum c_i x_i - sum p_i y_ij over the decision variables.
Polynomial objective_polynomial(const Instance& inst);

/// Binary-valued penalties: le(.,1) per group and
/// (1 - x_i) eq(.,0) + x_i le(.,CMax) per train.
Encoding to_pubo(const Instance& inst, double lambda_uni, double lambda_capa);

/// Squared slack penalties; groups with a single accepted train need no term.
Encoding to_qubo(const Instance& inst, double lambda_uni, double lambda_capa);

/// Both lambdas set to lambda_default of the objective.
Encoding encode(const Instance& inst, Formulation f);

/// n + q for PUBO; n + q + #{j : |G_j| >= 2} + n' (floor(log2 CMax) + 1) for
/// QUBO, where n' counts trains accepting at least one group (a capacity
/// constraint over no groups is never violated and gets no slack).
std::size_t expected_qubits(const Instance& inst, Formulation f);

}  // namespace pubo::extbp
