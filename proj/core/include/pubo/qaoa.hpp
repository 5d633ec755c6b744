#pragma once

// Depth-p QAOA on a dense statevector. The cost Hamiltonian is diagonal, so
// it is stored as a table of 2^n objective values and applied as phases; the
// transverse mixer is applied qubit by qubit.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pubo/cobyla.hpp"
#include "pubo/pbf.hpp"
#include "pubo/rng.hpp"

namespace pubo::qaoa {

inline constexpr std::size_t kMaxQubits = 26;

struct CostTable {
  std::size_t num_qubits = 0;
  std::vector<double> values;  // values[z]: qubit k is bit k of z

  /// Distinct entries of `values`, ascending, and the level of every state.
  /// Lets a cost layer compute one phase per level instead of per state.
  std::vector<double> levels;
  std::vector<std::uint32_t> level_of;

  std::size_t dimension() const { return values.size(); }
};

/// Throws std::invalid_argument if n exceeds kMaxQubits or the polynomial
/// uses a variable >= n.
CostTable build_cost_table(const Polynomial& poly, std::size_t n);

using Amplitude = std::complex<double>;
using StateVector = std::vector<Amplitude>;

StateVector uniform_state(std::size_t n);
void apply_cost_phase(StateVector& state, const CostTable& table, double gamma);
void apply_mixer(StateVector& state, std::size_t n, double beta);

/// params = (gamma_1 .. gamma_p, beta_1 .. beta_p).
StateVector evolve(std::span<const double> params, const CostTable& table);

double norm_squared(const StateVector& state);

/// Inverse-CDF draws from |amp|^2, one uniform per shot.
std::vector<std::uint64_t> sample(const StateVector& state, int shots, Xoshiro256& rng);

/// Mean of the table values at the sampled states. Throws on empty input.
double estimate_loss(std::span<const std::uint64_t> samples, const CostTable& table);

struct QaoaConfig {
  int depth = 1;
  int shots = 10;
  int max_evals = 500;
  double rho_begin = 0.5;
  double rho_end = 1e-3;

  /// Throws std::invalid_argument when depth, shots or max_evals is below 1.
  void validate() const;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::size_t num_qubits = 0;
  int n_evals = 0;       // loss evaluations, each one a batch of shots
  int n_iterations = 0;  // optimizer steps after the initial simplex
  bool hit_eval_cap = false;
  std::uint64_t sampled_states = 0;
  std::uint64_t best_state = 0;
  double best_loss = 0.0;
  std::vector<double> initial_params;
  std::vector<double> final_params;
  std::vector<std::vector<double>> param_trace;
  std::vector<double> loss_trace;
  double wall_ms = 0.0;

  /// Little-endian 0/1 string of best_state, qubit 0 first.
  std::string best_bits() const;

  /// Everything except wall time.
  bool same_result(const RunRecord& other) const;
};

RunRecord run(const CostTable& table, const QaoaConfig& config, std::uint64_t seed);

}  // namespace pubo::qaoa
