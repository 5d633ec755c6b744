#include "pubo/qaoa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace pubo::qaoa {

CostTable build_cost_table(const Polynomial& poly, std::size_t n) {
  if (n > kMaxQubits) {
    throw std::invalid_argument("cost table over " + std::to_string(n) + " qubits exceeds the cap of " +
                                std::to_string(kMaxQubits));
  }
  if (poly.var_bound() > n) {
    throw std::invalid_argument("polynomial uses variable " + std::to_string(poly.var_bound() - 1) + " but only " +
                                std::to_string(n) + " qubits were given");
  }
  // Same term order and summation as Polynomial::evaluate_bits, so every
  // entry is bit-identical to a direct evaluation.
  std::vector<std::pair<std::uint64_t, double>> masks;
  masks.reserve(poly.size());
  for (const auto& [key, c] : poly.terms()) {
    std::uint64_t m = 0;
    for (VarId v : key) m |= std::uint64_t{1} << v;
    masks.emplace_back(m, c);
  }

  CostTable t;
  t.num_qubits = n;
  const std::uint64_t dim = std::uint64_t{1} << n;
  t.values.resize(dim);
  for (std::uint64_t z = 0; z < dim; ++z) {
    double sum = 0.0;
    for (const auto& [m, c] : masks) {
      if ((z & m) == m) sum += c;
    }
    t.values[z] = sum;
  }

  std::unordered_map<double, std::uint32_t> index;
  for (double v : t.values) index.emplace(v, 0);
  t.levels.reserve(index.size());
  for (const auto& [v, _] : index) t.levels.push_back(v);
  std::sort(t.levels.begin(), t.levels.end());
  for (std::uint32_t k = 0; k < t.levels.size(); ++k) index[t.levels[k]] = k;
  t.level_of.resize(dim);
  for (std::uint64_t z = 0; z < dim; ++z) t.level_of[z] = index[t.values[z]];
  return t;
}

StateVector uniform_state(std::size_t n) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  return StateVector(dim, Amplitude(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

void apply_cost_phase(StateVector& state, const CostTable& table, double gamma) {
  std::vector<Amplitude> phase(table.levels.size());
  for (std::size_t k = 0; k < phase.size(); ++k) phase[k] = std::polar(1.0, -gamma * table.levels[k]);
  for (std::size_t z = 0; z < state.size(); ++z) state[z] *= phase[table.level_of[z]];
}

void apply_mixer(StateVector& state, std::size_t n, double beta) {
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const std::size_t dim = state.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t stride = std::size_t{1} << k;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t z = base; z < base + stride; ++z) {
        const Amplitude a = state[z];
        const Amplitude b = state[z + stride];
        // -i s * (re + i im) = s im - i s re
        state[z] = Amplitude(c * a.real() + s * b.imag(), c * a.imag() - s * b.real());
        state[z + stride] = Amplitude(c * b.real() + s * a.imag(), c * b.imag() - s * a.real());
      }
    }
  }
}

StateVector evolve(std::span<const double> params, const CostTable& table) {
  if (params.size() % 2 != 0) throw std::invalid_argument("QAOA parameters come in (gamma, beta) pairs");
  const std::size_t p = params.size() / 2;
  StateVector state = uniform_state(table.num_qubits);
  for (std::size_t l = 0; l < p; ++l) {
    apply_cost_phase(state, table, params[l]);
    apply_mixer(state, table.num_qubits, params[p + l]);
  }
  return state;
}

double norm_squared(const StateVector& state) {
  double s = 0.0;
  for (const auto& a : state) s += std::norm(a);
  return s;
}

std::vector<std::uint64_t> sample(const StateVector& state, int shots, Xoshiro256& rng) {
  std::vector<double> cdf(state.size());
  double acc = 0.0;
  for (std::size_t z = 0; z < state.size(); ++z) {
    acc += std::norm(state[z]);
    cdf[z] = acc;
  }
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(std::max(shots, 0)));
  for (int s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out.push_back(static_cast<std::uint64_t>(it - cdf.begin()));
  }
  return out;
}

double estimate_loss(std::span<const std::uint64_t> samples, const CostTable& table) {
  if (samples.empty()) throw std::invalid_argument("loss estimate needs at least one sample");
  double sum = 0.0;
  for (std::uint64_t z : samples) sum += table.values.at(z);
  return sum / static_cast<double>(samples.size());
}

void QaoaConfig::validate() const {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  if (max_evals < 1) throw std::invalid_argument("max_evals must be at least 1");
  if (!(rho_end > 0) || !(rho_begin >= rho_end)) throw std::invalid_argument("need 0 < rho_end <= rho_begin");
}

std::string RunRecord::best_bits() const {
  std::string s(num_qubits, '0');
  for (std::size_t k = 0; k < num_qubits; ++k) {
    if ((best_state >> k) & 1U) s[k] = '1';
  }
  return s;
}

bool RunRecord::same_result(const RunRecord& o) const {
  return seed == o.seed && num_qubits == o.num_qubits && n_evals == o.n_evals && n_iterations == o.n_iterations &&
         hit_eval_cap == o.hit_eval_cap && sampled_states == o.sampled_states && best_state == o.best_state &&
         best_loss == o.best_loss && initial_params == o.initial_params && final_params == o.final_params &&
         param_trace == o.param_trace && loss_trace == o.loss_trace;
}

RunRecord run(const CostTable& table, const QaoaConfig& config, std::uint64_t seed) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256 rng(seed);

  RunRecord rec;
  rec.seed = seed;
  rec.num_qubits = table.num_qubits;
  const auto p = static_cast<std::size_t>(config.depth);
  rec.initial_params.resize(2 * p);
  for (std::size_t l = 0; l < p; ++l) rec.initial_params[l] = 2 * std::numbers::pi * rng.uniform();
  for (std::size_t l = 0; l < p; ++l) rec.initial_params[p + l] = std::numbers::pi * rng.uniform();

  bool have_best = false;
  auto loss = [&](std::span<const double> params) {
    const StateVector state = evolve(params, table);
    const auto shots = sample(state, config.shots, rng);
    for (std::uint64_t z : shots) {
      const double v = table.values[z];
      if (!have_best || v < rec.best_loss) {
        rec.best_loss = v;
        rec.best_state = z;
        have_best = true;
      }
    }
    rec.sampled_states += shots.size();
    return estimate_loss(shots, table);
  };

  OptimizerOptions opts;
  opts.rho_begin = config.rho_begin;
  opts.rho_end = config.rho_end;
  opts.max_evals = config.max_evals;
  OptimizeResult res = minimize_cobyla(loss, rec.initial_params, opts);

  rec.n_evals = res.evaluations;
  rec.n_iterations = res.iterations;
  rec.hit_eval_cap = res.hit_eval_cap;
  rec.final_params = std::move(res.x);
  rec.param_trace = std::move(res.trace_points);
  rec.loss_trace = std::move(res.trace_values);
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace pubo::qaoa
