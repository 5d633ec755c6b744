#pragma once

// File formats and batch drivers around the extended bin packing encodings:
// instance and polynomial JSON, per-run CSV, summary JSON, and the
// brute-force verification report.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pubo/extbp.hpp"
#include "pubo/qaoa.hpp"

namespace pubo::harness {

// ---- instances ----

extbp::Instance instance_from_json(const std::string& text);
std::string instance_to_json(const extbp::Instance& inst);
extbp::Instance load_instance(const std::string& path);
/// A built-in name ("A", "B", "C") or a path to an instance file.
extbp::Instance resolve_instance(const std::string& spec);

// ---- encodings ----

struct LambdaOverrides {
  std::optional<double> uni;
  std::optional<double> capa;
};

/// Encoding with lambda_default unless overridden.
extbp::Encoding build_encoding(const extbp::Instance& inst, extbp::Formulation f, const LambdaOverrides& lambdas = {});

struct PolynomialFile {
  Polynomial poly;
  VarTable vars;
  std::string instance;
  std::string formulation;
  std::size_t qubit_count = 0;
  std::size_t num_decision = 0;
  double lambda_uni = 0.0;
  double lambda_capa = 0.0;
};

std::string export_polynomial(const extbp::Instance& inst, const extbp::Encoding& enc);
/// Throws std::runtime_error on malformed input.
PolynomialFile import_polynomial(const std::string& text);

// ---- hypercube checks ----

struct Equivalence {
  double minimum = 0.0;
  std::size_t minimizers = 0;
  /// Distinct (x, y) projections of the minimizers, ascending.
  std::vector<extbp::Assignment> projected;
  bool holds = false;  // projected == constrained optima and minimum == optimum
};

/// Scans every state of the encoding. Reuses `table` when given.
Equivalence check_equivalence(const extbp::Instance& inst, const extbp::Encoding& enc,
                              const extbp::BruteForceResult& exact, const qaoa::CostTable* table = nullptr);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Optimum, optima count, interval bounds, default lambda, qubit counts for
/// both encodings, and PUBO/QUBO projection equivalence.
std::vector<Check> verify(const extbp::Instance& inst);

// ---- experiments ----

struct ExperimentConfig {
  std::vector<std::string> instances;
  std::vector<extbp::Formulation> formulations;
  int runs = 100;
  std::uint64_t master_seed = 0;
  qaoa::QaoaConfig qaoa;
  LambdaOverrides lambdas;
  /// 0 picks PUBO_THREADS from the environment, then the hardware count.
  int threads = 0;
  /// When false every wall time is written as 0 so reruns are byte-identical.
  bool record_timing = true;

  void validate() const;
};

struct RunRow {
  int run_id = 0;
  std::string instance;
  std::string formulation;
  std::uint64_t seed = 0;
  std::size_t n_qubits = 0;
  int n_iterations = 0;
  int n_evals = 0;
  std::string best_bits;
  double best_loss = 0.0;
  extbp::Classification classification = extbp::Classification::Infeasible;
  double wall_ms = 0.0;
};

struct SummaryRow {
  std::string instance;
  std::string formulation;
  std::size_t qubits = 0;
  int runs = 0;
  double optimal = 0.0;
  double feasible = 0.0;
  double infeasible = 0.0;
  double mean_iterations = 0.0;
  double mean_evals = 0.0;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  std::vector<RunRow> rows;
  std::vector<SummaryRow> summary;
};

int resolve_threads(int requested);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// One summary row per (instance, formulation) in order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<RunRow>& rows);

void write_csv(std::ostream& out, const std::vector<RunRow>& rows);
std::vector<RunRow> read_csv(std::istream& in);
std::string summary_json(const ExperimentConfig& cfg, const std::vector<SummaryRow>& summary);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace pubo::harness
