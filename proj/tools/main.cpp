// pubo: encode, verify and solve extended bin packing instances with QAOA.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pubo/harness.hpp"

namespace {

using namespace pubo;

struct CommonFlags {
  int shots = 10;
  int depth = 1;
  int max_evals = 500;
  std::optional<double> lambda_uni;
  std::optional<double> lambda_capa;
};

void add_qaoa_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--shots", f.shots, "Measurements per loss evaluation")->check(CLI::PositiveNumber);
  cmd->add_option("--depth", f.depth, "QAOA layers")->check(CLI::PositiveNumber);
  cmd->add_option("--max-evals", f.max_evals, "Loss evaluation cap per run")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda-uni", f.lambda_uni, "Penalty weight of the one-train-per-group constraints");
  cmd->add_option("--lambda-capa", f.lambda_capa, "Penalty weight of the capacity constraints");
}

qaoa::QaoaConfig qaoa_config(const CommonFlags& f) {
  qaoa::QaoaConfig c;
  c.shots = f.shots;
  c.depth = f.depth;
  c.max_evals = f.max_evals;
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

int cmd_solve(const std::string& instance, const std::string& formulation, std::uint64_t seed, const CommonFlags& f) {
  const auto inst = harness::resolve_instance(instance);
  const auto enc = harness::build_encoding(inst, extbp::parse_formulation(formulation), {f.lambda_uni, f.lambda_capa});
  const auto table = qaoa::build_cost_table(enc.poly, enc.qubit_count);
  const auto exact = extbp::brute_force(inst);
  const auto rec = qaoa::run(table, qaoa_config(f), seed);
  const auto a = extbp::unpack(inst, rec.best_state);
  std::cout << "instance        " << inst.name << "\n"
            << "formulation     " << extbp::to_string(enc.formulation) << "\n"
            << "qubits          " << enc.qubit_count << "\n"
            << "seed            " << seed << "\n"
            << "evaluations     " << rec.n_evals << (rec.hit_eval_cap ? " (cap reached)" : "") << "\n"
            << "iterations      " << rec.n_iterations << "\n"
            << "best bits       " << rec.best_bits() << "\n"
            << "best loss       " << harness::format_double(rec.best_loss) << "\n"
            << "constrained opt " << harness::format_double(exact.optimum) << "\n"
            << "classification  " << extbp::to_string(extbp::classify(inst, a, exact.optimum)) << "\n";
  return 0;
}

int cmd_verify(const std::vector<std::string>& instances) {
  bool all = true;
  for (const auto& spec : instances) {
    const auto inst = harness::resolve_instance(spec);
    std::cout << "instance " << inst.name << "\n";
    for (const auto& c : harness::verify(inst)) {
      std::cout << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << c.detail << "\n";
      all = all && c.pass;
    }
  }
  return all ? 0 : 1;
}

int cmd_export(const std::string& instance, const std::string& formulation, const std::string& out,
               const CommonFlags& f) {
  const auto inst = harness::resolve_instance(instance);
  const auto enc = harness::build_encoding(inst, extbp::parse_formulation(formulation), {f.lambda_uni, f.lambda_capa});
  write_text(out, harness::export_polynomial(inst, enc));
  return 0;
}

int cmd_experiment(harness::ExperimentConfig cfg, const std::vector<std::string>& formulations,
                   const std::string& out_dir, const CommonFlags& f) {
  for (const auto& s : formulations) cfg.formulations.push_back(extbp::parse_formulation(s));
  cfg.qaoa = qaoa_config(f);
  cfg.lambdas = {f.lambda_uni, f.lambda_capa};
  const auto result = harness::run_experiment(cfg);

  std::filesystem::create_directories(out_dir);
  const auto csv_path = std::filesystem::path(out_dir) / "runs.csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  harness::write_csv(csv, result.rows);
  write_text((std::filesystem::path(out_dir) / "summary.json").string(), harness::summary_json(cfg, result.summary));

  std::printf("%-10s %-5s %6s %8s %8s %10s %10s\n", "instance", "form", "qubits", "optimal", "feasible", "infeasible",
              "mean_evals");
  for (const auto& s : result.summary) {
    std::printf("%-10s %-5s %6zu %8.2f %8.2f %10.2f %10.1f\n", s.instance.c_str(), s.formulation.c_str(), s.qubits,
                s.optimal, s.feasible, s.infeasible, s.mean_evals);
  }
  std::printf("wrote %s\n", csv_path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial penalty encodings of extended bin packing, solved with simulated QAOA"};
  app.require_subcommand(1);

  std::string instance = "A";
  std::string formulation = "pubo";
  std::string out;
  std::uint64_t seed = 0;
  CommonFlags flags;

  auto* solve = app.add_subcommand("solve", "Run QAOA once and classify the best measured state");
  solve->add_option("--instance", instance, "Builtin name (A, B, C) or instance JSON path");
  solve->add_option("--formulation", formulation, "pubo or qubo");
  solve->add_option("--seed", seed, "Run seed");
  add_qaoa_flags(solve, flags);

  harness::ExperimentConfig cfg;
  std::vector<std::string> exp_instances{"A", "B", "C"};
  std::vector<std::string> exp_forms{"pubo", "qubo"};
  std::string out_dir = "results";
  bool no_timing = false;
  auto* exp = app.add_subcommand("experiment", "Repeat QAOA runs per instance and formulation; write CSV and summary");
  exp->add_option("--instance", exp_instances, "Instances (repeatable or comma separated)")->delimiter(',');
  exp->add_option("--formulation", exp_forms, "Formulations (repeatable or comma separated)")->delimiter(',');
  exp->add_option("--runs", cfg.runs, "Runs per cell")->check(CLI::PositiveNumber);
  exp->add_option("--seed", cfg.master_seed, "Master seed; run i uses a seed derived from it and i");
  exp->add_option("--threads", cfg.threads, "Worker threads (default: PUBO_THREADS or hardware count)");
  exp->add_option("--out", out_dir, "Output directory for runs.csv and summary.json");
  exp->add_flag("--no-timing", no_timing, "Write wall_ms as 0 so reruns are byte-identical");
  add_qaoa_flags(exp, flags);

  std::vector<std::string> verify_instances{"A", "B", "C"};
  auto* verify = app.add_subcommand("verify", "Brute-force checks of an instance and both encodings");
  verify->add_option("--instance", verify_instances, "Instances (repeatable or comma separated)")->delimiter(',');

  auto* exportc = app.add_subcommand("export", "Write the assembled polynomial as JSON");
  exportc->add_option("--instance", instance, "Builtin name (A, B, C) or instance JSON path");
  exportc->add_option("--formulation", formulation, "pubo or qubo");
  exportc->add_option("--out", out, "Output file (default stdout)");
  exportc->add_option("--lambda-uni", flags.lambda_uni, "Penalty weight of the one-train-per-group constraints");
  exportc->add_option("--lambda-capa", flags.lambda_capa, "Penalty weight of the capacity constraints");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(instance, formulation, seed, flags);
    if (*verify) return cmd_verify(verify_instances);
    if (*exportc) return cmd_export(instance, formulation, out, flags);
    if (*exp) {
      cfg.instances = exp_instances;
      cfg.record_timing = !no_timing;
      return cmd_experiment(cfg, exp_forms, out_dir, flags);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
