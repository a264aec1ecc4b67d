// qlslab command line: dataset generation, variational runs, baselines,
// curve fits, transpilation reports and the NBMF application.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlslab/datagen.hpp"
#include "qlslab/experiment.hpp"
#include "qlslab/fit.hpp"
#include "qlslab/nbmf.hpp"
#include "qlslab/qaoa.hpp"
#include "qlslab/sa.hpp"

namespace fs = std::filesystem;
using namespace qlslab;

namespace {

fs::path default_out_dir() {
  const char* env = std::getenv("QLSLAB_OUT");
  return env && *env ? fs::path(env) : fs::path(".");
}

void echo(const fs::path& p) { std::cout << p.string() << "\n"; }

Matrix read_matrix_csv(const fs::path& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw std::runtime_error("empty matrix file: " + path.string());
  // skip a non-numeric header row if present
  std::size_t first = 0;
  try {
    (void)std::stod(rows[0].at(0));
  } catch (...) {
    first = 1;
  }
  if (first >= rows.size()) throw std::runtime_error("no data rows in " + path.string());
  Matrix m(rows.size() - first, rows[first].size());
  for (std::size_t i = first; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) throw std::runtime_error("ragged matrix CSV");
    for (std::size_t j = 0; j < m.cols; ++j) m(i - first, j) = std::stod(rows[i][j]);
  }
  return m;
}

void write_matrix_csv(const Matrix& m, const fs::path& path) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << "\n";
  }
  write_text_file(path, os.str());
}

int cmd_gen_dataset(const DatasetSpec& spec, const fs::path& out_dir) {
  auto instances = generate(spec);
  auto rows = write_dataset(instances, out_dir);
  for (const auto& row : rows) echo(out_dir / ("instance_" + row.instance_id + ".json"));
  echo(out_dir / "manifest.csv");
  return 0;
}

struct SolveArgs {
  std::string instance_path;
  int p = 1;
  std::string mode = "exact";
  std::uint64_t shots = 1024;
  int budget = 200;
  int starts = 20;
  std::string coupling = "all";
  double noise_scale = 1.0;
  std::uint64_t final_shots = 1024;
  std::uint64_t seed = 0;
  bool rel_error_with_offset = false;
  fs::path out_dir;
};

int cmd_solve(const SolveArgs& args) {
  BllsInstance inst = load_instance(args.instance_path);
  auto qubo = encode_qubo(inst);
  QaoaProblem prob(qubo_to_ising(qubo));

  QaoaRunConfig cfg;
  cfg.p = args.p;
  cfg.seed = args.seed;
  cfg.opt.budget = args.budget;
  cfg.n_starts = args.starts;
  cfg.final_shots = args.final_shots;
  cfg.rel_error_with_offset = args.rel_error_with_offset;
  if (args.mode == "exact") {
    cfg.mode = BackendMode::exact();
  } else if (args.mode == "shots") {
    cfg.mode = BackendMode::shot_based(args.shots);
  } else if (args.mode == "noisy") {
    NoiseModel nm;
    nm.scale = args.noise_scale;
    cfg.mode = BackendMode::noisy_mode(nm, args.shots,
                                       coupling_by_name(args.coupling, prob.n()));
  } else {
    throw std::invalid_argument("unknown mode: " + args.mode);
  }

  const std::string id = fs::path(args.instance_path).stem().string();
  RunRecord rec = run_qaoa(prob, cfg, id, qubo.constant);
  fs::create_directories(args.out_dir);
  rec.trace_csv_path = "solve_" + id + "_trace.csv";
  std::ostringstream trace;
  trace << "eval_index,value\n";
  for (const auto& [idx, v] : rec.trace) trace << idx << ',' << format_double(v) << "\n";
  write_text_file(args.out_dir / rec.trace_csv_path, trace.str());
  const auto record_path = args.out_dir / ("solve_" + id + ".json");
  write_text_file(record_path, to_json(rec).dump(2) + "\n");
  echo(args.out_dir / rec.trace_csv_path);
  echo(record_path);
  return 0;
}

struct SaBaselineArgs {
  std::string dataset_dir;  // empty: generate internally
  int n_min = 3, n_max = 10;
  int problems = 100;
  int m = 40;
  double density = 0.2;
  double consistent_fraction = 0.4;
  int runs = 1000;
  SaConfig sa;
  std::uint64_t seed = 0;
  fs::path out_dir;
};

int cmd_sa_baseline(const SaBaselineArgs& args) {
  std::vector<SaCurveProblem> problems;
  if (!args.dataset_dir.empty()) {
    for (const auto& entry : load_dataset(args.dataset_dir)) {
      SaCurveProblem p;
      p.n = entry.n;
      p.problem_id = entry.instance_id;
      p.ising = qubo_to_ising(encode_qubo(entry.instance));
      p.ground_states = brute_force_solve(p.ising).ground_states;
      problems.push_back(std::move(p));
    }
  } else {
    DatasetSpec spec;
    spec.n_values.clear();
    for (int n = args.n_min; n <= args.n_max; ++n) spec.n_values.push_back(n);
    spec.m = args.m;
    spec.density = args.density;
    spec.problems_per_n = args.problems;
    spec.consistent_fraction = args.consistent_fraction;
    spec.master_seed = args.seed;
    std::map<int, int> index_by_n;
    for (auto& inst : generate(spec)) {
      SaCurveProblem p;
      p.n = static_cast<int>(inst.n());
      p.problem_id = instance_id(p.n, index_by_n[p.n]++);
      p.ising = qubo_to_ising(encode_qubo(inst));
      p.ground_states = brute_force_solve(p.ising).ground_states;
      problems.push_back(std::move(p));
    }
  }

  SaConfig cfg = args.sa;
  cfg.seed = derive(args.seed, 0x5aba5e);
  SaCurve curve = sa_success_curve(problems, args.runs, cfg);

  fs::create_directories(args.out_dir);
  std::ostringstream per_problem;
  per_problem << "# qlslab-sa-v1\n";
  per_problem << "n,problem_id,success_fraction\n";
  for (const auto& e : curve.per_problem)
    per_problem << e.n << ',' << e.problem_id << ',' << format_double(e.success_fraction)
                << "\n";
  write_text_file(args.out_dir / "sa_success.csv", per_problem.str());

  std::ostringstream summary;
  summary << "# qlslab-sa-summary-v1\n";
  summary << "n,median_success\n";
  for (const auto& [n, med] : curve.per_n_median)
    summary << n << ',' << format_double(med) << "\n";
  write_text_file(args.out_dir / "sa_summary.csv", summary.str());

  echo(args.out_dir / "sa_success.csv");
  echo(args.out_dir / "sa_summary.csv");
  return 0;
}

struct FitCurvesArgs {
  std::string input;
  std::string model = "power";  // power | success
  int n_col = 0;
  int value_col = 1;
  std::optional<double> fix_b;
  bool fix_a_one = false;
  int k = 10;
  fs::path out_dir;
};

int cmd_fit_curves(const FitCurvesArgs& args) {
  auto rows = read_csv(args.input);
  std::vector<std::pair<double, double>> points;
  for (const auto& row : rows) {
    try {
      double n = std::stod(row.at(args.n_col));
      double v = std::stod(row.at(args.value_col));
      points.push_back({n, v});
    } catch (const std::invalid_argument&) {
      // header row
    }
  }
  if (points.empty()) throw std::runtime_error("no data points in " + args.input);

  CurveFit fit;
  if (args.model == "power")
    fit = fit_power_law(points, args.fix_b);
  else if (args.model == "success")
    fit = fit_success_model(points, args.k, args.fix_a_one);
  else
    throw std::invalid_argument("unknown model: " + args.model);

  fs::create_directories(args.out_dir);
  write_text_file(args.out_dir / "fit.json", to_json(fit).dump(2) + "\n");

  std::ostringstream curve;
  curve << "# qlslab-fit-v1\n";
  curve << "n,observed,model\n";
  for (const auto& [n, v] : points) {
    double m = fit.model == CurveModel::power_law ? power_law_value(fit, n)
                                                  : success_model_value(fit, n);
    curve << format_double(n) << ',' << format_double(v) << ',' << format_double(m)
          << "\n";
  }
  write_text_file(args.out_dir / "fit_curve.csv", curve.str());
  echo(args.out_dir / "fit.json");
  echo(args.out_dir / "fit_curve.csv");
  return 0;
}

struct TranspileArgs {
  std::string instance_path;
  std::string circuit_path;
  int p = 1;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::string coupling = "all";
  bool basis_rewrite = false;
};

int cmd_transpile_report(const TranspileArgs& args) {
  Circuit circuit;
  if (!args.circuit_path.empty()) {
    circuit = read_circuit_text(read_text_file(args.circuit_path));
  } else if (!args.instance_path.empty()) {
    BllsInstance inst = load_instance(args.instance_path);
    auto ising = qubo_to_ising(encode_qubo(inst));
    QaoaParams params;
    params.gamma = args.gamma.empty() ? std::vector<double>(args.p, 0.5) : args.gamma;
    params.beta = args.beta.empty() ? std::vector<double>(args.p, 0.5) : args.beta;
    circuit = build_qaoa_circuit(ising, params);
  } else {
    throw std::invalid_argument("need --instance or --circuit");
  }

  nlohmann::json report;
  report["logical"] = to_json(depth_and_counts(circuit));
  Circuit routed = route(circuit, coupling_by_name(args.coupling, circuit.n_qubits));
  if (args.basis_rewrite) routed = rewrite_basis(routed);
  report["transpiled"] = to_json(depth_and_counts(routed));
  report["coupling"] = args.coupling;
  report["basis_rewrite"] = args.basis_rewrite;
  std::cout << report.dump(2) << "\n";
  return 0;
}

struct NbmfArgs {
  std::string v_path;
  int rank = 2;
  std::string backend = "brute";
  int max_iters = 50;
  double tol = 1e-5;
  std::uint64_t seed = 0;
  int sa_steps = 10;
  int qaoa_p = 1;
  int qaoa_budget = 60;
  int qaoa_starts = 5;
  fs::path out_dir;
};

int cmd_nbmf(const NbmfArgs& args) {
  NbmfProblem prob;
  prob.v = read_matrix_csv(args.v_path);
  prob.rank = args.rank;
  prob.max_outer_iters = args.max_iters;
  prob.tolerance = args.tol;
  prob.seed = args.seed;

  BllsBackend backend;
  if (args.backend == "brute") {
    backend = BllsBackend::brute_force();
  } else if (args.backend == "sa") {
    SaConfig sa;
    sa.k = args.sa_steps;
    backend = BllsBackend::simulated_annealing(sa);
  } else if (args.backend == "qaoa") {
    QaoaRunConfig cfg;
    cfg.p = args.qaoa_p;
    cfg.opt.budget = args.qaoa_budget;
    cfg.n_starts = args.qaoa_starts;
    backend = BllsBackend::qaoa(cfg);
  } else {
    throw std::invalid_argument("unknown backend: " + args.backend);
  }

  NbmfResult res = nbmf_solve(prob, backend);
  fs::create_directories(args.out_dir);
  write_matrix_csv(res.w, args.out_dir / "W.csv");
  write_matrix_csv(res.h, args.out_dir / "H.csv");
  std::ostringstream trace;
  trace << "iteration,frobenius_residual\n";
  for (std::size_t i = 0; i < res.objective_trace.size(); ++i)
    trace << i + 1 << ',' << format_double(res.objective_trace[i]) << "\n";
  write_text_file(args.out_dir / "trace.csv", trace.str());
  echo(args.out_dir / "W.csv");
  echo(args.out_dir / "H.csv");
  echo(args.out_dir / "trace.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary least squares via variational optimization: experiment runner"};
  app.require_subcommand(1);

  // gen-dataset
  DatasetSpec spec;
  fs::path gen_out = default_out_dir();
  auto* gen = app.add_subcommand("gen-dataset", "generate the seeded problem dataset");
  gen->add_option("--n", spec.n_values, "problem sizes")->capture_default_str();
  gen->add_option("--m", spec.m, "rows per instance")->capture_default_str();
  gen->add_option("--density", spec.density, "nonzero density of A")->capture_default_str();
  gen->add_option("--count", spec.problems_per_n, "instances per n")->capture_default_str();
  gen->add_option("--consistent-fraction", spec.consistent_fraction,
                  "fraction with exact solutions")->capture_default_str();
  gen->add_flag("--sparse-b", spec.sparse_b, "draw b with the sparsity rule of A");
  gen->add_option("--seed", spec.master_seed, "master seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory");

  // solve
  SolveArgs solve;
  solve.out_dir = default_out_dir();
  auto* sv = app.add_subcommand("solve", "run one instance end to end");
  sv->add_option("--instance", solve.instance_path, "instance JSON")->required();
  sv->add_option("--p", solve.p, "layer count")->capture_default_str();
  sv->add_option("--mode", solve.mode, "exact|shots|noisy")->capture_default_str();
  sv->add_option("--shots", solve.shots, "shots per evaluation")->capture_default_str();
  sv->add_option("--budget", solve.budget, "objective evaluations per start")
      ->capture_default_str();
  sv->add_option("--starts", solve.starts, "random starting points")->capture_default_str();
  sv->add_option("--coupling", solve.coupling, "all|line|t")->capture_default_str();
  sv->add_option("--noise-scale", solve.noise_scale, "noise model scale")
      ->capture_default_str();
  sv->add_option("--final-shots", solve.final_shots, "final sampling shots")
      ->capture_default_str();
  sv->add_option("--seed", solve.seed, "run seed")->capture_default_str();
  sv->add_flag("--rel-error-with-offset", solve.rel_error_with_offset,
               "relative error on residual energies instead");
  sv->add_option("--out", solve.out_dir, "output directory");

  // experiment
  ExperimentPlan plan;
  plan.out_dir = default_out_dir();
  int max_per_n = 0;
  auto* ex = app.add_subcommand("experiment", "sweep a dataset");
  ex->add_option("--dataset", plan.dataset_dir, "dataset directory")->required();
  ex->add_option("--p", plan.p_values, "layer counts")->capture_default_str();
  ex->add_option("--mode", plan.modes, "modes: exact shots noisy")->capture_default_str();
  ex->add_option("--shots", plan.shot_values, "shot values (default 2^(n-2)..2^(n+2))");
  ex->add_option("--reps", plan.repetitions, "repetitions per configuration")
      ->capture_default_str();
  ex->add_option("--budget", plan.budget, "evaluations per start (0: 200/400 by p)")
      ->capture_default_str();
  ex->add_option("--starts", plan.starts, "starts (0: 20p exact, 5p sampled)")
      ->capture_default_str();
  ex->add_option("--seed", plan.master_seed, "master seed")->capture_default_str();
  ex->add_option("--jobs", plan.jobs, "parallel workers")->capture_default_str();
  ex->add_option("--coupling", plan.coupling, "noisy-mode coupling map")
      ->capture_default_str();
  ex->add_option("--noise-scale", plan.noise_scale, "noisy-mode scale")
      ->capture_default_str();
  ex->add_option("--final-shots", plan.final_shots, "final sampling shots")
      ->capture_default_str();
  ex->add_option("--max-per-n", max_per_n, "limit instances per n (0: all)")
      ->capture_default_str();
  ex->add_option("--out", plan.out_dir, "output directory");

  // sa-baseline
  SaBaselineArgs sa_args;
  sa_args.out_dir = default_out_dir();
  auto* sa = app.add_subcommand("sa-baseline", "simulated annealing success curve");
  sa->add_option("--dataset", sa_args.dataset_dir, "dataset directory (else generate)");
  sa->add_option("--n-min", sa_args.n_min, "smallest n when generating")
      ->capture_default_str();
  sa->add_option("--n-max", sa_args.n_max, "largest n when generating")
      ->capture_default_str();
  sa->add_option("--problems", sa_args.problems, "problems per n when generating")
      ->capture_default_str();
  sa->add_option("--m", sa_args.m, "rows per instance")->capture_default_str();
  sa->add_option("--density", sa_args.density, "nonzero density")->capture_default_str();
  sa->add_option("--runs", sa_args.runs, "annealing runs per problem")
      ->capture_default_str();
  sa->add_option("--t0", sa_args.sa.t0, "initial temperature")->capture_default_str();
  sa->add_option("--tf", sa_args.sa.tf, "final temperature")->capture_default_str();
  sa->add_option("--steps", sa_args.sa.k, "temperature steps")->capture_default_str();
  sa->add_option("--sweeps", sa_args.sa.sweeps_per_step, "sweeps per step")
      ->capture_default_str();
  sa->add_option("--seed", sa_args.seed, "master seed")->capture_default_str();
  sa->add_option("--out", sa_args.out_dir, "output directory");

  // fit-curves
  FitCurvesArgs fit_args;
  fit_args.out_dir = default_out_dir();
  double fix_b_value = 0.0;
  auto* fc = app.add_subcommand("fit-curves", "fit the growth / success models");
  fc->add_option("--input", fit_args.input, "CSV with (n, value) columns")->required();
  fc->add_option("--model", fit_args.model, "power|success")->capture_default_str();
  fc->add_option("--n-col", fit_args.n_col, "column index of n")->capture_default_str();
  fc->add_option("--value-col", fit_args.value_col, "column index of the value")
      ->capture_default_str();
  auto* fixb = fc->add_option("--fix-b", fix_b_value, "fix the power-law exponent");
  fc->add_flag("--fix-a-one", fit_args.fix_a_one, "fix a = 1 in the success model");
  fc->add_option("--k", fit_args.k, "queries in the success model")->capture_default_str();
  fc->add_option("--out", fit_args.out_dir, "output directory");

  // transpile-report
  TranspileArgs tr_args;
  auto* tr = app.add_subcommand("transpile-report", "gate counts before/after routing");
  tr->add_option("--instance", tr_args.instance_path, "instance JSON to build from");
  tr->add_option("--circuit", tr_args.circuit_path, "circuit text file");
  tr->add_option("--p", tr_args.p, "layer count")->capture_default_str();
  tr->add_option("--gamma", tr_args.gamma, "gamma angles");
  tr->add_option("--beta", tr_args.beta, "beta angles");
  tr->add_option("--coupling", tr_args.coupling, "all|line|t")->capture_default_str();
  tr->add_flag("--basis", tr_args.basis_rewrite, "rewrite to the U1/U3/CNOT basis");

  // nbmf
  NbmfArgs nbmf_args;
  nbmf_args.out_dir = default_out_dir();
  auto* nb = app.add_subcommand("nbmf", "binary matrix factorization by alternating LS");
  nb->add_option("--v", nbmf_args.v_path, "matrix V as CSV")->required();
  nb->add_option("--rank", nbmf_args.rank, "factorization rank")->capture_default_str();
  nb->add_option("--backend", nbmf_args.backend, "brute|sa|qaoa")->capture_default_str();
  nb->add_option("--max-iters", nbmf_args.max_iters, "outer iterations")
      ->capture_default_str();
  nb->add_option("--tol", nbmf_args.tol, "relative residual change tolerance")
      ->capture_default_str();
  nb->add_option("--seed", nbmf_args.seed, "seed")->capture_default_str();
  nb->add_option("--sa-steps", nbmf_args.sa_steps, "SA temperature steps")
      ->capture_default_str();
  nb->add_option("--qaoa-p", nbmf_args.qaoa_p, "QAOA layers")->capture_default_str();
  nb->add_option("--qaoa-budget", nbmf_args.qaoa_budget, "QAOA budget per start")
      ->capture_default_str();
  nb->add_option("--qaoa-starts", nbmf_args.qaoa_starts, "QAOA starts")
      ->capture_default_str();
  nb->add_option("--out", nbmf_args.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_dataset(spec, gen_out);
    if (sv->parsed()) return cmd_solve(solve);
    if (ex->parsed()) {
      if (max_per_n > 0) plan.max_instances_per_n = max_per_n;
      ExperimentOutcome outcome = run_experiment(plan);
      for (const auto& f : outcome.record_files) echo(f);
      echo(outcome.results_csv);
      echo(outcome.hits_csv);
      std::cerr << "executed " << outcome.executed << ", reused " << outcome.reused
                << ", failed " << outcome.failed << "\n";
      return outcome.failed == 0 ? 0 : 2;
    }
    if (sa->parsed()) return cmd_sa_baseline(sa_args);
    if (fc->parsed()) {
      if (fixb->count() > 0) fit_args.fix_b = fix_b_value;
      return cmd_fit_curves(fit_args);
    }
    if (tr->parsed()) return cmd_transpile_report(tr_args);
    if (nb->parsed()) return cmd_nbmf(nbmf_args);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
