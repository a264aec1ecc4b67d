#ifndef QLSLAB_EXPERIMENT_HPP
#define QLSLAB_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "qlslab/blls.hpp"
#include "qlslab/datagen.hpp"
#include "qlslab/io.hpp"
#include "qlslab/qaoa.hpp"
#include "qlslab/sa.hpp"

namespace qlslab {

struct ExperimentPlan {
  std::filesystem::path dataset_dir;
  std::vector<int> p_values{1};
  std::vector<std::string> modes{"exact"};  // exact | shots | noisy
  std::vector<std::uint64_t> shot_values;   // empty: per-n default 2^(n-2)..2^(n+2)
  int repetitions = 1;
  int budget = 0;   // 0: 200 for p<=2, 400 for p=3+
  int starts = 0;   // 0: 20p exact, 5p sampled backends
  std::uint64_t master_seed = 0;
  std::filesystem::path out_dir;
  int jobs = 1;
  std::string coupling = "all";  // noisy mode: all | line | t
  double noise_scale = 1.0;
  std::uint64_t final_shots = 1024;
  std::optional<int> max_instances_per_n;  // subset sweeps
};

struct DatasetEntry {
  std::string instance_id;
  BllsInstance instance;
  int n = 0;
};

inline std::vector<DatasetEntry> load_dataset(const std::filesystem::path& dir,
                                              std::optional<int> max_per_n = {}) {
  auto rows = read_csv(dir / "manifest.csv");
  if (rows.empty() || rows[0].at(0) != "instance_id")
    throw std::runtime_error("bad manifest: " + (dir / "manifest.csv").string());
  std::vector<DatasetEntry> out;
  std::map<int, int> taken;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    DatasetEntry e;
    e.instance_id = rows[i].at(0);
    e.n = std::stoi(rows[i].at(1));
    if (max_per_n && taken[e.n] >= *max_per_n) continue;
    ++taken[e.n];
    e.instance = load_instance(dir / ("instance_" + e.instance_id + ".json"));
    out.push_back(std::move(e));
  }
  return out;
}

inline CouplingMap coupling_by_name(const std::string& name, int n) {
  if (name == "all") return CouplingMap::all_to_all(n);
  if (name == "line") return CouplingMap::line(n);
  if (name == "t") {
    if (n > 5) throw std::invalid_argument("t coupling map is 5 qubits");
    return CouplingMap::t_shaped();
  }
  throw std::invalid_argument("unknown coupling map: " + name);
}

inline std::vector<std::uint64_t> default_shot_values(int n) {
  std::vector<std::uint64_t> shots;
  for (int i = n - 2; i <= n + 2; ++i) shots.push_back(1ull << std::max(i, 0));
  return shots;
}

namespace detail {

struct RunTask {
  std::string instance_id;
  int n = 0;
  int p = 1;
  std::string mode;
  std::uint64_t shots = 0;  // 0 in exact mode
  int rep = 0;
  std::size_t dataset_index = 0;
};

inline std::string task_stem(const RunTask& t) {
  std::ostringstream os;
  os << "run_" << t.instance_id << "_p" << t.p << "_" << t.mode << "_s" << t.shots
     << "_r" << t.rep;
  return os.str();
}

inline std::uint64_t task_seed(std::uint64_t master, const RunTask& t) {
  std::uint64_t s = derive(master, hash_string(t.instance_id));
  s = derive(s, static_cast<std::uint64_t>(t.p), hash_string(t.mode));
  s = derive(s, t.shots, static_cast<std::uint64_t>(t.rep));
  return s;
}

inline std::string trace_csv_body(const std::vector<std::pair<int, double>>& trace) {
  std::ostringstream os;
  os << "eval_index,value\n";
  for (const auto& [idx, v] : trace) os << idx << ',' << format_double(v) << "\n";
  return os.str();
}

}  // namespace detail

struct ExperimentOutcome {
  std::vector<std::filesystem::path> record_files;
  std::filesystem::path results_csv;
  std::filesystem::path hits_csv;
  int executed = 0;
  int reused = 0;
  int failed = 0;
};

/// Re-reads every record file and rebuilds results.csv / hits.csv, so the
/// aggregate is a pure function of the on-disk records.
inline void write_aggregates(const std::vector<std::filesystem::path>& record_files,
                             const std::filesystem::path& out_dir,
                             ExperimentOutcome& outcome) {
  struct Group {
    std::vector<double> rel_errors;
    std::vector<double> success_probs;
    int runs = 0;
    int hits = 0;
    double random_expected = 0.0;
  };
  std::map<std::tuple<int, int, std::string, std::uint64_t>, Group> groups;
  auto sorted = record_files;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& path : sorted) {
    RunRecord r = run_record_from_json(nlohmann::json::parse(read_text_file(path)));
    auto& g = groups[{r.n, r.p, r.mode, r.shots}];
    g.rel_errors.push_back(r.rel_error);
    g.success_probs.push_back(r.success_prob);
    ++g.runs;
    if (r.ground_hit) ++g.hits;
    g.random_expected +=
        random_sampling_success(r.n, std::max(r.n_ground, 1), r.final_counts.shots);
  }

  std::ostringstream results;
  results << "# qlslab-results-v1\n";
  results << "n,p,mode,shots,runs,median_rel_error,mad_rel_error,median_success_prob,"
             "mad_success_prob\n";
  std::ostringstream hits;
  hits << "# qlslab-hits-v1\n";
  hits << "n,p,mode,shots,runs,ground_hit_count,random_expected_hits\n";
  for (const auto& [key, g] : groups) {
    const auto& [n, p, mode, shots] = key;
    Aggregate re = aggregate(g.rel_errors);
    Aggregate sp = aggregate(g.success_probs);
    results << n << ',' << p << ',' << mode << ',' << shots << ',' << g.runs << ','
            << format_double(re.median) << ',' << format_double(re.mad) << ','
            << format_double(sp.median) << ',' << format_double(sp.mad) << "\n";
    hits << n << ',' << p << ',' << mode << ',' << shots << ',' << g.runs << ','
         << g.hits << ',' << format_double(g.random_expected) << "\n";
  }
  outcome.results_csv = out_dir / "results.csv";
  outcome.hits_csv = out_dir / "hits.csv";
  write_text_file(outcome.results_csv, results.str());
  write_text_file(outcome.hits_csv, hits.str());
}

/// Sweep runner: one RunRecord per (instance, p, mode, shots, repetition),
/// resumable (existing record files are reused), parallel over a work
/// queue. Task seeds derive from (master_seed, instance, p, mode, shots,
/// rep) so outputs are identical at any job count.
inline ExperimentOutcome run_experiment(const ExperimentPlan& plan) {
  if (plan.repetitions < 1) throw std::invalid_argument("repetitions >= 1");
  auto dataset = load_dataset(plan.dataset_dir, plan.max_instances_per_n);
  if (dataset.empty()) throw std::runtime_error("dataset is empty");
  std::filesystem::create_directories(plan.out_dir);

  std::vector<detail::RunTask> tasks;
  for (std::size_t di = 0; di < dataset.size(); ++di) {
    const auto& entry = dataset[di];
    for (int p : plan.p_values) {
      for (const auto& mode : plan.modes) {
        std::vector<std::uint64_t> shots_list;
        if (mode == "exact")
          shots_list = {0};
        else if (!plan.shot_values.empty())
          shots_list = plan.shot_values;
        else
          shots_list = default_shot_values(entry.n);
        for (std::uint64_t shots : shots_list)
          for (int rep = 0; rep < plan.repetitions; ++rep)
            tasks.push_back({entry.instance_id, entry.n, p, mode, shots, rep, di});
      }
    }
  }

  ExperimentOutcome outcome;
  std::vector<std::filesystem::path> files(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> executed{0}, reused{0}, failed{0};

  auto worker = [&]() {
    while (true) {
      const std::size_t ti = next.fetch_add(1);
      if (ti >= tasks.size()) return;
      const auto& t = tasks[ti];
      const std::string stem = detail::task_stem(t);
      const auto record_path = plan.out_dir / (stem + ".json");
      files[ti] = record_path;
      if (std::filesystem::exists(record_path)) {
        ++reused;
        continue;
      }
      try {
        QaoaRunConfig cfg;
        cfg.p = t.p;
        cfg.seed = detail::task_seed(plan.master_seed, t);
        cfg.final_shots = plan.final_shots;
        cfg.opt.budget = plan.budget > 0 ? plan.budget : (t.p <= 2 ? 200 : 400);
        if (plan.starts > 0)
          cfg.n_starts = plan.starts;
        else
          cfg.n_starts = (t.mode == "exact" ? 20 : 5) * t.p;
        if (t.mode == "exact") {
          cfg.mode = BackendMode::exact();
        } else if (t.mode == "shots") {
          cfg.mode = BackendMode::shot_based(t.shots);
        } else if (t.mode == "noisy") {
          NoiseModel nm;
          nm.scale = plan.noise_scale;
          cfg.mode = BackendMode::noisy_mode(nm, t.shots, coupling_by_name(plan.coupling, t.n));
        } else {
          throw std::invalid_argument("unknown mode: " + t.mode);
        }
        const auto& inst = dataset[t.dataset_index].instance;
        auto qubo = encode_qubo(inst);
        QaoaProblem prob(qubo_to_ising(qubo));
        RunRecord rec = run_qaoa(prob, cfg, t.instance_id, qubo.constant);
        rec.trace_csv_path = stem + "_trace.csv";
        write_text_file(plan.out_dir / rec.trace_csv_path,
                        detail::trace_csv_body(rec.trace));
        write_text_file(record_path, to_json(rec).dump(2) + "\n");
        ++executed;
      } catch (const std::exception& err) {
        nlohmann::json j;
        j["instance_id"] = t.instance_id;
        j["error"] = err.what();
        write_text_file(plan.out_dir / (stem + "_failed.json"), j.dump(2) + "\n");
        files[ti].clear();
        ++failed;
      }
    }
  };

  const int jobs = std::max(1, plan.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& f : files)
    if (!f.empty()) outcome.record_files.push_back(f);
  outcome.executed = executed;
  outcome.reused = reused;
  outcome.failed = failed;
  write_aggregates(outcome.record_files, plan.out_dir, outcome);
  return outcome;
}

}  // namespace qlslab

#endif  // QLSLAB_EXPERIMENT_HPP
