#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "oscbo/error.hpp"
#include "oscbo/harness.hpp"

namespace oscbo::harness {

std::string run_file_name(const std::string& task, const std::string& method, std::uint64_t seed) {
  return task + "__" + method + "__seed" + std::to_string(seed) + ".csv";
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && values[idx[j]] == values[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of positions i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = r;
    i = j;
  }
  return ranks;
}

namespace {

struct Cell {
  std::string task;
  std::string method;
  std::uint64_t seed;
};

std::pair<double, double> mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

BenchReport summarize_runs(const std::vector<std::filesystem::path>& files) {
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& f : files) {
    const std::string stem = f.stem().string();
    const auto a = stem.find("__");
    const auto b = stem.find("__", a == std::string::npos ? a : a + 2);
    if (a == std::string::npos || b == std::string::npos) {
      throw InvalidArgument("run file '" + f.string() + "' is not named task__method__seedN.csv");
    }
    const RunLog log = read_run_csv(f);
    if (log.records.empty()) throw InvalidArgument("run file '" + f.string() + "' has no rounds");
    auto& g = groups[{stem.substr(0, a), stem.substr(a + 2, b - a - 2)}];
    g.first.push_back(log.records.back().simple_regret);
    g.second.push_back(log.records.back().cum_regret);
  }

  BenchReport rep;
  for (const auto& [key, vals] : groups) {
    SummaryRow row;
    row.task = key.first;
    row.method = key.second;
    row.runs = static_cast<int>(vals.first.size());
    std::tie(row.simple_mean, row.simple_se) = mean_se(vals.first);
    std::tie(row.cum_mean, row.cum_se) = mean_se(vals.second);
    rep.rows.push_back(row);
  }

  std::map<std::string, std::pair<double, int>> rank_acc;
  for (std::size_t i = 0; i < rep.rows.size();) {
    std::size_t j = i;
    while (j < rep.rows.size() && rep.rows[j].task == rep.rows[i].task) ++j;
    std::vector<double> means;
    for (std::size_t k = i; k < j; ++k) means.push_back(rep.rows[k].simple_mean);
    const auto ranks = average_ranks(means);
    for (std::size_t k = i; k < j; ++k) {
      rep.rows[k].rank = ranks[k - i];
      auto& acc = rank_acc[rep.rows[k].method];
      acc.first += ranks[k - i];
      acc.second += 1;
    }
    i = j;
  }
  for (const auto& [m, acc] : rank_acc) rep.mean_rank[m] = acc.first / acc.second;
  return rep;
}

void write_summary(const std::filesystem::path& out_dir, const BenchReport& report) {
  std::filesystem::create_directories(out_dir);
  std::ofstream s(out_dir / "summary.csv", std::ios::binary);
  s << "task,method,runs,simple_mean,simple_se,cum_mean,cum_se,rank\n";
  for (const auto& r : report.rows) {
    s << r.task << ',' << r.method << ',' << r.runs << ',' << format_double(r.simple_mean) << ','
      << format_double(r.simple_se) << ',' << format_double(r.cum_mean) << ','
      << format_double(r.cum_se) << ',' << format_double(r.rank) << '\n';
  }
  std::ofstream k(out_dir / "ranks.csv", std::ios::binary);
  k << "method,mean_rank\n";
  for (const auto& [m, r] : report.mean_rank) k << m << ',' << format_double(r) << '\n';
  if (!report.failures.empty()) {
    std::ofstream f(out_dir / "failures.txt", std::ios::binary);
    for (const auto& msg : report.failures) f << msg << '\n';
  }
}

BenchReport run_bench(const BenchConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log) {
  if (cfg.tasks.empty() || cfg.methods.empty() || cfg.seeds.empty()) {
    throw ConfigError("bench needs at least one task, method and seed");
  }
  std::vector<std::string> skipped;
  std::map<std::string, std::shared_ptr<const tasks::TaskSpec>> built;
  for (const auto& t : cfg.tasks) {
    if (tasks::is_tabular(t)) {
      const auto it = cfg.data.find(t);
      if (it == cfg.data.end() || !std::filesystem::exists(it->second)) {
        log << "warning: skipping " << t << ": no data file\n";
        skipped.push_back(t);
        continue;
      }
      built[t] = std::make_shared<const tasks::TaskSpec>(tasks::make_task(t, it->second));
    } else {
      built[t] = std::make_shared<const tasks::TaskSpec>(tasks::make_task(t));
    }
  }
  for (const auto& m : cfg.methods) baselines::parse_method(m);

  std::vector<Cell> cells;
  for (const auto& t : cfg.tasks) {
    if (!built.count(t)) continue;
    for (const auto& m : cfg.methods) {
      for (auto s : cfg.seeds) cells.push_back({t, m, s});
    }
  }

  const auto runs_dir = out_dir / "runs";
  std::filesystem::create_directories(runs_dir);
  std::vector<std::optional<std::string>> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      RunConfig rc = cfg.base;
      rc.task = c.task;
      rc.task_spec = built.at(c.task);
      rc.method = baselines::parse_method(c.method);
      rc.seed = c.seed;
      const std::string name = run_file_name(c.task, c.method, c.seed);
      try {
        const RunResult res = run_single(rc);
        if (res.error) {
          errors[i] = *res.error;
          write_run_csv(out_dir / "failed" / name, res);
        } else {
          write_run_csv(runs_dir / name, res);
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                               : std::max(1U, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<std::filesystem::path> files;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) files.push_back(runs_dir / run_file_name(cells[i].task, cells[i].method, cells[i].seed));
  }
  std::sort(files.begin(), files.end());
  BenchReport rep = files.empty() ? BenchReport{} : summarize_runs(files);
  rep.skipped_tasks = skipped;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (errors[i]) {
      rep.failures.push_back(cells[i].task + "/" + cells[i].method + "/" +
                             std::to_string(cells[i].seed) + ": " + *errors[i]);
    }
  }
  write_summary(out_dir, rep);
  return rep;
}

}  // namespace oscbo::harness
