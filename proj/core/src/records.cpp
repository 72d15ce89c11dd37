#include <charconv>
#include <fstream>
#include <sstream>

#include "oscbo/error.hpp"
#include "oscbo/harness.hpp"

namespace oscbo::harness {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header(int dim, int theta_dim) {
  std::string h = "t";
  for (int i = 1; i <= dim; ++i) h += ",x" + std::to_string(i);
  h += ",y";
  for (int i = 1; i <= theta_dim; ++i) h += ",theta" + std::to_string(i);
  h += ",lambda,phase,L_s,L_c,V,V_plus,covered,ci_width,beta,best_y,simple_regret,cum_regret,wall_ms";
  return h;
}

void write_run_csv(std::ostream& os, const std::vector<RoundRecord>& records, int dim,
                   int theta_dim) {
  os << csv_header(dim, theta_dim) << '\n';
  for (const auto& r : records) {
    os << r.t;
    for (double v : r.x) os << ',' << format_double(v);
    os << ',' << format_double(r.y);
    for (double v : r.theta) os << ',' << format_double(v);
    os << ',' << format_double(r.lambda) << ',' << r.phase << ',' << format_double(r.L_s) << ','
       << format_double(r.L_c) << ',' << format_double(r.V) << ',' << format_double(r.V_plus)
       << ',' << (r.covered ? 1 : 0) << ',' << format_double(r.ci_width) << ','
       << format_double(r.beta) << ',' << format_double(r.best_y) << ','
       << format_double(r.simple_regret) << ',' << format_double(r.cum_regret) << ','
       << format_double(r.wall_ms) << '\n';
  }
}

void write_run_csv(const std::filesystem::path& path, const RunResult& result) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  const int q = result.records.empty() ? 1 : static_cast<int>(result.records.front().theta.size());
  write_run_csv(os, result.records, result.dim, q);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t row) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw IngestionError("non-numeric value '" + s + "'", row);
  }
  return v;
}

}  // namespace

RunLog read_run_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IngestionError("empty run file", 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split(line);
  RunLog log;
  for (const auto& h : head) {
    if (h.size() > 1 && h[0] == 'x') ++log.dim;
    if (h.rfind("theta", 0) == 0) ++log.theta_dim;
  }
  if (line != csv_header(log.dim, log.theta_dim)) throw IngestionError("unexpected run header", 0);

  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto c = split(line);
    if (c.size() != head.size()) throw IngestionError("wrong number of fields", row);
    std::size_t k = 0;
    RoundRecord r;
    r.t = static_cast<int>(to_double(c[k++], row));
    for (int i = 0; i < log.dim; ++i) r.x.push_back(to_double(c[k++], row));
    r.y = to_double(c[k++], row);
    for (int i = 0; i < log.theta_dim; ++i) r.theta.push_back(to_double(c[k++], row));
    r.lambda = to_double(c[k++], row);
    r.phase = c[k++];
    r.L_s = to_double(c[k++], row);
    r.L_c = to_double(c[k++], row);
    r.V = to_double(c[k++], row);
    r.V_plus = to_double(c[k++], row);
    r.covered = to_double(c[k++], row) != 0.0;
    r.ci_width = to_double(c[k++], row);
    r.beta = to_double(c[k++], row);
    r.best_y = to_double(c[k++], row);
    r.simple_regret = to_double(c[k++], row);
    r.cum_regret = to_double(c[k++], row);
    r.wall_ms = to_double(c[k++], row);
    log.records.push_back(std::move(r));
  }
  return log;
}

RunLog read_run_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open run file '" + path.string() + "'");
  return read_run_csv(is);
}

void diagnostics_emit(std::ostream& os, const std::vector<RoundRecord>& records) {
  if (records.empty()) throw InvalidArgument("diagnostics: no records");
  const std::size_t q = records.front().theta.size();
  os << "t,p_hat,mean_ci_width,V_plus";
  for (std::size_t i = 1; i <= q; ++i) os << ",theta" << i;
  os << ",lambda\n";
  losses::CoverageCounter cov;
  double width_sum = 0.0;
  double v_plus = 0.0;
  for (const auto& r : records) {
    cov.update(r.covered);
    width_sum += r.ci_width;
    v_plus += std::max(r.L_c, 0.0);
    os << r.t << ',' << format_double(cov.rate()) << ','
       << format_double(width_sum / static_cast<double>(cov.total)) << ',' << format_double(v_plus);
    for (double th : r.theta) os << ',' << format_double(th);
    os << ',' << format_double(r.lambda) << '\n';
  }
}

}  // namespace oscbo::harness
