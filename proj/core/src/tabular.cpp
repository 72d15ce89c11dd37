#include "oscbo/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>

#include "oscbo/error.hpp"

namespace oscbo::tasks {

std::string_view to_string(OracleMode mode) {
  return mode == OracleMode::Multilinear ? "multilinear" : "knn";
}

namespace {

bool lex_less(const Eigen::MatrixXd& M, std::size_t a, std::size_t b) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double u = M(static_cast<Eigen::Index>(a), j);
    const double v = M(static_cast<Eigen::Index>(b), j);
    if (u < v) return true;
    if (v < u) return false;
  }
  return false;
}

bool rows_equal(const Eigen::MatrixXd& M, std::size_t a, std::size_t b) {
  return M.row(static_cast<Eigen::Index>(a)) == M.row(static_cast<Eigen::Index>(b));
}

}  // namespace

TabularOracle::TabularOracle(const Eigen::MatrixXd& table, int k, double power, double epsilon)
    : k_(k), power_(power), epsilon_(epsilon) {
  if (table.cols() < 2) throw InvalidArgument("tabular oracle: need inputs and an objective");
  if (k < 1) throw InvalidArgument("tabular oracle: k must be positive");
  if (!(power > 0.0) || !(epsilon > 0.0)) {
    throw InvalidArgument("tabular oracle: power and epsilon must be positive");
  }
  if (table.rows() < k) {
    throw InvalidArgument("tabular oracle: table has " + std::to_string(table.rows()) +
                          " rows, fewer than k = " + std::to_string(k));
  }
  if (table.hasNaN()) throw InvalidArgument("tabular oracle: table contains NaN");

  const Eigen::Index m = table.rows();
  const Eigen::Index d = table.cols() - 1;
  const Eigen::MatrixXd raw = table.leftCols(d);

  // merge duplicates, keeping first-occurrence order
  std::vector<std::size_t> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(raw, a, b); });
  std::vector<std::ptrdiff_t> group_of(static_cast<std::size_t>(m), -1);
  std::vector<std::size_t> first_row;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && rows_equal(raw, idx[i], idx[j])) ++j;
    const std::size_t rep = idx[i];  // lowest row index, stable sort
    for (std::size_t q = i; q < j; ++q) group_of[idx[q]] = static_cast<std::ptrdiff_t>(rep);
    first_row.push_back(rep);
    i = j;
  }
  std::sort(first_row.begin(), first_row.end());

  const auto u = static_cast<Eigen::Index>(first_row.size());
  designs_.resize(u, d);
  values_.setZero(u);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(u);
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(m), -1);
  for (Eigen::Index s = 0; s < u; ++s) {
    slot[first_row[static_cast<std::size_t>(s)]] = s;
    designs_.row(s) = raw.row(static_cast<Eigen::Index>(first_row[static_cast<std::size_t>(s)]));
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index s = slot[static_cast<std::size_t>(group_of[static_cast<std::size_t>(r)])];
    values_(s) += table(r, d);
    counts(s) += 1.0;
  }
  values_.array() /= counts.array();

  bounds_.lower = raw.colwise().minCoeff().transpose();
  bounds_.upper = raw.colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(bounds_.lower(j) < bounds_.upper(j))) {
      throw InvalidArgument("tabular oracle: input column " + std::to_string(j) +
                            " takes a single value");
    }
  }
  points_norm_ = bounds_.normalize_rows(designs_);

  order_.resize(static_cast<std::size_t>(u));
  std::iota(order_.begin(), order_.end(), 0);
  std::sort(order_.begin(), order_.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(designs_, a, b); });

  // complete grid: product of per-dimension level counts equals the design count
  levels_.assign(static_cast<std::size_t>(d), {});
  double product = 1.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    auto& lv = levels_[static_cast<std::size_t>(j)];
    lv.assign(designs_.col(j).data(), designs_.col(j).data() + u);
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    product *= static_cast<double>(lv.size());
  }
  if (product == static_cast<double>(u)) {
    mode_ = OracleMode::Multilinear;
    grid_values_.assign(static_cast<std::size_t>(u), 0.0);
    for (Eigen::Index s = 0; s < u; ++s) {
      std::size_t flat = 0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const auto& lv = levels_[static_cast<std::size_t>(j)];
        const auto pos = std::lower_bound(lv.begin(), lv.end(), designs_(s, j)) - lv.begin();
        flat = flat * lv.size() + static_cast<std::size_t>(pos);
      }
      grid_values_[flat] = values_(s);
    }
  } else {
    levels_.clear();
  }
}

std::ptrdiff_t TabularOracle::find_stored(const Eigen::VectorXd& x) const {
  const auto it = std::lower_bound(order_.begin(), order_.end(), x, [&](std::size_t a,
                                                                        const Eigen::VectorXd& q) {
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      const double v = designs_(static_cast<Eigen::Index>(a), j);
      if (v < q(j)) return true;
      if (q(j) < v) return false;
    }
    return false;
  });
  if (it == order_.end()) return -1;
  if (designs_.row(static_cast<Eigen::Index>(*it)) != x.transpose()) return -1;
  return static_cast<std::ptrdiff_t>(*it);
}

double TabularOracle::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw InvalidArgument("tabular oracle: query has the wrong dimension");
  const Eigen::VectorXd c = x.cwiseMax(bounds_.lower).cwiseMin(bounds_.upper);
  if (const auto s = find_stored(c); s >= 0) return values_(s);
  if (mode_ == OracleMode::Multilinear) return multilinear(c);
  return knn(bounds_.normalize(c));
}

double TabularOracle::knn(const Eigen::VectorXd& x_norm) const {
  const Eigen::Index u = points_norm_.rows();
  const Eigen::VectorXd d2 = (points_norm_.rowwise() - x_norm.transpose()).rowwise().squaredNorm();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(u));
  std::iota(idx.begin(), idx.end(), 0);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(k_), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      return d2(a) < d2(b) || (d2(a) == d2(b) && a < b);
                    });
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = std::pow(std::sqrt(d2(idx[i])) + epsilon_, -power_);
    num += w * values_(idx[i]);
    den += w;
  }
  return num / den;
}

double TabularOracle::multilinear(const Eigen::VectorXd& x) const {
  if (mode_ != OracleMode::Multilinear) {
    throw InvalidArgument("tabular oracle: designs do not form a complete grid");
  }
  const std::size_t d = levels_.size();
  std::vector<std::size_t> lo(d);
  std::vector<double> frac(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& lv = levels_[j];
    const double v = x(static_cast<Eigen::Index>(j));
    if (lv.size() == 1) {
      lo[j] = 0;
      frac[j] = 0.0;
      continue;
    }
    auto pos = static_cast<std::size_t>(std::upper_bound(lv.begin(), lv.end(), v) - lv.begin());
    pos = std::clamp<std::size_t>(pos, 1, lv.size() - 1);
    lo[j] = pos - 1;
    frac[j] = (v - lv[pos - 1]) / (lv[pos] - lv[pos - 1]);
  }
  double out = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const bool up = ((corner >> j) & 1U) != 0;
      if (up && levels_[j].size() == 1) {
        w = 0.0;
        break;
      }
      w *= up ? frac[j] : 1.0 - frac[j];
      flat = flat * levels_[j].size() + lo[j] + (up ? 1 : 0);
    }
    if (w != 0.0) out += w * grid_values_[flat];
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd read_table(const std::filesystem::path& path, const TableSchema& schema) {
  if (schema.input_columns.empty() || schema.objective_column < 0) {
    throw ConfigError("table schema needs input columns and an objective column");
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw IngestionError("table '" + path.string() + "' is empty", 0);
  const std::size_t arity = split_commas(line).size();
  int needed = schema.objective_column;
  for (int c : schema.input_columns) needed = std::max(needed, c);
  if (static_cast<std::size_t>(needed) >= arity) {
    throw ConfigError("table '" + path.string() + "' has " + std::to_string(arity) +
                      " columns; schema refers to column " + std::to_string(needed));
  }

  std::vector<double> cells;
  const std::size_t width = schema.input_columns.size() + 1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_commas(line);
    if (fields.size() != arity) {
      throw IngestionError("expected " + std::to_string(arity) + " fields, found " +
                               std::to_string(fields.size()),
                           row);
    }
    auto parse = [&](int col) {
      std::string_view f = fields[static_cast<std::size_t>(col)];
      if (f.size() > 1 && f.front() == '+') f.remove_prefix(1);
      double v = 0.0;
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v)) {
        throw IngestionError("non-numeric value '" + std::string(fields[static_cast<std::size_t>(col)]) + "' in column " +
                                 std::to_string(col),
                             row);
      }
      return v;
    };
    for (int c : schema.input_columns) cells.push_back(parse(c));
    cells.push_back(parse(schema.objective_column));
  }
  if (row == 0) throw IngestionError("table '" + path.string() + "' has no data rows", 0);

  Eigen::MatrixXd out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < row; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cells[r * width + c];
    }
  }
  return out;
}

}  // namespace oscbo::tasks
