#include "pcornet/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "pcornet/error.hpp"
#include "pcornet/rng.hpp"

namespace pcornet {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string> default_labels(Index p) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) labels.push_back("g" + std::to_string(j + 1));
  return labels;
}

}  // namespace

ExpressionMatrix make_expression_matrix(MatrixXd values) {
  if (values.rows() < 3) {
    throw TooFewObservations("need at least 3 observations, got " + std::to_string(values.rows()));
  }
  if (values.cols() < 2) throw InvalidArgument("need at least 2 genes");
  ExpressionMatrix x;
  x.gene_labels = default_labels(values.cols());
  x.values = std::move(values);
  return x;
}

ExpressionMatrix read_csv(std::istream& in, bool has_header) {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (has_header && labels.empty() && rows.empty()) {
      for (auto& f : fields) labels.push_back(trim(f));
      width = labels.size();
      continue;
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw ParseError("row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                           " fields, expected " + std::to_string(width),
                       line_no, 0);
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (!parse_double(fields[c], row[c])) {
        throw ParseError("non-numeric cell '" + trim(fields[c]) + "' at row " + std::to_string(line_no) +
                             ", column " + std::to_string(c + 1),
                         line_no, c + 1);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 3) {
    throw TooFewObservations("need at least 3 observations, got " + std::to_string(rows.size()));
  }
  if (width < 2) throw ParseError("need at least 2 columns", 1, 0);

  MatrixXd values(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  ExpressionMatrix x;
  x.values = std::move(values);
  x.gene_labels = has_header ? std::move(labels) : default_labels(x.values.cols());
  return x;
}

ExpressionMatrix load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_csv(in, has_header);
}

void write_csv(std::ostream& out, const ExpressionMatrix& x) {
  for (Index j = 0; j < x.p(); ++j) {
    out << (j ? "," : "") << x.gene_labels[static_cast<std::size_t>(j)];
  }
  out << '\n';
  char buf[32];
  for (Index i = 0; i < x.n(); ++i) {
    for (Index j = 0; j < x.p(); ++j) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x.values(i, j));
      if (j) out << ',';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const ExpressionMatrix& x) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_csv(out, x);
}

ExpressionMatrix center_columns(ExpressionMatrix x) {
  x.values.rowwise() -= x.values.colwise().mean();
  return x;
}

ExpressionMatrix standardize_columns(ExpressionMatrix x) {
  require_nonconstant(x);
  x = center_columns(std::move(x));
  const double denom = static_cast<double>(x.n() - 1);
  for (Index j = 0; j < x.p(); ++j) {
    const double sd = std::sqrt(x.values.col(j).squaredNorm() / denom);
    x.values.col(j) /= sd;
  }
  return x;
}

void require_nonconstant(const ExpressionMatrix& x) {
  for (Index j = 0; j < x.p(); ++j) {
    const auto col = x.values.col(j);
    if ((col.array() == col(0)).all()) {
      const std::string label =
          static_cast<std::size_t>(j) < x.gene_labels.size() ? x.gene_labels[static_cast<std::size_t>(j)]
                                                              : "g" + std::to_string(j + 1);
      throw ZeroVariance(label);
    }
  }
}

std::vector<Index> FoldAssignment::train_indices(int fold) const {
  std::vector<Index> idx;
  for (Index i = 0; i < n(); ++i) {
    if (fold_of[static_cast<std::size_t>(i)] != fold) idx.push_back(i);
  }
  return idx;
}

std::vector<Index> FoldAssignment::test_indices(int fold) const {
  std::vector<Index> idx;
  for (Index i = 0; i < n(); ++i) {
    if (fold_of[static_cast<std::size_t>(i)] == fold) idx.push_back(i);
  }
  return idx;
}

std::vector<Index> FoldAssignment::fold_sizes() const {
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

std::string FoldAssignment::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["seed"] = seed;
  j["n"] = fold_of.size();
  j["fold_of"] = fold_of;
  return j.dump();
}

FoldAssignment make_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidFolds("fold count must be at least 2, got " + std::to_string(k));
  if (k > n) {
    throw InvalidFolds("fold count " + std::to_string(k) + " exceeds observation count " + std::to_string(n));
  }
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_of.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) folds.fold_of[static_cast<std::size_t>(i)] = static_cast<int>(i % k);
  Rng rng(seed);
  rng.shuffle(std::span<int>(folds.fold_of));
  return folds;
}

MatrixXd select_rows(const MatrixXd& m, const std::vector<Index>& rows) {
  MatrixXd out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
  return out;
}

VectorXd select_rows(const VectorXd& v, const std::vector<Index>& rows) {
  VectorXd out(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Index>(r)) = v(rows[r]);
  return out;
}

MatrixXd drop_column(const MatrixXd& m, Index col) {
  MatrixXd out(m.rows(), m.cols() - 1);
  out.leftCols(col) = m.leftCols(col);
  out.rightCols(m.cols() - col - 1) = m.rightCols(m.cols() - col - 1);
  return out;
}

}  // namespace pcornet
