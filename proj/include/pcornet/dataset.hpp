#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pcornet {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// n x p expression data: rows are observations (arrays), columns are genes.
struct ExpressionMatrix {
  MatrixXd values;
  std::vector<std::string> gene_labels;

  Index n() const { return values.rows(); }
  Index p() const { return values.cols(); }
};

/// Builds a matrix with generated labels g1..gp. Throws TooFewObservations for
/// n < 3 and InvalidArgument for p < 2.
ExpressionMatrix make_expression_matrix(MatrixXd values);

// CSV: comma separated, '.' decimal point, optional single header row.
ExpressionMatrix read_csv(std::istream& in, bool has_header);
ExpressionMatrix load_csv(const std::filesystem::path& path, bool has_header);
void write_csv(std::ostream& out, const ExpressionMatrix& x);
void write_csv(const std::filesystem::path& path, const ExpressionMatrix& x);

ExpressionMatrix center_columns(ExpressionMatrix x);
/// Centers and scales every column to unit sample variance (n-1 denominator).
ExpressionMatrix standardize_columns(ExpressionMatrix x);
/// Throws ZeroVariance naming the first constant gene.
void require_nonconstant(const ExpressionMatrix& x);

struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
  std::uint64_t seed = 0;

  Index n() const { return static_cast<Index>(fold_of.size()); }
  std::vector<Index> train_indices(int fold) const;
  std::vector<Index> test_indices(int fold) const;
  std::vector<Index> fold_sizes() const;
  std::string to_json() const;
};

/// Balanced random partition of n observations into k folds. k == n gives
/// leave-one-out. Throws InvalidFolds unless 2 <= k <= n.
FoldAssignment make_folds(Index n, int k, std::uint64_t seed);

/// Row subset of a matrix, in the order given.
MatrixXd select_rows(const MatrixXd& m, const std::vector<Index>& rows);
VectorXd select_rows(const VectorXd& v, const std::vector<Index>& rows);
/// Matrix with column `col` removed.
MatrixXd drop_column(const MatrixXd& m, Index col);

}  // namespace pcornet
