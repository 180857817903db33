#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "pcornet/dataset.hpp"
#include "pcornet/error.hpp"
#include "oracles.hpp"

using namespace pcornet;

TEST(Csv, ZerosWithoutHeader) {
  std::istringstream in("0,0,0\n0,0,0\n0,0,0\n0,0,0\n");
  const auto x = read_csv(in, false);
  EXPECT_EQ(x.n(), 4);
  EXPECT_EQ(x.p(), 3);
  EXPECT_TRUE(x.values.isZero(0.0));
  EXPECT_EQ(x.gene_labels, (std::vector<std::string>{"g1", "g2", "g3"}));
}

TEST(Csv, RaggedRowReportsRow) {
  std::istringstream in("1,2,3\n4,5,6\n7,8\n");
  try {
    read_csv(in, false);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
  }
}

TEST(Csv, NonNumericCellReportsPosition) {
  std::istringstream in("a,b\n1,2\n3,x\n5,6\n");
  try {
    read_csv(in, true);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.col(), 2u);
  }
}

TEST(Csv, HeaderLabels) {
  std::istringstream in("a,b\n1,2\n3,4\n5,6\n7,8\n9,10\n");
  const auto x = read_csv(in, true);
  EXPECT_EQ(x.gene_labels, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(x.n(), 5);
  EXPECT_DOUBLE_EQ(x.values(4, 1), 10.0);
}

TEST(Csv, TooFewObservations) {
  std::istringstream in("1,2\n3,4\n");
  EXPECT_THROW(read_csv(in, false), TooFewObservations);
}

TEST(Csv, RoundTrip) {
  Rng rng(3);
  auto x = make_expression_matrix(oracle::gaussian_matrix(7, 4, rng));
  std::stringstream buffer;
  write_csv(buffer, x);
  const auto back = read_csv(buffer, true);
  EXPECT_EQ(back.gene_labels, x.gene_labels);
  EXPECT_LT((back.values - x.values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Center, SimpleColumn) {
  MatrixXd v(3, 2);
  v << 1, 5, 2, 5, 3, 5;
  const auto c = center_columns(make_expression_matrix(v));
  EXPECT_DOUBLE_EQ(c.values(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(c.values(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(c.values(2, 0), 1.0);
  EXPECT_TRUE(c.values.col(1).isZero(0.0));
}

TEST(Center, Idempotent) {
  Rng rng(5);
  MatrixXd v = oracle::gaussian_matrix(20, 6, rng).array() + 3.0;
  const auto once = center_columns(make_expression_matrix(v));
  const auto twice = center_columns(once);
  EXPECT_LT((once.values - twice.values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(once.values.colwise().mean().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Standardize, UnitVariance) {
  Rng rng(6);
  MatrixXd v = oracle::gaussian_matrix(15, 3, rng) * 4.0;
  const auto s = standardize_columns(make_expression_matrix(v));
  for (Index j = 0; j < 3; ++j) {
    EXPECT_NEAR(s.values.col(j).squaredNorm() / 14.0, 1.0, 1e-12);
  }
}

TEST(Standardize, ConstantGeneIsNamed) {
  MatrixXd v(4, 2);
  v << 1, 2, 2, 2, 3, 2, 4, 2;
  auto x = make_expression_matrix(v);
  x.gene_labels = {"a", "flat"};
  try {
    require_nonconstant(x);
    FAIL();
  } catch (const ZeroVariance& e) {
    EXPECT_EQ(e.gene(), "flat");
  }
}

TEST(Folds, Balanced) {
  const auto f = make_folds(10, 5, 1);
  for (Index s : f.fold_sizes()) EXPECT_EQ(s, 2);
  for (Index n = 2; n < 40; ++n) {
    for (int k = 2; k <= n; k += 3) {
      const auto sizes = make_folds(n, k, 9).fold_sizes();
      const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      EXPECT_LE(*hi - *lo, 1);
    }
  }
}

TEST(Folds, LeaveOneOut) {
  const auto f = make_folds(9, 9, 4);
  for (Index s : f.fold_sizes()) EXPECT_EQ(s, 1);
  for (int fold = 0; fold < 9; ++fold) EXPECT_EQ(f.train_indices(fold).size(), 8u);
}

TEST(Folds, Deterministic) {
  EXPECT_EQ(make_folds(50, 5, 77).fold_of, make_folds(50, 5, 77).fold_of);
  EXPECT_NE(make_folds(50, 5, 77).fold_of, make_folds(50, 5, 78).fold_of);
}

TEST(Folds, TrainAndTestPartition) {
  const auto f = make_folds(23, 4, 2);
  for (int fold = 0; fold < 4; ++fold) {
    auto all = f.train_indices(fold);
    const auto test = f.test_indices(fold);
    all.insert(all.end(), test.begin(), test.end());
    std::sort(all.begin(), all.end());
    for (Index i = 0; i < 23; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)], i);
  }
}

TEST(Folds, InvalidK) {
  EXPECT_THROW(make_folds(5, 6, 1), InvalidFolds);
  EXPECT_THROW(make_folds(5, 1, 1), InvalidFolds);
}

TEST(Folds, Json) {
  const auto json = make_folds(4, 2, 3).to_json();
  EXPECT_NE(json.find("\"k\""), std::string::npos);
  EXPECT_NE(json.find("\"fold_of\""), std::string::npos);
}

TEST(Rows, SelectAndDrop) {
  MatrixXd m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const MatrixXd r = select_rows(m, {2, 0});
  EXPECT_EQ(r(0, 0), 7);
  EXPECT_EQ(r(1, 2), 3);
  const MatrixXd d = drop_column(m, 1);
  EXPECT_EQ(d.cols(), 2);
  EXPECT_EQ(d(1, 1), 6);
}
