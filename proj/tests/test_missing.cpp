#include "missing.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "rng.hpp"
#include "test_util.hpp"

namespace {

using drim::ErrorCode;
using drim::MaskedMatrix;
using drim::MaskedVector;
using drim::testutil::error_code_of;

MaskedMatrix random_dense(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  drim::rng::Stream s(seed);
  Eigen::MatrixXd v(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) v(r, c) = s.next_normal();
  return MaskedMatrix::dense(v);
}

TEST(NormalCdf, HandValues) {
  EXPECT_DOUBLE_EQ(drim::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(drim::normal_cdf(1.959963984540054), 0.975, 1e-9);
  EXPECT_NEAR(drim::normal_cdf(-1.0) + drim::normal_cdf(1.0), 1.0, 1e-15);
}

TEST(Mcar, ValidatesProbability) {
  const MaskedMatrix m = random_dense(3, 2, 0);
  EXPECT_EQ(error_code_of([&] { drim::apply_mcar(m, -0.1, 0); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(error_code_of([&] { drim::apply_mcar(m, 1.5, 0); }),
            ErrorCode::invalid_argument);
}

TEST(Mcar, ZeroAndOneAreExact) {
  const MaskedMatrix m = random_dense(20, 4, 1);
  const MaskedMatrix same = drim::apply_mcar(m, 0.0, 7);
  EXPECT_TRUE((same.mask == m.mask).all());
  EXPECT_TRUE(same.values.isApprox(m.values));

  const MaskedMatrix gone = drim::apply_mcar(m, 1.0, 7);
  EXPECT_EQ(gone.available_count(), 0u);
}

TEST(Mcar, RealizedFractionNearP) {
  const MaskedMatrix m = random_dense(500, 20, 2);
  const MaskedMatrix holey = drim::apply_mcar(m, 0.4, 11);
  EXPECT_NEAR(holey.missing_fraction(), 0.4, 0.02);
}

TEST(Mcar, DeterministicInSeedOnly) {
  const MaskedMatrix m = random_dense(50, 5, 3);
  const MaskedMatrix a = drim::apply_mcar(m, 0.3, 5);
  const MaskedMatrix b = drim::apply_mcar(m, 0.3, 5);
  const MaskedMatrix c = drim::apply_mcar(m, 0.3, 6);
  EXPECT_TRUE((a.mask == b.mask).all());
  EXPECT_FALSE((a.mask == c.mask).all());
}

TEST(Mcar, NeverRestoresMissingCells) {
  MaskedMatrix m = random_dense(40, 4, 4);
  const MaskedMatrix first = drim::apply_mcar(m, 0.5, 8);
  const MaskedMatrix second = drim::apply_mcar(first, 0.5, 9);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!first.mask(r, c)) EXPECT_FALSE(second.mask(r, c));
}

TEST(Mnar, RequiresSpreadAndSupport) {
  MaskedVector constant;
  constant.values = Eigen::VectorXd::Ones(10);
  constant.mask = drim::BoolVector::Constant(10, true);
  EXPECT_EQ(error_code_of([&] { drim::apply_mnar_column(constant, 1, 0, 0); }),
            ErrorCode::numeric);

  MaskedVector tiny;
  tiny.values = Eigen::VectorXd::Ones(3);
  tiny.mask = drim::BoolVector::Constant(3, false);
  tiny.mask(0) = true;
  EXPECT_EQ(error_code_of([&] { drim::apply_mnar_column(tiny, 1, 0, 0); }),
            ErrorCode::invalid_argument);
}

TEST(Mnar, ExtremeValuesVanishFirst) {
  // With a steep slope, the far outlier should essentially always be masked
  // while the clump at zero mostly survives.
  MaskedVector col;
  col.values = Eigen::VectorXd::Zero(101);
  col.values(100) = 50.0;
  for (Eigen::Index i = 0; i < 100; ++i) col.values(i) = (i % 2 == 0) ? -0.01 : 0.01;
  col.mask = drim::BoolVector::Constant(101, true);
  const MaskedVector out = drim::apply_mnar_column(col, 10.0, -5.0, 123);
  EXPECT_FALSE(out.mask(100));
  std::size_t kept = 0;
  for (Eigen::Index i = 0; i < 100; ++i) kept += out.mask(i);
  EXPECT_GT(kept, 90u);
}

TEST(Mnar, FractionMatchesGaussianOracle) {
  // For (a, b) = (1, 0) on a standard normal column the masking rate is
  // E[Phi(|Z|)] = 3/4.
  drim::rng::Stream s(77);
  MaskedVector col;
  col.values = Eigen::VectorXd::NullaryExpr(20000, [&](Eigen::Index) { return s.next_normal(); });
  col.mask = drim::BoolVector::Constant(20000, true);
  const MaskedVector out = drim::apply_mnar_column(col, 1.0, 0.0, 5);
  const double masked =
      1.0 - static_cast<double>(out.available_count()) / static_cast<double>(col.size());
  EXPECT_NEAR(masked, 0.75, 0.015);
}

TEST(Mnar, MatrixVersionIsPerColumnDeterministic) {
  const MaskedMatrix m = random_dense(200, 3, 6);
  const MaskedMatrix a = drim::apply_mnar(m, 1.0, 0.0, 9);
  const MaskedMatrix b = drim::apply_mnar(m, 1.0, 0.0, 9);
  EXPECT_TRUE((a.mask == b.mask).all());

  // Each column must match the column generator under the same derived seed.
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const MaskedVector col = drim::apply_mnar_column(
        drim::column_of(m, j), 1.0, 0.0,
        drim::rng::mix(9 ^ drim::rng::mix(static_cast<std::uint64_t>(j))));
    for (Eigen::Index r = 0; r < m.rows(); ++r) EXPECT_EQ(a.mask(r, j), col.mask(r));
  }
}

}  // namespace
