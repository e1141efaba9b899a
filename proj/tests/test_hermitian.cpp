#include <gtest/gtest.h>

#include "sw2/hermitian.hpp"
#include "test_support.hpp"

namespace sw2 {
namespace {

using testing::cd;
using testing::Rng;

TEST(Eigh, IdentityHasUnitEigenvalues) {
  const auto e = eigh(HermitianMatrix::Identity(2, 2));
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-15);
  EXPECT_NEAR(e.eigenvalues(1), 1.0, 1e-15);
  EXPECT_LT((e.eigenvectors.adjoint() * e.eigenvectors -
             HermitianMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(Eigh, DiagonalSortedAscending) {
  HermitianMatrix d = HermitianMatrix::Zero(2, 2);
  d(0, 0) = 9.0;
  d(1, 1) = 4.0;
  const auto e = eigh(d);
  EXPECT_DOUBLE_EQ(e.eigenvalues(0), 4.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues(1), 9.0);
}

TEST(Eigh, RecoversSynthesizedSpectrum) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd lambda(3);
    lambda << 0.5, 2.0, 7.0;
    const HermitianMatrix u = testing::random_unitary(3, rng);
    const HermitianMatrix h = testing::synthesize(u, lambda);
    const auto e = eigh(h);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(e.eigenvalues(i), lambda(i), 1e-12);
    const double tol = 1e-10 * (1.0 + 7.0);
    EXPECT_LT((e.eigenvectors * e.eigenvalues.cast<cd>().asDiagonal() *
                   e.eigenvectors.adjoint() - h).cwiseAbs().maxCoeff(), tol);
    EXPECT_LT((e.eigenvectors.adjoint() * e.eigenvectors -
               HermitianMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Eigh, WorksOnRealSymmetric) {
  Eigen::MatrixXd s(2, 2);
  s << 2.0, 1.0, 1.0, 2.0;
  const auto e = eigh(s);
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 3.0, 1e-14);
}

TEST(Eigh, RejectsNonHermitian) {
  HermitianMatrix h = HermitianMatrix::Identity(2, 2);
  h(0, 1) = cd(0.5, 0.0);
  try {
    eigh(h);
    FAIL() << "expected NonHermitianInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonHermitianInput);
  }
}

TEST(Eigh, RejectsNonSquare) {
  Eigen::MatrixXd r(2, 3);
  r.setZero();
  EXPECT_THROW(eigh(r), Error);
}

TEST(SqrtPsd, IdentityAndDiagonal) {
  EXPECT_LT((sqrt_psd(HermitianMatrix::Identity(3, 3)) -
             HermitianMatrix::Identity(3, 3)).norm(), 1e-14);
  Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
  const Eigen::MatrixXd r = sqrt_psd(d);
  EXPECT_NEAR(r(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(r(1, 1), 3.0, 1e-14);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-14);
}

TEST(SqrtPsd, SquaringRoundTripAndIndependentIteration) {
  Rng rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const HermitianMatrix a = testing::random_pd(4, rng);
    const HermitianMatrix s = sqrt_psd(a);
    EXPECT_LE((s * s - a).norm(), 1e-9 * a.norm());
    EXPECT_LE(hermitian_residual(s), 1e-14);
    EXPECT_GT(eigvalsh(s)(0), 0.0);
    EXPECT_LE((s - testing::db_sqrt(a)).norm(), 1e-9 * s.norm());
  }
}

TEST(SqrtPsd, FloorsTinyNegativeEigenvalues) {
  Rng rng(5);
  Eigen::VectorXd lambda(3);
  lambda << -1e-14, 1.0, 2.0;
  const HermitianMatrix h = testing::synthesize(testing::random_unitary(3, rng), lambda);
  const HermitianMatrix s = sqrt_psd(h);
  const auto ev = eigvalsh(s);
  EXPECT_GE(ev(0), 0.0);
  EXPECT_NEAR(ev(0), std::sqrt(1e-12 * 2.0), 1e-9);
}

TEST(SqrtPsd, RejectsIndefinite) {
  Eigen::MatrixXd d = Eigen::Vector2d(-0.1, 1.0).asDiagonal();
  try {
    sqrt_psd(d);
    FAIL() << "expected IndefiniteInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndefiniteInput);
  }
}

TEST(SqrtPsd, RejectsNegativePolicy) {
  PsdPolicy bad;
  bad.floor_eps = -1.0;
  EXPECT_THROW(sqrt_psd(HermitianMatrix::Identity(2, 2), bad), Error);
}

TEST(TraceSqrtProduct, TrivialValues) {
  EXPECT_NEAR(trace_sqrt_product(HermitianMatrix::Identity(2, 2),
                                 HermitianMatrix::Identity(2, 2)), 2.0, 1e-14);
  EXPECT_NEAR(trace_sqrt_product(Eigen::MatrixXd::Constant(1, 1, 4.0),
                                 Eigen::MatrixXd::Constant(1, 1, 9.0)), 6.0, 1e-14);
}

TEST(TraceSqrtProduct, RoutesAgreeWithExplicitComposition) {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const HermitianMatrix a = testing::random_pd(3, rng);
    const HermitianMatrix b = testing::random_pd(3, rng);
    const HermitianMatrix ra = testing::db_sqrt(a);
    const double composed = testing::db_sqrt(ra * b * ra).trace().real();
    const double sandwich = trace_sqrt_product(a, b, {}, TraceSqrtMethod::Sandwich);
    const double cholesky = trace_sqrt_product(a, b, {}, TraceSqrtMethod::Cholesky);
    EXPECT_LE(testing::relative_error(sandwich, composed), 1e-8);
    EXPECT_LE(testing::relative_error(cholesky, composed), 1e-8);
  }
}

TEST(TraceSqrtProduct, DimensionMismatch) {
  try {
    trace_sqrt_product(HermitianMatrix::Identity(2, 2), HermitianMatrix::Identity(3, 3));
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(TraceSqrtProduct, IndefiniteSecondOperand) {
  Eigen::MatrixXd b = Eigen::Vector2d(-1.0, 1.0).asDiagonal();
  try {
    trace_sqrt_product(Eigen::MatrixXd::Identity(2, 2), b);
    FAIL() << "expected IndefiniteInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndefiniteInput);
  }
}

TEST(BuresW2Squared, TrivialValues) {
  Rng rng(3);
  const HermitianMatrix a = testing::random_pd(3, rng);
  EXPECT_LE(bures_w2_squared(a, a), 1e-10 * a.trace().real());
  EXPECT_NEAR(bures_w2_squared(Eigen::MatrixXd::Constant(1, 1, 1.0),
                               Eigen::MatrixXd::Constant(1, 1, 4.0)), 1.0, 1e-14);
}

TEST(BuresW2Squared, SymmetricAndMatchesBothOrderings) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const HermitianMatrix a = testing::random_pd(2, rng);
    const HermitianMatrix b = testing::random_pd(2, rng);
    const double ab = bures_w2_squared(a, b);
    const double ba = bures_w2_squared(b, a);
    EXPECT_LE(std::abs(ab - ba), 1e-9 * std::max(ab, 1e-300) + 1e-15);
    // Independent evaluation: both orderings through Denman-Beavers roots.
    const HermitianMatrix ra = testing::db_sqrt(a);
    const HermitianMatrix rb = testing::db_sqrt(b);
    const double via_a = (a + b).trace().real() - 2.0 * testing::db_sqrt(ra * b * ra).trace().real();
    const double via_b = (a + b).trace().real() - 2.0 * testing::db_sqrt(rb * a * rb).trace().real();
    EXPECT_NEAR(ab, via_a, 1e-9 * (a + b).trace().real());
    EXPECT_NEAR(ab, via_b, 1e-9 * (a + b).trace().real());
  }
}

TEST(BuresW2Squared, CommutingPairCollapsesToFrobenius) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const HermitianMatrix u = testing::random_unitary(3, rng);
    const HermitianMatrix a = testing::synthesize(u, testing::random_eigenvalues(3, rng));
    const HermitianMatrix b = testing::synthesize(u, testing::random_eigenvalues(3, rng));
    const double expected = (sqrt_psd(a) - sqrt_psd(b)).squaredNorm();
    EXPECT_LE(testing::relative_error(bures_w2_squared(a, b), expected), 1e-9);
  }
}

TEST(BuresW2Squared, ArakiLiebThirringOrdering) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index m = 1 + trial % 4;
    const HermitianMatrix a = testing::random_pd(m, rng);
    const HermitianMatrix b = testing::random_pd(m, rng);
    const double cross = (sqrt_psd(a) * sqrt_psd(b)).trace().real();
    EXPECT_GE(trace_sqrt_product(a, b), cross - 1e-10 * static_cast<double>(m));
  }
}

TEST(BuresW2Squared, RealAndComplexScalarTypesAgree) {
  Rng rng(19);
  const Eigen::MatrixXd q = testing::random_orthogonal(3, rng);
  const Eigen::MatrixXd a = q * Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal() * q.transpose();
  const Eigen::MatrixXd b = Eigen::Vector3d(0.5, 4.0, 1.5).asDiagonal();
  const Eigen::MatrixXd as = 0.5 * (a + a.transpose());
  EXPECT_NEAR(bures_w2_squared(as, b),
              bures_w2_squared(HermitianMatrix(as.cast<cd>()), HermitianMatrix(b.cast<cd>())),
              1e-12);
}

TEST(FloorToPd, ZeroMatrixIsNotPositiveDefinite) {
  try {
    floor_to_pd(HermitianMatrix::Zero(2, 2), PsdPolicy{});
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
}

TEST(FloorToPd, CountsFlooredEigenvalues) {
  Eigen::MatrixXd d = Eigen::Vector3d(0.0, 1.0, 2.0).asDiagonal();
  Eigen::Index floored = 0;
  const Eigen::MatrixXd out = floor_to_pd(d, PsdPolicy{}, &floored);
  EXPECT_EQ(floored, 1);
  EXPECT_NEAR(out(0, 0), 2e-12, 1e-20);
}

}  // namespace
}  // namespace sw2
