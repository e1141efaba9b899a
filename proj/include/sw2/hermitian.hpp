#ifndef SW2_HERMITIAN_HPP
#define SW2_HERMITIAN_HPP

// Dense Hermitian linear algebra on Eigen types.
//
// Every routine here is templated on the Eigen expression type, so the same
// code serves complex Hermitian spectral values (std::complex<double>) and the
// real symmetric block-Toeplitz covariances of the finite-horizon oracle.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <type_traits>

#include "sw2/errors.hpp"

namespace sw2 {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

template <typename Scalar>
using RealVector = Eigen::Matrix<RealOf<Scalar>, Eigen::Dynamic, 1>;

/// Carrier for power-spectrum values and covariance blocks.
using HermitianMatrix = Matrix<std::complex<double>>;

/// Relative tolerance on max|H - H*| / max|H| accepted as Hermitian.
inline constexpr double kHermitianTolerance = 1e-12;

/// Eigenvalue handling for matrices that are PSD in exact arithmetic.
///
/// Both fields are relative to the largest eigenvalue magnitude of the matrix
/// being processed: eigenvalues below `floor_eps * max|lambda|` are raised to
/// that floor, and any eigenvalue below `-negativity_tol * max|lambda|` is an
/// error rather than round-off.
struct PsdPolicy {
  double floor_eps = 1e-12;
  double negativity_tol = 1e-10;
};

inline void validate(const PsdPolicy& policy) {
  if (!(policy.floor_eps >= 0.0) || !(policy.negativity_tol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "PsdPolicy fields must be nonnegative");
  }
}

template <typename Scalar>
struct EigenDecomposition {
  RealVector<Scalar> eigenvalues;  // ascending
  Matrix<Scalar> eigenvectors;     // unitary, columns
};

/// Which algebraic route computes tr[(A^{1/2} B A^{1/2})^{1/2}].
///
/// Sandwich forms A^{1/2} from the eigendecomposition of A. Cholesky uses
/// A = L L* and the similar matrix L* B L, which costs one triangular
/// factorization instead of a full eigenvector computation. Neither calls a
/// non-symmetric eigensolver.
enum class TraceSqrtMethod { Sandwich, Cholesky };

template <typename Derived>
double hermitian_residual(const Eigen::MatrixBase<Derived>& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& h,
                       const char* what = "matrix") {
  if (h.rows() < 1 || h.rows() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be square with dim >= 1");
  }
  if (!h.allFinite()) {
    throw Error(ErrorCode::NonHermitianInput,
                std::string(what) + " has non-finite entries");
  }
  const double residual = hermitian_residual(h);
  if (residual > kHermitianTolerance) {
    throw Error(ErrorCode::NonHermitianInput,
                std::string(what) + " symmetry residual " +
                    std::to_string(residual) + " exceeds tolerance");
  }
}

template <typename Derived>
void require_same_dim(const Eigen::MatrixBase<Derived>& a,
                      const Eigen::MatrixBase<Derived>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operands have dims " + std::to_string(a.rows()) + " and " +
                    std::to_string(b.rows()));
  }
}

namespace detail {

template <typename Derived>
Matrix<typename Derived::Scalar> hermitian_part(
    const Eigen::MatrixBase<Derived>& m) {
  return (0.5 * (m + m.adjoint())).eval();
}

template <typename Scalar>
EigenDecomposition<Scalar> eigh_unchecked(const Matrix<Scalar>& h,
                                          bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(
      h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure,
                "Hermitian eigensolver did not converge (dim " +
                    std::to_string(h.rows()) + ")");
  }
  EigenDecomposition<Scalar> out;
  out.eigenvalues = solver.eigenvalues();
  if (with_vectors) out.eigenvectors = solver.eigenvectors();
  return out;
}

/// Largest eigenvalue magnitude; eigenvalues are ascending.
template <typename Vec>
double spectral_scale(const Vec& ascending) {
  return std::max(std::abs(ascending(0)),
                  std::abs(ascending(ascending.size() - 1)));
}

/// Floors eigenvalues in place per `policy`, returning how many moved.
/// Throws `on_negative` when an eigenvalue is beyond the negativity band.
template <typename Vec>
Eigen::Index floor_eigenvalues(Vec& ascending, const PsdPolicy& policy,
                               ErrorCode on_negative,
                               double reference_scale = 0.0) {
  const double scale = std::max(spectral_scale(ascending), reference_scale);
  const double min_value = ascending(0);
  if (min_value < -policy.negativity_tol * scale) {
    throw Error(on_negative, "eigenvalue " + std::to_string(min_value) +
                                 " below -" +
                                 std::to_string(policy.negativity_tol) +
                                 " * " + std::to_string(scale));
  }
  const double floor = policy.floor_eps * scale;
  Eigen::Index floored = 0;
  for (Eigen::Index i = 0; i < ascending.size(); ++i) {
    if (ascending(i) < floor) {
      ascending(i) = floor;
      ++floored;
    }
  }
  return floored;
}

/// A PSD operand after validation and flooring.
template <typename Scalar>
struct PreparedPsd {
  Matrix<Scalar> matrix;  // the floored matrix when flooring happened
  EigenDecomposition<Scalar> eigen;  // eigenvectors present iff requested
  Eigen::Index floored = 0;
  double trace = 0.0;
  double min_eigenvalue = 0.0;  // before flooring
};

template <typename Scalar>
PreparedPsd<Scalar> prepare_psd(const Matrix<Scalar>& h,
                                const PsdPolicy& policy, bool with_vectors,
                                ErrorCode on_negative,
                                double reference_scale = 0.0) {
  PreparedPsd<Scalar> out;
  out.eigen = eigh_unchecked(h, with_vectors);
  out.min_eigenvalue = out.eigen.eigenvalues(0);
  out.floored = floor_eigenvalues(out.eigen.eigenvalues, policy, on_negative,
                                  reference_scale);
  if (out.floored > 0) {
    if (!with_vectors) out.eigen = eigh_unchecked(h, true);
    floor_eigenvalues(out.eigen.eigenvalues, policy, on_negative,
                      reference_scale);
    const auto& v = out.eigen.eigenvectors;
    out.matrix = hermitian_part(
        v * out.eigen.eigenvalues.template cast<Scalar>().asDiagonal() *
        v.adjoint());
    out.trace = out.eigen.eigenvalues.sum();
  } else {
    out.matrix = h;
    out.trace = std::real(h.trace());
  }
  return out;
}

template <typename Scalar>
Matrix<Scalar> sqrt_from_eigen(const EigenDecomposition<Scalar>& e) {
  const RealVector<Scalar> roots = e.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return hermitian_part(e.eigenvectors *
                        roots.template cast<Scalar>().asDiagonal() *
                        e.eigenvectors.adjoint());
}

/// Sum of square roots of the eigenvalues of a Hermitian matrix that is PSD
/// up to round-off.
template <typename Scalar>
double trace_sqrt_of_psd(const Matrix<Scalar>& h, const PsdPolicy& policy) {
  RealVector<Scalar> mu = eigh_unchecked(h, false).eigenvalues;
  const double scale = spectral_scale(mu);
  if (mu(0) < -std::max(policy.negativity_tol, 1e-10) * scale) {
    throw Error(ErrorCode::IndefiniteInput,
                "product has eigenvalue " + std::to_string(mu(0)));
  }
  return mu.cwiseMax(0.0).cwiseSqrt().sum();
}

template <typename Scalar>
double trace_sqrt_product_prepared(const PreparedPsd<Scalar>& a,
                                   const PreparedPsd<Scalar>& b,
                                   const PsdPolicy& policy,
                                   TraceSqrtMethod method) {
  if (method == TraceSqrtMethod::Cholesky) {
    Eigen::LLT<Matrix<Scalar>> llt(a.matrix);
    if (llt.info() == Eigen::Success) {
      // L* B L is similar to A B.
      const Matrix<Scalar> upper_b = llt.matrixU() * b.matrix;
      const Matrix<Scalar> similar = upper_b * llt.matrixL();
      return trace_sqrt_of_psd<Scalar>(hermitian_part(similar), policy);
    }
    // Semidefinite A (floor 0); fall through to the eigenvector route.
  }
  const EigenDecomposition<Scalar> ea =
      a.eigen.eigenvectors.size() > 0 ? a.eigen
                                      : eigh_unchecked(a.matrix, true);
  const Matrix<Scalar> root = sqrt_from_eigen(ea);
  return trace_sqrt_of_psd<Scalar>(hermitian_part(root * b.matrix * root),
                                   policy);
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
template <typename Derived>
EigenDecomposition<typename Derived::Scalar> eigh(
    const Eigen::MatrixBase<Derived>& h) {
  require_hermitian(h, "eigh input");
  return detail::eigh_unchecked<typename Derived::Scalar>(h.eval(), true);
}

template <typename Derived>
RealVector<typename Derived::Scalar> eigvalsh(
    const Eigen::MatrixBase<Derived>& h) {
  require_hermitian(h, "eigvalsh input");
  return detail::eigh_unchecked<typename Derived::Scalar>(h.eval(), false)
      .eigenvalues;
}

/// Principal square root of a PSD Hermitian matrix. Eigenvalues below the
/// policy floor are raised to it before the root is taken.
template <typename Derived>
Matrix<typename Derived::Scalar> sqrt_psd(const Eigen::MatrixBase<Derived>& h,
                                          const PsdPolicy& policy = {}) {
  using Scalar = typename Derived::Scalar;
  validate(policy);
  require_hermitian(h, "sqrt_psd input");
  EigenDecomposition<Scalar> e = detail::eigh_unchecked<Scalar>(h.eval(), true);
  detail::floor_eigenvalues(e.eigenvalues, policy, ErrorCode::IndefiniteInput);
  return detail::sqrt_from_eigen(e);
}

/// Eigenvalue floor applied to a Hermitian matrix that must be PD.
///
/// Returns the input unchanged when no eigenvalue is below the floor.
/// Throws NotPositiveDefinite for the zero matrix or an eigenvalue beyond the
/// negativity band. Floor and band are relative to the larger of the
/// matrix's own largest |eigenvalue| and `reference_scale`.
template <typename Derived>
Matrix<typename Derived::Scalar> floor_to_pd(
    const Eigen::MatrixBase<Derived>& h, const PsdPolicy& policy,
    Eigen::Index* floored = nullptr, double reference_scale = 0.0) {
  using Scalar = typename Derived::Scalar;
  require_hermitian(h, "spectrum value");
  const Matrix<Scalar> m = h.eval();
  auto prepared = detail::prepare_psd<Scalar>(
      m, policy, false, ErrorCode::NotPositiveDefinite, reference_scale);
  if (!(prepared.eigen.eigenvalues(prepared.eigen.eigenvalues.size() - 1) >
        0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "matrix has no positive eigenvalue");
  }
  if (policy.floor_eps == 0.0 && prepared.eigen.eigenvalues(0) <= 0.0) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "singular matrix and a zero eigenvalue floor");
  }
  if (floored != nullptr) *floored = prepared.floored;
  return std::move(prepared.matrix);
}

/// The four traces making up the Bures form of a PSD pair.
struct BuresTerms {
  double trace_a = 0.0;
  double trace_b = 0.0;
  double trace_sqrt_product = 0.0;  // tr[(A^{1/2} B A^{1/2})^{1/2}]
  double squared = 0.0;             // tr A + tr B - 2 tr[...], clamped
  double min_eigenvalue_a = 0.0;    // before flooring
  double min_eigenvalue_b = 0.0;
  Eigen::Index floored = 0;
};

/// Relative band below zero that `bures_w2_squared` treats as round-off.
inline constexpr double kBuresClampBand = 1e-10;

template <typename DerivedA, typename DerivedB>
BuresTerms bures_terms(const Eigen::MatrixBase<DerivedA>& a,
                       const Eigen::MatrixBase<DerivedB>& b,
                       const PsdPolicy& policy = {},
                       TraceSqrtMethod method = TraceSqrtMethod::Sandwich) {
  using Scalar = typename DerivedA::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedB::Scalar>,
                "operands must share a scalar type");
  validate(policy);
  const Matrix<Scalar> ma = a.eval();
  const Matrix<Scalar> mb = b.eval();
  require_same_dim(ma, mb);
  require_hermitian(ma, "first operand");
  require_hermitian(mb, "second operand");

  const auto pa = detail::prepare_psd<Scalar>(
      ma, policy, method == TraceSqrtMethod::Sandwich,
      ErrorCode::IndefiniteInput);
  const auto pb =
      detail::prepare_psd<Scalar>(mb, policy, false, ErrorCode::IndefiniteInput);

  BuresTerms t;
  t.trace_a = pa.trace;
  t.trace_b = pb.trace;
  t.floored = pa.floored + pb.floored;
  t.min_eigenvalue_a = pa.min_eigenvalue;
  t.min_eigenvalue_b = pb.min_eigenvalue;
  t.trace_sqrt_product =
      detail::trace_sqrt_product_prepared(pa, pb, policy, method);
  const double raw = t.trace_a + t.trace_b - 2.0 * t.trace_sqrt_product;
  const double band = kBuresClampBand * (t.trace_a + t.trace_b);
  if (raw < -band) {
    throw Error(ErrorCode::NegativeDistance,
                "Bures form " + std::to_string(raw) +
                    " is below the round-off band");
  }
  t.squared = std::max(raw, 0.0);
  return t;
}

/// tr[(A^{1/2} B A^{1/2})^{1/2}], equal to the sum of square roots of the
/// (real, nonnegative) eigenvalues of the product A B.
template <typename DerivedA, typename DerivedB>
double trace_sqrt_product(const Eigen::MatrixBase<DerivedA>& a,
                          const Eigen::MatrixBase<DerivedB>& b,
                          const PsdPolicy& policy = {},
                          TraceSqrtMethod method = TraceSqrtMethod::Sandwich) {
  return bures_terms(a, b, policy, method).trace_sqrt_product;
}

/// Squared W2 distance between zero-mean elliptical laws with the same
/// generator and scatter matrices A, B:
/// tr[A + B - 2 (A^{1/2} B A^{1/2})^{1/2}].
template <typename DerivedA, typename DerivedB>
double bures_w2_squared(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b,
                        const PsdPolicy& policy = {},
                        TraceSqrtMethod method = TraceSqrtMethod::Sandwich) {
  return bures_terms(a, b, policy, method).squared;
}

/// ||A B - B A||_F
template <typename DerivedA, typename DerivedB>
double commutator_norm(const Eigen::MatrixBase<DerivedA>& a,
                       const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b - b * a).norm();
}

}  // namespace sw2

#endif  // SW2_HERMITIAN_HPP
