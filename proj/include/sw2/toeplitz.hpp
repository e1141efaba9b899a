#ifndef SW2_TOEPLITZ_HPP
#define SW2_TOEPLITZ_HPP

// Finite-horizon brute force for the spectral W2 formula: covariances of the
// stacked vector x_{0..i}, the Bures form on them, and convergence of the
// per-step values towards the spectral integral.

#include <Eigen/Dense>

#include <vector>

#include "sw2/hermitian.hpp"
#include "sw2/spectra.hpp"

namespace sw2 {

/// Largest stacked dimension (i + 1) m the oracle will decompose.
inline constexpr Eigen::Index kMaxOracleSize = 4096;

struct BlockToeplitzCovariance {
  Eigen::Index dim = 0;
  Eigen::Index horizon = 0;
  Eigen::MatrixXd matrix;  // block (r, s) = R(s - r)
  double min_eigenvalue = 0.0;  // NaN when the PD check was skipped
  bool truncated = false;  // horizon exceeds the stored lags
};

/// Throws NotPositiveDefinite (naming the minimum eigenvalue) when the
/// assembled matrix is not PD and `check_pd` is set.
BlockToeplitzCovariance build_block_toeplitz(const Autocovariance& acov,
                                             Eigen::Index horizon,
                                             bool check_pd = true);

/// bures_w2_squared(Sigma_x, Sigma_y) / (i + 1)
double finite_horizon_w2_sq_per_step(
    const Autocovariance& acx, const Autocovariance& acy, Eigen::Index horizon,
    const PsdPolicy& policy = {},
    TraceSqrtMethod method = TraceSqrtMethod::Cholesky);

/// tr[(Sigma_x Sigma_y)^{1/2}] / (i + 1) by both algebraic routes.
struct TraceSqrtPerStep {
  double sandwich = 0.0;
  double cholesky = 0.0;
  double relative_discrepancy = 0.0;
};

TraceSqrtPerStep trace_sqrt_product_per_step(const Autocovariance& acx,
                                             const Autocovariance& acy,
                                             Eigen::Index horizon,
                                             const PsdPolicy& policy = {});

/// Per-step traces whose limits are the grid means of tr Phi_x, tr Phi_y and
/// tr[(Phi_x Phi_y)^{1/2}].
struct TraceLimitRow {
  Eigen::Index horizon = 0;
  double trace_x = 0.0;
  double trace_y = 0.0;
  double trace_sqrt_product = 0.0;
};

struct ConvergenceDiagnostic {
  std::vector<Eigen::Index> horizons;
  std::vector<double> per_step_values;  // W2^2 / (i + 1)
  std::vector<double> min_eigenvalues_x;
  std::vector<double> min_eigenvalues_y;
  std::vector<TraceLimitRow> trace_rows;
  double spectral_target = 0.0;  // squared spectral W2
  /// L from v(i) = L + c / (i + 1) fitted to the last three horizons. The
  /// 1/(i+1) model is an empirical working assumption.
  double extrapolated_limit = 0.0;
  bool converged = false;
  bool fit_degenerate = false;  // last three values non-monotone beyond noise
  bool truncated = false;       // some horizon exceeded the stored lags
};

struct InverseHorizonFit {
  double limit = 0.0;
  double slope = 0.0;
  bool degenerate = false;
};

/// Least-squares fit of v = L + c / (i + 1) on the last three points.
InverseHorizonFit fit_inverse_horizon(const std::vector<Eigen::Index>& horizons,
                                      const std::vector<double>& values);

std::vector<Eigen::Index> default_horizons();

/// |L - target| <= max(1e-3 target, 1e-8)
bool within_convergence_tolerance(double limit, double target);

ConvergenceDiagnostic convergence_diagnostic(
    const Autocovariance& acx, const Autocovariance& acy,
    const std::vector<Eigen::Index>& horizons, double spectral_target,
    const PsdPolicy& policy = {});

}  // namespace sw2

#endif  // SW2_TOEPLITZ_HPP
