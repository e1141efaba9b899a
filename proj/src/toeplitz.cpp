#include "sw2/toeplitz.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sw2 {

namespace {

void require_horizon(const Autocovariance& acov, Eigen::Index horizon) {
  if (horizon < 0) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be nonnegative");
  }
  if ((horizon + 1) * acov.dim() > kMaxOracleSize) {
    throw Error(ErrorCode::InvalidArgument,
                "stacked dimension " + std::to_string((horizon + 1) * acov.dim()) +
                    " exceeds the oracle cap of " + std::to_string(kMaxOracleSize));
  }
}

void require_same_dim(const Autocovariance& x, const Autocovariance& y) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "autocovariances have dims " + std::to_string(x.dim()) +
                    " and " + std::to_string(y.dim()));
  }
}

void require_pd(double min_eigenvalue, const char* which, Eigen::Index horizon) {
  if (!(min_eigenvalue > 0.0)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(which) + " block-Toeplitz covariance at horizon " +
                    std::to_string(horizon) + " has minimum eigenvalue " +
                    std::to_string(min_eigenvalue));
  }
}

// Bures terms on the two stacked covariances, with the PD requirement
// reported as NotPositiveDefinite whatever stage detects it.
BuresTerms stacked_terms(const BlockToeplitzCovariance& x,
                         const BlockToeplitzCovariance& y,
                         const PsdPolicy& policy, TraceSqrtMethod method) {
  BuresTerms t;
  try {
    t = bures_terms(x.matrix, y.matrix, policy, method);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IndefiniteInput) throw;
    throw Error(ErrorCode::NotPositiveDefinite,
                "block-Toeplitz covariance at horizon " +
                    std::to_string(x.horizon) + ": " + e.what());
  }
  require_pd(t.min_eigenvalue_a, "first", x.horizon);
  require_pd(t.min_eigenvalue_b, "second", y.horizon);
  return t;
}

}  // namespace

BlockToeplitzCovariance build_block_toeplitz(const Autocovariance& acov,
                                             Eigen::Index horizon,
                                             bool check_pd) {
  validate(acov);
  require_horizon(acov, horizon);
  const Eigen::Index m = acov.dim();
  const Eigen::Index blocks = horizon + 1;

  BlockToeplitzCovariance out;
  out.dim = m;
  out.horizon = horizon;
  out.truncated = horizon > acov.max_lag();
  out.matrix = Eigen::MatrixXd::Zero(blocks * m, blocks * m);
  for (Eigen::Index k = 0; k <= std::min(horizon, acov.max_lag()); ++k) {
    const Eigen::MatrixXd& lag = acov.lags[k];
    const Eigen::MatrixXd lag_t = lag.transpose();
    for (Eigen::Index r = 0; r + k < blocks; ++r) {
      out.matrix.block(r * m, (r + k) * m, m, m) = lag;  // R(s - r), s > r
      if (k > 0) out.matrix.block((r + k) * m, r * m, m, m) = lag_t;
    }
  }
  out.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  if (check_pd) {
    out.min_eigenvalue =
        detail::eigh_unchecked<double>(out.matrix, false).eigenvalues(0);
    require_pd(out.min_eigenvalue, "assembled", horizon);
  }
  return out;
}

double finite_horizon_w2_sq_per_step(const Autocovariance& acx,
                                     const Autocovariance& acy,
                                     Eigen::Index horizon,
                                     const PsdPolicy& policy,
                                     TraceSqrtMethod method) {
  require_same_dim(acx, acy);
  const auto x = build_block_toeplitz(acx, horizon, false);
  const auto y = build_block_toeplitz(acy, horizon, false);
  return stacked_terms(x, y, policy, method).squared /
         static_cast<double>(horizon + 1);
}

TraceSqrtPerStep trace_sqrt_product_per_step(const Autocovariance& acx,
                                             const Autocovariance& acy,
                                             Eigen::Index horizon,
                                             const PsdPolicy& policy) {
  require_same_dim(acx, acy);
  const auto x = build_block_toeplitz(acx, horizon, false);
  const auto y = build_block_toeplitz(acy, horizon, false);
  const double steps = static_cast<double>(horizon + 1);
  TraceSqrtPerStep out;
  out.sandwich =
      stacked_terms(x, y, policy, TraceSqrtMethod::Sandwich).trace_sqrt_product /
      steps;
  out.cholesky =
      stacked_terms(x, y, policy, TraceSqrtMethod::Cholesky).trace_sqrt_product /
      steps;
  const double scale = std::max(std::abs(out.sandwich), std::abs(out.cholesky));
  out.relative_discrepancy =
      scale > 0.0 ? std::abs(out.sandwich - out.cholesky) / scale : 0.0;
  return out;
}

InverseHorizonFit fit_inverse_horizon(const std::vector<Eigen::Index>& horizons,
                                      const std::vector<double>& values) {
  if (horizons.empty() || horizons.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "fit needs matching, nonempty horizon and value lists");
  }
  InverseHorizonFit fit;
  const std::size_t n = horizons.size();
  if (n == 1) {
    fit.limit = values.back();
    return fit;
  }
  const std::size_t first = n >= 3 ? n - 3 : 0;
  double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
  const double count = static_cast<double>(n - first);
  for (std::size_t k = first; k < n; ++k) {
    const double u = 1.0 / static_cast<double>(horizons[k] + 1);
    su += u;
    sv += values[k];
    suu += u * u;
    suv += u * values[k];
  }
  const double det = count * suu - su * su;
  if (det <= 0.0) {
    fit.limit = values.back();
    fit.degenerate = true;
    return fit;
  }
  fit.slope = (count * suv - su * sv) / det;
  fit.limit = (sv - fit.slope * su) / count;

  if (n >= 3) {
    const double d1 = values[n - 2] - values[n - 3];
    const double d2 = values[n - 1] - values[n - 2];
    double scale = 0.0;
    for (std::size_t k = first; k < n; ++k) {
      scale = std::max(scale, std::abs(values[k]));
    }
    const double noise = 1e-10 * scale + 1e-14;
    fit.degenerate = d1 * d2 < 0.0 && std::abs(d1) > noise && std::abs(d2) > noise;
  }
  return fit;
}

std::vector<Eigen::Index> default_horizons() {
  return {16, 32, 64, 128, 256, 512, 1024};
}

bool within_convergence_tolerance(double limit, double target) {
  return std::abs(limit - target) <= std::max(1e-3 * target, 1e-8);
}

ConvergenceDiagnostic convergence_diagnostic(
    const Autocovariance& acx, const Autocovariance& acy,
    const std::vector<Eigen::Index>& horizons, double spectral_target,
    const PsdPolicy& policy) {
  require_same_dim(acx, acy);
  if (horizons.empty()) {
    throw Error(ErrorCode::InvalidArgument, "horizon schedule is empty");
  }
  for (std::size_t k = 1; k < horizons.size(); ++k) {
    if (horizons[k] <= horizons[k - 1]) {
      throw Error(ErrorCode::InvalidArgument,
                  "horizons must be strictly increasing");
    }
  }
  ConvergenceDiagnostic diag;
  diag.horizons = horizons;
  diag.spectral_target = spectral_target;
  for (Eigen::Index horizon : horizons) {
    const auto x = build_block_toeplitz(acx, horizon, false);
    const auto y = build_block_toeplitz(acy, horizon, false);
    const BuresTerms t =
        stacked_terms(x, y, policy, TraceSqrtMethod::Cholesky);
    const double steps = static_cast<double>(horizon + 1);
    diag.per_step_values.push_back(t.squared / steps);
    diag.min_eigenvalues_x.push_back(t.min_eigenvalue_a);
    diag.min_eigenvalues_y.push_back(t.min_eigenvalue_b);
    diag.trace_rows.push_back({horizon, t.trace_a / steps, t.trace_b / steps,
                               t.trace_sqrt_product / steps});
    diag.truncated = diag.truncated || x.truncated || y.truncated;
  }
  const InverseHorizonFit fit =
      fit_inverse_horizon(diag.horizons, diag.per_step_values);
  diag.extrapolated_limit = fit.limit;
  diag.fit_degenerate = fit.degenerate;
  diag.converged = within_convergence_tolerance(fit.limit, spectral_target);
  return diag;
}

}  // namespace sw2
