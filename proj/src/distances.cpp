#include "sw2/distances.hpp"

#include <cmath>
#include <string>

namespace sw2 {

namespace {

void require_compatible(const GridSpectrum& x, const GridSpectrum& y) {
  if (x.values.empty() || y.values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty spectrum grid");
  }
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "spectra have dims " + std::to_string(x.dim()) + " and " +
                    std::to_string(y.dim()));
  }
  if (x.n_freq() != y.n_freq()) {
    throw Error(ErrorCode::GridMismatch,
                "grids have " + std::to_string(x.n_freq()) + " and " +
                    std::to_string(y.n_freq()) + " frequencies");
  }
}

enum class Integrand { Bures, Hellinger };

DistanceReport assemble(const GridSpectrum& x, const GridSpectrum& y,
                        const SpectralOptions& options, Integrand integrand) {
  require_compatible(x, y);
  const Eigen::Index n = x.n_freq();
  DistanceReport report;
  report.n_freq = n;
  report.per_freq_trace.resize(static_cast<std::size_t>(n));
  report.alt_gap.resize(static_cast<std::size_t>(n));
  report.flooring_count = x.floored_count + y.floored_count;

  double sum = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    const HermitianMatrix& a = x.values[l];
    const HermitianMatrix& b = y.values[l];
    const FrequencyTerms t = frequency_terms(a, b, options.policy);
    double value = t.w_trace;
    if (integrand == Integrand::Hellinger) {
      value = t.hellinger_trace;
    } else if (options.commuting_fast_path &&
               t.commutator <= options.commuting_tol * a.norm() * b.norm()) {
      value = t.hellinger_trace;
    }
    report.per_freq_trace[l] = value;
    report.alt_gap[l] = t.alt_gap;
    report.commutation_residual =
        std::max(report.commutation_residual, t.commutator);
    report.flooring_count += static_cast<std::size_t>(t.floored);
    sum += value;
  }
  report.squared = sum / static_cast<double>(n);
  report.value = std::sqrt(report.squared);
  return report;
}

}  // namespace

FrequencyTerms frequency_terms(const HermitianMatrix& phix,
                               const HermitianMatrix& phiy,
                               const PsdPolicy& policy) {
  const BuresTerms bures = bures_terms(phix, phiy, policy);
  const HermitianMatrix root_x = sqrt_psd(phix, policy);
  const HermitianMatrix root_y = sqrt_psd(phiy, policy);

  FrequencyTerms t;
  t.w_trace = bures.squared;
  t.hellinger_trace = (root_x - root_y).squaredNorm();
  t.alt_gap = bures.trace_sqrt_product - std::real((root_x * root_y).trace());
  t.commutator = commutator_norm(phix, phiy);
  t.scale = bures.trace_a + bures.trace_b;
  t.floored = bures.floored;
  return t;
}

DistanceReport spectral_w2(const GridSpectrum& specx, const GridSpectrum& specy,
                           const SpectralOptions& options) {
  return assemble(specx, specy, options, Integrand::Bures);
}

DistanceReport spectral_w2_scalar(const GridSpectrum& sx, const GridSpectrum& sy,
                                  const PsdPolicy& policy) {
  validate(policy);
  require_compatible(sx, sy);
  if (sx.dim() != 1) {
    throw Error(ErrorCode::DimensionMismatch,
                "scalar closed form needs m = 1, got m = " +
                    std::to_string(sx.dim()));
  }
  const Eigen::Index n = sx.n_freq();
  DistanceReport report;
  report.n_freq = n;
  report.per_freq_trace.resize(static_cast<std::size_t>(n));
  report.alt_gap.assign(static_cast<std::size_t>(n), 0.0);
  report.flooring_count = sx.floored_count + sy.floored_count;

  double sum = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    const double a = sx.values[l](0, 0).real();
    const double b = sy.values[l](0, 0).real();
    if (!(a > 0.0) || !(b > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "scalar spectrum not positive at index " + std::to_string(l));
    }
    const double diff = std::sqrt(a) - std::sqrt(b);
    report.per_freq_trace[l] = diff * diff;
    sum += diff * diff;
  }
  report.squared = sum / static_cast<double>(n);
  report.value = std::sqrt(report.squared);
  return report;
}

DistanceReport hellinger(const GridSpectrum& specx, const GridSpectrum& specy,
                         const PsdPolicy& policy) {
  SpectralOptions options;
  options.policy = policy;
  return assemble(specx, specy, options, Integrand::Hellinger);
}

DistanceReport gelbrich_lower_bound(const GridSpectrum& specx,
                                    const GridSpectrum& specy,
                                    const SpectralOptions& options) {
  DistanceReport report = spectral_w2(specx, specy, options);
  report.is_lower_bound = true;
  return report;
}

std::vector<double> alt_gap_profile(const GridSpectrum& specx,
                                    const GridSpectrum& specy,
                                    const PsdPolicy& policy) {
  require_compatible(specx, specy);
  std::vector<double> gaps;
  gaps.reserve(specx.values.size());
  for (std::size_t l = 0; l < specx.values.size(); ++l) {
    gaps.push_back(
        frequency_terms(specx.values[l], specy.values[l], policy).alt_gap);
  }
  return gaps;
}

}  // namespace sw2
