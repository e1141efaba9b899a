#ifndef SW2_DISTANCES_HPP
#define SW2_DISTANCES_HPP

#include <Eigen/Dense>

#include <vector>

#include "sw2/hermitian.hpp"
#include "sw2/spectra.hpp"

namespace sw2 {

/// Result of a spectral distance evaluation on a shared frequency grid.
struct DistanceReport {
  double value = 0.0;
  double squared = 0.0;
  Eigen::Index n_freq = 0;
  /// Per-frequency integrand: tr W[Phi_x, Phi_y] for W2 and Gelbrich,
  /// ||Phi_x^{1/2} - Phi_y^{1/2}||_F^2 for Hellinger.
  std::vector<double> per_freq_trace;
  /// tr[(Phi_x Phi_y)^{1/2}] - tr[Phi_x^{1/2} Phi_y^{1/2}] per frequency.
  std::vector<double> alt_gap;
  double commutation_residual = 0.0;  // max_l ||Phi_x Phi_y - Phi_y Phi_x||_F
  std::size_t flooring_count = 0;
  /// Set when the value only bounds W2 from below (processes not assumed
  /// elliptical with a common generator).
  bool is_lower_bound = false;
};

struct SpectralOptions {
  PsdPolicy policy{};
  /// Use the Hellinger integrand at frequencies whose commutator is below
  /// `commuting_tol * (||Phi_x||_F ||Phi_y||_F)`; off by default.
  bool commuting_fast_path = false;
  double commuting_tol = 1e-12;
};

/// W = Phi_x + Phi_y - 2 (Phi_x^{1/2} Phi_y Phi_x^{1/2})^{1/2} and its trace.
/// The trace is taken from tr Phi_x + tr Phi_y - 2 tr[(Phi_x Phi_y)^{1/2}]
/// rather than from the matrix.
struct WIntegrand {
  HermitianMatrix matrix;
  double trace = 0.0;
};

template <typename DerivedA, typename DerivedB>
WIntegrand w_integrand(const Eigen::MatrixBase<DerivedA>& phix,
                       const Eigen::MatrixBase<DerivedB>& phiy,
                       const PsdPolicy& policy = {}) {
  const HermitianMatrix x = phix.template cast<std::complex<double>>();
  const HermitianMatrix y = phiy.template cast<std::complex<double>>();
  const BuresTerms terms = bures_terms(x, y, policy);
  const HermitianMatrix root = sqrt_psd(x, policy);
  const HermitianMatrix inner =
      detail::hermitian_part((root * y * root).eval());
  PsdPolicy inner_policy = policy;
  inner_policy.negativity_tol = std::max(policy.negativity_tol, 1e-10);
  return {detail::hermitian_part(
              (x + y - 2.0 * sqrt_psd(inner, inner_policy)).eval()),
          terms.squared};
}

/// Per-frequency quantities shared by every distance in this module.
struct FrequencyTerms {
  double w_trace = 0.0;          // Bures form, clamped at zero
  double hellinger_trace = 0.0;  // ||Phi_x^{1/2} - Phi_y^{1/2}||_F^2
  double alt_gap = 0.0;
  double commutator = 0.0;
  double scale = 0.0;  // tr Phi_x + tr Phi_y
  Eigen::Index floored = 0;
};

FrequencyTerms frequency_terms(const HermitianMatrix& phix,
                               const HermitianMatrix& phiy,
                               const PsdPolicy& policy);

/// Average W2 distance between processes elliptical with the same density
/// generator: sqrt of the grid mean of tr W[Phi_x, Phi_y].
DistanceReport spectral_w2(const GridSpectrum& specx, const GridSpectrum& specy,
                           const SpectralOptions& options = {});

/// Scalar closed form sqrt(mean (S_x^{1/2} - S_y^{1/2})^2) for m = 1 grids.
DistanceReport spectral_w2_scalar(const GridSpectrum& sx, const GridSpectrum& sy,
                                  const PsdPolicy& policy = {});

/// sqrt(mean ||Phi_x^{1/2} - Phi_y^{1/2}||_F^2); never below spectral_w2, equal to
/// it when the spectra commute at every frequency.
DistanceReport hellinger(const GridSpectrum& specx, const GridSpectrum& specy,
                         const PsdPolicy& policy = {});

/// Same value as spectral_w2 with `is_lower_bound` set: for processes that
/// are not necessarily elliptical it bounds the average W2 from below.
DistanceReport gelbrich_lower_bound(const GridSpectrum& specx,
                                    const GridSpectrum& specy,
                                    const SpectralOptions& options = {});

std::vector<double> alt_gap_profile(const GridSpectrum& specx,
                                    const GridSpectrum& specy,
                                    const PsdPolicy& policy = {});

}  // namespace sw2

#endif  // SW2_DISTANCES_HPP
