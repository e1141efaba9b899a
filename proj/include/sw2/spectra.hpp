#ifndef SW2_SPECTRA_HPP
#define SW2_SPECTRA_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <vector>

#include "sw2/hermitian.hpp"

namespace sw2 {

/// Lag sequence R(0..K) of a stationary process, each lag an m x m real
/// matrix. Negative lags follow R(-k) = R(k)^T.
///
/// Lags use the convention R(k) = E[x_{t+k} x_t^T], under which
/// sum_k R(k) e^{-j w k} equals H(e^{jw}) Q H(e^{jw})* for a rational model.
struct Autocovariance {
  std::vector<Eigen::MatrixXd> lags;

  Eigen::Index dim() const { return lags.empty() ? 0 : lags.front().rows(); }
  Eigen::Index max_lag() const { return static_cast<Eigen::Index>(lags.size()) - 1; }

  /// R(k) for any integer k; zero beyond the stored lags.
  Eigen::MatrixXd at(Eigen::Index k) const;
};

/// Throws unless every lag is m x m and R(0) is symmetric PD.
void validate(const Autocovariance& acov);

/// Hermitian PD matrix values on the uniform grid w_l = 2 pi l / N.
struct GridSpectrum {
  std::vector<HermitianMatrix> values;
  bool real_symmetry = false;     // value(N - l) == value(l)^T was verified
  std::size_t floored_count = 0;  // frequencies that needed eigenvalue flooring

  Eigen::Index dim() const { return values.empty() ? 0 : values.front().rows(); }
  Eigen::Index n_freq() const { return static_cast<Eigen::Index>(values.size()); }
  double omega(Eigen::Index l) const {
    return 2.0 * std::numbers::pi * static_cast<double>(l) /
           static_cast<double>(n_freq());
  }
};

/// Throws unless all values share one dimension and are Hermitian.
void validate(const GridSpectrum& spec);

/// Per-frequency PD enforcement with floor and negativity band relative to the
/// largest eigenvalue on the grid; returns the number of frequencies floored.
std::size_t floor_grid(GridSpectrum& spec, const PsdPolicy& policy);

/// Stable VARMA spectrum H(e^{jw}) Q H(e^{jw})* with
/// H(z) = (I - sum_r A_r z^{-r})^{-1} (sum_s B_s z^{-s}).
class RationalSpectrum {
 public:
  /// Validates dimensions, Q symmetric PD, and AR stability (companion
  /// spectral radius below one). Throws UnstableModel, NotPositiveDefinite or
  /// DimensionMismatch.
  RationalSpectrum(std::vector<Eigen::MatrixXd> ar,
                   std::vector<Eigen::MatrixXd> ma, Eigen::MatrixXd noise_cov);

  static RationalSpectrum white_noise(const Eigen::MatrixXd& noise_cov);
  /// Scalar AR(1): x_t = a x_{t-1} + e_t, var(e) = variance.
  static RationalSpectrum scalar_ar1(double a, double variance);

  Eigen::Index dim() const { return noise_cov_.rows(); }
  const std::vector<Eigen::MatrixXd>& ar() const { return ar_; }
  const std::vector<Eigen::MatrixXd>& ma() const { return ma_; }
  const Eigen::MatrixXd& noise_cov() const { return noise_cov_; }
  /// Largest companion-matrix eigenvalue modulus (< 1).
  double spectral_radius() const { return spectral_radius_; }

 private:
  std::vector<Eigen::MatrixXd> ar_;
  std::vector<Eigen::MatrixXd> ma_;
  Eigen::MatrixXd noise_cov_;
  double spectral_radius_ = 0.0;
};

/// Samples of an m-channel zero-mean series, one row per time step.
struct TimeSeries {
  Eigen::MatrixXd samples;  // T x m

  Eigen::Index dim() const { return samples.cols(); }
  Eigen::Index length() const { return samples.rows(); }
};

enum class Window { Hann, Hamming, Rectangular };

struct WelchOptions {
  Eigen::Index segment_len = 512;
  double overlap_frac = 0.5;
  Window window = Window::Hann;
};

/// max_l ||value(N - l) - value(l)^T||_F
struct SymmetryReport {
  double max_residual = 0.0;
  bool symmetric = false;  // max_residual <= kRealSymmetryTolerance
};

inline constexpr double kRealSymmetryTolerance = 1e-10;

HermitianMatrix eval_rational(const RationalSpectrum& model, double omega);

/// The model sampled on the uniform N-point grid; PD enforced per `policy`.
GridSpectrum sample_rational(const RationalSpectrum& model, Eigen::Index n_freq,
                             const PsdPolicy& policy = {});

/// Truncated sum_{|k| <= K} R(k) e^{-j w_l k} on the N-point grid.
GridSpectrum autocov_to_spectrum(const Autocovariance& acov,
                                 Eigen::Index n_freq,
                                 const PsdPolicy& policy = {});

struct AutocovResult {
  Autocovariance acov;
  double imaginary_residual = 0.0;  // largest discarded |Im R(k)|
};

/// R(k) = (1/N) sum_l value(w_l) e^{j w_l k} for k = 0..max_lag.
AutocovResult spectrum_to_autocov(const GridSpectrum& spec,
                                  Eigen::Index max_lag);

/// Exact lags of a rational model from its impulse response, truncated once
/// ||R(k)||_F < rel_tol * ||R(0)||_F holds over a window of AR-order lags.
Autocovariance rational_autocovariance(const RationalSpectrum& model,
                                       double rel_tol = 1e-12);

/// Averaged windowed cross-periodogram. Each segment contributes
/// X(w) X(w)* / sum_k window[k]^2, so unit white noise maps to the identity.
GridSpectrum estimate_welch(const TimeSeries& ts, const WelchOptions& options,
                            const PsdPolicy& policy = {});

SymmetryReport check_real_symmetry(const GridSpectrum& spec);

/// Simulates the model with Gaussian innovations after a burn-in; the same
/// seed yields the same series.
TimeSeries simulate_rational(const RationalSpectrum& model,
                             Eigen::Index length, std::uint64_t seed,
                             Eigen::Index burn_in = 1000);

}  // namespace sw2

#endif  // SW2_SPECTRA_HPP
