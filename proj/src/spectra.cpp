#include "sw2/spectra.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

namespace sw2 {

namespace {

using cd = std::complex<double>;

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// e^{-j 2 pi n / N} for n = 0..N-1, with entry N-n the exact conjugate of
// entry n so that grids built from it are exactly conjugate-symmetric.
std::vector<cd> twiddles(Eigen::Index n_freq) {
  std::vector<cd> tw(static_cast<std::size_t>(n_freq));
  for (Eigen::Index n = 0; n <= n_freq / 2; ++n) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(n) /
                         static_cast<double>(n_freq);
    tw[n] = cd(std::cos(angle), -std::sin(angle));
    if (n > 0 && n < n_freq - n) tw[n_freq - n] = std::conj(tw[n]);
  }
  return tw;
}

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> make_window(Window kind, Eigen::Index len) {
  std::vector<double> w(static_cast<std::size_t>(len), 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index n = 0; n < len; ++n) {
    const double phase = two_pi * static_cast<double>(n) / static_cast<double>(len);
    switch (kind) {
      case Window::Hann: w[n] = 0.5 - 0.5 * std::cos(phase); break;
      case Window::Hamming: w[n] = 0.54 - 0.46 * std::cos(phase); break;
      case Window::Rectangular: break;
    }
  }
  return w;
}

}  // namespace

Eigen::MatrixXd Autocovariance::at(Eigen::Index k) const {
  const Eigen::Index abs_k = k < 0 ? -k : k;
  if (abs_k > max_lag()) return Eigen::MatrixXd::Zero(dim(), dim());
  if (k < 0) return lags[abs_k].transpose();
  return lags[abs_k];
}

void validate(const Autocovariance& acov) {
  if (acov.lags.empty() || acov.dim() < 1) {
    throw Error(ErrorCode::InvalidArgument, "autocovariance has no lags");
  }
  const Eigen::Index m = acov.dim();
  for (const auto& r : acov.lags) {
    if (r.rows() != m || r.cols() != m) {
      throw Error(ErrorCode::DimensionMismatch,
                  "lag of size " + dims(r.rows(), r.cols()) + ", expected " +
                      dims(m, m));
    }
    if (!r.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "non-finite autocovariance lag");
    }
  }
  const Eigen::MatrixXd& r0 = acov.lags.front();
  if (hermitian_residual(r0) > kHermitianTolerance) {
    throw Error(ErrorCode::NonHermitianInput, "R(0) is not symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(r0).info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "R(0) is not positive definite");
  }
}

void validate(const GridSpectrum& spec) {
  if (spec.values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty spectrum grid");
  }
  const Eigen::Index m = spec.dim();
  for (std::size_t l = 0; l < spec.values.size(); ++l) {
    const auto& v = spec.values[l];
    if (v.rows() != m || v.cols() != m) {
      throw Error(ErrorCode::DimensionMismatch,
                  "grid value " + std::to_string(l) + " has size " +
                      dims(v.rows(), v.cols()));
    }
    require_hermitian(v, "grid value");
  }
}

std::size_t floor_grid(GridSpectrum& spec, const PsdPolicy& policy) {
  validate(policy);
  // Floor against the whole grid so spectral zeros register even for m = 1.
  double grid_scale = 0.0;
  for (const auto& v : spec.values) {
    require_hermitian(v, "spectrum value");
    grid_scale = std::max(grid_scale, detail::spectral_scale(
                                          detail::eigh_unchecked(v, false).eigenvalues));
  }
  std::size_t count = 0;
  for (std::size_t l = 0; l < spec.values.size(); ++l) {
    Eigen::Index floored = 0;
    try {
      spec.values[l] = floor_to_pd(spec.values[l], policy, &floored, grid_scale);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotPositiveDefinite) throw;
      throw Error(ErrorCode::NotPositiveDefinite,
                  "at frequency index " + std::to_string(l) + ": " + e.what());
    }
    if (floored > 0) ++count;
  }
  spec.floored_count = count;
  return count;
}

RationalSpectrum::RationalSpectrum(std::vector<Eigen::MatrixXd> ar,
                                   std::vector<Eigen::MatrixXd> ma,
                                   Eigen::MatrixXd noise_cov)
    : ar_(std::move(ar)), ma_(std::move(ma)), noise_cov_(std::move(noise_cov)) {
  const Eigen::Index m = noise_cov_.rows();
  if (m < 1 || noise_cov_.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "noise covariance must be square, got " +
                    dims(noise_cov_.rows(), noise_cov_.cols()));
  }
  if (ma_.empty()) ma_.push_back(Eigen::MatrixXd::Identity(m, m));
  for (const auto* list : {&ar_, &ma_}) {
    for (const auto& c : *list) {
      if (c.rows() != m || c.cols() != m) {
        throw Error(ErrorCode::DimensionMismatch,
                    "coefficient of size " + dims(c.rows(), c.cols()) +
                        ", expected " + dims(m, m));
      }
      if (!c.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
      }
    }
  }
  if (!noise_cov_.allFinite() ||
      hermitian_residual(noise_cov_) > kHermitianTolerance) {
    throw Error(ErrorCode::NonHermitianInput, "noise covariance not symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(noise_cov_).info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "noise covariance not positive definite");
  }

  const Eigen::Index p = static_cast<Eigen::Index>(ar_.size());
  if (p > 0) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m * p, m * p);
    for (Eigen::Index r = 0; r < p; ++r) {
      companion.block(0, r * m, m, m) = ar_[r];
    }
    if (p > 1) {
      companion.block(m, 0, m * (p - 1), m * (p - 1)).setIdentity();
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::ConvergenceFailure,
                  "companion eigenvalues did not converge");
    }
    spectral_radius_ = solver.eigenvalues().cwiseAbs().maxCoeff();
    if (!(spectral_radius_ < 1.0)) {
      throw Error(ErrorCode::UnstableModel,
                  "AR companion spectral radius " +
                      std::to_string(spectral_radius_) + " is not below 1");
    }
  }
}

RationalSpectrum RationalSpectrum::white_noise(const Eigen::MatrixXd& noise_cov) {
  return RationalSpectrum({}, {}, noise_cov);
}

RationalSpectrum RationalSpectrum::scalar_ar1(double a, double variance) {
  return RationalSpectrum({Eigen::MatrixXd::Constant(1, 1, a)}, {},
                          Eigen::MatrixXd::Constant(1, 1, variance));
}

HermitianMatrix eval_rational(const RationalSpectrum& model, double omega) {
  const Eigen::Index m = model.dim();
  HermitianMatrix denom = HermitianMatrix::Identity(m, m);
  for (std::size_t r = 0; r < model.ar().size(); ++r) {
    denom -= model.ar()[r].cast<cd>() *
             std::polar(1.0, -omega * static_cast<double>(r + 1));
  }
  HermitianMatrix numer = HermitianMatrix::Zero(m, m);
  for (std::size_t s = 0; s < model.ma().size(); ++s) {
    numer += model.ma()[s].cast<cd>() *
             std::polar(1.0, -omega * static_cast<double>(s));
  }
  Eigen::JacobiSVD<HermitianMatrix> svd(denom);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0) || sv(0) / smallest > 1e12) {
    throw Error(ErrorCode::SingularAr,
                "I - sum A_r e^{-jwr} is singular at omega " +
                    std::to_string(omega));
  }
  const HermitianMatrix h = denom.partialPivLu().solve(numer);
  return detail::hermitian_part(h * model.noise_cov().cast<cd>() * h.adjoint());
}

GridSpectrum sample_rational(const RationalSpectrum& model, Eigen::Index n_freq,
                             const PsdPolicy& policy) {
  if (n_freq < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
  }
  GridSpectrum out;
  out.values.reserve(static_cast<std::size_t>(n_freq));
  for (Eigen::Index l = 0; l < n_freq; ++l) {
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(l) /
                         static_cast<double>(n_freq);
    out.values.push_back(eval_rational(model, omega));
  }
  floor_grid(out, policy);
  out.real_symmetry = check_real_symmetry(out).symmetric;
  return out;
}

GridSpectrum autocov_to_spectrum(const Autocovariance& acov,
                                 Eigen::Index n_freq, const PsdPolicy& policy) {
  validate(acov);
  const Eigen::Index max_lag = acov.max_lag();
  if (n_freq < 2 * max_lag + 1) {
    throw Error(ErrorCode::GridTooCoarse,
                "grid of " + std::to_string(n_freq) + " points cannot resolve " +
                    std::to_string(max_lag) + " lags (need N >= 2K+1)");
  }
  const auto tw = twiddles(n_freq);
  const Eigen::Index m = acov.dim();
  GridSpectrum out;
  out.values.reserve(static_cast<std::size_t>(n_freq));
  for (Eigen::Index l = 0; l < n_freq; ++l) {
    HermitianMatrix value = acov.lags[0].cast<cd>();
    for (Eigen::Index k = 1; k <= max_lag; ++k) {
      const cd phase = tw[(l * k) % n_freq];  // e^{-j w_l k}
      const Eigen::MatrixXd& r = acov.lags[k];
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          value(i, j) += r(i, j) * phase + r(j, i) * std::conj(phase);
        }
      }
    }
    out.values.push_back(detail::hermitian_part(value));
  }
  floor_grid(out, policy);
  out.real_symmetry = check_real_symmetry(out).symmetric;
  return out;
}

AutocovResult spectrum_to_autocov(const GridSpectrum& spec,
                                  Eigen::Index max_lag) {
  validate(spec);
  const Eigen::Index n = spec.n_freq();
  if (max_lag < 0 || 2 * max_lag >= n) {
    throw Error(ErrorCode::LagTooLarge,
                "max_lag " + std::to_string(max_lag) + " must be below N/2 = " +
                    std::to_string(n / 2));
  }
  const auto tw = twiddles(n);
  const Eigen::Index m = spec.dim();
  AutocovResult out;
  out.acov.lags.reserve(static_cast<std::size_t>(max_lag + 1));
  for (Eigen::Index k = 0; k <= max_lag; ++k) {
    HermitianMatrix sum = HermitianMatrix::Zero(m, m);
    for (Eigen::Index l = 0; l < n; ++l) {
      sum += spec.values[l] * std::conj(tw[(l * k) % n]);  // e^{+j w_l k}
    }
    sum /= static_cast<double>(n);
    out.imaginary_residual =
        std::max(out.imaginary_residual, sum.imag().cwiseAbs().maxCoeff());
    out.acov.lags.push_back(sum.real());
  }
  if (out.imaginary_residual > 1e-6) {
    throw Error(ErrorCode::NonRealResidue,
                "imaginary residue " + std::to_string(out.imaginary_residual) +
                    " in recovered lags");
  }
  out.acov.lags[0] = 0.5 * (out.acov.lags[0] + out.acov.lags[0].transpose());
  return out;
}

Autocovariance rational_autocovariance(const RationalSpectrum& model,
                                       double rel_tol) {
  constexpr Eigen::Index kMaxTerms = 1'000'000;
  const Eigen::Index m = model.dim();
  const Eigen::Index p = static_cast<Eigen::Index>(model.ar().size());
  const Eigen::Index q = static_cast<Eigen::Index>(model.ma().size()) - 1;
  const Eigen::Index window = std::max<Eigen::Index>(p, 1);

  // Impulse response Psi_l = B_l + sum_r A_r Psi_{l-r}, kept until it has
  // decayed far below what the lag tolerance can see.
  std::vector<Eigen::MatrixXd> psi;
  double max_norm = 0.0;
  Eigen::Index quiet = 0;
  for (Eigen::Index l = 0; l < kMaxTerms; ++l) {
    Eigen::MatrixXd next = l <= q ? model.ma()[l] : Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index r = 1; r <= std::min(l, p); ++r) {
      next.noalias() += model.ar()[r - 1] * psi[l - r];
    }
    const double norm = next.norm();
    max_norm = std::max(max_norm, norm);
    psi.push_back(std::move(next));
    quiet = (l > q && norm <= 1e-17 * max_norm) ? quiet + 1 : 0;
    if (quiet >= window) break;
  }

  const Eigen::Index terms = static_cast<Eigen::Index>(psi.size());
  std::vector<Eigen::MatrixXd> q_psi_t;  // Q Psi_l^T
  q_psi_t.reserve(psi.size());
  for (const auto& ps : psi) q_psi_t.push_back(model.noise_cov() * ps.transpose());

  Autocovariance out;
  double r0_norm = 0.0;
  Eigen::Index small = 0;
  for (Eigen::Index k = 0; k < terms; ++k) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index l = 0; l + k < terms; ++l) {
      r.noalias() += psi[l + k] * q_psi_t[l];
    }
    if (k == 0) {
      r = 0.5 * (r + r.transpose());
      r0_norm = r.norm();
    }
    if (k > 0 && r.norm() < rel_tol * r0_norm) {
      if (++small >= window) break;
    } else {
      small = 0;
    }
    out.lags.push_back(std::move(r));
  }
  // Drop the trailing negligible lags accepted while the window filled.
  while (out.lags.size() > 1 && out.lags.back().norm() < rel_tol * r0_norm) {
    out.lags.pop_back();
  }
  return out;
}

GridSpectrum estimate_welch(const TimeSeries& ts, const WelchOptions& options,
                            const PsdPolicy& policy) {
  const Eigen::Index len = options.segment_len;
  if (!is_power_of_two(len)) {
    throw Error(ErrorCode::InvalidArgument,
                "segment length " + std::to_string(len) +
                    " is not a power of two");
  }
  if (!(options.overlap_frac >= 0.0 && options.overlap_frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "overlap must lie in [0, 1)");
  }
  if (ts.dim() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "time series has no channels");
  }
  const Eigen::Index step = std::max<Eigen::Index>(
      1, len - static_cast<Eigen::Index>(
                   std::floor(options.overlap_frac * static_cast<double>(len))));
  const Eigen::Index segments =
      ts.length() >= len ? (ts.length() - len) / step + 1 : 0;
  if (ts.length() < 2 * len || segments < 4) {
    throw Error(ErrorCode::TooFewSegments,
                std::to_string(segments) + " segments of length " +
                    std::to_string(len) + " from " +
                    std::to_string(ts.length()) +
                    " samples (need >= 4 and length >= 2 * segment)");
  }
  if (!ts.samples.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "non-finite sample");
  }

  const Eigen::Index m = ts.dim();
  const auto window = make_window(options.window, len);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  Eigen::FFT<double> fft;
  std::vector<HermitianMatrix> acc(static_cast<std::size_t>(len),
                                   HermitianMatrix::Zero(m, m));
  std::vector<cd> buffer(static_cast<std::size_t>(len));
  std::vector<cd> spectrum;
  Eigen::MatrixXcd transforms(len, m);
  for (Eigen::Index s = 0; s < segments; ++s) {
    const Eigen::Index start = s * step;
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index t = 0; t < len; ++t) {
        buffer[t] = cd(window[t] * ts.samples(start + t, c), 0.0);
      }
      fft.fwd(spectrum, buffer);
      for (Eigen::Index l = 0; l < len; ++l) transforms(l, c) = spectrum[l];
    }
    for (Eigen::Index l = 0; l < len; ++l) {
      acc[l].noalias() += transforms.row(l).transpose() * transforms.row(l).conjugate();
    }
  }

  GridSpectrum out;
  out.values.reserve(acc.size());
  const double norm = 1.0 / (static_cast<double>(segments) * window_power);
  for (auto& v : acc) out.values.push_back(detail::hermitian_part(v * norm));
  floor_grid(out, policy);
  out.real_symmetry = check_real_symmetry(out).symmetric;
  return out;
}

SymmetryReport check_real_symmetry(const GridSpectrum& spec) {
  SymmetryReport report;
  const Eigen::Index n = spec.n_freq();
  for (Eigen::Index l = 0; l < n; ++l) {
    const Eigen::Index mirror = (n - l) % n;
    report.max_residual =
        std::max(report.max_residual,
                 (spec.values[mirror] - spec.values[l].transpose()).norm());
  }
  report.symmetric = report.max_residual <= kRealSymmetryTolerance;
  return report;
}

TimeSeries simulate_rational(const RationalSpectrum& model, Eigen::Index length,
                             std::uint64_t seed, Eigen::Index burn_in) {
  if (length < 1 || burn_in < 0) {
    throw Error(ErrorCode::InvalidArgument, "invalid simulation length");
  }
  const Eigen::Index m = model.dim();
  const Eigen::Index total = length + burn_in;
  const Eigen::MatrixXd chol = model.noise_cov().llt().matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd noise(total, m);
  for (Eigen::Index t = 0; t < total; ++t) {
    Eigen::VectorXd z(m);
    for (Eigen::Index c = 0; c < m; ++c) z(c) = normal(rng);
    noise.row(t) = (chol * z).transpose();
  }
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, m);
  const auto p = static_cast<Eigen::Index>(model.ar().size());
  const auto q1 = static_cast<Eigen::Index>(model.ma().size());
  for (Eigen::Index t = 0; t < total; ++t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    for (Eigen::Index s = 0; s < q1 && s <= t; ++s) {
      v.noalias() += model.ma()[s] * noise.row(t - s).transpose();
    }
    for (Eigen::Index r = 1; r <= p && r <= t; ++r) {
      v.noalias() += model.ar()[r - 1] * x.row(t - r).transpose();
    }
    x.row(t) = v.transpose();
  }
  return TimeSeries{x.bottomRows(length)};
}

}  // namespace sw2
