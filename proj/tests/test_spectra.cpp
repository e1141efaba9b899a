#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "sw2/spectra.hpp"
#include "test_support.hpp"

namespace sw2 {
namespace {

using testing::cd;
using testing::Rng;
constexpr double kPi = std::numbers::pi;

template <typename F>
void expect_error(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << error_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

Autocovariance scalar_acov(std::initializer_list<double> lags) {
  Autocovariance a;
  for (double r : lags) a.lags.push_back(Eigen::MatrixXd::Constant(1, 1, r));
  return a;
}

TEST(EvalRational, WhiteNoiseIsFlat) {
  const auto model = RationalSpectrum::white_noise(Eigen::MatrixXd::Identity(2, 2));
  for (double omega : {0.0, 0.3, kPi, 5.0}) {
    EXPECT_LT((eval_rational(model, omega) - HermitianMatrix::Identity(2, 2)).norm(), 1e-15);
  }
}

TEST(EvalRational, ScalarAr1) {
  const auto model = RationalSpectrum::scalar_ar1(0.5, 1.0);
  EXPECT_NEAR(eval_rational(model, 0.0)(0, 0).real(), 4.0, 1e-14);
  EXPECT_NEAR(eval_rational(model, kPi)(0, 0).real(), 1.0 / 2.25, 1e-14);
}

TEST(EvalRational, HermitianForRandomStableModels) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = testing::random_var1(3, rng, 0.8);
    for (int l = 0; l < 16; ++l) {
      const HermitianMatrix v = eval_rational(model, 2.0 * kPi * l / 16.0);
      EXPECT_LE((v - v.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * v.cwiseAbs().maxCoeff());
    }
  }
}

TEST(EvalRational, NearlySingularDenominator) {
  Eigen::MatrixXd a = Eigen::Vector2d(1.0 - 1e-13, 0.1).asDiagonal();
  const RationalSpectrum model({a}, {}, Eigen::MatrixXd::Identity(2, 2));
  expect_error(ErrorCode::SingularAr, [&] { eval_rational(model, 0.0); });
}

TEST(RationalSpectrum, RejectsUnstableAndBadNoise) {
  expect_error(ErrorCode::UnstableModel, [] { RationalSpectrum::scalar_ar1(1.0, 1.0); });
  expect_error(ErrorCode::UnstableModel, [] {
    // AR(2) with roots inside the unit circle: x_t = 2.5 x_{t-1} - x_{t-2}
    RationalSpectrum({Eigen::MatrixXd::Constant(1, 1, 2.5), Eigen::MatrixXd::Constant(1, 1, -1.0)},
                     {}, Eigen::MatrixXd::Constant(1, 1, 1.0));
  });
  expect_error(ErrorCode::NotPositiveDefinite,
               [] { RationalSpectrum::white_noise(Eigen::MatrixXd::Constant(1, 1, -1.0)); });
  expect_error(ErrorCode::DimensionMismatch, [] {
    RationalSpectrum({Eigen::MatrixXd::Identity(2, 2) * 0.1}, {}, Eigen::MatrixXd::Identity(3, 3));
  });
}

TEST(AutocovToSpectrum, WhiteNoiseConstant) {
  Autocovariance a{{2.5 * Eigen::MatrixXd::Identity(2, 2)}};
  const GridSpectrum g = autocov_to_spectrum(a, 16);
  ASSERT_EQ(g.n_freq(), 16);
  for (const auto& v : g.values) {
    EXPECT_LT((v - 2.5 * HermitianMatrix::Identity(2, 2)).norm(), 1e-15);
  }
  EXPECT_EQ(g.floored_count, 0u);
}

TEST(AutocovToSpectrum, ScalarMa1) {
  const GridSpectrum g = autocov_to_spectrum(scalar_acov({1.25, 0.5}), 8);
  EXPECT_NEAR(g.values[0](0, 0).real(), 2.25, 1e-15);
  EXPECT_NEAR(g.values[4](0, 0).real(), 0.25, 1e-15);
  for (Eigen::Index l = 0; l < 8; ++l) {
    EXPECT_NEAR(g.values[l](0, 0).real(), 1.25 + std::cos(g.omega(l)), 1e-15);
  }
}

TEST(AutocovToSpectrum, TruncatedAr1MatchesRational) {
  Autocovariance a;
  for (int k = 0; k <= 40; ++k) {
    a.lags.push_back(Eigen::MatrixXd::Constant(1, 1, (4.0 / 3.0) * std::pow(0.5, k)));
  }
  const GridSpectrum g = autocov_to_spectrum(a, 256);
  const auto model = RationalSpectrum::scalar_ar1(0.5, 1.0);
  for (Eigen::Index l = 0; l < 256; ++l) {
    EXPECT_NEAR(g.values[l](0, 0).real(), eval_rational(model, g.omega(l))(0, 0).real(), 1e-8);
  }
}

TEST(AutocovToSpectrum, Errors) {
  expect_error(ErrorCode::GridTooCoarse,
               [] { autocov_to_spectrum(scalar_acov({1.0, 0.2, 0.1}), 4); });
  expect_error(ErrorCode::NotPositiveDefinite,
               [] { autocov_to_spectrum(scalar_acov({1.0, 0.9}), 16); });
}

TEST(AutocovToSpectrum, ParsevalTrace) {
  Rng rng(41);
  const auto model = testing::random_var1(3, rng, 0.7);
  const Autocovariance a = rational_autocovariance(model);
  const GridSpectrum g = autocov_to_spectrum(a, 256);
  double mean_trace = 0.0;
  for (const auto& v : g.values) mean_trace += v.trace().real();
  mean_trace /= 256.0;
  EXPECT_NEAR(mean_trace, a.lags[0].trace(), 1e-10 * a.lags[0].trace());
}

TEST(SpectrumToAutocov, FlatAndCosine) {
  const GridSpectrum flat = testing::constant_grid(3.0 * HermitianMatrix::Identity(2, 2), 32);
  const auto r = spectrum_to_autocov(flat, 3);
  EXPECT_LT((r.acov.lags[0] - 3.0 * Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-14);
  for (int k = 1; k <= 3; ++k) EXPECT_LT(r.acov.lags[k].norm(), 1e-14);

  const GridSpectrum cosine =
      testing::scalar_grid(256, [](double w) { return 1.25 + std::cos(w); });
  const auto c = spectrum_to_autocov(cosine, 2).acov;
  EXPECT_NEAR(c.lags[0](0, 0), 1.25, 1e-14);
  EXPECT_NEAR(c.lags[1](0, 0), 0.5, 1e-14);
  EXPECT_NEAR(c.lags[2](0, 0), 0.0, 1e-14);
}

TEST(SpectrumToAutocov, Errors) {
  const GridSpectrum flat = testing::constant_grid(HermitianMatrix::Identity(1, 1), 8);
  expect_error(ErrorCode::LagTooLarge, [&] { spectrum_to_autocov(flat, 4); });
  GridSpectrum skew = flat;
  skew.values[1](0, 0) = 2.0;
  expect_error(ErrorCode::NonRealResidue, [&] { spectrum_to_autocov(skew, 2); });
}

TEST(SpectrumToAutocov, RoundTripMa3) {
  Rng rng(5);
  std::normal_distribution<double> normal;
  std::vector<Eigen::MatrixXd> ma;
  for (int s = 0; s <= 3; ++s) {
    Eigen::MatrixXd b(2, 2);
    b << normal(rng), normal(rng), normal(rng), normal(rng);
    ma.push_back(b);
  }
  const RationalSpectrum model({}, ma, Eigen::MatrixXd::Identity(2, 2));
  const Autocovariance a = rational_autocovariance(model);
  ASSERT_EQ(a.max_lag(), 3);
  const GridSpectrum g = autocov_to_spectrum(a, 64);
  const auto back = spectrum_to_autocov(g, 3);
  EXPECT_LE(back.imaginary_residual, 1e-12);
  for (int k = 0; k <= 3; ++k) EXPECT_LE((back.acov.lags[k] - a.lags[k]).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RationalAutocovariance, ScalarClosedForms) {
  const Autocovariance ar = rational_autocovariance(RationalSpectrum::scalar_ar1(0.5, 1.0));
  EXPECT_GE(ar.max_lag(), 38);
  EXPECT_LE(ar.max_lag(), 41);
  for (Eigen::Index k = 0; k <= ar.max_lag(); ++k) {
    EXPECT_NEAR(ar.lags[k](0, 0), (4.0 / 3.0) * std::pow(0.5, k), 1e-15);
  }
  const RationalSpectrum ma1({}, {Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Constant(1, 1, 0.5)},
                             Eigen::MatrixXd::Ones(1, 1));
  const Autocovariance m = rational_autocovariance(ma1);
  ASSERT_EQ(m.max_lag(), 1);
  EXPECT_DOUBLE_EQ(m.lags[0](0, 0), 1.25);
  EXPECT_DOUBLE_EQ(m.lags[1](0, 0), 0.5);
}

// The impulse-response lags and the inverse transform of the sampled spectrum
// are independent routes; agreement pins the lag orientation for m > 1.
TEST(RationalAutocovariance, AgreesWithInverseTransformOfModel) {
  Rng rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const auto model = testing::random_var1(2, rng, 0.6);
    const Autocovariance exact = rational_autocovariance(model);
    const auto recovered = spectrum_to_autocov(sample_rational(model, 1024), 8).acov;
    for (int k = 0; k <= 8; ++k) {
      EXPECT_LE((recovered.lags[k] - exact.at(k)).cwiseAbs().maxCoeff(), 1e-10)
          << "lag " << k;
    }
  }
}

TEST(RealSymmetry, ConstructionAndPerturbation) {
  Rng rng(9);
  const auto model = testing::random_var1(3, rng, 0.7);
  const GridSpectrum from_acov = autocov_to_spectrum(rational_autocovariance(model), 256);
  EXPECT_LE(check_real_symmetry(from_acov).max_residual, 1e-12);
  EXPECT_TRUE(from_acov.real_symmetry);

  const GridSpectrum sampled = sample_rational(model, 128);
  EXPECT_LE(check_real_symmetry(sampled).max_residual, 1e-10);

  GridSpectrum bumped = testing::constant_grid(HermitianMatrix::Identity(2, 2), 8);
  bumped.values[1](0, 0) += 0.25;
  const auto report = check_real_symmetry(bumped);
  EXPECT_NEAR(report.max_residual, 0.25, 1e-15);
  EXPECT_FALSE(report.symmetric);
}

TEST(EstimateWelch, WhiteNoiseFlatLevel) {
  const auto model = RationalSpectrum::white_noise(Eigen::MatrixXd::Ones(1, 1));
  const TimeSeries ts = simulate_rational(model, 1 << 16, 2024);
  const GridSpectrum g = estimate_welch(ts, {512, 0.5, Window::Hann});
  ASSERT_EQ(g.n_freq(), 512);
  double mean = 0.0;
  for (const auto& v : g.values) mean += v(0, 0).real();
  mean /= 512.0;
  EXPECT_GE(mean, 0.95);
  EXPECT_LE(mean, 1.05);
}

TEST(EstimateWelch, Ar1WithinTenPercentMostFrequencies) {
  const auto model = RationalSpectrum::scalar_ar1(0.5, 1.0);
  const TimeSeries ts = simulate_rational(model, 1 << 17, 7);
  const GridSpectrum g = estimate_welch(ts, {256, 0.5, Window::Hann});
  std::vector<double> errors;
  for (Eigen::Index l = 0; l < g.n_freq(); ++l) {
    const double truth = eval_rational(model, g.omega(l))(0, 0).real();
    errors.push_back(std::abs(g.values[l](0, 0).real() - truth) / truth);
  }
  std::sort(errors.begin(), errors.end());
  const auto keep = static_cast<std::size_t>(0.95 * static_cast<double>(errors.size()));
  EXPECT_LE(errors[keep - 1], 0.10);
}

TEST(EstimateWelch, CrossSpectrumOrientationMatchesModel) {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.3, -0.2, 0.4;
  const RationalSpectrum model({a}, {}, Eigen::MatrixXd::Identity(2, 2));
  const TimeSeries ts = simulate_rational(model, 1 << 17, 99);
  const GridSpectrum g = estimate_welch(ts, {128, 0.5, Window::Hann});
  std::vector<double> errors;
  for (Eigen::Index l = 0; l < g.n_freq(); ++l) {
    const HermitianMatrix truth = eval_rational(model, g.omega(l));
    errors.push_back((g.values[l] - truth).norm() / truth.norm());
  }
  std::sort(errors.begin(), errors.end());
  EXPECT_LE(errors[errors.size() / 2], 0.05);
}

TEST(EstimateWelch, WindowsAllNormalizeWhiteNoise) {
  const auto model = RationalSpectrum::white_noise(Eigen::MatrixXd::Ones(1, 1) * 2.0);
  const TimeSeries ts = simulate_rational(model, 1 << 15, 3);
  for (Window w : {Window::Hann, Window::Hamming, Window::Rectangular}) {
    const GridSpectrum g = estimate_welch(ts, {256, 0.5, w});
    double mean = 0.0;
    for (const auto& v : g.values) mean += v(0, 0).real();
    EXPECT_NEAR(mean / 256.0, 2.0, 0.1);
  }
}

TEST(EstimateWelch, Errors) {
  TimeSeries zero{Eigen::MatrixXd::Zero(4096, 1)};
  expect_error(ErrorCode::NotPositiveDefinite, [&] { estimate_welch(zero, {256, 0.5, Window::Hann}); });
  TimeSeries short_ts{Eigen::MatrixXd::Ones(600, 1)};
  expect_error(ErrorCode::TooFewSegments, [&] { estimate_welch(short_ts, {256, 0.5, Window::Hann}); });
  expect_error(ErrorCode::InvalidArgument, [&] { estimate_welch(zero, {300, 0.5, Window::Hann}); });
  expect_error(ErrorCode::InvalidArgument, [&] { estimate_welch(zero, {256, 1.0, Window::Hann}); });
}

TEST(Simulate, DeterministicForSeed) {
  Rng rng(1);
  const auto model = testing::random_var1(2, rng, 0.5);
  const TimeSeries a = simulate_rational(model, 100, 42);
  const TimeSeries b = simulate_rational(model, 100, 42);
  const TimeSeries c = simulate_rational(model, 100, 43);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
}

}  // namespace
}  // namespace sw2
