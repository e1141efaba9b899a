// sw2: spectral W2 distances between stationary processes.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sw2/distances.hpp"
#include "sw2/errors.hpp"
#include "sw2/io.hpp"
#include "sw2/spectra.hpp"
#include "sw2/toeplitz.hpp"

namespace {

using namespace sw2;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return 1;
    case ErrorCode::FileNotFound:
      return 2;
    case ErrorCode::ParseError:
      return 3;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::GridMismatch:
    case ErrorCode::TooFewSegments:
    case ErrorCode::GridTooCoarse:
    case ErrorCode::LagTooLarge:
      return 4;
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::IndefiniteInput:
      return 5;
    default:
      return 6;
  }
}

struct Options {
  Eigen::Index n_freq = 4096;
  bool n_freq_set = false;
  double floor_eps = 1e-12;
  std::string semantics = "elliptical";
  std::string distance = "w2";
  bool oracle = false;
  std::string horizons;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::string out;
  Eigen::Index segment = 512;
  double overlap = 0.5;
  std::string window = "hann";
  long max_lag = -1;
  Eigen::Index length = 4096;
  Eigen::Index burn_in = 1000;
  std::vector<std::string> inputs;
};

PsdPolicy policy_of(const Options& o) {
  PsdPolicy p;
  p.floor_eps = o.floor_eps;
  validate(p);
  return p;
}

WelchOptions welch_of(const Options& o) {
  WelchOptions w;
  w.segment_len = o.segment;
  w.overlap_frac = o.overlap;
  if (o.window == "hann") {
    w.window = Window::Hann;
  } else if (o.window == "hamming") {
    w.window = Window::Hamming;
  } else if (o.window == "rectangular") {
    w.window = Window::Rectangular;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown window '" + o.window + "'");
  }
  return w;
}

void check_n_freq(Eigen::Index n) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument, "--n-freq must be a power of two >= 2");
  }
}

std::vector<Eigen::Index> horizons_of(const Options& o) {
  if (o.horizons.empty()) return default_horizons();
  std::vector<Eigen::Index> out;
  std::stringstream ss(o.horizons);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 0) {
      throw Error(ErrorCode::InvalidArgument, "bad horizon '" + item + "'");
    }
    out.push_back(static_cast<Eigen::Index>(v));
  }
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k] <= out[k - 1]) throw Error(ErrorCode::InvalidArgument, "horizons must increase");
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty horizon list");
  return out;
}

// A spectrum source as given on the command line.
struct Source {
  enum class Kind { Model, Autocov, Grid, Series } kind;
  std::string path;
  std::optional<RationalSpectrum> model;
  Autocovariance acov;
  GridSpectrum grid;  // Grid and Series only
};

const char* kind_name(Source::Kind k) {
  switch (k) {
    case Source::Kind::Model:
      return "model";
    case Source::Kind::Autocov:
      return "autocov";
    case Source::Kind::Grid:
      return "grid";
    case Source::Kind::Series:
      return "series";
  }
  return "";
}

Source load(const std::string& path, const Options& o) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  Source s{Source::Kind::Series, path, std::nullopt, {}, {}};
  if (first != std::string::npos && text[first] == '{') {
    if (text.find("\"lags\"") != std::string::npos) {
      s.kind = Source::Kind::Autocov;
      s.acov = parse_autocov(text, path);
    } else {
      s.kind = Source::Kind::Model;
      s.model = parse_rational(text, path);
    }
  } else if (text.compare(first == std::string::npos ? 0 : first, 11, "omega_index") == 0) {
    s.kind = Source::Kind::Grid;
    s.grid = read_grid(path);
    floor_grid(s.grid, policy_of(o));
  } else {
    s.kind = Source::Kind::Series;
    std::istringstream in(text);
    s.grid = estimate_welch(parse_timeseries_csv(in, path), welch_of(o), policy_of(o));
  }
  return s;
}

bool has_grid(const Source& s) {
  return s.kind == Source::Kind::Grid || s.kind == Source::Kind::Series;
}

GridSpectrum grid_of(const Source& s, Eigen::Index n, const PsdPolicy& policy) {
  switch (s.kind) {
    case Source::Kind::Model:
      return sample_rational(*s.model, n, policy);
    case Source::Kind::Autocov:
      return autocov_to_spectrum(s.acov, n, policy);
    default:
      return s.grid;
  }
}

Autocovariance acov_of(const Source& s, long max_lag) {
  Autocovariance a;
  if (s.kind == Source::Kind::Model) {
    a = rational_autocovariance(*s.model);
  } else if (s.kind == Source::Kind::Autocov) {
    a = s.acov;
  } else {
    throw Error(ErrorCode::InvalidArgument,
                s.path + ": the oracle needs a model or autocovariance, not a " + kind_name(s.kind));
  }
  if (max_lag >= 0 && static_cast<std::size_t>(max_lag) + 1 < a.lags.size()) {
    a.lags.resize(static_cast<std::size_t>(max_lag) + 1);
  }
  return a;
}

// Grid means of the quantities the trace rows converge to.
Json trace_targets(const GridSpectrum& x, const GridSpectrum& y, const PsdPolicy& policy) {
  double tx = 0.0, ty = 0.0, tsp = 0.0;
  for (Eigen::Index l = 0; l < x.n_freq(); ++l) {
    const BuresTerms t = bures_terms(x.values[l], y.values[l], policy);
    tx += t.trace_a;
    ty += t.trace_b;
    tsp += t.trace_sqrt_product;
  }
  const double n = static_cast<double>(x.n_freq());
  return Json::Object{{"trace_x", tx / n}, {"trace_y", ty / n}, {"trace_sqrt_product", tsp / n}};
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(ErrorCode::FileNotFound, "cannot write " + o.out);
  f << text;
}

std::string diagnostic_csv(const ConvergenceDiagnostic& d) {
  std::string s = "# spectral_target=" + format_double(d.spectral_target) + "\n";
  s += "# extrapolated_limit=" + format_double(d.extrapolated_limit) + "\n";
  s += std::string("# converged=") + (d.converged ? "true" : "false") + "\n";
  s += "horizon,per_step,min_eig_x,min_eig_y,trace_x,trace_y,trace_sqrt_product\n";
  for (std::size_t k = 0; k < d.horizons.size(); ++k) {
    const auto& r = d.trace_rows[k];
    s += std::to_string(d.horizons[k]) + "," + format_double(d.per_step_values[k]) + "," +
         format_double(d.min_eigenvalues_x[k]) + "," + format_double(d.min_eigenvalues_y[k]) + "," +
         format_double(r.trace_x) + "," + format_double(r.trace_y) + "," +
         format_double(r.trace_sqrt_product) + "\n";
  }
  return s;
}

int cmd_dist(const Options& o) {
  const PsdPolicy policy = policy_of(o);
  if (o.semantics != "elliptical" && o.semantics != "gelbrich") {
    throw Error(ErrorCode::InvalidArgument, "--semantics must be elliptical or gelbrich");
  }
  if (o.distance != "w2" && o.distance != "hellinger") {
    throw Error(ErrorCode::InvalidArgument, "--distance must be w2 or hellinger");
  }
  check_n_freq(o.n_freq);
  const Source a = load(o.inputs[0], o);
  const Source b = load(o.inputs[1], o);
  // An estimated or file grid fixes the resolution for the other side.
  Eigen::Index n = o.n_freq;
  if (!o.n_freq_set) {
    if (has_grid(a)) {
      n = a.grid.n_freq();
    } else if (has_grid(b)) {
      n = b.grid.n_freq();
    }
  }
  const GridSpectrum gx = grid_of(a, n, policy);
  const GridSpectrum gy = grid_of(b, n, policy);

  DistanceReport report;
  SpectralOptions so;
  so.policy = policy;
  if (o.distance == "hellinger") {
    report = hellinger(gx, gy, policy);
  } else if (o.semantics == "gelbrich") {
    report = gelbrich_lower_bound(gx, gy, so);
  } else {
    report = spectral_w2(gx, gy, so);
  }

  std::optional<ConvergenceDiagnostic> diag;
  if (o.oracle) {
    diag = convergence_diagnostic(acov_of(a, o.max_lag), acov_of(b, o.max_lag), horizons_of(o),
                                  report.squared, policy);
  }

  if (o.format == "csv") {
    std::string s = "# value=" + format_double(report.value) + "\n";
    s += "# squared=" + format_double(report.squared) + "\n";
    s += "# commutation_residual=" + format_double(report.commutation_residual) + "\n";
    s += "# flooring_count=" + std::to_string(report.flooring_count) + "\n";
    s += std::string("# is_lower_bound=") + (report.is_lower_bound ? "true" : "false") + "\n";
    s += "omega_index,omega,per_freq_trace,alt_gap\n";
    for (Eigen::Index l = 0; l < report.n_freq; ++l) {
      const auto u = static_cast<std::size_t>(l);
      s += std::to_string(l) + "," + format_double(gx.omega(l)) + "," +
           format_double(report.per_freq_trace[u]) + "," + format_double(report.alt_gap[u]) + "\n";
    }
    if (diag) s += diagnostic_csv(*diag);
    emit(o, s);
    return 0;
  }
  Json j = to_json(report);
  auto& obj = std::get<Json::Object>(j.value);
  obj.insert(obj.begin(), {"distance", o.distance == "hellinger" ? "hellinger" : "w2"});
  obj.insert(obj.begin() + 1, {"semantics", o.semantics});
  if (diag) obj.emplace_back("oracle", to_json(*diag));
  emit(o, dump(j));
  return 0;
}

int cmd_estimate(const Options& o) {
  const PsdPolicy policy = policy_of(o);
  const TimeSeries ts = read_timeseries(o.inputs[0]);
  const GridSpectrum g = estimate_welch(ts, welch_of(o), policy);
  if (o.out.empty()) {
    write_grid_csv(std::cout, g);
    std::cout.flush();
  } else {
    write_grid(o.out, g);
  }
  return 0;
}

int cmd_oracle(const Options& o) {
  const PsdPolicy policy = policy_of(o);
  check_n_freq(o.n_freq);
  const Source a = load(o.inputs[0], o);
  const Source b = load(o.inputs[1], o);
  const Autocovariance ax = acov_of(a, o.max_lag);
  const Autocovariance ay = acov_of(b, o.max_lag);
  // The target comes from the untruncated sources.
  const GridSpectrum gx = grid_of(a, o.n_freq, policy);
  const GridSpectrum gy = grid_of(b, o.n_freq, policy);
  const DistanceReport report = spectral_w2(gx, gy, SpectralOptions{policy});
  const ConvergenceDiagnostic d = convergence_diagnostic(ax, ay, horizons_of(o), report.squared, policy);
  if (o.format == "csv") {
    emit(o, diagnostic_csv(d));
    return 0;
  }
  Json j = to_json(d);
  auto& obj = std::get<Json::Object>(j.value);
  obj.emplace_back("n_freq", static_cast<long long>(o.n_freq));
  obj.emplace_back("trace_targets", trace_targets(gx, gy, policy));
  if (o.max_lag >= 0) obj.emplace_back("max_lag", static_cast<long long>(o.max_lag));
  emit(o, dump(j));
  return 0;
}

int cmd_info(const Options& o) {
  const PsdPolicy policy = policy_of(o);
  check_n_freq(o.n_freq);
  const Source s = load(o.inputs[0], o);
  const GridSpectrum g = grid_of(s, has_grid(s) ? s.grid.n_freq() : o.n_freq, policy);
  double min_eig = std::numeric_limits<double>::infinity();
  double max_eig = 0.0;
  double worst_herm = 0.0;
  Eigen::Index argmin = 0;
  for (Eigen::Index l = 0; l < g.n_freq(); ++l) {
    const auto& v = g.values[static_cast<std::size_t>(l)];
    const Eigen::VectorXd ev = eigvalsh(v);
    if (ev(0) < min_eig) {
      min_eig = ev(0);
      argmin = l;
    }
    max_eig = std::max(max_eig, ev(ev.size() - 1));
    worst_herm = std::max(worst_herm, hermitian_residual(v));
  }
  const SymmetryReport sym = check_real_symmetry(g);
  Json::Object obj{
      {"source", kind_name(s.kind)},
      {"dim", static_cast<long long>(g.dim())},
      {"n_freq", static_cast<long long>(g.n_freq())},
      {"min_eigenvalue", min_eig},
      {"min_eigenvalue_index", static_cast<long long>(argmin)},
      {"max_eigenvalue", max_eig},
      {"condition", max_eig / min_eig},
      {"floored_count", static_cast<long long>(g.floored_count)},
      {"hermitian_residual", worst_herm},
      {"real_symmetry_residual", sym.max_residual},
      {"real_symmetry", sym.symmetric},
  };
  if (s.model) obj.emplace_back("spectral_radius", s.model->spectral_radius());
  if (s.kind == Source::Kind::Model || s.kind == Source::Kind::Autocov) {
    const Autocovariance a = acov_of(s, -1);
    obj.emplace_back("max_lag", static_cast<long long>(a.max_lag()));
    obj.emplace_back("variance_trace", a.at(0).trace());
  }
  if (o.format == "csv") {
    std::string text = "key,value\n";
    for (const auto& [k, v] : obj) {
      std::string d = dump(v);
      d.pop_back();
      text += k + "," + d + "\n";
    }
    emit(o, text);
    return 0;
  }
  emit(o, dump(Json(std::move(obj))));
  return 0;
}

int cmd_simulate(const Options& o) {
  const RationalSpectrum model = read_rational(o.inputs[0]);
  if (o.length < 1 || o.burn_in < 0) {
    throw Error(ErrorCode::InvalidArgument, "--length must be positive and --burn-in non-negative");
  }
  const TimeSeries ts = simulate_rational(model, o.length, o.seed, o.burn_in);
  std::ostringstream s;
  write_timeseries_csv(s, ts);
  emit(o, s.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average W2 distance between stationary processes from their power spectra"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--floor-eps", o.floor_eps, "Eigenvalue floor relative to the largest eigenvalue")
        ->check(CLI::NonNegativeNumber);
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    c->add_option("--out", o.out, "Write output to PATH instead of stdout");
  };
  auto grid_opts = [&](CLI::App* c) {
    c->add_option_function<Eigen::Index>(
        "--n-freq", [&](const Eigen::Index& n) { o.n_freq = n; o.n_freq_set = true; },
        "Frequency grid size (power of two, default 4096)");
  };
  auto welch_opts = [&](CLI::App* c) {
    c->add_option("--segment", o.segment, "Welch segment length (power of two)");
    c->add_option("--overlap", o.overlap, "Welch overlap fraction in [0, 1)");
    c->add_option("--window", o.window, "hann, hamming or rectangular");
  };
  auto oracle_opts = [&](CLI::App* c) {
    c->add_option("--horizons", o.horizons, "Comma-separated increasing horizons");
    c->add_option("--max-lag", o.max_lag, "Truncate autocovariances after this lag");
  };

  auto* dist = app.add_subcommand("dist", "Distance between two spectrum sources");
  dist->add_option("inputs", o.inputs, "Model JSON, autocovariance JSON, grid CSV or series CSV")
      ->required()->expected(2);
  dist->add_option("--semantics", o.semantics, "elliptical or gelbrich");
  dist->add_option("--distance", o.distance, "w2 or hellinger");
  dist->add_flag("--oracle", o.oracle, "Attach the finite-horizon convergence diagnostic");
  common(dist);
  grid_opts(dist);
  welch_opts(dist);
  oracle_opts(dist);

  auto* est = app.add_subcommand("estimate", "Welch spectrum estimate of a time series");
  est->add_option("series", o.inputs, "Time-series CSV")->required()->expected(1);
  common(est);
  welch_opts(est);

  auto* orc = app.add_subcommand("oracle", "Finite-horizon block-Toeplitz convergence check");
  orc->add_option("inputs", o.inputs, "Model or autocovariance JSON")->required()->expected(2);
  common(orc);
  grid_opts(orc);
  oracle_opts(orc);

  auto* info = app.add_subcommand("info", "Summary of a spectrum source");
  info->add_option("input", o.inputs, "Spectrum source")->required()->expected(1);
  common(info);
  grid_opts(info);
  welch_opts(info);

  auto* sim = app.add_subcommand("simulate", "Gaussian sample path of a model");
  sim->add_option("model", o.inputs, "Model JSON")->required()->expected(1);
  sim->add_option("--length", o.length, "Number of samples");
  sim->add_option("--seed", o.seed, "Random seed");
  sim->add_option("--burn-in", o.burn_in, "Discarded leading samples");
  sim->add_option("--out", o.out, "Write output to PATH instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "sw2: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*dist) return cmd_dist(o);
    if (*est) return cmd_estimate(o);
    if (*orc) return cmd_oracle(o);
    if (*info) return cmd_info(o);
    if (*sim) return cmd_simulate(o);
  } catch (const Error& e) {
    std::cerr << "sw2: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "sw2: " << e.what() << "\n";
    return 6;
  }
  return 1;
}
