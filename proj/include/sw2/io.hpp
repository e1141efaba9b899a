#ifndef SW2_IO_HPP
#define SW2_IO_HPP

// File formats:
//   grid spectrum   CSV `omega_index,row,col,re,im`, one row per matrix entry,
//                   plus a JSON sidecar at `<path>.json` holding
//                   {dim, n_freq, real_symmetry}
//   rational model  JSON {"dim", "ar": [A_1..A_p], "ma": [B_0..B_q],
//                   "noise_cov": Q}; matrices are arrays of rows, and a bare
//                   number is accepted as a 1 x 1 matrix
//   autocovariance  JSON {"dim", "lags": [R(0)..R(K)]}
//   time series     CSV, one row per sample, m columns, optional header row
//
// Reports are written with every float at 17 significant digits so output is
// byte-reproducible and round-trips exactly.

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sw2/distances.hpp"
#include "sw2/spectra.hpp"
#include "sw2/toeplitz.hpp"

namespace sw2 {

/// Minimal ordered JSON document used for report output.
struct Json {
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;
  std::variant<std::nullptr_t, bool, long long, double, std::string, Array,
               Object>
      value;

  Json() : value(nullptr) {}
  Json(bool b) : value(b) {}
  Json(int i) : value(static_cast<long long>(i)) {}
  Json(long i) : value(static_cast<long long>(i)) {}
  Json(long long i) : value(i) {}
  Json(unsigned long i) : value(static_cast<long long>(i)) {}
  Json(double d) : value(d) {}
  Json(const char* s) : value(std::string(s)) {}
  Json(std::string s) : value(std::move(s)) {}
  Json(Array a) : value(std::move(a)) {}
  Json(Object o) : value(std::move(o)) {}

  static Json array(const std::vector<double>& xs);
  static Json array(const std::vector<Eigen::Index>& xs);
};

/// Serializes with two-space indentation; arrays of scalars stay on one line.
std::string dump(const Json& json);

/// printf("%.17g"); non-finite values become "nan"/"inf".
std::string format_double(double x);

Json to_json(const DistanceReport& report);
Json to_json(const ConvergenceDiagnostic& diag);

std::string sidecar_path(const std::string& grid_path);

void write_grid_csv(std::ostream& out, const GridSpectrum& spec);
void write_grid(const std::string& path, const GridSpectrum& spec);
/// Reads the CSV and, when present, checks it against the sidecar.
GridSpectrum read_grid(const std::string& path);
GridSpectrum parse_grid_csv(std::istream& in, const std::string& origin);

RationalSpectrum read_rational(const std::string& path);
RationalSpectrum parse_rational(const std::string& text, const std::string& origin);
std::string rational_to_json(const RationalSpectrum& model);

Autocovariance read_autocov(const std::string& path);
Autocovariance parse_autocov(const std::string& text, const std::string& origin);
std::string autocov_to_json(const Autocovariance& acov);

TimeSeries read_timeseries(const std::string& path);
TimeSeries parse_timeseries_csv(std::istream& in, const std::string& origin);
void write_timeseries_csv(std::ostream& out, const TimeSeries& ts);

/// Whole file as a string; FileNotFound when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace sw2

#endif  // SW2_IO_HPP
