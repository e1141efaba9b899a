#include "sw2/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace sw2 {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& origin, const std::string& what) {
  throw Error(ErrorCode::ParseError, origin + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

bool parse_index(std::string_view field, long long& out) {
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

void dump_to(std::string& out, const Json& node, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          out += v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, long long>) {
          out += std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          out += std::isfinite(v) ? format_double(v) : "null";
        } else if constexpr (std::is_same_v<T, std::string>) {
          out += json(v).dump();
        } else if constexpr (std::is_same_v<T, Json::Array>) {
          bool scalars = true;
          for (const auto& e : v) {
            if (std::holds_alternative<Json::Array>(e.value) ||
                std::holds_alternative<Json::Object>(e.value)) {
              scalars = false;
            }
          }
          out += '[';
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += scalars ? ", " : ",";
            if (!scalars) out += "\n" + pad;
            dump_to(out, v[i], depth + 1);
          }
          if (!scalars && !v.empty()) out += "\n" + close_pad;
          out += ']';
        } else {
          out += '{';
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += ',';
            out += "\n" + pad + json(v[i].first).dump() + ": ";
            dump_to(out, v[i].second, depth + 1);
          }
          if (!v.empty()) out += "\n" + close_pad;
          out += '}';
        }
      },
      node.value);
}

Eigen::MatrixXd matrix_from_json(const json& node, const std::string& origin,
                                 const std::string& what) {
  if (node.is_number()) return Eigen::MatrixXd::Constant(1, 1, node.get<double>());
  if (!node.is_array() || node.empty()) {
    parse_error(origin, what + " must be a number or a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(node.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = node[static_cast<std::size_t>(r)];
    if (!row.is_array()) parse_error(origin, what + " row is not an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      parse_error(origin, what + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) parse_error(origin, what + " entry is not a number");
      m(r, c) = x.get<double>();
    }
  }
  return m;
}

std::vector<Eigen::MatrixXd> matrices_from_json(const json& node,
                                                const std::string& origin,
                                                const std::string& what) {
  std::vector<Eigen::MatrixXd> out;
  if (node.is_null()) return out;
  if (!node.is_array()) parse_error(origin, what + " must be an array of matrices");
  for (const auto& item : node) out.push_back(matrix_from_json(item, origin, what));
  return out;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) parse_error(origin, "top level must be an object");
    return doc;
  } catch (const json::exception& e) {
    parse_error(origin, e.what());
  }
}

void check_declared_dim(const json& doc, Eigen::Index dim,
                        const std::string& origin) {
  if (!doc.contains("dim")) return;
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() != dim) {
    throw Error(ErrorCode::DimensionMismatch,
                origin + ": declared dim does not match matrices of size " +
                    std::to_string(dim));
  }
}

std::string matrix_json(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += ", ";
    out += '[';
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ", ";
      out += format_double(m(r, c));
    }
    out += ']';
  }
  return out + "]";
}

std::string matrices_json(const std::vector<Eigen::MatrixXd>& ms) {
  std::string out = "[";
  for (std::size_t k = 0; k < ms.size(); ++k) {
    out += k > 0 ? ",\n    " : "\n    ";
    out += matrix_json(ms[k]);
  }
  return out + (ms.empty() ? "]" : "\n  ]");
}

}  // namespace

Json Json::array(const std::vector<double>& xs) {
  Array a;
  a.reserve(xs.size());
  for (double x : xs) a.emplace_back(x);
  return a;
}

Json Json::array(const std::vector<Eigen::Index>& xs) {
  Array a;
  a.reserve(xs.size());
  for (Eigen::Index x : xs) a.emplace_back(static_cast<long long>(x));
  return a;
}

std::string dump(const Json& node) {
  std::string out;
  dump_to(out, node, 0);
  out += '\n';
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json to_json(const DistanceReport& report) {
  return Json::Object{
      {"value", report.value},
      {"squared", report.squared},
      {"n_freq", static_cast<long long>(report.n_freq)},
      {"per_freq_trace", Json::array(report.per_freq_trace)},
      {"alt_gap", Json::array(report.alt_gap)},
      {"commutation_residual", report.commutation_residual},
      {"flooring_count", static_cast<long long>(report.flooring_count)},
      {"is_lower_bound", report.is_lower_bound},
  };
}

Json to_json(const ConvergenceDiagnostic& diag) {
  Json::Array min_eigs;
  Json::Array rows;
  for (std::size_t k = 0; k < diag.horizons.size(); ++k) {
    min_eigs.push_back(Json::Array{diag.min_eigenvalues_x[k], diag.min_eigenvalues_y[k]});
    const TraceLimitRow& row = diag.trace_rows[k];
    rows.push_back(Json::Object{
        {"horizon", static_cast<long long>(row.horizon)},
        {"trace_x", row.trace_x},
        {"trace_y", row.trace_y},
        {"trace_sqrt_product", row.trace_sqrt_product},
    });
  }
  return Json::Object{
      {"horizons", Json::array(diag.horizons)},
      {"per_step_values", Json::array(diag.per_step_values)},
      {"spectral_target", diag.spectral_target},
      {"extrapolated_limit", diag.extrapolated_limit},
      {"extrapolation_model", "L + c/(i+1), empirical"},
      {"converged", diag.converged},
      {"fit_degenerate", diag.fit_degenerate},
      {"truncated", diag.truncated},
      {"min_eigenvalues", std::move(min_eigs)},
      {"trace_rows", std::move(rows)},
  };
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sidecar_path(const std::string& grid_path) { return grid_path + ".json"; }

void write_grid_csv(std::ostream& out, const GridSpectrum& spec) {
  out << "omega_index,row,col,re,im\n";
  for (Eigen::Index l = 0; l < spec.n_freq(); ++l) {
    const HermitianMatrix& v = spec.values[l];
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = 0; c < v.cols(); ++c) {
        out << l << ',' << r << ',' << c << ',' << format_double(v(r, c).real())
            << ',' << format_double(v(r, c).imag()) << '\n';
      }
    }
  }
}

void write_grid(const std::string& path, const GridSpectrum& spec) {
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
  write_grid_csv(csv, spec);
  std::ofstream meta(sidecar_path(path), std::ios::binary);
  if (!meta) throw Error(ErrorCode::FileNotFound, "cannot write " + sidecar_path(path));
  meta << dump(Json::Object{
      {"dim", static_cast<long long>(spec.dim())},
      {"n_freq", static_cast<long long>(spec.n_freq())},
      {"real_symmetry", spec.real_symmetry},
  });
}

GridSpectrum parse_grid_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) parse_error(origin, "empty grid file");
  const auto header = split_csv(line);
  const std::vector<std::string_view> expected{"omega_index", "row", "col", "re", "im"};
  if (header != expected) {
    parse_error(origin, "grid header must be omega_index,row,col,re,im");
  }
  struct Entry {
    long long l, r, c;
    double re, im;
  };
  std::vector<Entry> entries;
  long long max_l = -1, max_r = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    Entry e{};
    if (f.size() != 5 || !parse_index(f[0], e.l) || !parse_index(f[1], e.r) ||
        !parse_index(f[2], e.c) || !parse_number(f[3], e.re) ||
        !parse_number(f[4], e.im) || e.l < 0 || e.r < 0 || e.c < 0) {
      parse_error(origin, "malformed grid row at line " + std::to_string(line_no));
    }
    max_l = std::max(max_l, e.l);
    max_r = std::max({max_r, e.r, e.c});
    entries.push_back(e);
  }
  if (entries.empty()) parse_error(origin, "grid has no entries");
  const Eigen::Index n = max_l + 1;
  const Eigen::Index m = max_r + 1;
  if (static_cast<Eigen::Index>(entries.size()) != n * m * m) {
    parse_error(origin, "expected " + std::to_string(n * m * m) +
                            " grid entries, found " + std::to_string(entries.size()));
  }
  GridSpectrum spec;
  spec.values.assign(static_cast<std::size_t>(n), HermitianMatrix::Zero(m, m));
  std::vector<char> seen(static_cast<std::size_t>(n * m * m), 0);
  for (const Entry& e : entries) {
    const auto slot = static_cast<std::size_t>((e.l * m + e.r) * m + e.c);
    if (seen[slot]) parse_error(origin, "duplicate grid entry");
    seen[slot] = 1;
    spec.values[e.l](e.r, e.c) = {e.re, e.im};
  }
  return spec;
}

GridSpectrum read_grid(const std::string& path) {
  std::istringstream csv(read_file(path));
  GridSpectrum spec = parse_grid_csv(csv, path);
  const std::string meta_path = sidecar_path(path);
  std::ifstream probe(meta_path);
  if (probe) {
    const json meta = parse_json_text(read_file(meta_path), meta_path);
    try {
      if (meta.at("n_freq").get<long long>() != spec.n_freq() ||
          meta.at("dim").get<long long>() != spec.dim()) {
        parse_error(meta_path, "sidecar dim/n_freq disagree with the CSV");
      }
      spec.real_symmetry = meta.value("real_symmetry", false);
    } catch (const json::exception& e) {
      parse_error(meta_path, e.what());
    }
  }
  validate(spec);
  if (spec.real_symmetry) spec.real_symmetry = check_real_symmetry(spec).symmetric;
  return spec;
}

RationalSpectrum parse_rational(const std::string& text, const std::string& origin) {
  const json doc = parse_json_text(text, origin);
  if (!doc.contains("noise_cov")) parse_error(origin, "model needs noise_cov");
  Eigen::MatrixXd q = matrix_from_json(doc["noise_cov"], origin, "noise_cov");
  auto ar = matrices_from_json(doc.value("ar", json()), origin, "ar");
  auto ma = matrices_from_json(doc.value("ma", json()), origin, "ma");
  check_declared_dim(doc, q.rows(), origin);
  return RationalSpectrum(std::move(ar), std::move(ma), std::move(q));
}

RationalSpectrum read_rational(const std::string& path) {
  return parse_rational(read_file(path), path);
}

std::string rational_to_json(const RationalSpectrum& model) {
  return "{\n  \"dim\": " + std::to_string(model.dim()) +
         ",\n  \"ar\": " + matrices_json(model.ar()) +
         ",\n  \"ma\": " + matrices_json(model.ma()) +
         ",\n  \"noise_cov\": " + matrix_json(model.noise_cov()) + "\n}\n";
}

Autocovariance parse_autocov(const std::string& text, const std::string& origin) {
  const json doc = parse_json_text(text, origin);
  if (!doc.contains("lags")) parse_error(origin, "autocovariance needs lags");
  Autocovariance acov{matrices_from_json(doc["lags"], origin, "lags")};
  if (acov.lags.empty()) parse_error(origin, "lags must be nonempty");
  check_declared_dim(doc, acov.dim(), origin);
  validate(acov);
  return acov;
}

Autocovariance read_autocov(const std::string& path) {
  return parse_autocov(read_file(path), path);
}

std::string autocov_to_json(const Autocovariance& acov) {
  return "{\n  \"dim\": " + std::to_string(acov.dim()) +
         ",\n  \"lags\": " + matrices_json(acov.lags) + "\n}\n";
}

TimeSeries parse_timeseries_csv(std::istream& in, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    std::vector<double> row(f.size());
    bool numeric = true;
    for (std::size_t c = 0; c < f.size(); ++c) numeric = numeric && parse_number(f[c], row[c]);
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      parse_error(origin, "non-numeric sample at line " + std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      parse_error(origin, "ragged row at line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_error(origin, "time series has no samples");
  TimeSeries ts;
  ts.samples.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t c = 0; c < rows[t].size(); ++c) {
      ts.samples(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = rows[t][c];
    }
  }
  return ts;
}

TimeSeries read_timeseries(const std::string& path) {
  std::istringstream in(read_file(path));
  return parse_timeseries_csv(in, path);
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& ts) {
  for (Eigen::Index t = 0; t < ts.length(); ++t) {
    for (Eigen::Index c = 0; c < ts.dim(); ++c) {
      if (c > 0) out << ',';
      out << format_double(ts.samples(t, c));
    }
    out << '\n';
  }
}

}  // namespace sw2
