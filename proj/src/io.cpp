#include "usco/io.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "usco/util.hpp"

namespace usco {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_num(const std::string& cell, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw IoError("cannot parse number '" + cell + "' in " + what);
  }
}

// Little-endian primitives; explicit byte order keeps the trace format
// portable.
template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  using U = std::make_unsigned_t<T>;
  U u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw IoError("unexpected end of trace stream");
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    u |= static_cast<U>(buf[i]) << (8 * i);
  return static_cast<T>(u);
}

void write_f64_le(std::ostream& os, double value) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  write_le<std::uint64_t>(os, bits);
}

double read_f64_le(std::istream& is) {
  const std::uint64_t bits = read_le<std::uint64_t>(is);
  double value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

void write_fixed_string(std::ostream& os, const std::string& s,
                        std::size_t width) {
  std::string buf = s.substr(0, width);
  buf.resize(width, '\0');
  os.write(buf.data(), static_cast<std::streamsize>(width));
}

std::string read_fixed_string(std::istream& is, std::size_t width) {
  std::string buf(width, '\0');
  is.read(buf.data(), static_cast<std::streamsize>(width));
  if (!is) throw IoError("unexpected end of trace stream");
  const std::size_t end = buf.find('\0');
  return end == std::string::npos ? buf : buf.substr(0, end);
}

constexpr char kTraceMagic[8] = {'U', 'S', 'C', 'O', 'T', 'R', 'C', '1'};

double require_num(const nlohmann::json& j, const std::string& key,
                   const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + key, "missing");
  if (!j.at(key).is_number())
    throw ConfigError(path + key, "must be a number");
  return j.at(key).get<double>();
}

double optional_num(const nlohmann::json& j, const std::string& key,
                    const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError(path + key, "must be a number");
  return j.at(key).get<double>();
}

}  // namespace

void write_spectrum_csv(std::ostream& os, const SpectrumGrid& grid) {
  os << "freq_hz,psd,weight\n";
  for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
    os << fmt_sci(grid.freqs[i]) << ',' << fmt_sci(grid.values[i]) << ',';
    if (grid.has_weights()) os << fmt_sci(grid.weights[i]);
    os << '\n';
  }
}

SpectrumGrid read_spectrum_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty spectrum CSV");
  // Tolerate a UTF-8 BOM and both 2- and 3-column headers.
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xef)
    line = line.substr(3);
  if (line.rfind("freq_hz,psd", 0) != 0)
    throw IoError("spectrum CSV must start with header freq_hz,psd[,weight]");

  SpectrumGrid grid;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < 2)
      throw IoError("spectrum CSV line " + std::to_string(lineno) +
                    ": expected at least 2 columns");
    grid.freqs.push_back(parse_num(cells[0], "spectrum CSV freq_hz"));
    grid.values.push_back(parse_num(cells[1], "spectrum CSV psd"));
    if (cells.size() >= 3 && !cells[2].empty())
      grid.weights.push_back(parse_num(cells[2], "spectrum CSV weight"));
  }
  if (!grid.weights.empty() && grid.weights.size() != grid.freqs.size())
    throw IoError("spectrum CSV: weight column must be complete or empty");
  const Validation v = validate(grid);
  if (!v.ok()) throw IoError("spectrum CSV: " + ValidationError::join(v.errors));
  return grid;
}

void write_branch_scan_csv(std::ostream& os, const BranchScan& scan) {
  os << "detuning_hz,upper_re_hz,upper_im_hz,lower_re_hz,lower_im_hz,"
        "continuous\n";
  for (std::size_t i = 0; i < scan.detunings.size(); ++i) {
    os << fmt_sci(angular_to_hz(scan.detunings[i])) << ','
       << fmt_sci(angular_to_hz(scan.upper[i].re)) << ','
       << fmt_sci(angular_to_hz(scan.upper[i].im)) << ','
       << fmt_sci(angular_to_hz(scan.lower[i].re)) << ','
       << fmt_sci(angular_to_hz(scan.lower[i].im)) << ','
       << (scan.step_ok[i] ? 1 : 0) << '\n';
  }
}

void write_stability_grid_csv(std::ostream& os, const StabilityMap& map) {
  os << "detuning_hz,g_hz,stable\n";
  const std::size_t ng = map.coupling_axis.size();
  for (std::size_t i = 0; i < map.detuning_axis.size(); ++i) {
    for (std::size_t j = 0; j < ng; ++j) {
      os << fmt_sci(angular_to_hz(map.detuning_axis[i])) << ','
         << fmt_sci(angular_to_hz(map.coupling_axis[j])) << ','
         << (map.stable[i * ng + j] ? 1 : 0) << '\n';
    }
  }
}

void write_stability_boundary_csv(std::ostream& os, const StabilityMap& map) {
  os << "detuning_hz,g_crit_hz\n";
  for (const auto& point : map.boundary) {
    os << fmt_sci(angular_to_hz(point[0])) << ','
       << fmt_sci(angular_to_hz(point[1])) << '\n';
  }
}

void write_displacement_csv(std::ostream& os, const DisplacementCurve& curve,
                            double omega_x) {
  os << "z0_m,g_hz,g_over_omega\n";
  for (std::size_t i = 0; i < curve.z0.size(); ++i) {
    os << fmt_sci(curve.z0[i]) << ',' << fmt_sci(angular_to_hz(curve.g[i]))
       << ',' << fmt_sci(curve.g[i] / omega_x) << '\n';
  }
}

void write_trace_csv(std::ostream& os, const TimeTrace& trace) {
  os << "t_s";
  for (const auto& name : trace.names) os << ',' << name;
  os << '\n';
  const std::size_t n = trace.length();
  for (std::size_t i = 0; i < n; ++i) {
    os << fmt_sci(static_cast<double>(i) * trace.dt);
    for (const auto& ch : trace.channels) os << ',' << fmt_sci(ch[i]);
    os << '\n';
  }
}

void write_trace(std::ostream& os, const TimeTrace& trace) {
  os.write(kTraceMagic, sizeof(kTraceMagic));
  write_le<std::uint32_t>(os, 1);  // version
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(trace.names.size()));
  write_le<std::uint64_t>(os, trace.length());
  write_f64_le(os, trace.dt);
  write_le<std::uint64_t>(os, trace.seed);
  write_fixed_string(os, trace.generator, 32);
  for (const auto& name : trace.names) write_fixed_string(os, name, 16);
  const std::size_t n = trace.length();
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& ch : trace.channels) write_f64_le(os, ch[i]);
  if (!os) throw IoError("failed writing trace stream");
}

TimeTrace read_trace(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0)
    throw IoError("not a trace stream (bad magic)");
  const std::uint32_t version = read_le<std::uint32_t>(is);
  if (version != 1)
    throw IoError("unsupported trace version " + std::to_string(version));
  const std::uint32_t n_channels = read_le<std::uint32_t>(is);
  const std::uint64_t n_samples = read_le<std::uint64_t>(is);

  TimeTrace trace;
  trace.dt = read_f64_le(is);
  trace.seed = read_le<std::uint64_t>(is);
  trace.generator = read_fixed_string(is, 32);
  for (std::uint32_t c = 0; c < n_channels; ++c)
    trace.names.push_back(read_fixed_string(is, 16));
  trace.channels.assign(n_channels, {});
  for (auto& ch : trace.channels) ch.reserve(n_samples);
  for (std::uint64_t i = 0; i < n_samples; ++i)
    for (std::uint32_t c = 0; c < n_channels; ++c)
      trace.channels[c].push_back(read_f64_le(is));
  return trace;
}

nlohmann::json to_json(const ModelParams& p) {
  return nlohmann::json{{"omega_x", angular_to_hz(p.omega_x)},
                        {"detuning", angular_to_hz(p.detuning)},
                        {"kappa", angular_to_hz(p.kappa)},
                        {"gamma", angular_to_hz(p.gamma)},
                        {"g", angular_to_hz(p.g)},
                        {"n_bath", p.n_bath}};
}

ModelParams model_params_from_json(const nlohmann::json& j,
                                   const std::string& path_prefix) {
  const std::string path = path_prefix.empty() ? "" : path_prefix + ".";
  if (!j.is_object()) throw ConfigError(path_prefix, "must be an object");
  ModelParams p;
  p.omega_x = hz_to_angular(require_num(j, "omega_x", path));
  p.detuning = hz_to_angular(require_num(j, "detuning", path));
  p.kappa = hz_to_angular(require_num(j, "kappa", path));
  p.gamma = hz_to_angular(require_num(j, "gamma", path));
  p.g = hz_to_angular(require_num(j, "g", path));
  p.n_bath = optional_num(j, "n_bath", path, 0.0);
  return p;
}

nlohmann::json to_json(const PhysicalSetup& s) {
  return nlohmann::json{{"wavelength", s.wavelength},
                        {"tweezer_power", s.tweezer_power},
                        {"waist_x", s.waist_x},
                        {"waist_y", s.waist_y},
                        {"cavity_waist", s.cavity_waist},
                        {"cavity_length", s.cavity_length},
                        {"radius", s.radius},
                        {"density", s.density},
                        {"rel_permittivity", s.rel_permittivity},
                        {"pol_angle", s.pol_angle},
                        {"position", s.position},
                        {"trap_waist_scale_x", s.trap_waist_scale_x},
                        {"trap_waist_scale_y", s.trap_waist_scale_y}};
}

PhysicalSetup physical_setup_from_json(const nlohmann::json& j,
                                       const std::string& path_prefix) {
  const std::string path = path_prefix.empty() ? "" : path_prefix + ".";
  if (!j.is_object()) throw ConfigError(path_prefix, "must be an object");
  PhysicalSetup s;
  s.wavelength = require_num(j, "wavelength", path);
  s.tweezer_power = require_num(j, "tweezer_power", path);
  s.waist_x = require_num(j, "waist_x", path);
  s.waist_y = require_num(j, "waist_y", path);
  s.cavity_waist = require_num(j, "cavity_waist", path);
  s.cavity_length = require_num(j, "cavity_length", path);
  s.radius = require_num(j, "radius", path);
  s.density = optional_num(j, "density", path, s.density);
  s.rel_permittivity =
      optional_num(j, "rel_permittivity", path, s.rel_permittivity);
  s.pol_angle = optional_num(j, "pol_angle", path, s.pol_angle);
  if (j.contains("position")) {
    const auto& pos = j.at("position");
    if (!pos.is_array() || pos.size() != 3)
      throw ConfigError(path + "position", "must be an array of 3 numbers");
    for (int i = 0; i < 3; ++i) {
      if (!pos[static_cast<std::size_t>(i)].is_number())
        throw ConfigError(path + "position", "must be an array of 3 numbers");
      s.position[static_cast<std::size_t>(i)] =
          pos[static_cast<std::size_t>(i)].get<double>();
    }
  }
  s.trap_waist_scale_x =
      optional_num(j, "trap_waist_scale_x", path, s.trap_waist_scale_x);
  s.trap_waist_scale_y =
      optional_num(j, "trap_waist_scale_y", path, s.trap_waist_scale_y);
  return s;
}

nlohmann::json to_json(const SpectrumGrid& grid) {
  nlohmann::json j{{"freq_hz", grid.freqs}, {"psd", grid.values}};
  if (grid.has_weights()) j["weight"] = grid.weights;
  return j;
}

SpectrumGrid spectrum_from_json(const nlohmann::json& j,
                                const std::string& path_prefix) {
  const std::string path = path_prefix.empty() ? "" : path_prefix + ".";
  auto read_array = [&](const char* key, bool required) {
    std::vector<double> out;
    if (!j.contains(key)) {
      if (required) throw ConfigError(path + key, "missing");
      return out;
    }
    if (!j.at(key).is_array())
      throw ConfigError(path + key, "must be an array of numbers");
    for (const auto& x : j.at(key)) {
      if (!x.is_number())
        throw ConfigError(path + key, "must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  };
  SpectrumGrid grid;
  grid.freqs = read_array("freq_hz", true);
  grid.values = read_array("psd", true);
  grid.weights = read_array("weight", false);
  const Validation v = validate(grid);
  if (!v.ok())
    throw ConfigError(path_prefix, ValidationError::join(v.errors));
  return grid;
}

nlohmann::json to_json(const CouplingBreakdown& b) {
  return nlohmann::json{{"g_x", angular_to_hz(b.g_x)},
                        {"g_y", angular_to_hz(b.g_y)},
                        {"g_z", angular_to_hz(b.g_z)},
                        {"dispersive_drive", angular_to_hz(b.dispersive_drive)},
                        {"E_d", angular_to_hz(b.E_d)},
                        {"f_geom", b.f_geom},
                        {"x_zpf", b.x_zpf},
                        {"y_zpf", b.y_zpf},
                        {"z_zpf", b.z_zpf},
                        {"eps_cav", b.eps_cav},
                        {"eps_tw", b.eps_tw},
                        {"alpha", b.alpha},
                        {"k", b.k},
                        {"z_R", b.z_R},
                        {"V_cav", b.V_cav},
                        {"mass", b.mass},
                        {"dipole_warning", b.dipole_warning}};
}

nlohmann::json to_json(const FitResult& r) {
  return nlohmann::json{{"values", r.values},
                        {"sigma", r.sigma},
                        {"residual_norm", r.residual_norm},
                        {"n_iter", r.n_iter},
                        {"converged", r.converged},
                        {"status", r.status},
                        {"per_spectrum_residuals", r.per_spectrum_residuals}};
}

void write_fit_residuals_csv(std::ostream& os, const FitResult& result) {
  os << "spectrum,residual\n";
  for (std::size_t i = 0; i < result.per_spectrum_residuals.size(); ++i)
    os << i << ',' << fmt_sci(result.per_spectrum_residuals[i]) << '\n';
}

}  // namespace usco
