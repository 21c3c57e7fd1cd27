#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "usco/coupling.hpp"
#include "usco/fitting.hpp"
#include "usco/io.hpp"
#include "usco/params.hpp"
#include "usco/polaritons.hpp"
#include "usco/response.hpp"
#include "usco/simulate.hpp"
#include "usco/stability.hpp"
#include "usco/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 ok, 2 config, 3 numerical, 4 I/O.
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string format = "csv";
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usco::ConfigError(path, "cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw usco::ConfigError(path, std::string("JSON parse error: ") + e.what());
  }
  return j;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw usco::IoError("cannot create output directory " + dir);
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw usco::IoError("cannot open output file " + path.string());
  return os;
}

const json& require_field(const json& j, const std::string& key,
                          const std::string& path) {
  if (!j.contains(key)) throw usco::ConfigError(path, "missing");
  return j.at(key);
}

// Frequency grid in Hz: either an explicit array or {start, stop, count}.
std::vector<double> parse_grid(const json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (!x.is_number()) throw usco::ConfigError(path, "array entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  if (!j.is_object())
    throw usco::ConfigError(path, "must be an array or {start, stop, count}");
  for (const char* key : {"start", "stop", "count"})
    if (!j.contains(key)) throw usco::ConfigError(path + "." + key, "missing");
  const double start = j.at("start").get<double>();
  const double stop = j.at("stop").get<double>();
  const auto count = j.at("count").get<std::int64_t>();
  if (count < 1) throw usco::ConfigError(path + ".count", "must be >= 1");
  return usco::linspace(start, stop, static_cast<std::size_t>(count));
}

usco::ModelParams parse_model(const json& config) {
  const usco::ModelParams p = usco::model_params_from_json(
      require_field(config, "model", "model"), "model");
  const usco::Validation v = usco::validate(p);
  if (!v.ok()) throw usco::ValidationError(v.errors);
  return p;
}

void write_spectrum_file(const fs::path& dir, const std::string& stem,
                         const std::string& format,
                         const usco::SpectrumGrid& grid) {
  if (format == "json") {
    auto os = open_out(dir / (stem + ".json"));
    os << usco::to_json(grid).dump(2) << '\n';
  } else {
    auto os = open_out(dir / (stem + ".csv"));
    usco::write_spectrum_csv(os, grid);
  }
}

int cmd_psd(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const usco::ModelParams p = parse_model(config);
  const double x_zpf = config.value("x_zpf", 1.0);
  if (!(x_zpf > 0.0)) throw usco::ConfigError("x_zpf", "must be > 0");
  const std::vector<double> freqs =
      parse_grid(require_field(config, "grid", "grid"), "grid");
  if (freqs.empty()) throw usco::ConfigError("grid", "must be nonempty");

  const fs::path dir = prepare_out_dir(args.out_dir);
  write_spectrum_file(dir, "psd_xx", args.format,
                      usco::eval_psd_grid(p, x_zpf, freqs,
                                          usco::SpectrumKind::mechanical_x));
  if (config.value("include_cavity", false)) {
    write_spectrum_file(dir, "psd_cavity", args.format,
                        usco::eval_psd_grid(p, 1.0, freqs,
                                            usco::SpectrumKind::cavity));
  }
  return 0;
}

int cmd_polaritons(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const usco::ModelParams p = parse_model(config);
  std::vector<double> detunings_hz =
      parse_grid(require_field(config, "detunings", "detunings"), "detunings");
  if (detunings_hz.empty())
    throw usco::ConfigError("detunings", "must be nonempty");
  std::vector<double> detunings;
  detunings.reserve(detunings_hz.size());
  for (double d : detunings_hz) detunings.push_back(usco::hz_to_angular(d));

  const usco::BranchScan scan = usco::detuning_scan(p, detunings);
  const fs::path dir = prepare_out_dir(args.out_dir);
  if (args.format == "json") {
    json j;
    for (std::size_t i = 0; i < scan.detunings.size(); ++i) {
      j["detuning_hz"].push_back(usco::angular_to_hz(scan.detunings[i]));
      j["upper_re_hz"].push_back(usco::angular_to_hz(scan.upper[i].re));
      j["upper_im_hz"].push_back(usco::angular_to_hz(scan.upper[i].im));
      j["lower_re_hz"].push_back(usco::angular_to_hz(scan.lower[i].re));
      j["lower_im_hz"].push_back(usco::angular_to_hz(scan.lower[i].im));
      j["continuous"].push_back(scan.step_ok[i] != 0);
    }
    auto os = open_out(dir / "polaritons.json");
    os << j.dump(2) << '\n';
  } else {
    auto os = open_out(dir / "polaritons.csv");
    usco::write_branch_scan_csv(os, scan);
  }
  return 0;
}

int cmd_stability(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const usco::ModelParams p = parse_model(config);
  usco::StabilityAxes axes;
  for (double d : parse_grid(require_field(config, "detuning_axis", "detuning_axis"),
                             "detuning_axis"))
    axes.detunings.push_back(usco::hz_to_angular(d));
  for (double g : parse_grid(require_field(config, "coupling_axis", "coupling_axis"),
                             "coupling_axis"))
    axes.couplings.push_back(usco::hz_to_angular(g));

  const usco::StabilityMap map = usco::stability_map(axes, p);
  const fs::path dir = prepare_out_dir(args.out_dir);
  {
    auto os = open_out(dir / "stability_grid.csv");
    usco::write_stability_grid_csv(os, map);
  }
  {
    auto os = open_out(dir / "stability_boundary.csv");
    usco::write_stability_boundary_csv(os, map);
  }
  return 0;
}

int cmd_coupling(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const usco::PhysicalSetup setup = usco::physical_setup_from_json(
      require_field(config, "setup", "setup"), "setup");
  for (const std::string& w : usco::validate(setup).warnings)
    std::cerr << "warning: " << w << '\n';

  const json& mech = require_field(config, "omega_mech", "omega_mech");
  if (!mech.is_array() || mech.size() != 3)
    throw usco::ConfigError("omega_mech", "must be [f_x, f_y, f_z] in Hz");
  usco::MechFrequencies omega_mech{
      usco::hz_to_angular(mech[0].get<double>()),
      usco::hz_to_angular(mech[1].get<double>()),
      usco::hz_to_angular(mech[2].get<double>())};

  const usco::CouplingBreakdown breakdown =
      usco::coupling_rates(setup, omega_mech);
  const fs::path dir = prepare_out_dir(args.out_dir);
  {
    auto os = open_out(dir / "coupling.json");
    os << usco::to_json(breakdown).dump(2) << '\n';
  }

  if (config.contains("displacement_scan")) {
    const json& scan = config.at("displacement_scan");
    if (!scan.is_object())
      throw usco::ConfigError("displacement_scan", "must be an object");
    const std::vector<double> z0 = parse_grid(scan, "displacement_scan");
    const double g_ref = usco::hz_to_angular(
        require_field(scan, "g_ref", "displacement_scan.g_ref").get<double>());
    const double z0_ref = scan.value("z0_ref", 0.0);
    const usco::DisplacementCurve curve =
        usco::coupling_vs_displacement(setup, z0, g_ref, z0_ref);
    auto os = open_out(dir / "displacement.csv");
    usco::write_displacement_csv(os, curve, omega_mech.x);
  }
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  const json config = load_config(args.config_path);
  const usco::ModelParams p = parse_model(config);
  const json& sim = require_field(config, "sim", "sim");

  usco::SimConfig cfg;
  cfg.dt = require_field(sim, "dt", "sim.dt").get<double>();
  cfg.duration = require_field(sim, "duration", "sim.duration").get<double>();
  cfg.seed = args.seed;
  cfg.record_stride = sim.value("stride", 1);
  cfg.noise_scale = sim.value("noise_scale", 1.0);
  if (sim.contains("n_bath")) cfg.n_bath = sim.at("n_bath").get<double>();
  if (sim.contains("record")) {
    cfg.record_mechanical = false;
    cfg.record_optical = false;
    for (const auto& r : sim.at("record")) {
      const std::string name = r.get<std::string>();
      if (name == "mechanical") cfg.record_mechanical = true;
      else if (name == "optical") cfg.record_optical = true;
      else throw usco::ConfigError("sim.record", "unknown channel set '" + name + "'");
    }
  }
  if (sim.contains("initial_state")) {
    const auto& init = sim.at("initial_state");
    if (!init.is_array() || init.size() != 4)
      throw usco::ConfigError("sim.initial_state", "must be [Xc, Yc, Xm, Ym]");
    for (std::size_t i = 0; i < 4; ++i)
      cfg.initial_state[i] = init[i].get<double>();
  }

  const usco::TimeTrace trace = usco::simulate_langevin(p, cfg);
  const fs::path dir = prepare_out_dir(args.out_dir);
  {
    auto os = open_out(dir / "trace.bin");
    usco::write_trace(os, trace);
  }
  if (args.format == "csv") {
    auto os = open_out(dir / "trace.csv");
    usco::write_trace_csv(os, trace);
  }

  if (config.contains("welch")) {
    const json& welch = config.at("welch");
    const auto seg =
        require_field(welch, "segment_len", "welch.segment_len").get<std::int64_t>();
    if (seg < 8) throw usco::ConfigError("welch.segment_len", "must be >= 8");
    const double overlap = welch.value("overlap", 0.5);
    const std::string window_name = welch.value("window", "hann");
    usco::Window window;
    if (window_name == "hann") window = usco::Window::hann;
    else if (window_name == "rect") window = usco::Window::rect;
    else throw usco::ConfigError("welch.window", "must be hann or rect");
    for (const std::string& ch : trace.names) {
      const usco::SpectrumGrid psd = usco::welch_psd(
          trace, ch, static_cast<std::size_t>(seg), overlap, window);
      write_spectrum_file(dir, "psd_" + ch, args.format, psd);
    }
  }
  return 0;
}

usco::SpectrumGrid load_spectrum(const std::string& file) {
  const fs::path path(file);
  if (!fs::exists(path)) throw usco::ConfigError(file, "spectrum file does not exist");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usco::IoError("cannot open " + file);
  if (path.extension() == ".json") {
    json j;
    in >> j;
    return usco::spectrum_from_json(j, file);
  }
  return usco::read_spectrum_csv(in);
}

int cmd_fit(const CommonArgs& args) {
  const json config = load_config(args.config_path);

  usco::FitProblem problem;
  problem.base = parse_model(config);

  const json& spectra = require_field(config, "spectra", "spectra");
  if (!spectra.is_array() || spectra.empty())
    throw usco::ConfigError("spectra", "must be a nonempty array");
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const json& entry = spectra[i];
    const std::string path = "spectra[" + std::to_string(i) + "]";
    if (!entry.is_object()) throw usco::ConfigError(path, "must be an object");
    const std::string file =
        require_field(entry, "file", path + ".file").get<std::string>();
    usco::SpectrumMeta meta;
    meta.detuning = usco::hz_to_angular(
        require_field(entry, "detuning", path + ".detuning").get<double>());
    const std::string channel = entry.value("channel", "mechanical_x");
    if (channel == "mechanical_x") meta.kind = usco::ChannelKind::mechanical_x;
    else if (channel == "cavity") meta.kind = usco::ChannelKind::cavity;
    else throw usco::ConfigError(path + ".channel", "must be mechanical_x or cavity");
    problem.spectra.push_back(load_spectrum(file));
    problem.meta.push_back(meta);
  }

  const json free_names = config.value("free", json::array({"g"}));
  for (const auto& name_json : free_names) {
    const std::string name = name_json.get<std::string>();
    usco::ParamSpec spec;
    spec.free = true;
    if (config.contains("init") && config.at("init").contains(name)) {
      double init = config.at("init").at(name).get<double>();
      if (name != "n_bath") init = usco::hz_to_angular(init);
      spec.init = init;
    }
    if (config.contains("bounds") && config.at("bounds").contains(name)) {
      const auto& b = config.at("bounds").at(name);
      if (!b.is_array() || b.size() != 2)
        throw usco::ConfigError("bounds." + name, "must be [lo, hi]");
      spec.lo = b[0].get<double>();
      spec.hi = b[1].get<double>();
      if (name != "n_bath") {
        spec.lo = usco::hz_to_angular(spec.lo);
        spec.hi = usco::hz_to_angular(spec.hi);
      }
    }
    problem.model_params[name] = spec;
  }

  if (config.contains("options")) {
    const json& opts = config.at("options");
    problem.options.max_iterations =
        opts.value("max_iterations", problem.options.max_iterations);
    problem.options.free_detuning = opts.value("free_detuning", false);
    if (opts.contains("detuning_prior_width"))
      problem.options.detuning_prior_width =
          usco::hz_to_angular(opts.at("detuning_prior_width").get<double>());
  }

  if (config.contains("y_channel")) {
    const std::string file = require_field(config.at("y_channel"), "file",
                                           "y_channel.file")
                                 .get<std::string>();
    const auto [y_peak, z_peak] = usco::fit_yz_peaks(load_spectrum(file));
    problem.frozen_y = y_peak;
    problem.frozen_z = z_peak;
  }

  std::string mode = config.value("mode", std::string());
  if (mode.empty()) mode = problem.spectra.size() >= 3 ? "scan" : "single";

  const fs::path dir = prepare_out_dir(args.out_dir);
  usco::FitResult fit;
  if (mode == "scan") {
    const usco::ScanFitResult scan = usco::fit_detuning_scan(problem);
    fit = scan.fit;
    auto os = open_out(dir / "branches.csv");
    usco::write_branch_scan_csv(os, scan.branches);
  } else if (mode == "single") {
    if (problem.spectra.size() != 1)
      throw usco::ConfigError("mode", "single mode requires exactly one spectrum");
    fit = usco::fit_single(problem.spectra[0], problem.meta[0], problem);
  } else {
    throw usco::ConfigError("mode", "must be single or scan");
  }

  {
    json j = usco::to_json(fit);
    // Report frequency-like parameters in Hz on the wire.
    json values_hz, sigma_hz;
    for (const auto& [name, value] : fit.values) {
      const bool dimensionless =
          name == "n_bath" || name.rfind("scale", 0) == 0 ||
          name.rfind("floor", 0) == 0 || name.rfind("amp_", 0) == 0;
      values_hz[name] = dimensionless ? value : usco::angular_to_hz(value);
      sigma_hz[name] =
          dimensionless ? fit.sigma.at(name) : usco::angular_to_hz(fit.sigma.at(name));
    }
    j["values"] = values_hz;
    j["sigma"] = sigma_hz;
    auto os = open_out(dir / "fit.json");
    os << j.dump(2) << '\n';
  }
  {
    auto os = open_out(dir / "residuals.csv");
    usco::write_fit_residuals_csv(os, fit);
  }
  if (!fit.converged) {
    std::cerr << "fit did not converge: " << fit.status << '\n';
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear cavity-optomechanics toolkit: spectra, polariton "
               "branches, stability maps, coupling rates, Langevin "
               "simulation and spectral fits"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*handler)(const CommonArgs&) = nullptr;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON config file")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "random seed");
    sub->add_option("--format", args.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  struct SubSpec {
    const char* name;
    const char* help;
    int (*fn)(const CommonArgs&);
  };
  const SubSpec subs[] = {
      {"psd", "analytic mechanical (and cavity) spectra", cmd_psd},
      {"polaritons", "normal-mode branches over a detuning scan", cmd_polaritons},
      {"stability", "stability grid and critical-coupling boundary", cmd_stability},
      {"coupling", "physical coupling rates from the setup", cmd_coupling},
      {"simulate", "time-domain Langevin simulation", cmd_simulate},
      {"fit", "spectral fits with shared parameters", cmd_fit},
  };
  for (const SubSpec& spec : subs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    add_common(sub);
    sub->callback([&, fn = spec.fn]() { handler = fn; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return handler(args);
  } catch (const usco::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const usco::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const usco::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const usco::Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
