#include "usco/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "usco/util.hpp"

namespace usco {

double lorentzian(double omega, double center, double fwhm, double amplitude) {
  if (!(fwhm > 0.0)) throw ValidationError({{"fwhm", "must be > 0"}});
  const double hw = fwhm / 2.0;
  const double d = omega - center;
  return amplitude * hw * hw / (d * d + hw * hw);
}

double three_peak_model(double omega, const ModelParams& x_model, double scale,
                        double floor, const PeakParams& y_peak,
                        const PeakParams& z_peak) {
  double v = scale * psd_xx(omega, x_model, 1.0) + floor;
  if (y_peak.amplitude != 0.0)
    v += lorentzian(omega, y_peak.center, y_peak.fwhm, y_peak.amplitude);
  if (z_peak.amplitude != 0.0)
    v += lorentzian(omega, z_peak.center, z_peak.fwhm, z_peak.amplitude);
  return v;
}

//
// Generic damped least squares.
//

namespace least_squares {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

void numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& r0, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi, double rel_step,
                      Eigen::MatrixXd& jac) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd r1(r0.size());
  Eigen::VectorXd xs = x;
  for (int j = 0; j < n; ++j) {
    double step = rel_step * std::max(std::abs(x[j]), 1e-8);
    // Step inside the box.
    if (x[j] + step > hi[j]) step = -step;
    const double old = xs[j];
    xs[j] = std::min(std::max(old + step, lo[j]), hi[j]);
    const double actual = xs[j] - old;
    if (actual == 0.0) {
      jac.col(j).setZero();
      xs[j] = old;
      continue;
    }
    fn(xs, r1);
    jac.col(j) = (r1 - r0) / actual;
    xs[j] = old;
  }
}

}  // namespace

Result minimize(const ResidualFn& residuals, int n_residuals,
                const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                const Eigen::VectorXd& hi, const Options& options) {
  const int n = static_cast<int>(x0.size());
  if (lo.size() != n || hi.size() != n)
    throw ValidationError({{"bounds", "size mismatch with x0"}});
  for (int j = 0; j < n; ++j) {
    if (!(lo[j] <= x0[j] && x0[j] <= hi[j]))
      throw ValidationError(
          {{"x0[" + std::to_string(j) + "]", "outside bounds"}});
  }

  Result res;
  res.x = x0;
  Eigen::VectorXd r(n_residuals), r_trial(n_residuals);
  Eigen::MatrixXd jac(n_residuals, n);

  residuals(res.x, r);
  double cost = 0.5 * r.squaredNorm();
  res.cost_history.push_back(cost);
  double lambda = options.lambda_init;

  for (res.n_iter = 0; res.n_iter < options.max_iterations; ++res.n_iter) {
    if (cost <= 1e-24) {
      res.converged = true;
      res.status = "cost below floor";
      break;
    }
    numeric_jacobian(residuals, res.x, r, lo, hi, options.jacobian_rel_step,
                     jac);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;

    // Scaled gradient: sensitivity to relative parameter changes.
    double ginf = 0.0;
    for (int j = 0; j < n; ++j)
      ginf = std::max(ginf, std::abs(grad[j]) * std::max(std::abs(res.x[j]), 1.0));
    if (ginf <= options.gradient_tol * std::max(cost, 1.0)) {
      res.converged = true;
      res.status = "gradient below tolerance";
      break;
    }

    Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-30);
    bool accepted = false;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      const Eigen::VectorXd delta = a.ldlt().solve(-grad);
      const Eigen::VectorXd x_trial = clamp(res.x + delta, lo, hi);
      residuals(x_trial, r_trial);
      const double cost_trial = 0.5 * r_trial.squaredNorm();
      if (cost_trial < cost && std::isfinite(cost_trial)) {
        const double decrease = cost - cost_trial;
        const double step_norm = (x_trial - res.x).norm();
        res.x = x_trial;
        r = r_trial;
        cost = cost_trial;
        res.cost_history.push_back(cost);
        lambda = std::max(lambda / options.lambda_shrink, 1e-12);
        accepted = true;
        if (decrease <= options.cost_tol * std::max(cost, 1e-300) &&
            step_norm <= options.step_tol * (res.x.norm() + options.step_tol)) {
          // Stalled on a flat valley; report convergence only if the
          // gradient is also small at a loosened threshold.
          res.converged =
              ginf <= 1e2 * options.gradient_tol * std::max(cost, 1.0);
          res.status = res.converged ? "converged (stalled, small gradient)"
                                     : "stalled without small gradient";
          res.n_iter++;
          goto done;
        }
        break;
      }
      lambda *= options.lambda_grow;
    }
    if (!accepted) {
      res.status = "diverged: no decrease after max backtracks";
      break;
    }
  }
  if (res.status.empty()) res.status = "max iterations reached";

done:
  residuals(res.x, r);
  res.cost = 0.5 * r.squaredNorm();
  numeric_jacobian(residuals, res.x, r, lo, hi, options.jacobian_rel_step,
                   jac);
  res.jtj = jac.transpose() * jac;
  return res;
}

}  // namespace least_squares

//
// Spectrum fitting.
//

namespace {

// Canonical order for shared model parameters.
const char* const kModelParamNames[] = {"g", "omega_x", "kappa", "gamma",
                                        "n_bath"};

double get_model_field(const ModelParams& p, const std::string& name) {
  if (name == "g") return p.g;
  if (name == "omega_x") return p.omega_x;
  if (name == "kappa") return p.kappa;
  if (name == "gamma") return p.gamma;
  if (name == "n_bath") return p.n_bath;
  throw ValidationError({{name, "unknown model parameter"}});
}

void set_model_field(ModelParams& p, const std::string& name, double v) {
  if (name == "g") p.g = v;
  else if (name == "omega_x") p.omega_x = v;
  else if (name == "kappa") p.kappa = v;
  else if (name == "gamma") p.gamma = v;
  else if (name == "n_bath") p.n_bath = v;
  else throw ValidationError({{name, "unknown model parameter"}});
}

struct Packed {
  std::vector<std::string> shared_names;
  std::vector<ChannelKind> kinds;
  std::vector<double> meta_delta;
  bool has_yz = false;
  PeakParams frozen_y, frozen_z;
  bool free_delta = false;
  double prior_width = 0.0;
  int per_spec = 2;  // scale, floor [, amp_y, amp_z][, delta]
  Eigen::VectorXd x0, lo, hi;
  std::vector<std::vector<double>> log_data;  // -inf marks skipped bins
  std::vector<std::vector<double>> sqrt_w;
  int n_residuals = 0;

  int spec_base(int s) const {
    return static_cast<int>(shared_names.size()) + s * per_spec;
  }
};

double auto_g_init(const SpectrumGrid& spectrum, double omega_x) {
  try {
    const auto peaks = extract_peak_frequencies(spectrum, 2);
    const double split_hz = std::abs(peaks[1].center - peaks[0].center);
    const double g0 = hz_to_angular(split_hz) / 2.0;
    if (g0 > 0.0) return g0;
  } catch (const PeaksNotFound&) {
  }
  return 0.1 * omega_x;
}

double spectrum_model_value(double f_hz, const ModelParams& p,
                            ChannelKind kind, double scale, double floor) {
  const double s = kind == ChannelKind::mechanical_x
                       ? psd_xx_one_sided_hz(f_hz, p, 1.0)
                       : psd_cavity_one_sided_hz(f_hz, p);
  return scale * s + floor;
}

Packed pack_problem(const FitProblem& problem,
                    const std::vector<SpectrumGrid>& spectra,
                    const std::vector<SpectrumMeta>& meta) {
  if (spectra.empty())
    throw ValidationError({{"spectra", "must be nonempty"}});
  if (meta.size() != spectra.size())
    throw ValidationError({{"meta", "size must match spectra"}});
  for (const auto& s : spectra) {
    const Validation v = validate(s);
    if (!v.ok()) throw ValidationError(v.errors);
    if (s.freqs.empty())
      throw ValidationError({{"spectra", "a spectrum is empty"}});
  }

  Packed pk;
  pk.free_delta = problem.options.free_detuning;
  pk.prior_width = problem.options.detuning_prior_width;
  if (pk.free_delta && !(pk.prior_width > 0.0))
    throw ValidationError(
        {{"detuning_prior_width", "must be > 0 when detuning is freed"}});
  pk.has_yz = problem.frozen_y.has_value() || problem.frozen_z.has_value();
  if (pk.has_yz) {
    if (!problem.frozen_y || !problem.frozen_z)
      throw ValidationError(
          {{"frozen_y/z", "freeze both peaks or neither"}});
    pk.frozen_y = *problem.frozen_y;
    pk.frozen_z = *problem.frozen_z;
  }
  pk.per_spec = 2 + (pk.has_yz ? 2 : 0) + (pk.free_delta ? 1 : 0);

  for (const auto& m : meta) {
    pk.kinds.push_back(m.kind);
    pk.meta_delta.push_back(m.detuning);
  }

  // Resolve shared model parameters in canonical order.
  std::vector<double> shared_init, shared_lo, shared_hi;
  ModelParams init_params = problem.base;
  for (const char* name : kModelParamNames) {
    auto it = problem.model_params.find(name);
    if (it == problem.model_params.end() || !it->second.free) continue;
    const ParamSpec& spec = it->second;
    double init = spec.init;
    if (std::isnan(init)) {
      init = std::string(name) == "g"
                 ? auto_g_init(spectra.front(), problem.base.omega_x)
                 : get_model_field(problem.base, name);
    }
    double lo = spec.lo, hi = spec.hi;
    if (!std::isfinite(hi)) {
      hi = std::string(name) == "g" ? 1.2 * problem.base.omega_x
                                    : 10.0 * std::max(init, 1e-30);
    }
    if (!std::isfinite(lo)) lo = 0.0;
    if (!(lo <= init && init <= hi))
      throw ValidationError({{name, "initial value outside bounds"}});
    pk.shared_names.push_back(name);
    shared_init.push_back(init);
    shared_lo.push_back(lo);
    shared_hi.push_back(hi);
    set_model_field(init_params, name, init);
  }
  for (const auto& [name, spec] : problem.model_params) {
    bool known = false;
    for (const char* n : kModelParamNames) known |= (name == n);
    if (!known) throw ValidationError({{name, "unknown model parameter"}});
    (void)spec;
  }

  const int n_shared = static_cast<int>(pk.shared_names.size());
  const int n_spec = static_cast<int>(spectra.size());
  const int n_par = n_shared + n_spec * pk.per_spec;
  pk.x0.resize(n_par);
  pk.lo.resize(n_par);
  pk.hi.resize(n_par);
  for (int j = 0; j < n_shared; ++j) {
    pk.x0[j] = shared_init[j];
    pk.lo[j] = shared_lo[j];
    pk.hi[j] = shared_hi[j];
  }

  pk.n_residuals = 0;
  for (int s = 0; s < n_spec; ++s) {
    const SpectrumGrid& grid = spectra[s];
    pk.n_residuals += static_cast<int>(grid.freqs.size());

    // Log data and log-space weights; nonpositive bins are skipped.
    std::vector<double> ld(grid.freqs.size());
    std::vector<double> sw(grid.freqs.size());
    for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
      const double d = grid.values[i];
      if (d > 0.0 && std::isfinite(d)) {
        ld[i] = std::log(d);
        const double w_log =
            grid.has_weights() ? grid.weights[i] * d * d : 1.0;
        sw[i] = std::sqrt(std::max(w_log, 0.0));
      } else {
        ld[i] = -std::numeric_limits<double>::infinity();
        sw[i] = 0.0;
      }
    }
    pk.log_data.push_back(std::move(ld));
    pk.sqrt_w.push_back(std::move(sw));

    // Per-spectrum inits.
    ModelParams p = init_params;
    p.detuning = pk.meta_delta[s];
    double model_max = 0.0;
    double data_max = 0.0, data_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
      model_max = std::max(model_max,
                           spectrum_model_value(grid.freqs[i], p,
                                                pk.kinds[s], 1.0, 0.0));
      data_max = std::max(data_max, grid.values[i]);
      if (grid.values[i] > 0.0) data_min = std::min(data_min, grid.values[i]);
    }
    if (!std::isfinite(data_min)) data_min = 1e-30;
    if (!(data_max > 0.0))
      throw ValidationError({{"spectra", "spectrum has no positive bins"}});

    const int base = pk.spec_base(s);
    int k = 0;
    // scale
    {
      const ParamSpec& sp = problem.scale_spec;
      double init = sp.init;
      if (std::isnan(init)) init = model_max > 0.0 ? data_max / model_max : 1.0;
      double lo = sp.lo, hi = sp.hi;
      if (!std::isfinite(hi)) hi = init * 1e8;
      if (!(lo <= init && init <= hi))
        throw ValidationError({{"scale", "initial value outside bounds"}});
      pk.x0[base + k] = init;
      pk.lo[base + k] = lo;
      pk.hi[base + k] = hi;
      ++k;
    }
    // floor
    {
      const ParamSpec& sp = problem.floor_spec;
      double init = sp.init;
      if (std::isnan(init)) init = std::max(data_min, 1e-9 * data_max);
      double lo = sp.lo, hi = sp.hi;
      if (!std::isfinite(hi)) hi = 10.0 * data_max;
      if (!(lo <= init && init <= hi))
        throw ValidationError({{"floor", "initial value outside bounds"}});
      pk.x0[base + k] = init;
      pk.lo[base + k] = lo;
      pk.hi[base + k] = hi;
      ++k;
    }
    if (pk.has_yz) {
      for (const PeakParams* peak : {&pk.frozen_y, &pk.frozen_z}) {
        // Free amplitude of the frozen peak, seeded from the data level at
        // its center.
        double near = data_max;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
          const double d = std::abs(grid.freqs[i] - peak->center);
          if (d < best) {
            best = d;
            near = grid.values[i];
          }
        }
        pk.x0[base + k] = std::max(near, 1e-9 * data_max);
        pk.lo[base + k] = 0.0;
        pk.hi[base + k] = 10.0 * data_max;
        ++k;
      }
    }
    if (pk.free_delta) {
      pk.x0[base + k] = pk.meta_delta[s];
      pk.lo[base + k] = pk.meta_delta[s] - 10.0 * pk.prior_width;
      pk.hi[base + k] = pk.meta_delta[s] + 10.0 * pk.prior_width;
      ++k;
    }
  }
  if (pk.free_delta) pk.n_residuals += n_spec;
  return pk;
}

least_squares::Options to_ls_options(const FitOptions& opts) {
  least_squares::Options ls;
  ls.max_iterations = opts.max_iterations;
  ls.max_backtracks = opts.max_backtracks;
  ls.gradient_tol = opts.gradient_tol;
  ls.step_tol = opts.step_tol;
  ls.cost_tol = opts.cost_tol;
  ls.jacobian_rel_step = opts.jacobian_rel_step;
  return ls;
}

FitResult run_fit(const FitProblem& problem,
                  const std::vector<SpectrumGrid>& spectra,
                  const std::vector<SpectrumMeta>& meta,
                  ModelParams* fitted_out) {
  Packed pk = pack_problem(problem, spectra, meta);
  const int n_spec = static_cast<int>(spectra.size());
  const ModelParams base = problem.base;

  auto eval_residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    int idx = 0;
    ModelParams shared = base;
    for (std::size_t j = 0; j < pk.shared_names.size(); ++j)
      set_model_field(shared, pk.shared_names[j], x[static_cast<int>(j)]);
    for (int s = 0; s < n_spec; ++s) {
      const SpectrumGrid& grid = spectra[s];
      const int pbase = pk.spec_base(s);
      const double scale = x[pbase];
      const double floor = x[pbase + 1];
      double amp_y = 0.0, amp_z = 0.0;
      if (pk.has_yz) {
        amp_y = x[pbase + 2];
        amp_z = x[pbase + 3];
      }
      ModelParams p = shared;
      p.detuning = pk.free_delta ? x[pbase + pk.per_spec - 1]
                                 : pk.meta_delta[s];
      for (std::size_t i = 0; i < grid.freqs.size(); ++i, ++idx) {
        const double sw = pk.sqrt_w[s][i];
        if (sw == 0.0) {
          r[idx] = 0.0;
          continue;
        }
        double m = spectrum_model_value(grid.freqs[i], p, pk.kinds[s], scale,
                                        floor);
        if (pk.has_yz && pk.kinds[s] == ChannelKind::mechanical_x) {
          m += lorentzian(grid.freqs[i], pk.frozen_y.center, pk.frozen_y.fwhm,
                          amp_y);
          m += lorentzian(grid.freqs[i], pk.frozen_z.center, pk.frozen_z.fwhm,
                          amp_z);
        }
        r[idx] = sw * (std::log(std::max(m, 1e-300)) - pk.log_data[s][i]);
      }
    }
    if (pk.free_delta) {
      for (int s = 0; s < n_spec; ++s, ++idx) {
        const double d = x[pk.spec_base(s) + pk.per_spec - 1];
        r[idx] = (d - pk.meta_delta[s]) / pk.prior_width;
      }
    }
  };

  const least_squares::Result ls = least_squares::minimize(
      eval_residuals, pk.n_residuals, pk.x0, pk.lo, pk.hi,
      to_ls_options(problem.options));

  FitResult out;
  out.converged = ls.converged;
  out.n_iter = ls.n_iter;
  out.residual_norm = std::sqrt(2.0 * ls.cost);
  out.cost_history = ls.cost_history;
  out.status = ls.status;

  // Covariance from the local quadratic model.
  const int n_par = static_cast<int>(ls.x.size());
  Eigen::MatrixXd cov;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ls.jtj);
    const double ev_max = es.eigenvalues().cwiseAbs().maxCoeff();
    const double cutoff = std::max(ev_max, 1e-300) * 1e-14;
    Eigen::VectorXd inv = es.eigenvalues();
    for (int j = 0; j < n_par; ++j)
      inv[j] = es.eigenvalues()[j] > cutoff ? 1.0 / es.eigenvalues()[j] : 0.0;
    cov = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }

  auto put = [&](const std::string& name, int j) {
    out.values[name] = ls.x[j];
    out.sigma[name] = std::sqrt(std::max(cov(j, j), 0.0));
  };
  for (std::size_t j = 0; j < pk.shared_names.size(); ++j)
    put(pk.shared_names[j], static_cast<int>(j));
  for (int s = 0; s < n_spec; ++s) {
    const int pbase = pk.spec_base(s);
    const std::string suffix = "[" + std::to_string(s) + "]";
    put("scale" + suffix, pbase);
    put("floor" + suffix, pbase + 1);
    int k = 2;
    if (pk.has_yz) {
      put("amp_y" + suffix, pbase + k++);
      put("amp_z" + suffix, pbase + k++);
    }
    if (pk.free_delta) put("detuning" + suffix, pbase + k);
  }

  // Per-spectrum weighted cost.
  {
    Eigen::VectorXd r(pk.n_residuals);
    eval_residuals(ls.x, r);
    out.per_spectrum_residuals.assign(n_spec, 0.0);
    int idx = 0;
    for (int s = 0; s < n_spec; ++s) {
      const std::size_t nbins = spectra[s].freqs.size();
      for (std::size_t i = 0; i < nbins; ++i, ++idx)
        out.per_spectrum_residuals[s] += r[idx] * r[idx];
    }
  }

  if (fitted_out) {
    ModelParams fitted = base;
    for (std::size_t j = 0; j < pk.shared_names.size(); ++j)
      set_model_field(fitted, pk.shared_names[j], ls.x[static_cast<int>(j)]);
    *fitted_out = fitted;
  }
  return out;
}

}  // namespace

FitResult fit_single(const SpectrumGrid& spectrum, const SpectrumMeta& meta,
                     const FitProblem& problem) {
  return run_fit(problem, {spectrum}, {meta}, nullptr);
}

ScanFitResult fit_detuning_scan(const FitProblem& problem) {
  if (problem.spectra.size() < 3)
    throw ValidationError(
        {{"spectra", "detuning-scan fit needs at least 3 spectra"}});
  for (std::size_t i = 0; i < problem.meta.size(); ++i)
    for (std::size_t j = i + 1; j < problem.meta.size(); ++j)
      if (problem.meta[i].detuning == problem.meta[j].detuning)
        throw ValidationError({{"meta", "detunings must be distinct"}});

  ScanFitResult out;
  ModelParams fitted;
  out.fit = run_fit(problem, problem.spectra, problem.meta, &fitted);

  std::vector<double> detunings;
  detunings.reserve(problem.meta.size());
  for (const auto& m : problem.meta) detunings.push_back(m.detuning);
  out.branches = detuning_scan(fitted, detunings);
  return out;
}

std::vector<Peak> extract_peak_frequencies(const SpectrumGrid& spectrum,
                                           std::size_t expected_count) {
  const Validation v = validate(spectrum);
  if (!v.ok()) throw ValidationError(v.errors);
  const std::size_t n = spectrum.freqs.size();
  if (n == 0) throw ValidationError({{"spectrum", "must be nonempty"}});

  const std::vector<double>& f = spectrum.freqs;
  const std::vector<double>& y = spectrum.values;

  double vmax = y[0], vmin = y[0];
  for (double yi : y) {
    vmax = std::max(vmax, yi);
    vmin = std::min(vmin, yi);
  }
  const double prom_floor = 0.05 * (vmax - vmin);

  struct Candidate {
    std::size_t i;
    double prominence;
    double base;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
    // Prominence: descend on each side until higher ground or the edge;
    // the base on each side is the minimum along the walk.
    double left_min = y[i];
    for (std::size_t j = i; j-- > 0;) {
      left_min = std::min(left_min, y[j]);
      if (y[j] > y[i]) break;
    }
    double right_min = y[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      right_min = std::min(right_min, y[j]);
      if (y[j] > y[i]) break;
    }
    const double base = std::max(left_min, right_min);
    const double prom = y[i] - base;
    if (prom >= prom_floor && prom > 0.0) cands.push_back({i, prom, base});
  }

  if (cands.size() < expected_count)
    throw PeaksNotFound("found " + std::to_string(cands.size()) +
                            " prominent maxima, expected " +
                            std::to_string(expected_count),
                        cands.size(), expected_count);

  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.prominence > b.prominence;
            });
  cands.resize(expected_count);
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.i < b.i; });

  std::vector<Peak> peaks;
  peaks.reserve(cands.size());
  for (const Candidate& c : cands) {
    const std::size_t i = c.i;
    // Parabolic refinement on the log values.
    const double ym = std::log(std::max(y[i - 1], 1e-300));
    const double y0 = std::log(std::max(y[i], 1e-300));
    const double yp = std::log(std::max(y[i + 1], 1e-300));
    const double den = ym - 2.0 * y0 + yp;
    double offset = 0.0;
    if (den < 0.0) offset = 0.5 * (ym - yp) / den;
    offset = std::min(std::max(offset, -0.5), 0.5);
    const double df = 0.5 * (f[i + 1] - f[i - 1]);
    const double center = f[i] + offset * df;

    // Width at half prominence, linear interpolation on the crossings.
    const double half = y[i] - 0.5 * c.prominence;
    double left = f[i], right = f[i];
    bool left_ok = false, right_ok = false;
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] <= half) {
        const double t = (y[j + 1] - half) / (y[j + 1] - y[j]);
        left = f[j + 1] + t * (f[j] - f[j + 1]);
        left_ok = true;
        break;
      }
      if (y[j] > y[i]) break;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (y[j] <= half) {
        const double t = (y[j - 1] - half) / (y[j - 1] - y[j]);
        right = f[j - 1] + t * (f[j] - f[j - 1]);
        right_ok = true;
        break;
      }
      if (y[j] > y[i]) break;
    }
    double fwhm;
    if (left_ok && right_ok) fwhm = right - left;
    else if (left_ok) fwhm = 2.0 * (center - left);
    else if (right_ok) fwhm = 2.0 * (right - center);
    else fwhm = 2.0 * df;
    peaks.push_back({center, fwhm});
  }
  return peaks;
}

std::pair<PeakParams, PeakParams> fit_yz_peaks(const SpectrumGrid& y_channel) {
  const auto seeds = extract_peak_frequencies(y_channel, 2);
  // Lower frequency peak is the z motion, higher is the y motion.
  const Peak& z_seed = seeds[0];
  const Peak& y_seed = seeds[1];

  double data_max = 0.0;
  double data_min = std::numeric_limits<double>::infinity();
  for (double v : y_channel.values) {
    data_max = std::max(data_max, v);
    if (v > 0.0) data_min = std::min(data_min, v);
  }
  if (!std::isfinite(data_min)) data_min = 1e-30;
  const double span = y_channel.freqs.back() - y_channel.freqs.front();

  auto value_near = [&](double f0) {
    double best = std::numeric_limits<double>::infinity();
    double val = data_max;
    for (std::size_t i = 0; i < y_channel.freqs.size(); ++i) {
      const double d = std::abs(y_channel.freqs[i] - f0);
      if (d < best) {
        best = d;
        val = y_channel.values[i];
      }
    }
    return val;
  };

  // Parameters: (center_z, fwhm_z, amp_z, center_y, fwhm_y, amp_y, floor).
  Eigen::VectorXd x0(7), lo(7), hi(7);
  const double df = span / static_cast<double>(y_channel.freqs.size());
  x0 << z_seed.center, std::max(z_seed.fwhm, 2.0 * df), value_near(z_seed.center),
      y_seed.center, std::max(y_seed.fwhm, 2.0 * df), value_near(y_seed.center),
      std::max(data_min, 1e-9 * data_max);
  lo << y_channel.freqs.front(), df, 0.0, y_channel.freqs.front(), df, 0.0, 0.0;
  hi << y_channel.freqs.back(), span, 10.0 * data_max, y_channel.freqs.back(),
      span, 10.0 * data_max, 10.0 * data_max;

  const int n = static_cast<int>(y_channel.freqs.size());
  auto res_fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    for (int i = 0; i < n; ++i) {
      const double f = y_channel.freqs[static_cast<std::size_t>(i)];
      const double d = y_channel.values[static_cast<std::size_t>(i)];
      if (!(d > 0.0)) {
        r[i] = 0.0;
        continue;
      }
      const double m = lorentzian(f, x[0], x[1], x[2]) +
                       lorentzian(f, x[3], x[4], x[5]) + x[6];
      r[i] = std::log(std::max(m, 1e-300)) - std::log(d);
    }
  };
  least_squares::Options opts;
  const auto ls = least_squares::minimize(res_fn, n, x0, lo, hi, opts);

  PeakParams z{ls.x[0], ls.x[1], ls.x[2]};
  PeakParams y{ls.x[3], ls.x[4], ls.x[5]};
  return {y, z};
}

}  // namespace usco
