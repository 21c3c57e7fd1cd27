#ifndef USCO_FITTING_HPP
#define USCO_FITTING_HPP

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "usco/params.hpp"
#include "usco/polaritons.hpp"
#include "usco/response.hpp"

namespace usco {

// Peak-normalized Lorentzian: amplitude at the center, amplitude/2 at
// center +- fwhm/2; integral over the axis is amplitude * pi * fwhm / 2.
double lorentzian(double omega, double center, double fwhm, double amplitude);

struct PeakParams {
  double center = 0.0;
  double fwhm = 0.0;
  double amplitude = 0.0;
};

// Forward-detection model of the x channel: the coupled-mode spectrum plus
// the uncoupled y and z peaks riding on a white floor. All frequencies in
// rad/s; the coupled part is psd_xx with x_zpf = 1 times scale.
double three_peak_model(double omega, const ModelParams& x_model, double scale,
                        double floor, const PeakParams& y_peak,
                        const PeakParams& z_peak);

enum class ChannelKind { mechanical_x, cavity };

struct SpectrumMeta {
  double detuning = 0.0;  // rad/s
  ChannelKind kind = ChannelKind::mechanical_x;
};

// One free (or fixed) scalar parameter. init = NaN requests an automatic
// initial value where one is defined (g from peak splitting, scale/floor
// from the data).
struct ParamSpec {
  double init = std::numeric_limits<double>::quiet_NaN();
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool free = false;
  bool shared = true;  // one value across all spectra (model parameters)
};

struct FitOptions {
  int max_iterations = 200;
  int max_backtracks = 40;
  double gradient_tol = 1e-8;       // scaled-gradient infinity norm
  double step_tol = 1e-12;          // relative step size
  double cost_tol = 1e-14;          // relative cost decrease
  double jacobian_rel_step = 1e-6;  // forward-difference step
  // Optional per-spectrum detuning refinement with a quadratic prior of
  // this width around the metadata value. Off by default.
  bool free_detuning = false;
  double detuning_prior_width = 0.0;  // rad/s
};

// Joint fit description. Model parameters are addressed by name:
// "g", "omega_x", "kappa", "gamma", "n_bath". Fixed parameters take their
// values from base; per-spectrum detunings come from the metadata. Every
// spectrum additionally gets free scale and floor nuisance parameters.
struct FitProblem {
  std::vector<SpectrumGrid> spectra;  // one-sided, freqs in Hz
  std::vector<SpectrumMeta> meta;
  ModelParams base;
  std::map<std::string, ParamSpec> model_params;
  ParamSpec scale_spec{};  // applied per spectrum; init NaN = from data
  ParamSpec floor_spec{};
  // Frozen y/z peaks (Hz-axis units) added to mechanical-x channels; the
  // two-stage pipeline fills these from the y-detection channel.
  std::optional<PeakParams> frozen_y;
  std::optional<PeakParams> frozen_z;
  FitOptions options;
};

struct FitResult {
  std::map<std::string, double> values;  // shared names plus scale[i]/floor[i]
  std::map<std::string, double> sigma;   // from the local quadratic model
  double residual_norm = 0.0;            // sqrt of final weighted cost
  int n_iter = 0;
  bool converged = false;
  std::vector<double> per_spectrum_residuals;  // weighted cost per spectrum
  std::vector<double> cost_history;            // accepted costs, non-increasing
  std::string status;
};

// Weighted damped least squares on a single spectrum. Residuals are in
// log-spectrum space (multiplicative periodogram noise, decades of dynamic
// range): r_i = sqrt(w_i) (log model_i - log data_i) with w_i the data
// inverse variance mapped to log space.
FitResult fit_single(const SpectrumGrid& spectrum, const SpectrumMeta& meta,
                     const FitProblem& problem);

// Joint fit over a detuning scan: shared model parameters (typically a
// single coupling rate) plus per-spectrum scale/floor. Needs at least 3
// spectra at distinct detunings. Also reports the polariton branches of
// the fitted parameters over the scanned detunings.
struct ScanFitResult {
  FitResult fit;
  BranchScan branches;
};

ScanFitResult fit_detuning_scan(const FitProblem& problem);

struct Peak {
  double center = 0.0;  // grid-axis units
  double fwhm = 0.0;
};

// Local-maximum detection with parabolic refinement, prominence-ranked.
// Throws PeaksNotFound when fewer than expected_count prominent maxima
// exist.
std::vector<Peak> extract_peak_frequencies(const SpectrumGrid& spectrum,
                                           std::size_t expected_count);

// Stage one of the two-stage pipeline: fit two Lorentzians plus a floor to
// the y-detection channel and return (y_peak, z_peak) with centers/widths
// frozen for the x-channel fit. Axis units follow the grid (Hz).
std::pair<PeakParams, PeakParams> fit_yz_peaks(const SpectrumGrid& y_channel);

namespace least_squares {

struct Options {
  int max_iterations = 200;
  int max_backtracks = 40;
  double gradient_tol = 1e-8;
  double step_tol = 1e-12;
  double cost_tol = 1e-14;
  double jacobian_rel_step = 1e-6;
  double lambda_init = 1e-3;
  double lambda_shrink = 3.0;
  double lambda_grow = 4.0;
};

struct Result {
  Eigen::VectorXd x;
  bool converged = false;
  int n_iter = 0;
  double cost = 0.0;                // 0.5 * ||r||^2
  Eigen::MatrixXd jtj;              // weighted J'J at the solution
  std::vector<double> cost_history; // accepted costs
  std::string status;
};

using ResidualFn =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

// Levenberg-Marquardt with box projection, forward-difference Jacobians
// and a monotone acceptance rule: an accepted step never increases the
// cost. Returns best effort with converged = false when the iteration or
// backtrack budget runs out.
Result minimize(const ResidualFn& residuals, int n_residuals,
                const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                const Eigen::VectorXd& hi, const Options& options);

}  // namespace least_squares

}  // namespace usco

#endif
