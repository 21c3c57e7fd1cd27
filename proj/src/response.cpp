#include "usco/response.hpp"

#include <cmath>

#include "usco/util.hpp"

namespace usco {

namespace {
constexpr Complex I{0.0, 1.0};
}

Complex chi_optical(Complex omega, const ModelParams& p) {
  return 1.0 / (p.kappa / 2.0 - I * (omega - p.detuning));
}

Complex chi_optical_neg_conj(Complex omega, const ModelParams& p) {
  return 1.0 / (p.kappa / 2.0 - I * (omega + p.detuning));
}

Complex chi_mechanical(Complex omega, const ModelParams& p) {
  const Complex den = p.gamma / 2.0 - I * (omega - p.omega_x);
  if (den == Complex(0.0, 0.0))
    throw SingularSusceptibility(
        "mechanical susceptibility pole: gamma = 0 and omega = omega_x");
  return 1.0 / den;
}

Complex chi_mechanical_neg_conj(Complex omega, const ModelParams& p) {
  const Complex den = p.gamma / 2.0 - I * (omega + p.omega_x);
  if (den == Complex(0.0, 0.0))
    throw SingularSusceptibility(
        "mechanical susceptibility pole: gamma = 0 and omega = -omega_x");
  return 1.0 / den;
}

Complex chi_optical_diff(Complex omega, const ModelParams& p) {
  const Complex a = omega - p.detuning + I * (p.kappa / 2.0);
  const Complex b = omega + p.detuning + I * (p.kappa / 2.0);
  return 2.0 * I * p.detuning / (a * b);
}

Complex chi_mechanical_diff(Complex omega, const ModelParams& p) {
  const Complex a = omega - p.omega_x + I * (p.gamma / 2.0);
  const Complex b = omega + p.omega_x + I * (p.gamma / 2.0);
  const Complex den = a * b;
  if (den == Complex(0.0, 0.0))
    throw SingularSusceptibility(
        "mechanical susceptibility pole at this frequency");
  return 2.0 * I * p.omega_x / den;
}

Eigen::Matrix4cd coupling_matrix_at(Complex lambda, const ModelParams& p) {
  const Complex cl = chi_optical(lambda, p);
  const Complex cln = chi_optical_neg_conj(lambda, p);
  const Complex cm = chi_mechanical(lambda, p);
  const Complex cmn = chi_mechanical_neg_conj(lambda, p);
  const Complex ig = I * p.g;

  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  m(0, 2) = ig * cl;
  m(0, 3) = ig * cl;
  m(1, 2) = -ig * cln;
  m(1, 3) = -ig * cln;
  m(2, 0) = ig * cm;
  m(2, 1) = ig * cm;
  m(3, 0) = -ig * cmn;
  m(3, 1) = -ig * cmn;
  return m;
}

CouplingMatrix coupling_matrix(double omega, const ModelParams& p) {
  return CouplingMatrix{coupling_matrix_at(Complex(omega, 0.0), p)};
}

Eigen::Vector4cd solve_response(double omega, const ModelParams& p,
                                const Eigen::Vector4cd& drive) {
  const Eigen::Matrix4cd m = coupling_matrix_at(Complex(omega, 0.0), p);
  const Complex det = m.determinant();
  const double scale = std::pow(m.norm(), 4);
  if (std::abs(det) < singular_det_rel_tol * scale)
    throw SingularAtFrequency("coupling matrix singular at probe frequency",
                              omega);
  return m.partialPivLu().solve(drive);
}

Complex nu(double omega, const ModelParams& p) {
  const Complex w(omega, 0.0);
  const Complex den =
      1.0 + p.g * p.g * chi_optical_diff(w, p) * chi_mechanical_diff(w, p);
  if (std::abs(den) < 1e-14)
    throw SingularAtFrequency("nu(omega) singular at probe frequency", omega);
  return 1.0 / den;
}

double psd_xx(double omega, const ModelParams& p, double x_zpf) {
  const Complex w(omega, 0.0);
  const double nu2 = std::norm(nu(omega, p));
  const double cm_p = std::norm(chi_mechanical(w, p));
  const double cm_m = std::norm(chi_mechanical(Complex(-omega, 0.0), p));
  const double dm = std::norm(chi_mechanical_diff(w, p));
  const double cl_p = std::norm(chi_optical(w, p));
  const double thermal =
      p.gamma * (cm_p * (p.n_bath + 1.0) + cm_m * p.n_bath);
  const double backaction = p.g * p.g * p.kappa * cl_p * dm;
  return x_zpf * x_zpf * nu2 * (thermal + backaction);
}

namespace {

// Raw (non-symmetrized) spectrum of a + a^dag with vacuum optical input.
double cavity_spectrum_raw(double omega, const ModelParams& p) {
  const Complex w(omega, 0.0);
  const double nu2 = std::norm(nu(omega, p));
  const double cl_p = std::norm(chi_optical(w, p));
  const double dl = std::norm(chi_optical_diff(w, p));
  const double cm_p = std::norm(chi_mechanical(w, p));
  const double cm_m = std::norm(chi_mechanical(Complex(-omega, 0.0), p));
  const double mech =
      p.gamma * (cm_p * (p.n_bath + 1.0) + cm_m * p.n_bath);
  return nu2 * (p.kappa * cl_p + p.g * p.g * dl * mech);
}

}  // namespace

double psd_cavity(double omega, const ModelParams& p) {
  return 0.5 * (cavity_spectrum_raw(omega, p) + cavity_spectrum_raw(-omega, p));
}

double psd_xx_one_sided_hz(double f_hz, const ModelParams& p, double x_zpf) {
  return 2.0 * constants::two_pi * psd_xx(hz_to_angular(f_hz), p, x_zpf);
}

double psd_cavity_one_sided_hz(double f_hz, const ModelParams& p) {
  return 2.0 * constants::two_pi * psd_cavity(hz_to_angular(f_hz), p);
}

Validation validate(const SpectrumGrid& grid) {
  Validation v;
  if (grid.freqs.size() != grid.values.size())
    v.errors.push_back({"values", "length must match freqs"});
  if (grid.has_weights() && grid.weights.size() != grid.freqs.size())
    v.errors.push_back({"weights", "length must match freqs"});
  for (std::size_t i = 0; i + 1 < grid.freqs.size(); ++i) {
    if (!(grid.freqs[i] < grid.freqs[i + 1])) {
      v.errors.push_back({"freqs", "must be strictly increasing"});
      break;
    }
  }
  for (double x : grid.values) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      v.errors.push_back({"values", "must be finite and >= 0"});
      break;
    }
  }
  return v;
}

SpectrumGrid eval_psd_grid(const ModelParams& p, double x_zpf,
                           const std::vector<double>& freqs_hz,
                           SpectrumKind kind) {
  require_valid(p);
  SpectrumGrid grid;
  grid.freqs = freqs_hz;
  grid.values.resize(freqs_hz.size());
  parallel_for(freqs_hz.size(), [&](std::size_t i) {
    grid.values[i] = (kind == SpectrumKind::mechanical_x)
                         ? psd_xx_one_sided_hz(freqs_hz[i], p, x_zpf)
                         : psd_cavity_one_sided_hz(freqs_hz[i], p);
  });
  return grid;
}

}  // namespace usco
