#ifndef USCO_RESPONSE_HPP
#define USCO_RESPONSE_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "usco/params.hpp"

namespace usco {

using Complex = std::complex<double>;

// Optical susceptibility chi_l(w) = 1 / (kappa/2 - i (w - Delta)).
Complex chi_optical(Complex omega, const ModelParams& p);

// Mechanical susceptibility chi_m(w) = 1 / (gamma/2 - i (w - Omega_x)).
// Throws SingularSusceptibility when gamma = 0 and w = Omega_x.
Complex chi_mechanical(Complex omega, const ModelParams& p);

// Analytic continuations of conj(chi(-w)). For real w these equal the
// plain conjugate-reflected susceptibilities that appear in the coupled
// equations; as functions of complex w they stay holomorphic.
Complex chi_optical_neg_conj(Complex omega, const ModelParams& p);
Complex chi_mechanical_neg_conj(Complex omega, const ModelParams& p);

// Cancellation-free closed forms of chi(w) - conj(chi(-w)):
//   optical:    2i*Delta   / ((w - Delta   + i kappa/2) (w + Delta   + i kappa/2))
//   mechanical: 2i*Omega_x / ((w - Omega_x + i gamma/2) (w + Omega_x + i gamma/2))
Complex chi_optical_diff(Complex omega, const ModelParams& p);
Complex chi_mechanical_diff(Complex omega, const ModelParams& p);

// 4x4 coupling matrix acting on (a, a^dag, b, b^dag) at probe frequency w.
struct CouplingMatrix {
  Eigen::Matrix4cd entries;
};

CouplingMatrix coupling_matrix(double omega, const ModelParams& p);

// Continuation of the coupling matrix to complex frequency; used by the
// polariton solver and by cross-checks against the characteristic
// polynomial.
Eigen::Matrix4cd coupling_matrix_at(Complex lambda, const ModelParams& p);

// Relative determinant threshold below which a probe frequency is reported
// singular instead of returning an amplified solve.
inline constexpr double singular_det_rel_tol = 1e-12;

// Solves M(w) x = drive. Throws SingularAtFrequency when
// |det M| < singular_det_rel_tol * norm(M)^4.
Eigen::Vector4cd solve_response(double omega, const ModelParams& p,
                                const Eigen::Vector4cd& drive);

// nu(w) = 1 / (1 + g^2 (chi_l(w) - chi_l*(-w)) (chi_m(w) - chi_m*(-w))),
// the reciprocal of det M(w).
Complex nu(double omega, const ModelParams& p);

// Two-sided mechanical displacement spectrum in angular frequency:
//   S_xx(w) = x_zpf^2 |nu|^2 [ gamma |chi_m(w)|^2 (N+1)
//                            + gamma |chi_m(-w)|^2 N
//                            + g^2 kappa |chi_l(w)|^2 |chi_m(w)-chi_m*(-w)|^2 ]
// Units m^2 s / rad when x_zpf is in meters.
double psd_xx(double omega, const ModelParams& p, double x_zpf);

// Symmetrized two-sided spectrum of the intracavity amplitude quadrature
// a + a^dag, with vacuum optical input and thermal mechanical input at
// n_bath. Arbitrary units.
double psd_cavity(double omega, const ModelParams& p);

// One-sided exports in ordinary frequency: S_one(f) = 2 * 2pi * S_two(2 pi f).
double psd_xx_one_sided_hz(double f_hz, const ModelParams& p, double x_zpf);
double psd_cavity_one_sided_hz(double f_hz, const ModelParams& p);

// Sampled one-sided spectrum. freqs in Hz, strictly increasing; values >= 0;
// weights are optional inverse variances of the values (empty = none).
struct SpectrumGrid {
  std::vector<double> freqs;
  std::vector<double> values;
  std::vector<double> weights;
  bool has_weights() const { return !weights.empty(); }
};

Validation validate(const SpectrumGrid& grid);

enum class SpectrumKind { mechanical_x, cavity };

// Evaluates the analytic one-sided spectrum on a frequency grid (Hz).
SpectrumGrid eval_psd_grid(const ModelParams& p, double x_zpf,
                           const std::vector<double>& freqs_hz,
                           SpectrumKind kind);

}  // namespace usco

#endif
