#ifndef USCO_STABILITY_HPP
#define USCO_STABILITY_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "usco/params.hpp"

namespace usco {

// Closed-form instability condition for positive detuning: the system is
// unstable when (g/Omega_x)^2 > (1/4) (Delta/Omega_x + kappa^2/(4 Delta Omega_x)).
// Derived for lossless mechanics; exact at gamma = 0. Points within 1e-6
// relative of the critical coupling are classified stable.
// Throws UnsupportedDetuning for Delta <= 0.
bool is_stable_closed_form(const ModelParams& p);

// Critical coupling g_crit(Delta) = Omega_x sqrt((Delta/Omega_x
// + kappa^2/(4 Delta Omega_x)) / 4); reduces to sqrt(Delta Omega_x)/2 at
// kappa = 0. Throws UnsupportedDetuning for delta <= 0. Ignores p.g.
double critical_coupling(double delta, const ModelParams& p);

// Spectral stability: true iff all four characteristic roots decay, i.e.
// every decay rate exceeds -1e-9 * Omega_x. Valid for any detuning sign
// and gamma >= 0; this is the ground truth when gamma > 0.
bool is_stable_spectral(const ModelParams& p);

struct StabilityAxes {
  std::vector<double> detunings;  // rad/s, all > 0
  std::vector<double> couplings;  // rad/s, >= 0
};

struct StabilityMap {
  std::vector<double> detuning_axis;   // rad/s
  std::vector<double> coupling_axis;   // rad/s
  // Row-major grid: stable[i * coupling_axis.size() + j] for
  // (detuning_axis[i], coupling_axis[j]), filled by the closed form.
  std::vector<std::uint8_t> stable;
  // (detuning, g_crit) polyline from critical_coupling.
  std::vector<std::array<double, 2>> boundary;
};

StabilityMap stability_map(const StabilityAxes& axes, const ModelParams& base);

}  // namespace usco

#endif
