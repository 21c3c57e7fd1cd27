#ifndef USCO_POLARITONS_HPP
#define USCO_POLARITONS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "usco/params.hpp"
#include "usco/response.hpp"

namespace usco {

// Hybridized normal-mode pair. For each mode, re is the oscillation
// frequency and im the decay rate (positive = damped).
struct PolaritonPair {
  ComplexFrequency upper;  // larger re at the evaluation point
  ComplexFrequency lower;
};

struct BranchScan {
  std::vector<double> detunings;             // rad/s
  std::vector<ComplexFrequency> upper;
  std::vector<ComplexFrequency> lower;
  std::vector<std::uint8_t> step_ok;         // per point, jump-bound check
  bool continuous = true;                    // all steps ok
};

// Characteristic polynomial whose roots are the normal modes:
//
//   ((lambda^2 - Omega_x^2 + i gamma lambda - gamma^2/4) / (2 Omega_x))
//     * (lambda - Delta + i kappa/2) * (lambda + Delta + i kappa/2)
//   - 2 Delta g^2
//
// This is the exact polynomial equivalent of det M(lambda) = 0: it equals
// det M(lambda) * Pi(lambda) / (2 Omega_x), where Pi is the product of the
// four susceptibility-pole factors. Decaying modes appear as roots in the
// lower half plane (lambda = Delta - i kappa/2 at g = 0).
Complex characteristic_poly(Complex lambda, const ModelParams& p);

// All four roots of the characteristic quartic, raw convention (decaying
// roots have negative imaginary part). Computed by a companion-matrix
// eigenvalue solve on the monic quartic plus Newton polish.
std::array<Complex, 4> quartic_roots(const ModelParams& p);

// Magnitude scale used for root residual tolerances.
double characteristic_scale(const ModelParams& p);

inline constexpr double root_residual_rel_tol = 1e-9;

// The two physical modes: conjugate-pair representatives with re >= 0,
// reported in the decay convention (im = decay rate, positive = stable).
PolaritonPair polariton_modes(const ModelParams& p);

// polariton_modes evaluated per detuning with branches matched by
// nearest-neighbor continuation from the largest-detuning end, where the
// branches approach the bare cavity and mechanical modes.
BranchScan detuning_scan(const ModelParams& base,
                         const std::vector<double>& detunings);

}  // namespace usco

#endif
