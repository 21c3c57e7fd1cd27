#ifndef USCO_PARAMS_HPP
#define USCO_PARAMS_HPP

#include <array>
#include <string>
#include <vector>

#include "usco/errors.hpp"

namespace usco {

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double eps0 = 8.8541878128e-12;       // F/m
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
}  // namespace constants

// Unit convention: every frequency inside the library is angular (rad/s).
// File and CLI I/O is in ordinary frequency (Hz); these two functions are
// the single conversion boundary.
inline double hz_to_angular(double f_hz) { return constants::two_pi * f_hz; }
inline double angular_to_hz(double omega) { return omega / constants::two_pi; }

// Phenomenological parameters of the coupled cavity/oscillator pair.
// kappa and gamma are FULL widths; the susceptibilities use kappa/2 and
// gamma/2. Mixing up half and full widths is the classic error in this
// kind of code, hence the explicit note.
struct ModelParams {
  double omega_x = 0.0;   // bare mechanical frequency, rad/s (> 0)
  double detuning = 0.0;  // cavity detuning Delta, rad/s (any sign)
  double kappa = 0.0;     // full cavity linewidth, rad/s (> 0)
  double gamma = 0.0;     // full mechanical damping, rad/s (>= 0)
  double g = 0.0;         // coupling rate, rad/s (>= 0)
  double n_bath = 0.0;    // mean bath phonon occupation (>= 0)
};

// Lab-level description of the tweezer/cavity geometry from which coupling
// rates are derived. Lengths in meters, power in watts, density in kg/m^3.
struct PhysicalSetup {
  double wavelength = 1064e-9;
  double tweezer_power = 0.0;
  double waist_x = 0.0;  // tweezer waist along the cavity axis
  double waist_y = 0.0;
  double cavity_waist = 0.0;
  double cavity_length = 0.0;
  double radius = 0.0;               // particle radius
  double density = 1850.0;           // silica default
  double rel_permittivity = 2.1;     // silica default
  double pol_angle = constants::pi / 2;  // theta; pi/2 = polarization orthogonal to cavity axis
  // Mean particle position (x0, y0, z0). x0 is measured along the cavity
  // axis from a field antinode, so k*x0 = pi/2 puts the particle at the
  // node. y0, z0 are transverse offsets from the cavity axis.
  std::array<double, 3> position{0.0, 0.0, 0.0};
  // Effective trap waist ratios W_x/w_x, W_y/w_y at the displaced
  // equilibrium position (radiation pressure pushes the particle along the
  // tweezer axis). 1 means the particle sits at the tweezer focus.
  double trap_waist_scale_x = 1.0;
  double trap_waist_scale_y = 1.0;
};

// Complex mode frequency. re is the oscillation frequency, im the decay
// rate; im > 0 means a damped (stable) mode.
struct ComplexFrequency {
  double re = 0.0;  // rad/s
  double im = 0.0;  // rad/s
};

struct Validation {
  std::vector<InvalidParameter> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Particles larger than this fraction of the wavelength get a
// dipole-approximation warning.
inline constexpr double dipole_warning_radius_fraction = 0.15;

Validation validate(const ModelParams& p);
Validation validate(const PhysicalSetup& s);

// Throwing variants for call sites that cannot proceed on bad input.
void require_valid(const ModelParams& p);
void require_valid(const PhysicalSetup& s);

}  // namespace usco

#endif
