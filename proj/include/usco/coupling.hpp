#ifndef USCO_COUPLING_HPP
#define USCO_COUPLING_HPP

#include <cstdint>
#include <vector>

#include "usco/params.hpp"

namespace usco {

struct MechFrequencies {
  double x = 0.0;  // rad/s
  double y = 0.0;
  double z = 0.0;
};

// Physical coupling rates and the intermediate quantities they are built
// from. Frequencies in rad/s, fields in V/m, lengths in meters.
struct CouplingBreakdown {
  double g_x = 0.0;
  double g_y = 0.0;
  double g_z = 0.0;
  double dispersive_drive = 0.0;  // rad/s, cavity drive at the mean position
  double f_geom = 1.0;            // geometric reduction factor, (0, 1]
  double x_zpf = 0.0, y_zpf = 0.0, z_zpf = 0.0;  // m
  double E_d = 0.0;      // rad/s, coherent-scattering drive amplitude
  double eps_cav = 0.0;  // V/m, single-photon cavity field
  double eps_tw = 0.0;   // V/m, tweezer focal field
  double alpha = 0.0;    // F m^2, particle polarizability
  double k = 0.0;        // 1/m, wave number
  double z_R = 0.0;      // m, Rayleigh range
  double V_cav = 0.0;    // m^3, cavity mode volume (pi w^2 L / 4)
  double mass = 0.0;     // kg
  bool dipole_warning = false;  // radius beyond the dipole-validity bound
};

// Scalar quantities derived from the setup: mass, zero-point fluctuations,
// wave number, Rayleigh range, fields, polarizability, mode volume and the
// drive amplitude at the setup's polarization angle. Coupling rates are
// left at zero. omega_cav = 0 selects 2 pi c / wavelength.
CouplingBreakdown derived_fields(const PhysicalSetup& s,
                                 const MechFrequencies& omega_mech,
                                 double omega_cav = 0.0);

// f(d) = exp(-(y0^2 + z0^2)/w_cav^2) / sqrt(scale_x * scale_y); equals 1 at
// the cavity axis with the particle at the tweezer focus.
double geometric_factor(const PhysicalSetup& s);

// Full coupling-rate breakdown at the setup's mean position:
//   g_x = E_d k x_zpf sin(theta) sin(k x0) f(d)
//   g_y = E_d k y_zpf cos(theta) sin(k x0) f(d)
//   g_z = E_d (k - 1/z_R) z_zpf cos(k x0) f(d)
//   dispersive_drive = E_d cos(k x0)
CouplingBreakdown coupling_rates(const PhysicalSetup& s,
                                 const MechFrequencies& omega_mech,
                                 double omega_cav = 0.0);

// Closed-form x coupling at the node with theta = pi/2, written directly in
// setup quantities; algebraically identical to the composed route above and
// kept as an independent cross-check of the unit chain:
//   g_x = k x_zpf sqrt( (1/(2 pi)) (P/hbar) (k/(w_x w_y)) (alpha/eps0)^2
//                       (4/(w_cav^2 pi L)) ) f(d)
double coupling_x_explicit(const PhysicalSetup& s, double omega_x);

// Coupling versus transverse displacement, normalized to a reference
// measurement: g(z0) = g_ref exp(-(z0^2 - z0_ref^2)/w_cav^2).
struct DisplacementCurve {
  std::vector<double> z0;  // m
  std::vector<double> g;   // rad/s
};

DisplacementCurve coupling_vs_displacement(const PhysicalSetup& s,
                                           const std::vector<double>& z0_grid,
                                           double g_ref, double z0_ref);

// Dipole-regime radius scaling g/Omega = ratio_cal * (r/r_cal)^(3/2).
struct RadiusScaling {
  std::vector<double> ratios;
  std::vector<std::uint8_t> dipole_warning;  // per radius
};

RadiusScaling scaling_with_radius(const PhysicalSetup& s_base,
                                  const std::vector<double>& radii,
                                  double r_cal, double ratio_cal);

// Tweezer-power scaling of the ratio: g/Omega = ratio_ref * (P/P_ref)^(-1/4).
std::vector<double> scaling_with_power(double ratio_ref, double p_ref,
                                       const std::vector<double>& powers);

}  // namespace usco

#endif
