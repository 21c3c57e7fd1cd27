#include "usco/coupling.hpp"

#include <cmath>

namespace usco {

namespace {
using constants::eps0;
using constants::hbar;
using constants::pi;
using constants::speed_of_light;
using constants::two_pi;

double zpf(double mass, double omega) {
  return std::sqrt(hbar / (2.0 * mass * omega));
}
}  // namespace

CouplingBreakdown derived_fields(const PhysicalSetup& s,
                                 const MechFrequencies& omega_mech,
                                 double omega_cav) {
  require_valid(s);
  if (!(omega_mech.x > 0.0 && omega_mech.y > 0.0 && omega_mech.z > 0.0))
    throw ValidationError({{"omega_mech", "all frequencies must be > 0"}});

  CouplingBreakdown d;
  d.mass = s.density * (4.0 / 3.0) * pi * s.radius * s.radius * s.radius;
  d.x_zpf = zpf(d.mass, omega_mech.x);
  d.y_zpf = zpf(d.mass, omega_mech.y);
  d.z_zpf = zpf(d.mass, omega_mech.z);
  d.k = two_pi / s.wavelength;
  d.z_R = s.waist_x * s.waist_y * pi / s.wavelength;
  d.eps_tw = std::sqrt(4.0 * s.tweezer_power /
                       (s.waist_x * s.waist_y * pi * eps0 * speed_of_light));
  d.V_cav = pi * s.cavity_waist * s.cavity_waist * s.cavity_length / 4.0;
  const double wc =
      omega_cav > 0.0 ? omega_cav : two_pi * speed_of_light / s.wavelength;
  d.eps_cav = std::sqrt(hbar * wc / (2.0 * eps0 * d.V_cav));
  d.alpha = 4.0 * pi * eps0 * s.radius * s.radius * s.radius *
            (s.rel_permittivity - 1.0) / (s.rel_permittivity + 2.0);
  d.E_d = d.alpha * d.eps_tw * d.eps_cav * std::sin(s.pol_angle) / (2.0 * hbar);
  d.f_geom = geometric_factor(s);
  d.dipole_warning = s.radius > dipole_warning_radius_fraction * s.wavelength;
  return d;
}

double geometric_factor(const PhysicalSetup& s) {
  const double y0 = s.position[1];
  const double z0 = s.position[2];
  const double w2 = s.cavity_waist * s.cavity_waist;
  return std::exp(-(y0 * y0 + z0 * z0) / w2) /
         std::sqrt(s.trap_waist_scale_x * s.trap_waist_scale_y);
}

CouplingBreakdown coupling_rates(const PhysicalSetup& s,
                                 const MechFrequencies& omega_mech,
                                 double omega_cav) {
  CouplingBreakdown d = derived_fields(s, omega_mech, omega_cav);
  const double kx0 = d.k * s.position[0];
  const double sin_kx0 = std::sin(kx0);
  const double cos_kx0 = std::cos(kx0);
  const double f = d.f_geom;

  d.g_x = d.E_d * d.k * d.x_zpf * std::sin(s.pol_angle) * sin_kx0 * f;
  d.g_y = d.E_d * d.k * d.y_zpf * std::cos(s.pol_angle) * sin_kx0 * f;
  d.g_z = d.E_d * (d.k - 1.0 / d.z_R) * d.z_zpf * cos_kx0 * f;
  d.dispersive_drive = d.E_d * cos_kx0;
  return d;
}

double coupling_x_explicit(const PhysicalSetup& s, double omega_x) {
  require_valid(s);
  if (!(omega_x > 0.0))
    throw ValidationError({{"omega_x", "must be > 0"}});
  const double mass =
      s.density * (4.0 / 3.0) * pi * s.radius * s.radius * s.radius;
  const double x_zpf = zpf(mass, omega_x);
  const double k = two_pi / s.wavelength;
  const double alpha_over_eps0 = 4.0 * pi * s.radius * s.radius * s.radius *
                                 (s.rel_permittivity - 1.0) /
                                 (s.rel_permittivity + 2.0);
  const double arg = (1.0 / (2.0 * pi)) * (s.tweezer_power / hbar) *
                     (k / (s.waist_x * s.waist_y)) * alpha_over_eps0 *
                     alpha_over_eps0 *
                     (4.0 / (s.cavity_waist * s.cavity_waist * pi *
                             s.cavity_length));
  return k * x_zpf * std::sqrt(arg) * geometric_factor(s);
}

DisplacementCurve coupling_vs_displacement(const PhysicalSetup& s,
                                           const std::vector<double>& z0_grid,
                                           double g_ref, double z0_ref) {
  require_valid(s);
  const double w2 = s.cavity_waist * s.cavity_waist;
  DisplacementCurve curve;
  curve.z0 = z0_grid;
  curve.g.reserve(z0_grid.size());
  for (double z0 : z0_grid) {
    if (!std::isfinite(z0))
      throw ValidationError({{"z0_grid", "entries must be finite"}});
    curve.g.push_back(g_ref * std::exp(-(z0 * z0 - z0_ref * z0_ref) / w2));
  }
  return curve;
}

RadiusScaling scaling_with_radius(const PhysicalSetup& s_base,
                                  const std::vector<double>& radii,
                                  double r_cal, double ratio_cal) {
  if (!(r_cal > 0.0))
    throw ValidationError({{"r_cal", "must be > 0"}});
  RadiusScaling out;
  out.ratios.reserve(radii.size());
  out.dipole_warning.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0))
      throw ValidationError({{"radii", "entries must be > 0"}});
    out.ratios.push_back(ratio_cal * std::pow(r / r_cal, 1.5));
    out.dipole_warning.push_back(
        r > dipole_warning_radius_fraction * s_base.wavelength ? 1 : 0);
  }
  return out;
}

std::vector<double> scaling_with_power(double ratio_ref, double p_ref,
                                       const std::vector<double>& powers) {
  if (!(p_ref > 0.0))
    throw ValidationError({{"p_ref", "must be > 0"}});
  std::vector<double> out;
  out.reserve(powers.size());
  for (double p : powers) {
    if (!(p > 0.0))
      throw ValidationError({{"powers", "entries must be > 0"}});
    out.push_back(ratio_ref * std::pow(p / p_ref, -0.25));
  }
  return out;
}

}  // namespace usco
