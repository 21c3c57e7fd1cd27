#include "usco/params.hpp"

#include <cmath>

namespace usco {

namespace {

bool finite(double x) { return std::isfinite(x); }

void check_finite(Validation& v, const std::string& field, double x) {
  if (!finite(x)) v.errors.push_back({field, "must be finite"});
}

void check_positive(Validation& v, const std::string& field, double x) {
  check_finite(v, field, x);
  if (finite(x) && !(x > 0.0)) v.errors.push_back({field, "must be > 0"});
}

void check_nonnegative(Validation& v, const std::string& field, double x) {
  check_finite(v, field, x);
  if (finite(x) && !(x >= 0.0)) v.errors.push_back({field, "must be >= 0"});
}

}  // namespace

Validation validate(const ModelParams& p) {
  Validation v;
  check_positive(v, "omega_x", p.omega_x);
  check_finite(v, "detuning", p.detuning);
  check_positive(v, "kappa", p.kappa);
  check_nonnegative(v, "gamma", p.gamma);
  check_nonnegative(v, "g", p.g);
  check_nonnegative(v, "n_bath", p.n_bath);
  return v;
}

Validation validate(const PhysicalSetup& s) {
  Validation v;
  check_positive(v, "wavelength", s.wavelength);
  check_positive(v, "tweezer_power", s.tweezer_power);
  check_positive(v, "waist_x", s.waist_x);
  check_positive(v, "waist_y", s.waist_y);
  check_positive(v, "cavity_waist", s.cavity_waist);
  check_positive(v, "cavity_length", s.cavity_length);
  check_positive(v, "radius", s.radius);
  check_positive(v, "density", s.density);
  check_finite(v, "rel_permittivity", s.rel_permittivity);
  if (finite(s.rel_permittivity) && !(s.rel_permittivity > 1.0))
    v.errors.push_back({"rel_permittivity", "must be > 1"});
  check_finite(v, "pol_angle", s.pol_angle);
  if (finite(s.pol_angle) &&
      (s.pol_angle < 0.0 || s.pol_angle > constants::pi / 2.0))
    v.errors.push_back({"pol_angle", "must be in [0, pi/2]"});
  check_finite(v, "position.x", s.position[0]);
  check_finite(v, "position.y", s.position[1]);
  check_finite(v, "position.z", s.position[2]);
  check_positive(v, "trap_waist_scale_x", s.trap_waist_scale_x);
  check_positive(v, "trap_waist_scale_y", s.trap_waist_scale_y);

  if (finite(s.radius) && finite(s.wavelength) &&
      s.radius > dipole_warning_radius_fraction * s.wavelength) {
    v.warnings.push_back(
        "radius exceeds " +
        std::to_string(dipole_warning_radius_fraction) +
        " * wavelength; dipole-approximation results are marginal");
  }
  return v;
}

void require_valid(const ModelParams& p) {
  Validation v = validate(p);
  if (!v.ok()) throw ValidationError(v.errors);
}

void require_valid(const PhysicalSetup& s) {
  Validation v = validate(s);
  if (!v.ok()) throw ValidationError(v.errors);
}

}  // namespace usco
