#include "usco/stability.hpp"

#include <cmath>

#include "usco/polaritons.hpp"
#include "usco/util.hpp"

namespace usco {

namespace {
// Ties at the critical coupling count as stable (closed set).
constexpr double boundary_rel_tol = 1e-6;
}

double critical_coupling(double delta, const ModelParams& p) {
  if (!(delta > 0.0))
    throw UnsupportedDetuning(
        "closed-form stability condition requires detuning > 0");
  const double om = p.omega_x;
  const double ratio =
      (delta / om + p.kappa * p.kappa / (4.0 * delta * om)) / 4.0;
  return om * std::sqrt(ratio);
}

bool is_stable_closed_form(const ModelParams& p) {
  require_valid(p);
  const double g_crit = critical_coupling(p.detuning, p);
  return p.g <= g_crit * (1.0 + boundary_rel_tol);
}

bool is_stable_spectral(const ModelParams& p) {
  const auto roots = quartic_roots(p);
  // Raw roots: decay rate is -Im(lambda).
  for (const Complex& lam : roots) {
    if (-lam.imag() <= -1e-9 * p.omega_x) return false;
  }
  return true;
}

StabilityMap stability_map(const StabilityAxes& axes, const ModelParams& base) {
  if (axes.detunings.empty())
    throw ValidationError({{"detunings", "axis must be nonempty"}});
  if (axes.couplings.empty())
    throw ValidationError({{"couplings", "axis must be nonempty"}});
  for (double d : axes.detunings)
    if (!(d > 0.0))
      throw UnsupportedDetuning("stability map requires detuning axis > 0");

  StabilityMap map;
  map.detuning_axis = axes.detunings;
  map.coupling_axis = axes.couplings;
  const std::size_t nd = axes.detunings.size();
  const std::size_t ng = axes.couplings.size();
  map.stable.assign(nd * ng, 0);

  parallel_for(nd, [&](std::size_t i) {
    ModelParams p = base;
    p.detuning = axes.detunings[i];
    const double g_crit = critical_coupling(p.detuning, p);
    for (std::size_t j = 0; j < ng; ++j) {
      map.stable[i * ng + j] =
          axes.couplings[j] <= g_crit * (1.0 + boundary_rel_tol) ? 1 : 0;
    }
  });

  map.boundary.reserve(nd);
  for (std::size_t i = 0; i < nd; ++i)
    map.boundary.push_back(
        {axes.detunings[i], critical_coupling(axes.detunings[i], base)});
  return map;
}

}  // namespace usco
