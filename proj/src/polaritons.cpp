#include "usco/polaritons.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "usco/util.hpp"

namespace usco {

namespace {

constexpr Complex I{0.0, 1.0};

// Monic quartic coefficients in units of omega_x (mu = lambda / omega_x):
//   (mu^2 + i gh mu - gh^2/4 - 1) (mu^2 + i kh mu - kh^2/4 - dh^2) - 4 dh gxh^2
struct QuarticCoeffs {
  Complex c3, c2, c1, c0;  // mu^4 + c3 mu^3 + c2 mu^2 + c1 mu + c0
};

QuarticCoeffs quartic_coeffs(const ModelParams& p) {
  const double gh = p.gamma / p.omega_x;
  const double kh = p.kappa / p.omega_x;
  const double dh = p.detuning / p.omega_x;
  const double gxh = p.g / p.omega_x;

  const Complex A = I * gh;
  const double a0 = -(1.0 + gh * gh / 4.0);
  const Complex B = I * kh;
  const double b0 = -(dh * dh + kh * kh / 4.0);

  QuarticCoeffs c;
  c.c3 = A + B;
  c.c2 = Complex(a0 + b0, 0.0) + A * B;
  c.c1 = A * b0 + B * a0;
  c.c0 = Complex(a0 * b0 - 4.0 * dh * gxh * gxh, 0.0);
  return c;
}

Complex eval_monic(const QuarticCoeffs& c, Complex mu) {
  return (((mu + c.c3) * mu + c.c2) * mu + c.c1) * mu + c.c0;
}

Complex eval_monic_deriv(const QuarticCoeffs& c, Complex mu) {
  return ((4.0 * mu + 3.0 * c.c3) * mu + 2.0 * c.c2) * mu + c.c1;
}

double coeff_scale(const QuarticCoeffs& c) {
  return std::max({1.0, std::abs(c.c3), std::abs(c.c2), std::abs(c.c1),
                   std::abs(c.c0)});
}

}  // namespace

Complex characteristic_poly(Complex lambda, const ModelParams& p) {
  const double om = p.omega_x;
  const Complex mech =
      (lambda * lambda - om * om + I * p.gamma * lambda -
       p.gamma * p.gamma / 4.0) /
      (2.0 * om);
  const Complex cav_minus = lambda - p.detuning + I * (p.kappa / 2.0);
  const Complex cav_plus = lambda + p.detuning + I * (p.kappa / 2.0);
  return mech * cav_minus * cav_plus - 2.0 * p.detuning * p.g * p.g;
}

double characteristic_scale(const ModelParams& p) {
  const QuarticCoeffs c = quartic_coeffs(p);
  const double om = p.omega_x;
  return 0.5 * om * om * om * coeff_scale(c);
}

std::array<Complex, 4> quartic_roots(const ModelParams& p) {
  require_valid(p);
  const QuarticCoeffs c = quartic_coeffs(p);

  Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
  companion(0, 3) = -c.c0;
  companion(1, 3) = -c.c1;
  companion(2, 3) = -c.c2;
  companion(3, 3) = -c.c3;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;

  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw RootFindingFailed("companion-matrix eigenvalue solve failed");

  std::array<Complex, 4> roots;
  const double tol = root_residual_rel_tol * coeff_scale(c);
  for (int i = 0; i < 4; ++i) {
    Complex mu = solver.eigenvalues()(i);
    // Newton polish on the monic quartic.
    for (int it = 0; it < 3; ++it) {
      const Complex f = eval_monic(c, mu);
      const Complex df = eval_monic_deriv(c, mu);
      if (std::abs(df) < 1e-300) break;
      mu -= f / df;
    }
    if (std::abs(eval_monic(c, mu)) > tol)
      throw RootFindingFailed(
          "quartic root residual above tolerance after polish; |q(mu)| = " +
          std::to_string(std::abs(eval_monic(c, mu))) +
          ", tol = " + std::to_string(tol));
    roots[i] = mu * p.omega_x;
  }
  return roots;
}

PolaritonPair polariton_modes(const ModelParams& p) {
  const std::array<Complex, 4> roots = quartic_roots(p);
  const double scale =
      p.omega_x + std::abs(p.detuning) + p.kappa + p.gamma;
  const double re_tol = 1e-9 * scale;

  // Sort by descending real part; among equal real parts put the least
  // damped root first so an unstable mode stays visible.
  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (roots[a].real() != roots[b].real())
      return roots[a].real() > roots[b].real();
    return roots[a].imag() > roots[b].imag();
  });

  // Roots come in (lambda, -conj(lambda)) pairs; keep one representative
  // per pair, preferring re >= 0. Purely imaginary roots are their own
  // partners.
  std::array<bool, 4> used{false, false, false, false};
  std::vector<Complex> reps;
  for (int idx : order) {
    if (used[idx]) continue;
    used[idx] = true;
    const Complex lam = roots[idx];
    if (std::abs(lam.real()) > re_tol) {
      const Complex mirror = -std::conj(lam);
      int best = -1;
      double best_dist = 0.0;
      for (int j : order) {
        if (used[j]) continue;
        const double d = std::abs(roots[j] - mirror);
        if (best < 0 || d < best_dist) {
          best = j;
          best_dist = d;
        }
      }
      if (best >= 0 && best_dist < 1e-3 * scale) used[best] = true;
    }
    reps.push_back(lam);
    if (reps.size() == 2) break;
  }
  if (reps.size() < 2)
    throw RootFindingFailed("could not select two mode representatives");

  auto to_mode = [](Complex lam) {
    // Decay convention: stable roots sit in the lower half plane.
    return ComplexFrequency{lam.real(), -lam.imag()};
  };
  PolaritonPair pair;
  if (reps[0].real() >= reps[1].real()) {
    pair.upper = to_mode(reps[0]);
    pair.lower = to_mode(reps[1]);
  } else {
    pair.upper = to_mode(reps[1]);
    pair.lower = to_mode(reps[0]);
  }
  return pair;
}

BranchScan detuning_scan(const ModelParams& base,
                         const std::vector<double>& detunings) {
  if (detunings.empty())
    throw ValidationError({{"detunings", "must be nonempty"}});

  const std::size_t n = detunings.size();
  std::vector<PolaritonPair> pairs(n);
  std::vector<std::string> failures(n);
  parallel_for(n, [&](std::size_t i) {
    ModelParams p = base;
    p.detuning = detunings[i];
    try {
      pairs[i] = polariton_modes(p);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i].empty())
      throw RootFindingFailed("detuning_scan failed at detuning " +
                              std::to_string(detunings[i]) + " rad/s: " +
                              failures[i]);
  }

  // Sequential branch matching, anchored at the largest |detuning| where
  // the branches are asymptotically the bare modes.
  const bool reversed =
      std::abs(detunings.front()) < std::abs(detunings.back());

  BranchScan scan;
  scan.detunings = detunings;
  scan.upper.resize(n);
  scan.lower.resize(n);
  scan.step_ok.assign(n, 1);

  auto as_complex = [](const ComplexFrequency& f) {
    return Complex(f.re, f.im);
  };
  const double jump_floor =
      1e-3 * (base.omega_x + base.kappa + base.gamma);

  Complex prev_u, prev_l, prev2_u, prev2_l;
  bool have_prev = false, have_prev2 = false;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = reversed ? (n - 1 - step) : step;
    Complex u = as_complex(pairs[i].upper);
    Complex l = as_complex(pairs[i].lower);
    if (have_prev) {
      // Keep the assignment that is closest to the previous point.
      const double keep = std::abs(u - prev_u) + std::abs(l - prev_l);
      const double swap = std::abs(l - prev_u) + std::abs(u - prev_l);
      if (swap < keep) std::swap(u, l);
      if (have_prev2) {
        const double allowed_u =
            3.0 * std::abs(prev_u - prev2_u) + jump_floor;
        const double allowed_l =
            3.0 * std::abs(prev_l - prev2_l) + jump_floor;
        if (std::abs(u - prev_u) > allowed_u ||
            std::abs(l - prev_l) > allowed_l)
          scan.step_ok[i] = 0;
      }
      prev2_u = prev_u;
      prev2_l = prev_l;
      have_prev2 = true;
    }
    prev_u = u;
    prev_l = l;
    have_prev = true;
    scan.upper[i] = ComplexFrequency{u.real(), u.imag()};
    scan.lower[i] = ComplexFrequency{l.real(), l.imag()};
  }

  scan.continuous = std::all_of(scan.step_ok.begin(), scan.step_ok.end(),
                                [](std::uint8_t ok) { return ok != 0; });
  return scan;
}

}  // namespace usco
