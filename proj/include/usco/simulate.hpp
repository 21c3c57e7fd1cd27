#ifndef USCO_SIMULATE_HPP
#define USCO_SIMULATE_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usco/params.hpp"
#include "usco/response.hpp"

namespace usco {

//
// Time-domain integration of the linear Langevin dynamics.
//
// The complex operator equations
//   da/dt = -(kappa/2 + i Delta) a + sqrt(kappa) a_in - i g (b + b^dag)
//   db/dt = -(gamma/2 + i Omega_x) b + sqrt(gamma) b_in - i g (a + a^dag)
// are rewritten in the four real quadratures
//   Xc = (a + a^dag)/sqrt(2), Yc = (a - a^dag)/(i sqrt(2)),
//   Xm = (b + b^dag)/sqrt(2), Ym = (b - b^dag)/(i sqrt(2)),
// which removes the redundant conjugate equations:
//   dXc = -kappa/2 Xc + Delta Yc                      + sqrt(kappa) Xc_in
//   dYc = -Delta Xc   - kappa/2 Yc - 2 g Xm           + sqrt(kappa) Yc_in
//   dXm = -gamma/2 Xm + Omega_x Ym                    + sqrt(gamma) Xm_in
//   dYm = -2 g Xc     - Omega_x Xm - gamma/2 Ym       + sqrt(gamma) Ym_in
// Input quadratures are white: variance 1/2 per quadrature for the vacuum
// optical inputs and n_bath + 1/2 for the thermal mechanical inputs, which
// reproduces the g = 0 steady-state occupation (variance (2 n_bath + 1)/2
// per mechanical quadrature).
//
// The update per step is the exact Gaussian propagator of this linear SDE
// (state transition exp(A dt) plus the exactly integrated process noise),
// so the sampled statistics carry no time-step bias at any dt; the dt
// bound below only controls recording resolution.
//

struct SimConfig {
  double dt = 0.0;        // integration step, s
  double duration = 0.0;  // total simulated time, s
  std::uint64_t seed = 0;
  // Overrides ModelParams::n_bath when set.
  std::optional<double> n_bath;
  bool record_mechanical = true;  // channels xm, ym
  bool record_optical = false;    // channels xc, yc
  int record_stride = 1;          // keep every n-th step
  double noise_scale = 1.0;       // multiplies all input noise amplitudes
  // Initial quadratures (Xc, Yc, Xm, Ym); with noise_scale = 0 the run is
  // a deterministic decay from this state.
  std::array<double, 4> initial_state{0.0, 0.0, 0.0, 0.0};
};

struct TimeTrace {
  double dt = 0.0;  // sample spacing (integration dt times record stride)
  std::uint64_t seed = 0;
  std::string generator;
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;  // one array per name
  std::size_t length() const {
    return channels.empty() ? 0 : channels.front().size();
  }
  const std::vector<double>& channel(const std::string& name) const;
};

// Guards: dt must satisfy dt < 0.05 * 2 pi / max(Omega_x, |Delta| + kappa)
// (StiffnessGuard), duration must cover at least 100 mechanical periods,
// and unstable systems are only integrated while duration * max growth
// rate < 20 (DivergenceGuard, also enforced on samples at runtime).
TimeTrace simulate_langevin(const ModelParams& p, const SimConfig& cfg);

// Averaged-periodogram spectral estimate of one channel. One-sided, in
// ordinary frequency (Hz), density normalization: the integral over f
// equals the signal variance. Throws TooShort when fewer than 4 segments
// fit.
enum class Window { hann, rect };
SpectrumGrid welch_psd(const TimeTrace& trace, const std::string& channel,
                       std::size_t segment_len, double overlap, Window window);

// Synthetic noisy spectrum for fit tests: the analytic one-sided
// mechanical spectrum (x_zpf = 1) plus a white detection floor, each bin
// multiplied by an independent chi^2(2k)/(2k) variate as produced by a
// k-average periodogram. Weights are set to the inverse variance
// k / value^2. Deterministic given the seed.
struct SnrModel {
  int k_averages = 64;
  double floor = 0.0;  // same one-sided units as the spectrum
};

SpectrumGrid synthesize_spectrum(const ModelParams& p,
                                 const std::vector<double>& freqs_hz,
                                 const SnrModel& snr, std::uint64_t seed);

// Radix-2 FFT used by the Welch estimator; exposed for tests.
// size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace usco

#endif
