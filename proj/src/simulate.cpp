#include "usco/simulate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "usco/polaritons.hpp"
#include "usco/rng.hpp"
#include "usco/stability.hpp"
#include "usco/util.hpp"

namespace usco {

const std::vector<double>& TimeTrace::channel(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return channels[i];
  throw Error("no such channel: " + name);
}

namespace {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

Matrix4 drift_matrix(const ModelParams& p) {
  Matrix4 a = Matrix4::Zero();
  a(0, 0) = -p.kappa / 2.0;
  a(0, 1) = p.detuning;
  a(1, 0) = -p.detuning;
  a(1, 1) = -p.kappa / 2.0;
  a(1, 2) = -2.0 * p.g;
  a(2, 2) = -p.gamma / 2.0;
  a(2, 3) = p.omega_x;
  a(3, 0) = -2.0 * p.g;
  a(3, 2) = -p.omega_x;
  a(3, 3) = -p.gamma / 2.0;
  return a;
}

Matrix4 diffusion_matrix(const ModelParams& p, double n_bath,
                         double noise_scale) {
  Matrix4 d = Matrix4::Zero();
  const double s2 = noise_scale * noise_scale;
  d(0, 0) = d(1, 1) = s2 * p.kappa * 0.5;           // vacuum optical input
  d(2, 2) = d(3, 3) = s2 * p.gamma * (n_bath + 0.5);  // thermal mechanical input
  return d;
}

// Exact one-step discretization of ds = A s dt + noise with diffusion D:
//   s_{n+1} = F s_n + w_n,  F = exp(A dt),  Cov(w) = int_0^dt e^{As} D e^{A's} ds.
// The covariance integral comes from the block matrix exponential
//   exp([[-A, D], [0, A']] dt) = [[., E12], [0, E22]],  Cov = E22' E12.
struct Propagator {
  Matrix4 transition;
  Matrix4 noise_sqrt;  // Cov = noise_sqrt * noise_sqrt'
};

Propagator make_propagator(const ModelParams& p, double n_bath, double dt,
                           double noise_scale) {
  const Matrix4 a = drift_matrix(p);
  const Matrix4 d = diffusion_matrix(p, n_bath, noise_scale);

  Eigen::Matrix<double, 8, 8> block = Eigen::Matrix<double, 8, 8>::Zero();
  block.topLeftCorner<4, 4>() = -a * dt;
  block.topRightCorner<4, 4>() = d * dt;
  block.bottomRightCorner<4, 4>() = a.transpose() * dt;
  const Eigen::Matrix<double, 8, 8> e = block.exp();

  Propagator prop;
  prop.transition = e.bottomRightCorner<4, 4>().transpose();
  Matrix4 cov = prop.transition * e.topRightCorner<4, 4>();
  cov = 0.5 * (cov + cov.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix4> es(cov);
  Vector4 ev = es.eigenvalues().cwiseMax(0.0);
  prop.noise_sqrt =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  return prop;
}

double max_growth_rate(const ModelParams& p) {
  double growth = 0.0;
  for (const Complex& lam : quartic_roots(p))
    growth = std::max(growth, lam.imag());
  return growth;
}

}  // namespace

TimeTrace simulate_langevin(const ModelParams& p, const SimConfig& cfg) {
  require_valid(p);
  if (!(cfg.dt > 0.0))
    throw ValidationError({{"dt", "must be > 0"}});
  const double fastest =
      std::max(p.omega_x, std::abs(p.detuning) + p.kappa);
  const double dt_max = 0.05 * constants::two_pi / fastest;
  if (cfg.dt >= dt_max)
    throw StiffnessGuard("dt = " + std::to_string(cfg.dt) +
                         " s exceeds the stiffness bound " +
                         std::to_string(dt_max) + " s");
  const double min_duration = 100.0 * constants::two_pi / p.omega_x;
  if (!(cfg.duration >= min_duration))
    throw ValidationError(
        {{"duration", "must cover at least 100 mechanical periods (" +
                          std::to_string(min_duration) + " s)"}});
  if (cfg.record_stride < 1)
    throw ValidationError({{"record_stride", "must be >= 1"}});
  if (!(cfg.noise_scale >= 0.0))
    throw ValidationError({{"noise_scale", "must be >= 0"}});
  const double n_bath = cfg.n_bath.value_or(p.n_bath);
  if (!(n_bath >= 0.0))
    throw ValidationError({{"n_bath", "must be >= 0"}});
  if (!cfg.record_mechanical && !cfg.record_optical)
    throw ValidationError({{"record", "no channels selected"}});

  const double growth = max_growth_rate(p);
  if (growth > 0.0 && cfg.duration * growth >= 20.0)
    throw DivergenceGuard(
        "unstable system: duration * max growth rate = " +
        std::to_string(cfg.duration * growth) + " (must stay below 20)");

  const Propagator prop =
      make_propagator(p, n_bath, cfg.dt, cfg.noise_scale);
  GaussianRng rng(cfg.seed);

  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  const std::size_t stride = static_cast<std::size_t>(cfg.record_stride);
  const std::size_t n_rec = (n_steps + stride - 1) / stride;

  TimeTrace trace;
  trace.dt = cfg.dt * static_cast<double>(stride);
  trace.seed = cfg.seed;
  trace.generator = generator_id;
  if (cfg.record_optical) {
    trace.names.push_back("xc");
    trace.names.push_back("yc");
  }
  if (cfg.record_mechanical) {
    trace.names.push_back("xm");
    trace.names.push_back("ym");
  }
  trace.channels.assign(trace.names.size(), {});
  for (auto& ch : trace.channels) ch.reserve(n_rec);

  Vector4 state(cfg.initial_state[0], cfg.initial_state[1],
                cfg.initial_state[2], cfg.initial_state[3]);
  const double scale0 =
      std::max({1.0, std::abs(state[0]), std::abs(state[1]),
                std::abs(state[2]), std::abs(state[3])});
  const double blow_up = 1e12 * scale0;
  const bool with_noise = cfg.noise_scale > 0.0;

  auto record = [&](const Vector4& s) {
    std::size_t idx = 0;
    if (cfg.record_optical) {
      trace.channels[idx++].push_back(s[0]);
      trace.channels[idx++].push_back(s[1]);
    }
    if (cfg.record_mechanical) {
      trace.channels[idx++].push_back(s[2]);
      trace.channels[idx++].push_back(s[3]);
    }
  };

  for (std::size_t step = 0; step < n_steps; ++step) {
    if (step % stride == 0) record(state);
    if (with_noise) {
      Vector4 xi(rng.gaussian(), rng.gaussian(), rng.gaussian(),
                 rng.gaussian());
      state = prop.transition * state + prop.noise_sqrt * xi;
    } else {
      state = prop.transition * state;
    }
    if (state.cwiseAbs().maxCoeff() > blow_up)
      throw DivergenceGuard("sample exceeded 1e12 x initial scale at t = " +
                            std::to_string((step + 1) * cfg.dt) + " s");
  }
  return trace;
}

void fft_radix2(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error("fft size must be a nonzero power of two");

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        (inverse ? 1.0 : -1.0) * constants::two_pi / static_cast<double>(len);
    const std::complex<double> wn(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wn;
      }
    }
  }
  if (inverse) {
    for (auto& x : data) x /= static_cast<double>(n);
  }
}

SpectrumGrid welch_psd(const TimeTrace& trace, const std::string& channel,
                       std::size_t segment_len, double overlap,
                       Window window) {
  const std::vector<double>& x = trace.channel(channel);
  if (segment_len < 8)
    throw ValidationError({{"segment_len", "must be >= 8"}});
  if (segment_len > x.size())
    throw TooShort("segment length exceeds trace length");
  if (!(overlap >= 0.0 && overlap <= 0.9))
    throw ValidationError({{"overlap", "must be in [0, 0.9]"}});

  const std::size_t hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(static_cast<double>(segment_len) * (1.0 - overlap))));
  const std::size_t n_segments = (x.size() - segment_len) / hop + 1;
  if (n_segments < 4)
    throw TooShort("fewer than 4 segments; got " +
                   std::to_string(n_segments));

  std::vector<double> w(segment_len, 1.0);
  if (window == Window::hann) {
    for (std::size_t i = 0; i < segment_len; ++i)
      w[i] = 0.5 * (1.0 - std::cos(constants::two_pi *
                                   static_cast<double>(i) /
                                   static_cast<double>(segment_len)));
  }
  double wsum2 = 0.0;
  for (double wi : w) wsum2 += wi * wi;

  const std::size_t nfft = next_pow2(segment_len);
  const std::size_t n_freq = nfft / 2 + 1;
  const double fs = 1.0 / trace.dt;

  std::vector<double> acc(n_freq, 0.0);
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t seg = 0; seg < n_segments; ++seg) {
    const std::size_t start = seg * hop;
    for (std::size_t i = 0; i < segment_len; ++i)
      buf[i] = std::complex<double>(x[start + i] * w[i], 0.0);
    std::fill(buf.begin() + static_cast<std::ptrdiff_t>(segment_len),
              buf.end(), std::complex<double>(0.0, 0.0));
    fft_radix2(buf, false);
    for (std::size_t k = 0; k < n_freq; ++k) acc[k] += std::norm(buf[k]);
  }

  const double scale =
      1.0 / (static_cast<double>(n_segments) * fs * wsum2);
  SpectrumGrid grid;
  grid.freqs.resize(n_freq);
  grid.values.resize(n_freq);
  for (std::size_t k = 0; k < n_freq; ++k) {
    grid.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(nfft);
    double v = acc[k] * scale;
    if (k != 0 && k != nfft / 2) v *= 2.0;  // fold negative frequencies
    grid.values[k] = v;
  }
  return grid;
}

SpectrumGrid synthesize_spectrum(const ModelParams& p,
                                 const std::vector<double>& freqs_hz,
                                 const SnrModel& snr, std::uint64_t seed) {
  require_valid(p);
  if (snr.k_averages < 1)
    throw ValidationError({{"k_averages", "must be >= 1"}});
  if (!(snr.floor >= 0.0))
    throw ValidationError({{"floor", "must be >= 0"}});
  if (!is_stable_spectral(p))
    throw ValidationError({{"p", "system must be stable"}});

  GaussianRng rng(seed);
  const double k = static_cast<double>(snr.k_averages);

  SpectrumGrid grid;
  grid.freqs = freqs_hz;
  grid.values.reserve(freqs_hz.size());
  grid.weights.reserve(freqs_hz.size());
  for (double f : freqs_hz) {
    const double mean = psd_xx_one_sided_hz(f, p, 1.0) + snr.floor;
    // chi^2(2k)/(2k) variate: mean 1, relative variance 1/k.
    double sum = 0.0;
    for (int i = 0; i < snr.k_averages; ++i)
      sum += -std::log(1.0 - rng.uniform());
    const double value = mean * (sum / k);
    grid.values.push_back(value);
    const double v = std::max(value, 1e-300);
    grid.weights.push_back(k / (v * v));
  }
  return grid;
}

}  // namespace usco
