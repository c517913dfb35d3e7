// Copyright 2026 The qpkick Authors
// SPDX-License-Identifier: Apache-2.0

#include "qpkick/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qpkick/errors.hpp"

namespace qpkick {

namespace {

double sample_variance(const std::vector<double> &x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0);
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double> &x, const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ConfigError("fit needs at least two distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.residual = std::sqrt(ss_res);
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

// Standard normal pair by Box-Muller.
std::pair<double, double> gaussian_pair(Rng &rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
}

}  // namespace

double autocorrelation(std::span<const double> z, const InitialPattern &pattern) {
  if (static_cast<int>(z.size()) != pattern.size() || z.empty()) {
    throw ConfigError("autocorrelation needs one <Z> per pattern bit (" + std::to_string(z.size()) + " vs " +
                      std::to_string(pattern.size()) + ")");
  }
  double a = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) a += (pattern.bits[i] ? -1.0 : 1.0) * z[i];
  return a / static_cast<double>(z.size());
}

Estimate autocorrelation_from_samples(const SampleSet &samples, const InitialPattern &pattern) {
  if (samples.num_qubits != pattern.size()) throw ConfigError("sample width does not match the pattern");
  const std::size_t shots = samples.shots();
  if (shots == 0) throw ConfigError("no samples");
  std::vector<double> per(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    double a = 0.0;
    for (int q = 0; q < samples.num_qubits; ++q) {
      const bool flip = (samples.bit(s, q) != 0) != (pattern.bits[static_cast<std::size_t>(q)] != 0);
      a += flip ? -1.0 : 1.0;
    }
    per[s] = a / samples.num_qubits;
  }
  Estimate e;
  for (double v : per) e.value += v;
  e.value /= static_cast<double>(shots);
  e.error = shots > 1 ? std::sqrt(sample_variance(per) / static_cast<double>(shots)) : 0.0;
  return e;
}

double qfi_from_moments(const MagnetizationMoments &m) { return std::max(0.0, 4.0 * (m.mean_sq - m.mean * m.mean)); }

double qfi_exact(const StateVector &state) { return qfi_from_moments(magnetization_moments(state)); }

double qfi_global_depolarized(const MagnetizationMoments &m, int num_qubits, double f) {
  const double n = num_qubits;
  const double mean_sq = n + f * (m.mean_sq - n);
  const double mean = f * m.mean;
  return std::max(0.0, 4.0 * (mean_sq - mean * mean));
}

Estimate qfi_from_samples(const SampleSet &samples, int resamples, std::uint64_t seed) {
  const std::size_t shots = samples.shots();
  if (shots < 2) throw ConfigError("QFI estimate needs at least two samples, got " + std::to_string(shots));
  if (resamples < 2) throw ConfigError("bootstrap needs at least two resamples");
  std::vector<double> m(shots);
  for (std::size_t s = 0; s < shots; ++s) {
    int ones = 0;
    for (int q = 0; q < samples.num_qubits; ++q) ones += samples.bit(s, q);
    m[s] = samples.num_qubits - 2.0 * ones;
  }
  Estimate e;
  e.value = 4.0 * sample_variance(m);
  std::vector<double> boot(static_cast<std::size_t>(resamples));
  std::vector<double> draw(shots);
  for (int b = 0; b < resamples; ++b) {
    Rng rng(seed, static_cast<std::uint64_t>(b));
    for (auto &v : draw) v = m[rng.below(shots)];
    boot[static_cast<std::size_t>(b)] = 4.0 * sample_variance(draw);
  }
  e.error = std::sqrt(sample_variance(boot));
  return e;
}

void depolarize_samples(SampleSet &samples, double f, Rng &rng) {
  const std::size_t shots = samples.shots();
  for (std::size_t s = 0; s < shots; ++s) {
    if (rng.uniform() < f) continue;
    for (int q = 0; q < samples.num_qubits; ++q) {
      samples.bits[s * static_cast<std::size_t>(samples.num_qubits) + static_cast<std::size_t>(q)] =
          static_cast<std::uint8_t>(rng.next() >> 63);
    }
  }
}

HaarBaseline haar_qfi_baseline(int n, int num_samples, std::uint64_t seed) {
  if (n < 1 || n > 14) throw ConfigError("Haar baseline uses dense states; n must lie in [1, 14]");
  if (num_samples < 2) throw ConfigError("Haar baseline needs at least two samples");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> f(static_cast<std::size_t>(num_samples));
  std::vector<double> p(dim);
  for (int k = 0; k < num_samples; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    double norm = 0.0;
    for (auto &v : p) {
      const auto [re, im] = gaussian_pair(rng);
      v = re * re + im * im;
      norm += v;
    }
    MagnetizationMoments mm;
    for (std::size_t i = 0; i < dim; ++i) {
      const double w = p[i] / norm;
      const double mag = n - 2.0 * std::popcount(i);
      mm.mean += w * mag;
      mm.mean_sq += w * mag * mag;
    }
    f[static_cast<std::size_t>(k)] = qfi_from_moments(mm);
  }
  HaarBaseline h;
  h.num_samples = num_samples;
  for (double v : f) h.mean += v;
  h.mean /= num_samples;
  h.std = std::sqrt(sample_variance(f));
  h.stderr_mean = h.std / std::sqrt(static_cast<double>(num_samples));
  h.mean_per_qubit = h.mean / n;
  h.std_per_qubit = h.std / n;
  return h;
}

std::string_view to_string(FitModel m) { return m == FitModel::PowerLawInW ? "power_law_in_W" : "log_in_t"; }

FitResult fit_power_law_in_w(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw ConfigError("power-law fit needs at least 3 points");
  std::vector<double> x, y;
  FitResult r;
  r.model = FitModel::PowerLawInW;
  r.window = {points.front().first, points.front().first};
  for (auto [w, a] : points) {
    if (!(w > 0.0) || !(a > 0.0)) throw ConfigError("power-law fit needs W > 0 and A > 0");
    x.push_back(std::log(w));
    y.push_back(std::log(a));
    r.window.first = std::min(r.window.first, w);
    r.window.second = std::max(r.window.second, w);
  }
  const LineFit f = least_squares(x, y);
  r.coeffs = {std::exp(f.intercept), f.slope};
  r.residual = f.residual;
  r.r2 = f.r2;
  r.num_points = points.size();
  return r;
}

FitResult fit_log_in_t(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw ConfigError("log fit needs at least 3 points");
  std::vector<double> x, y;
  FitResult r;
  r.model = FitModel::LogInT;
  r.window = {points.front().first, points.front().first};
  for (auto [t, v] : points) {
    if (!(t >= 1.0)) throw ConfigError("log fit needs t >= 1");
    if (!std::isfinite(v)) throw ConfigError("log fit needs finite values");
    x.push_back(std::log(t));
    y.push_back(v);
    r.window.first = std::min(r.window.first, t);
    r.window.second = std::max(r.window.second, t);
  }
  const LineFit f = least_squares(x, y);
  r.coeffs = {f.intercept, f.slope};
  r.residual = f.residual;
  r.r2 = f.r2;
  r.num_points = points.size();
  return r;
}

double late_time_mean(std::span<const std::pair<double, double>> series, double fraction, double t_min) {
  if (series.empty()) throw ConfigError("empty series");
  double t_max = series.front().first;
  for (auto [t, v] : series) t_max = std::max(t_max, t);
  const double from = (1.0 - fraction) * t_max;
  double sum = 0.0;
  std::size_t n = 0;
  for (auto [t, v] : series) {
    if (t > from && t >= t_min) {
      sum += v;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : series.back().second;
}

}  // namespace qpkick
