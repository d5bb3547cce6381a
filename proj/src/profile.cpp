#include "aquactl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "aquactl/rng.hpp"
#include "aquactl/text.hpp"

namespace aquactl {

namespace {

constexpr double kRhoEps = 1e-9;

double channel_of(const AmbientEnv& e, Channel c) {
  switch (c) {
    case Channel::T: return e.T;
    case Channel::DO: return e.DO;
    case Channel::UIA: return e.UIA;
    case Channel::rho: return e.rho;
  }
  return 0.0;
}

double daily_noise(std::uint64_t seed, Channel c, double t) {
  const auto day = static_cast<std::int64_t>(std::floor(t));
  const std::uint64_t key =
      (static_cast<std::uint64_t>(day) << 3) ^ static_cast<std::uint64_t>(c);
  // Counter-based Box-Muller, so a query costs two hashes and is the same on
  // every standard library.
  const std::uint64_t base = derive_seed(seed, "environment-noise", key);
  const double u1 = (static_cast<double>(splitmix64(base) >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(splitmix64(base + 1) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

EnvProfile EnvProfile::constant(const AmbientEnv& env) {
  EnvProfile p;
  p.kind_ = Kind::constant;
  p.waves_ = {ChannelWave{env.T}, ChannelWave{env.DO}, ChannelWave{env.UIA}, ChannelWave{env.rho}};
  return p;
}

EnvProfile EnvProfile::sinusoidal(const ChannelWave& T, const ChannelWave& DO,
                                  const ChannelWave& UIA, const ChannelWave& rho) {
  for (const auto* w : {&T, &DO, &UIA, &rho})
    if (!(w->period > 0)) throw std::invalid_argument("sinusoidal profile: period must be positive");
  EnvProfile p;
  p.kind_ = Kind::sinusoidal;
  p.waves_ = {T, DO, UIA, rho};
  return p;
}

EnvProfile EnvProfile::table(std::vector<EnvSample> samples) {
  if (samples.empty()) throw std::invalid_argument("table profile: no samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].t > samples[i - 1].t))
      throw std::invalid_argument("table profile: samples must be strictly time ordered");
  EnvProfile p;
  p.kind_ = Kind::table;
  p.samples_ = std::move(samples);
  return p;
}

EnvProfile& EnvProfile::with_noise(Channel c, double sd) {
  if (!(sd >= 0)) throw std::invalid_argument("noise standard deviation must be non-negative");
  noise_sd_[static_cast<int>(c)] = sd;
  return *this;
}

EnvProfile& EnvProfile::with_noise_seed(std::uint64_t seed) {
  noise_seed_ = seed;
  return *this;
}

EnvProfile EnvProfile::with_override(Channel c, double value) const {
  EnvProfile copy = *this;
  copy.override_[static_cast<int>(c)] = value;
  return copy;
}

double EnvProfile::raw(Channel c, double t) const {
  const auto idx = static_cast<int>(c);
  if (kind_ == Kind::constant) return waves_[idx].mean;
  if (kind_ == Kind::sinusoidal) {
    const auto& w = waves_[idx];
    if (w.amplitude == 0.0) return w.mean;
    return w.mean + w.amplitude * std::sin(2.0 * std::numbers::pi * (t - w.phase) / w.period);
  }
  if (t <= samples_.front().t) return channel_of(samples_.front().env, c);
  if (t >= samples_.back().t) return channel_of(samples_.back().env, c);
  const auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double x, const EnvSample& s) { return x < s.t; });
  const auto lo = hi - 1;
  const double frac = (t - lo->t) / (hi->t - lo->t);
  const double a = channel_of(lo->env, c);
  const double b = channel_of(hi->env, c);
  return a + frac * (b - a);
}

AmbientEnv EnvProfile::at(double t) const {
  std::array<double, kChannelCount> v{};
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    const auto c = static_cast<Channel>(i);
    if (override_[i]) {
      v[i] = *override_[i];
      continue;
    }
    v[i] = raw(c, t);
    if (noise_sd_[i] > 0) v[i] += noise_sd_[i] * daily_noise(noise_seed_, c, t);
  }
  AmbientEnv e;
  e.T = v[0];
  e.DO = std::max(0.0, v[1]);
  e.UIA = std::max(0.0, v[2]);
  e.rho = std::clamp(v[3], kRhoEps, 2.0 - kRhoEps);
  return e;
}

std::vector<EnvSample> read_env_table(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "t_day,T_c,DO_mgL,UIA_mgL,rho")
    throw std::runtime_error(path + ": expected header t_day,T_c,DO_mgL,UIA_mgL,rho");
  std::vector<EnvSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 5)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 5 fields");
    try {
      EnvSample s;
      s.t = parse_double(fields[0]);
      s.env = {parse_double(fields[1]), parse_double(fields[2]), parse_double(fields[3]),
               parse_double(fields[4])};
      samples.push_back(s);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

}  // namespace aquactl
