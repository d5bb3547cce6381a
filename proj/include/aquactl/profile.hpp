#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aquactl {

/// Ambient water conditions at an instant, before any actuation.
struct AmbientEnv {
  double T = 33.0;
  double DO = 5.0;
  double UIA = 0.0;
  double rho = 1.0;
};

enum class Channel : int { T = 0, DO = 1, UIA = 2, rho = 3 };
inline constexpr std::size_t kChannelCount = 4;

/// mean + amplitude * sin(2 pi (t - phase) / period)
struct ChannelWave {
  double mean = 0.0;
  double amplitude = 0.0;
  double period = 365.0;
  double phase = 0.0;
};

/// One row of a table-driven profile (`t_day,T_c,DO_mgL,UIA_mgL,rho`).
struct EnvSample {
  double t = 0.0;
  AmbientEnv env;
};

/// Exogenous environment over time. Values are clamped so DO and UIA stay
/// non-negative and rho stays inside (0, 2).
///
/// Optional perturbation adds zero-mean Gaussian noise that is constant over
/// each whole day and depends only on (seed, channel, day), so every query of
/// the same instant sees the same realization.
class EnvProfile {
 public:
  enum class Kind { constant, sinusoidal, table };

  EnvProfile() = default;

  static EnvProfile constant(const AmbientEnv& env);
  static EnvProfile sinusoidal(const ChannelWave& T, const ChannelWave& DO, const ChannelWave& UIA,
                               const ChannelWave& rho);
  /// Samples must be strictly time ordered. Linear interpolation between
  /// samples, ends held.
  static EnvProfile table(std::vector<EnvSample> samples);

  /// Per-day noise standard deviation on a channel.
  EnvProfile& with_noise(Channel c, double sd);
  EnvProfile& with_noise_seed(std::uint64_t seed);
  /// Pins a channel to a constant regardless of kind and noise.
  EnvProfile with_override(Channel c, double value) const;

  AmbientEnv at(double t) const;

  Kind kind() const { return kind_; }
  const std::array<ChannelWave, kChannelCount>& waves() const { return waves_; }
  const std::vector<EnvSample>& samples() const { return samples_; }
  double noise(Channel c) const { return noise_sd_[static_cast<int>(c)]; }

 private:
  double raw(Channel c, double t) const;

  Kind kind_ = Kind::constant;
  std::array<ChannelWave, kChannelCount> waves_{ChannelWave{33.0}, ChannelWave{5.0},
                                                ChannelWave{0.0}, ChannelWave{1.0}};
  std::vector<EnvSample> samples_;
  std::array<double, kChannelCount> noise_sd_{};
  std::uint64_t noise_seed_ = 0;
  std::array<std::optional<double>, kChannelCount> override_{};
};

/// Reads `t_day,T_c,DO_mgL,UIA_mgL,rho`. Throws std::runtime_error on bad input.
std::vector<EnvSample> read_env_table(const std::string& path);

}  // namespace aquactl
