#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <variant>

namespace aquactl {

/// Constants of the bioenergetic growth model. Weights are in kcal, time in days.
///
/// DO_lo is the cutoff below which feeding stops and DO_hi the saturation
/// level above which oxygen no longer limits consumption.
struct GrowthParams {
  double m = 0.67;  ///< weight exponent of net anabolism
  double n = 0.81;  ///< weight exponent of fasting catabolism
  double b = 0.62;  ///< efficiency of food assimilation
  double a = 0.53;  ///< fraction of the assimilated food lost to digestion
  double h = 0.8;   ///< food consumption coefficient, kcal^(1-m)/day
  double k_min = 0.00133;
  double j = 0.0132;
  double kappa = 4.6;
  double T_opt = 33.0;
  double T_min = 24.0;
  double T_max = 40.0;
  double UIA_crit = 0.06;
  double UIA_max = 1.4;
  double DO_lo = 0.3;
  double DO_hi = 1.0;
  double Z = 99.41;     ///< mortality logistic asymptote, percent
  double beta = 10.36;  ///< logistic steepness, L/mg
  double eta = 0.80;    ///< logistic midpoint, mg/L
  double mortality_scale = 0.01;  ///< per-day fraction per logistic percent
  double R_frac = 0.1;            ///< maximal daily ration per unit body weight

  /// Throws std::invalid_argument naming the first violated field.
  void validate() const;
};

/// Environment seen by the fish over a time instant.
struct EnvState {
  double f = 0.0;    ///< relative feeding rate r/R
  double T = 33.0;   ///< °C
  double DO = 5.0;   ///< mg/L
  double UIA = 0.0;  ///< mg/L
  double rho = 1.0;  ///< photoperiod factor
};

struct Individual {
  double w = 0.0;
  bool operator==(const Individual&) const = default;
};

struct Population {
  double xi = 0.0;     ///< total biomass, kcal
  std::int64_t p = 0;  ///< fish count
  bool operator==(const Population&) const = default;
};

using SimState = std::variant<Individual, Population>;

/// Weight a controller observes: w for one fish, mean biomass for a population
/// (zero when the pond is empty).
double observed_weight(const SimState& state);

struct StockingPolicy {
  std::int64_t p_s = 0;  ///< fish stocked per day
  double xi_i = 1.0;     ///< kcal per stocked fish
};

struct PopulationRates {
  double dxi = 0.0;  ///< kcal/day
  double dp = 0.0;   ///< fish/day
};

// Environmental effect functions. They are templated on the scalar so callers
// can evaluate them in extended precision or with an AD type.

template <typename Scalar>
Scalar tau_temperature(const Scalar& T, const GrowthParams& p) {
  using std::exp;
  if (T > p.T_opt) {
    const Scalar x = (T - p.T_opt) / (p.T_max - p.T_opt);
    return exp(-p.kappa * ((x * x) * (x * x)));
  }
  if (T < p.T_opt) {
    const Scalar x = (p.T_opt - T) / (p.T_opt - p.T_min);
    return exp(-p.kappa * ((x * x) * (x * x)));
  }
  return Scalar(1);
}

/// Appetite suppression by un-ionized ammonia. The ramp is closed at both
/// breakpoints, so the function is continuous.
template <typename Scalar>
Scalar v_ammonia(const Scalar& UIA, const GrowthParams& p) {
  if (UIA < p.UIA_crit) return Scalar(1);
  if (UIA <= p.UIA_max) return (p.UIA_max - UIA) / (p.UIA_max - p.UIA_crit);
  return Scalar(0);
}

template <typename Scalar>
Scalar sigma_oxygen(const Scalar& DO, const GrowthParams& p) {
  if (DO < p.DO_lo) return Scalar(0);
  if (DO <= p.DO_hi) return (DO - p.DO_lo) / (p.DO_hi - p.DO_lo);
  return Scalar(1);
}

/// Fasting catabolism coefficient k(T), kcal^(1-n)/day.
template <typename Scalar>
Scalar catabolism_k(const Scalar& T, const GrowthParams& p) {
  using std::exp;
  return p.k_min * exp(p.j * (T - p.T_min));
}

/// Anabolism coefficient Psi(f, T, DO), kcal^(1-m)/day.
template <typename Scalar>
Scalar anabolism_psi(const Scalar& f, const Scalar& T, const Scalar& DO, const Scalar& rho,
                     const GrowthParams& p) {
  return p.h * rho * f * p.b * (1.0 - p.a) * tau_temperature(T, p) * sigma_oxygen(DO, p);
}

inline double anabolism_psi(const EnvState& env, const GrowthParams& p) {
  return anabolism_psi(env.f, env.T, env.DO, env.rho, p);
}

/// Per-day death fraction from the logistic mortality fit.
template <typename Scalar>
Scalar mortality_k1(const Scalar& UIA, const GrowthParams& p) {
  using std::exp;
  return p.mortality_scale * (p.Z / (1.0 + exp(-p.beta * (UIA - p.eta))));
}

/// dw/dt of a single fish. Throws std::domain_error for w <= 0.
template <typename Scalar>
Scalar individual_rhs(const Scalar& w, const EnvState& env, const GrowthParams& p) {
  using std::pow;
  if (!(w > 0)) throw std::domain_error("individual_rhs: weight must be positive");
  const Scalar anabolic = anabolism_psi(env, p) * v_ammonia(env.UIA, p);
  return anabolic * pow(w, p.m) - catabolism_k(env.T, p) * pow(w, p.n);
}

/// Population dynamics with an explicit mortality coefficient k1 (per day).
/// The fish-count rate uses floor(p * k1) deaths.
PopulationRates population_rhs(const Population& state, const EnvState& env,
                               const StockingPolicy& stocking, double k1,
                               const GrowthParams& p);

/// Population dynamics with k1 taken from the logistic fit at env.UIA.
PopulationRates population_rhs(const Population& state, const EnvState& env,
                               const StockingPolicy& stocking, const GrowthParams& p);

/// Weight at which anabolism and catabolism balance for a fixed environment,
/// (Psi v / k)^(1/(n-m)). Requires Psi v > 0.
double equilibrium_weight(const EnvState& env, const GrowthParams& p);

/// Feed conversion rate. Throws std::domain_error when weight_gain <= 0.
double fcr(double total_feed, double weight_gain);

/// Specific growth rate in percent per day.
double sgr(double w0, double wf, double days);

}  // namespace aquactl
