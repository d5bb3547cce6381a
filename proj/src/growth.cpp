#include "aquactl/growth.hpp"

#include <string>

#include "aquactl/error.hpp"

namespace aquactl {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw ConfigError(std::string("model.") + field, rule);
}

}  // namespace

void GrowthParams::validate() const {
  require(m > 0 && m < 1, "m", "must lie in (0, 1)");
  require(n > m && n < 1, "n", "must lie in (m, 1)");
  require(b > 0 && b <= 1, "b", "must lie in (0, 1]");
  require(a >= 0 && a <= 1, "a", "must lie in [0, 1]");
  require(h > 0, "h", "must be positive");
  require(k_min > 0, "k_min", "must be positive");
  require(j > 0, "j", "must be positive");
  require(kappa > 0, "kappa", "must be positive");
  require(T_min < T_opt, "T_min", "must be below T_opt");
  require(T_opt < T_max, "T_max", "must be above T_opt");
  require(UIA_crit >= 0, "UIA_crit", "must be non-negative");
  require(UIA_crit < UIA_max, "UIA_max", "must exceed UIA_crit");
  require(DO_lo >= 0, "DO_lo", "must be non-negative");
  require(DO_lo < DO_hi, "DO_hi", "must exceed DO_lo");
  require(Z > 0, "Z", "must be positive");
  require(beta > 0, "beta", "must be positive");
  require(eta > 0, "eta", "must be positive");
  require(mortality_scale > 0, "mortality_scale", "must be positive");
  require(R_frac > 0 && R_frac <= 1, "R_frac", "must lie in (0, 1]");
}

double observed_weight(const SimState& state) {
  if (const auto* ind = std::get_if<Individual>(&state)) return ind->w;
  const auto& pop = std::get<Population>(state);
  return pop.p > 0 ? pop.xi / static_cast<double>(pop.p) : 0.0;
}

PopulationRates population_rhs(const Population& state, const EnvState& env,
                               const StockingPolicy& stocking, double k1,
                               const GrowthParams& p) {
  if (state.xi < 0) throw std::domain_error("population_rhs: biomass must be non-negative");
  if (state.p < 0) throw std::domain_error("population_rhs: fish count must be non-negative");
  if (state.p == 0 && state.xi != 0)
    throw std::domain_error("population_rhs: empty pond with nonzero biomass");

  const double count = static_cast<double>(state.p);
  const double anabolic = anabolism_psi(env, p) * v_ammonia(env.UIA, p);
  // Same expression as individual_rhs so that a single fish without
  // stocking or mortality reproduces it bit for bit.
  const double growth =
      anabolic * std::pow(state.xi, p.m) - catabolism_k(env.T, p) * std::pow(state.xi, p.n);
  const double stocked = static_cast<double>(stocking.p_s) * stocking.xi_i;
  const double mean_biomass = state.p > 0 ? state.xi / count : 0.0;
  const double deaths_biomass = count * k1 * mean_biomass;

  PopulationRates rates;
  rates.dxi = growth + stocked - deaths_biomass;
  rates.dp = static_cast<double>(stocking.p_s) - std::floor(count * k1);
  return rates;
}

PopulationRates population_rhs(const Population& state, const EnvState& env,
                               const StockingPolicy& stocking, const GrowthParams& p) {
  return population_rhs(state, env, stocking, mortality_k1(env.UIA, p), p);
}

double equilibrium_weight(const EnvState& env, const GrowthParams& p) {
  const double anabolic = anabolism_psi(env, p) * v_ammonia(env.UIA, p);
  if (!(anabolic > 0))
    throw std::domain_error("equilibrium_weight: anabolism vanishes, no equilibrium");
  return std::pow(anabolic / catabolism_k(env.T, p), 1.0 / (p.n - p.m));
}

double fcr(double total_feed, double weight_gain) {
  if (!(weight_gain > 0)) throw std::domain_error("fcr: degenerate weight gain");
  return total_feed / weight_gain;
}

double sgr(double w0, double wf, double days) {
  if (!(w0 > 0) || !(wf > 0)) throw std::invalid_argument("sgr: weights must be positive");
  if (!(days > 0)) throw std::invalid_argument("sgr: duration must be positive");
  return 100.0 * (std::log(wf) - std::log(w0)) / days;
}

}  // namespace aquactl
