#pragma once

// Reference implementations used only by the tests. They are written from the
// model equations directly, in long double, and share no code with the library.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct Table2 {
  long double m = 0.67L, n = 0.81L, b = 0.62L, a = 0.53L, h = 0.8L;
  long double k_min = 0.00133L, j = 0.0132L, kappa = 4.6L;
  long double T_opt = 33, T_min = 24, T_max = 40;
  long double UIA_crit = 0.06L, UIA_max = 1.4L;
  long double DO_lo = 0.3L, DO_hi = 1.0L;
  long double Z = 99.41L, beta = 10.36L, eta = 0.80L;
};

inline long double tau(long double T, const Table2& p = {}) {
  if (T == p.T_opt) return 1;
  const long double x = T > p.T_opt ? (T - p.T_opt) / (p.T_max - p.T_opt)
                                    : (p.T_opt - T) / (p.T_opt - p.T_min);
  return std::exp(-p.kappa * std::pow(x, 4.0L));
}

inline long double v(long double UIA, const Table2& p = {}) {
  if (UIA < p.UIA_crit) return 1;
  if (UIA < p.UIA_max) return (p.UIA_max - UIA) / (p.UIA_max - p.UIA_crit);
  return 0;
}

inline long double sigma(long double DO, const Table2& p = {}) {
  if (DO > p.DO_hi) return 1;
  if (DO > p.DO_lo) return (DO - p.DO_lo) / (p.DO_hi - p.DO_lo);
  return 0;
}

inline long double k(long double T, const Table2& p = {}) {
  return p.k_min * std::exp(p.j * (T - p.T_min));
}

/// Logistic fit in percent.
inline long double k1_percent(long double UIA, const Table2& p = {}) {
  return p.Z / (1 + std::exp(-p.beta * (UIA - p.eta)));
}

inline long double dwdt(long double w, long double f, long double T, long double DO,
                        long double UIA, long double rho, const Table2& p = {}) {
  const long double psi = p.h * rho * f * p.b * (1 - p.a) * tau(T, p) * sigma(DO, p);
  return psi * v(UIA, p) * std::pow(w, p.m) - k(T, p) * std::pow(w, p.n);
}

/// Optimal Q of a deterministic MDP by Bellman sweeps until the sup-norm
/// change is below `residual`.
inline std::vector<std::vector<double>> optimal_q(
    const std::vector<std::vector<std::size_t>>& next,
    const std::vector<std::vector<double>>& reward, const std::vector<bool>& terminal,
    double gamma, double residual = 1e-12) {
  const std::size_t S = next.size(), A = next[0].size();
  std::vector<std::vector<double>> q(S, std::vector<double>(A, 0.0));
  for (;;) {
    double change = 0;
    auto fresh = q;
    for (std::size_t s = 0; s < S; ++s) {
      if (terminal[s]) continue;
      for (std::size_t a = 0; a < A; ++a) {
        const std::size_t n = next[s][a];
        double best = 0;
        if (!terminal[n]) {
          best = -std::numeric_limits<double>::infinity();
          for (double x : q[n]) best = x > best ? x : best;
        }
        fresh[s][a] = reward[s][a] + gamma * best;
        change = std::fmax(change, std::fabs(fresh[s][a] - q[s][a]));
      }
    }
    q = fresh;
    if (change < residual) return q;
  }
}

}  // namespace oracle
