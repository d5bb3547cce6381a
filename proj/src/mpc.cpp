#include "aquactl/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aquactl/error.hpp"
#include "aquactl/rng.hpp"

namespace aquactl {

namespace {

constexpr std::array<const char*, 3> kChannelKeys = {"f", "T", "DO"};
constexpr double kMaxEnumeration = 1e6;

double snap(double x, const std::vector<double>& levels) {
  if (levels.empty()) return x;
  const auto it = std::min_element(levels.begin(), levels.end(), [x](double a, double b) {
    return std::abs(a - x) < std::abs(b - x);
  });
  return *it;
}

/// Clamp to the box and snap every entry to its channel lattice.
void make_admissible(InputSequence& seq, const MpcConfig& cfg) {
  for (Eigen::Index r = 0; r < seq.rows(); ++r)
    for (int c = 0; c < 3; ++c) {
      const double x = std::clamp(seq(r, c), cfg.bounds.lower(c), cfg.bounds.upper(c));
      seq(r, c) = snap(x, cfg.lattice[c]);
    }
}

bool channel_fixed(const MpcConfig& cfg, int c) {
  return cfg.bounds.lower(c) == cfg.bounds.upper(c);
}

struct Candidate {
  InputSequence inputs;
  Rollout rollout;
};

class BestTracker {
 public:
  void offer(const InputSequence& inputs, Rollout rollout) {
    if (!best_ || rollout.J < best_->rollout.J) best_ = Candidate{inputs, std::move(rollout)};
  }
  bool has() const { return best_.has_value(); }
  MpcSolution solution() const {
    MpcSolution s;
    s.inputs = best_->inputs;
    s.predicted = best_->rollout.predicted;
    s.J = best_->rollout.J;
    s.feasible = best_->rollout.feasible();
    return s;
  }

 private:
  std::optional<Candidate> best_;
};

MpcSolution solve_exhaustive(const MpcModel& model, const MpcConfig& cfg, double w0, double t_k,
                             const std::optional<ControlAction>& prev) {
  std::array<std::vector<double>, 3> levels;
  for (int c = 0; c < 3; ++c) {
    if (channel_fixed(cfg, c)) {
      levels[c] = {cfg.bounds.lower(c)};
    } else if (cfg.lattice[c].empty()) {
      throw ConfigError("controller.mpc.sampler",
                        std::string("exhaustive sampling needs a lattice on channel ") +
                            kChannelKeys[c]);
    } else {
      levels[c] = cfg.lattice[c];
    }
  }
  const int M = cfg.M;
  double total = 1.0;
  for (int c = 0; c < 3; ++c) total *= std::pow(static_cast<double>(levels[c].size()), M);
  if (total > kMaxEnumeration)
    throw ConfigError("controller.mpc.sampler", "lattice too large to enumerate");

  // Odometer over (row, channel) digits; the last digit turns fastest.
  std::vector<std::size_t> digit(static_cast<std::size_t>(3 * M), 0);
  InputSequence seq(M, 3);
  BestTracker best;
  while (true) {
    for (int r = 0; r < M; ++r)
      for (int c = 0; c < 3; ++c) seq(r, c) = levels[c][digit[static_cast<std::size_t>(3 * r + c)]];
    best.offer(seq, evaluate_sequence(model, cfg, w0, t_k, seq, prev));

    int pos = 3 * M - 1;
    while (pos >= 0) {
      auto& d = digit[static_cast<std::size_t>(pos)];
      if (++d < levels[static_cast<std::size_t>(pos % 3)].size()) break;
      d = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best.solution();
}

MpcSolution solve_cross_entropy(const MpcModel& model, const MpcConfig& cfg, double w0,
                                double t_k, const std::optional<ControlAction>& prev,
                                const InputSequence* warm_start, std::uint64_t seed) {
  const int M = cfg.M;
  const int S = cfg.samples;
  const int elites = std::max(1, static_cast<int>(std::ceil(cfg.elite_frac * S)));

  InputSequence mean(M, 3);
  InputSequence spread(M, 3);
  for (int r = 0; r < M; ++r) {
    mean.row(r) = (0.5 * (cfg.bounds.lower + cfg.bounds.upper)).transpose();
    spread.row(r) = (0.5 * (cfg.bounds.upper - cfg.bounds.lower)).transpose();
  }
  std::optional<InputSequence> warm;
  if (warm_start != nullptr && warm_start->rows() == M) {
    warm = *warm_start;
    make_admissible(*warm, cfg);
    mean = *warm;
  }

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  BestTracker best;
  std::vector<InputSequence> batch(static_cast<std::size_t>(S), InputSequence(M, 3));
  std::vector<double> cost(static_cast<std::size_t>(S));
  std::vector<int> order(static_cast<std::size_t>(S));

  for (int it = 0; it < cfg.iterations; ++it) {
    for (int s = 0; s < S; ++s) {
      auto& seq = batch[static_cast<std::size_t>(s)];
      if (s == 0) {
        // First slot carries the warm start, later the current proposal mean.
        seq = (it == 0 && warm) ? *warm : mean;
      } else {
        for (int r = 0; r < M; ++r)
          for (int c = 0; c < 3; ++c)
            seq(r, c) = channel_fixed(cfg, c) ? cfg.bounds.lower(c)
                                              : mean(r, c) + spread(r, c) * normal(rng);
      }
      make_admissible(seq, cfg);
      Rollout ro = evaluate_sequence(model, cfg, w0, t_k, seq, prev);
      cost[static_cast<std::size_t>(s)] = ro.J;
      best.offer(seq, std::move(ro));
    }

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return cost[static_cast<std::size_t>(a)] < cost[static_cast<std::size_t>(b)];
    });
    InputSequence elite_mean = InputSequence::Zero(M, 3);
    for (int e = 0; e < elites; ++e) elite_mean += batch[static_cast<std::size_t>(order[e])];
    elite_mean /= static_cast<double>(elites);
    InputSequence elite_var = InputSequence::Zero(M, 3);
    for (int e = 0; e < elites; ++e)
      elite_var += (batch[static_cast<std::size_t>(order[e])] - elite_mean).array().square().matrix();
    elite_var /= static_cast<double>(elites);
    mean = elite_mean;
    spread = elite_var.cwiseSqrt();
  }
  return best.solution();
}

}  // namespace

std::string to_string(StageCostKind k) {
  return k == StageCostKind::tracking ? "tracking" : "economic";
}

std::string to_string(Sampler s) {
  return s == Sampler::cross_entropy ? "cross-entropy" : "exhaustive";
}

void MpcConfig::validate() const {
  const std::string p = "controller.mpc.";
  if (N < 1) throw ConfigError(p + "N", "must be at least 1");
  if (M < 1) throw ConfigError(p + "M", "must be at least 1");
  if (M > N) throw ConfigError(p + "M", "control horizon must not exceed N");
  if (samples < 1) throw ConfigError(p + "S", "must be at least 1");
  if (iterations < 1) throw ConfigError(p + "iterations", "must be at least 1");
  if (!(elite_frac > 0 && elite_frac <= 1)) throw ConfigError(p + "elite_frac", "must lie in (0, 1]");
  for (int c = 0; c < 3; ++c) {
    if (!(bounds.lower(c) <= bounds.upper(c)))
      throw ConfigError(p + kChannelKeys[c] + "_min", "must not exceed the upper bound");
    for (const double level : lattice[c])
      if (!(level >= bounds.lower(c) && level <= bounds.upper(c)))
        throw ConfigError(p + kChannelKeys[c] + "_lattice", "levels must lie within the bounds");
  }
  if (bounds.lower(0) < 0 || bounds.upper(0) > 1)
    throw ConfigError(p + "f_min", "feed bounds must lie within [0, 1]");
  if (bounds.lower(2) < 0) throw ConfigError(p + "DO_min", "must be non-negative");
  if (!(w_lo < w_hi)) throw ConfigError(p + "w_lo", "must be below w_hi");
  const std::array<std::pair<const char*, double>, 5> weights = {
      {{"rate_weight", rate_weight}, {"q_w", q_w}, {"r_f", r_f}, {"price", price},
       {"feed_cost", feed_cost}}};
  for (const auto& [key, value] : weights)
    if (!(value >= 0)) throw ConfigError(p + key, "must be non-negative");
}

MpcModel MpcModel::from(const SimConfig& cfg, Reference reference) {
  MpcModel m;
  m.params = cfg.params;
  m.forecast = cfg.env;
  m.reference = std::move(reference);
  m.dt = cfg.dt;
  m.integrator = cfg.integrator;
  return m;
}

double stage_cost(double w, double w_ref, const ControlAction& u,
                  const std::optional<ControlAction>& prev, const AmbientEnv& ambient,
                  const MpcConfig& cfg, const GrowthParams& params) {
  const double rate = prev ? (u.vec() - prev->vec()).squaredNorm() : 0.0;
  if (cfg.cost == StageCostKind::tracking) {
    const double err = w - w_ref;
    return cfg.q_w * err * err + cfg.r_f * u.f * u.f + cfg.rate_weight * rate;
  }
  const double growth = individual_rhs(w, actuated_env(u, ambient), params);
  const double feed = u.f * params.R_frac * w;
  return -(cfg.price * growth - cfg.feed_cost * feed) + cfg.rate_weight * rate;
}

Rollout evaluate_sequence(const MpcModel& model, const MpcConfig& cfg, double w0, double t_k,
                          const InputSequence& inputs, const std::optional<ControlAction>& prev) {
  const int N = cfg.N;
  const auto M = static_cast<int>(inputs.rows());
  Rollout out;
  out.predicted.reserve(static_cast<std::size_t>(N) + 1);
  out.predicted.push_back(w0);

  double w = w0;
  std::optional<ControlAction> last = prev;
  for (int i = 0; i < N; ++i) {
    const ControlAction u = ControlAction::from(inputs.row(std::min(i, M - 1)).transpose());
    const double t = t_k + i * model.dt;
    double next = 0.0;
    try {
      next = advance_weight(w, u, t, model.dt, model.forecast, model.params, model.integrator);
    } catch (const SimulationError&) {
      out.violations += N - i;
      out.J += kStateBoundPenalty * (N - i);
      break;
    }
    const double ell =
        cfg.cost == StageCostKind::tracking
            ? stage_cost(next, model.reference.at(t + model.dt), u, last, AmbientEnv{}, cfg,
                         model.params)
            : stage_cost(w, 0.0, u, last, model.forecast.at(t), cfg, model.params);
    out.J += model.dt * ell;
    if (next < cfg.w_lo || next > cfg.w_hi) {
      ++out.violations;
      out.J += kStateBoundPenalty;
    }
    out.predicted.push_back(next);
    w = next;
    last = u;
  }
  return out;
}

InputSequence shift_sequence(const InputSequence& inputs) {
  InputSequence out = inputs;
  const auto M = inputs.rows();
  if (M > 1) out.topRows(M - 1) = inputs.bottomRows(M - 1);
  return out;
}

MpcSolution solve_horizon(const MpcModel& model, const MpcConfig& cfg, double current_w,
                          double t_k, const std::optional<ControlAction>& prev,
                          const InputSequence* warm_start, std::uint64_t seed) {
  if (!(current_w >= cfg.w_lo && current_w <= cfg.w_hi)) {
    MpcSolution s;
    s.inputs = InputSequence(cfg.M, 3);
    for (int r = 0; r < cfg.M; ++r)
      s.inputs.row(r) = (0.5 * (cfg.bounds.lower + cfg.bounds.upper)).transpose();
    make_admissible(s.inputs, cfg);
    return s;
  }
  if (cfg.sampler == Sampler::exhaustive) return solve_exhaustive(model, cfg, current_w, t_k, prev);
  return solve_cross_entropy(model, cfg, current_w, t_k, prev, warm_start, seed);
}

MpcController::MpcController(const MpcConfig& cfg, MpcModel model)
    : cfg_(cfg), model_(std::move(model)) {
  cfg_.validate();
}

void MpcController::reset() {
  prev_.reset();
  warm_.reset();
  last_ = {};
}

Decision MpcController::act(const Observation& obs) {
  const std::uint64_t seed = derive_seed(cfg_.seed, "mpc-solve", obs.step);
  last_ = solve_horizon(model_, cfg_, obs.weight, obs.t, prev_, warm_ ? &*warm_ : nullptr, seed);
  Decision d;
  if (last_.feasible) {
    d.action = last_.first();
    d.J = last_.J;
    d.chosen_by = "mpc";
    warm_ = shift_sequence(last_.inputs);
  } else {
    d.action = prev_ ? *prev_ : cfg_.bounds.clamp(last_.first());
    d.chosen_by = "fallback";
  }
  prev_ = d.action;
  return d;
}

}  // namespace aquactl
