#include "aquactl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aquactl/text.hpp"

namespace aquactl {

namespace {

double biomass(const SimState& s) {
  if (const auto* pop = std::get_if<Population>(&s)) return pop->xi;
  return std::get<Individual>(s).w;
}

std::string field(const std::optional<double>& x) { return x ? format_exact(*x) : std::string(); }

std::string fixed(const std::optional<double>& x, int decimals) {
  if (!x) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, *x);
  return buf;
}

}  // namespace

double tracking_rmse(const Trajectory& traj, const Reference& reference) {
  if (traj.records.empty()) throw std::invalid_argument("tracking_rmse: empty trajectory");
  double sum = 0.0;
  for (const auto& r : traj.records) {
    const double e = observed_weight(r.state) - reference.at(r.t);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(traj.records.size()));
}

double total_feed(const Trajectory& traj, const GrowthParams& params) {
  double feed = 0.0;
  for (std::size_t k = 0; k + 1 < traj.records.size(); ++k) {
    const auto& r = traj.records[k];
    if (!r.action) continue;
    const double dt = traj.records[k + 1].t - r.t;
    feed += r.action->f * params.R_frac * biomass(r.state) * dt;
  }
  return feed;
}

RunReport compute_report(const Trajectory& traj, const GrowthParams& params,
                         const Reference* reference, std::string controller) {
  if (traj.records.empty()) throw std::invalid_argument("compute_report: empty trajectory");
  const auto& first = traj.records.front();
  const auto& last = traj.records.back();

  RunReport rep;
  rep.controller = std::move(controller);
  rep.terminal_weight = observed_weight(last.state);
  rep.total_feed = total_feed(traj, params);
  const double gain = biomass(last.state) - biomass(first.state);
  if (gain > 0) rep.fcr = fcr(rep.total_feed, gain);
  const double w0 = observed_weight(first.state);
  const double days = last.t - first.t;
  if (w0 > 0 && rep.terminal_weight > 0 && days > 0) rep.sgr = sgr(w0, rep.terminal_weight, days);
  if (reference != nullptr && !reference->empty()) rep.rmse = tracking_rmse(traj, *reference);
  if (const auto* p0 = std::get_if<Population>(&first.state); p0 && p0->p > 0)
    rep.survival = static_cast<double>(std::get<Population>(last.state).p) /
                   static_cast<double>(p0->p);
  for (const auto& r : traj.records)
    if (r.reward) rep.episode_return = rep.episode_return.value_or(0.0) + *r.reward;
  return rep;
}

std::string compare_csv(const std::vector<RunReport>& reports) {
  std::string out =
      "controller,terminal_weight_kcal,fcr,sgr_pct_day,rmse_kcal,total_feed_kcal,survival,"
      "episode_return\n";
  for (const auto& r : reports)
    out += r.controller + ',' + format_exact(r.terminal_weight) + ',' + field(r.fcr) + ',' +
           field(r.sgr) + ',' + field(r.rmse) + ',' + format_exact(r.total_feed) + ',' +
           field(r.survival) + ',' + field(r.episode_return) + '\n';
  return out;
}

std::string compare_text(const std::vector<RunReport>& reports, bool wall_clock) {
  std::vector<std::string> head = {"controller", "w_T [kcal]", "FCR",       "SGR [%/d]",
                                   "RMSE [kcal]", "feed [kcal]", "survival", "return"};
  if (wall_clock) head.push_back("time [s]");
  std::vector<std::vector<std::string>> rows{head};
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.controller,          fixed(r.terminal_weight, 3),
                                    fixed(r.fcr, 3),       fixed(r.sgr, 3),
                                    fixed(r.rmse, 3),      fixed(r.total_feed, 3),
                                    fixed(r.survival, 4),  fixed(r.episode_return, 4)};
    if (wall_clock) row.push_back(fixed(r.wall_clock_s, 3));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string pad(width[c] - row[c].size(), ' ');
      line += c == 0 ? row[c] + pad : "  " + pad + row[c];
    }
    out += line + '\n';
  }
  return out;
}

}  // namespace aquactl
