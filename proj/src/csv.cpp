#include "aquactl/csv.hpp"

#include <stdexcept>

#include "aquactl/text.hpp"

namespace aquactl {

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_exact(*x) : std::string(); }

std::optional<double> opt_field(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  for (auto& line : split(text, '\n'))
    if (!line.empty()) out.push_back(std::move(line));
  return out;
}

void expect_header(const std::vector<std::string>& lines, std::string_view header) {
  if (lines.empty() || lines.front() != header)
    throw std::runtime_error("CSV header mismatch: expected '" + std::string(header) + "'");
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  if (traj.records.empty()) throw std::invalid_argument("write_trajectory: empty trajectory");
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& r : traj.records) {
    out += format_exact(r.t);
    out += ',' + format_exact(observed_weight(r.state));
    if (const auto* pop = std::get_if<Population>(&r.state))
      out += ',' + format_exact(pop->xi) + ',' + std::to_string(pop->p);
    else
      out += ",,";
    if (r.action)
      out += ',' + format_exact(r.action->f) + ',' + format_exact(r.action->T) + ',' +
             format_exact(r.action->DO);
    else
      out += ",,,";
    out += ',' + format_exact(r.UIA);
    out += ',' + opt(r.tau) + ',' + opt(r.sigma);
    out += ',' + format_exact(r.v) + ',' + format_exact(r.k1);
    out += ',' + opt(r.reward) + ',' + opt(r.J);
    out += ',' + r.chosen_by;
    out += '\n';
  }
  return out;
}

Trajectory parse_trajectory_csv(std::string_view text) {
  const auto lines = lines_of(text);
  expect_header(lines, kTrajectoryHeader);
  Trajectory traj;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 15)
      throw std::runtime_error("trajectory CSV line " + std::to_string(i + 1) +
                               ": expected 15 fields");
    try {
      TrajectoryRecord r;
      r.t = parse_double(f[0]);
      if (f[2].empty())
        r.state = Individual{parse_double(f[1])};
      else
        r.state = Population{parse_double(f[2]), parse_int(f[3])};
      if (!f[4].empty()) r.action = ControlAction{parse_double(f[4]), parse_double(f[5]),
                                                  parse_double(f[6])};
      r.UIA = parse_double(f[7]);
      r.tau = opt_field(f[8]);
      r.sigma = opt_field(f[9]);
      r.v = parse_double(f[10]);
      r.k1 = parse_double(f[11]);
      r.reward = opt_field(f[12]);
      r.J = opt_field(f[13]);
      r.chosen_by = f[14];
      traj.records.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("trajectory CSV line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return traj;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
  write_file(path, trajectory_csv(traj));
}

Trajectory read_trajectory(const std::string& path) {
  return parse_trajectory_csv(read_file(path));
}

std::string qtable_csv(const QTable& table) {
  std::string out(kQTableHeader);
  out += '\n';
  for (std::size_t s = 0; s < table.states(); ++s)
    for (std::size_t a = 0; a < table.actions(); ++a)
      out += std::to_string(s) + ',' + std::to_string(a) + ',' + format_exact(table(s, a)) + ',' +
             std::to_string(table.visits(s, a)) + '\n';
  return out;
}

QTable parse_qtable_csv(std::string_view text) {
  const auto lines = lines_of(text);
  expect_header(lines, kQTableHeader);
  struct Row {
    std::size_t s, a;
    double q;
    std::int64_t visits;
  };
  std::vector<Row> rows;
  std::size_t S = 0, A = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 4)
      throw std::runtime_error("Q-table CSV line " + std::to_string(i + 1) + ": expected 4 fields");
    try {
      Row r{parse_uint(f[0]), parse_uint(f[1]), parse_double(f[2]), parse_int(f[3])};
      S = std::max(S, r.s + 1);
      A = std::max(A, r.a + 1);
      rows.push_back(r);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("Q-table CSV line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (rows.empty()) throw std::runtime_error("Q-table CSV has no rows");
  QTable table(S, A);
  for (const auto& r : rows) {
    table(r.s, r.a) = r.q;
    table.visits(r.s, r.a) = r.visits;
  }
  return table;
}

void write_qtable(const QTable& table, const std::string& path) {
  write_file(path, qtable_csv(table));
}

QTable read_qtable(const std::string& path) { return parse_qtable_csv(read_file(path)); }

}  // namespace aquactl
