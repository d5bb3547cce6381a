#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aquactl/qlearning.hpp"

namespace fixture {

struct MdpTables {
  std::vector<std::vector<std::size_t>> next;
  std::vector<std::vector<double>> reward;
  std::vector<bool> terminal;
};

/// 0 -a0-> 1 -a0-> 2 (terminal); a1 loops back.
inline MdpTables chain3() {
  return {{{1, 0}, {2, 0}, {2, 2}}, {{1.0, 0.5}, {2.0, 0.0}, {0.0, 0.0}}, {false, false, true}};
}

/// Ring of 12 states, state 11 terminal. a0 steps by one, a1 jumps by five,
/// a2 stays. Rewards are a fixed smooth function of (s, a).
inline MdpTables ring12() {
  MdpTables t;
  for (std::size_t s = 0; s < 12; ++s) {
    t.next.push_back({(s + 1) % 12, (s + 5) % 12, s});
    std::vector<double> r;
    for (std::size_t a = 0; a < 3; ++a) r.push_back(std::sin(1.7 * double(s) + 0.9 * double(a)));
    t.reward.push_back(r);
    t.terminal.push_back(s == 11);
  }
  return t;
}

inline aquactl::FiniteMdp make_mdp(const MdpTables& t, std::size_t max_steps = 30) {
  aquactl::FiniteMdp mdp(t.next, t.reward, t.terminal, 0, max_steps);
  mdp.set_exploring_starts(true);
  return mdp;
}

/// Schedule that keeps exploring until Q has settled.
inline aquactl::QLearningConfig oracle_training(double gamma) {
  aquactl::QLearningConfig c;
  c.alpha = 0.5;
  c.gamma = gamma;
  c.eps0 = 1.0;
  c.t_eps = 50;
  c.eps_min = 0.5;
  c.patience = 10;
  c.value_tolerance = 1e-10;
  c.max_episodes = 200000;
  c.seed = 3;
  return c;
}

/// FNV-1a 64 of a byte string.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Checksum of the MPC trajectory CSV for the exported default scenario.
/// Regenerate deliberately whenever the numerics change.
inline constexpr std::uint64_t kGoldenDefaultMpc = 0x5e11ac155cae4644ULL;

}  // namespace fixture
