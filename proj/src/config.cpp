#include "aquactl/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "aquactl/error.hpp"
#include "aquactl/rng.hpp"
#include "aquactl/text.hpp"

namespace aquactl {

namespace pt = boost::property_tree;

namespace {

constexpr std::array<const char*, kChannelCount> kEnvChannels = {"T", "DO", "UIA", "rho"};

std::string env_kind_name(EnvProfile::Kind k) {
  switch (k) {
    case EnvProfile::Kind::constant: return "constant";
    case EnvProfile::Kind::sinusoidal: return "sinusoidal";
    case EnvProfile::Kind::table: return "table";
  }
  return "constant";
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_short(xs[i]);
  }
  return out;
}

/// Reads one INI section, remembering which keys were consumed so the rest
/// can be reported as unknown.
class SectionReader {
 public:
  SectionReader(const pt::ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

  template <typename Parse>
  void read(const char* key, Parse&& parse) {
    used_.insert(key);
    if (node_ == nullptr) return;
    const auto it = node_->find(key);
    if (it == node_->not_found()) return;
    try {
      parse(it->second.data());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(name_ + "." + key, e.what());
    }
  }

  void num(const char* key, double& x) {
    read(key, [&](const std::string& v) { x = parse_double(v); });
  }
  void integer(const char* key, int& x) {
    read(key, [&](const std::string& v) {
      const std::int64_t i = parse_int(v);
      if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max())
        throw std::invalid_argument("out of range");
      x = static_cast<int>(i);
    });
  }
  void integer(const char* key, std::int64_t& x) {
    read(key, [&](const std::string& v) { x = parse_int(v); });
  }
  void u64(const char* key, std::uint64_t& x) {
    read(key, [&](const std::string& v) { x = parse_uint(v); });
  }
  void boolean(const char* key, bool& x) {
    read(key, [&](const std::string& v) { x = parse_bool(v); });
  }
  void list(const char* key, std::vector<double>& x) {
    read(key, [&](const std::string& v) { x = parse_double_list(v); });
  }
  void text(const char* key, std::string& x) {
    read(key, [&](const std::string& v) { x = std::string(trim(v)); });
  }
  /// "ambient" or a number.
  void ambient_or_num(const char* key, std::optional<double>& x) {
    read(key, [&](const std::string& v) {
      if (trim(v) == "ambient")
        x.reset();
      else
        x = parse_double(v);
    });
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, child] : *node_) {
      if (!child.empty()) throw ConfigError(name_ + "." + key, "nested keys are not supported");
      if (!used_.count(key)) throw ConfigError(name_ + "." + key, "unknown key");
    }
  }

 private:
  const pt::ptree* node_;
  std::string name_;
  std::set<std::string> used_;
};

class IniWriter {
 public:
  void section(const std::string& name) {
    if (!out_.empty()) out_ += '\n';
    out_ += '[' + name + "]\n";
  }
  void kv(const std::string& key, const std::string& value) {
    out_ += key + " = " + value + '\n';
  }
  void num(const std::string& key, double x) { kv(key, format_short(x)); }
  void integer(const std::string& key, std::int64_t x) { kv(key, std::to_string(x)); }
  void boolean(const std::string& key, bool x) { kv(key, x ? "true" : "false"); }
  void list(const std::string& key, const std::vector<double>& xs) { kv(key, join(xs)); }
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

void read_params(SectionReader& r, GrowthParams& p) {
  r.num("m", p.m);
  r.num("n", p.n);
  r.num("b", p.b);
  r.num("a", p.a);
  r.num("h", p.h);
  r.num("k_min", p.k_min);
  r.num("j", p.j);
  r.num("kappa", p.kappa);
  r.num("T_opt", p.T_opt);
  r.num("T_min", p.T_min);
  r.num("T_max", p.T_max);
  r.num("UIA_crit", p.UIA_crit);
  r.num("UIA_max", p.UIA_max);
  r.num("DO_lo", p.DO_lo);
  r.num("DO_hi", p.DO_hi);
  r.num("Z", p.Z);
  r.num("beta", p.beta);
  r.num("eta", p.eta);
  r.num("mortality_scale", p.mortality_scale);
  r.num("R_frac", p.R_frac);
}

void write_params(IniWriter& w, const GrowthParams& p) {
  w.num("m", p.m);
  w.num("n", p.n);
  w.num("b", p.b);
  w.num("a", p.a);
  w.num("h", p.h);
  w.num("k_min", p.k_min);
  w.num("j", p.j);
  w.num("kappa", p.kappa);
  w.num("T_opt", p.T_opt);
  w.num("T_min", p.T_min);
  w.num("T_max", p.T_max);
  w.num("UIA_crit", p.UIA_crit);
  w.num("UIA_max", p.UIA_max);
  w.num("DO_lo", p.DO_lo);
  w.num("DO_hi", p.DO_hi);
  w.num("Z", p.Z);
  w.num("beta", p.beta);
  w.num("eta", p.eta);
  w.num("mortality_scale", p.mortality_scale);
  w.num("R_frac", p.R_frac);
}

void read_loop(SectionReader& r, LoopBinding& b) {
  r.read("channel", [&](const std::string& v) { b.channel = channel_from_string(std::string(trim(v))); });
  r.num("setpoint", b.setpoint);
  r.num("feed", b.feed);
}

void write_loop(IniWriter& w, const LoopBinding& b) {
  w.kv("channel", to_string(b.channel));
  w.num("setpoint", b.setpoint);
  w.num("feed", b.feed);
}

void read_grid(SectionReader& r, WeightGrid& g) {
  r.num("w_lower", g.lower);
  r.num("w_upper", g.upper);
  r.integer("bins", g.bins);
}

void write_grid(IniWriter& w, const WeightGrid& g) {
  w.num("w_lower", g.lower);
  w.num("w_upper", g.upper);
  w.integer("bins", g.bins);
}

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

}  // namespace

EnvProfile EnvSpec::build(std::uint64_t run_seed) const {
  EnvProfile p;
  switch (kind) {
    case EnvProfile::Kind::constant:
      p = EnvProfile::constant({waves[0].mean, waves[1].mean, waves[2].mean, waves[3].mean});
      break;
    case EnvProfile::Kind::sinusoidal:
      p = EnvProfile::sinusoidal(waves[0], waves[1], waves[2], waves[3]);
      break;
    case EnvProfile::Kind::table:
      p = EnvProfile::table(read_env_table(table_path));
      break;
  }
  for (std::size_t c = 0; c < kChannelCount; ++c) p.with_noise(static_cast<Channel>(c), noise[c]);
  p.with_noise_seed(derive_seed(run_seed, "environment"));
  return p;
}

Scenario::Scenario() {
  mpc.bounds.lower = Eigen::Vector3d(0.0, 24.0, 1.0);
  mpc.bounds.upper = Eigen::Vector3d(1.0, 33.0, 8.0);

  pid.kp = 0.05;
  pid.ki = 0.01;
  pid.kd = 0.0;
  pid.u_min = 0.0;
  pid.u_max = 1.0;
  pid.integral_min = -100.0;
  pid.integral_max = 100.0;

  mdp.horizon = tf - t0;
  qlearning.max_episodes = 2000;
}

SimConfig Scenario::sim_config() const {
  SimConfig c;
  c.t0 = t0;
  c.tf = tf;
  c.dt = dt;
  c.integrator = integrator;
  c.seed = seed;
  if (form == ModelForm::individual)
    c.initial = Individual{w0};
  else
    c.initial = Population{xi0, p0};
  c.stocking = stocking;
  c.env = env.build(seed);
  c.params = params;
  c.mortality = mortality;
  return c;
}

MpcConfig Scenario::mpc_config() const {
  MpcConfig c = mpc;
  c.seed = mpc_seed.value_or(derive_seed(seed, "mpc"));
  return c;
}

QLearningConfig Scenario::qlearning_config() const {
  QLearningConfig c = qlearning;
  c.seed = derive_seed(seed, "qlearning");
  return c;
}

MdpSpec Scenario::mdp_spec() const {
  MdpSpec m = mdp;
  m.w0 = w0;
  return m;
}

RlMpcConfig Scenario::rlmpc_config() const {
  RlMpcConfig c = rlmpc;
  c.mpc = mpc_config();
  c.q.seed = derive_seed(seed, "rlmpc");
  return c;
}

void Scenario::validate() const {
  if (name.empty() || name.find_first_of("/\\ ,") != std::string::npos)
    throw ConfigError("run.name", "must be a non-empty file-name-safe word");
  if (std::find(kControllerNames.begin(), kControllerNames.end(), controller) ==
      kControllerNames.end())
    throw ConfigError("run.controller", "unknown controller '" + controller + "'");
  if (!(f_ref >= 0 && f_ref <= 1)) throw ConfigError("run.f_ref", "must lie in [0, 1]");
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const std::string ch = kEnvChannels[c];
    if (!(env.noise[c] >= 0)) throw ConfigError("environment." + ch + "_noise", "must be non-negative");
    if (env.kind == EnvProfile::Kind::sinusoidal && !(env.waves[c].period > 0))
      throw ConfigError("environment." + ch + "_period", "must be positive");
  }
  if (env.kind == EnvProfile::Kind::table && env.table_path.empty())
    throw ConfigError("environment.table", "a table profile needs a file path");
  try {
    sim_config().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(env.kind == EnvProfile::Kind::table ? "environment.table" : "run", e.what());
  }

  if (!(constant.f >= 0 && constant.f <= 1))
    throw ConfigError("controller.constant.f", "must lie in [0, 1]");
  if (constant.DO && !(*constant.DO >= 0))
    throw ConfigError("controller.constant.DO", "must be non-negative");
  bangbang.validate();
  if (!(bangbang_loop.feed >= 0 && bangbang_loop.feed <= 1))
    throw ConfigError("controller.bangbang.feed", "must lie in [0, 1]");
  pid.validate();
  if (!(pid_loop.feed >= 0 && pid_loop.feed <= 1))
    throw ConfigError("controller.pid.feed", "must lie in [0, 1]");
  mpc_config().validate();
  if (!(w0 >= mpc.w_lo && w0 <= mpc.w_hi) && form == ModelForm::individual)
    throw ConfigError("controller.mpc.w_lo", "initial weight lies outside the state bounds");
  qlearning_config().validate();
  mdp_spec().validate();
  rlmpc_config().validate();
}

Scenario parse_scenario(std::string_view text) {
  pt::ptree root;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  static const std::set<std::string> known = {
      "run", "model", "environment", "controller.constant", "controller.bangbang",
      "controller.pid", "controller.mpc", "controller.qlearning", "controller.rlmpc"};
  for (const auto& [name, node] : root) {
    if (!known.count(name)) throw ConfigError(name, "unknown section");
    if (node.empty() && !node.data().empty())
      throw ConfigError(name, "keys must appear inside a section");
  }

  Scenario s;
  {
    SectionReader r(child(root, "run"), "run");
    r.text("name", s.name);
    r.text("controller", s.controller);
    r.num("f_ref", s.f_ref);
    r.num("t0", s.t0);
    r.num("tf", s.tf);
    r.num("dt", s.dt);
    r.read("integrator", [&](const std::string& v) {
      const auto t = trim(v);
      if (t == "rk4")
        s.integrator = Integrator::rk4;
      else if (t == "euler")
        s.integrator = Integrator::euler;
      else
        throw std::invalid_argument("expected rk4 or euler");
    });
    r.u64("seed", s.seed);
    r.read("model", [&](const std::string& v) {
      const auto t = trim(v);
      if (t == "individual")
        s.form = ModelForm::individual;
      else if (t == "population")
        s.form = ModelForm::population;
      else
        throw std::invalid_argument("expected individual or population");
    });
    r.num("w0", s.w0);
    r.num("xi0", s.xi0);
    r.integer("p0", s.p0);
    r.integer("p_s", s.stocking.p_s);
    r.num("xi_i", s.stocking.xi_i);
    r.boolean("mortality", s.mortality);
    r.finish();
  }
  {
    SectionReader r(child(root, "model"), "model");
    read_params(r, s.params);
    r.finish();
  }
  {
    SectionReader r(child(root, "environment"), "environment");
    r.read("kind", [&](const std::string& v) {
      const auto t = trim(v);
      if (t == "constant")
        s.env.kind = EnvProfile::Kind::constant;
      else if (t == "sinusoidal")
        s.env.kind = EnvProfile::Kind::sinusoidal;
      else if (t == "table")
        s.env.kind = EnvProfile::Kind::table;
      else
        throw std::invalid_argument("expected constant, sinusoidal or table");
    });
    r.text("table", s.env.table_path);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      const std::string ch = kEnvChannels[c];
      auto& wave = s.env.waves[c];
      r.num((ch + "_mean").c_str(), wave.mean);
      r.num((ch + "_amplitude").c_str(), wave.amplitude);
      r.num((ch + "_period").c_str(), wave.period);
      r.num((ch + "_phase").c_str(), wave.phase);
      r.num((ch + "_noise").c_str(), s.env.noise[c]);
    }
    r.finish();
  }
  {
    SectionReader r(child(root, "controller.constant"), "controller.constant");
    r.num("f", s.constant.f);
    r.ambient_or_num("T", s.constant.T);
    r.ambient_or_num("DO", s.constant.DO);
    r.finish();
  }
  {
    SectionReader r(child(root, "controller.bangbang"), "controller.bangbang");
    read_loop(r, s.bangbang_loop);
    r.num("on", s.bangbang.on);
    r.num("off", s.bangbang.off);
    r.num("deadband", s.bangbang.deadband);
    r.finish();
  }
  {
    SectionReader r(child(root, "controller.pid"), "controller.pid");
    read_loop(r, s.pid_loop);
    r.num("kp", s.pid.kp);
    r.num("ki", s.pid.ki);
    r.num("kd", s.pid.kd);
    r.num("u_min", s.pid.u_min);
    r.num("u_max", s.pid.u_max);
    r.num("integral_min", s.pid.integral_min);
    r.num("integral_max", s.pid.integral_max);
    r.boolean("derivative_filter", s.pid.derivative_filter);
    r.num("filter_coeff", s.pid.filter_coeff);
    r.finish();
  }
  {
    SectionReader r(child(root, "controller.mpc"), "controller.mpc");
    auto& m = s.mpc;
    r.integer("N", m.N);
    r.integer("M", m.M);
    r.integer("S", m.samples);
    r.integer("iterations", m.iterations);
    r.num("elite_frac", m.elite_frac);
    r.read("sampler", [&](const std::string& v) {
      const auto t = trim(v);
      if (t == "cross-entropy")
        m.sampler = Sampler::cross_entropy;
      else if (t == "exhaustive")
        m.sampler = Sampler::exhaustive;
      else
        throw std::invalid_argument("expected cross-entropy or exhaustive");
    });
    r.read("cost", [&](const std::string& v) {
      const auto t = trim(v);
      if (t == "tracking")
        m.cost = StageCostKind::tracking;
      else if (t == "economic")
        m.cost = StageCostKind::economic;
      else
        throw std::invalid_argument("expected tracking or economic");
    });
    r.num("q_w", m.q_w);
    r.num("r_f", m.r_f);
    r.num("rate_weight", m.rate_weight);
    r.num("price", m.price);
    r.num("feed_cost", m.feed_cost);
    r.num("f_min", m.bounds.lower(0));
    r.num("f_max", m.bounds.upper(0));
    r.num("T_min", m.bounds.lower(1));
    r.num("T_max", m.bounds.upper(1));
    r.num("DO_min", m.bounds.lower(2));
    r.num("DO_max", m.bounds.upper(2));
    r.num("w_lo", m.w_lo);
    r.num("w_hi", m.w_hi);
    r.list("f_lattice", m.lattice[0]);
    r.list("T_lattice", m.lattice[1]);
    r.list("DO_lattice", m.lattice[2]);
    r.read("seed", [&](const std::string& v) { s.mpc_seed = parse_uint(v); });
    r.finish();
  }
  {
    SectionReader r(child(root, "controller.qlearning"), "controller.qlearning");
    auto& q = s.qlearning;
    r.num("alpha", q.alpha);
    r.num("gamma", q.gamma);
    r.num("eps0", q.eps0);
    r.num("t_eps", q.t_eps);
    r.num("eps_min", q.eps_min);
    r.read("variant", [&](const std::string& v) {
      q.variant = epsilon_variant_from_string(std::string(trim(v)));
    });
    r.integer("max_episodes", q.max_episodes);
    r.integer("patience", q.patience);
    r.num("value_tolerance", q.value_tolerance);
    read_grid(r, s.mdp.grid);
    r.integer("day_bins", s.mdp.day_bins);
    r.list("f_levels", s.mdp.f_levels);
    r.list("T_levels", s.mdp.T_levels);
    r.num("target", s.mdp.target);
    // Without an explicit horizon the episode spans the run.
    s.mdp.horizon = s.tf - s.t0;
    r.num("horizon", s.mdp.horizon);
    r.num("feed_cost", s.mdp.feed_cost);
    r.num("bonus", s.mdp.bonus);
    r.finish();
  }
  {
    SectionReader r(child(root, "controller.rlmpc"), "controller.rlmpc");
    auto& h = s.rlmpc;
    r.num("alpha", h.q.alpha);
    r.list("f_levels", h.lattice.f);
    r.list("T_levels", h.lattice.T);
    r.list("DO_levels", h.lattice.DO);
    read_grid(r, h.grid);
    r.num("guide0", h.guide0);
    r.num("guide_min", h.guide_min);
    r.num("t_guide", h.t_guide);
    r.integer("episodes", h.episodes);
    r.finish();
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("config", e.what());
  }
  return parse_scenario(text);
}

std::string export_scenario(const Scenario& s) {
  IniWriter w;
  w.section("run");
  w.kv("name", s.name);
  w.kv("controller", s.controller);
  w.num("f_ref", s.f_ref);
  w.num("t0", s.t0);
  w.num("tf", s.tf);
  w.num("dt", s.dt);
  w.kv("integrator", s.integrator == Integrator::rk4 ? "rk4" : "euler");
  w.kv("seed", std::to_string(s.seed));
  w.kv("model", s.form == ModelForm::individual ? "individual" : "population");
  w.num("w0", s.w0);
  w.num("xi0", s.xi0);
  w.integer("p0", s.p0);
  w.integer("p_s", s.stocking.p_s);
  w.num("xi_i", s.stocking.xi_i);
  w.boolean("mortality", s.mortality);

  w.section("model");
  write_params(w, s.params);

  w.section("environment");
  w.kv("kind", env_kind_name(s.env.kind));
  w.kv("table", s.env.table_path);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const std::string ch = kEnvChannels[c];
    w.num(ch + "_mean", s.env.waves[c].mean);
    w.num(ch + "_amplitude", s.env.waves[c].amplitude);
    w.num(ch + "_period", s.env.waves[c].period);
    w.num(ch + "_phase", s.env.waves[c].phase);
    w.num(ch + "_noise", s.env.noise[c]);
  }

  w.section("controller.constant");
  w.num("f", s.constant.f);
  w.kv("T", s.constant.T ? format_short(*s.constant.T) : "ambient");
  w.kv("DO", s.constant.DO ? format_short(*s.constant.DO) : "ambient");

  w.section("controller.bangbang");
  write_loop(w, s.bangbang_loop);
  w.num("on", s.bangbang.on);
  w.num("off", s.bangbang.off);
  w.num("deadband", s.bangbang.deadband);

  w.section("controller.pid");
  write_loop(w, s.pid_loop);
  w.num("kp", s.pid.kp);
  w.num("ki", s.pid.ki);
  w.num("kd", s.pid.kd);
  w.num("u_min", s.pid.u_min);
  w.num("u_max", s.pid.u_max);
  w.num("integral_min", s.pid.integral_min);
  w.num("integral_max", s.pid.integral_max);
  w.boolean("derivative_filter", s.pid.derivative_filter);
  w.num("filter_coeff", s.pid.filter_coeff);

  const auto& m = s.mpc;
  w.section("controller.mpc");
  w.integer("N", m.N);
  w.integer("M", m.M);
  w.integer("S", m.samples);
  w.integer("iterations", m.iterations);
  w.num("elite_frac", m.elite_frac);
  w.kv("sampler", to_string(m.sampler));
  w.kv("cost", to_string(m.cost));
  w.num("q_w", m.q_w);
  w.num("r_f", m.r_f);
  w.num("rate_weight", m.rate_weight);
  w.num("price", m.price);
  w.num("feed_cost", m.feed_cost);
  w.num("f_min", m.bounds.lower(0));
  w.num("f_max", m.bounds.upper(0));
  w.num("T_min", m.bounds.lower(1));
  w.num("T_max", m.bounds.upper(1));
  w.num("DO_min", m.bounds.lower(2));
  w.num("DO_max", m.bounds.upper(2));
  w.num("w_lo", m.w_lo);
  w.num("w_hi", m.w_hi);
  w.list("f_lattice", m.lattice[0]);
  w.list("T_lattice", m.lattice[1]);
  w.list("DO_lattice", m.lattice[2]);

  const auto& q = s.qlearning;
  w.section("controller.qlearning");
  w.num("alpha", q.alpha);
  w.num("gamma", q.gamma);
  w.num("eps0", q.eps0);
  w.num("t_eps", q.t_eps);
  w.num("eps_min", q.eps_min);
  w.kv("variant", to_string(q.variant));
  w.integer("max_episodes", q.max_episodes);
  w.integer("patience", q.patience);
  w.num("value_tolerance", q.value_tolerance);
  write_grid(w, s.mdp.grid);
  w.integer("day_bins", s.mdp.day_bins);
  w.list("f_levels", s.mdp.f_levels);
  w.list("T_levels", s.mdp.T_levels);
  w.num("target", s.mdp.target);
  w.num("horizon", s.mdp.horizon);
  w.num("feed_cost", s.mdp.feed_cost);
  w.num("bonus", s.mdp.bonus);

  const auto& h = s.rlmpc;
  w.section("controller.rlmpc");
  w.num("alpha", h.q.alpha);
  w.list("f_levels", h.lattice.f);
  w.list("T_levels", h.lattice.T);
  w.list("DO_levels", h.lattice.DO);
  write_grid(w, h.grid);
  w.num("guide0", h.guide0);
  w.num("guide_min", h.guide_min);
  w.num("t_guide", h.t_guide);
  w.integer("episodes", h.episodes);
  return w.str();
}

}  // namespace aquactl
