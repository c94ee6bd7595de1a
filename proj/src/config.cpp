#include "mcfi/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mcfi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || p != end) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || p != end) {
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

// Consumes keys as they are read so that leftovers can be reported.
class Reader {
 public:
  explicit Reader(KeyValues values) : values_(std::move(values)) {}

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string v = it->second;
    values_.erase(it);
    return v;
  }
  double number(const std::string& key, double fallback) {
    auto v = take(key);
    return v ? to_double(key, *v) : fallback;
  }
  int integer(const std::string& key, int fallback) {
    auto v = take(key);
    if (!v) return fallback;
    const long long n = to_integer(key, *v);
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
      throw ConfigError("key '" + key + "' is out of range");
    }
    return static_cast<int>(n);
  }
  std::string text(const std::string& key, const std::string& fallback) { return take(key).value_or(fallback); }
  std::optional<std::vector<double>> numbers(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split(*v, ',')) out.push_back(to_double(key, item));
    return out;
  }
  void finish() const {
    if (!values_.empty()) throw ConfigError("unknown configuration key '" + values_.begin()->first + "'");
  }

 private:
  KeyValues values_;
};

DesignVector design_vector(const std::string& key, const std::vector<double>& values, int size) {
  if (values.size() == 1) return DesignVector::Constant(size, values[0]);
  if (static_cast<int>(values.size()) != size) {
    throw ConfigError("key '" + key + "' has " + std::to_string(values.size()) + " entries, expected " +
                      std::to_string(size) + " (or one to broadcast)");
  }
  return Eigen::Map<const DesignVector>(values.data(), size);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

std::string config_hash(const KeyValues& values) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [k, v] : values) feed(k + "=" + v + "\n");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_string(Scenario s) { return s == Scenario::Burgers1D ? "burgers1d" : "burgers2d"; }

Grid RunConfig::grid() const {
  return scenario == Scenario::Burgers1D ? Grid::line(nx) : Grid::square(nx, ny);
}

DesignSpec RunConfig::design() const {
  return scenario == Scenario::Burgers1D ? DesignSpec::gaussian_bumps(bumps, lower, upper)
                                         : DesignSpec::strips(strips, lower, upper);
}

StateVector RunConfig::initial_condition() const {
  const Grid g = grid();
  return initial_state == InitialState::Zero ? StateVector::Zero(g.state_size()) : mcfi::initial_condition(g);
}

int RunConfig::design_size() const {
  return scenario == Scenario::Burgers1D ? static_cast<int>(bumps.centers.size()) : strips.count;
}

RunConfig make_run_config(const KeyValues& values, const std::filesystem::path& base_dir) {
  RunConfig c;
  KeyValues hashed = values;
  hashed.erase("output.dir");
  c.hash = config_hash(hashed);

  Reader r(values);
  const std::string scenario = r.text("scenario", "");
  if (scenario == "burgers1d") {
    c.scenario = Scenario::Burgers1D;
  } else if (scenario == "burgers2d") {
    c.scenario = Scenario::Burgers2D;
    c.solver = SolverConfig::burgers2d();
    c.nx = c.ny = 201;
    c.lower = 0.1;
    c.upper = 4.0;
    c.target_source = TargetSource::Profile;
  } else {
    throw ConfigError("scenario must be burgers1d or burgers2d, got '" + scenario + "'");
  }
  const bool is1d = c.scenario == Scenario::Burgers1D;

  c.nx = r.integer("grid.nx", c.nx);
  c.ny = is1d ? 1 : r.integer("grid.ny", c.nx);
  if (c.nx < 3 || c.ny < (is1d ? 1 : 3)) throw ConfigError("grid needs at least 3 nodes per direction");

  c.solver.viscosity = r.number("solver.viscosity", c.solver.viscosity);
  c.solver.beta = r.number("solver.beta", c.solver.beta);
  c.solver.cfl = r.number("solver.cfl", c.solver.cfl);
  c.solver.t_end = r.number("solver.t_end", c.solver.t_end);
  if (auto p = r.take("solver.dt_policy")) {
    if (*p == "fixed") {
      c.solver.dt_policy = DtPolicy::FixedFromInitial;
    } else if (*p == "adaptive") {
      c.solver.dt_policy = DtPolicy::AdaptiveCfl;
    } else {
      throw ConfigError("solver.dt_policy must be fixed or adaptive");
    }
  }
  c.solver.validate();

  if (is1d) {
    if (auto v = r.numbers("design.bumps.centers")) c.bumps.centers = *v;
    c.bumps.width = r.number("design.bumps.width", c.bumps.width);
    c.bumps.baseline = r.number("design.bumps.baseline", c.bumps.baseline);
    if (c.bumps.centers.empty() || !(c.bumps.width > 0.0)) throw ConfigError("invalid Gaussian bump layout");
  } else {
    c.strips.count = r.integer("design.strips.count", c.strips.count);
    c.strips.band_lo = r.number("design.strips.band_lo", c.strips.band_lo);
    c.strips.band_hi = r.number("design.strips.band_hi", c.strips.band_hi);
    c.strips.outside_value = r.number("design.strips.outside", c.strips.outside_value);
    if (c.strips.count < 1 || !(c.strips.band_hi > c.strips.band_lo)) throw ConfigError("invalid strip layout");
  }
  c.lower = r.number("design.lower", c.lower);
  c.upper = r.number("design.upper", c.upper);
  if (!(c.lower <= c.upper)) throw ConfigError("design.lower exceeds design.upper");
  const int n = c.design_size();

  auto profile_design = [&](const std::string& key) {
    if (is1d) throw ConfigError("key '" + key + "' applies to burgers2d only");
    return strip_profile(c.strips, strip_profile_from_string(*r.take(key)));
  };
  const auto init = r.numbers("design.initial");
  const bool init_profile = values.count("design.initial_profile") > 0;
  if (init && init_profile) throw ConfigError("give design.initial or design.initial_profile, not both");
  if (init) {
    c.initial_design = design_vector("design.initial", *init, n);
  } else if (init_profile) {
    c.initial_design = profile_design("design.initial_profile");
  } else {
    c.initial_design = is1d ? DesignVector::Zero(n) : strip_profile(c.strips, StripProfile::Ramp);
  }

  const std::string ic = r.text("forward.ic", "default");
  if (ic == "default") {
    c.initial_state = InitialState::Default;
  } else if (ic == "zero") {
    c.initial_state = InitialState::Zero;
  } else {
    throw ConfigError("forward.ic must be default or zero");
  }
  if (auto t = r.numbers("forward.times")) {
    c.output_times = *t;
  } else {
    for (double t : is1d ? std::vector<double>{0.0, 0.8, 1.6, 2.4} : std::vector<double>{0.0, 0.32, 0.97}) {
      if (t <= c.solver.t_end) c.output_times.push_back(t);
    }
  }
  for (double t : c.output_times) {
    if (!(t >= 0.0 && t <= c.solver.t_end)) throw ConfigError("forward.times must lie in [0, t_end]");
  }

  c.objective = objective_kind_from_string(r.text("objective.kind", to_string(c.objective)));
  c.mode_count = r.integer("objective.modes", c.mode_count);
  c.lambda = r.number("objective.lambda", c.lambda);
  {
    ObjectiveSpec probe;
    probe.kind = c.objective;
    probe.mode_count = c.mode_count;
    probe.lambda = c.lambda;
    if (c.mode_count < 1) throw ConfigError("objective.modes must be at least 1");
    if (!(c.lambda >= 0.0)) throw ConfigError("objective.lambda must be non-negative");
    c.target_modes = std::max(1, probe.modes_required());
  }

  const std::string source = r.text("target.source", c.target_source == TargetSource::Design ? "design" : "profile");
  if (source == "design") {
    c.target_source = TargetSource::Design;
  } else if (source == "profile") {
    c.target_source = TargetSource::Profile;
    if (is1d) throw ConfigError("target.source = profile applies to burgers2d only");
  } else if (source == "files") {
    c.target_source = TargetSource::Files;
  } else {
    throw ConfigError("target.source must be design, profile or files");
  }
  if (auto v = r.numbers("target.design")) {
    c.target_design = design_vector("target.design", *v, n);
  } else if (is1d) {
    c.target_design = design_vector("target.design", {0.25, -0.15, 0.05, 0.15}, n);
  }
  if (c.target_source == TargetSource::Design && c.target_design.size() == 0) {
    throw ConfigError("target.source = design requires target.design");
  }
  if (auto p = r.take("target.profile")) {
    if (is1d) throw ConfigError("key 'target.profile' applies to burgers2d only");
    c.target_profile = strip_profile_from_string(*p);
  }
  if (auto d = r.take("target.dir")) {
    c.target_dir = std::filesystem::path(*d).is_absolute() ? std::filesystem::path(*d) : base_dir / *d;
  }
  if (c.target_source == TargetSource::Files && c.target_dir.empty()) {
    throw ConfigError("target.source = files requires target.dir");
  }
  c.target_modes = std::max(c.target_modes, r.integer("target.modes", c.target_modes));

  c.fd_step = r.number("gradcheck.h", c.fd_step);
  if (!(c.fd_step > 0.0)) throw ConfigError("gradcheck.h must be positive");
  if (auto comps = r.numbers("gradcheck.components")) {
    for (double v : *comps) {
      const int k = static_cast<int>(v);
      if (k != v || k < 1 || k > n) {
        throw ConfigError("gradcheck.components entries must be integers in 1.." + std::to_string(n));
      }
      c.fd_components.push_back(k - 1);
    }
  }
  c.fd_sample = r.integer("gradcheck.sample", 0);
  if (c.fd_sample < 0 || c.fd_sample > n) throw ConfigError("gradcheck.sample must lie in 0.." + std::to_string(n));
  if (c.fd_sample > 0 && !c.fd_components.empty()) {
    throw ConfigError("give gradcheck.components or gradcheck.sample, not both");
  }
  c.threshold = r.number("gradcheck.threshold", c.threshold);
  if (!(c.threshold >= 0.0)) throw ConfigError("gradcheck.threshold must be non-negative");

  OptimizeOptions& o = c.optimize;
  o.max_iterations = r.integer("optimize.max_iterations", o.max_iterations);
  o.gradient_tolerance = r.number("optimize.gradient_tolerance", o.gradient_tolerance);
  o.objective_tolerance = r.number("optimize.objective_tolerance", o.objective_tolerance);
  o.armijo = r.number("optimize.armijo", o.armijo);
  o.backtrack = r.number("optimize.backtrack", o.backtrack);
  o.max_backtracks = r.integer("optimize.max_backtracks", o.max_backtracks);
  o.memory = r.integer("optimize.memory", o.memory);
  o.initial_step_fraction = r.number("optimize.initial_step_fraction", o.initial_step_fraction);
  o.validate();

  const long long seed = to_integer("seed", r.text("seed", "0"));
  if (seed < 0) throw ConfigError("seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (auto d = r.take("output.dir")) c.output_dir = *d;

  r.finish();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const KeyValues& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  KeyValues values = parse_key_values(text.str());
  for (const auto& [k, v] : overrides) values[k] = v;
  return make_run_config(values, path.parent_path());
}

}  // namespace mcfi
