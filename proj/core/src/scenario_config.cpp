#include "rendezvous/scenario_config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rendezvous/errors.hpp"

namespace rdv {

using nlohmann::json;

namespace {

/// Walks one JSON object, remembering which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError("expected an object", path_);
  }

  ~Section() = default;
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool has(const std::string& key) const { return node_.contains(key); }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError("expected a number", field(key));
      out = v->get<double>();
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError("expected a number", field(key));
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError("expected an integer", field(key));
      out = v->get<int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError("expected true or false", field(key));
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError("expected a string", field(key));
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) throw ConfigError("expected an array of numbers", field(key));
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError("expected an array of numbers", field(key));
        out.push_back(e.get<double>());
      }
    }
  }

  void vec2(const std::string& key, Vec2& out) {
    std::vector<double> xs;
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    numbers(key, xs);
    if (xs.size() != 2) throw ConfigError("expected [x, y]", field(key));
    out = Vec2(xs[0], xs[1]);
  }

  void interval(const std::string& key, std::optional<Interval>& out) {
    std::vector<double> xs;
    if (!has(key) || node_.at(key).is_null()) {
      seen_.insert(key);
      return;
    }
    numbers(key, xs);
    if (xs.size() != 2) throw ConfigError("expected [lo, hi]", field(key));
    out = Interval{xs[0], xs[1]};
  }

  /// Rejects keys nobody asked for.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown field", field(it.key()));
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const char* field, const std::string& constraint) {
  if (!ok) throw ConfigError("violates constraint " + constraint, field);
}

bool finite(double v) { return std::isfinite(v); }

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

ScenarioConfig parse_scenario(const json& doc) {
  ScenarioConfig cfg;
  Section root(doc, "");
  root.string("name", cfg.name);
  if (const json* seed = root.get("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0))
      throw ConfigError("expected a non-negative integer", "seed");
    cfg.seed = seed->get<std::uint64_t>();
  }

  if (const json* node = root.get("path")) {
    Section s(*node, "path");
    s.string("kind", cfg.path.kind);
    std::string mode = "paper-literal";
    s.string("mode", mode);
    if (mode == "paper-literal") cfg.path.mode = PathMode::PaperLiteral;
    else if (mode == "arc-length") cfg.path.mode = PathMode::ArcLength;
    else throw ConfigError("expected \"paper-literal\" or \"arc-length\"", "path.mode");
    s.numbers("x", cfg.path.x);
    s.numbers("y", cfg.path.y);
    s.interval("theta_range", cfg.path.theta_range);
    s.finish();
  }
  if (const json* node = root.get("profile")) {
    Section s(*node, "profile");
    s.string("kind", cfg.profile.kind);
    s.number("initial_speed", cfg.profile.initial_speed);
    s.number("zero_time", cfg.profile.zero_time);
    s.numbers("coefficients", cfg.profile.coefficients);
    std::optional<Interval> range;
    s.interval("t_range", range);
    if (range) cfg.profile.t_range = *range;
    s.finish();
  }
  if (const json* node = root.get("behavior")) {
    Section s(*node, "behavior");
    int degree = static_cast<int>(cfg.behavior.basis_degree);
    s.integer("basis_degree", degree);
    if (degree < 0 || degree > 8) throw ConfigError("violates constraint 0 <= basis_degree <= 8", "behavior.basis_degree");
    cfg.behavior.basis_degree = static_cast<unsigned>(degree);
    s.number("prior_scale", cfg.behavior.prior_scale);
    s.optional_number("regression_sigma", cfg.behavior.regression_sigma);
    s.finish();
  }
  if (const json* node = root.get("sensor")) {
    Section s(*node, "sensor");
    s.number("sigma", cfg.sensor.sigma);
    s.optional_number("sigma_pos", cfg.sensor.sigma_pos);
    s.finish();
  }
  if (const json* node = root.get("driver")) {
    Section s(*node, "driver");
    s.number("a", cfg.driver.a);
    if (const json* sched = s.get("schedule")) {
      if (!sched->is_array()) throw ConfigError("expected an array", "driver.schedule");
      for (std::size_t i = 0; i < sched->size(); ++i) {
        Section e((*sched)[i], "driver.schedule[" + std::to_string(i) + "]");
        GainChange change;
        e.number("time", change.time);
        e.number("a", change.a);
        e.finish();
        cfg.driver.schedule.push_back(change);
      }
    }
    s.finish();
  }
  if (const json* node = root.get("energy")) {
    Section s(*node, "energy");
    s.number("mass", cfg.energy.mass);
    s.number("alpha", cfg.energy.hover_constant);
    s.number("v_max", cfg.energy.v_max);
    s.number("initial_energy", cfg.initial_energy);
    s.finish();
  }
  if (const json* node = root.get("geometry")) {
    Section s(*node, "geometry");
    s.vec2("start", cfg.geometry.start);
    s.vec2("landing", cfg.geometry.landing);
    s.vec2("abort", cfg.geometry.abort_site);
    s.finish();
  }
  if (const json* node = root.get("ocp")) {
    Section s(*node, "ocp");
    s.number("t_max", cfg.ocp.t_max);
    s.number("t_c", cfg.ocp.t_c);
    s.number("lambda", cfg.ocp.lambda);
    s.number("tolerance", cfg.ocp.tolerance);
    s.integer("max_iterations", cfg.ocp.max_iterations);
    s.integer("multistart", cfg.ocp.multistart);
    s.finish();
  }
  if (const json* node = root.get("risk")) {
    Section s(*node, "risk");
    s.number("gamma_max", cfg.risk.gamma_max);
    std::string mode = "constant";
    s.string("threshold_mode", mode);
    if (mode == "constant") cfg.risk.threshold.mode = RiskThreshold::Mode::Constant;
    else if (mode == "fraction") cfg.risk.threshold.mode = RiskThreshold::Mode::FractionOfRemaining;
    else throw ConfigError("expected \"constant\" or \"fraction\"", "risk.threshold_mode");
    s.number("threshold", cfg.risk.threshold.value);
    s.boolean("abort_trigger", cfg.risk.abort_trigger);
    s.number("gamma_a", cfg.risk.gamma_a);
    s.finish();
  }
  if (const json* node = root.get("mission")) {
    Section s(*node, "mission");
    s.number("epsilon", cfg.mission.epsilon);
    s.number("sample_time", cfg.mission.sample_time);
    s.number("capture_radius", cfg.mission.capture_radius);
    s.boolean("reaim", cfg.mission.reaim);
    s.number("max_duration", cfg.mission.max_duration);
    s.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what(), "<document>");
  }
  return parse_scenario(doc);
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file " + file.string(), "<file>");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

void ScenarioConfig::validate() const {
  if (path.kind == "paper-diagonal") {
    if (!path.x.empty() || !path.y.empty()) throw ConfigError("coefficients only apply to kind \"polynomial\"", "path.x");
  } else if (path.kind == "polynomial") {
    require(!path.x.empty() && !path.y.empty(), "path.x", "non-empty coefficient lists for x and y");
    require(path.theta_range.has_value(), "path.theta_range", "required for polynomial paths");
  } else {
    throw ConfigError("expected \"paper-diagonal\" or \"polynomial\"", "path.kind");
  }
  if (path.theta_range) require(path.theta_range->hi > path.theta_range->lo, "path.theta_range", "lo < hi");

  if (profile.kind == "linear-decay") {
    require(finite(profile.initial_speed) && profile.initial_speed > 0.0, "profile.initial_speed", "> 0");
    require(finite(profile.zero_time) && profile.zero_time > 0.0, "profile.zero_time", "> 0");
  } else if (profile.kind == "polynomial") {
    require(!profile.coefficients.empty(), "profile.coefficients", "non-empty");
    require(profile.t_range.hi > profile.t_range.lo, "profile.t_range", "lo < hi");
  } else {
    throw ConfigError("expected \"linear-decay\" or \"polynomial\"", "profile.kind");
  }

  require(finite(behavior.prior_scale) && behavior.prior_scale > 0.0, "behavior.prior_scale", "> 0");
  if (behavior.regression_sigma)
    require(finite(*behavior.regression_sigma) && *behavior.regression_sigma > 0.0, "behavior.regression_sigma", "> 0");
  require(finite(sensor.sigma) && sensor.sigma >= 0.0, "sensor.sigma", ">= 0");
  if (sensor.sigma_pos) require(finite(*sensor.sigma_pos) && *sensor.sigma_pos >= 0.0, "sensor.sigma_pos", ">= 0");
  if (!behavior.regression_sigma)
    require(sensor.sigma > 0.0, "behavior.regression_sigma", "required (> 0) when sensor.sigma = 0");

  require(finite(driver.a) && driver.a >= 0.0, "driver.a", ">= 0");
  double last = -1.0;
  for (std::size_t i = 0; i < driver.schedule.size(); ++i) {
    const auto& c = driver.schedule[i];
    const std::string f = "driver.schedule[" + std::to_string(i) + "]";
    require(finite(c.a) && c.a >= 0.0, (f + ".a").c_str(), ">= 0");
    require(finite(c.time) && c.time > last, (f + ".time").c_str(), "strictly increasing and >= 0");
    last = c.time;
  }

  energy.validate();
  require(finite(initial_energy) && initial_energy > 0.0, "energy.initial_energy", "> 0");

  require(ocp.t_c > 0.0 && finite(ocp.t_c), "ocp.t_c", "t_c > 0");
  require(finite(ocp.t_max) && ocp.t_max > 2.0 * ocp.t_c, "ocp.t_max", "t_max > 2 t_c");
  require(finite(ocp.lambda) && ocp.lambda >= 0.0, "ocp.lambda", ">= 0");
  require(finite(ocp.tolerance) && ocp.tolerance > 0.0, "ocp.tolerance", "> 0");
  require(ocp.max_iterations > 0, "ocp.max_iterations", "> 0");
  require(ocp.multistart >= 1, "ocp.multistart", ">= 1");

  require(finite(risk.gamma_max) && risk.gamma_max >= 0.0, "risk.gamma_max", ">= 0");
  require(finite(risk.threshold.value) && risk.threshold.value >= 0.0, "risk.threshold", ">= 0");
  require(finite(risk.gamma_a) && risk.gamma_a >= 0.0, "risk.gamma_a", ">= 0");

  require(!std::isnan(mission.epsilon) && mission.epsilon >= 0.0, "mission.epsilon", ">= 0");
  require(finite(mission.sample_time) && mission.sample_time > 0.0, "mission.sample_time", "> 0");
  require(finite(mission.capture_radius) && mission.capture_radius > 0.0, "mission.capture_radius", "> 0");
  require(finite(mission.max_duration) && mission.max_duration > 0.0, "mission.max_duration", "> 0");

  // Building the models runs their own invariant checks (non-negative profile, finite path).
  (void)build_path();
}

PathModel ScenarioConfig::build_path() const {
  VelocityProfile prof = profile.kind == "polynomial"
                             ? VelocityProfile(Polynomial(profile.coefficients), profile.t_range)
                             : VelocityProfile::linear_decay(profile.initial_speed, profile.zero_time);
  if (path.kind == "polynomial")
    return PathModel(Polynomial(path.x), Polynomial(path.y), *path.theta_range, std::move(prof));
  return PathModel::paper_diagonal(path.mode, std::move(prof), path.theta_range);
}

BasisSpec ScenarioConfig::build_basis() const { return BasisSpec::polynomial(behavior.basis_degree); }

double ScenarioConfig::regression_noise_variance() const {
  const double s = behavior.regression_sigma.value_or(sensor.sigma);
  return s * s;
}

json to_json(const ScenarioConfig& c) {
  json path = {{"kind", c.path.kind}, {"mode", c.path.mode == PathMode::PaperLiteral ? "paper-literal" : "arc-length"}};
  if (!c.path.x.empty()) path["x"] = c.path.x;
  if (!c.path.y.empty()) path["y"] = c.path.y;
  if (c.path.theta_range) path["theta_range"] = {c.path.theta_range->lo, c.path.theta_range->hi};

  json profile = {{"kind", c.profile.kind}};
  if (c.profile.kind == "polynomial") {
    profile["coefficients"] = c.profile.coefficients;
    profile["t_range"] = {c.profile.t_range.lo, c.profile.t_range.hi};
  } else {
    profile["initial_speed"] = c.profile.initial_speed;
    profile["zero_time"] = c.profile.zero_time;
  }

  json behavior = {{"basis_degree", c.behavior.basis_degree}, {"prior_scale", c.behavior.prior_scale}};
  if (c.behavior.regression_sigma) behavior["regression_sigma"] = *c.behavior.regression_sigma;

  json sensor = {{"sigma", c.sensor.sigma}};
  if (c.sensor.sigma_pos) sensor["sigma_pos"] = *c.sensor.sigma_pos;

  json schedule = json::array();
  for (const auto& g : c.driver.schedule) schedule.push_back({{"time", g.time}, {"a", g.a}});

  return json{
      {"name", c.name},
      {"seed", c.seed},
      {"path", path},
      {"profile", profile},
      {"behavior", behavior},
      {"sensor", sensor},
      {"driver", {{"a", c.driver.a}, {"schedule", schedule}}},
      {"energy",
       {{"mass", c.energy.mass},
        {"alpha", c.energy.hover_constant},
        {"v_max", c.energy.v_max},
        {"initial_energy", c.initial_energy}}},
      {"geometry",
       {{"start", vec_json(c.geometry.start)},
        {"landing", vec_json(c.geometry.landing)},
        {"abort", vec_json(c.geometry.abort_site)}}},
      {"ocp",
       {{"t_max", c.ocp.t_max},
        {"t_c", c.ocp.t_c},
        {"lambda", c.ocp.lambda},
        {"tolerance", c.ocp.tolerance},
        {"max_iterations", c.ocp.max_iterations},
        {"multistart", c.ocp.multistart}}},
      {"risk",
       {{"gamma_max", c.risk.gamma_max},
        {"threshold_mode", c.risk.threshold.mode == RiskThreshold::Mode::Constant ? "constant" : "fraction"},
        {"threshold", c.risk.threshold.value},
        {"abort_trigger", c.risk.abort_trigger},
        {"gamma_a", c.risk.gamma_a}}},
      {"mission",
       {{"epsilon", c.mission.epsilon},
        {"sample_time", c.mission.sample_time},
        {"capture_radius", c.mission.capture_radius},
        {"reaim", c.mission.reaim},
        {"max_duration", c.mission.max_duration}}},
  };
}

}  // namespace rdv
