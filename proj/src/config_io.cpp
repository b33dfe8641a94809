#include "bdris/config_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bdris::io {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path.empty() ? what : path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a JSON object");
}

// Strict field reader: every consumed key is erased so that leftovers can be
// reported as unknown.
class Fields {
 public:
  Fields(json j, std::string path) : j_(std::move(j)), path_(std::move(path)) {
    expect_object(j_, path_);
  }

  template <typename T>
  void take(const char* key, T& out) {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      fail(path_ + "." + key, "invalid value type");
    }
    j_.erase(it);
  }

  std::optional<double> take_number(const char* key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    if (!it->is_number()) fail(path_ + "." + key, "expected a number");
    const double v = it->get<double>();
    j_.erase(it);
    return v;
  }

  std::optional<json> take_node(const char* key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    json node = *it;
    j_.erase(it);
    return node;
  }

  // Dual-entry power field: value may be spelled linear (mW) or in dBm.
  void take_power(const char* mw_key, const char* dbm_key, double& out) {
    const auto mw = take_number(mw_key);
    const auto dbm = take_number(dbm_key);
    if (mw && dbm)
      fail(path_, std::string("give either ") + mw_key + " or " + dbm_key +
                      ", not both");
    if (mw) out = *mw;
    if (dbm) out = dbm_to_mw(*dbm);
  }

  void finish() const {
    if (!j_.empty()) fail(path_ + "." + j_.begin().key(), "unknown key");
  }

  const std::string& path() const { return path_; }

 private:
  json j_;
  std::string path_;
};

void parse_link(const json& node, const std::string& path, LinkSpec<double>& out) {
  Fields f(node, path);
  f.take("distance_m", out.geometry.distance);
  f.take("rician_k", out.geometry.rician_k);
  f.take("power_gain", out.geometry.power_gain);
  const auto elevation = f.take_number("elevation_rad");
  const auto azimuth = f.take_number("azimuth_rad");
  if (elevation.has_value() != azimuth.has_value())
    fail(path, "pin both elevation_rad and azimuth_rad or neither");
  if (elevation) {
    out.geometry.elevation = *elevation;
    out.geometry.azimuth = *azimuth;
    out.angles_pinned = true;
  }
  f.finish();
}

void parse_array(const json& node, ArrayGeometry<double>& out) {
  Fields f(node, "array");
  f.take("m_x", out.m_x);
  f.take("m_y", out.m_y);
  const auto carrier = f.take_number("carrier_frequency_hz");
  const auto spacing = f.take_number("element_spacing_m");
  if (carrier) out.carrier_frequency = *carrier;
  // Spacing defaults to half a wavelength of the resolved carrier.
  out.element_spacing = spacing ? *spacing
                                : kSpeedOfLight / (2.0 * out.carrier_frequency);
  f.finish();
}

void parse_manifold(const json& node, ManifoldOptConfig<double>& out) {
  Fields f(node, "ao.manifold");
  f.take("initial_step", out.initial_step);
  f.take("backtrack_factor", out.backtrack_factor);
  f.take("armijo_coefficient", out.armijo_coefficient);
  f.take("max_inner_iterations", out.max_inner_iterations);
  f.take("gradient_tolerance", out.gradient_tolerance);
  f.take("lambda_init", out.lambda_init);
  f.take("dual_step_rho", out.dual_step_rho);
  std::string projection;
  f.take("projection", projection);
  if (!projection.empty()) {
    if (projection == "canonical")
      out.projection = TangentProjection::Canonical;
    else if (projection == "doubled")
      out.projection = TangentProjection::Doubled;
    else
      fail("ao.manifold.projection", "expected canonical or doubled");
  }
  f.finish();
}

void parse_ao(const json& node, AoConfig<double>& out) {
  Fields f(node, "ao");
  f.take("max_outer_iterations", out.max_outer_iterations);
  f.take("secrecy_tolerance", out.secrecy_tolerance);
  f.take("silent_redraws", out.silent_redraws);
  if (const auto manifold = f.take_node("manifold")) parse_manifold(*manifold, out.manifold);
  f.finish();
}

void parse_powers(const json& node, PowerConfig<double>& out) {
  Fields f(node, "powers");
  f.take_power("p_max_mw", "p_max_dbm", out.p_max);
  f.take_power("q_p_mw", "q_p_dbm", out.q_p);
  f.take_power("sigma_s_sq_mw", "sigma_s_sq_dbm", out.sigma_s_sq);
  f.take_power("sigma_e_sq_mw", "sigma_e_sq_dbm", out.sigma_e_sq);
  f.take_power("i_th_mw", "i_th_dbm", out.i_th);
  f.finish();
}

SweepSpec parse_sweep(const json& node, Method default_method) {
  SweepSpec spec;
  Fields f(node, "sweep");
  std::string axis;
  f.take("axis", axis);
  if (!axis.empty()) {
    try {
      spec.axis = sweep_axis_from_string(axis);
    } catch (const std::invalid_argument& e) {
      fail("sweep.axis", e.what());
    }
  }
  f.take("points", spec.points);
  std::vector<std::string> methods;
  f.take("methods", methods);
  for (const auto& name : methods) {
    try {
      spec.methods.push_back(method_from_string(name));
    } catch (const std::invalid_argument& e) {
      fail("sweep.methods", e.what());
    }
  }
  if (spec.methods.empty()) spec.methods.push_back(default_method);
  if (spec.points.empty()) fail("sweep.points", "must be a non-empty array");
  f.finish();
  return spec;
}

LoadedScenario parse_config_json(const json& root) {
  LoadedScenario loaded;
  loaded.scenario = default_scenario<double>();
  Fields f(root, "");

  if (const auto array = f.take_node("array"))
    parse_array(*array, loaded.scenario.channel.array);
  if (const auto links = f.take_node("links")) {
    Fields lf(*links, "links");
    if (const auto n = lf.take_node("st_su")) parse_link(*n, "links.st_su", loaded.scenario.channel.st_su);
    if (const auto n = lf.take_node("st_eve")) parse_link(*n, "links.st_eve", loaded.scenario.channel.st_eve);
    if (const auto n = lf.take_node("st_pu")) parse_link(*n, "links.st_pu", loaded.scenario.channel.st_pu);
    if (const auto n = lf.take_node("pt_su")) parse_link(*n, "links.pt_su", loaded.scenario.channel.pt_su);
    if (const auto n = lf.take_node("pt_eve")) parse_link(*n, "links.pt_eve", loaded.scenario.channel.pt_eve);
    lf.finish();
  }
  if (const auto powers = f.take_node("powers")) parse_powers(*powers, loaded.scenario.powers);
  if (const auto ao = f.take_node("ao")) parse_ao(*ao, loaded.scenario.ao);
  f.take("trials", loaded.scenario.trials);
  f.take("base_seed", loaded.scenario.base_seed);
  std::string method;
  f.take("method", method);
  if (!method.empty()) {
    try {
      loaded.scenario.method = method_from_string(method);
    } catch (const std::invalid_argument& e) {
      fail("method", e.what());
    }
  }
  const auto sweep = f.take_node("sweep");
  f.finish();
  if (sweep) loaded.sweep = parse_sweep(*sweep, loaded.scenario.method);

  try {
    loaded.scenario.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return loaded;
}

json link_to_json(const LinkSpec<double>& spec) {
  json j{{"distance_m", spec.geometry.distance},
         {"rician_k", spec.geometry.rician_k},
         {"power_gain", spec.geometry.power_gain}};
  if (spec.angles_pinned) {
    j["elevation_rad"] = spec.geometry.elevation;
    j["azimuth_rad"] = spec.geometry.azimuth;
  }
  return j;
}

json scenario_to_json(const ScenarioConfig<double>& s) {
  return json{
      {"array",
       {{"m_x", s.channel.array.m_x},
        {"m_y", s.channel.array.m_y},
        {"carrier_frequency_hz", s.channel.array.carrier_frequency},
        {"element_spacing_m", s.channel.array.element_spacing}}},
      {"links",
       {{"st_su", link_to_json(s.channel.st_su)},
        {"st_eve", link_to_json(s.channel.st_eve)},
        {"st_pu", link_to_json(s.channel.st_pu)},
        {"pt_su", link_to_json(s.channel.pt_su)},
        {"pt_eve", link_to_json(s.channel.pt_eve)}}},
      {"powers",
       {{"p_max_mw", s.powers.p_max},
        {"q_p_mw", s.powers.q_p},
        {"sigma_s_sq_mw", s.powers.sigma_s_sq},
        {"sigma_e_sq_mw", s.powers.sigma_e_sq},
        {"i_th_mw", s.powers.i_th}}},
      {"ao",
       {{"max_outer_iterations", s.ao.max_outer_iterations},
        {"secrecy_tolerance", s.ao.secrecy_tolerance},
        {"silent_redraws", s.ao.silent_redraws},
        {"manifold",
         {{"initial_step", s.ao.manifold.initial_step},
          {"backtrack_factor", s.ao.manifold.backtrack_factor},
          {"armijo_coefficient", s.ao.manifold.armijo_coefficient},
          {"max_inner_iterations", s.ao.manifold.max_inner_iterations},
          {"gradient_tolerance", s.ao.manifold.gradient_tolerance},
          {"lambda_init", s.ao.manifold.lambda_init},
          {"dual_step_rho", s.ao.manifold.dual_step_rho},
          {"projection", s.ao.manifold.projection == TangentProjection::Canonical
                             ? "canonical"
                             : "doubled"}}}}},
      {"trials", s.trials},
      {"base_seed", s.base_seed},
      {"method", to_string(s.method)}};
}

}  // namespace

LoadedScenario parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config_json(root);
}

LoadedScenario parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

LoadedScenario load_config(const std::string& text,
                           const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text.empty() ? "{}" : text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override must look like key.path=value: " + kv);
    const std::string path = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // bare strings stay strings
    }
    json* node = &root;
    std::size_t begin = 0;
    while (true) {
      const auto dot = path.find('.', begin);
      const std::string key = path.substr(begin, dot - begin);
      if (key.empty()) throw ConfigError("empty key segment in override: " + kv);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      begin = dot + 1;
    }
  }
  return parse_config_json(root);
}

std::string config_to_json(const ScenarioConfig<double>& scenario,
                           const std::optional<SweepSpec>& sweep) {
  json j = scenario_to_json(scenario);
  if (sweep) {
    json methods = json::array();
    for (const Method m : sweep->methods) methods.push_back(to_string(m));
    j["sweep"] = {{"axis", to_string(sweep->axis)},
                  {"points", sweep->points},
                  {"methods", methods}};
  }
  return j.dump(2) + "\n";
}

std::string trace_to_csv(const ConvergenceTrace<double>& trace) {
  std::string out = "iteration,secrecy_rate,p_s_mw,interference_slack_mw\n";
  for (std::size_t i = 0; i < trace.outer.size(); ++i) {
    const auto& it = trace.outer[i];
    out += std::to_string(i + 1) + ',' + format_double(it.secrecy_rate) + ',' +
           format_double(it.p_s) + ',' + format_double(it.interference_slack) + '\n';
  }
  return out;
}

std::string sweep_to_csv(const SweepResult<double>& result) {
  std::string out = "axis_value,method,mean_secrecy_bps_hz,std_err,trials\n";
  for (const auto& series : result.series)
    for (std::size_t j = 0; j < result.points.size(); ++j)
      out += format_double(result.points[j]) + ',' + to_string(series.method) +
             ',' + format_double(series.mean_secrecy[j]) + ',' +
             format_double(series.std_error[j]) + ',' +
             std::to_string(result.trials) + '\n';
  return out;
}

std::string sweep_to_json(const SweepResult<double>& result,
                          const ScenarioConfig<double>& scenario) {
  json series = json::array();
  for (const auto& s : result.series)
    series.push_back({{"method", to_string(s.method)},
                      {"mean_secrecy_bps_hz", s.mean_secrecy},
                      {"std_err", s.std_error}});
  const json j{{"config", json::parse(config_to_json(scenario))},
               {"sweep",
                {{"axis", to_string(result.axis)},
                 {"points", result.points},
                 {"trials", result.trials},
                 {"series", series}}}};
  return j.dump(2) + "\n";
}

std::string trial_summary_json(const TrialResult<double>& trial,
                               const ScenarioConfig<double>& scenario,
                               std::uint64_t trial_index) {
  const json j{{"config", json::parse(config_to_json(scenario))},
               {"trial_index", trial_index},
               {"result",
                {{"secrecy_rate_bps_hz", trial.metrics.secrecy_rate},
                 {"rate_s_bps_hz", trial.metrics.rate_s},
                 {"rate_e_bps_hz", trial.metrics.rate_e},
                 {"gamma_s", trial.metrics.gamma_s},
                 {"gamma_e", trial.metrics.gamma_e},
                 {"interference_at_pu_mw", trial.metrics.interference_at_pu},
                 {"p_s_mw", trial.power.p_star},
                 {"branch", to_string(trial.power.branch)},
                 {"status", to_string(trial.status)},
                 {"outer_iterations", trial.trace.outer.size()},
                 {"redraws", trial.trace.redraws},
                 {"phase_warning", trial.phase_warning}}}};
  return j.dump(2) + "\n";
}

}  // namespace bdris::io
