#include "bhq/io/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bhq::io {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::ostringstream msg;
  msg << "configuration invalid (" << violations.size() << " problem"
      << (violations.size() == 1 ? "" : "s") << "):";
  for (const std::string& v : violations) msg << "\n  - " << v;
  return msg.str();
}

// Known keys per object; the empty path is the document root.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"",
       {"mode", "lattice", "physics", "integration", "layout", "ed", "front", "revival",
        "compare", "snapshot", "output_dir", "seed"}},
      {"lattice", {"dimension", "sizes"}},
      {"physics", {"J_over_U", "U", "n_max", "filling"}},
      {"integration", {"dt", "t_final", "sample_stride"}},
      {"ed", {"cutoff", "krylov_m", "dense_budget"}},
      {"front", {"theta", "direction"}},
      {"revival", {"window", "factor"}},
      {"compare", {"reference"}},
      {"snapshot", {"save", "load"}},
  };
  return s;
}

void check_unknown_keys(const ordered_json& node, const std::string& path,
                        std::vector<std::string>& violations) {
  auto it = schema().find(path);
  if (it == schema().end()) return;
  for (const auto& [key, value] : node.items()) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!it->second.contains(key)) {
      violations.push_back("unknown key '" + full + "'");
      continue;
    }
    if (schema().contains(full)) {
      if (value.is_object())
        check_unknown_keys(value, full, violations);
      else
        violations.push_back(full + ": expected an object");
    }
  }
}

struct Reader {
  const ordered_json& root;
  std::vector<std::string>& violations;

  const ordered_json* section(const char* name) const {
    if (!root.contains(name)) return nullptr;
    const ordered_json& s = root.at(name);
    return s.is_object() ? &s : nullptr;  // non-objects already flagged above
  }

  template <class T>
  void fetch(const ordered_json* obj, const char* key, const std::string& path, T& out,
             bool required = false) const {
    if (obj == nullptr || !obj->contains(key)) {
      if (required) violations.push_back(path + ": required");
      return;
    }
    const ordered_json& v = obj->at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) {
        violations.push_back(path + ": expected a number");
        return;
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) {
        violations.push_back(path + ": expected a string");
        return;
      }
    } else {
      if (!v.is_number_integer()) {
        violations.push_back(path + ": expected an integer");
        return;
      }
    }
    out = v.get<T>();
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

RunConfig parse_config(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }

  std::vector<std::string> violations;
  if (!doc.is_object()) throw ConfigError({"config root must be a JSON object"});
  check_unknown_keys(doc, "", violations);

  RunConfig cfg;
  Reader r{doc, violations};

  std::string mode;
  r.fetch(&doc, "mode", "mode", mode, /*required=*/true);
  if (!mode.empty()) {
    if (mode == "simulate")
      cfg.mode = RunMode::Simulate;
    else if (mode == "analytic")
      cfg.mode = RunMode::Analytic;
    else if (mode == "ed")
      cfg.mode = RunMode::Ed;
    else if (mode == "compare")
      cfg.mode = RunMode::Compare;
    else if (mode == "front")
      cfg.mode = RunMode::Front;
    else
      violations.push_back("mode: unknown value '" + mode +
                           "' (expected simulate|analytic|ed|compare|front)");
  }

  if (!doc.contains("lattice")) {
    violations.push_back("lattice: required");
  } else if (doc.at("lattice").is_object()) {
    const ordered_json& lat = doc.at("lattice");
    r.fetch(&lat, "dimension", "lattice.dimension", cfg.lattice.dimension, /*required=*/true);
    if (!lat.contains("sizes")) {
      violations.push_back("lattice.sizes: required");
    } else if (!lat.at("sizes").is_array()) {
      violations.push_back("lattice.sizes: expected an array of integers");
    } else {
      cfg.lattice.sizes.clear();
      for (const auto& s : lat.at("sizes")) {
        if (!s.is_number_integer()) {
          violations.push_back("lattice.sizes: expected an array of integers");
          cfg.lattice.sizes.clear();
          break;
        }
        cfg.lattice.sizes.push_back(s.get<int>());
      }
    }
    if (!cfg.lattice.sizes.empty()) {
      try {
        cfg.lattice.validate();
      } catch (const std::invalid_argument& e) {
        violations.push_back(std::string("lattice: ") + e.what());
      }
    }
  }

  const ordered_json* physics = r.section("physics");
  r.fetch(physics, "J_over_U", "physics.J_over_U", cfg.J_over_U);
  r.fetch(physics, "U", "physics.U", cfg.U);
  r.fetch(physics, "n_max", "physics.n_max", cfg.n_max);
  r.fetch(physics, "filling", "physics.filling", cfg.filling);

  const ordered_json* integration = r.section("integration");
  if (integration == nullptr && !doc.contains("integration"))
    violations.push_back("integration.t_final: required");
  r.fetch(integration, "dt", "integration.dt", cfg.dt);
  r.fetch(integration, "t_final", "integration.t_final", cfg.t_final,
          /*required=*/integration != nullptr);
  r.fetch(integration, "sample_stride", "integration.sample_stride", cfg.sample_stride);

  std::string layout = "TI";
  r.fetch(&doc, "layout", "layout", layout);
  if (layout == "TI")
    cfg.layout = PairLayout::TranslationInvariant;
  else if (layout == "FULL")
    cfg.layout = PairLayout::Full;
  else
    violations.push_back("layout: expected TI or FULL, got '" + layout + "'");

  const ordered_json* ed = r.section("ed");
  r.fetch(ed, "cutoff", "ed.cutoff", cfg.ed.cutoff);
  r.fetch(ed, "krylov_m", "ed.krylov_m", cfg.ed.krylov_m);
  r.fetch(ed, "dense_budget", "ed.dense_budget", cfg.ed.dense_budget);

  const ordered_json* front = r.section("front");
  r.fetch(front, "theta", "front.theta", cfg.front.theta);
  std::string direction = "axis";
  r.fetch(front, "direction", "front.direction", direction);
  if (direction == "axis")
    cfg.front.direction = FrontDirection::Axis;
  else if (direction == "diagonal")
    cfg.front.direction = FrontDirection::Diagonal;
  else
    violations.push_back("front.direction: expected axis or diagonal, got '" + direction + "'");

  const ordered_json* revival = r.section("revival");
  r.fetch(revival, "window", "revival.window", cfg.revival.window);
  r.fetch(revival, "factor", "revival.factor", cfg.revival.factor);

  const ordered_json* compare = r.section("compare");
  r.fetch(compare, "reference", "compare.reference", cfg.compare_reference);
  if (cfg.compare_reference != "ed" && cfg.compare_reference != "analytic")
    violations.push_back("compare.reference: expected ed or analytic, got '" +
                         cfg.compare_reference + "'");

  const ordered_json* snapshot = r.section("snapshot");
  r.fetch(snapshot, "save", "snapshot.save", cfg.snapshot.save);
  r.fetch(snapshot, "load", "snapshot.load", cfg.snapshot.load);

  r.fetch(&doc, "output_dir", "output_dir", cfg.output_dir);
  std::int64_t seed = 0;
  r.fetch(&doc, "seed", "seed", seed);
  if (seed < 0)
    violations.push_back("seed: must be >= 0");
  else
    cfg.seed = static_cast<std::uint64_t>(seed);

  // Semantic checks on whatever parsed cleanly.
  if (cfg.J_over_U < 0) violations.push_back("physics.J_over_U: must be >= 0");
  if (cfg.U <= 0) violations.push_back("physics.U: must be > 0");
  if (cfg.n_max < 2) violations.push_back("physics.n_max: must be >= 2");
  if (cfg.filling < 1) violations.push_back("physics.filling: must be >= 1");
  if (cfg.n_max >= 2 && cfg.filling >= 1 && cfg.filling >= cfg.n_max) {
    std::ostringstream msg;
    msg << "physics.filling = " << cfg.filling << " must be < physics.n_max = " << cfg.n_max
        << " (the cutoff needs one guard level above the filling)";
    violations.push_back(msg.str());
  }
  if (cfg.dt <= 0) violations.push_back("integration.dt: must be > 0");
  if (cfg.dt > 0 && cfg.U > 0 && cfg.dt * cfg.U > 0.05 * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "integration.dt * physics.U = " << cfg.dt * cfg.U
        << " exceeds the integrator stability bound 0.05";
    violations.push_back(msg.str());
  }
  if (cfg.t_final < 0) violations.push_back("integration.t_final: must be >= 0");
  if (cfg.sample_stride < 1) violations.push_back("integration.sample_stride: must be >= 1");
  if (cfg.ed.cutoff < 0) violations.push_back("ed.cutoff: must be >= 0 (0 = no cap)");
  if (cfg.ed.krylov_m < 2) violations.push_back("ed.krylov_m: must be >= 2");
  if (cfg.ed.dense_budget < 1) violations.push_back("ed.dense_budget: must be >= 1");
  if (cfg.front.theta <= 0) violations.push_back("front.theta: must be > 0");
  if (cfg.front.direction == FrontDirection::Diagonal && cfg.lattice.dimension < 2)
    violations.push_back("front.direction: 'diagonal' needs a two-dimensional lattice");
  if (cfg.revival.window <= 0) violations.push_back("revival.window: must be > 0");
  if (cfg.revival.factor <= 1) violations.push_back("revival.factor: must be > 1");
  if (cfg.output_dir.empty()) violations.push_back("output_dir: must be non-empty");

  if (!violations.empty()) throw ConfigError(std::move(violations));

  if (cfg.n_max == 2)
    cfg.warnings.push_back(
        "physics.n_max = 2 leaves no guard level above the particle-hole sector; "
        "occupation-2 dynamics sit directly at the cutoff");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  ordered_json doc;
  doc["mode"] = mode_name(cfg.mode);
  doc["lattice"] = {{"dimension", cfg.lattice.dimension}, {"sizes", cfg.lattice.sizes}};
  doc["physics"] = {{"J_over_U", cfg.J_over_U},
                    {"U", cfg.U},
                    {"n_max", cfg.n_max},
                    {"filling", cfg.filling}};
  doc["integration"] = {
      {"dt", cfg.dt}, {"t_final", cfg.t_final}, {"sample_stride", cfg.sample_stride}};
  doc["layout"] = cfg.layout == PairLayout::Full ? "FULL" : "TI";
  doc["ed"] = {{"cutoff", cfg.ed.cutoff},
               {"krylov_m", cfg.ed.krylov_m},
               {"dense_budget", cfg.ed.dense_budget}};
  doc["front"] = {{"theta", cfg.front.theta},
                  {"direction", cfg.front.direction == FrontDirection::Diagonal ? "diagonal"
                                                                                : "axis"}};
  doc["revival"] = {{"window", cfg.revival.window}, {"factor", cfg.revival.factor}};
  doc["compare"] = {{"reference", cfg.compare_reference}};
  doc["snapshot"] = {{"save", cfg.snapshot.save}, {"load", cfg.snapshot.load}};
  doc["output_dir"] = cfg.output_dir;
  doc["seed"] = cfg.seed;
  return doc.dump(2) + "\n";
}

std::string apply_override(const std::string& config_text, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError({"override '" + assignment + "' is not of the form key.path=value"});
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  ordered_json doc;
  try {
    doc = ordered_json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"config root must be a JSON object"});

  ordered_json parsed;
  try {
    parsed = ordered_json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    // Accept a bare comma list as an array if every piece parses on its own.
    bool as_array = value.find(',') != std::string::npos;
    ordered_json arr = ordered_json::array();
    if (as_array) {
      std::istringstream pieces(value);
      std::string piece;
      while (std::getline(pieces, piece, ',')) {
        try {
          arr.push_back(ordered_json::parse(piece));
        } catch (const nlohmann::json::parse_error&) {
          as_array = false;
          break;
        }
      }
    }
    parsed = as_array ? arr : ordered_json(value);
  }

  ordered_json* node = &doc;
  std::istringstream keys(path);
  std::string key;
  std::vector<std::string> parts;
  while (std::getline(keys, key, '.')) parts.push_back(key);
  if (parts.empty() || parts.front().empty())
    throw ConfigError({"override '" + assignment + "' has an empty key path"});
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (node->contains(parts[i]) && !(*node)[parts[i]].is_object())
      throw ConfigError({"override path '" + path + "' descends into a non-object"});
    node = &(*node)[parts[i]];
  }
  // A scalar assigned onto an existing array key becomes a one-element array,
  // so "lattice.sizes=50" works as naturally as "lattice.sizes=30,30".
  if (node->contains(parts.back()) && (*node)[parts.back()].is_array() && !parsed.is_array())
    parsed = ordered_json::array({parsed});
  (*node)[parts.back()] = parsed;
  return doc.dump(2) + "\n";
}

const char* mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Analytic: return "analytic";
    case RunMode::Ed: return "ed";
    case RunMode::Compare: return "compare";
    case RunMode::Front: return "front";
  }
  return "simulate";
}

}  // namespace bhq::io
