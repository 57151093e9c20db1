#include "ccm_cli/config.hpp"

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "ccm/error.hpp"
#include "json.hpp"

namespace ccm::cli {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

PotentialField parse_potential(const json& p, const std::filesystem::path& base_dir, std::string& kind) {
  if (!p.is_object()) throw ConfigError("'potential' must be an object");
  if (!p.contains("kind") || !p["kind"].is_string()) throw ConfigError("'potential.kind' is required");
  kind = p["kind"].get<std::string>();
  if (kind == "quadratic") {
    reject_unknown(p, {"kind", "c"}, "potential");
    const double c = get_number(p, "c", 1.0);
    if (!(c > 0.0)) throw ConfigError("'potential.c' must be > 0");
    return PotentialField::quadratic(c);
  }
  if (kind == "disc_array") {
    reject_unknown(p, {"kind", "window"}, "potential");
    Rect w{-30.0, -30.0, 30.0, 30.0};
    if (p.contains("window")) {
      const json& a = p["window"];
      if (!a.is_array() || a.size() != 4) throw ConfigError("'potential.window' must be [x0, y0, x1, y1]");
      for (const auto& v : a) {
        if (!v.is_number()) throw ConfigError("'potential.window' entries must be numbers");
      }
      w = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>()};
      if (!(w.x1 > w.x0 && w.y1 > w.y0)) throw ConfigError("'potential.window' must have x1 > x0 and y1 > y0");
    }
    return PotentialField::disc_array(w);
  }
  if (kind == "density_grid") {
    reject_unknown(p, {"kind", "path"}, "potential");
    if (!p.contains("path") || !p["path"].is_string()) throw ConfigError("'potential.path' is required");
    std::filesystem::path path = p["path"].get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    try {
      return PotentialField::density_grid(DensityGrid::load(path));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown potential kind '" + kind + "'");
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"schema", "potential", "delta0", "seed", "eval_budget", "format", "output"}, "config");
  if (!j.contains("schema") || j["schema"] != "cc1") throw ConfigError("config needs \"schema\": \"cc1\"");

  RunConfig cfg;
  if (j.contains("potential")) cfg.field = parse_potential(j["potential"], base_dir, cfg.potential_kind);
  cfg.delta0 = get_number(j, "delta0", 1.0);
  if (!(cfg.delta0 > 0.0)) throw ConfigError("'delta0' must be > 0");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("eval_budget")) {
    if (!j["eval_budget"].is_number_integer() || j["eval_budget"].get<std::int64_t>() < 1) {
      throw ConfigError("'eval_budget' must be a positive integer");
    }
    cfg.eval_budget = j["eval_budget"].get<std::int64_t>();
  }
  if (j.contains("format")) {
    const std::string f = j["format"].is_string() ? j["format"].get<std::string>() : "";
    if (f == "csv") {
      cfg.format = Format::Csv;
    } else if (f == "json") {
      cfg.format = Format::Json;
    } else {
      throw ConfigError("'format' must be \"csv\" or \"json\"");
    }
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("'output' must be a string");
    cfg.output = j["output"].get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

namespace {

Complex as_point(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("loop vertices must be [x, y] pairs");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

PolyLoop load_loop(const std::filesystem::path& path) {
  const json j = parse_json(read_file(path), path.string());
  const json* list = &j;
  std::size_t base = 0;
  if (j.is_object()) {
    reject_unknown(j, {"vertices", "base"}, "loop");
    if (!j.contains("vertices")) throw ConfigError("loop object needs 'vertices'");
    list = &j["vertices"];
    if (j.contains("base")) {
      if (!j["base"].is_number_unsigned()) throw ConfigError("'base' must be a nonnegative integer");
      base = j["base"].get<std::size_t>();
    }
  }
  if (!list->is_array()) throw ConfigError("loop must be a list of [x, y] pairs");
  Polygon v;
  for (const auto& p : *list) v.push_back(as_point(p));
  try {
    return PolyLoop(std::move(v), base);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ControlPair load_control(const std::filesystem::path& path) {
  const json j = parse_json(read_file(path), path.string());
  const json* list = &j;
  bool mean_zero = false;
  if (j.is_object()) {
    reject_unknown(j, {"rows", "mean_zero"}, "control");
    if (!j.contains("rows")) throw ConfigError("control object needs 'rows'");
    list = &j["rows"];
    if (j.contains("mean_zero")) mean_zero = j["mean_zero"].get<bool>();
  }
  if (!list->is_array() || list->empty()) throw ConfigError("control must be a nonempty list of [s, alpha, beta]");
  std::vector<std::array<double, 3>> rows;
  for (const auto& r : *list) {
    if (!r.is_array() || r.size() != 3) throw ConfigError("control rows must be [s, alpha, beta]");
    for (const auto& x : r) {
      if (!x.is_number()) throw ConfigError("control rows must contain numbers");
    }
    rows.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>()});
  }
  return ControlPair::from_rows(rows, mean_zero);
}

}  // namespace ccm::cli
