#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smi/error.hpp"

namespace smi::app {

namespace {

using nlohmann::json;

enum class Kind { string, date, integer, unsigned_integer, number, optional_number, list, levels };

struct Field {
  std::string key;  // "split" or "synth.users"
  Kind kind;
  std::function<void(PipelineConfig&, const json&)> apply;
};

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config '" + key + "': " + why);
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

Date as_date(const std::string& key, const json& v) {
  auto d = parse_date(as_string(key, v));
  if (!d) bad(key, "expected a YYYY-MM-DD date");
  return *d;
}

long long as_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<long long>();
}

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

std::vector<std::string> as_list(const std::string& key, const json& v) {
  if (!v.is_array()) bad(key, "expected a list of strings");
  std::vector<std::string> out;
  for (const json& item : v) out.push_back(as_string(key, item));
  return out;
}

template <class T>
Field string_field(std::string key, T PipelineConfig::*member) {
  return {key, Kind::string, [key, member](PipelineConfig& c, const json& v) { c.*member = as_string(key, v); }};
}

template <class T>
Field date_field(std::string key, T PipelineConfig::*member) {
  return {key, Kind::date, [key, member](PipelineConfig& c, const json& v) { c.*member = as_date(key, v); }};
}

template <class T>
Field int_field(std::string key, T PipelineConfig::*member) {
  return {key, Kind::integer,
          [key, member](PipelineConfig& c, const json& v) { c.*member = static_cast<T>(as_int(key, v)); }};
}

template <class T>
Field number_field(std::string key, T PipelineConfig::*member) {
  return {key, Kind::number, [key, member](PipelineConfig& c, const json& v) { c.*member = as_number(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"inputs", Kind::list, [](PipelineConfig& c, const json& v) { c.inputs = as_list("inputs", v); }});
    f.push_back(string_field("events", &PipelineConfig::events));
    f.push_back(string_field("regions", &PipelineConfig::regions));
    f.push_back(string_field("output_dir", &PipelineConfig::output_dir));
    f.push_back(string_field("country_id", &PipelineConfig::country_id));
    f.push_back(date_field("start", &PipelineConfig::start));
    f.push_back(date_field("split", &PipelineConfig::split));
    f.push_back(date_field("end", &PipelineConfig::end));
    f.push_back(int_field("seasonal_shift_years", &PipelineConfig::seasonal_shift_years));
    f.push_back({"levels", Kind::levels, [](PipelineConfig& c, const json& v) {
                   c.levels.clear();
                   for (const std::string& s : as_list("levels", v)) {
                     auto level = geo::parse_level(s);
                     if (!level) bad("levels", "unknown level '" + s + "'");
                     c.levels.push_back(*level);
                   }
                 }});
    f.push_back(string_field("analysis_mode", &PipelineConfig::analysis_mode));
    f.push_back({"city_names", Kind::list,
                 [](PipelineConfig& c, const json& v) { c.city_names = as_list("city_names", v); }});
    f.push_back(int_field("min_lifetime_events", &PipelineConfig::min_lifetime_events));
    f.push_back(int_field("min_period_events", &PipelineConfig::min_period_events));
    f.push_back(int_field("min_checkins", &PipelineConfig::min_checkins));
    f.push_back(int_field("window", &PipelineConfig::window));
    f.push_back(string_field("daily_mode", &PipelineConfig::daily_mode));
    f.push_back(number_field("lowdata_confidence", &PipelineConfig::lowdata_confidence));
    f.push_back(int_field("lowdata_min_weeks", &PipelineConfig::lowdata_min_weeks));
    f.push_back({"changepoint_penalty", Kind::optional_number, [](PipelineConfig& c, const json& v) {
                   if (v.is_null()) {
                     c.changepoint_penalty.reset();
                   } else {
                     c.changepoint_penalty = as_number("changepoint_penalty", v);
                   }
                 }});
    f.push_back(date_field("national_date", &PipelineConfig::national_date));
    f.push_back(string_field("changepoint_policy", &PipelineConfig::changepoint_policy));
    f.push_back(string_field("cases", &PipelineConfig::cases));
    f.push_back(string_field("factors", &PipelineConfig::factors));
    f.push_back(string_field("policies", &PipelineConfig::policies));
    f.push_back(date_field("snapshot", &PipelineConfig::snapshot));
    f.push_back(number_field("missing_policy_days", &PipelineConfig::missing_policy_days));
    f.push_back({"threads", Kind::unsigned_integer, [](PipelineConfig& c, const json& v) {
                   const long long n = as_int("threads", v);
                   if (n < 1) bad("threads", "must be at least 1");
                   c.threads = static_cast<unsigned>(n);
                 }});
    f.push_back({"synth.users", Kind::unsigned_integer, [](PipelineConfig& c, const json& v) {
                   const long long n = as_int("synth.users", v);
                   if (n < 1) bad("synth.users", "must be at least 1");
                   c.synth.users = static_cast<std::size_t>(n);
                 }});
    f.push_back({"synth.start", Kind::date, [](PipelineConfig& c, const json& v) { c.synth.start = as_date("synth.start", v); }});
    f.push_back({"synth.split", Kind::date, [](PipelineConfig& c, const json& v) { c.synth.split = as_date("synth.split", v); }});
    f.push_back({"synth.end", Kind::date, [](PipelineConfig& c, const json& v) { c.synth.end = as_date("synth.end", v); }});
    f.push_back({"synth.pre_dispersion_km", Kind::number, [](PipelineConfig& c, const json& v) {
                   c.synth.pre_dispersion_km = as_number("synth.pre_dispersion_km", v);
                 }});
    f.push_back({"synth.post_dispersion_km", Kind::number, [](PipelineConfig& c, const json& v) {
                   c.synth.post_dispersion_km = as_number("synth.post_dispersion_km", v);
                 }});
    f.push_back({"synth.events_per_week", Kind::number, [](PipelineConfig& c, const json& v) {
                   c.synth.events_per_week = as_number("synth.events_per_week", v);
                 }});
    f.push_back({"synth.fully_reducing_fraction", Kind::number, [](PipelineConfig& c, const json& v) {
                   c.synth.fully_reducing_fraction = as_number("synth.fully_reducing_fraction", v);
                 }});
    f.push_back({"synth.seed", Kind::unsigned_integer, [](PipelineConfig& c, const json& v) {
                   if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                     bad("synth.seed", "expected a non-negative integer");
                   }
                   c.synth.seed = v.get<std::uint64_t>();
                 }});
    f.push_back({"synth.output", Kind::string,
                 [](PipelineConfig& c, const json& v) { c.synth.output = as_string("synth.output", v); }});
    return f;
  }();
  return table;
}

std::string env_name(const std::string& key) {
  std::string out = "SMI_";
  for (char ch : key) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

json env_value(const Field& field, const std::string& text) {
  const std::string name = env_name(field.key);
  try {
    switch (field.kind) {
      case Kind::string:
      case Kind::date:
        return text;
      case Kind::integer:
      case Kind::unsigned_integer: {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
      }
      case Kind::number:
      case Kind::optional_number: {
        if (field.kind == Kind::optional_number && text.empty()) return nullptr;
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
      }
      case Kind::list:
      case Kind::levels: {
        json list = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) list.push_back(item);
        }
        return list;
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigError(name + ": cannot parse '" + text + "'");
  }
  return nullptr;
}

const json* lookup(const json& root, const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    auto it = root.find(key);
    return it == root.end() ? nullptr : &*it;
  }
  auto section = root.find(key.substr(0, dot));
  if (section == root.end()) return nullptr;
  auto it = section->find(key.substr(dot + 1));
  return it == section->end() ? nullptr : &*it;
}

void reject_unknown(const json& root) {
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  auto known = [](const std::string& key) {
    return std::any_of(fields().begin(), fields().end(), [&](const Field& f) { return f.key == key; });
  };
  for (const auto& [key, value] : root.items()) {
    if (key == "synth") {
      if (!value.is_object()) throw ConfigError("config 'synth' must be an object");
      for (const auto& [sub, ignored] : value.items()) {
        if (!known("synth." + sub)) throw ConfigError("unknown config key 'synth." + sub + "'");
      }
    } else if (!known(key)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

}  // namespace

std::string PipelineConfig::events_path() const {
  return events.empty() ? output_path("events.tsv") : events;
}

std::string PipelineConfig::output_path(const std::string& name) const {
  return (std::filesystem::path(output_dir) / name).string();
}

PipelineConfig default_config() {
  PipelineConfig c;
  c.start = *parse_date("2019-01-01");
  c.split = *parse_date("2020-03-16");
  c.end = *parse_date("2020-04-27");
  c.national_date = c.split;
  c.snapshot = *parse_date("2020-05-10");
  c.synth.start = *parse_date("2020-01-06");
  c.synth.split = c.split;
  c.synth.end = *parse_date("2020-04-26");
  return c;
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

PipelineConfig parse_config(const std::string& json_text, const EnvLookup& env) {
  json root = json::object();
  if (!json_text.empty()) {
    try {
      root = json::parse(json_text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  reject_unknown(root);
  PipelineConfig c = default_config();
  for (const Field& f : fields()) {
    if (const json* v = lookup(root, f.key)) f.apply(c, *v);
    if (auto text = env(env_name(f.key))) f.apply(c, env_value(f, *text));
  }
  validate(c);
  return c;
}

PipelineConfig load_config(const std::string& path, const EnvLookup& env) {
  if (path.empty()) return parse_config("", env);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), env);
}

void validate(const PipelineConfig& c) {
  if (!(c.start < c.split && c.split <= c.end)) {
    throw ConfigError("dates must satisfy start < split <= end");
  }
  if (c.seasonal_shift_years < 1) throw ConfigError("seasonal_shift_years must be >= 1");
  if (c.min_lifetime_events < 1 || c.min_period_events < 1 || c.min_checkins < 1) {
    throw ConfigError("filter thresholds must be >= 1");
  }
  if (c.window < 1) throw ConfigError("window must be >= 1");
  if (c.daily_mode != "window" && c.daily_mode != "smoothed") {
    throw ConfigError("daily_mode must be 'window' or 'smoothed'");
  }
  if (c.analysis_mode != "state" && c.analysis_mode != "city") {
    throw ConfigError("analysis_mode must be 'state' or 'city'");
  }
  if (!(c.lowdata_confidence > 0.5 && c.lowdata_confidence < 1)) {
    throw ConfigError("lowdata_confidence must lie in (0.5, 1)");
  }
  if (c.lowdata_min_weeks < 1) throw ConfigError("lowdata_min_weeks must be >= 1");
  if (c.changepoint_penalty && !(*c.changepoint_penalty >= 0)) {
    throw ConfigError("changepoint_penalty must be >= 0");
  }
  if (c.levels.empty()) throw ConfigError("at least one level is required");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  const SyntheticSpec& s = c.synth;
  if (!(s.start < s.split && s.split <= s.end)) {
    throw ConfigError("synth dates must satisfy start < split <= end");
  }
  if (!(s.pre_dispersion_km >= 0 && s.post_dispersion_km >= 0)) {
    throw ConfigError("synth dispersions must be >= 0");
  }
  if (!(s.events_per_week > 0)) throw ConfigError("synth.events_per_week must be > 0");
  if (!(s.fully_reducing_fraction >= 0 && s.fully_reducing_fraction <= 1)) {
    throw ConfigError("synth.fully_reducing_fraction must lie in [0, 1]");
  }
}

}  // namespace smi::app
