#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gds/core/errors.hpp"
#include "gds/random/streams.hpp"

namespace gds::app {

using nlohmann::json;

struct ModelParams {
  std::string name;
  Index n = 0;
  Index k = 0;
  std::optional<Index> t_per_unit;
  std::string design = "panel";  // lin_reg only: "panel" or "cross_section"
  // Hyperparameter overrides; unset means the model default.
  std::optional<double> r, alpha, v0_diag;
  std::optional<double> nu, v_beta_diag, a_diag;
  std::optional<double> y;
};

struct StudyGrid {
  std::vector<Index> k{5};
  std::vector<Index> n{200};
  std::vector<std::size_t> M{1000};
  std::vector<double> scale{0.5};  // proposal precision factors
  std::size_t replicates = 5;
};

struct RunConfig {
  std::string command;
  ModelParams model;
  std::string data;
  std::size_t M = 10'000;
  std::size_t N = 100;
  std::optional<double> scale;
  std::optional<double> s0;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
  std::size_t pilot_size = 0;
  bool tolerate_tail_violations = false;
  bool unconstrained = false;
  StudyGrid study;

  double start_scale() const { return s0.value_or(1.0); }
};

namespace detail {

template <class T>
void read_if(const json& j, const char* key, T& dst) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) dst = it->get<T>();
}

template <class T>
void read_if(const json& j, const char* key, std::optional<T>& dst) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) dst = it->get<T>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace detail

inline ModelParams model_from_json(const json& j) {
  ModelParams m;
  if (j.is_string()) {
    m.name = j.get<std::string>();
    return m;
  }
  if (!j.is_object()) throw ConfigError("'model' must be a name or an object");
  detail::reject_unknown(j, {"name", "n", "k", "T", "design", "r", "alpha", "v0_diag", "nu", "v_beta_diag",
                             "a_diag", "y"},
                         "model");
  detail::read_if(j, "name", m.name);
  detail::read_if(j, "n", m.n);
  detail::read_if(j, "k", m.k);
  detail::read_if(j, "T", m.t_per_unit);
  detail::read_if(j, "design", m.design);
  detail::read_if(j, "r", m.r);
  detail::read_if(j, "alpha", m.alpha);
  detail::read_if(j, "v0_diag", m.v0_diag);
  detail::read_if(j, "nu", m.nu);
  detail::read_if(j, "v_beta_diag", m.v_beta_diag);
  detail::read_if(j, "a_diag", m.a_diag);
  detail::read_if(j, "y", m.y);
  return m;
}

inline json model_to_json(const ModelParams& m) {
  json j{{"name", m.name}, {"n", m.n}, {"k", m.k}, {"design", m.design}};
  auto put = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  put("T", m.t_per_unit);
  put("r", m.r);
  put("alpha", m.alpha);
  put("v0_diag", m.v0_diag);
  put("nu", m.nu);
  put("v_beta_diag", m.v_beta_diag);
  put("a_diag", m.a_diag);
  put("y", m.y);
  return j;
}

inline RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  detail::reject_unknown(j, {"command", "model", "data", "M", "N", "scale", "s0", "seed", "workers", "out",
                             "pilot_size", "tolerate_tail_violations", "unconstrained", "study"},
                         "config");
  RunConfig c;
  try {
    detail::read_if(j, "command", c.command);
    if (auto it = j.find("model"); it != j.end()) c.model = model_from_json(*it);
    detail::read_if(j, "data", c.data);
    detail::read_if(j, "M", c.M);
    detail::read_if(j, "N", c.N);
    detail::read_if(j, "scale", c.scale);
    detail::read_if(j, "s0", c.s0);
    detail::read_if(j, "seed", c.seed);
    detail::read_if(j, "workers", c.workers);
    detail::read_if(j, "out", c.out);
    detail::read_if(j, "pilot_size", c.pilot_size);
    detail::read_if(j, "tolerate_tail_violations", c.tolerate_tail_violations);
    detail::read_if(j, "unconstrained", c.unconstrained);
    if (auto it = j.find("study"); it != j.end()) {
      detail::reject_unknown(*it, {"k", "n", "M", "scale", "replicates"}, "study");
      detail::read_if(*it, "k", c.study.k);
      detail::read_if(*it, "n", c.study.n);
      detail::read_if(*it, "M", c.study.M);
      detail::read_if(*it, "scale", c.study.scale);
      detail::read_if(*it, "replicates", c.study.replicates);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// Settings that determine the output. Worker count and output location are left out.
inline json canonical_json(const RunConfig& c) {
  json j{{"command", c.command},
         {"model", model_to_json(c.model)},
         {"M", c.M},
         {"N", c.N},
         {"seed", c.seed},
         {"pilot_size", c.pilot_size},
         {"tolerate_tail_violations", c.tolerate_tail_violations},
         {"unconstrained", c.unconstrained}};
  if (c.scale) j["scale"] = *c.scale;
  else j["s0"] = c.start_scale();
  if (c.command == "evidence-study") {
    j["study"] = {{"k", c.study.k}, {"n", c.study.n}, {"M", c.study.M}, {"scale", c.study.scale},
                  {"replicates", c.study.replicates}};
  }
  return j;
}

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

/// FNV-1a over the canonical config text, chained with the dataset bytes when given.
inline std::string config_hash(const RunConfig& c, std::string_view data_bytes = {}) {
  std::uint64_t h = fnv1a(canonical_json(c).dump());
  if (!data_bytes.empty()) h = fnv1a(data_bytes, h);
  return hex64(h);
}

inline void validate(const RunConfig& c) {
  if (c.command != "simulate" && c.command != "run" && c.command != "evidence-study") {
    throw ConfigError("command must be simulate, run, or evidence-study");
  }
  if (c.command != "evidence-study" && c.model.name.empty()) throw ConfigError("no model given (--model)");
  if (c.M < 100) throw ConfigError("M must be at least 100");
  if (c.N < 1) throw ConfigError("N must be at least 1");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (c.scale && c.s0) throw ConfigError("give either a fixed scale or a tuning start s0, not both");
  if (c.scale && !(*c.scale > 0.0)) throw ConfigError("scale must be positive");
  if (c.s0 && !(*c.s0 > 0.0)) throw ConfigError("s0 must be positive");
  if (c.model.design != "panel" && c.model.design != "cross_section") throw ConfigError("design must be panel or cross_section");
  if (c.command == "evidence-study") {
    const auto& s = c.study;
    if (s.k.empty() || s.n.empty() || s.M.empty() || s.scale.empty()) throw ConfigError("study grid has an empty axis");
    if (s.replicates < 1) throw ConfigError("study needs at least one replicate");
    for (auto m : s.M)
      if (m < 100) throw ConfigError("study M values must be at least 100");
    for (double v : s.scale)
      if (!(v > 0.0)) throw ConfigError("study scale values must be positive");
    if (c.N < 30) throw ConfigError("evidence study needs N >= 30");
  }
}

/// Seed for a sub-task, e.g. (replicate, k, n) of a study cell.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  for (auto p : parts) {
    state ^= p + 0x632BE59BD9B4E019ULL;
    out = splitmix64(state);
  }
  return out;
}

}  // namespace gds::app
