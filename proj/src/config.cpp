#include "spi/config.hpp"

#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "spi/toml_lite.hpp"

namespace spi {

namespace {

using nlohmann::json;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"preset", "name", "side", "patterns", "pattern_count", "pattern_seed", "methods",
            "seeds", "threads", "output_dir", "write_images", "target", "sweep", "disturbance",
            "source", "monitor"}},
      {"target", {"source"}},
      {"sweep", {"param", "values"}},
      {"disturbance", {"kind", "epsilon_db", "gamma", "fluct_mean", "roi", "local_power"}},
      {"source", {"i0", "signal_mean"}},
      {"monitor", {"enabled", "split_fraction"}},
  };
  return keys;
}

std::string qualified(const std::string& table, const std::string& key) {
  return table.empty() ? key : table + "." + key;
}

void check_keys(const json& root) {
  for (const auto& [key, value] : root.items()) {
    if (!schema().at("").contains(key)) throw ConfigError("unknown key '" + key + "'");
    if (schema().contains(key) && !key.empty()) {
      if (!value.is_object()) throw ConfigError("key '" + key + "' must be a table");
      for (const auto& [sub, ignored] : value.items()) {
        if (!schema().at(key).contains(sub)) {
          throw ConfigError("unknown key '" + qualified(key, sub) + "'");
        }
      }
    }
  }
}

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  const json* find(const std::string& table, const std::string& key) const {
    const json* node = &root_;
    if (!table.empty()) {
      if (!root_.contains(table)) return nullptr;
      node = &root_.at(table);
    }
    return node->contains(key) ? &node->at(key) : nullptr;
  }

  template <typename Apply>
  void number(const std::string& table, const std::string& key, Apply apply) const {
    if (const json* v = find(table, key)) {
      if (!v->is_number()) type_error(table, key, "a number");
      apply(v->get<double>());
    }
  }

  template <typename Apply>
  void integer(const std::string& table, const std::string& key, Apply apply) const {
    if (const json* v = find(table, key)) {
      if (!v->is_number_integer()) type_error(table, key, "an integer");
      if (v->get<std::int64_t>() < 0) {
        throw ConfigError("key '" + qualified(table, key) + "' must be >= 0");
      }
      apply(v->get<std::uint64_t>());
    }
  }

  template <typename Apply>
  void string(const std::string& table, const std::string& key, Apply apply) const {
    if (const json* v = find(table, key)) {
      if (!v->is_string()) type_error(table, key, "a string");
      wrap(table, key, [&] { apply(v->get<std::string>()); });
    }
  }

  template <typename Apply>
  void boolean(const std::string& table, const std::string& key, Apply apply) const {
    if (const json* v = find(table, key)) {
      if (!v->is_boolean()) type_error(table, key, "a boolean");
      apply(v->get<bool>());
    }
  }

  template <typename Apply>
  void array(const std::string& table, const std::string& key, const char* element_kind,
             bool (json::*predicate)() const noexcept, Apply apply) const {
    if (const json* v = find(table, key)) {
      if (!v->is_array()) type_error(table, key, std::string("an array of ") + element_kind);
      for (const auto& e : *v) {
        if (!(e.*predicate)()) type_error(table, key, std::string("an array of ") + element_kind);
      }
      wrap(table, key, [&] { apply(*v); });
    }
  }

  [[noreturn]] static void type_error(const std::string& table, const std::string& key,
                                      const std::string& expected) {
    throw ConfigError("type error: key '" + qualified(table, key) + "' expects " + expected);
  }

  template <typename Fn>
  static void wrap(const std::string& table, const std::string& key, Fn fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key '" + qualified(table, key) + "': " + e.what());
    }
  }

 private:
  const json& root_;
};

}  // namespace

ResolvedConfig parse_config_text(std::string_view text) {
  json root;
  try {
    root = toml::parse(text);
  } catch (const toml::ParseError& e) {
    throw ConfigError(std::string("parse error at ") + e.what());
  }
  check_keys(root);
  const Reader r(root);

  ResolvedConfig out;
  r.string("", "preset", [&](const std::string& name) {
    if (name != "none") {
      out.sweep = preset(name);
    }
    out.preset = name;
  });
  SweepConfig& c = out.sweep;
  c.threads = 0;

  r.string("", "name", [&](const std::string& v) {
    if (v.empty() || v.find_first_of("/\\") != std::string::npos) {
      throw std::invalid_argument("must be a non-empty file-name prefix");
    }
    c.name = v;
  });
  r.integer("", "side", [&](std::uint64_t v) { c.side = v; });
  r.string("", "patterns", [&](const std::string& v) {
    if (v == "hadamard") {
      c.pattern_kind = PatternKind::hadamard;
    } else if (v == "random") {
      c.pattern_kind = PatternKind::random;
    } else {
      throw std::invalid_argument("expected hadamard or random");
    }
  });
  r.integer("", "pattern_count", [&](std::uint64_t v) { c.pattern_count = v; });
  r.integer("", "pattern_seed", [&](std::uint64_t v) { c.pattern_seed = v; });
  r.array("", "methods", "strings", &json::is_string, [&](const json& arr) {
    c.methods.clear();
    for (const auto& m : arr) c.methods.push_back(parse_method(m.get<std::string>()));
  });
  r.array("", "seeds", "non-negative integers", &json::is_number_unsigned, [&](const json& arr) {
    c.seeds.clear();
    for (const auto& s : arr) c.seeds.push_back(s.get<std::uint64_t>());
  });
  r.integer("", "threads", [&](std::uint64_t v) {
    if (v > 4096) throw ConfigError("key 'threads' must be <= 4096");
    c.threads = static_cast<unsigned>(v);
  });
  r.string("", "output_dir", [&](const std::string& v) { c.output_dir = v; });
  r.boolean("", "write_images", [&](bool v) { c.write_images = v; });

  r.string("target", "source", [&](const std::string& v) { c.target.source = v; });
  c.target.size = c.side;

  r.string("sweep", "param", [&](const std::string& v) { c.sweep_param = parse_sweep_param(v); });
  r.array("sweep", "values", "numbers", &json::is_number, [&](const json& arr) {
    c.sweep_values.clear();
    for (const auto& v : arr) c.sweep_values.push_back(v.get<double>());
  });

  r.string("disturbance", "kind",
           [&](const std::string& v) { c.disturbance.kind = parse_disturbance_kind(v); });
  r.number("disturbance", "epsilon_db", [&](double v) { c.disturbance.epsilon_db = v; });
  r.number("disturbance", "gamma", [&](double v) { c.disturbance.gamma = v; });
  r.number("disturbance", "fluct_mean", [&](double v) { c.disturbance.fluct_mean = v; });
  r.string("disturbance", "local_power",
           [&](const std::string& v) { c.disturbance.local_power = parse_local_power(v); });
  r.array("disturbance", "roi", "non-negative integers", &json::is_number_unsigned,
          [&](const json& arr) {
            if (arr.size() != 4) throw std::invalid_argument("roi must be [x0, y0, w, h]");
            c.disturbance.roi = Roi{arr[0].get<std::size_t>(), arr[1].get<std::size_t>(),
                                    arr[2].get<std::size_t>(), arr[3].get<std::size_t>()};
          });

  r.number("source", "i0", [&](double v) { c.source.intensity_i0 = v; });
  r.number("source", "signal_mean", [&](double v) { c.source.signal_mean = v; });
  r.boolean("monitor", "enabled", [&](bool v) { c.monitor.enabled = v; });
  r.number("monitor", "split_fraction", [&](double v) { c.monitor.split_fraction = v; });

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  out.digest = c.digest();
  return out;
}

ResolvedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_config_text(text);
}

std::string config_reference() {
  return R"(Config keys (TOML; unknown keys are rejected):
  preset         = "none"          none | fig2 | fig3 | fig4 | fig5; other keys override it
  name           = "run"           prefix of every output file
  side           = 64              grid side in pixels (power of two for hadamard)
  patterns       = "hadamard"      hadamard (K = side^2) | random
  pattern_count  = 0               random patterns only; 0 means side^2
  pattern_seed   = 0               random patterns only
  methods        = ["cgi", "spc"]  any of cgi, spc, spc_corrected
  seeds          = [1, 2, 3, 4, 5]
  threads        = 0               0 = available parallelism
  output_dir     = ""              empty: --out, then $SPI_OUT_DIR, then ./spi_out
  write_images   = true
  [target]      source = "builtin:letters"   or a PGM/PNG path; builtins: letters, bars, checker, flat
  [sweep]       param = "epsilon_db"          epsilon_db | gamma | case (the four correction cases)
                values = [0.0]                strictly increasing
  [disturbance] kind = "none"                 none | global_spatial | local_spatial |
                                              intensity_fluctuation | composite
                epsilon_db = 0.0              irradiation SNR, 10 log10(signal / disturbance)
                gamma = 0.0                   std of the per-shot fluctuation in units of I0
                fluct_mean = 1.0              mean of the per-shot fluctuation in units of I0
                roi = [x0, y0, w, h]          local kind; default centered ~4 % square
                local_power = "field_mean"    field_mean | per_pixel
  [source]      i0 = 1.0
                signal_mean = i0 / 2
  [monitor]     enabled = true
                split_fraction = 0.1
)";
}

}  // namespace spi
