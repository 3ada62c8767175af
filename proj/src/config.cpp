#include "nwpat/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace nwpat {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_int(const std::string& s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_double_list(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    double v;
    if (!parse_double(trim(tok), v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

struct Binder {
  std::function<bool(const std::string&)> set; // false on type mismatch
  const char* type_name;
};

// Key registry; every settable key appears here and in serialize_config.
std::map<std::string, Binder> make_binders(RunConfig& c) {
  auto dbl = [](double& slot) {
    return Binder{[&slot](const std::string& v) { return parse_double(v, slot); }, "number"};
  };
  auto i32 = [](int& slot) {
    return Binder{[&slot](const std::string& v) { return parse_int(v, slot); }, "integer"};
  };
  auto u64 = [](std::uint64_t& slot) {
    return Binder{[&slot](const std::string& v) { return parse_u64(v, slot); }, "unsigned integer"};
  };
  auto str = [](std::string& slot) {
    return Binder{[&slot](const std::string& v) {
                    slot = v;
                    return true;
                  },
                  "string"};
  };
  auto dlist = [](std::vector<double>& slot) {
    return Binder{[&slot](const std::string& v) { return parse_double_list(v, slot); },
                  "comma-separated numbers"};
  };

  return {
      {"network.domain_width_um", dbl(c.network.domain_width_um)},
      {"network.domain_height_um", dbl(c.network.domain_height_um)},
      {"network.areal_density_per_um2", dbl(c.network.areal_density_per_um2)},
      {"network.length_mean_um", dbl(c.network.length_mean_um)},
      {"network.length_cv", dbl(c.network.length_cv)},
      {"network.diameter_mean_nm", dbl(c.network.diameter_mean_nm)},
      {"network.diameter_cv", dbl(c.network.diameter_cv)},
      {"electrical.resistivity_ohm_m", dbl(c.electrical.resistivity_eff_ohm_m)},
      {"electrical.r_contact_pristine_ohm", dbl(c.electrical.r_contact_pristine_ohm)},
      {"electrical.r_contact_da_ohm", dbl(c.electrical.r_contact_da_ohm)},
      {"electrical.r_contact_welded_ohm", dbl(c.electrical.r_contact_welded_ohm)},
      {"electrical.solver_tolerance", dbl(c.electrical.solver_tolerance)},
      {"electrical.max_iterations", i32(c.electrical.max_iterations)},
      {"files.calibration", str(c.calibration_path)},
      {"files.mask", str(c.mask_path)},
      {"files.permittivity", str(c.permittivity_path)},
      {"files.source_spectrum", str(c.source_spectrum_path)},
      {"optics.lambda_min_nm", dbl(c.lambda_min_nm)},
      {"optics.lambda_max_nm", dbl(c.lambda_max_nm)},
      {"optics.lambda_step_nm", dbl(c.lambda_step_nm)},
      {"optics.reference_wavelength_nm", dbl(c.reference_wavelength_nm)},
      {"output.dir", str(c.output_dir)},
      {"run.replicas", i32(c.replicas)},
      {"run.seed", u64(c.seed)},
      {"run.threads", i32(c.threads)},
      {"sweep.diameters_nm", dlist(c.sweep_diameters_nm)},
      {"sweep.temp_lo_c", dbl(c.sweep_temp_lo_c)},
      {"sweep.temp_hi_c", dbl(c.sweep_temp_hi_c)},
      {"sweep.temp_step_c", dbl(c.sweep_temp_step_c)},
      {"sweep.replicas", i32(c.sweep_replicas)},
      {"resolution.linewidths_um", dlist(c.resolution_linewidths_um)},
      {"resolution.replicas", i32(c.resolution_replicas)},
  };
}

// `<kind> key=value key=value ...`
bool parse_step_spec(const std::string& value, StepSpec& step, std::string& error) {
  std::istringstream is(value);
  std::string kind;
  is >> kind;
  if (kind != "decorate" && kind != "expose" && kind != "anneal") {
    error = "unknown step kind '" + kind + "'";
    return false;
  }
  step.kind = kind;
  std::string pair;
  while (is >> pair) {
    auto eq = pair.find('=');
    if (eq == std::string::npos) {
      error = "expected key=value, got '" + pair + "'";
      return false;
    }
    std::string key = pair.substr(0, eq);
    double v;
    if (!parse_double(pair.substr(eq + 1), v)) {
      error = "bad numeric value in '" + pair + "'";
      return false;
    }
    if (key == "temperature_c") {
      key = "temperature_k";
      v += kCelsiusOffset;
    }
    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"decorate", {"coverage"}},
        {"expose", {"intensity_mw_cm2", "duration_s"}},
        {"anneal", {"temperature_k", "duration_s"}},
    };
    const auto& ok = allowed.at(kind);
    if (std::find(ok.begin(), ok.end(), key) == ok.end()) {
      error = "step '" + kind + "' does not take argument '" + key + "'";
      return false;
    }
    step.args[key] = v;
  }
  return true;
}

void fill_step_defaults(StepSpec& s) {
  auto put = [&](const char* k, double v) {
    if (!s.args.count(k)) s.args[k] = v;
  };
  if (s.kind == "decorate") put("coverage", 0.8);
  if (s.kind == "expose") {
    put("intensity_mw_cm2", 10.74);
    put("duration_s", 480.0);
  }
  if (s.kind == "anneal") {
    put("temperature_k", 348.15);
    put("duration_s", 180.0);
  }
}

} // namespace

ConfigParseResult parse_config(const std::string& text) {
  ConfigParseResult result;
  RunConfig config;
  auto binders = make_binders(config);

  std::map<std::string, int> first_line;           // duplicate detection
  std::map<int, std::pair<StepSpec, int>> explicit_steps; // index -> (spec, line)
  std::map<std::string, std::pair<StepSpec, int>> convenience; // kind -> (spec, line)

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](int ln, const std::string& msg) {
    result.errors.push_back({ln, msg});
  };

  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string body = trim(line);
    if (body.empty()) continue;

    auto eq = body.find('=');
    if (eq == std::string::npos) {
      fail(lineno, "expected 'section.key = value'");
      continue;
    }
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));

    if (auto it = first_line.find(key); it != first_line.end()) {
      fail(lineno, "duplicate key '" + key + "' (first set at line " +
                       std::to_string(it->second) + ")");
      continue;
    }
    first_line[key] = lineno;

    if (key.rfind("recipe.step", 0) == 0) {
      int index;
      if (!parse_int(key.substr(11), index) || index <= 0) {
        fail(lineno, "recipe step key must be recipe.step<N> with N >= 1");
        continue;
      }
      StepSpec step;
      std::string err;
      if (!parse_step_spec(value, step, err)) {
        fail(lineno, err);
        continue;
      }
      explicit_steps[index] = {step, lineno};
      continue;
    }

    // Convenience single-step sections.
    static const std::map<std::string, std::pair<std::string, std::string>> conv = {
        {"decorate.coverage", {"decorate", "coverage"}},
        {"expose.intensity_mw_cm2", {"expose", "intensity_mw_cm2"}},
        {"expose.duration_s", {"expose", "duration_s"}},
        {"anneal.temperature_c", {"anneal", "temperature_c"}},
        {"anneal.temperature_k", {"anneal", "temperature_k"}},
        {"anneal.duration_s", {"anneal", "duration_s"}},
    };
    if (auto it = conv.find(key); it != conv.end()) {
      double v;
      if (!parse_double(value, v)) {
        fail(lineno, "key '" + key + "' expects a number, got '" + value + "'");
        continue;
      }
      std::string arg = it->second.second;
      if (arg == "temperature_c") {
        arg = "temperature_k";
        v += kCelsiusOffset;
      }
      auto& slot = convenience[it->second.first];
      slot.first.kind = it->second.first;
      slot.first.args[arg] = v;
      slot.second = lineno;
      continue;
    }

    auto bit = binders.find(key);
    if (bit == binders.end()) {
      fail(lineno, "unknown key '" + key + "'");
      continue;
    }
    if (!bit->second.set(value))
      fail(lineno, "key '" + key + "' expects " + std::string(bit->second.type_name) +
                       ", got '" + value + "'");
  }

  if (!explicit_steps.empty() && !convenience.empty()) {
    fail(convenience.begin()->second.second,
         "mixing recipe.step<N> keys with decorate./expose./anneal. sections");
  } else if (!explicit_steps.empty()) {
    int expected = 1;
    for (auto& [index, entry] : explicit_steps) {
      if (index != expected)
        fail(entry.second, "recipe steps must be numbered consecutively from 1");
      ++expected;
      fill_step_defaults(entry.first);
      config.recipe.push_back(entry.first);
    }
  } else {
    for (const char* kind : {"decorate", "expose", "anneal"}) {
      auto it = convenience.find(kind);
      if (it == convenience.end()) continue;
      StepSpec s = it->second.first;
      fill_step_defaults(s);
      config.recipe.push_back(s);
    }
  }

  if (!result.errors.empty()) return result;

  try {
    config.network.validate();
    config.electrical.validate();
  } catch (const std::exception& ex) {
    fail(0, ex.what());
    return result;
  }
  if (config.replicas < 1) {
    fail(0, "run.replicas must be >= 1");
    return result;
  }
  result.config = std::move(config);
  return result;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  char buf[160];
  auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
    os << buf;
  };
  auto integer = [&](const char* key, long long v) {
    std::snprintf(buf, sizeof buf, "%s = %lld\n", key, v);
    os << buf;
  };
  auto str = [&](const char* key, const std::string& v) {
    if (!v.empty()) os << key << " = " << v << "\n";
  };
  auto dlist = [&](const char* key, const std::vector<double>& vs) {
    os << key << " = ";
    for (std::size_t i = 0; i < vs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g%s", vs[i], i + 1 < vs.size() ? "," : "");
      os << buf;
    }
    os << "\n";
  };

  num("network.domain_width_um", c.network.domain_width_um);
  num("network.domain_height_um", c.network.domain_height_um);
  num("network.areal_density_per_um2", c.network.areal_density_per_um2);
  num("network.length_mean_um", c.network.length_mean_um);
  num("network.length_cv", c.network.length_cv);
  num("network.diameter_mean_nm", c.network.diameter_mean_nm);
  num("network.diameter_cv", c.network.diameter_cv);
  num("electrical.resistivity_ohm_m", c.electrical.resistivity_eff_ohm_m);
  num("electrical.r_contact_pristine_ohm", c.electrical.r_contact_pristine_ohm);
  num("electrical.r_contact_da_ohm", c.electrical.r_contact_da_ohm);
  num("electrical.r_contact_welded_ohm", c.electrical.r_contact_welded_ohm);
  num("electrical.solver_tolerance", c.electrical.solver_tolerance);
  integer("electrical.max_iterations", c.electrical.max_iterations);
  str("files.calibration", c.calibration_path);
  str("files.mask", c.mask_path);
  str("files.permittivity", c.permittivity_path);
  str("files.source_spectrum", c.source_spectrum_path);
  num("optics.lambda_min_nm", c.lambda_min_nm);
  num("optics.lambda_max_nm", c.lambda_max_nm);
  num("optics.lambda_step_nm", c.lambda_step_nm);
  num("optics.reference_wavelength_nm", c.reference_wavelength_nm);
  str("output.dir", c.output_dir);
  integer("run.replicas", c.replicas);
  std::snprintf(buf, sizeof buf, "run.seed = %llu\n",
                static_cast<unsigned long long>(c.seed));
  os << buf;
  integer("run.threads", c.threads);
  dlist("sweep.diameters_nm", c.sweep_diameters_nm);
  num("sweep.temp_lo_c", c.sweep_temp_lo_c);
  num("sweep.temp_hi_c", c.sweep_temp_hi_c);
  num("sweep.temp_step_c", c.sweep_temp_step_c);
  integer("sweep.replicas", c.sweep_replicas);
  dlist("resolution.linewidths_um", c.resolution_linewidths_um);
  integer("resolution.replicas", c.resolution_replicas);
  for (std::size_t i = 0; i < c.recipe.size(); ++i) {
    os << "recipe.step" << (i + 1) << " = " << c.recipe[i].kind;
    for (const auto& [k, v] : c.recipe[i].args) {
      std::snprintf(buf, sizeof buf, " %s=%.17g", k.c_str(), v);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ConfigParseResult res = parse_config(ss.str());
  if (!res.errors.empty()) {
    std::ostringstream msg;
    msg << "config " << path << " has " << res.errors.size() << " error(s):";
    for (const ParseIssue& e : res.errors)
      msg << "\n  line " << e.line << ": " << e.message;
    throw ValidationError(msg.str());
  }
  RunConfig cfg = *res.config;

  std::vector<std::string> missing;
  auto check = [&](const std::string& p) {
    if (!p.empty() && !std::filesystem::exists(p)) missing.push_back(p);
  };
  check(cfg.calibration_path);
  check(cfg.mask_path);
  check(cfg.permittivity_path);
  check(cfg.source_spectrum_path);
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "config " << path << ": referenced file(s) not found:";
    for (const auto& m : missing) msg << " " << m;
    throw ValidationError(msg.str());
  }
  return cfg;
}

ProcessRecipe build_recipe(const RunConfig& config,
                           std::shared_ptr<const RegionMask> mask,
                           const Spectrum& default_source) {
  ProcessRecipe recipe;
  for (const StepSpec& s : config.recipe) {
    if (s.kind == "decorate") {
      recipe.steps.push_back(DecorateStep{s.args.at("coverage")});
    } else if (s.kind == "expose") {
      if (!mask) throw ValidationError("recipe: expose step requires files.mask");
      ExposeStep e;
      e.mask = mask;
      e.intensity_mw_cm2 = s.args.at("intensity_mw_cm2");
      e.duration_s = s.args.at("duration_s");
      e.source_spectrum = default_source;
      recipe.steps.push_back(e);
    } else if (s.kind == "anneal") {
      recipe.steps.push_back(AnnealStep{s.args.at("temperature_k"), s.args.at("duration_s")});
    } else {
      throw ValidationError("recipe: unknown step kind " + s.kind);
    }
  }
  recipe.validate();
  return recipe;
}

} // namespace nwpat
