#include "aci/config.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace aci {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& src, int line,
                       const std::string& msg) {
  throw Error(fmt::format("{}:{}: {}", src, line, msg));
}

double parse_double(const std::string& src, int line, const std::string& key,
                    const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(src, line, fmt::format("value '{}' for key '{}' is not a number", v,
                                key));
  }
}

long long parse_int(const std::string& src, int line, const std::string& key,
                    const std::string& v) {
  try {
    size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    fail(src, line, fmt::format("value '{}' for key '{}' is not an integer",
                                v, key));
  }
}

bool parse_bool(const std::string& src, int line, const std::string& key,
                const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  fail(src, line,
       fmt::format("value '{}' for key '{}' is not a boolean", v, key));
}

std::vector<int> parse_int_list(const std::string& src, int line,
                                const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(parse_int(src, line, key, trim(item))));
  return out;
}

std::vector<double> parse_double_list(const std::string& src, int line,
                                      const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_double(src, line, key, trim(item)));
  return out;
}

struct ParamRef {
  const char* key;
  double* val;
};

std::vector<ParamRef> param_table(ModelChoice& mc) {
  if (mc.kind == "climate" || mc.kind == "climate-gamma-hidden") {
    ClimateParams& p = mc.climate;
    return {{"eps", &p.eps},           {"d_x", &p.d_x},
            {"alpha", &p.alpha},       {"sigma_x", &p.sigma_x},
            {"d_y", &p.d_y},           {"beta", &p.beta},
            {"sigma_y", &p.sigma_y},   {"d_gamma", &p.d_gamma},
            {"gamma_bar", &p.gamma_bar}, {"sigma_gamma", &p.sigma_gamma}};
  }
  if (mc.kind == "multiscale") {
    MultiscaleParams& p = mc.multiscale;
    return {{"a1", &p.a1},       {"c1", &p.c1},
            {"m", &p.m},         {"m1", &p.m1},
            {"m2", &p.m2},       {"i11", &p.i11},
            {"i12", &p.i12},     {"i21", &p.i21},
            {"i22", &p.i22},     {"l11", &p.l11},
            {"l12", &p.l12},     {"l21", &p.l21},
            {"l22", &p.l22},     {"fx1_base", &p.fx1_base},
            {"sigma_x1", &p.sigma_x1}, {"c2", &p.c2},
            {"fx2_base", &p.fx2_base}, {"fx2_amp", &p.fx2_amp},
            {"fx2_period", &p.fx2_period}, {"sigma_x2", &p.sigma_x2},
            {"gamma1", &p.gamma1}, {"gamma2", &p.gamma2},
            {"eps", &p.eps},     {"n", &p.n},
            {"fy1", &p.fy1},     {"fy2", &p.fy2},
            {"sigma_y1", &p.sigma_y1}, {"sigma_y2", &p.sigma_y2}};
  }
  if (mc.kind == "lorenz84") {
    Lorenz84Params& p = mc.lorenz84;
    return {{"a", &p.a},
            {"b", &p.b},
            {"g", &p.g},
            {"f_base", &p.f_base},
            {"f_amp", &p.f_amp},
            {"f_period", &p.f_period},
            {"sigma_x", &p.sigma_x},
            {"sigma_y", &p.sigma_y},
            {"sigma_z", &p.sigma_z}};
  }
  if (mc.kind == "reduced-linear") {
    ReducedLinearParams& p = mc.reduced;
    return {{"lambda_x", &p.lambda_x}, {"lambda_y", &p.lambda_y},
            {"sigma_x", &p.sigma_x},   {"sigma_y", &p.sigma_y},
            {"fx_base", &p.fx_base},   {"fx_amp", &p.fx_amp},
            {"fx_period", &p.fx_period}, {"fy_base", &p.fy_base},
            {"fy_amp", &p.fy_amp},     {"fy_period", &p.fy_period}};
  }
  throw Error(fmt::format("unknown model kind '{}'", mc.kind));
}

constexpr const char* kKinds[] = {"climate", "climate-gamma-hidden",
                                 "multiscale", "lorenz84", "reduced-linear"};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& src) {
  ExperimentConfig cfg;
  cfg.window_start = std::numeric_limits<double>::quiet_NaN();
  cfg.window_end = std::numeric_limits<double>::quiet_NaN();

  std::string section;
  QuerySpec* query = nullptr;
  bool model_kind_set = false;

  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(src, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      query = nullptr;
      if (section.rfind("queries.", 0) == 0) {
        const std::string name = section.substr(8);
        if (name.empty()) fail(src, line, "query section needs a name");
        for (const QuerySpec& q : cfg.queries)
          if (q.name == name)
            fail(src, line, fmt::format("duplicate query '{}'", name));
        QuerySpec q;
        q.name = name;
        cfg.queries.push_back(std::move(q));
        query = &cfg.queries.back();
      } else if (section != "model" && section != "simulation" &&
                 section != "analysis" && section != "output") {
        fail(src, line, fmt::format("unknown section [{}]", section));
      }
      continue;
    }

    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(src, line, "expected 'key = value' or a section header");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(src, line, "empty key");
    if (section.empty())
      fail(src, line, "key outside of any section");

    if (section == "model") {
      if (key == "kind") {
        bool ok = false;
        for (const char* k : kKinds) ok = ok || val == k;
        if (!ok)
          fail(src, line, fmt::format("unknown model kind '{}'", val));
        cfg.model.kind = val;
        model_kind_set = true;
        continue;
      }
      if (!model_kind_set)
        fail(src, line, "set 'kind' before model parameter overrides");
      bool matched = false;
      for (const ParamRef& pr : param_table(cfg.model)) {
        if (key == pr.key) {
          *pr.val = parse_double(src, line, key, val);
          matched = true;
          break;
        }
      }
      if (!matched)
        fail(src, line, fmt::format("unknown key '{}' for model kind '{}'",
                                    key, cfg.model.kind));
    } else if (section == "simulation") {
      if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_int(src, line, key, val));
      else if (key == "dt")
        cfg.dt = parse_double(src, line, key, val);
      else if (key == "t_start")
        cfg.t_start = parse_double(src, line, key, val);
      else if (key == "t_end")
        cfg.t_end = parse_double(src, line, key, val);
      else if (key == "x0")
        cfg.x0 = parse_double_list(src, line, key, val);
      else if (key == "y0")
        cfg.y0 = parse_double_list(src, line, key, val);
      else
        fail(src, line,
             fmt::format("unknown key '{}' in [simulation]", key));
    } else if (section == "analysis") {
      if (key == "window_start")
        cfg.window_start = parse_double(src, line, key, val);
      else if (key == "window_end")
        cfg.window_end = parse_double(src, line, key, val);
      else if (key == "stride")
        cfg.stride = static_cast<int>(parse_int(src, line, key, val));
      else if (key == "lag_cap")
        cfg.lag_cap = static_cast<int>(parse_int(src, line, key, val));
      else if (key == "lag_tol")
        cfg.lag_tol = parse_double(src, line, key, val);
      else if (key == "exact")
        cfg.exact = parse_bool(src, line, key, val);
      else
        fail(src, line, fmt::format("unknown key '{}' in [analysis]", key));
    } else if (section == "output") {
      if (key == "dir")
        cfg.out_dir = val;
      else if (key == "svg")
        cfg.svg = parse_bool(src, line, key, val);
      else if (key == "trajectory")
        cfg.write_trajectory = parse_bool(src, line, key, val);
      else if (key == "filter")
        cfg.write_filter = parse_bool(src, line, key, val);
      else if (key == "bank")
        cfg.write_bank = parse_bool(src, line, key, val);
      else
        fail(src, line, fmt::format("unknown key '{}' in [output]", key));
    } else {
      // inside a [queries.*] section
      if (key == "cause")
        query->cause = parse_int_list(src, line, key, val);
      else if (key == "effect")
        query->effect = parse_int_list(src, line, key, val);
      else if (key == "conditioning_observed")
        query->cond_obs = parse_int_list(src, line, key, val);
      else if (key == "conditioning_hidden")
        query->cond_hidden = parse_int_list(src, line, key, val);
      else if (key == "mode") {
        if (val != "exact-limit" && val != "large-noise")
          fail(src, line,
               fmt::format("mode must be exact-limit or large-noise, got "
                           "'{}'",
                           val));
        query->mode = val;
      } else if (key == "noise_scale")
        query->noise_scale = parse_double(src, line, key, val);
      else if (key == "label")
        query->label = val;
      else
        fail(src, line,
             fmt::format("unknown key '{}' in [{}]", key, section));
    }
  }

  if (cfg.dt <= 0.0) throw Error(fmt::format("{}: dt must be positive", src));
  if (cfg.t_end <= cfg.t_start)
    throw Error(fmt::format("{}: t_end must exceed t_start", src));
  if (cfg.stride < 1)
    throw Error(fmt::format("{}: stride must be at least 1", src));
  if (cfg.lag_cap < 1)
    throw Error(fmt::format("{}: lag_cap must be at least 1", src));
  if (cfg.lag_tol <= 0.0)
    throw Error(fmt::format("{}: lag_tol must be positive", src));
  if (std::isnan(cfg.window_start)) cfg.window_start = cfg.t_start;
  if (std::isnan(cfg.window_end)) cfg.window_end = cfg.t_end;
  for (QuerySpec& q : cfg.queries)
    if (q.label.empty()) q.label = q.name;
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read config '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  auto list = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  auto dlist = [&](const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
  };

  out += "[model]\n";
  out += fmt::format("kind = {}\n", cfg.model.kind);
  ModelChoice mc = cfg.model;
  for (const ParamRef& pr : param_table(mc))
    out += fmt::format("{} = {}\n", pr.key, num(*pr.val));

  out += "\n[simulation]\n";
  out += fmt::format("seed = {}\n", cfg.seed);
  out += fmt::format("dt = {}\n", num(cfg.dt));
  out += fmt::format("t_start = {}\n", num(cfg.t_start));
  out += fmt::format("t_end = {}\n", num(cfg.t_end));
  if (!cfg.x0.empty()) out += fmt::format("x0 = {}\n", dlist(cfg.x0));
  if (!cfg.y0.empty()) out += fmt::format("y0 = {}\n", dlist(cfg.y0));

  out += "\n[analysis]\n";
  out += fmt::format("window_start = {}\n", num(cfg.window_start));
  out += fmt::format("window_end = {}\n", num(cfg.window_end));
  out += fmt::format("stride = {}\n", cfg.stride);
  out += fmt::format("lag_cap = {}\n", cfg.lag_cap);
  out += fmt::format("lag_tol = {}\n", num(cfg.lag_tol));
  out += fmt::format("exact = {}\n", cfg.exact ? "true" : "false");

  out += "\n[output]\n";
  out += fmt::format("dir = {}\n", cfg.out_dir);
  out += fmt::format("svg = {}\n", cfg.svg ? "true" : "false");
  out += fmt::format("trajectory = {}\n", cfg.write_trajectory ? "true" : "false");
  out += fmt::format("filter = {}\n", cfg.write_filter ? "true" : "false");
  out += fmt::format("bank = {}\n", cfg.write_bank ? "true" : "false");

  for (const QuerySpec& q : cfg.queries) {
    out += fmt::format("\n[queries.{}]\n", q.name);
    out += fmt::format("label = {}\n", q.label);
    if (!q.cause.empty()) out += fmt::format("cause = {}\n", list(q.cause));
    if (!q.effect.empty()) out += fmt::format("effect = {}\n", list(q.effect));
    if (!q.cond_obs.empty())
      out += fmt::format("conditioning_observed = {}\n", list(q.cond_obs));
    if (!q.cond_hidden.empty())
      out += fmt::format("conditioning_hidden = {}\n", list(q.cond_hidden));
    out += fmt::format("mode = {}\n", q.mode);
    if (q.mode == "large-noise")
      out += fmt::format("noise_scale = {}\n", num(q.noise_scale));
  }
  return out;
}

}  // namespace aci
