#include "gzi/model_spec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gzi/error.hpp"
#include "gzi/format.hpp"

namespace gzi {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("not a number: '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text) {
  const double v = parse_double(text);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError("not an integer: '" + text + "'");
  return static_cast<long long>(v);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Stigler: return "stigler";
    case Variant::LuckockDiscrete: return "luckock";
    case Variant::SmithBounded: return "smith";
    case Variant::ContStyle: return "cont";
    case Variant::Gzi: return "gzi";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "stigler") return Variant::Stigler;
  if (n == "luckock" || n == "luckockdiscrete") return Variant::LuckockDiscrete;
  if (n == "smith" || n == "smithbounded") return Variant::SmithBounded;
  if (n == "cont" || n == "contstyle") return Variant::ContStyle;
  if (n == "gzi") return Variant::Gzi;
  throw ConfigError("unknown model variant '" + name + "'");
}

ModelSpec ModelSpec::stigler(int n, double scale) {
  ModelSpec s;
  s.variant = Variant::Stigler;
  s.grid = TickGrid(n);
  s.luckock.scale = scale;
  s.luckock.K.resize(static_cast<std::size_t>(n) + 1);
  for (int p = 0; p <= n; ++p) s.luckock.K[static_cast<std::size_t>(p)] = static_cast<double>(p) / n;
  s.luckock.L = s.luckock.K;
  return s;
}

ModelSpec ModelSpec::luckock_discrete(int n, std::vector<double> K, std::vector<double> L,
                                      double scale) {
  ModelSpec s;
  s.variant = Variant::LuckockDiscrete;
  s.grid = TickGrid(n);
  s.luckock = {std::move(K), std::move(L), scale};
  return s;
}

ModelSpec ModelSpec::smith_bounded(int n, double theta, double kappa, double rho) {
  ModelSpec s;
  s.variant = Variant::SmithBounded;
  s.grid = TickGrid(n);
  s.smith = {theta, kappa, rho};
  return s;
}

ModelSpec ModelSpec::cont_style(int n, double theta, std::vector<double> kappa,
                                std::vector<double> rho) {
  ModelSpec s;
  s.variant = Variant::ContStyle;
  s.grid = TickGrid(n);
  s.cont = {theta, std::move(kappa), std::move(rho)};
  return s;
}

ModelSpec ModelSpec::gzi_model(int n, const GziParams& p) {
  ModelSpec s;
  s.variant = Variant::Gzi;
  s.grid = TickGrid(n);
  s.gzi = p;
  return s;
}

namespace {

void require_rate(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string("rate '") + name + "' must be finite and >= 0");
}

}  // namespace

void validate(const ModelSpec& spec) {
  const int n = spec.grid.ticks();
  switch (spec.variant) {
    case Variant::Stigler:
    case Variant::LuckockDiscrete: {
      const auto& l = spec.luckock;
      require_rate(l.scale, "scale");
      for (const auto* cdf : {&l.K, &l.L}) {
        if (cdf->size() != static_cast<std::size_t>(n) + 1)
          throw ConfigError("Luckock K and L need n+1 values (ticks 0..n)");
        for (std::size_t i = 0; i < cdf->size(); ++i) {
          require_rate((*cdf)[i], "K/L");
          if (i > 0 && (*cdf)[i] < (*cdf)[i - 1]) throw ConfigError("Luckock K and L must be non-decreasing");
        }
        if (cdf->back() > 1.0 + 1e-12) throw ConfigError("Luckock K and L must not exceed 1");
      }
      break;
    }
    case Variant::SmithBounded:
      require_rate(spec.smith.theta, "theta");
      require_rate(spec.smith.kappa, "kappa");
      require_rate(spec.smith.rho, "rho");
      break;
    case Variant::ContStyle:
      require_rate(spec.cont.theta, "theta");
      for (double v : spec.cont.kappa) require_rate(v, "kappa");
      for (double v : spec.cont.rho) require_rate(v, "rho");
      break;
    case Variant::Gzi: {
      const auto& g = spec.gzi;
      require_rate(g.theta, "theta");
      require_rate(g.kappa, "kappa");
      require_rate(g.rho, "rho");
      require_rate(g.lambda, "lambda");
      require_rate(g.varrho, "varrho");
      require_rate(g.eta, "eta");
      require_rate(g.gamma, "gamma");
      if (!(g.alpha >= 0.0 && g.alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
      if (!(g.mu > 0.0) || !std::isfinite(g.mu)) throw ConfigError("mu must be > 0");
      break;
    }
  }
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    std::string key = lower(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", lineno);
    if (!section.empty()) key = section + "." + key;
    kv[key] = unquote(trim(line.substr(eq + 1)));
  }
  return kv;
}

std::vector<double> parse_number_list(const std::string& value) {
  std::string v = trim(value);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("unterminated list: " + value);
    v = v.substr(1, v.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(item));
  }
  return out;
}

namespace {

const std::string* find_key(const KeyValues& kv, const std::string& key) {
  // Keys may appear bare or under a [model] section.
  for (const std::string& k : {key, "model." + key}) {
    auto it = kv.find(k);
    if (it != kv.end()) return &it->second;
  }
  return nullptr;
}

double get_number(const KeyValues& kv, const std::string& key, double fallback) {
  const auto* v = find_key(kv, key);
  return v ? parse_double(*v) : fallback;
}

double require_number(const KeyValues& kv, const std::string& key) {
  const auto* v = find_key(kv, key);
  if (!v) throw ConfigError("missing model key '" + key + "'");
  return parse_double(*v);
}

std::vector<double> require_list(const KeyValues& kv, const std::string& key) {
  const auto* v = find_key(kv, key);
  if (!v) throw ConfigError("missing model key '" + key + "'");
  return parse_number_list(*v);
}

}  // namespace

ModelSpec model_spec_from(const KeyValues& kv) {
  const auto* variant = find_key(kv, "variant");
  if (!variant) throw ConfigError("missing model key 'variant'");
  const auto* ticks = find_key(kv, "ticks");
  if (!ticks) throw ConfigError("missing model key 'ticks'");
  const int n = static_cast<int>(parse_integer(*ticks));
  ModelSpec spec;
  switch (parse_variant(*variant)) {
    case Variant::Stigler:
      spec = ModelSpec::stigler(n, get_number(kv, "scale", 1.0));
      break;
    case Variant::LuckockDiscrete: {
      // Upper-case K/L are lowered by the parser.
      spec = ModelSpec::luckock_discrete(n, require_list(kv, "k"), require_list(kv, "l"),
                                         get_number(kv, "scale", 1.0));
      break;
    }
    case Variant::SmithBounded:
      spec = ModelSpec::smith_bounded(n, require_number(kv, "theta"), require_number(kv, "kappa"),
                                      require_number(kv, "rho"));
      break;
    case Variant::ContStyle:
      spec = ModelSpec::cont_style(n, require_number(kv, "theta"), require_list(kv, "kappa"),
                                   require_list(kv, "rho"));
      break;
    case Variant::Gzi: {
      GziParams p;
      p.theta = require_number(kv, "theta");
      p.kappa = require_number(kv, "kappa");
      p.rho = require_number(kv, "rho");
      p.lambda = get_number(kv, "lambda", 0.0);
      p.varrho = get_number(kv, "varrho", 0.0);
      p.eta = get_number(kv, "eta", 0.0);
      p.gamma = get_number(kv, "gamma", 0.0);
      p.alpha = get_number(kv, "alpha", 0.0);
      p.mu = get_number(kv, "mu", 1.0);
      spec = ModelSpec::gzi_model(n, p);
      break;
    }
  }
  validate(spec);
  return spec;
}

ModelSpec load_model_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  return model_spec_from(parse_key_values(in));
}

namespace {

std::string list_text(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

}  // namespace

std::string format_model_spec(const ModelSpec& spec) {
  std::ostringstream out;
  out << "variant = " << to_string(spec.variant) << "\n";
  out << "ticks = " << spec.grid.ticks() << "\n";
  switch (spec.variant) {
    case Variant::Stigler:
      out << "scale = " << format_double(spec.luckock.scale) << "\n";
      break;
    case Variant::LuckockDiscrete:
      out << "K = " << list_text(spec.luckock.K) << "\n";
      out << "L = " << list_text(spec.luckock.L) << "\n";
      out << "scale = " << format_double(spec.luckock.scale) << "\n";
      break;
    case Variant::SmithBounded:
      out << "theta = " << format_double(spec.smith.theta) << "\n";
      out << "kappa = " << format_double(spec.smith.kappa) << "\n";
      out << "rho = " << format_double(spec.smith.rho) << "\n";
      break;
    case Variant::ContStyle:
      out << "theta = " << format_double(spec.cont.theta) << "\n";
      out << "kappa = " << list_text(spec.cont.kappa) << "\n";
      out << "rho = " << list_text(spec.cont.rho) << "\n";
      break;
    case Variant::Gzi: {
      const auto& g = spec.gzi;
      out << "theta = " << format_double(g.theta) << "\n"
          << "kappa = " << format_double(g.kappa) << "\n"
          << "rho = " << format_double(g.rho) << "\n"
          << "lambda = " << format_double(g.lambda) << "\n"
          << "varrho = " << format_double(g.varrho) << "\n"
          << "eta = " << format_double(g.eta) << "\n"
          << "gamma = " << format_double(g.gamma) << "\n"
          << "alpha = " << format_double(g.alpha) << "\n"
          << "mu = " << format_double(g.mu) << "\n";
      break;
    }
  }
  return out.str();
}

}  // namespace gzi
