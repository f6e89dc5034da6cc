#include "lab/config.hpp"

#include "szego/gordon.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <set>

namespace szego::lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Kind { integer, real, boolean, text, realList, integerList };

struct Param {
  const char* name;
  Kind kind;
  Json fallback;
  double lo = -kInf;  // inclusive unless openLo
  double hi = kInf;   // inclusive unless openHi
  bool openLo = false;
  bool openHi = false;
  std::vector<std::string> choices;
};

using Schema = std::vector<Param>;

Param integer(const char* name, long long fallback, double lo, double hi) {
  return {name, Kind::integer, fallback, lo, hi, false, false, {}};
}
Param real(const char* name, double fallback, double lo, double hi, bool openLo = false, bool openHi = false) {
  return {name, Kind::real, fallback, lo, hi, openLo, openHi, {}};
}
Param boolean(const char* name, bool fallback) { return {name, Kind::boolean, fallback, -kInf, kInf, false, false, {}}; }
Param choice(const char* name, std::string fallback, std::vector<std::string> choices) {
  return {name, Kind::text, fallback, -kInf, kInf, false, false, std::move(choices)};
}
Param reals(const char* name, std::vector<double> fallback, double lo, double hi, bool openLo = false) {
  return {name, Kind::realList, fallback, lo, hi, openLo, false, {}};
}
Param integers(const char* name, std::vector<long long> fallback, double lo, double hi) {
  return {name, Kind::integerList, fallback, lo, hi, false, false, {}};
}

// phases = 0 selects the library default grid for the model.
const std::map<Command, Schema>& schemas() {
  static const std::map<Command, Schema> s = [] {
    std::map<Command, Schema> m;
    const std::vector<std::string> estimators{"truncation", "zeros"};
    m[Command::spectrum] = {integer("gridSize", 512, 8, 1 << 16), integer("refineSteps", 8, 0, 40),
                            integer("maxHorizon", 1 << 14, 256, 1 << 20)};
    m[Command::lyapunov] = {integer("gridSize", 64, 1, 1 << 14), real("radius", 1.0, 0.0, 100.0, true),
                            integer("nIter", 10000, 1, 1e8), integer("phases", 0, 0, 1 << 16)};
    m[Command::rotation] = {integer("gridSize", 100, 1, 1 << 14), integer("nIter", 20000, 1, 1e8),
                            integer("phases", 0, 0, 1 << 16)};
    m[Command::dos] = {integer("degree", 1000, 16, 1 << 20), integer("phases", 20, 1, 1 << 14),
                       choice("estimator", "truncation", estimators), integer("gridCells", 0, 0, 1 << 24)};
    m[Command::thouless] = {integer("degree", 2000, 16, 1 << 20),   integer("phases", 50, 1, 1 << 14),
                            choice("estimator", "truncation", estimators),
                            real("radius", 1.1, 0.0, 100.0, true),  integer("zetaCount", 16, 1, 1 << 14),
                            integer("nIter", 10000, 1, 1e8)};
    m[Command::holder] = {integer("degree", 4000, 16, 1 << 20), integer("phases", 20, 1, 1 << 14),
                          choice("estimator", "truncation", estimators),
                          reals("zetas", {}, 0.0, kTwoPi),
                          reals("epsilons", {0.01, 0.02, 0.05, 0.1}, 0.0, std::numbers::pi, true),
                          integer("zetaCount", 10, 1, 1 << 12)};
    m[Command::kam] = {real("zeta", 2.0, 0.0, kTwoPi),          real("epsilon0", 2e-3, 0.0, 1.0, true, true),
                       real("r", 0.05, 0.0, 10.0, true),         integer("maxSteps", 3, 1, 10),
                       real("floor", 1e-18, 0.0, 1.0, true),     boolean("enforceGate", true)};
    m[Command::jl] = {integer("samples", 20, 1, 10000),          integer("seed", 1, 0, 4294967295.0),
                      real("epsMin", 1e-3, 0.0, 0.5, true),      real("epsMax", 1e-1, 0.0, 0.5, true),
                      reals("x", {0.0}, 0.0, 1.0),               boolean("windows", true),
                      integer("identityCount", 1000, 1, 1 << 20)};
    m[Command::gordon] = {integer("zetaCount", 16, 1, 1 << 14), integers("qs", {}, 1, 1e12),
                          integer("cfDepth", 30, 1, 60),         reals("x", {0.0}, 0.0, 1.0),
                          integer("lyapunovIter", 10000, 1, 1e8), integer("scGrid", 0, 0, 1 << 14),
                          real("margin", 0.05, 0.0, 1.0)};
    m[Command::suite] = {integer("gridSize", 256, 8, 1 << 14), integer("degree", 2000, 16, 1 << 20),
                         integer("phases", 50, 1, 1 << 14)};
    return m;
  }();
  return s;
}

std::string where(const std::string& path) { return "'" + path + "'"; }

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double asNumber(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(where(path) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where(path) + " must be finite");
  return d;
}

long long asInteger(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  fail(where(path) + " must be an integer");
}

void checkRange(double v, const Param& p, const std::string& path) {
  const bool lowOk = p.openLo ? v > p.lo : v >= p.lo;
  const bool highOk = p.openHi ? v < p.hi : v <= p.hi;
  if (lowOk && highOk) return;
  char buf[160];
  std::snprintf(buf, sizeof buf, " = %.17g is outside %s%.17g, %.17g%s", v, p.openLo ? "(" : "[", p.lo, p.hi,
                p.openHi ? ")" : "]");
  fail(where(path) + buf);
}

Json validateParam(const Param& p, const Json& v, const std::string& path) {
  switch (p.kind) {
    case Kind::integer: {
      const long long n = asInteger(v, path);
      checkRange(static_cast<double>(n), p, path);
      return n;
    }
    case Kind::real: {
      const double d = asNumber(v, path);
      checkRange(d, p, path);
      return d;
    }
    case Kind::boolean:
      if (!v.is_boolean()) fail(where(path) + " must be true or false");
      return v;
    case Kind::text: {
      if (!v.is_string()) fail(where(path) + " must be a string");
      const auto s = v.get<std::string>();
      for (const auto& c : p.choices)
        if (c == s) return s;
      std::string list;
      for (const auto& c : p.choices) list += (list.empty() ? "" : ", ") + c;
      fail(where(path) + " = \"" + s + "\" is not one of {" + list + "}");
    }
    case Kind::realList:
    case Kind::integerList: {
      if (!v.is_array()) fail(where(path) + " must be an array");
      Json out = Json::array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string ip = path + "[" + std::to_string(i) + "]";
        if (p.kind == Kind::realList) {
          const double d = asNumber(v[i], ip);
          checkRange(d, p, ip);
          out.push_back(d);
        } else {
          const long long n = asInteger(v[i], ip);
          checkRange(static_cast<double>(n), p, ip);
          out.push_back(n);
        }
      }
      return out;
    }
  }
  return v;
}

void rejectUnknown(const Json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key)) continue;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    fail("unknown key '" + (path.empty() ? key : path + "." + key) + "' (allowed: " + list + ")");
  }
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail("missing key '" + path + "." + key + "'");
  return obj.at(key);
}

Json multiIndex(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(where(path) + " must be a non-empty integer array");
  Json out = Json::array();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const long long n = asInteger(v[i], path + "[" + std::to_string(i) + "]");
    if (std::llabs(n) > 10000) fail(where(path) + " has a mode beyond |k| = 10000");
    out.push_back(n);
  }
  return out;
}

// Canonical omega: {"values": [...]} plus the construction it came from.
Json validateOmega(const Json& v) {
  const std::string path = "model.omega";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "golden" || s == "liouville") return Json{{"named", s}};
    fail(where(path) + " = \"" + s + "\" is not one of {golden, liouville}");
  }
  if (v.is_number()) return Json{{"values", Json::array({v})}};
  if (v.is_array()) {
    if (v.empty() || v.size() > 8) fail(where(path) + " needs 1..8 components");
    Json vals = Json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string ip = path + "[" + std::to_string(i) + "]";
      const double d = asNumber(v[i], ip);
      if (!(d >= 0.0 && d < 1.0)) fail(where(ip) + " must lie in [0, 1)");
      vals.push_back(d);
    }
    return Json{{"values", vals}};
  }
  if (v.is_object()) {
    // Canonical output is valid input.
    rejectUnknown(v, {"partialQuotients", "named", "values"}, path);
    if (v.size() != 1) fail(where(path) + " needs exactly one of named, values, partialQuotients");
    if (v.contains("named")) return validateOmega(v["named"]);
    if (v.contains("values")) {
      if (!v["values"].is_array()) fail(where(path + ".values") + " must be an array");
      return validateOmega(v["values"]);
    }
    const Json& a = require(v, "partialQuotients", path);
    if (!a.is_array() || a.empty()) fail(where(path + ".partialQuotients") + " must be a non-empty array");
    Json qs = Json::array();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string ip = path + ".partialQuotients[" + std::to_string(i) + "]";
      const long long n = asInteger(a[i], ip);
      if (n < 1) fail(where(ip) + " must be >= 1");
      qs.push_back(n);
    }
    return Json{{"partialQuotients", qs}};
  }
  fail(where(path) + " must be \"golden\", \"liouville\", a number, an array or {\"partialQuotients\": [...]}");
}

int omegaDim(const Json& omega) { return omega.contains("values") ? static_cast<int>(omega["values"].size()) : 1; }

Json validateH(const Json& v, int dim) {
  const std::string path = "model.h";
  if (!v.is_object()) fail(where(path) + " must be an object with a \"type\"");
  const Json& typeJ = require(v, "type", path);
  if (!typeJ.is_string()) fail(where(path + ".type") + " must be a string");
  const auto type = typeJ.get<std::string>();
  Json out{{"type", type}};
  double radius = 0.5;
  if (v.contains("radius")) {
    radius = asNumber(v["radius"], path + ".radius");
    if (radius <= 0.0 || radius > 10.0) fail(where(path + ".radius") + " must lie in (0, 10]");
  }
  out["radius"] = radius;
  if (type == "zero") {
    rejectUnknown(v, {"type", "radius"}, path);
  } else if (type == "constant") {
    rejectUnknown(v, {"type", "radius", "value"}, path);
    out["value"] = asNumber(require(v, "value", path), path + ".value");
  } else if (type == "cosine") {
    rejectUnknown(v, {"type", "radius", "k", "amplitude"}, path);
    Json k = v.contains("k") ? multiIndex(v["k"], path + ".k") : Json::array({1});
    if (static_cast<int>(k.size()) != dim) fail(where(path + ".k") + " must have one entry per omega component");
    out["k"] = k;
    out["amplitude"] = v.contains("amplitude") ? asNumber(v["amplitude"], path + ".amplitude") : 1.0;
  } else if (type == "coefficients") {
    rejectUnknown(v, {"type", "radius", "terms"}, path);
    const Json& terms = require(v, "terms", path);
    if (!terms.is_array() || terms.empty()) fail(where(path + ".terms") + " must be a non-empty array");
    Json outTerms = Json::array();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string ip = path + ".terms[" + std::to_string(i) + "]";
      if (!terms[i].is_object()) fail(where(ip) + " must be an object {k, re, im}");
      rejectUnknown(terms[i], {"k", "re", "im"}, ip);
      Json k = multiIndex(require(terms[i], "k", ip), ip + ".k");
      if (static_cast<int>(k.size()) != dim) fail(where(ip + ".k") + " must have one entry per omega component");
      outTerms.push_back(Json{{"k", k},
                              {"re", terms[i].contains("re") ? asNumber(terms[i]["re"], ip + ".re") : 0.0},
                              {"im", terms[i].contains("im") ? asNumber(terms[i]["im"], ip + ".im") : 0.0}});
    }
    out["terms"] = outTerms;
  } else {
    fail(where(path + ".type") + " = \"" + type + "\" is not one of {zero, constant, cosine, coefficients}");
  }
  return out;
}

Json validateModel(const Json& v) {
  if (!v.is_object()) fail("'model' must be an object");
  rejectUnknown(v, {"lambda", "h", "omega"}, "model");
  const double lambda = asNumber(require(v, "lambda", "model"), "model.lambda");
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "'model.lambda' = %.17g violates |alpha_n| = lambda < 1 (lambda must lie in [0, 1))", lambda);
    fail(buf);
  }
  const Json omega = validateOmega(v.contains("omega") ? v["omega"] : Json("golden"));
  const Json h = validateH(v.contains("h") ? v["h"] : Json{{"type", "zero"}}, omegaDim(omega));
  return Json{{"lambda", lambda}, {"h", h}, {"omega", omega}};
}

}  // namespace

const char* toString(Command c) {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::lyapunov: return "lyapunov";
    case Command::rotation: return "rotation";
    case Command::dos: return "dos";
    case Command::thouless: return "thouless";
    case Command::holder: return "holder";
    case Command::kam: return "kam";
    case Command::jl: return "jl";
    case Command::gordon: return "gordon";
    case Command::suite: return "suite";
  }
  return "?";
}

const std::vector<std::string>& commandNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [c, _] : schemas()) n.emplace_back(toString(c));
    return n;
  }();
  return names;
}

std::optional<Command> commandFromString(std::string_view s) {
  for (const auto& [c, _] : schemas())
    if (s == toString(c)) return c;
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> lineColumn(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

ExperimentConfig validate(std::string_view text, std::optional<Command> cliCommand) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // byte is 1-based and points one past the offending character
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = lineColumn(text, at);
    std::string msg = e.what();
    const auto cut = msg.find(": ", msg.find("parse error"));
    fail("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
         (cut == std::string::npos ? msg : msg.substr(cut + 2)));
  }
  if (!root.is_object()) fail("config must be a JSON object");
  rejectUnknown(root, {"command", "model", "params", "threads", "out"}, "");

  ExperimentConfig cfg;
  std::optional<Command> fileCommand;
  if (root.contains("command")) {
    if (!root["command"].is_string()) fail("'command' must be a string");
    fileCommand = commandFromString(root["command"].get<std::string>());
    if (!fileCommand) fail("'command' = \"" + root["command"].get<std::string>() + "\" is not a known command");
  }
  if (fileCommand && cliCommand && *fileCommand != *cliCommand)
    fail(std::string("command line asks for '") + toString(*cliCommand) + "' but the config names '" +
         toString(*fileCommand) + "'");
  if (!fileCommand && !cliCommand) fail("no command given on the command line or in the config");
  cfg.command = cliCommand ? *cliCommand : *fileCommand;

  cfg.model = validateModel(require(root, "model", ""));

  const Schema& schema = schemas().at(cfg.command);
  const Json given = root.contains("params") ? root["params"] : Json::object();
  if (!given.is_object()) fail("'params' must be an object");
  std::set<std::string> allowed;
  for (const auto& p : schema) allowed.insert(p.name);
  rejectUnknown(given, allowed, "params");
  cfg.params = Json::object();
  for (const auto& p : schema) {
    const std::string path = std::string("params.") + p.name;
    cfg.params[p.name] = given.contains(p.name) ? validateParam(p, given[p.name], path) : p.fallback;
  }
  if (cfg.command == Command::jl && cfg.params["epsMin"].get<double>() > cfg.params["epsMax"].get<double>())
    fail("'params.epsMin' must not exceed 'params.epsMax'");

  if (root.contains("threads")) {
    const long long t = asInteger(root["threads"], "threads");
    if (t < 0 || t > 1024) fail("'threads' must lie in [0, 1024]");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (root.contains("out")) {
    if (!root["out"].is_string()) fail("'out' must be a string");
    cfg.out = root["out"].get<std::string>();
  }
  // Build once so model-level errors surface as config errors.
  try {
    (void)cfg.buildModel();
  } catch (const std::exception& e) {
    fail(std::string("invalid model: ") + e.what());
  }
  return cfg;
}

Json ExperimentConfig::canonical() const {
  // nlohmann objects are std::map backed, so dump() sorts keys; doubles print
  // in shortest round-trip form.
  return Json{{"command", toString(command)}, {"model", model}, {"params", params}};
}

std::string ExperimentConfig::canonicalText() const { return canonical().dump(); }

std::string ExperimentConfig::hash() const { return hex64(fnv1a(canonicalText())); }

VerblunskyModel ExperimentConfig::buildModel() const {
  const Json& om = model["omega"];
  Frequency omega = Frequency::golden();
  if (om.contains("named")) {
    if (om["named"] == "liouville") omega = liouville_frequency();
  } else if (om.contains("values")) {
    omega = Frequency(om["values"].get<std::vector<double>>());
  } else {
    const auto a = om["partialQuotients"].get<std::vector<long long>>();
    omega = Frequency({frequency_from_partial_quotients(a)});
  }
  const int dim = omega.dim();
  const Json& h = model["h"];
  const double radius = h["radius"].get<double>();
  const auto type = h["type"].get<std::string>();
  TrigPolynomial poly = TrigPolynomial::zero(dim, radius);
  if (type == "constant") {
    poly = TrigPolynomial::constant(dim, h["value"].get<double>(), radius);
  } else if (type == "cosine") {
    poly = TrigPolynomial::cosine(h["k"].get<MultiIndex>(), h["amplitude"].get<double>(), radius);
  } else if (type == "coefficients") {
    std::map<MultiIndex, cplx> c;
    for (const auto& t : h["terms"]) c[t["k"].get<MultiIndex>()] += cplx(t["re"].get<double>(), t["im"].get<double>());
    poly = TrigPolynomial(dim, std::move(c), radius);
  }
  return VerblunskyModel(model["lambda"].get<double>(), std::move(poly), std::move(omega));
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace szego::lab
