#include "szego/model_io.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <vector>

#include "szego/errors.hpp"

namespace szego {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

[[noreturn]] void bad(int line, const std::string& msg) {
  throw DomainError("model text line " + std::to_string(line) + ": " + msg);
}

double toDouble(std::string_view s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    bad(line, "'" + std::string(s) + "' is not a number");
  return v;
}

int toInt(std::string_view s, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    bad(line, "'" + std::string(s) + "' is not an integer");
  return v;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

VerblunskyModel parse_model(std::string_view text) {
  std::optional<double> lambda, radius;
  std::optional<std::vector<double>> omega;
  std::map<MultiIndex, cplx> coeffs;
  int lineNo = 0;
  while (!text.empty()) {
    ++lineNo;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) bad(lineNo, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "lambda") {
      lambda = toDouble(value, lineNo);
    } else if (key == "radius") {
      radius = toDouble(value, lineNo);
    } else if (key == "omega") {
      std::vector<double> w;
      for (const auto part : split(value, ',')) w.push_back(toDouble(part, lineNo));
      omega = std::move(w);
    } else if (key.substr(0, 2) == "h.") {
      MultiIndex k;
      for (const auto part : split(key.substr(2), ',')) k.push_back(toInt(part, lineNo));
      const auto reim = split(value, ',');
      if (reim.size() != 2) bad(lineNo, "coefficient needs re,im");
      if (coeffs.count(k)) bad(lineNo, "duplicate coefficient");
      coeffs[k] = {toDouble(reim[0], lineNo), toDouble(reim[1], lineNo)};
    } else {
      bad(lineNo, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!lambda) throw DomainError("model text: missing 'lambda'");
  if (!omega) throw DomainError("model text: missing 'omega'");
  const int dim = static_cast<int>(omega->size());
  for (const auto& [k, _] : coeffs)
    if (static_cast<int>(k.size()) != dim) throw DomainError("model text: mode dimension differs from omega");
  return VerblunskyModel(*lambda, TrigPolynomial(dim, std::move(coeffs), radius.value_or(0.5)),
                         Frequency(std::move(*omega)));
}

std::string serialize_model(const VerblunskyModel& model) {
  std::string out = "lambda = " + shortest(model.lambda()) + "\nomega = ";
  const auto& w = model.omega().values();
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "," : "") + shortest(w[i]);
  out += "\nradius = " + shortest(model.h().radius()) + "\n";
  for (const auto& [k, c] : model.h().coefficients()) {
    out += "h.";
    for (std::size_t i = 0; i < k.size(); ++i) out += (i ? "," : "") + std::to_string(k[i]);
    out += " = " + shortest(c.real()) + "," + shortest(c.imag()) + "\n";
  }
  return out;
}

}  // namespace szego
