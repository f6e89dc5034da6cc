#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "szego/model.hpp"

namespace szego::lab {

using Json = nlohmann::json;

enum class Command { spectrum, lyapunov, rotation, dos, thouless, holder, kam, jl, gordon, suite };

const char* toString(Command c);
std::optional<Command> commandFromString(std::string_view s);
const std::vector<std::string>& commandNames();

/// Invalid config: bad syntax, unknown key, wrong type or out-of-range value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validated experiment. `params` carries every parameter of the command with
/// defaults filled in; `model` is the canonical model object.
struct ExperimentConfig {
  Command command = Command::spectrum;
  Json model;
  Json params;
  unsigned threads = 0;  ///< 0 = one worker per core; not part of the hash
  std::string out;       ///< output directory; not part of the hash

  /// Sorted keys, defaults filled, numbers in shortest round-trip form.
  [[nodiscard]] Json canonical() const;
  [[nodiscard]] std::string canonicalText() const;
  /// FNV-1a 64 of canonicalText(), 16 hex digits.
  [[nodiscard]] std::string hash() const;
  [[nodiscard]] VerblunskyModel buildModel() const;
};

/// Parses and validates. `cliCommand` must agree with a "command" key when both
/// are present; at least one must be given.
ExperimentConfig validate(std::string_view text, std::optional<Command> cliCommand = std::nullopt);

/// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> lineColumn(std::string_view text, std::size_t offset);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace szego::lab
