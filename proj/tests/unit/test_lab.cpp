#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lab/config.hpp"
#include "lab/runner.hpp"

using namespace szego::lab;
namespace fs = std::filesystem;

namespace {

const char* kSpectrum = R"({"command": "spectrum",
  "model": {"lambda": 0.5, "h": {"type": "zero"}, "omega": "golden"},
  "params": {"gridSize": 64}})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("szego-lab-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_SUITE("lab") {
  TEST_CASE("FNV-1a reference vectors") {
    CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
    CHECK(hex64(fnv1a("foobar")) == "85944171f73967e8");
  }

  TEST_CASE("commands round trip through their names") {
    for (const auto& n : commandNames()) {
      const auto c = commandFromString(n);
      REQUIRE(c.has_value());
      CHECK(std::string(toString(*c)) == n);
    }
    CHECK_FALSE(commandFromString("nope").has_value());
  }

  TEST_CASE("defaults are filled and the hash ignores key order and threads") {
    const auto a = validate(kSpectrum);
    CHECK((a.command == Command::spectrum));
    CHECK(a.params.at("gridSize") == 64);
    CHECK(a.params.at("refineSteps") == 8);
    const auto b = validate(R"({"params": {"gridSize": 64}, "threads": 3, "out": "elsewhere",
      "model": {"omega": "golden", "h": {"type": "zero"}, "lambda": 0.5}})",
                            Command::spectrum);
    CHECK(a.hash() == b.hash());
    CHECK(a.canonicalText() == b.canonicalText());
    CHECK(b.threads == 3);
    CHECK(a.hash().size() == 16);
    CHECK(validate(a.canonicalText()).hash() == a.hash());

    const auto c = validate(R"({"command": "spectrum", "model": {"lambda": 0.5, "h": {"type": "zero"},
      "omega": "golden"}, "params": {"gridSize": 65}})");
    CHECK(c.hash() != a.hash());
  }

  TEST_CASE("diagnostics name the offending key") {
    CHECK_THROWS_WITH_AS(validate(R"({"command": "spectrum", "model": {"lambda": 1.5, "omega": "golden"}})"),
                         doctest::Contains("model.lambda"), ConfigError);
    CHECK_THROWS_WITH_AS(
        validate(R"({"command": "spectrum", "model": {"lambda": 0.5, "omega": "golden"}, "params": {"grdSize": 4}})"),
        doctest::Contains("params.grdSize"), ConfigError);
    CHECK_THROWS_WITH_AS(validate("{\"command\": \"spectrum\",\n  \"model\": {\"lambda\": 0.5,, }}"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_AS(validate(R"({"model": {"lambda": 0.5, "omega": "golden"}})"), ConfigError);
    CHECK_THROWS_AS(validate(kSpectrum, Command::dos), ConfigError);
    CHECK_THROWS_AS(validate(R"({"command": "spectrum", "model": {"lambda": 0.5, "omega": "golden"},
      "params": {"gridSize": "big"}})"),
                    ConfigError);
  }

  TEST_CASE("line and column") {
    const auto [l, c] = lineColumn("ab\ncd\nef", 4);
    CHECK(l == 2);
    CHECK(c == 2);
  }

  TEST_CASE("run writes outputs, then replays from the cache") {
    TempDir dir;
    const auto cfg = validate(kSpectrum);
    RunOptions opt;
    opt.outDir = dir.path;
    opt.threads = 2;
    const auto first = run(cfg, opt);
    CHECK_FALSE(first.cacheHit);
    CHECK(fs::exists(dir.path / "result.json"));
    CHECK(fs::exists(dir.path / "payload.json"));
    CHECK(fs::exists(dir.path / "arcs.csv"));
    CHECK(fs::exists(cachePath(dir.path, cfg.hash())));
    const std::string payload = slurp(dir.path / "payload.json");
    const Json env = Json::parse(slurp(dir.path / "result.json"));
    CHECK(env.at("configHash") == cfg.hash());
    CHECK(env.at("toolVersion") == kToolVersion);

    const auto second = run(cfg, opt);
    CHECK(second.cacheHit);
    CHECK(slurp(dir.path / "payload.json") == payload);

    // A corrupt entry is reported and recomputed.
    writeAtomically(cachePath(dir.path, cfg.hash()), "{not json");
    const auto third = run(cfg, opt);
    CHECK_FALSE(third.cacheHit);
    CHECK_FALSE(third.warnings.empty());
    CHECK(slurp(dir.path / "payload.json") == payload);
    CHECK(run(cfg, opt).cacheHit);

    opt.useCache = false;
    CHECK_FALSE(run(cfg, opt).cacheHit);
  }

  TEST_CASE("payload does not depend on the thread count") {
    const auto cfg = validate(R"({"command": "dos", "model": {"lambda": 0.3, "h": {"type": "cosine"},
      "omega": "golden"}, "params": {"degree": 128, "phases": 6}})");
    szego::Exec one, many;
    one.threads = 1;
    many.threads = 6;
    CHECK(execute(cfg, one).payload.dump() == execute(cfg, many).payload.dump());
  }
}
