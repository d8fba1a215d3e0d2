#include <doctest.h>

#include <filesystem>

#include "aralab/error.hpp"
#include "aralab/scenario.hpp"

using namespace aralab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const auto d = fs::temp_directory_path() / ("aralab_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("scenario parsing") {
  const auto c = parse_scenario(R"({"name": "x", "pipeline": "telemetry", "seed": 4, "params": {"a": 1}})");
  CHECK(c.name == "x");
  CHECK(c.pipeline == "telemetry");
  CHECK(c.seed == 4);
  CHECK(c.params["a"] == 1);
  CHECK(parse_scenario(R"({"pipeline": "delay_cdf"})").name == "delay_cdf");
  CHECK(pipeline_names().size() == 9);

  CHECK_THROWS_AS(parse_scenario(R"({"pipeline": "nope"})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"name": "x"})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"pipeline": "telemetry", "name": "../up"})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"pipeline": "telemetry", "params": [1]})"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[1, 2]"), ConfigError);
  try {
    parse_scenario("{\n  \"pipeline\": ,\n}");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("config hash follows the text") {
  const auto a = parse_scenario(R"({"pipeline": "telemetry", "seed": 1})");
  const auto b = parse_scenario(R"({"pipeline": "telemetry", "seed": 2})");
  CHECK(config_hash(a) == config_hash(parse_scenario(R"({"pipeline": "telemetry", "seed": 1})")));
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("missing inputs are reported before running") {
  auto c = parse_scenario(R"({"pipeline": "telemetry", "topology": "/nonexistent/topo.json"})");
  CHECK_THROWS_AS(validate_scenario(c), ConfigError);
  auto t = parse_scenario(R"({"pipeline": "ltl_qoe", "params": {"trace": "/nonexistent.csv"}})");
  CHECK_THROWS(validate_scenario(t));
}

TEST_CASE("bad parameter types are configuration errors") {
  const auto c = parse_scenario(R"({"name": "badparam", "pipeline": "delay_cdf", "params": {"packets": "many"}})");
  CHECK_THROWS_AS(run_scenario(c, fresh_dir("badparam").string()), ConfigError);
}

TEST_CASE("runs are reproducible and carry a manifest") {
  const std::string text =
      R"({"name": "repro", "pipeline": "delay_cdf", "seed": 7, "params": {"packets": 50}})";
  const auto c = parse_scenario(text);
  const auto a = run_scenario(c, fresh_dir("run_a").string());
  const auto b = run_scenario(c, fresh_dir("run_b").string());
  REQUIRE(a.files == b.files);
  CHECK(a.files.back() == "manifest.json");
  for (const auto& f : a.files) {
    if (f == "manifest.json") continue;
    CHECK(read_text_file((fs::path(a.output_dir) / f).string()) ==
          read_text_file((fs::path(b.output_dir) / f).string()));
  }
  const auto& m = a.manifest;
  CHECK(m["config_hash"] == config_hash(c));
  CHECK(m["seed"] == 7);
  CHECK(m["pipeline"] == "delay_cdf");
  CHECK(m.contains("version"));
  CHECK(m.contains("created_utc"));
  CHECK(m["inputs"].contains("catalog"));
  CHECK(m["inputs"].contains("topology"));
  CHECK(m["files"].size() == a.files.size() - 1);
  CHECK(fs::exists(fs::path(a.output_dir) / "manifest.json"));
}

TEST_CASE("shipped scenario configs validate") {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(fs::path(ARALAB_SOURCE_DIR) / "scenarios")) {
    if (e.path().extension() != ".json") continue;
    ++n;
    CHECK_NOTHROW(validate_scenario(load_scenario(e.path().string())));
  }
  CHECK(n >= 9);
}
