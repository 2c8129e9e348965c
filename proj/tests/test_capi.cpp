#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "spvdg.h"

namespace fs = std::filesystem;

namespace {

std::string temp_dir() {
  static int counter = 0;
  const std::string d = "/tmp/spvdg_capi_" + std::to_string(getpid()) + "_" +
                        std::to_string(counter++);
  fs::create_directories(d);
  return d;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return body;
}

} // namespace

TEST_CASE("list_scenarios names all nine presets") {
  size_t needed = 0;
  REQUIRE(spvdg_list_scenarios(nullptr, 0, &needed) == SPVDG_OK);
  REQUIRE(needed > 0);
  std::vector<char> buf(needed + 1);
  REQUIRE(spvdg_list_scenarios(buf.data(), buf.size(), &needed) == SPVDG_OK);
  const std::string body(buf.data());
  for (const char* name : {"ch2-estimate", "ch2-mppt", "ch3-unified",
                           "ch4-case1", "ch4-case2", "ch4-case3",
                           "ch5-case1", "ch5-case2", "ch5-case3"})
    CHECK(body.find(name) != std::string::npos);
  // name\tdescription lines
  CHECK(std::count(body.begin(), body.end(), '\n') == 9);
  CHECK(std::count(body.begin(), body.end(), '\t') == 9);
}

TEST_CASE("open / set / serialize / hash round-trip") {
  spvdg_scenario* sc = nullptr;
  REQUIRE(spvdg_scenario_open("ch4-case1", &sc) == SPVDG_OK);
  REQUIRE(sc != nullptr);

  char h1[17], h2[17];
  REQUIRE(spvdg_scenario_hash(sc, h1) == SPVDG_OK);
  CHECK(std::strlen(h1) == 16);

  CHECK(spvdg_scenario_set(sc, "K1", "11") == SPVDG_OK);
  REQUIRE(spvdg_scenario_hash(sc, h2) == SPVDG_OK);
  CHECK(std::strcmp(h1, h2) != 0);

  size_t needed = 0;
  REQUIRE(spvdg_scenario_serialize(sc, nullptr, 0, &needed) == SPVDG_OK);
  std::vector<char> buf(needed + 1);
  REQUIRE(spvdg_scenario_serialize(sc, buf.data(), buf.size(), &needed) ==
          SPVDG_OK);
  const std::string body(buf.data());
  CHECK(body.find("scenario = ch4-case1") != std::string::npos);
  CHECK(body.find("K1 = 11") != std::string::npos);

  // Truncation still NUL-terminates.
  char tiny[8];
  REQUIRE(spvdg_scenario_serialize(sc, tiny, sizeof(tiny), &needed) == SPVDG_OK);
  CHECK(std::strlen(tiny) == 7);
  CHECK(needed == body.size());

  spvdg_scenario_free(sc);
}

TEST_CASE("error paths report codes and messages") {
  spvdg_scenario* sc = nullptr;
  CHECK(spvdg_scenario_open("/no/such/file.cfg", &sc) == SPVDG_ERR_IO);
  CHECK(std::strlen(spvdg_last_error()) > 0);

  CHECK(spvdg_scenario_open(nullptr, &sc) == SPVDG_ERR_INVALID_ARGUMENT);

  REQUIRE(spvdg_scenario_open("ch4-case1", &sc) == SPVDG_OK);
  CHECK(spvdg_scenario_set(sc, "bogus.key", "1") == SPVDG_ERR_BAD_CONFIG);
  CHECK(spvdg_scenario_set(sc, "K1", "soon") == SPVDG_ERR_BAD_CONFIG);
  CHECK(spvdg_scenario_set(sc, nullptr, "1") == SPVDG_ERR_INVALID_ARGUMENT);
  // A successful call clears the sticky message.
  CHECK(spvdg_scenario_set(sc, "K1", "11") == SPVDG_OK);
  CHECK(std::strlen(spvdg_last_error()) == 0);
  spvdg_scenario_free(sc);
}

TEST_CASE("run returns a readable trace") {
  spvdg_scenario* sc = nullptr;
  REQUIRE(spvdg_scenario_open("ch5-case1", &sc) == SPVDG_OK);
  REQUIRE(spvdg_scenario_set(sc, "sim.duration", "0.005") == SPVDG_OK);

  spvdg_trace* tr = nullptr;
  REQUIRE(spvdg_scenario_run(sc, &tr) == SPVDG_OK);
  size_t rows = 0;
  int has_obs = 0;
  REQUIRE(spvdg_trace_size(tr, &rows, &has_obs) == SPVDG_OK);
  CHECK(rows == 51); // 500 steps, stride 10, plus the initial sample
  CHECK(has_obs == 1);

  double cols[18];
  REQUIRE(spvdg_trace_row(tr, 0, cols) == SPVDG_OK);
  CHECK(cols[0] == doctest::Approx(0.0));
  REQUIRE(spvdg_trace_row(tr, rows - 1, cols) == SPVDG_OK);
  CHECK(cols[0] == doctest::Approx(0.005));
  CHECK(cols[6] == doctest::Approx(40.0).epsilon(0.05)); // x6 near the bus ref
  CHECK(cols[13] == doctest::Approx(24.0).epsilon(1e-6)); // d2hat
  CHECK(spvdg_trace_row(tr, rows, cols) == SPVDG_ERR_INVALID_ARGUMENT);

  spvdg_trace_free(tr);
  spvdg_scenario_free(sc);
}

TEST_CASE("estimate-table preset runs with an empty trace") {
  spvdg_scenario* sc = nullptr;
  REQUIRE(spvdg_scenario_open("ch2-estimate", &sc) == SPVDG_OK);
  spvdg_trace* tr = nullptr;
  REQUIRE(spvdg_scenario_run(sc, &tr) == SPVDG_OK);
  size_t rows = 99;
  REQUIRE(spvdg_trace_size(tr, &rows, nullptr) == SPVDG_OK);
  CHECK(rows == 0);
  spvdg_trace_free(tr);
  spvdg_scenario_free(sc);
}

TEST_CASE("run_files writes the three artifacts") {
  const std::string dir = temp_dir();
  const char* overrides[] = {"sim.duration=0.005", "K1=12"};
  REQUIRE(spvdg_run_files("ch4-case1", overrides, 2, dir.c_str()) == SPVDG_OK);

  const std::string csv = slurp(dir + "/trace.csv");
  CHECK(csv.rfind("t,x1,", 0) == 0);
  const std::string metrics = slurp(dir + "/metrics.txt");
  CHECK(metrics.find("segment 1:") != std::string::npos);
  const std::string manifest = slurp(dir + "/manifest.txt");
  CHECK(manifest.find("scenario: ch4-case1") != std::string::npos);
  CHECK(manifest.find("K1=12") != std::string::npos);
  CHECK(manifest.find("config_hash: ") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("run_files accepts a config file path") {
  const std::string dir = temp_dir();
  const std::string cfg = dir + "/my.cfg";
  {
    std::ofstream out(cfg);
    out << "scenario = ch2-estimate\n";
  }
  REQUIRE(spvdg_run_files(cfg.c_str(), nullptr, 0, dir.c_str()) == SPVDG_OK);
  const std::string metrics = slurp(dir + "/metrics.txt");
  CHECK(metrics.find("T_est") != std::string::npos);

  // Bad override syntax surfaces as a config error.
  const char* bad[] = {"K1:12"};
  CHECK(spvdg_run_files("ch4-case1", bad, 1, dir.c_str()) ==
        SPVDG_ERR_BAD_CONFIG);
  fs::remove_all(dir);
}
