// Copyright 2026 The LGE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lge/experiment.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "lge/error.h"

namespace lge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lge_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json SmallConfig(const fs::path& out) {
  json j = json::parse(R"({
    "graph": {"generator": "sbm", "n": 80, "blocks": 4,
              "avg_degree": 8, "intra_fraction": 0.9},
    "trainer": "sgd",
    "sweep": {"lambda_reg": [0, 1], "dim": [4], "epochs": [3]},
    "eval": {"every": 1, "theory": {"enabled": true, "draws": 2}},
    "seed": 11
  })");
  j["output"] = out.string();
  return j;
}

std::string ConfigErrorText(const json& j) {
  try {
    ParseExperimentConfig(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("config errors name their fields") {
  json j = SmallConfig("x");
  j["sweep"]["dim"] = json::array();
  CHECK(ConfigErrorText(j).find("sweep.dim: axis is empty") !=
        std::string::npos);

  j = SmallConfig("x");
  j["bogus"] = 1;
  j["sgd"] = {{"lr", 2}};
  j["trainer"] = "adam";
  const std::string msg = ConfigErrorText(j);
  CHECK(msg.rfind("invalid config:", 0) == 0);
  CHECK(msg.find("bogus: unknown field") != std::string::npos);
  CHECK(msg.find("sgd.lr: unknown field") != std::string::npos);
  CHECK(msg.find("trainer") != std::string::npos);

  j = SmallConfig("x");
  j.erase("graph");
  CHECK(ConfigErrorText(j).find("graph") != std::string::npos);

  j = SmallConfig("x");
  j["trainer"] = "dcd";
  CHECK(ConfigErrorText(j).find("sweep.lambda_reg") != std::string::npos);
  j["sweep"]["lambda_reg"] = {1};
  CHECK(ConfigErrorText(j).empty());
}

TEST_CASE("config survives a json round trip") {
  const ExperimentConfig c = ParseExperimentConfig(SmallConfig("out_dir"));
  const auto j = ToJson(c);
  const ExperimentConfig d = ParseExperimentConfig(json::parse(j.dump()));
  CHECK(ToJson(d) == j);
  CHECK(d.lambda_reg == std::vector<double>{0, 1});
  CHECK(d.output == "out_dir");
  CHECK(d.theory.enabled);
}

TEST_CASE("cell seeds depend only on axis values") {
  ExperimentConfig c = ParseExperimentConfig(SmallConfig("x"));
  const auto before = ExpandCells(c);
  c.lambda_reg = {0.5, 0, 1};
  const auto after = ExpandCells(c);
  REQUIRE(after.size() == 3);
  CHECK(after[1].name == before[0].name);
  CHECK(after[1].seed == before[0].seed);
  CHECK(after[2].init_seed == before[1].init_seed);
  CHECK(before[0].seed != before[1].seed);
}

std::string ReadText(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("sweep writes its artifacts and is deterministic") {
  const fs::path a = TempDir("sweep_a"), b = TempDir("sweep_b");
  std::ostringstream log;
  const auto ma = RunExperiment(ParseExperimentConfig(SmallConfig(a)), log);
  const auto mb = RunExperiment(ParseExperimentConfig(SmallConfig(b)), log);
  CHECK(ma["output_hash"] == mb["output_hash"]);
  CHECK(ma["cells"].size() == 2);
  for (const auto& cell : ma["cells"]) {
    CHECK(cell["status"] == "done");
    const fs::path dir = a / cell["dir"].get<std::string>();
    for (const char* f : {"trace.csv", "trace.jsonl", "embeddings.txt",
                          "metrics.json", "DONE"}) {
      CHECK(fs::exists(dir / f));
    }
  }
  const json manifest = json::parse(ReadText(a / "manifest.json"));
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["config"]["seed"] == 11);

  // A second run skips finished cells and reproduces the hash.
  fs::remove_all(a / ma["cells"][1]["dir"].get<std::string>());
  std::ostringstream resume_log;
  const auto mc =
      RunExperiment(ParseExperimentConfig(SmallConfig(a)), resume_log);
  CHECK(mc["output_hash"] == ma["output_hash"]);
  CHECK(resume_log.str().find("skip") != std::string::npos);

  const Report r = BuildReport(a);
  CHECK(r.rows.size() == 2);
  CHECK(r.output_hash == ma["output_hash"]);
  CHECK(r.rows[0].low_dim);
  CHECK(std::isfinite(r.rows[0].rhs_gap));
  std::ostringstream table;
  WriteReportTable(table, r);
  CHECK(table.str().find("lr0_d4_t3") != std::string::npos);
  fs::remove_all(b);
}

void WriteApTrace(const fs::path& dir, std::initializer_list<double> aps) {
  TrainTrace t;
  int epoch = 0;
  for (double ap : aps) {
    EpochRecord r;
    r.epoch = ++epoch;
    r.avg_norm = epoch;
    r.test_ap = ap;
    t.records.push_back(r);
  }
  std::ofstream out(dir / "trace.csv");
  WriteTraceCsv(out, t);
}

TEST_CASE("report flags peak then decline") {
  const fs::path a = TempDir("report");
  json j = SmallConfig(a);
  j["eval"]["theory"]["enabled"] = false;
  std::ostringstream log;
  const auto m = RunExperiment(ParseExperimentConfig(j), log);
  const fs::path c0 = a / m["cells"][0]["dir"].get<std::string>();
  const fs::path c1 = a / m["cells"][1]["dir"].get<std::string>();
  WriteApTrace(c0, {0.6, 0.8, 0.75});
  WriteApTrace(c1, {0.6, 0.7, 0.71});
  const Report r = BuildReport(a);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].peak_then_decline);
  CHECK(r.rows[0].peak_epoch == 2);
  CHECK(r.rows[0].peak_test_ap == 0.8);
  CHECK(r.rows[0].final_test_ap == 0.75);
  CHECK(r.rows[0].final_avg_norm == 3.0);
  CHECK(std::isnan(r.rows[0].rhs_gap));
  CHECK_FALSE(r.rows[1].peak_then_decline);
  const auto rj = ToJson(r);
  CHECK(rj["rows"].size() == 2);
  fs::remove_all(a);
}

TEST_CASE("report needs a manifest") {
  const fs::path a = TempDir("empty");
  CHECK_THROWS_AS(BuildReport(a), ConfigError);
  std::ofstream(a / "manifest.json") << "{ not json";
  CHECK_THROWS_AS(BuildReport(a), ConfigError);
  fs::remove_all(a);
}

int Run(const std::string& args) {
  const std::string cmd =
      std::string(LGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST_CASE("cli exit codes") {
  const fs::path a = TempDir("cli");
  CHECK(Run("--help") == 0);
  CHECK(Run("no-such-verb") == 2);
  json bad = SmallConfig(a / "out");
  bad["sweep"]["epochs"] = json::array();
  std::ofstream(a / "bad.json") << bad.dump();
  CHECK(Run("sweep " + (a / "bad.json").string()) == 2);
  CHECK(Run("report " + a.string()) == 2);
  CHECK(Run("split --graph " + (a / "missing.txt").string()) != 0);

  CHECK(Run("--out " + (a / "g.txt").string() +
            " generate --kind d_regular --n 20 --degree 3") == 0);
  CHECK(fs::exists(a / "g.txt"));
  CHECK(Run("overfit --graph " + (a / "g.txt").string()) == 0);

  json good = SmallConfig(a / "out");
  good["sweep"]["lambda_reg"] = {1};
  good["eval"]["theory"]["enabled"] = false;
  std::ofstream(a / "good.json") << good.dump();
  CHECK(Run("sweep " + (a / "good.json").string()) == 0);
  CHECK(Run("report " + (a / "out").string()) == 0);
  CHECK(fs::exists(a / "out" / "report.json"));
  fs::remove_all(a);
}

}  // namespace
}  // namespace lge
