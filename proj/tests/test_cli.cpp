// Copyright 2026 The mimoscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "mimoscope/ingest.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mimoscope::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> synth_args(const fs::path& out, const std::string& seed = "7") {
  return {"synth", "--model", "iid", "--antennas", "8", "--snapshots", "200", "--freqs", "2",
          "--positions", "4", "--seed", seed, "--out", out.string()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("synth writes a loadable, reproducible dataset") {
    fixture::TempDir dir("cli-synth");
    const auto a = dir.path() / "a";
    const auto b = dir.path() / "b";
    auto r = run(synth_args(a));
    CHECK(r.code == mimoscope::cli::kOk);
    REQUIRE(run(synth_args(b)).code == 0);
    const auto ds = mimoscope::load_dataset(a);
    CHECK(ds.size() == 4);
    CHECK(ds.manifest().num_antennas == 8);
    for (const auto& p : ds.manifest().positions) CHECK(slurp(a / p.file) == slurp(b / p.file));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  }

  TEST_CASE("synth rejects invalid models with exit 2") {
    fixture::TempDir dir("cli-bad");
    auto args = synth_args(dir.path() / "x");
    args[4] = "0";
    const auto r = run(args);
    CHECK(r.code == mimoscope::cli::kUsageError);
    CHECK_FALSE(r.err.empty());
    CHECK_FALSE(fs::exists(dir.path() / "x"));
    CHECK(run({"synth", "--model", "bogus", "--out", (dir.path() / "y").string()}).code == 2);
    CHECK(run({"synth", "--model", "kronecker", "--rho", "1.5", "--out", (dir.path() / "y").string()}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"synth", "--antennas", "abc"}).code == 2);
  }

  TEST_CASE("analyze writes the hardening CSV and is reproducible") {
    fixture::TempDir dir("cli-analyze");
    REQUIRE(run(synth_args(dir.path() / "ds")).code == 0);
    const std::vector<std::string> base{"analyze", "--dataset", (dir.path() / "ds").string(), "--experiments",
                                        "hardening,correlation,condition,eigen,gain,schedule",
                                        "--window", "100", "--trials", "300", "--node-counts", "2,3",
                                        "--seed", "5"};
    auto a = base;
    a.insert(a.end(), {"--out", (dir.path() / "o1").string(), "--threads", "1"});
    auto b = base;
    b.insert(b.end(), {"--out", (dir.path() / "o2").string(), "--threads", "4"});
    const auto r1 = run(a);
    INFO(r1.err);
    REQUIRE(r1.code == 0);
    REQUIRE(run(b).code == 0);
    const auto csv = slurp(dir.path() / "o1" / "hardening_std.csv");
    CHECK(csv.rfind("m,mean,stderr,trials\n", 0) == 0);
    std::size_t lines = 0;
    for (const auto& entry : fs::directory_iterator(dir.path() / "o1")) {
      ++lines;
      CHECK(slurp(entry.path()) == slurp(dir.path() / "o2" / entry.path().filename()));
    }
    CHECK(lines >= 13);
    CHECK(r1.out.find("hardening:") != std::string::npos);
    CHECK(r1.out.find("schedule:") != std::string::npos);
  }

  TEST_CASE("analyze validation fails before any output exists") {
    fixture::TempDir dir("cli-validate-first");
    const auto out = dir.path() / "out";
    CHECK(run({"analyze", "--experiments", "hardening,nope", "--out", out.string()}).code == 2);
    CHECK(run({"analyze", "--experiments", "eigen", "--p", "99", "--antennas", "8", "--out", out.string()}).code ==
          2);
    CHECK(run({"analyze", "--experiments", "schedule", "--group-size", "1", "--out", out.string()}).code == 2);
    CHECK(run({"analyze", "--experiments", "hardening", "--antenna-counts", "0", "--out", out.string()}).code == 2);
    CHECK(run({"analyze", "--experiments", "hardening", "--dataset", (dir.path() / "missing").string(), "--out",
               out.string()})
              .code == 1);
    CHECK_FALSE(fs::exists(out));
  }

  TEST_CASE("config file with flag overrides") {
    fixture::TempDir dir("cli-config");
    const auto cfg = dir.path() / "run.json";
    std::ofstream(cfg) << R"({"seed": 3, "out": ")" << (dir.path() / "from-config").string() << R"(",
      "source": {"model": {"kind": "kronecker", "rho": 0.3, "antennas": 6, "snapshots": 120, "freqs": 1, "positions": 3}},
      "experiments": {"hardening": {"window_length": 60, "trials": 2}, "correlation": {"trials": 200}}})";
    const auto r = run({"analyze", "--config", cfg.string()});
    INFO(r.err);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir.path() / "from-config" / "hardening_db.csv"));
    CHECK(fs::exists(dir.path() / "from-config" / "correlation_delta_sq.csv"));
    CHECK_FALSE(fs::exists(dir.path() / "from-config" / "eigen_values.csv"));

    const auto over = dir.path() / "override";
    CHECK(run({"analyze", "--config", cfg.string(), "--out", over.string(), "--experiments", "gain"}).code == 0);
    CHECK(fs::exists(over / "gain_per_antenna.csv"));
    CHECK_FALSE(fs::exists(over / "hardening_db.csv"));

    std::ofstream(dir.path() / "broken.json") << "{";
    CHECK(run({"analyze", "--config", (dir.path() / "broken.json").string()}).code == 2);
    CHECK(run({"analyze", "--config", (dir.path() / "absent.json").string()}).code == 2);
  }

  TEST_CASE("schedule subcommand") {
    fixture::TempDir dir("cli-schedule");
    const auto out = dir.path() / "s";
    const auto r = run({"schedule", "--model", "sparse", "--angles", "-0.5,0.3,1.0", "--powers", "1,0.5,0.25",
                        "--antennas", "16", "--snapshots", "600", "--freqs", "1", "--positions", "5",
                        "--group-size", "2", "--out", out.string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const auto text = slurp(out / "schedule_groups.json");
    CHECK(text.find("\"groups\"") != std::string::npos);
    CHECK(text.find("null") != std::string::npos);
  }

  TEST_CASE("validate reports per position") {
    fixture::TempDir dir("cli-check");
    const auto ds = dir.path() / "ds";
    REQUIRE(run(synth_args(ds)).code == 0);
    auto r = run({"validate", ds.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS pos1") != std::string::npos);

    fs::resize_file(ds / "pos2.cf64", 100);
    r = run({"validate", ds.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL pos2") != std::string::npos);
    CHECK(r.out.find("PASS pos1") != std::string::npos);

    auto manifest = nlohmann::json::parse(slurp(ds / "manifest.json"));
    manifest["array"] = {{"kind", "ura"}, {"rows", 2}, {"cols", 8}};
    std::ofstream(ds / "manifest.json", std::ios::trunc) << manifest.dump();
    r = run({"validate", ds.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL manifest") != std::string::npos);
  }

  TEST_CASE("unwritable output is an I/O error") {
    fixture::TempDir dir("cli-io");
    std::ofstream(dir.path() / "file") << "x";
    const auto r = run({"analyze", "--experiments", "gain", "--antennas", "4", "--snapshots", "10", "--positions",
                        "2", "--out", (dir.path() / "file" / "sub").string()});
    CHECK(r.code == mimoscope::cli::kIoError);
  }

  TEST_CASE("help exits cleanly") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("synth") != std::string::npos);
  }
}
