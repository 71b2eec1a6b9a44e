// tests/test_cli.cpp

// Copyright 2026 The SpatialEmb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "spatialemb/sef_io.hpp"
#include "testutil.hpp"

using namespace spatialemb;
using testutil::TempDir;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
};

RunResult RunCli(const TempDir& dir, const std::string& args) {
  const std::string out = dir.File("stdout.txt");
  const std::string err = dir.File("stderr.txt");
  const std::string cmd = std::string(CLI_BIN) + " " + args + " >" + out +
                          " 2>" + err;
  int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.stdout_text = testutil::ReadBytes(out);
  r.stderr_text = testutil::ReadBytes(err);
  return r;
}

void WriteSceneConfig(const std::string& path, int seed) {
  std::ofstream os(path);
  os << "[scene]\nchannels = 3\nduration_s = 1.0\nseed = " << seed << "\n\n"
     << "[source]\nrole = target\nsignal = noise\namplitude = 0.2\n"
     << "delays = 0, 3.7, -5.1\n\n"
     << "[source]\nrole = interferer\nsignal = noise\nsnr_db = 0\n"
     << "delays = 0, -2.9, 6.3\n";
}

}  // namespace

TEST_CASE("cli: simulate is deterministic and writes the advertised files") {
  TempDir dir;
  WriteSceneConfig(dir.File("scene.cfg"), 9);
  RunResult r1 = RunCli(dir, "simulate --scene " + dir.File("scene.cfg") +
                                 " --out-dir " + dir.File("a"));
  REQUIRE(r1.exit_code == 0);
  RunResult r2 = RunCli(dir, "simulate --scene " + dir.File("scene.cfg") +
                                 " --out-dir " + dir.File("b"));
  REQUIRE(r2.exit_code == 0);
  CHECK(testutil::ReadBytes(dir.File("a/scene_mixture.wav")) ==
        testutil::ReadBytes(dir.File("b/scene_mixture.wav")));
  CHECK(testutil::ReadBytes(dir.File("a/scene_solo.wav")) ==
        testutil::ReadBytes(dir.File("b/scene_solo.wav")));
  FeatureTensor mask = ReadFeature(dir.File("a/scene_mask.sef"));
  CHECK(mask.Ndim() == 2);
  CHECK(mask.AxisAt(0) == Axis::kTime);
}

TEST_CASE("cli: extract produces the documented layouts") {
  TempDir dir;
  WriteSceneConfig(dir.File("scene.cfg"), 21);
  REQUIRE(RunCli(dir, "simulate --scene " + dir.File("scene.cfg") +
                          " --out-dir " + dir.File("sim"))
              .exit_code == 0);
  const std::string mix = dir.File("sim/scene_mixture.wav");
  const std::string solo = dir.File("sim/scene_solo.wav");

  RunResult fixed = RunCli(dir, "extract --mixture " + mix + " --solo " +
                                    solo + " --out " + dir.File("fixed.sef") +
                                    " --feature lps201 --topology fixed");
  REQUIRE(fixed.exit_code == 0);
  FeatureTensor tf = ReadFeature(dir.File("fixed.sef"));
  REQUIRE(tf.Ndim() == 3);
  CHECK(tf.AxisAt(0) == Axis::kChannel);
  CHECK(tf.Extent(0) == 4);  // M+1 with M=3
  CHECK(tf.AxisAt(2) == Axis::kFreq);
  CHECK(tf.Extent(2) == 201);

  RunResult lfb = RunCli(dir, "extract --mixture " + mix + " --solo " + solo +
                                  " --out " + dir.File("lfb.sef") +
                                  " --feature lfb80 --topology fixed");
  REQUIRE(lfb.exit_code == 0);
  FeatureTensor tl = ReadFeature(dir.File("lfb.sef"));
  CHECK(tl.AxisAt(2) == Axis::kBin);
  CHECK(tl.Extent(2) == 80);

  RunResult exp = RunCli(
      dir, "extract --mixture " + mix + " --solo " + solo + " --out " +
               dir.File("exp.sef") + " --feature lps201 --topology expanded");
  REQUIRE(exp.exit_code == 0);
  FeatureTensor te = ReadFeature(dir.File("exp.sef"));
  REQUIRE(te.Ndim() == 4);
  CHECK(te.Extent(0) == 3);
  CHECK(te.Extent(1) == 2);

  // Determinism across processes.
  RunResult again = RunCli(dir, "extract --mixture " + mix + " --solo " +
                                    solo + " --out " + dir.File("f2.sef") +
                                    " --feature lps201 --topology fixed");
  REQUIRE(again.exit_code == 0);
  CHECK(testutil::ReadBytes(dir.File("fixed.sef")) ==
        testutil::ReadBytes(dir.File("f2.sef")));
}

TEST_CASE("cli: missing solo file fails with class SoloMissing, exit 2") {
  TempDir dir;
  WriteSceneConfig(dir.File("scene.cfg"), 3);
  REQUIRE(RunCli(dir, "simulate --scene " + dir.File("scene.cfg") +
                          " --out-dir " + dir.File("sim"))
              .exit_code == 0);
  RunResult r = RunCli(
      dir, "extract --mixture " + dir.File("sim/scene_mixture.wav") +
               " --solo " + dir.File("nope.wav") + " --out " +
               dir.File("x.sef"));
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_text.find("class=SoloMissing") != std::string::npos);
  CHECK(!std::ifstream(dir.File("x.sef")).good());  // no partial output
}

TEST_CASE("cli: embed shapes, determinism and --compare") {
  TempDir dir;
  WriteSceneConfig(dir.File("scene.cfg"), 5);
  REQUIRE(RunCli(dir, "simulate --scene " + dir.File("scene.cfg") +
                          " --out-dir " + dir.File("sim"))
              .exit_code == 0);
  REQUIRE(RunCli(dir, "extract --mixture " + dir.File("sim/scene_mixture.wav") +
                          " --solo " + dir.File("sim/scene_solo.wav") +
                          " --out " + dir.File("f.sef") +
                          " --feature lps201 --topology fixed")
              .exit_code == 0);

  const std::string embed_args =
      "embed --in " + dir.File("f.sef") +
      " --structure conv2d --version S --feature lps201 --topology fixed "
      "--seed 3";
  REQUIRE(RunCli(dir, embed_args + " --out " + dir.File("e1.sef"))
              .exit_code == 0);
  REQUIRE(RunCli(dir, embed_args + " --out " + dir.File("e2.sef"))
              .exit_code == 0);
  CHECK(testutil::ReadBytes(dir.File("e1.sef")) ==
        testutil::ReadBytes(dir.File("e2.sef")));

  FeatureTensor e = ReadFeature(dir.File("e1.sef"));
  REQUIRE(e.Ndim() == 2);
  CHECK(e.AxisAt(0) == Axis::kTime);
  CHECK(e.AxisAt(1) == Axis::kBin);
  CHECK(e.Extent(1) == 256);

  RunResult cmp = RunCli(dir, embed_args + " --out " + dir.File("e3.sef") +
                                  " --compare " + dir.File("e1.sef"));
  CHECK(cmp.exit_code == 0);
  CHECK(cmp.stdout_text.find("max_abs_diff") != std::string::npos);
}

TEST_CASE("cli: dac embedding is invariant to channel permutation") {
  TempDir dir;
  WriteSceneConfig(dir.File("scene.cfg"), 13);
  REQUIRE(RunCli(dir, "simulate --scene " + dir.File("scene.cfg") +
                          " --out-dir " + dir.File("sim"))
              .exit_code == 0);
  REQUIRE(RunCli(dir, "extract --mixture " + dir.File("sim/scene_mixture.wav") +
                          " --solo " + dir.File("sim/scene_solo.wav") +
                          " --out " + dir.File("exp.sef") +
                          " --feature lps201 --topology expanded")
              .exit_code == 0);

  // Permute the microphone axis of the expanded tensor: 0,1,2 -> 2,0,1.
  FeatureTensor t = ReadFeature(dir.File("exp.sef"));
  REQUIRE(t.Ndim() == 4);
  const size_t block = t.data.size() / size_t(t.Extent(0));
  FeatureTensor p = t;
  const int perm[3] = {2, 0, 1};
  for (int m = 0; m < 3; ++m)
    std::copy(t.data.begin() + size_t(perm[m]) * block,
              t.data.begin() + size_t(perm[m] + 1) * block,
              p.data.begin() + size_t(m) * block);
  WriteFeature(dir.File("perm.sef"), p);

  const std::string embed_args =
      "embed --structure conv2d --version S --feature lps201 "
      "--topology expanded --fusion dac --seed 7";
  REQUIRE(RunCli(dir, embed_args + " --in " + dir.File("exp.sef") +
                          " --out " + dir.File("a.sef"))
              .exit_code == 0);
  RunResult cmp = RunCli(dir, embed_args + " --in " + dir.File("perm.sef") +
                                  " --out " + dir.File("b.sef") +
                                  " --compare " + dir.File("a.sef") +
                                  " --tol 1e-5");
  CHECK(cmp.exit_code == 0);
}

TEST_CASE("cli: bench rejects R=1 and orders dac under tac") {
  TempDir dir;
  RunResult bad = RunCli(dir, "bench --repeats 1 --batch-seconds 0.2");
  CHECK(bad.exit_code == 2);
  CHECK(bad.stderr_text.find("class=BadConfig") != std::string::npos);

  auto flops_of = [&](const std::string& fusion) -> uint64_t {
    RunResult r = RunCli(
        dir, "bench --structure conv2d --version S --feature lps201 "
             "--topology expanded --fusion " + fusion +
             " --repeats 3 --batch-seconds 0.3 --out " + dir.File("b.csv"));
    REQUIRE(r.exit_code == 0);
    std::ifstream is(dir.File("b.csv"));
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    // column 13 (0-based 12) is flops_total
    std::stringstream ss(row);
    std::string tok;
    for (int i = 0; i <= 12; ++i) std::getline(ss, tok, ',');
    return std::stoull(tok);
  };
  uint64_t dac = flops_of("dac");
  uint64_t tac = flops_of("tac");
  CHECK(dac < tac);
}
