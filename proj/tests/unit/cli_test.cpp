// Copyright 2026 The elvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "audio_io.hpp"
#include "corpus_support.hpp"
#include "test_support.hpp"

namespace elvc {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string err;
};

// Runs the CLI with stderr redirected to a file in `dir`.
Run run(const testing::TempDir& dir, const std::string& args) {
  const auto err_file = dir / "stderr.txt";
  const std::string cmd = std::string(ELVC_CLI_PATH) + " " + args + " 2> '" + err_file.string() + "' > /dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  r.err.assign(std::istreambuf_iterator<char>(in), {});
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, SelfAlignmentIsDiagonal) {
  testing::TempDir dir("cli");
  write_wav(testing::multitone_utterance(1).wave, dir / "a.wav");
  const auto r = run(dir, "align --method dtw-mcc " + q(dir / "a.wav") + " " + q(dir / "a.wav") + " --output " + q(dir / "path.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "path.csv");
  std::string line;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line, std::to_string(k) + "," + std::to_string(k));
    ++k;
  }
  EXPECT_GT(k, 10u);
  const auto summary = slurp(dir / "path.csv.summary.txt");
  EXPECT_NE(summary.find("total_cost=0.000000000"), std::string::npos) << summary;
}

TEST(Cli, FeaturesStretchAndWsolaAlign) {
  testing::TempDir dir("cli");
  const auto utt = testing::multitone_utterance(2);
  write_wav(utt.wave, dir / "nl.wav");
  write_wav(testing::pseudo_el(utt.wave, 3), dir / "el.wav");
  ASSERT_EQ(run(dir, "features " + q(dir / "nl.wav") + " --lms " + q(dir / "l.elf1") + " --mcc " + q(dir / "m.elf1")).code, 0);
  EXPECT_EQ(read_matrix_file(dir / "l.elf1").cols(), 80u);
  EXPECT_EQ(read_matrix_file(dir / "m.elf1").cols(), 25u);

  ASSERT_EQ(run(dir, "stretch --input " + q(dir / "nl.wav") + " --target-wav " + q(dir / "el.wav") + " --output " + q(dir / "s.wav")).code, 0);
  EXPECT_EQ(read_wav(dir / "s.wav").size(), read_wav(dir / "el.wav").size());
  ASSERT_EQ(run(dir, "stretch --input " + q(dir / "nl.wav") + " --alpha 2 --output " + q(dir / "s2.wav")).code, 0);
  EXPECT_LE(std::abs(static_cast<double>(read_wav(dir / "s2.wav").size()) - 2.0 * static_cast<double>(utt.wave.size())), 256.0);

  const auto r = run(dir, "align --method dtw-wsola " + q(dir / "el.wav") + " " + q(dir / "nl.wav") + " --output " +
                              q(dir / "p.csv") + " --stretched " + q(dir / "st.wav"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_wav(dir / "st.wav").size(), read_wav(dir / "el.wav").size());
}

TEST(Cli, EvalOfIdenticalDirsIsZero) {
  testing::TempDir dir("cli");
  fs::create_directories(dir / "conv");
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(-4.0, 2.0);
  for (const char* id : {"a", "b"}) {
    Matrix m(9, 80);
    for (double& v : m.data()) v = n(gen);
    write_matrix_file(m, dir / "conv" / (std::string(id) + ".lms.elf1"));
  }
  const auto r = run(dir, "eval --converted " + q(dir / "conv") + " --target " + q(dir / "conv") + " --output " + q(dir / "r.csv") + " --label self");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "r.csv"), "utt_id,mcd_db\na,0.000000\nb,0.000000\n");
  EXPECT_NE(slurp(dir / "r.csv.summary.txt").find("MCD (dB): 0.000000 +/- 0.000000"), std::string::npos);
}

TEST(Cli, Gradcheck) {
  testing::TempDir dir("cli");
  const auto r = run(dir, "gradcheck --configs 2");
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, ErrorsAreTypedAndNonZero) {
  testing::TempDir dir("cli");
  write_wav(Waveform{std::vector<double>(2000, 0.1), 16000}, dir / "a.wav");

  auto r = run(dir, "--set stft.hopp=3 features " + q(dir / "a.wav") + " --lms " + q(dir / "x.elf1"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("ConfigError"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("stft.hopp"), std::string::npos) << r.err;

  std::ofstream(dir / "bad.cfg") << "wsola.tolerance=abc\n";
  r = run(dir, "--config " + q(dir / "bad.cfg") + " features " + q(dir / "a.wav") + " --lms " + q(dir / "x.elf1"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("bad.cfg:1: wsola.tolerance"), std::string::npos) << r.err;

  std::ofstream(dir / "junk.wav") << "not a wav file at all";
  r = run(dir, "features " + q(dir / "junk.wav") + " --lms " + q(dir / "x.elf1"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("UnsupportedFormat"), std::string::npos) << r.err;

  r = run(dir, "stretch --input " + q(dir / "a.wav") + " --alpha 0 --output " + q(dir / "o.wav"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("InvalidArgument"), std::string::npos) << r.err;

  r = run(dir, "train --data " + q(dir.path()) + " --output " + q(dir / "ck"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("NotFound"), std::string::npos) << r.err;

  EXPECT_NE(run(dir, "").code, 0);
  EXPECT_NE(run(dir, "align --method dtw-fast " + q(dir / "a.wav") + " " + q(dir / "a.wav")).code, 0);
}

TEST(Cli, FullPipeline) {
  testing::TempDir dir("cli");
  const auto manifest = testing::write_corpus(dir / "corpus", 2, 7);
  const std::string common = "--seed 5 --set model.conv_channels=6 --set model.gru_hidden=6 ";
  auto r = run(dir, common + "prepare --manifest " + q(manifest) + " --align-method dtw-lip --output " + q(dir / "prep"));
  ASSERT_EQ(r.code, 0) << r.err;
  r = run(dir, common + "train --data " + q(dir / "prep") + " --mode multimodal_ft --epochs 2 --output " + q(dir / "ck"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("epoch 2 loss"), std::string::npos) << r.err;
  r = run(dir, "--jobs 2 convert --checkpoint " + q(dir / "ck") + " --input " + q(dir / "prep") + " --output " + q(dir / "conv"));
  ASSERT_EQ(r.code, 0) << r.err;
  r = run(dir, "convert --checkpoint " + q(dir / "ck") + " --acoustic " + q(dir / "prep" / "utt0.src.elf1") + " --visual " +
                   q(dir / "prep" / "utt0.vis.elf1") + " --output " + q(dir / "one.elf1"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "one.elf1"), slurp(dir / "conv" / "utt0.lms.elf1"));
  r = run(dir, "convert --checkpoint " + q(dir / "ck") + " --acoustic " + q(dir / "prep" / "utt0.src.elf1") + " --output " + q(dir / "x.elf1"));
  EXPECT_NE(r.err.find("ModeMismatch"), std::string::npos) << r.err;

  std::ofstream(dir / "ext.csv") << "utt_id,ser\nutt1,0.25\n";
  r = run(dir, "eval --converted " + q(dir / "conv") + " --target " + q(dir / "prep") + " --output " + q(dir / "r.csv") +
                   " --merge-external " + q(dir / "ext.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir / "r.csv");
  EXPECT_EQ(csv.rfind("utt_id,mcd_db,ser\nutt0,", 0), 0u) << csv;
  EXPECT_NE(csv.find(",0.25\n"), std::string::npos);
}

}  // namespace
}  // namespace elvc
