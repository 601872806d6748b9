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

#include <fstream>

#include "config.hpp"
#include "corpus_support.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "test_support.hpp"

namespace elvc {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

PipelineConfig small_config() {
  auto c = parse_config("model.conv_channels=8\nmodel.gru_hidden=8\ntrain.epochs=2\nseed=3\n");
  return c;
}

TEST(Manifest, ParsesAndResolvesRelativePaths) {
  testing::TempDir dir("man");
  const auto manifest = testing::write_corpus(dir.path(), 2, 1);
  const auto corpus = read_corpus_manifest(manifest);
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[1].utt_id, "utt1");
  EXPECT_EQ(corpus[0].el_wav, dir.path() / "utt0_el.wav");
  EXPECT_EQ(corpus[0].nl_landmarks, dir.path() / "utt0_nl.csv");
}

TEST(Manifest, RejectsBadInput) {
  testing::TempDir dir("man");
  testing::write_corpus(dir.path(), 1, 2);
  auto expect = [&](const std::string& text, Errc code) {
    std::ofstream(dir / "m.csv") << text;
    try {
      read_corpus_manifest(dir / "m.csv");
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << text;
    }
  };
  expect("id,el,nl\n", Errc::kParseError);
  expect("utt_id,el_wav,nl_wav\n", Errc::kEmptyDataset);
  expect("utt_id,el_wav,nl_wav\nu0,utt0_el.wav\n", Errc::kParseError);
  expect("utt_id,el_wav,nl_wav\n../x,utt0_el.wav,utt0_nl.wav\n", Errc::kParseError);
  expect("utt_id,el_wav,nl_wav\nu0,utt0_el.wav,missing.wav\n", Errc::kNotFound);
  expect("utt_id,el_wav,nl_wav,extra\nu0,utt0_el.wav,utt0_nl.wav,1\n", Errc::kParseError);
  EXPECT_THROW(read_corpus_manifest(dir / "absent.csv"), Error);
}

TEST(Prepare, WritesPairedSetForEveryMethod) {
  testing::TempDir dir("prep");
  const auto corpus = read_corpus_manifest(testing::write_corpus(dir / "corpus", 2, 3));
  const auto cfg = small_config();
  for (auto method : {AlignMethod::kDtwMcc, AlignMethod::kDtwLip, AlignMethod::kDtwWsola}) {
    const auto out = dir / align_method_name(method);
    std::vector<std::string> logs;
    prepare_corpus(corpus, method, cfg, out, [&](const std::string& s) { logs.push_back(s); });
    EXPECT_EQ(read_utterance_list(out), (std::vector<std::string>{"utt0", "utt1"}));
    for (const auto& id : {"utt0", "utt1"}) {
      const auto src = read_matrix_file(out / (std::string(id) + ".src.elf1"));
      const auto tgt = read_matrix_file(out / (std::string(id) + ".tgt.elf1"));
      const auto vis = read_feature_file(out / (std::string(id) + ".vis.elf1"));
      EXPECT_EQ(src.cols(), 80u);
      EXPECT_EQ(tgt.rows(), src.rows());
      EXPECT_EQ(vis.frames(), src.rows());
      EXPECT_EQ(vis.dim(), 40u);
      const auto path = read_path_csv(out / (std::string(id) + ".path.csv"));
      EXPECT_EQ(path.pairs.front(), (std::pair<std::size_t, std::size_t>{0, 0}));
      EXPECT_EQ(path.pairs.back().first + 1, src.rows());
    }
    EXPECT_EQ(slurp(out / "prepare_summary.csv").rfind("utt_id,method,src_frames,path_len,total_cost,mean_cost\n", 0), 0u);
  }
}

TEST(Prepare, LipMethodNeedsLandmarks) {
  testing::TempDir dir("prep");
  testing::write_corpus(dir.path(), 1, 4);
  std::ofstream(dir / "audio_only.csv") << "utt_id,el_wav,nl_wav\nutt0,utt0_el.wav,utt0_nl.wav\n";
  const auto corpus = read_corpus_manifest(dir / "audio_only.csv");
  EXPECT_THROW(prepare_corpus(corpus, AlignMethod::kDtwLip, small_config(), dir / "out"), Error);
  prepare_corpus(corpus, AlignMethod::kDtwMcc, small_config(), dir / "out");
  EXPECT_FALSE(fs::exists(dir / "out" / "utt0.vis.elf1"));
  EXPECT_THROW(train_from_dir(dir / "out", ModelMode::kMultimodal, small_config(), dir / "ckpt"), Error);
}

TEST(Prepare, JobsDoNotChangeOutputs) {
  testing::TempDir dir("prep");
  const auto corpus = read_corpus_manifest(testing::write_corpus(dir / "corpus", 4, 5));
  auto cfg = small_config();
  prepare_corpus(corpus, AlignMethod::kDtwWsola, cfg, dir / "one");
  cfg.jobs = 3;
  prepare_corpus(corpus, AlignMethod::kDtwWsola, cfg, dir / "three");
  for (const auto& entry : fs::directory_iterator(dir / "one")) {
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "three" / entry.path().filename())) << entry.path();
  }
}

TEST(EndToEnd, TrainConvertEval) {
  testing::TempDir dir("e2e");
  const auto corpus = read_corpus_manifest(testing::write_corpus(dir / "corpus", 3, 6));
  const auto cfg = small_config();
  prepare_corpus(corpus, AlignMethod::kDtwWsola, cfg, dir / "prep");
  for (auto mode : {ModelMode::kAudioOnly, ModelMode::kMultimodal, ModelMode::kMultimodalFt}) {
    const auto ckpt = dir / (std::string("ckpt_") + model_mode_name(mode));
    const auto r = train_from_dir(dir / "prep", mode, cfg, ckpt);
    EXPECT_EQ(r.loss_history.size(), 2u);
    EXPECT_TRUE(fs::exists(ckpt / "manifest.txt"));
    EXPECT_EQ(slurp(ckpt / "loss_history.csv").rfind("epoch,loss\n1,", 0), 0u);
    const auto conv = dir / (std::string("conv_") + model_mode_name(mode));
    convert_dir(ckpt, dir / "prep", conv, 2);
    const auto report = eval_dirs(conv, dir / "prep", model_mode_name(mode), cfg);
    EXPECT_EQ(report.count(), 3u);
    EXPECT_GT(report.mean, 0.0);
  }
  const auto self = eval_dirs(dir / "conv_audio_only", dir / "conv_audio_only", "self", cfg);
  EXPECT_EQ(self.mean, 0.0);
}

TEST(PathCsv, RoundTripAndErrors) {
  testing::TempDir dir("path");
  AlignmentPath p{{{0, 0}, {1, 0}, {2, 1}}, 0.0};
  write_path_csv(p, dir / "p.csv");
  EXPECT_EQ(slurp(dir / "p.csv"), "0,0\n1,0\n2,1\n");
  EXPECT_EQ(read_path_csv(dir / "p.csv").pairs, p.pairs);
  std::ofstream(dir / "bad.csv") << "0,x\n";
  EXPECT_THROW(read_path_csv(dir / "bad.csv"), Error);
}

TEST(ParallelFor, CoversAllAndPropagates) {
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw Error(Errc::kIoError, "boom");
               }),
               Error);
}

}  // namespace
}  // namespace elvc
