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

#include "error.hpp"
#include "eval.hpp"
#include "test_support.hpp"

namespace elvc {
namespace {

FeatureMatrix random_lms(std::size_t t, std::mt19937_64& gen, double sd = 3.0) {
  std::normal_distribution<double> n(-5.0, sd);
  FeatureMatrix f{Matrix(t, 80), 0.01, FeatureKind::kLms};
  for (double& v : f.data.data()) v = n(gen);
  return f;
}

TEST(UtteranceMcd, IdentityIsZero) {
  std::mt19937_64 gen(60);
  const auto a = random_lms(12, gen);
  EXPECT_EQ(utterance_mcd(a, a), 0.0);
  FeatureMatrix mcc{Matrix(5, 25, 1.5), 0.01, FeatureKind::kMcc};
  EXPECT_EQ(utterance_mcd(mcc, mcc), 0.0);
}

TEST(UtteranceMcd, ConstantCoefficientOffset) {
  std::mt19937_64 gen(61);
  std::normal_distribution<double> n(0.0, 1.0);
  FeatureMatrix a{Matrix(9, 25), 0.01, FeatureKind::kMcc};
  for (double& v : a.data.data()) v = n(gen);
  // make every cross-frame distance large so the path cannot shortcut
  for (std::size_t t = 0; t < 9; ++t) a.data(t, 1) += 50.0 * static_cast<double>(t);
  auto b = a;
  for (std::size_t t = 0; t < 9; ++t) b.data(t, 3) += 1.0;
  EXPECT_NEAR(utterance_mcd(a, b), 6.1419, 1e-3);

  // LMS offset that maps to a unit change in c2 only
  const auto d = dct2_orthonormal(80);
  auto lms = random_lms(6, gen, 0.0);
  for (std::size_t t = 0; t < 6; ++t) lms.data(t, 0) += 40.0 * static_cast<double>(t);
  auto shifted = lms;
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t i = 0; i < 80; ++i) shifted.data(t, i) += d(2, i);
  EXPECT_NEAR(utterance_mcd(lms, shifted), 6.1419, 1e-3);
}

TEST(UtteranceMcd, Symmetric) {
  std::mt19937_64 gen(62);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_lms(5 + gen() % 8, gen);
    const auto b = random_lms(5 + gen() % 8, gen);
    EXPECT_NEAR(utterance_mcd(a, b), utterance_mcd(b, a), 1e-9);
  }
}

TEST(UtteranceMcd, GrowsWithNoise) {
  std::mt19937_64 gen(63);
  const auto clean = random_lms(20, gen);
  std::vector<double> means;
  for (double sd : {0.1, 0.5, 1.0, 2.0}) {
    double total = 0;
    for (int s = 0; s < 5; ++s) {
      std::normal_distribution<double> n(0.0, sd);
      auto noisy = clean;
      for (double& v : noisy.data.data()) v += n(gen);
      total += utterance_mcd(noisy, clean);
    }
    means.push_back(total / 5);
  }
  for (std::size_t i = 1; i < means.size(); ++i) EXPECT_GT(means[i], means[i - 1]);
}

TEST(UtteranceMcd, KindMismatch) {
  std::mt19937_64 gen(64);
  FeatureMatrix mcc{Matrix(5, 25, 0.0), 0.01, FeatureKind::kMcc};
  try {
    utterance_mcd(random_lms(5, gen), mcc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeError);
  }
  FeatureMatrix narrow{Matrix(5, 10, 0.0), 0.01, FeatureKind::kMcc};
  EXPECT_THROW(utterance_mcd(mcc, narrow), Error);
}

TEST(EvaluateCorpus, Aggregates) {
  std::mt19937_64 gen(65);
  std::vector<EvalPair> same;
  for (int i = 0; i < 3; ++i) {
    const auto f = random_lms(6, gen);
    same.push_back({"u" + std::to_string(i), f, f});
  }
  const auto zero = evaluate_corpus(same, "id");
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_EQ(zero.stdev, 0.0);

  const std::vector<EvalPair> one{{"x", random_lms(6, gen), random_lms(7, gen)}};
  const auto single = evaluate_corpus(one, "one");
  EXPECT_EQ(single.mean, single.mcd_db[0]);
  EXPECT_EQ(single.stdev, 0.0);

  std::vector<EvalPair> mixed;
  for (int i = 0; i < 6; ++i) mixed.push_back({"m" + std::to_string(i), random_lms(6, gen), random_lms(8, gen)});
  const auto r = evaluate_corpus(mixed, "mix");
  double sum = 0, sq = 0;
  for (double v : r.mcd_db) sum += v;
  const double mean = sum / 6;
  for (double v : r.mcd_db) sq += (v - mean) * (v - mean);
  EXPECT_NEAR(r.mean, mean, 1e-12);
  EXPECT_NEAR(r.stdev, std::sqrt(sq / 6), 1e-12);
  EXPECT_EQ(r.utt_ids[5], "m5");
  EXPECT_THROW(evaluate_corpus({}, "none"), Error);
}

TEST(Report, CsvSummaryAndMerge) {
  EvalReport r;
  r.label = "dtw-wsola";
  r.utt_ids = {"a", "b"};
  r.mcd_db = {1.0, 3.0};
  r.mean = 2.0;
  r.stdev = 1.0;
  EXPECT_EQ(report_csv(r), "utt_id,mcd_db\na,1.000000\nb,3.000000\n");
  EXPECT_EQ(report_summary(r), "method: dtw-wsola\nutterances: 2\nMCD (dB): 2.000000 +/- 1.000000\n");

  testing::TempDir dir("eval");
  std::ofstream(dir / "ext.csv") << "utt_id,ser,mos\nb,0.12,3.9\n";
  merge_external(r, dir / "ext.csv");
  EXPECT_EQ(report_csv(r), "utt_id,mcd_db,ser,mos\na,1.000000,,\nb,3.000000,0.12,3.9\n");

  std::ofstream(dir / "bad.csv") << "id,ser\nb,1\n";
  EXPECT_THROW(merge_external(r, dir / "bad.csv"), Error);
  std::ofstream(dir / "ragged.csv") << "utt_id,ser\nb,1,2\n";
  EXPECT_THROW(merge_external(r, dir / "ragged.csv"), Error);
  EXPECT_THROW(merge_external(r, dir / "missing.csv"), Error);
}

}  // namespace
}  // namespace elvc
