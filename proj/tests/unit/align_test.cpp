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

#include "align.hpp"
#include "error.hpp"
#include "test_support.hpp"
#include "visual.hpp"

namespace elvc {
namespace {

CostMatrix random_cost(std::size_t n, std::size_t m, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  CostMatrix c{Matrix(n, m)};
  for (double& v : c.values.data()) v = u(gen);
  return c;
}

std::vector<std::vector<double>> nested(const CostMatrix& c) {
  std::vector<std::vector<double>> out(c.source_len(), std::vector<double>(c.target_len()));
  for (std::size_t i = 0; i < c.source_len(); ++i)
    for (std::size_t j = 0; j < c.target_len(); ++j) out[i][j] = c.values(i, j);
  return out;
}

TEST(Dtw, SingleCell) {
  const auto p = dtw(CostMatrix{Matrix(1, 1, 2.5)});
  ASSERT_EQ(p.pairs.size(), 1u);
  EXPECT_EQ(p.pairs[0], (std::pair<std::size_t, std::size_t>{0, 0}));
  EXPECT_EQ(p.total_cost, 2.5);
}

TEST(Dtw, ZeroDiagonal) {
  CostMatrix c{Matrix(4, 4, 1.0)};
  for (std::size_t i = 0; i < 4; ++i) c.values(i, i) = 0.0;
  const auto p = dtw(c);
  ASSERT_EQ(p.pairs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(p.pairs[i], (std::pair<std::size_t, std::size_t>{i, i}));
  EXPECT_EQ(p.total_cost, 0.0);
}

TEST(Dtw, MatchesBruteForceEnumeration) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 150; ++trial) {
    const auto c = random_cost(1 + gen() % 6, 1 + gen() % 6, gen);
    const auto p = dtw(c);
    EXPECT_NEAR(p.total_cost, testing::brute_force_dtw(nested(c)), 1e-9);
    EXPECT_EQ(check_path(p, c.source_len(), c.target_len()), "");
    EXPECT_NEAR(path_cost(p, c), p.total_cost, 1e-9);
  }
}

TEST(Dtw, TransposeInvariance) {
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_cost(1 + gen() % 7, 1 + gen() % 7, gen);
    CostMatrix t{Matrix(c.target_len(), c.source_len())};
    for (std::size_t i = 0; i < c.source_len(); ++i)
      for (std::size_t j = 0; j < c.target_len(); ++j) t.values(j, i) = c.values(i, j);
    EXPECT_NEAR(dtw(c).total_cost, dtw(t).total_cost, 1e-9);
  }
}

TEST(Dtw, TieBreakPrefersDiagonal) {
  // all-zero matrix: every path costs 0, diagonal-first backtracking gives the shortest path
  const auto p = dtw(CostMatrix{Matrix(3, 5, 0.0)});
  const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 0}, {0, 1}, {0, 2}, {1, 3}, {2, 4}};
  EXPECT_EQ(p.pairs, want);
}

TEST(Dtw, TieBreakUpBeforeLeft) {
  // from (1,1): (0,1) and (1,0) tie; (0,0) blocked
  CostMatrix c{Matrix(2, 2, 0.0)};
  c.values(0, 0) = 0.0;
  const auto p = dtw(c);
  EXPECT_EQ(p.pairs.size(), 2u);
  CostMatrix d{Matrix(3, 3, 5.0)};
  d.values(0, 0) = d.values(2, 2) = 0.0;
  d.values(1, 0) = d.values(0, 1) = 0.0;
  d.values(2, 1) = d.values(1, 2) = 0.0;
  const auto q = dtw(d);
  const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 0}, {0, 1}, {1, 2}, {2, 2}};
  EXPECT_EQ(q.pairs, want);
}

TEST(Dtw, Errors) {
  EXPECT_THROW(dtw(CostMatrix{}), Error);
  CostMatrix neg{Matrix(2, 2, 1.0)};
  neg.values(1, 0) = -1.0;
  EXPECT_THROW(dtw(neg), Error);
  neg.values(1, 0) = NAN;
  EXPECT_THROW(dtw(neg), Error);
}

TEST(Dtw, BandConstrainsPath) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 4 + gen() % 8, m = 4 + gen() % 8;
    const auto c = random_cost(n, m, gen);
    const auto free_path = dtw(c);
    const auto banded = dtw(c, DtwOptions{2});
    EXPECT_EQ(check_path(banded, n, m), "");
    EXPECT_GE(banded.total_cost, free_path.total_cost - 1e-9);
    const auto wide = dtw(c, DtwOptions{100});
    EXPECT_NEAR(wide.total_cost, free_path.total_cost, 1e-9);
  }
}

TEST(CheckPath, RejectsBadPaths) {
  AlignmentPath p;
  EXPECT_NE(check_path(p, 2, 2), "");
  p.pairs = {{0, 0}, {1, 1}};
  EXPECT_EQ(check_path(p, 2, 2), "");
  EXPECT_NE(check_path(p, 3, 2), "");
  p.pairs = {{0, 0}, {2, 2}};
  EXPECT_NE(check_path(p, 3, 3), "");
  p.pairs = {{0, 0}, {1, 1}, {1, 0}, {1, 1}};
  EXPECT_NE(check_path(p, 2, 2), "");
  p.pairs = {{1, 1}};
  EXPECT_NE(check_path(p, 2, 2), "");
}

FeatureMatrix mcc_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return FeatureMatrix{m, 0.01, FeatureKind::kMcc};
}

TEST(CostMatrixMcc, ShapeDiagonalAndUnitEntry) {
  std::mt19937_64 gen(24);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<std::vector<double>> a(4, std::vector<double>(6)), b(3, std::vector<double>(6));
  for (auto& r : a)
    for (double& v : r) v = n(gen);
  for (auto& r : b)
    for (double& v : r) v = n(gen);
  const auto c = cost_matrix_mcc(mcc_rows(a), mcc_rows(b));
  EXPECT_EQ(c.source_len(), 4u);
  EXPECT_EQ(c.target_len(), 3u);

  const auto self = cost_matrix_mcc(mcc_rows(a), mcc_rows(a));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(self.values(i, i), 0.0);

  auto b2 = a;
  b2[2][3] += 1.0;
  const auto one = cost_matrix_mcc(mcc_rows(a), mcc_rows(b2));
  EXPECT_NEAR(one.values(2, 2), 6.1419, 1e-3);

  EXPECT_THROW(cost_matrix_mcc(mcc_rows(a), mcc_rows({{1.0, 2.0}})), Error);
}

LandmarkSequence random_landmarks(std::size_t frames, std::mt19937_64& gen) {
  std::normal_distribution<double> n(200.0, 40.0);
  LandmarkSequence s(frames);
  for (auto& f : s)
    for (auto& p : f) p = {n(gen), n(gen)};
  return s;
}

TEST(CostMatrixLandmarks, TranslationAndIdentity) {
  std::mt19937_64 gen(25);
  auto src = random_landmarks(5, gen);
  auto tgt = src;
  for (auto& p : tgt[3]) p = {p.x + 37.0, p.y - 12.0};
  const auto c = cost_matrix_landmarks(src, tgt);
  EXPECT_NEAR(c.values(3, 3), 0.0, 1e-9);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(c.values(i, i), 0.0, 1e-9);
}

TEST(CostMatrixLandmarks, MatchesDirectRecomputation) {
  std::mt19937_64 gen(26);
  const auto src = random_landmarks(3, gen);
  auto tgt = src;
  tgt[1][4].x += 3.0;
  tgt[1][4].y += 4.0;
  tgt = [&] {
    auto t = tgt;
    t.push_back(random_landmarks(1, gen)[0]);
    return t;
  }();
  const auto c = cost_matrix_landmarks(src, tgt);
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      double sx = 0, sy = 0, tx = 0, ty = 0;
      for (int p = 0; p < 20; ++p) {
        sx += src[i][p].x / 20;
        sy += src[i][p].y / 20;
        tx += tgt[j][p].x / 20;
        ty += tgt[j][p].y / 20;
      }
      double acc = 0;
      for (int p = 0; p < 20; ++p) {
        const double dx = (src[i][p].x - sx) - (tgt[j][p].x - tx);
        const double dy = (src[i][p].y - sy) - (tgt[j][p].y - ty);
        acc += dx * dx + dy * dy;
      }
      EXPECT_NEAR(c.values(i, j), std::sqrt(acc), 1e-9);
    }
  }
  // one point moved by (3,4): centered displacement has norm sqrt(25 - 25/20)
  EXPECT_NEAR(c.values(1, 1), std::sqrt(25.0 * 19.0 / 20.0), 1e-9);
}

TEST(AlignLip, RepeatedFramesMapToTheirRepeats) {
  std::mt19937_64 gen(27);
  const auto src = random_landmarks(6, gen);
  LandmarkSequence tgt;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t r = 0; r < 1 + i % 3; ++r) {
      tgt.push_back(src[i]);
      owner.push_back(i);
    }
  }
  const auto video = dtw(cost_matrix_landmarks(src, tgt));
  EXPECT_EQ(video.total_cost, 0.0);
  for (const auto& [i, j] : video.pairs) EXPECT_EQ(owner[j], i);

  const auto acoustic = align_dtw_lip(src, tgt);
  EXPECT_EQ(check_path(acoustic, 4 * src.size(), 4 * tgt.size()), "");
  for (const auto& [i, j] : acoustic.pairs) EXPECT_EQ(owner[j / 4], i / 4);
}

TEST(ExpandVideoPath, Basics) {
  AlignmentPath p{{{0, 0}}, 0.0};
  const auto e = expand_video_path(p);
  const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  EXPECT_EQ(e.pairs, want);
}

TEST(ExpandVideoPath, MonotoneAndBounded) {
  std::mt19937_64 gen(28);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 8, m = 1 + gen() % 8;
    const auto p = dtw(random_cost(n, m, gen));
    const auto e = expand_video_path(p);
    EXPECT_LE(e.pairs.size(), 4 * p.pairs.size());
    EXPECT_EQ(check_path(e, 4 * n, 4 * m), "") << n << "x" << m;
  }
}

TEST(ClipPath, TruncatesToShorterSides) {
  AlignmentPath p = expand_video_path(dtw(CostMatrix{Matrix(3, 3, 0.0)}));
  const auto c = clip_path(p, 10, 7);
  EXPECT_EQ(check_path(c, 10, 7), "");
}

TEST(ApplyWarp, IdentityAveragingAndCount) {
  Matrix tgt(4, 2, {0, 1, 2, 3, 4, 5, 6, 7});
  AlignmentPath diag{{{0, 0}, {1, 1}, {2, 2}, {3, 3}}, 0.0};
  EXPECT_EQ(apply_warp(diag, tgt), tgt);

  AlignmentPath p{{{0, 0}, {0, 1}, {1, 2}, {1, 3}}, 0.0};
  const auto w = apply_warp(p, tgt);
  ASSERT_EQ(w.rows(), 2u);
  EXPECT_DOUBLE_EQ(w(1, 0), (4.0 + 6.0) / 2.0);
  EXPECT_DOUBLE_EQ(w(1, 1), (5.0 + 7.0) / 2.0);
  EXPECT_DOUBLE_EQ(w(0, 0), 1.0);

  std::mt19937_64 gen(29);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 9, m = 1 + gen() % 9;
    const auto path = dtw(random_cost(n, m, gen));
    EXPECT_EQ(apply_warp(path, Matrix(m, 3, 1.0)).rows(), n);
  }

  AlignmentPath oob{{{0, 0}, {1, 4}}, 0.0};
  try {
    apply_warp(oob, tgt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kIndexOutOfBounds);
  }
}

Waveform tone_mix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> f(150.0, 2500.0);
  Waveform w{std::vector<double>(n, 0.0), 16000};
  for (int k = 0; k < 4; ++k) {
    const auto s = testing::sine(f(gen), n, 0.1);
    for (std::size_t i = 0; i < n; ++i) w.samples[i] += s[i] * (0.6 + 0.4 * std::sin(static_cast<double>(i) * 0.0007 * (k + 1)));
  }
  return w;
}

TEST(Pipelines, SelfAlignmentIsFree) {
  const auto w = tone_mix(12000, 30);
  const auto p = align_dtw_mcc(w, w);
  EXPECT_EQ(p.total_cost, 0.0);
  for (std::size_t i = 0; i < p.pairs.size(); ++i) EXPECT_EQ(p.pairs[i], (std::pair<std::size_t, std::size_t>{i, i}));

  const auto r = align_dtw_wsola(w, w);
  EXPECT_EQ(r.stretched_nl.size(), w.size());
  EXPECT_LT(r.path.total_cost, 0.1 * static_cast<double>(r.path.pairs.size()));
}

TEST(Pipelines, WsolaPathCoversBothSides) {
  const auto nl = tone_mix(10000, 31);
  const auto el = stretch(nl, 1.3);
  const auto r = align_dtw_wsola(el, nl);
  EXPECT_EQ(r.stretched_nl.size(), el.size());
  const auto frames = frame_count(el.size(), StftConfig{});
  EXPECT_EQ(check_path(r.path, frames, frames), "");
}

}  // namespace
}  // namespace elvc
