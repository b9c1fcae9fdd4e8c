#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "sheeppain/sheeppain.hpp"

using namespace sheeppain;
using oracle::det;

namespace {

ModelParams trained_like(Rng& rng, std::size_t clusters = 3) {
  ModelParams p = init_params({kFeatureDim, 2, clusters}, rng.bits());
  p.edge_scorer = {{rng.uniform(-2, 2), rng.uniform(-3, 0)}, rng.uniform(-1, 1)};
  return p;
}

}  // namespace

TEST(ClusterScore, PlainMean) {
  const std::vector<ClusterMember> m = {{PartLabel::EFP, 2}, {PartLabel::ER, 1}};
  EXPECT_EQ(cluster_score(m, WeightTable{}), 1.5);
}

TEST(ClusterScore, WeightedMean) {
  WeightTable w;
  w.set_part_weight(PartLabel::EFP, 2);
  w.set_part_weight(PartLabel::EF, 1);
  const std::vector<ClusterMember> m = {{PartLabel::EFP, 2}, {PartLabel::EF, 0}};
  EXPECT_NEAR(cluster_score(m, w), 4.0 / 3, 1e-15);
}

TEST(ClusterScore, Singleton) {
  WeightTable w;
  w.set_part_weight(PartLabel::NExV, 0.3);
  const std::vector<ClusterMember> m = {{PartLabel::NExV, 2}};
  EXPECT_EQ(cluster_score(m, w), 2.0);
}

TEST(ClusterScore, RejectsEmptyAndZeroWeight) {
  EXPECT_THROW(cluster_score(std::vector<ClusterMember>{}, WeightTable{}), Error);
  WeightTable w;
  w.set_part_weight(PartLabel::EF, 0);
  const std::vector<ClusterMember> m = {{PartLabel::EF, 1}};
  EXPECT_THROW(cluster_score(m, w), Error);
}

TEST(ClusterScore, ScaleInvariance) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ClusterMember> m;
    WeightTable w, scaled;
    const double lambda = rng.uniform(0.01, 100);
    for (std::size_t k = 0; k < 1 + rng.index(6); ++k) {
      const PartLabel l = kAllLabels[rng.index(kNumLabels)];
      m.push_back({l, rng.integer(0, 2)});
    }
    for (PartLabel l : kAllLabels) {
      const double x = rng.uniform(0.1, 3);
      w.set_part_weight(l, x);
      scaled.set_part_weight(l, lambda * x);
    }
    const double s = cluster_score(m, w);
    EXPECT_NEAR(cluster_score(m, scaled), s, 1e-12);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 2.0);
  }
}

TEST(TotalPain, Examples) {
  WeightTable w;
  EXPECT_EQ(total_pain({{1, 2.0}}, w), 2.0);
  EXPECT_EQ(total_pain({{1, 1.0}, {2, 2.0}}, w), 3.0);
  EXPECT_EQ(total_pain({{1, 0.0}, {2, 0.0}, {3, 0.0}}, w), 0.0);
  EXPECT_THROW(total_pain({{4, 1.0}}, w), Error);
}

TEST(NormalizePain, Examples) {
  WeightTable w;
  const double tmax = 6.0;
  EXPECT_EQ(normalize_pain(tmax, w), 100.0);
  EXPECT_EQ(normalize_pain(0.0, w), 0.0);
  EXPECT_EQ(normalize_pain(3.0, w), 50.0);
  EXPECT_EQ(normalize_pain(10.0, w), 100.0);
  EXPECT_THROW(normalize_pain(1.0, 0.0), Error);
}

TEST(NormalizePain, MaxTotalMatchesBruteForce) {
  // Maximize T_p over every pain assignment of a 3-cluster, one-member-each face.
  const WeightTable w;
  double best = 0;
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= 2; ++b) {
      for (int c = 0; c <= 2; ++c) best = std::max(best, static_cast<double>(a + b + c));
    }
  }
  const std::vector<int> all = {1, 2, 3};
  EXPECT_EQ(max_total_pain(w, all), best);
}

TEST(WeightTable, Validation) {
  WeightTable w;
  EXPECT_NO_THROW(w.validate());
  EXPECT_THROW(w.set_part_weight(PartLabel::EF, -1), Error);
  EXPECT_THROW(w.set_cluster_weight(1, NAN), Error);
  WeightTable z;
  for (PartLabel l : kAllLabels) z.set_part_weight(l, 0);
  EXPECT_THROW(z.validate(), Error);
}

TEST(ScoreFace, AllZeroAndAllTwo) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = trained_like(rng);
    auto d = random_detections(rng, 1 + rng.index(10));
    for (auto& x : d) x.pain_level = 0;
    EXPECT_EQ(score_face(d, p, WeightTable{}).nps, 0.0);
    for (auto& x : d) x.pain_level = 2;
    EXPECT_EQ(score_face(d, p, WeightTable{}).nps, 100.0);
  }
}

TEST(ScoreFace, EmptyRejected) {
  Rng rng(3);
  EXPECT_THROW(score_face(std::vector<Detection>{}, trained_like(rng), WeightTable{}), Error);
}

TEST(ScoreFace, MatchesStepByStepRecomputation) {
  Rng rng(4);
  const std::vector<Detection> d = {det(PartLabel::EF, 0), det(PartLabel::EFP, 2),
                                    det(PartLabel::EyPC, 1), det(PartLabel::NSU, 1),
                                    det(PartLabel::NExV, 2)};
  WeightTable w;
  w.set_part_weight(PartLabel::EFP, 2.0);
  w.set_part_weight(PartLabel::NExV, 0.5);
  w.set_cluster_weight(2, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = trained_like(rng);
    const auto r = score_face(d, p, w);
    const auto pg = infer_parse_graph(oracle::share(build_complete_graph(d)), p);
    const auto emb = oracle::naive_forward(pg, p);
    std::vector<int> assign;
    for (const auto& e : emb) {
      int best = 0;
      double bz = -INFINITY;
      for (int k = 0; k < 3; ++k) {
        double z = p.head.bias[k];
        for (std::size_t c = 0; c < kFeatureDim; ++c) z += p.head.weight(k, c) * e[c];
        if (z > bz) {
          bz = z;
          best = k;
        }
      }
      assign.push_back(best + 1);
    }
    EXPECT_EQ(r.assignment.assignments, assign);
    EXPECT_NEAR(r.nps, oracle::naive_nps(d, assign, w), 1e-12);
    EXPECT_EQ(r.kept_edges, pg.kept_edges);
  }
}

TEST(ScoreAssignment, UniformWeightClosedForm) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = random_detections(rng, 1 + rng.index(10));
    std::vector<int> a;
    for (std::size_t i = 0; i < d.size(); ++i) a.push_back(rng.integer(1, 3));
    const auto r = score_assignment(d, a, WeightTable{});
    std::map<int, std::pair<double, int>> acc;
    for (std::size_t i = 0; i < d.size(); ++i) {
      acc[a[i]].first += d[i].pain_level;
      acc[a[i]].second += 1;
    }
    double mean = 0;
    for (const auto& [k, v] : acc) mean += v.first / v.second;
    mean /= static_cast<double>(acc.size());
    EXPECT_NEAR(r.nps, 50.0 * mean, 1e-12);
  }
}

TEST(ScoreAssignment, MonotoneInSinglePain) {
  Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    auto d = random_detections(rng, 2 + rng.index(8));
    std::vector<int> a;
    for (std::size_t i = 0; i < d.size(); ++i) a.push_back(rng.integer(1, 3));
    WeightTable w;
    for (PartLabel l : kAllLabels) w.set_part_weight(l, rng.uniform(0, 2));
    for (int j = 1; j <= 3; ++j) w.set_cluster_weight(j, rng.uniform(0.1, 2));
    const std::size_t i = rng.index(d.size());
    if (d[i].pain_level == 2) continue;
    bool scorable = true;
    try {
      score_assignment(d, a, w);
    } catch (const Error&) {
      scorable = false;  // a cluster with zero total weight
    }
    if (!scorable) continue;
    const double before = score_assignment(d, a, w).nps;
    d[i].pain_level += 1;
    const double after = score_assignment(d, a, w).nps;
    EXPECT_GE(after, before);
    EXPECT_GE(before, 0.0);
    EXPECT_LE(after, 100.0);
  }
}

TEST(ScoreAssignment, EmptyClustersOmitted) {
  const std::vector<Detection> d = {det(PartLabel::EFP, 2), det(PartLabel::NExV, 2)};
  const auto r = score_assignment(d, std::vector<int>{2, 2}, WeightTable{});
  EXPECT_EQ(r.cluster_scores.size(), 1u);
  EXPECT_EQ(r.max_pain, 2.0);
  EXPECT_EQ(r.nps, 100.0);
}

TEST(TrackTps, EmptySeries) {
  Rng rng(7);
  EXPECT_TRUE(track_tps(std::vector<Frame>{}, trained_like(rng), WeightTable{}).entries.empty());
}

TEST(TrackTps, ConstantFramesConstantSeries) {
  Rng rng(8);
  const auto p = trained_like(rng);
  const auto d = random_detections(rng, 6);
  std::vector<Frame> frames;
  for (int k = 0; k < 5; ++k) frames.push_back({1000 + k, d});
  const auto s = track_tps(frames, p, WeightTable{});
  ASSERT_EQ(s.entries.size(), 5u);
  for (const auto& e : s.entries) {
    EXPECT_EQ(e.nps_normalized, s.entries[0].nps_normalized);
    EXPECT_EQ(e.expressions, 6u);
  }
}

TEST(TrackTps, RejectsNonIncreasingTimestamps) {
  Rng rng(9);
  const auto d = random_detections(rng, 3);
  const std::vector<Frame> frames = {{5, d}, {5, d}};
  EXPECT_THROW(track_tps(frames, trained_like(rng), WeightTable{}), Error);
}

TEST(TrackTps, EmptyFrameScoresZero) {
  Rng rng(10);
  const std::vector<Frame> frames = {{1, {}}, {2, random_detections(rng, 2)}};
  const auto s = track_tps(frames, trained_like(rng), WeightTable{});
  EXPECT_EQ(s.entries[0].nps_normalized, 0.0);
  EXPECT_EQ(s.entries[0].expressions, 0u);
}

TEST(TrackTps, RisingScenarioNonDecreasing) {
  Rng rng(11);
  ScenarioOptions o;
  o.trend = Trend::rising;
  const auto frames = generate_monitoring_scenario(3, o);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = track_tps(frames, trained_like(rng), WeightTable{});
    for (std::size_t k = 1; k < s.entries.size(); ++k) {
      EXPECT_GE(s.entries[k].nps_normalized, s.entries[k - 1].nps_normalized);
    }
  }
}

TEST(Reports, JsonAndTable) {
  const std::vector<Detection> d = {det(PartLabel::EFP, 2), det(PartLabel::EF, 0)};
  const auto r = score_assignment(d, std::vector<int>{1, 2}, WeightTable{});
  const auto j = nlohmann::json::parse(report_json(r, 7, 1700000000));
  EXPECT_EQ(j["frame_id"], 7);
  EXPECT_EQ(j["nps"], 50.0);
  EXPECT_EQ(report_json(r, 7, 1700000000).find('\n'), std::string::npos);

  TpsSeries s;
  s.entries.push_back({1700000000, 0.5, 3});
  EXPECT_EQ(tps_table(s), "timestamp\tnps\texpressions\n1700000000\t0.500000\t3\n");
}
