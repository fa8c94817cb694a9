#include <gtest/gtest.h>

#include <cmath>

#include "fejerlab/diagnostics.hpp"
#include "fejerlab/error.hpp"
#include "fejerlab/gallery.hpp"
#include "fejerlab/solvers.hpp"
#include "oracles.hpp"

using namespace fejerlab;
using oracle::v2;

namespace {

Trace make_trace(std::vector<Vector> xs) {
  Trace t;
  t.algorithm = "handmade";
  t.iterates = std::move(xs);
  return t;
}

Trace constant_trace(std::size_t n) { return make_trace(std::vector<Vector>(n, v2(0.3, -0.7))); }

Trace alternating_trace(std::size_t n) {
  std::vector<Vector> xs;
  for (std::size_t k = 0; k < n; ++k) xs.push_back(v2(k % 2 == 0 ? 1.0 : -1.0, 0));
  return make_trace(xs);
}

Trace halving_trace(std::size_t n) {
  std::vector<Vector> xs;
  for (std::size_t k = 0; k < n; ++k) xs.push_back(v2(std::ldexp(1.0, -int(k)), 0));
  return make_trace(xs);
}

Vector w(int l) { return v2(std::ldexp(1.0, -l), 0); }

AnchorSet single(const Vector& x) { return AnchorSet{{x}, "x"}; }

}  // namespace

TEST(DistanceStep, ExactAndTolerant) {
  // equal distances: exact comparison accepts, any increase is rejected
  EXPECT_TRUE(distance_nonincreasing(v2(1, 0), v2(0, 1), v2(0, 0), 0.0));
  EXPECT_FALSE(distance_nonincreasing(v2(1, 0), v2(1, 1e-200), v2(0, 0), 0.0));
  EXPECT_TRUE(distance_nonincreasing(v2(1, 0), v2(1, 1e-6), v2(0, 0), 1e-9));
  EXPECT_FALSE(distance_nonincreasing(v2(1, 0), v2(1, 1e-3), v2(0, 0), 1e-9));
  EXPECT_THROW(distance_nonincreasing(v2(1, 0), v2(1, 0), v2(0, 0), -1.0), Error);
  EXPECT_DOUBLE_EQ(squared_distance_change(v2(0, 2), v2(1, 2), v2(0.25, 0)), 0.5);
}

TEST(CheckFejer, ConstantTraceIsFejer) {
  const auto r = check_fejer(constant_trace(5), AnchorSet{{v2(1, 1), v2(-4, 2)}, "a"}, 0.0);
  for (const auto& x : r) {
    EXPECT_TRUE(x.monotone);
    EXPECT_FALSE(x.first_violation.has_value());
  }
}

TEST(CheckFejer, StaircaseAwayFromOrigin) {
  const auto r = check_fejer(staircase_trace(20), single(v2(0, 0)), 0.0);
  EXPECT_FALSE(r[0].monotone);
  EXPECT_EQ(r[0].first_violation, 0u);
}

TEST(CheckFejer, SequentialQuadrant) {
  const std::vector<ConvexSet> sets{ConvexSet::halfspace(v2(1, 0), 0), ConvexSet::halfspace(v2(0, 1), 0)};
  const auto t = sequential_projections(sets, v2(1, 1), StopRule{});
  EXPECT_TRUE(check_fejer(t, single(v2(0, 0)), 0.0)[0].monotone);
}

TEST(CheckFejer, Preconditions) {
  EXPECT_THROW(check_fejer(Trace{}, single(v2(0, 0)), 0.0), Error);
  EXPECT_THROW(check_fejer(constant_trace(3), AnchorSet{{}, "empty"}, 0.0), Error);
  EXPECT_THROW(check_fejer(constant_trace(3), single(Vector::Zero(3)), 0.0), Error);
  // a single iterate has no steps
  EXPECT_TRUE(check_fejer(constant_trace(1), single(v2(9, 9)), 0.0)[0].monotone);
}

TEST(FejerStar, IndicesOnTheStaircase) {
  const Trace t = staircase_trace(40);
  for (int l = 0; l <= 3; ++l) {
    const auto n = fejer_star_index(t, w(l), 0.0);
    ASSERT_TRUE(n.has_value()) << l;
    EXPECT_LE(*n, std::size_t(2 * l)) << l;
  }
  for (std::size_t len : {4u, 10u, 20u, 40u}) EXPECT_FALSE(fejer_star_index(staircase_trace(len), v2(0, 0), 0.0));
  EXPECT_EQ(fejer_star_index(t, w(0), 0.0), 0u);
}

TEST(FejerStar, HandmadeIndex) {
  // moves away from the origin at steps 0 and 2 then approaches it
  const Trace t = make_trace({v2(1, 0), v2(2, 0), v2(1, 0), v2(3, 0), v2(2, 0), v2(1, 0)});
  EXPECT_EQ(fejer_star_index(t, v2(0, 0), 0.0), 3u);
  const Trace up = make_trace({v2(1, 0), v2(0.5, 0), v2(2, 0)});
  EXPECT_FALSE(fejer_star_index(up, v2(0, 0), 0.0).has_value());
}

TEST(FejerStarHull, CombinationsOfVertices) {
  const Trace t = staircase_trace(60);
  AnchorSet m{{}, "M"};
  for (int l = 0; l <= 5; ++l) m.points.push_back(w(l));
  const auto report = check_fejer_star_convex_hull(t, m, 50, 1, 0.0);
  ASSERT_EQ(report.samples.size(), 50u);
  EXPECT_EQ(report.absent_count, 0u);
  for (const auto& s : report.samples) {
    ASSERT_TRUE(s.fejer_star_N.has_value());
    ASSERT_TRUE(s.vertex_bound.has_value());
    EXPECT_LE(*s.fejer_star_N, *s.vertex_bound);
    EXPECT_NEAR(s.weights.sum(), 1.0, 1e-12);
    EXPECT_GE(s.weights.minCoeff(), 0.0);
  }
  // same seed, same samples
  const auto again = check_fejer_star_convex_hull(t, m, 50, 1, 0.0);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(again.samples[i].point, report.samples[i].point);
}

TEST(FejerStarHull, DegenerateCases) {
  const Trace t = staircase_trace(30);
  const auto one = check_fejer_star_convex_hull(t, single(w(3)), 5, 0, 0.0);
  for (const auto& s : one.samples) EXPECT_EQ(s.fejer_star_N, fejer_star_index(t, w(3), 0.0));

  const AnchorSet m{{w(0), w(2), w(4)}, "M"};
  EXPECT_EQ(convex_combination(m, Vector{{0.0, 1.0, 0.0}}), w(2));
  EXPECT_EQ(fejer_star_index(t, convex_combination(m, Vector{{0.0, 0.0, 1.0}}), 0.0),
            fejer_star_index(t, w(4), 0.0));
  EXPECT_THROW(convex_combination(m, Vector{{0.5, 0.6, 0.0}}), Error);
  EXPECT_THROW(convex_combination(m, Vector{{0.5, 0.5}}), Error);
}

TEST(Sequences, DistanceAndCauchy) {
  const auto d = distance_sequence(constant_trace(6), v2(1, 1));
  for (double x : d) EXPECT_EQ(x, d.front());
  EXPECT_EQ(cauchy_tail_statistic(d, 3), 0.0);

  const auto stair = distance_sequence(staircase_trace(60), v2(0, 0));
  EXPECT_LE(cauchy_tail_statistic(stair, 10), 1e-4);
  EXPECT_NEAR(stair.back(), std::sqrt(4.0 / 3.0), 1e-6);

  const auto half = distance_sequence(halving_trace(12), v2(0, 0));
  for (std::size_t k = 0; k < half.size(); ++k) EXPECT_EQ(half[k], std::ldexp(1.0, -int(k)));
  EXPECT_EQ(cauchy_tail_statistic(half, 4), half[7] - half[8]);

  EXPECT_THROW(cauchy_tail_statistic(half, 0), Error);
  EXPECT_THROW(cauchy_tail_statistic(half, half.size()), Error);
}

TEST(Sequences, InnerProducts) {
  for (double s : inner_product_sequence(staircase_trace(10), v2(1, 2), v2(1, 2))) EXPECT_EQ(s, 0.0);
  const auto c = inner_product_sequence(constant_trace(5), v2(1, 0), v2(0, 1));
  for (double s : c) EXPECT_EQ(s, c.front());

  const Trace t = staircase_trace(80);
  const auto s = inner_product_sequence(t, v2(1, 0), v2(0, 0));
  for (std::size_t k = 0; k < t.size(); ++k) EXPECT_EQ(s[k], t.iterates[k][0]);
  for (std::size_t l = 0; 2 * l + 1 < t.size(); ++l) EXPECT_EQ(s[2 * l + 1], std::ldexp(1.0, -int(l)));
  EXPECT_LE(cauchy_tail_statistic(s, 10), 1e-10);
}

// Distances to points of the closed convex hull converge even where the
// trace is not Fejer* monotone, and inner products along differences of
// such points converge as well.
TEST(Sequences, ClosureOfHullScalarsConverge) {
  const Trace t = staircase_trace(120);
  for (const Vector& x : {v2(0, 0), v2(1e-3, 0), v2(0.5, 0)}) {
    EXPECT_LE(cauchy_tail_statistic(distance_sequence(t, x), 20), 1e-9);
  }
  EXPECT_LE(cauchy_tail_statistic(inner_product_sequence(t, v2(0.5, 0), v2(0, 0)), 20), 1e-9);
}

TEST(QuasiFejer, FejerTraceHasZeroEpsilons) {
  const Trace t = halving_trace(20);
  const AnchorSet a{{v2(0, 0), v2(-1, 3)}, "a"};
  for (auto type : {QuasiFejerType::I, QuasiFejerType::II, QuasiFejerType::III}) {
    for (const auto& fit : fit_quasi_fejer(t, a, type).fits) {
      EXPECT_EQ(fit.partial_sum, 0.0);
      EXPECT_EQ(fit.tail_ratio, 0.0);
      EXPECT_TRUE(fit.consistent_with_summable());
    }
  }
}

TEST(QuasiFejer, TypeThreeAtQuarter) {
  const auto fit = fit_quasi_fejer(staircase_trace(40), single(w(2)), QuasiFejerType::III);
  ASSERT_EQ(fit.fits.size(), 1u);
  const auto& eps = fit.fits[0].epsilons;
  EXPECT_NEAR(eps[0], 0.5, 1e-15);
  for (std::size_t k = 1; k < eps.size(); ++k) EXPECT_EQ(eps[k], 0.0) << k;
}

TEST(QuasiFejer, TypeTwoOnTheSegment) {
  AnchorSet seg{{}, "seg"};
  for (int i = 0; i <= 10; ++i) seg.points.push_back(v2(-1 + i / 10.0, 0));
  const auto fit = fit_quasi_fejer(staircase_trace(200), seg, QuasiFejerType::II).fits[0];
  EXPECT_TRUE(std::isfinite(fit.partial_sum));
  EXPECT_LE(fit.tail_ratio, 0.05);
  EXPECT_EQ(fit.classification(), "consistent with summable");
}

TEST(QuasiFejer, TailRatio) {
  const auto flat = make_epsilon_fit(std::vector<double>(8, 1.0));
  EXPECT_DOUBLE_EQ(flat.tail_ratio, 0.25);
  EXPECT_EQ(flat.classification(), "inconclusive");
  EXPECT_EQ(make_epsilon_fit({}).tail_ratio, 0.0);
}

TEST(Witness, FromFejerStarIndex) {
  const Trace t = staircase_trace(40);
  const auto eps = quasi_fejer3_witness(t, w(2), 2);
  ASSERT_EQ(eps.size(), 39u);
  EXPECT_NEAR(eps[0], 0.5, 1e-12);
  for (std::size_t k = 1; k < eps.size(); ++k) EXPECT_EQ(eps[k], 0.0);
  EXPECT_TRUE(type3_certificate_holds(t, w(2), eps));

  for (double e : quasi_fejer3_witness(t, w(0), 0)) EXPECT_EQ(e, 0.0);
  for (double e : quasi_fejer3_witness(halving_trace(10), v2(0, 0), 0)) EXPECT_EQ(e, 0.0);
}

TEST(Witness, RejectsTooSmallN) {
  const Trace t = staircase_trace(40);
  try {
    quasi_fejer3_witness(t, w(3), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidN);
  }
  EXPECT_THROW(quasi_fejer3_witness(t, v2(0, 0), 30), Error);
}

TEST(Witness, CertificateDetectsShortfall) {
  const Trace t = staircase_trace(10);
  std::vector<double> eps(9, 0.0);
  EXPECT_FALSE(type3_certificate_holds(t, w(2), eps));
  EXPECT_THROW(type3_certificate_holds(t, w(2), std::vector<double>(3, 0.0)), Error);
}

TEST(Analyze, ReportShapeAndOrder) {
  const auto r = analyze_monotonicity(staircase_trace(30), AnchorSet{{w(0), w(2), v2(0, 0)}, "mixed"}, 0.0);
  ASSERT_EQ(r.per_point.size(), 3u);
  EXPECT_TRUE(r.per_point[0].fejer);
  EXPECT_EQ(r.per_point[0].fejer_star_N, 0u);
  EXPECT_FALSE(r.per_point[1].fejer);
  EXPECT_EQ(r.per_point[1].fejer_star_N, 1u);
  EXPECT_NEAR(r.per_point[1].type3_partial_sum, 0.5, 1e-15);
  EXPECT_FALSE(r.per_point[2].fejer_star_N.has_value());

  const Json j = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"anchor_set", "tol", "trace_length", "per_point", "uniform"}));
  EXPECT_TRUE(j["per_point"][2]["fejer_star_N"].is_null());
  EXPECT_EQ(j.dump(), to_json(analyze_monotonicity(staircase_trace(30),
                                                   AnchorSet{{w(0), w(2), v2(0, 0)}, "mixed"}, 0.0))
                          .dump());
}

TEST(AnchorJson, Forms) {
  const AnchorSet a{{v2(1, 2), v2(3, 4)}, "pts"};
  const AnchorSet back = anchor_set_from_json(to_json(a));
  EXPECT_EQ(back.label, "pts");
  EXPECT_EQ(back.points, a.points);
  const AnchorSet bare = anchor_set_from_json(Json::parse("[[0,0],[1,1]]"), "bare");
  EXPECT_EQ(bare.label, "bare");
  EXPECT_EQ(bare.points.size(), 2u);
  EXPECT_THROW(anchor_set_from_json(Json::parse("[[0,0],[1,1,1]]")), Error);
}

TEST(Clusters, Examples) {
  const auto stair = cluster_points(staircase_trace(200), 0.25, 0.05);
  ASSERT_EQ(stair.clusters.size(), 1u);
  EXPECT_TRUE(stair.is_convergent);
  EXPECT_NEAR((*stair.limit_estimate - v2(0, 1.1547005)).norm(), 0.0, 1e-6);

  const auto alt = cluster_points(alternating_trace(40), 0.5, 0.1);
  ASSERT_EQ(alt.clusters.size(), 2u);
  EXPECT_FALSE(alt.is_convergent);
  EXPECT_FALSE(alt.limit_estimate.has_value());
  EXPECT_EQ(alt.clusters[0].members.size(), 10u);
  EXPECT_EQ(alt.clusters[0].members.front(), 20u);

  const auto c = cluster_points(constant_trace(9), 1.0, 1e-9);
  ASSERT_EQ(c.clusters.size(), 1u);
  EXPECT_EQ(*c.limit_estimate, v2(0.3, -0.7));

  EXPECT_THROW(cluster_points(constant_trace(9), 0.0, 1.0), Error);
  EXPECT_THROW(cluster_points(constant_trace(9), 0.5, 0.0), Error);
}

TEST(ClusterGeometry, HyperplaneAndMidpoint) {
  const AnchorSet axis{{v2(0, -1), v2(0, 0.5), v2(0, 3)}, "axis"};
  const auto h = check_cluster_hyperplane(v2(1, 0), v2(-1, 0), axis, 1e-12);
  EXPECT_EQ(h.alpha, 0.0);
  EXPECT_EQ(h.max_deviation, 0.0);
  EXPECT_TRUE(h.passed);
  const auto o = check_cluster_midpoint_orthogonality(v2(1, 0), v2(-1, 0), axis, 1e-12);
  EXPECT_EQ(o.max_deviation, 0.0);
  EXPECT_TRUE(o.passed);

  EXPECT_EQ(check_cluster_hyperplane(v2(1, 0), v2(3, 2), single(v2(7, 1)), 1e-12).max_deviation, 0.0);

  const auto bad = check_cluster_hyperplane(v2(1, 0), v2(-1, 0), AnchorSet{{v2(0, 0), v2(1, 0)}, "b"}, 1e-12);
  EXPECT_GT(bad.max_deviation, 0.0);
  EXPECT_FALSE(bad.passed);

  const auto at_end = check_cluster_midpoint_orthogonality(v2(1, 0), v2(-1, 0), single(v2(1, 0)), 1e-12);
  EXPECT_DOUBLE_EQ(at_end.max_deviation, 2.0);  // |w1 - w2|^2 / 2
  EXPECT_FALSE(at_end.passed);

  try {
    check_cluster_hyperplane(v2(1, 0), v2(1, 1e-13), axis, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateClusterPair);
  }
}

TEST(StrongConvergence, Condition) {
  const std::vector<double> none(30, 0.0);
  EXPECT_TRUE(check_strong_convergence_condition(constant_trace(10), v2(1, 1), 5.0, none).holds);

  const Trace t = halving_trace(30);
  std::vector<double> eps;
  for (int k = 0; k < 29; ++k) eps.push_back(std::ldexp(1.0, -k - 1));
  EXPECT_TRUE(check_strong_convergence_condition(t, v2(0, 0), 1.0, eps).holds);

  const auto fails = check_strong_convergence_condition(t, v2(0, 0), 1.0, none);
  EXPECT_FALSE(fails.holds);
  EXPECT_TRUE(fails.first_violation.has_value());

  EXPECT_THROW(check_strong_convergence_condition(t, v2(0, 0), 1.0, std::vector<double>(5, 0.0)), Error);
  EXPECT_THROW(check_strong_convergence_condition(t, v2(0, 0), 0.0, eps), Error);
}

TEST(AffineDimension, Ranks) {
  EXPECT_EQ(affine_dimension(single(v2(1, 1))), 0);
  EXPECT_EQ(affine_dimension(AnchorSet{{v2(0, 0), v2(0.5, 0), v2(1, 0)}, "line"}), 1);
  EXPECT_EQ(affine_dimension(AnchorSet{{v2(0, 0), v2(1, 0), v2(0, -1)}, "tri"}), 2);
}
