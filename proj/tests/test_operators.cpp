#include <gtest/gtest.h>

#include <cmath>

#include "fejerlab/error.hpp"
#include "fejerlab/operators.hpp"
#include "oracles.hpp"

using namespace fejerlab;
using oracle::v2;

namespace {

Operator p_halfspace(double n1, double n2) { return Operator::projection(ConvexSet::halfspace(v2(n1, n2), 0)); }

Operator rotation90() {
  Matrix r(2, 2);
  r << 0, -1, 1, 0;
  return Operator::affine(r, Vector::Zero(2));
}

}  // namespace

TEST(Apply, ClosedFormExamples) {
  EXPECT_EQ(apply(Operator::affine(0.5 * Matrix::Identity(2, 2), Vector::Zero(2)), v2(2, 4)), v2(1, 2));
  const auto avg = Operator::convex_combination({0.5, 0.5}, {p_halfspace(1, 0), p_halfspace(0, 1)});
  EXPECT_EQ(apply(avg, v2(2, 2)), v2(1, 1));
  const auto seq = Operator::composition({p_halfspace(1, 0), p_halfspace(0, 1)});
  EXPECT_EQ(apply(seq, v2(1, 1)), v2(0, 0));
}

TEST(Apply, CompositionOrderIsLeftToRight) {
  const auto first_ball = Operator::projection(ConvexSet::ball(v2(3, 0), 1));
  const auto then_plane = p_halfspace(0, 1);
  const Vector x = v2(0, 4);
  const Vector expected = apply(then_plane, apply(first_ball, x));
  EXPECT_EQ(apply(Operator::composition({first_ball, then_plane}), x), expected);
  EXPECT_NE(apply(Operator::composition({then_plane, first_ball}), x), expected);
}

TEST(FixedPointResidual, Examples) {
  const auto p = p_halfspace(1, 0);
  EXPECT_EQ(fixed_point_residual(p, v2(-1, 2)), 0.0);
  EXPECT_EQ(fixed_point_residual(p, v2(3, 0)), 3.0);
  const auto both = Operator::composition({Operator::projection(ConvexSet::ball(v2(-0.5, 0), 1)),
                                           Operator::projection(ConvexSet::ball(v2(0.5, 0), 1))});
  EXPECT_EQ(fixed_point_residual(both, v2(0, 0)), 0.0);
}

TEST(Factories, Validation) {
  EXPECT_THROW(Operator::convex_combination({0.5, 0.6}, {p_halfspace(1, 0), p_halfspace(0, 1)}), Error);
  EXPECT_THROW(Operator::convex_combination({-0.5, 1.5}, {p_halfspace(1, 0), p_halfspace(0, 1)}), Error);
  EXPECT_THROW(Operator::convex_combination({1.0}, {p_halfspace(1, 0), p_halfspace(0, 1)}), Error);
  EXPECT_THROW(Operator::composition({}), Error);
  EXPECT_THROW(Operator::composition({p_halfspace(1, 0), Operator::identity(3)}), Error);
  EXPECT_THROW(Operator::affine(Matrix::Identity(2, 3), Vector::Zero(2)), Error);
  EXPECT_THROW(apply(Operator::identity(2), Vector::Zero(3)), Error);
}

TEST(Properties, IdentityIsFirmlyNonexpansiveWithEquality) {
  const auto pairs = sample_pairs(2, 200, -3, 3, 5);
  const auto r = check_property(Operator::identity(2), Property::FirmlyNonexpansive, pairs, 1e-12);
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(r.worst_slack, 0.0, 1e-12);
  EXPECT_TRUE(r.violations.empty());
}

TEST(Properties, RotationOnTheDesignatedPair) {
  const std::vector<PointPair> pair{{v2(1, 0), v2(0, 0)}};
  const auto fne = check_property(rotation90(), Property::FirmlyNonexpansive, pair, 1e-12);
  EXPECT_DOUBLE_EQ(fne.worst_slack, -2.0);
  ASSERT_EQ(fne.violations.size(), 1u);
  EXPECT_EQ(fne.violations.front().index, 0u);
  EXPECT_FALSE(fne.passed());

  const auto ne = check_property(rotation90(), Property::Nonexpansive, pair, 1e-12);
  EXPECT_DOUBLE_EQ(ne.worst_slack, 0.0);
  EXPECT_TRUE(ne.passed());

  // an isometry that moves points is not "plus"
  const auto plus = check_property(rotation90(), Property::NonexpansivePlus, pair, 1e-12);
  EXPECT_FALSE(plus.passed());
}

TEST(Properties, ProjectionsAreFirmlyNonexpansive) {
  const auto pairs = sample_pairs(2, 1000, -3, 3, 17);
  for (const auto& op : {Operator::projection(ConvexSet::ball(v2(0, 0), 1)), p_halfspace(1, 2),
                         Operator::projection(ConvexSet::box(v2(-1, -1), v2(0, 2)))}) {
    const auto r = check_property(op, Property::FirmlyNonexpansive, pairs, 1e-10);
    EXPECT_GE(r.worst_slack, -1e-10);
    EXPECT_TRUE(r.passed());
  }
}

TEST(Properties, ContractionEstimate) {
  const auto pairs = sample_pairs(2, 100, -1, 1, 2);
  const auto half = Operator::affine(0.5 * Matrix::Identity(2, 2), v2(1, 1));
  const auto r = check_property(half, Property::Contraction, pairs, 1e-12);
  ASSERT_TRUE(r.estimated_tau.has_value());
  EXPECT_NEAR(*r.estimated_tau, 0.5, 1e-12);
  EXPECT_TRUE(r.passed());

  const auto iso = check_property(rotation90(), Property::Contraction, pairs, 1e-12);
  EXPECT_NEAR(*iso.estimated_tau, 1.0, 1e-12);
  EXPECT_FALSE(iso.passed());
}

TEST(Properties, AveragedBallProjectionsArePlus) {
  const auto avg = Operator::convex_combination(
      {0.5, 0.5}, {Operator::projection(ConvexSet::ball(v2(-0.5, 0), 1)),
                   Operator::projection(ConvexSet::ball(v2(0.5, 0), 1))});
  const auto r = check_property(avg, Property::NonexpansivePlus, sample_pairs(2, 1000, -3, 3, 23), 1e-10);
  EXPECT_TRUE(r.passed());
  EXPECT_THROW(check_property(avg, Property::Nonexpansive, std::vector<PointPair>{}, 1e-10), Error);
}

TEST(SamplePairs, DeterministicAndInRange) {
  const auto a = sample_pairs(3, 50, -2, 1, 99);
  const auto b = sample_pairs(3, 50, -2, 1, 99);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].first, b[i].first);
    EXPECT_EQ(a[i].second, b[i].second);
    EXPECT_GE(a[i].first.minCoeff(), -2.0);
    EXPECT_LE(a[i].first.maxCoeff(), 1.0);
  }
  EXPECT_NE(sample_pairs(3, 1, -2, 1, 100)[0].first, a[0].first);
}

TEST(OperatorJson, RoundTrip) {
  const auto op = Operator::composition(
      {Operator::convex_combination({0.25, 0.75}, {p_halfspace(1, 0), rotation90()}),
       Operator::projection(ConvexSet::ball(v2(0.1, 0.2), 0.3))});
  const Json j = to_json(op);
  const Operator back = operator_from_json(Json::parse(j.dump()));
  EXPECT_EQ(to_json(back), j);
  const Vector x = v2(1.7, -0.4);
  EXPECT_EQ(apply(back, x), apply(op, x));
  EXPECT_THROW(operator_from_json(Json{{"variant", "shrink"}}), Error);
}

TEST(PropertyNames, RoundTrip) {
  for (auto p : {Property::Contraction, Property::Nonexpansive, Property::FirmlyNonexpansive,
                 Property::NonexpansivePlus}) {
    EXPECT_EQ(property_from_string(to_string(p)), p);
  }
  EXPECT_THROW(property_from_string("averaged"), Error);
}
