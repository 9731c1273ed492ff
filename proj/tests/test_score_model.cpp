#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "rejectkit/score_model.hpp"

namespace rejectkit {
namespace {

TEST(Softmax, KnownValues) {
  const std::vector<double> even{0.0, 0.0};
  auto p = softmax(even);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);

  const std::vector<double> ln2{std::log(2.0), 0.0};
  p = softmax(ln2);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);

  const std::vector<double> two{2.0, 0.0};
  EXPECT_NEAR(softmax(two, 2.0)[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(softmax(two, 2.0)[0], 0.7311, 1e-4);
}

TEST(Softmax, HugeLogitsStayFinite) {
  const std::vector<double> big{1e300, -1e300, 0.0};
  const auto p = softmax(big);
  EXPECT_EQ(p[0], 1.0);
  EXPECT_EQ(p[1], 0.0);
}

TEST(Softmax, RejectsBadInput) {
  const std::vector<double> none;
  EXPECT_THROW(softmax(none), std::domain_error);
  const std::vector<double> one{1.0};
  EXPECT_THROW(softmax(one, 0.0), std::domain_error);
  EXPECT_THROW(softmax(one, -1.0), std::domain_error);
}

TEST(Argmax, LowestIndexWinsTies) {
  const std::vector<double> v{1.0, 3.0, 3.0, 2.0};
  EXPECT_EQ(argmax(v), 1);
}

ThresholdVector tv_for(std::vector<double> tau) {
  ThresholdVector tv = base_thresholds(tau.size());
  tv.thresholds = std::move(tau);
  return tv;
}

TEST(Decide, RejectsAtOrBelowThreshold) {
  const std::vector<double> logits{std::log(2.0), 0.0};
  const double conf = softmax(logits)[0];

  Decision d = decide(logits, tv_for({conf, 0.0}));
  EXPECT_EQ(d.predicted, 0);
  EXPECT_TRUE(d.rejected) << "boundary is inclusive";

  d = decide(logits, tv_for({std::nextafter(conf, 0.0), 0.0}));
  EXPECT_FALSE(d.rejected);

  d = decide(logits, tv_for({0.9, 0.0}));
  EXPECT_TRUE(d.rejected);
}

TEST(Decide, UsesPredictedClassTemperature) {
  const std::vector<double> logits{2.0, 0.0};
  ThresholdVector tv = tv_for({0.75, 0.99});
  EXPECT_FALSE(decide(logits, tv).rejected);  // 0.8808
  tv.temperatures = {2.0, 1.0};
  const Decision d = decide(logits, tv);
  EXPECT_NEAR(d.confidence, 0.7311, 1e-4);
  EXPECT_TRUE(d.rejected);
}

TEST(Decide, LengthMismatchThrows) {
  const std::vector<double> logits{1.0, 2.0, 3.0};
  EXPECT_THROW(decide(logits, base_thresholds(2)), std::domain_error);
}

TEST(ThresholdVector, Validate) {
  ThresholdVector tv = base_thresholds(3);
  EXPECT_NO_THROW(tv.validate());
  tv.thresholds[1] = 1.5;
  EXPECT_THROW(tv.validate(), std::invalid_argument);
  tv = base_thresholds(3);
  tv.temperatures.pop_back();
  EXPECT_THROW(tv.validate(), std::invalid_argument);
  tv = base_thresholds(3);
  tv.delta = 1.0;
  EXPECT_THROW(tv.validate(), std::invalid_argument);
}

TEST(ScoreSet, Invariants) {
  EXPECT_THROW(ScoreSet(2, {{"a", 2, {0.0, 1.0}, {}}}), std::invalid_argument);
  EXPECT_THROW(ScoreSet(2, {{"a", 0, {0.0}, {}}}), std::invalid_argument);
  EXPECT_THROW(ScoreSet(2, {{"a", 0, {0.0, NAN}, {}}}), std::invalid_argument);
  EXPECT_THROW(ScoreSet(2, {{"a", 0, {0.0, 1.0}, {}}, {"a", 1, {0.0, 1.0}, {}}}),
               std::invalid_argument);
  EXPECT_THROW(ScoreSet(2, {{"a", 0, {0.0, 1.0}, Point2{1, 2}}, {"b", 1, {0.0, 1.0}, {}}}),
               std::invalid_argument);
  const ScoreSet ok(2, {{"a", 0, {0.0, 1.0}, Point2{1, 2}}});
  EXPECT_TRUE(ok.has_coords());
  EXPECT_EQ(ok.size(), 1u);
}

// Property: tau = 0 selects everything, and the predicted class is unaffected
// by thresholds or temperatures.
TEST(DecideProperty, ArgmaxInvariantAndZeroSelectsAll) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> logit(0.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> temp(0.05, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t c = 2 + trial % 6;
    std::vector<double> z(c);
    for (double& v : z) v = logit(rng);
    ThresholdVector zero = base_thresholds(c);
    for (double& t : zero.temperatures) t = temp(rng);
    const Decision d0 = decide(z, zero);
    EXPECT_FALSE(d0.rejected);
    EXPECT_EQ(d0.predicted, argmax(z));

    ThresholdVector tv = zero;
    for (double& t : tv.thresholds) t = unit(rng);
    const Decision d = decide(z, tv);
    EXPECT_EQ(d.predicted, d0.predicted);
    EXPECT_EQ(d.rejected, d.confidence <= tv.thresholds[d.predicted]);
    EXPECT_GE(d.confidence, 1.0 / static_cast<double>(c) - 1e-15);
  }
}

}  // namespace
}  // namespace rejectkit
