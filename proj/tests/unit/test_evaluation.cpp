#include <gtest/gtest.h>

#include "fedpg/evaluation.hpp"
#include "support.hpp"

namespace fedpg {
namespace {

TEST(RateSummary, ConstantCurves) {
  const std::vector<std::vector<double>> curves(4, std::vector<double>(10, 5.0));
  const RateSummary s = summarize_rate_curves(curves);
  for (std::size_t t = 0; t < 10; ++t) {
    EXPECT_EQ(s.mean[t], 5.0);
    EXPECT_EQ(s.std_dev[t], 0.0);
    EXPECT_EQ(s.cv[t], 0.0);
  }
  EXPECT_LT(s.slope_deviation, 1e-12);
}

TEST(RateSummary, LinearCurveSlope) {
  for (double b : {-0.7, 0.0, 2.5}) {
    std::vector<double> y(30);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = 3.0 + b * static_cast<double>(t);
    EXPECT_NEAR(summarize_rate_curves({y}).slope_deviation, std::abs(b), 1e-10);
  }
}

TEST(RateSummary, TwoRunsByHand) {
  const RateSummary s = summarize_rate_curves({{1.0, 2.0}, {3.0, 2.0}});
  EXPECT_EQ(s.mean, (std::vector<double>{2.0, 2.0}));
  EXPECT_EQ(s.std_dev, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(s.cv, (std::vector<double>{0.5, 0.0}));
  EXPECT_EQ(summarize_rate_curves({{0.0}, {0.0}}).cv[0], 0.0);
}

TEST(RateSummary, Errors) {
  EXPECT_THROW(summarize_rate_curves({}), std::invalid_argument);
  EXPECT_THROW(summarize_rate_curves({{1.0, 2.0}, {1.0}}), std::invalid_argument);
  EXPECT_EQ(least_squares_slope(std::vector<double>{4.0}), 0.0);
}

TEST(Evaluate, DeterministicAndShaped) {
  const ScenarioTemplate tmpl = testing::tiny_template();
  const ScenarioSpec scenario = testing::tiny_scenario();
  const PolicyNetwork net(testing::architecture_for(scenario), 12.0);
  Rng rng = derive_stream(4, StreamRole::kParamInit);
  const std::vector<PolicyParams> policies{init_params(net.architecture(), rng),
                                           init_params(net.architecture(), rng)};
  const EvaluationResult a = evaluate(net, policies, tmpl, Heterogeneity{}, 5, 99);
  const EvaluationResult b = evaluate(net, policies, tmpl, Heterogeneity{}, 5, 99);
  ASSERT_EQ(a.curves.size(), 5u);
  for (const auto& c : a.curves) EXPECT_EQ(c.size(), static_cast<std::size_t>(tmpl.horizon));
  EXPECT_EQ(a.curves, b.curves);
  EXPECT_NE(evaluate(net, policies, tmpl, Heterogeneity{}, 5, 100).curves, a.curves);

  const EvaluationResult single = evaluate(net, policies, tmpl, Heterogeneity{}, 1, 99);
  for (double cv : single.summary.cv) EXPECT_EQ(cv, 0.0);
  EXPECT_THROW(evaluate(net, policies, tmpl, Heterogeneity{}, 0, 99), std::invalid_argument);
}

}  // namespace
}  // namespace fedpg
