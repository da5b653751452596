#include <cmath>
#include <fstream>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gibbslab/canonical.hpp"
#include "gibbslab/error.hpp"

using namespace gibbslab;

namespace {

Family iid(const BaseSpec& s, std::optional<double> cap = std::nullopt, double eps = 1e-13) {
  const std::vector<BaseSpec> one{s};
  return make_family(one, eps, cap);
}

}  // namespace

TEST(CanonicalMarginal, Examples) {
  const Family b = iid(BaseSpec::binomial(3, 0.4));
  for (long k = 0; k <= 3; ++k) {
    const Pmf m = canonical_marginal(b, 0, 1, k);
    EXPECT_DOUBLE_EQ(m.prob(k), 1.0);
  }
  const Family g = iid(BaseSpec::geometric(0.3));
  for (long k : {0L, 4L, 9L}) {
    const Pmf m = canonical_marginal(g, 0, 2, k);
    for (long x = 0; x <= k; ++x) EXPECT_NEAR(m.prob(x), 1.0 / (k + 1), 1e-12);
    EXPECT_EQ(m.prob(k + 1), 0.0);
  }
  const Family coin = iid(BaseSpec::bernoulli(0.5));
  EXPECT_NEAR(canonical_marginal(coin, 0, 2, 1).prob(1), 0.5, 1e-15);
  EXPECT_THROW(canonical_marginal(coin, 0, 2, 3), EmptyConditionError);
}

TEST(CanonicalJoint, Examples) {
  const Family coin = iid(BaseSpec::bernoulli(0.5));
  const JointTable z = canonical_joint(coin, 2, 0);
  EXPECT_DOUBLE_EQ(z.prob(std::vector<int>{0, 0}), 1.0);
  const JointTable one = canonical_joint(coin, 2, 1);
  EXPECT_NEAR(one.prob(std::vector<int>{0, 1}), 0.5, 1e-15);
  EXPECT_NEAR(one.prob(std::vector<int>{1, 0}), 0.5, 1e-15);
  EXPECT_EQ(one.prob(std::vector<int>{1, 1}), 0.0);

  const Family g = iid(BaseSpec::geometric(0.5));
  const JointTable j = canonical_joint(g, 3, 2);
  int compositions = 0;
  for_each_configuration(j.dims(), [&](std::size_t flat, const Configuration& x) {
    if (std::accumulate(x.begin(), x.end(), 0) == 2) {
      ++compositions;
      EXPECT_NEAR(j.prob(flat), 1.0 / 6.0, 1e-12);
    } else {
      EXPECT_EQ(j.prob(flat), 0.0);
    }
  });
  EXPECT_EQ(compositions, 6);
}

TEST(CanonicalJoint, TooLarge) {
  const Family g = iid(BaseSpec::geometric(0.5));
  try {
    canonical_joint(g, 3, 500, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInstanceTooLarge);
  }
}

TEST(CanonicalJoint, TiltInvariantAndMarginals) {
  const std::vector<BaseSpec> specs{BaseSpec::binomial(3, 0.3), BaseSpec::from_weights({1, 4, 2}),
                                    BaseSpec::poisson(1.2)};
  const Family f = make_family(specs, 1e-13, 2.0);
  for (long k : {1L, 4L, 7L}) {
    const JointTable base = canonical_joint(f, 3, k);
    for (double lam : {0.5, 1.5, 2.0}) {
      const JointTable t = canonical_joint(f.tilted(lam), 3, k);
      ASSERT_EQ(t.size(), base.size());
      for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(t.prob(i), base.prob(i), 1e-12);
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const Pmf a = canonical_marginal(f, i, 3, k);
      const Pmf b = base.marginal(i);
      for (int x = 0; x <= k; ++x) EXPECT_NEAR(a.prob(x), b.prob(x), 1e-11);
    }
  }
}

TEST(DetailedBalance, CanonicalWithJumpRates) {
  const Family f = iid(BaseSpec::binomial(4, 0.35));
  std::vector<double> g = jump_rates_from_pmf(f.member(0));
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_NEAR(g[2], f.member(0).prob(1) / f.member(0).prob(2), 1e-14);
  for (long k = 1; k <= 8; ++k) {
    const JointTable mu = canonical_joint(f, 3, k);
    for_each_configuration(mu.dims(), [&](std::size_t flat, const Configuration& x) {
      if (std::accumulate(x.begin(), x.end(), 0L) != k) return;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (i == j || x[i] == 0 || x[j] >= 4) continue;
          Configuration z = x;
          --z[i];
          ++z[j];
          const double lhs = mu.prob(flat) * g[x[i]];
          const double rhs = mu.prob(z) * g[z[j]];
          EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(lhs, rhs));
        }
      }
    });
  }
  EXPECT_THROW(jump_rates_from_pmf(pmf_from_weights(std::vector<double>{1, 0, 1})), Error);
}

TEST(Mixture, Examples) {
  const Family coin = iid(BaseSpec::bernoulli(0.5));
  const JointTable m = mixture_conditional(coin, 2.0, 2, Interval::at_least(1));
  EXPECT_EQ(m.prob(std::vector<int>{0, 0}), 0.0);
  EXPECT_NEAR(m.prob(std::vector<int>{0, 1}), 0.25, 1e-15);
  EXPECT_NEAR(m.prob(std::vector<int>{1, 0}), 0.25, 1e-15);
  EXPECT_NEAR(m.prob(std::vector<int>{1, 1}), 0.5, 1e-15);

  const std::vector<BaseSpec> specs{BaseSpec::binomial(2, 0.3), BaseSpec::uniform(3)};
  const Family f = make_family(specs);
  const JointTable full = mixture_conditional(f, 1.0, 2, Interval::all());
  for_each_configuration(full.dims(), [&](std::size_t flat, const Configuration& x) {
    EXPECT_NEAR(full.prob(flat), f.member(0).prob(x[0]) * f.member(1).prob(x[1]), 1e-14);
  });
  const JointTable point = mixture_conditional(f, 1.7, 2, Interval::point(3));
  const JointTable canon = canonical_joint(f, 2, 3);
  // canonical tables live on 0..min(max_i, k); the mixture on full supports
  const JointTable canon_full = canon.embed(std::vector<int>(full.dims().begin(), full.dims().end()));
  for (std::size_t i = 0; i < point.size(); ++i) EXPECT_NEAR(point.prob(i), canon_full.prob(i), 1e-14);
  const JointTable direct = direct_conditional(f, 0.6, 2, Interval::below(2.5));
  const JointTable mix = mixture_conditional(f, 0.6, 2, Interval::below(2.5));
  for (std::size_t i = 0; i < mix.size(); ++i) EXPECT_NEAR(mix.prob(i), direct.prob(i), 1e-12);
}

TEST(Efron, LogConcaveFamilies) {
  const EfronReport coins = efron_check(iid(BaseSpec::bernoulli(0.5)), 2, 2);
  EXPECT_TRUE(coins.all_log_concave);
  EXPECT_TRUE(coins.all_hold);
  EXPECT_EQ(coins.pairs.size(), 2u);
  const EfronReport geo = efron_check(iid(BaseSpec::geometric(0.5), 1.5, 1e-6), 3, 6);
  EXPECT_TRUE(geo.all_hold);
  EXPECT_EQ(geo.pairs.size(), 6u);
  for (const auto& p : geo.pairs) EXPECT_NEAR(p.flow, 1.0, 1e-9);
}

TEST(Efron, TransitiveSpotCheck) {
  const std::vector<BaseSpec> specs{BaseSpec::binomial(3, 0.6), BaseSpec::from_weights({1, 2, 2, 1})};
  const Family f = make_family(specs);
  for (long k = 0; k + 2 <= 6; ++k) {
    const JointTable a = canonical_joint(f, 2, k);
    const JointTable c = canonical_joint(f, 2, k + 2);
    const std::vector<int> dims(c.dims().begin(), c.dims().end());
    EXPECT_TRUE(stochastic_dominance(a.embed(dims), c).holds) << "k=" << k;
  }
}

TEST(Efron, FrozenCounterexampleFails) {
  std::ifstream in(std::string(GIBBSLAB_FIXTURE_DIR) + "/efron_counterexample.json");
  ASSERT_TRUE(in.good());
  const auto doc = nlohmann::json::parse(in);
  std::vector<Pmf> members;
  for (const auto& m : doc["family"]["members"]) {
    members.push_back(pmf_from_weights(m["w"].get<std::vector<double>>()));
  }
  const std::size_t n = doc["family"]["repeat"].get<std::size_t>();
  const Family f(members);
  long k_max = 0;
  for (std::size_t i = 0; i < n; ++i) k_max += f.member(i).support_max();
  const EfronReport rep = efron_check(f, n, k_max);
  EXPECT_FALSE(rep.all_log_concave);
  EXPECT_FALSE(rep.all_hold);
  const long k = doc["k"].get<long>();
  ASSERT_LT(static_cast<std::size_t>(k), rep.pairs.size());
  const EfronPair& p = rep.pairs[k];
  EXPECT_FALSE(p.holds);
  ASSERT_TRUE(p.certificate.has_value());
  EXPECT_NEAR(p.flow, doc["flow"].get<double>(), 1e-9);
  EXPECT_NEAR(p.certificate->lower_mass, doc["certificate"]["lower_mass"].get<double>(), 1e-9);
  EXPECT_NEAR(p.certificate->upper_mass, doc["certificate"]["upper_mass"].get<double>(), 1e-9);
}

TEST(TiltOrdering, Examples) {
  const Family coin = iid(BaseSpec::bernoulli(0.5));
  EXPECT_TRUE(tilt_ordering_check(coin, 1.0, 2.0, 2, 0.5, OrderingMode::kBothAbove).holds);
  EXPECT_TRUE(tilt_ordering_check(coin, 1.3, 1.3, 2, 0.5, OrderingMode::kBothAbove).holds);
  const Family mixed = make_family(std::vector<BaseSpec>{BaseSpec::bernoulli(0.3), BaseSpec::bernoulli(0.6),
                                                         BaseSpec::bernoulli(0.8)});
  for (double r : {0.5, 1.5, 2.5}) {
    for (auto [a, b] : {std::pair{0.5, 0.9}, std::pair{1.0, 3.0}}) {
      EXPECT_TRUE(tilt_ordering_check(mixed, a, b, 3, r, OrderingMode::kBelowAbove).holds);
    }
  }
  const Family bin = iid(BaseSpec::binomial(3, 0.5));
  for (double r : {1.5, 3.5}) {
    EXPECT_TRUE(tilt_ordering_check(bin, 0.7, 1.4, 3, r, OrderingMode::kBothBelow).holds);
    EXPECT_TRUE(tilt_ordering_check(bin, 0.7, 1.4, 3, r, OrderingMode::kBothAbove).holds);
  }
}
