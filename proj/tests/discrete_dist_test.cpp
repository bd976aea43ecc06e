#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tcherry/discrete_dist.hpp"
#include "test_support.hpp"

using namespace tcherry;
using tcherry::testing::lizard_table;
using tcherry::testing::naive_entropy;
using tcherry::testing::naive_information;
using tcherry::testing::naive_marginal;
using tcherry::testing::random_cards;
using tcherry::testing::random_table;

TEST(DiscreteDist, LizardTotalCount) {
  const auto p = lizard_table();
  ASSERT_TRUE(p.total_count());
  EXPECT_DOUBLE_EQ(*p.total_count(), 564.0);
  EXPECT_EQ(p.dims(), 5);
  EXPECT_EQ(p.cell_count(), 48u);
}

TEST(DiscreteDist, LizardEntropies) {
  const auto p = lizard_table();
  EXPECT_NEAR(entropy(p), 4.64164, 1e-5);
  EXPECT_NEAR(entropy(p, IndexSet{1, 2, 3, 5}), 3.288813, 1e-6);
  EXPECT_NEAR(entropy(p, IndexSet{1, 3, 4, 5}), 3.743757, 1e-6);
  EXPECT_NEAR(entropy(p, IndexSet{1, 3, 5}), 2.368490, 1e-6);
}

TEST(DiscreteDist, LizardInformation) {
  const auto p = lizard_table();
  EXPECT_NEAR(information_content(p, IndexSet{1, 3, 4, 5}), 0.129381, 1e-6);
  EXPECT_NEAR(information_content(p, IndexSet{1, 3, 5}), 0.045701, 1e-6);
  EXPECT_NEAR(information_content(p, p.variables()), 0.19519, 1e-5);
  EXPECT_DOUBLE_EQ(information_content(p, IndexSet{2}), 0.0);
}

TEST(DiscreteDist, UniformEntropy) {
  const std::vector<double> u(8, 1.0 / 8);
  JointTable p(make_scheme({2, 2, 2}), u);
  EXPECT_NEAR(entropy(p), 3.0, 1e-12);
  EXPECT_NEAR(information_content(p, p.variables()), 0.0, 1e-12);
}

TEST(DiscreteDist, PointMassHasZeroEntropy) {
  std::vector<double> q(6, 0.0);
  q[4] = 1.0;
  JointTable p(make_scheme({2, 3}), q);
  EXPECT_EQ(entropy(p), 0.0);
  EXPECT_EQ(entropy(p, IndexSet{2}), 0.0);
}

TEST(DiscreteDist, MarginalsMatchOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_table(rng, random_cards(rng, 4, 3), 0.2);
    for (const auto& a : {IndexSet{1}, IndexSet{2, 4}, IndexSet{1, 3, 4}, IndexSet{1, 2, 3, 4}}) {
      const auto m = marginalize(p, a);
      const auto oracle = naive_marginal(p, a);
      ASSERT_EQ(m.probs.size(), oracle.size());
      std::size_t i = 0;
      for (const auto& [key, q] : oracle) EXPECT_NEAR(m.probs[i++], q, 1e-14);
      EXPECT_NEAR(entropy(p, a), naive_entropy(p, a), 1e-12);
      EXPECT_NEAR(information_content(p, a), naive_information(p, a), 1e-12);
    }
  }
}

TEST(DiscreteDist, MarginalizationComposes) {
  std::mt19937_64 rng(5);
  const auto p = random_table(rng, {2, 3, 2, 4});
  const auto outer = marginalize(p, IndexSet{1, 2, 4});
  // marginalize the marginal down to {2,4} by summing out its first axis
  std::vector<double> inner(outer.probs.size() / 2, 0.0);
  for (std::size_t i = 0; i < outer.probs.size(); ++i) inner[i % inner.size()] += outer.probs[i];
  const auto direct = marginalize(p, IndexSet{2, 4});
  ASSERT_EQ(direct.probs.size(), inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) EXPECT_NEAR(direct.probs[i], inner[i], 1e-15);
}

TEST(DiscreteDist, ChainRuleLemma) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_table(rng, random_cards(rng, 5, 3), 0.1);
    const IndexSet g{1, 3, 5};
    for (int t : {2, 4}) {
      const double lhs = conditional_entropy(p, t, g);
      const double rhs = entropy(p, IndexSet{t}) -
                         (information_content(p, g.with(t)) - information_content(p, g));
      EXPECT_NEAR(lhs, rhs, 1e-10);
    }
  }
}

TEST(DiscreteDist, EntropyIsMonotone) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_table(rng, random_cards(rng, 5, 3), 0.3);
    IndexSet a{2};
    for (int v : {4, 1, 5, 3}) {
      const IndexSet b = a.with(v);
      EXPECT_GE(entropy(p, b) + 1e-12, entropy(p, a));
      EXPECT_GE(information_content(p, b) + 1e-12, information_content(p, a));
      a = b;
    }
  }
}

TEST(DiscreteDist, ConditionalEntropyEdgeCases) {
  const auto p = lizard_table();
  EXPECT_NEAR(conditional_entropy(p, 3, IndexSet{}), entropy(p, IndexSet{3}), 1e-14);
  EXPECT_THROW(conditional_entropy(p, 3, IndexSet{1, 3}), DomainError);
}

TEST(DiscreteDist, SmoothingAddsPseudoCounts) {
  const std::vector<CountCell> cells{{{1, 1}, 3}, {{2, 2}, 1}};
  const auto p = from_counts(cells, make_scheme({2, 2}), {.smoothing = 1.0});
  EXPECT_NEAR(p(std::vector<int>{1, 1}), 4.0 / 8.0, 1e-15);
  EXPECT_NEAR(p(std::vector<int>{1, 2}), 1.0 / 8.0, 1e-15);
  EXPECT_NEAR(p(std::vector<int>{2, 2}), 2.0 / 8.0, 1e-15);
}

TEST(DiscreteDist, DuplicateCellsAccumulate) {
  const std::vector<CountCell> cells{{{1, 2}, 2}, {{1, 2}, 2}};
  const auto p = from_counts(cells, make_scheme({2, 2}));
  EXPECT_DOUBLE_EQ(p(std::vector<int>{1, 2}), 1.0);
}

TEST(DiscreteDist, CellLayoutRoundTrips) {
  JointTable p(make_scheme({2, 3, 2}), std::vector<double>(12, 1.0 / 12));
  for (std::size_t cell = 0; cell < p.cell_count(); ++cell) {
    EXPECT_EQ(p.cell_index(p.cell_states(cell)), cell);
  }
  EXPECT_EQ(p.cell_index(std::vector<int>{1, 1, 2}), 1u);
  EXPECT_EQ(p.cell_index(std::vector<int>{2, 1, 1}), 6u);
}

TEST(DiscreteDist, Errors) {
  const auto scheme = make_scheme({2, 2});
  EXPECT_THROW(JointTable(scheme, {0.5, 0.5, 0.5, -0.5}), DomainError);
  EXPECT_THROW(JointTable(scheme, {0.5, 0.5, 0.5, 0.5}), DomainError);
  EXPECT_THROW(JointTable(scheme, {1.0}), DomainError);
  EXPECT_THROW(JointTable(make_scheme({2, 1}), {0.5, 0.5}), DomainError);
  EXPECT_THROW(from_counts(std::vector<CountCell>{{{1, 3}, 1}}, scheme), DomainError);
  EXPECT_THROW(from_counts(std::vector<CountCell>{{{1, 1}, 0}}, scheme), EmptyDataError);
  EXPECT_THROW(from_counts(std::vector<CountCell>{}, scheme), EmptyDataError);
  EXPECT_THROW(validate_scheme(make_scheme({10, 10, 10}), 999), ResourceError);
  const auto p = lizard_table();
  EXPECT_THROW(entropy(p, IndexSet{0, 1}), DomainError);
  EXPECT_THROW(entropy(p, IndexSet{6}), DomainError);
}

TEST(DiscreteDist, CacheAgreesWithDirectComputation) {
  const auto p = lizard_table();
  InformationCache cache(p);
  for (const auto& s : k_subsets(p.variables(), 3)) {
    EXPECT_DOUBLE_EQ(cache.entropy(s), entropy(p, s));
    EXPECT_DOUBLE_EQ(cache.information(s), information_content(p, s));
    EXPECT_DOUBLE_EQ(cache.information(s), information_content(p, s));
  }
}

TEST(IndexSetTest, Basics) {
  const IndexSet a{4, 1, 3, 1};
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a.to_string(), "{1,3,4}");
  EXPECT_EQ(a.to_spaced(), "1 3 4");
  EXPECT_TRUE(IndexSet({1, 4}).is_subset_of(a));
  EXPECT_EQ(set_union(a, IndexSet{2}), (IndexSet{1, 2, 3, 4}));
  EXPECT_EQ(set_difference(a, IndexSet{3}), (IndexSet{1, 4}));
  EXPECT_EQ(k_subsets(full_index_set(5), 3).size(), 10u);
  EXPECT_EQ(binomial(6, 2), 15u);
  EXPECT_LT((IndexSet{1, 2, 5}), (IndexSet{1, 3}));
}
