#include <gtest/gtest.h>

#include "tcherry/learner.hpp"
#include "tcherry/scoring.hpp"
#include "tcherry/synthetic.hpp"

using namespace tcherry;

TEST(Synthetic, FactorizesOverGroundTruth) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int d = 3 + static_cast<int>(seed % 5);
    const int k = 2 + static_cast<int>(seed % 2);
    std::vector<int> cards(static_cast<std::size_t>(d), 2);
    cards[seed % cards.size()] = 3;
    const auto m = generate_tcherry_distribution(seed, d, k, cards, {2.5, 0.9});
    EXPECT_TRUE(m.tree.covers(full_index_set(d)));
    EXPECT_NEAR(kl_exact(m.table, m.tree), 0.0, 1e-10);
    EXPECT_NEAR(tree_weight(m.table, m.tree).kl, 0.0, 1e-10);
  }
}

TEST(Synthetic, PerVariableCardinalities) {
  const auto m = generate_tcherry_distribution(3, 4, 2, {2, 3, 4, 2}, {});
  EXPECT_EQ(m.table.cardinality(3), 4);
  EXPECT_EQ(m.table.cell_count(), 48u);
}

TEST(Synthetic, StrengthZeroIsIndependence) {
  const auto m = generate_tcherry_distribution(8, 5, 3, {3}, {0.0, 1.0});
  for (const auto& c : enumerate_candidates(m.table, 3)) EXPECT_NEAR(c.w, 0.0, 1e-12);
  EXPECT_NEAR(information_content(m.table, m.table.variables()), 0.0, 1e-12);
}

TEST(Synthetic, SameSeedSameModel) {
  const auto a = generate_tcherry_distribution(42, 6, 3, {2}, {});
  const auto b = generate_tcherry_distribution(42, 6, 3, {2}, {});
  const auto c = generate_tcherry_distribution(43, 6, 3, {2}, {});
  EXPECT_EQ(a.tree.clusters(), b.tree.clusters());
  EXPECT_TRUE(std::equal(a.table.probs().begin(), a.table.probs().end(), b.table.probs().begin()));
  EXPECT_FALSE(std::equal(a.table.probs().begin(), a.table.probs().end(), c.table.probs().begin()));
}

TEST(Synthetic, Errors) {
  EXPECT_THROW(generate_tcherry_distribution(1, 3, 4, {2}, {}), DomainError);
  EXPECT_THROW(generate_tcherry_distribution(1, 4, 2, {2, 2}, {}), DomainError);
  EXPECT_THROW(generate_tcherry_distribution(1, 4, 2, {2}, {-1.0, 1.0}), DomainError);
  EXPECT_THROW(generate_tcherry_distribution(1, 40, 3, {2}, {}), ResourceError);
}

TEST(Synthetic, StrengthSchedule) {
  const StrengthSchedule s{4.0, 0.5};
  EXPECT_DOUBLE_EQ(s.at(0), 4.0);
  EXPECT_DOUBLE_EQ(s.at(3), 0.5);
}
