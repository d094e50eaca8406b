#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace mlbm;
using mlbm::testing::traversal_problems;

TEST(Prism, BlockCountFor4x16x16) {
  const PrismCursor cursor({4, 16, 16}, 4, {1, 4});
  const auto blocks = cursor.blocks();
  EXPECT_EQ(blocks.size(), 30u);
  int last_z = 0;
  for (const auto& b : blocks) last_z = std::max(last_z, b.z);
  EXPECT_EQ(last_z, 21);
  EXPECT_EQ(cursor.enumerate().size(), 1024u);
}

TEST(Prism, UnitTileIsLexicographic) {
  const DomainSpec s{3, 4, 5};
  const auto order = PrismCursor(s, 1, {1, 3}).enumerate();
  std::size_t n = 0;
  for (int x = 1; x <= s.lx; ++x)
    for (int y = 1; y <= s.ly; ++y)
      for (int z = 1; z <= s.lz; ++z) EXPECT_EQ(order.at(n++), (CellCoord{x, y, z}));
}

TEST(Prism, HandEnumeratedBlocks) {
  const PrismCursor cursor({1, 4, 4}, 2, {1, 1});
  EXPECT_EQ(cursor.cells({1, 1, 1}), (std::vector<CellCoord>{{1, 1, 1}, {1, 1, 2}, {1, 2, 1}}));
  EXPECT_EQ(cursor.cells({1, 1, 5}), (std::vector<CellCoord>{{1, 2, 4}}));
}

TEST(Prism, WholeDomainTileIsAscending) {
  const DomainSpec s{4, 3, 5};
  const PrismCursor cursor(s, s.lx + s.ly + s.lz, {1, s.lx});
  int nonempty = 0;
  for (const auto& b : cursor.blocks()) nonempty += !cursor.cells(b).empty();
  EXPECT_EQ(nonempty, 1);
  const auto order = cursor.enumerate();
  EXPECT_TRUE(std::is_sorted(order.begin(), order.end()));
  EXPECT_EQ(order.size(), s.cells());
}

TEST(Prism, CoversEveryCellOnceAndRespectsDependencies) {
  for (int tile = 1; tile <= 8; ++tile)
    for (DomainSpec s : {DomainSpec{4, 16, 16}, DomainSpec{7, 5, 9}, DomainSpec{16, 16, 16}, DomainSpec{3, 3, 3}}) {
      const PrismCursor cursor(s, tile, {1, s.lx});
      const auto problems = traversal_problems(cursor);
      EXPECT_TRUE(problems.empty()) << "tile " << tile << ": " << problems.front();
    }
}

TEST(Prism, PartialXRangeAndBulkWindow) {
  const DomainSpec s{9, 8, 7};
  EXPECT_TRUE(traversal_problems(PrismCursor(s, 3, {4, 6})).empty());
  const PrismCursor bulk(s, 3, {2, 8}, {2, 7}, {2, 6});
  auto order = bulk.enumerate();
  EXPECT_EQ(order.size(), 7u * 6u * 5u);
  std::sort(order.begin(), order.end());
  EXPECT_EQ(std::adjacent_find(order.begin(), order.end()), order.end());
  for (const CellCoord& c : order) EXPECT_FALSE(s.on_boundary(c.x, c.y, c.z));
}

TEST(Prism, RandomizedCursors) {
  std::mt19937 rng(2024);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int n = 0; n < 50; ++n) {
    const DomainSpec s{pick(1, 12), pick(1, 12), pick(1, 12)};
    const int a = pick(1, s.lx), b = pick(1, s.lx);
    const PrismCursor cursor(s, pick(1, 8), {std::min(a, b), std::max(a, b)});
    const auto problems = traversal_problems(cursor);
    EXPECT_TRUE(problems.empty()) << problems.front();
  }
}

TEST(Prism, RejectsBadArguments) {
  const DomainSpec s{4, 4, 4};
  EXPECT_THROW(PrismCursor(s, 0, {1, 4}), std::invalid_argument);
  EXPECT_THROW(PrismCursor(s, 2, {0, 4}), std::invalid_argument);
  EXPECT_THROW(PrismCursor(s, 2, {3, 2}), std::invalid_argument);
  EXPECT_THROW(PrismCursor(s, 2, {1, 5}), std::invalid_argument);
}
