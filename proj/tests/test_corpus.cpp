#include "tilefix/corpus.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <vector>

#include "doctest.h"

#include "tilefix/level.hpp"
#include "tilefix/rng.hpp"

using namespace tilefix;

namespace {

// The pipe-top window sits at (13,1): rows 12..14 read 2,2,5 / 0,6,7 / 0,8,9.
Level pipe_example_level() {
  Level level(16, 3, 2);
  level.set(12, 2, 5);
  level.set(13, 0, 0);
  level.set(13, 1, 6);
  level.set(13, 2, 7);
  level.set(14, 0, 0);
  level.set(14, 1, 8);
  level.set(14, 2, 9);
  level.set(15, 0, 0);
  level.set(15, 1, 0);
  level.set(15, 2, 0);
  return level;
}

}  // namespace

TEST_CASE("extract_training_set keeps every distinct window") {
  const Level ground(3, 3, 0);
  const TrainingSet ts = extract_training_set(std::vector<Level>{ground});

  // Independent oracle: collect the nine windows by hand and de-duplicate.
  std::set<std::uint64_t> distinct;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      distinct.insert(combination_at(ground, r, c).key());
    }
  }
  CHECK(distinct.size() == 9);  // outer padding and heights make all nine unique
  CHECK(ts.size() == 9);
  CHECK(ts.max_level_height == 3);
  for (const Combination& comb : ts.samples) {
    CHECK(ts.contains(comb));
  }
}

TEST_CASE("duplicate levels add nothing") {
  const Level ground(3, 3, 0);
  const TrainingSet once = extract_training_set(std::vector<Level>{ground});
  const TrainingSet twice = extract_training_set(std::vector<Level>{ground, ground});
  CHECK(once.samples.size() == twice.samples.size());
  CHECK(once.index == twice.index);
}

TEST_CASE("input order does not change the extracted set") {
  const Level a = pipe_example_level();
  const Level b(3, 5, 0);
  const Level c = parse_level("o-o\n-E-\nXXX");
  const TrainingSet fwd = extract_training_set(std::vector<Level>{a, b, c});
  const TrainingSet rev = extract_training_set(std::vector<Level>{c, b, a});
  CHECK(fwd.index == rev.index);
  CHECK(fwd.max_level_height == rev.max_level_height);

  std::vector<std::uint64_t> fwd_keys, rev_keys;
  for (const Combination& comb : fwd.samples) fwd_keys.push_back(comb.key());
  for (const Combination& comb : rev.samples) rev_keys.push_back(comb.key());
  std::sort(fwd_keys.begin(), fwd_keys.end());
  std::sort(rev_keys.begin(), rev_keys.end());
  CHECK(fwd_keys == rev_keys);
}

TEST_CASE("a lone tile is surrounded by the periphery") {
  const TrainingSet ts = extract_training_set(std::vector<Level>{Level(1, 1, 0)});
  REQUIRE(ts.size() == 1);
  const Combination& comb = ts.samples.front();
  CHECK(comb.center_height == 0);
  CHECK(comb.center() == 0);
  const SurroundingInfo s = surrounding_of(comb);
  for (const tile_t t : s.neighbors) {
    CHECK(t == kOuterTile);
  }
  CHECK_THROWS_AS(extract_training_set(std::vector<Level>{}), std::invalid_argument);
}

TEST_CASE("legal test set is the sample list itself") {
  const TrainingSet ts = extract_training_set(std::vector<Level>{pipe_example_level()});
  const std::vector<LabeledExample> legal = legal_test_set(ts);
  CHECK(legal.size() == ts.size());
  for (const LabeledExample& e : legal) {
    CHECK(e.legal);
    CHECK(((ts.centers_for(e.surrounding) >> e.center) & 1) == 1);
  }
}

TEST_CASE("illegal test set complements the observed centers") {
  // One sample total: its surrounding has exactly one observed center, so
  // the other ten types are illegal for it.
  const TrainingSet tiny = extract_training_set(std::vector<Level>{Level(1, 1, 0)});
  const std::vector<LabeledExample> illegal = illegal_test_set(tiny);
  CHECK(illegal.size() == 10);
  for (const LabeledExample& e : illegal) {
    CHECK(!e.legal);
    CHECK(e.center != 0);
    CHECK(((tiny.centers_for(e.surrounding) >> e.center) & 1) == 0);
  }

  // Per surrounding, legal and illegal centers partition the 11 types.
  const TrainingSet ts = extract_training_set(std::vector<Level>{pipe_example_level()});
  const std::vector<LabeledExample> bad = illegal_test_set(ts);
  for (const auto& [key, mask] : ts.index) {
    int illegal_here = 0;
    for (const LabeledExample& e : bad) {
      if (e.surrounding.key() == key) ++illegal_here;
    }
    CHECK(illegal_here + std::popcount(mask) == kTileCount);
  }
}

TEST_CASE("the pipe-top surrounding rejects a ground center") {
  const TrainingSet ts = extract_training_set(std::vector<Level>{pipe_example_level()});
  Combination seen;
  seen.center_height = 13;
  seen.types = {2, 2, 5, 0, 6, 7, 0, 8, 9};
  CHECK(ts.contains(seen));

  Combination unseen = seen;
  unseen.types[4] = 0;  // same surroundings, ground in the middle of a pipe top
  CHECK(!ts.contains(unseen));

  const std::vector<LabeledExample> illegal = illegal_test_set(ts);
  const bool found = std::any_of(illegal.begin(), illegal.end(), [&](const LabeledExample& e) {
    return e.surrounding == surrounding_of(unseen) && e.center == 0;
  });
  CHECK(found);
}

TEST_CASE("faked surroundings differ in exactly k slots") {
  const TrainingSet ts = extract_training_set(std::vector<Level>{pipe_example_level()});
  const SurroundingInfo s = surrounding_of(ts.samples.front());
  for (int k = 1; k <= 8; ++k) {
    Rng rng(static_cast<std::uint64_t>(100 + k));
    for (int trial = 0; trial < 50; ++trial) {
      const SurroundingInfo fake = fake_surroundings(s, k, rng);
      CHECK(fake.center_height == s.center_height);
      int distance = 0;
      for (int i = 0; i < 8; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        if (fake.neighbors[ui] != s.neighbors[ui]) {
          ++distance;
          CHECK(is_concrete(fake.neighbors[ui]));
        }
      }
      CHECK(distance == k);
    }
  }

  Rng rng(5);
  CHECK_THROWS_AS(fake_surroundings(s, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(fake_surroundings(s, 9, rng), std::invalid_argument);

  Rng r1(42), r2(42);
  CHECK(fake_surroundings(s, 3, r1) == fake_surroundings(s, 3, r2));
}

TEST_CASE("faking an outer slot yields a concrete type") {
  SurroundingInfo s;
  s.center_height = 0;
  s.neighbors.fill(kOuterTile);
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const SurroundingInfo fake = fake_surroundings(s, 8, rng);
    for (const tile_t t : fake.neighbors) {
      CHECK(is_concrete(t));
    }
  }
}

TEST_CASE("destroy_level changes exactly count cells") {
  const Level level = pipe_example_level();
  for (const int count : {1, 4, 11, level.cell_count()}) {
    Rng rng(static_cast<std::uint64_t>(count));
    const Level broken = destroy_level(level, count, rng);
    int changed = 0;
    for (int r = 0; r < level.height(); ++r) {
      for (int c = 0; c < level.width(); ++c) {
        if (broken.at(r, c) != level.at(r, c)) {
          ++changed;
          CHECK(is_concrete(broken.at(r, c)));
        }
      }
    }
    CHECK(changed == count);
  }

  Rng rng(3);
  CHECK_THROWS_AS(destroy_level(level, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(destroy_level(level, level.cell_count() + 1, rng), std::invalid_argument);

  Rng r1(77), r2(77);
  CHECK(destroy_level(level, 5, r1) == destroy_level(level, 5, r2));
}

TEST_CASE("training dump round trips") {
  const TrainingSet ts =
      extract_training_set(std::vector<Level>{pipe_example_level(), Level(3, 4, 0)});
  const std::string dump = dump_training_set(ts);
  const TrainingSet back = parse_training_dump(dump);
  CHECK(back.index == ts.index);
  CHECK(back.max_level_height == ts.max_level_height);
  REQUIRE(back.samples.size() == ts.samples.size());
  for (std::size_t i = 0; i < ts.samples.size(); ++i) {
    CHECK(back.samples[i].key() == ts.samples[i].key());
  }
}
