#include "tilefix/audit.hpp"

#include <vector>

#include "doctest.h"

#include "tilefix/inspect.hpp"
#include "tilefix/level.hpp"

using namespace tilefix;

namespace {

Level training_level() {
  return parse_level(
      "------------\n"
      "------------\n"
      "---<>-------\n"
      "---[]---E---\n"
      "---[]-------\n"
      "XXXXXXXXXXXX");
}

}  // namespace

TEST_CASE("membership labels accept the training level and flag novelties") {
  const Level level = training_level();
  const TrainingSet ts = extract_training_set(std::vector<Level>{level});

  const std::vector<std::uint8_t> clean = wrong_labels_by_membership(level, ts);
  for (const std::uint8_t w : clean) CHECK(w == 0);

  // A stray right-pipe shell in open sky gives its neighbors surroundings
  // never seen in training.
  Level corrupted = level;
  corrupted.set(0, 9, 9);
  const std::vector<std::uint8_t> labels = wrong_labels_by_membership(corrupted, ts);
  int wrong_near = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const int r = 0 + dr;
      const int c = 9 + dc;
      if (!corrupted.in_bounds(r, c)) continue;
      wrong_near += labels[static_cast<std::size_t>(r) * corrupted.width() + c];
    }
  }
  CHECK(wrong_near > 0);

  // The corrupted cell's own surroundings did not change, so its own label
  // is still right: the criterion sees tiles through their neighborhoods.
  CHECK(labels[9] == 0);
}

TEST_CASE("threshold labels mirror level inspection") {
  const Level level = training_level();
  const CNet net = CNet::random_init(8);
  const std::vector<std::uint8_t> labels = wrong_labels_by_cnet(net, level, 0.05);
  const CandidateMap map = inspect_level(net, level, 0.05);
  std::size_t i = 0;
  for (int r = 0; r < level.height(); ++r) {
    for (int c = 0; c < level.width(); ++c, ++i) {
      CHECK((labels[i] != 0) == map.at(r, c).wrong);
    }
  }
}

TEST_CASE("pipe adjacency marks the eight neighbors of a pipe cell") {
  const Level lone = parse_level("---\n-<-\n---");
  const std::vector<std::uint8_t> mask = pipe_adjacent_mask(lone);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const bool is_center = r == 1 && c == 1;
      CHECK(mask[static_cast<std::size_t>(r) * 3 + c] == (is_center ? 0 : 1));
    }
  }

  const Level flat = parse_level("---\n---\nXXX");
  for (const std::uint8_t flag : pipe_adjacent_mask(flat)) CHECK(flag == 0);
}

TEST_CASE("the audit sorts cells into the eight buckets") {
  const Level before(1, 4, 0);
  Level after = before;
  after.set(0, 1, 1);
  const std::vector<std::uint8_t> wrong_before = {1, 1, 0, 0};
  const std::vector<std::uint8_t> wrong_after = {0, 0, 0, 1};

  const RepairAudit audit = audit_repair(before, after, wrong_before, wrong_after);
  CHECK(audit.w_eq_r == 1);  // cell 0: kept, went right
  CHECK(audit.w_to_r == 1);  // cell 1: replaced, went right
  CHECK(audit.r_eq_r == 1);  // cell 2: untouched and fine
  CHECK(audit.r_eq_w == 1);  // cell 3: kept but its neighborhood broke
  CHECK(audit.w_to_w == 0);
  CHECK(audit.r_to_w == 0);
  CHECK(audit.r_to_r == 0);
  CHECK(audit.w_eq_w == 0);
  CHECK(audit.audited == 4);
  CHECK(audit.total() == 4);
  CHECK(audit.wrong_before == 2);
  CHECK(audit.wrong_after == 1);
  REQUIRE(audit.ratio.has_value());
  CHECK(*audit.ratio == 0.5);

  // The wrong-before set is partitioned by the four W-prefixed buckets.
  CHECK(audit.w_to_w + audit.w_to_r + audit.w_eq_w + audit.w_eq_r == audit.wrong_before);
}

TEST_CASE("an unchanged clean pair lands entirely in right-kept") {
  const Level level = training_level();
  const std::vector<std::uint8_t> none(static_cast<std::size_t>(level.cell_count()), 0);
  const RepairAudit audit = audit_repair(level, level, none, none);
  CHECK(audit.r_eq_r == level.cell_count());
  CHECK(audit.total() == level.cell_count());
  CHECK(!audit.ratio.has_value());
}

TEST_CASE("the scope mask limits which cells are audited") {
  const Level level = training_level();
  const std::size_t cells = static_cast<std::size_t>(level.cell_count());
  const std::vector<std::uint8_t> none(cells, 0);
  std::vector<std::uint8_t> scope(cells, 0);
  scope[0] = 1;
  scope[5] = 1;
  scope[17] = 1;
  const RepairAudit audit = audit_repair(level, level, none, none, scope);
  CHECK(audit.audited == 3);
  CHECK(audit.total() == 3);
  CHECK(audit.r_eq_r == 3);
}

TEST_CASE("shape and size mismatches are rejected") {
  const Level a(2, 3, 0);
  const Level b(3, 2, 0);
  const std::vector<std::uint8_t> six(6, 0);
  CHECK_THROWS_AS(audit_repair(a, b, six, six), DimensionMismatch);
  CHECK_THROWS_AS(audit_repair(a, a, six, std::vector<std::uint8_t>(5, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(audit_repair(a, a, six, six, std::vector<std::uint8_t>(7, 0)),
                  std::invalid_argument);
}
