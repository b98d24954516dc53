#include "tilefix/inspect.hpp"

#include <vector>

#include "doctest.h"

#include "tilefix/cnet.hpp"
#include "tilefix/level.hpp"
#include "tilefix/rng.hpp"

using namespace tilefix;

namespace {

Level playground() {
  return parse_level(
      "--------\n"
      "---<>---\n"
      "---[]-E-\n"
      "XXXXXXXX");
}

void check_matches_full_inspection(const InspectedLevel& state, TileEvaluator& eval) {
  const CandidateMap fresh = inspect_level(eval, state.level());
  int wrong = 0;
  for (int r = 0; r < state.level().height(); ++r) {
    for (int c = 0; c < state.level().width(); ++c) {
      CHECK(state.candidates(r, c) == fresh.at(r, c).candidates);
      CHECK(state.wrong(r, c) == fresh.at(r, c).wrong);
      CHECK(state.unstable(r, c) == fresh.at(r, c).unstable);
      wrong += fresh.at(r, c).wrong ? 1 : 0;
    }
  }
  CHECK(state.wrong_count() == wrong);
  CHECK(state.unstable_value() == unstable_value(fresh));
}

}  // namespace

TEST_CASE("evaluator memoizes without changing answers") {
  const CNet net = CNet::random_init(2);
  const Level level = playground();
  TileEvaluator eval(net, level.height(), 0.05);

  const SurroundingInfo s = surrounding_at(level, 1, 4);
  const auto direct = forward(net, encode_for_net(net, s, level.height()));
  CHECK(eval.probs(s) == direct);
  CHECK(eval.probs(s) == direct);  // served from cache

  CHECK_THROWS_AS(TileEvaluator(net, level.height(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TileEvaluator(net, level.height(), 1.0), std::invalid_argument);
}

TEST_CASE("both inspect_level overloads agree") {
  const CNet net = CNet::random_init(4);
  const Level level = playground();
  TileEvaluator eval(net, level.height(), 0.05);
  const CandidateMap a = inspect_level(net, level, 0.05);
  const CandidateMap b = inspect_level(eval, level);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].candidates == b.cells[i].candidates);
    CHECK(a.cells[i].wrong == b.cells[i].wrong);
    CHECK(a.cells[i].unstable == b.cells[i].unstable);
    CHECK(a.cells[i].probs == b.cells[i].probs);
  }
}

TEST_CASE("tile writes update exactly the affected neighborhood") {
  const CNet net = CNet::random_init(6);
  const Level level = playground();
  TileEvaluator eval(net, level.height(), 0.05);

  InspectedLevel state(eval, level);
  check_matches_full_inspection(state, eval);

  Rng rng(17);
  for (int step = 0; step < 60; ++step) {
    const int r = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(level.height())));
    const int c = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(level.width())));
    const auto t = static_cast<tile_t>(rng.uniform_index(kTileCount));
    state.set_tile(r, c, t);
    CHECK(state.level().at(r, c) == t);
    check_matches_full_inspection(state, eval);
  }
}

TEST_CASE("writing the current value back is a no-op") {
  const CNet net = CNet::random_init(8);
  const Level level = playground();
  TileEvaluator eval(net, level.height(), 0.05);
  InspectedLevel state(eval, level);

  const int wrong = state.wrong_count();
  const int uv = state.unstable_value();
  state.set_tile(2, 3, level.at(2, 3));
  CHECK(state.level() == level);
  CHECK(state.wrong_count() == wrong);
  CHECK(state.unstable_value() == uv);
}

TEST_CASE("independent copies diverge independently") {
  const CNet net = CNet::random_init(10);
  const Level level = playground();
  TileEvaluator eval(net, level.height(), 0.05);
  InspectedLevel base(eval, level);

  InspectedLevel fork = base;
  fork.set_tile(1, 3, 0);
  CHECK(base.level() == level);
  CHECK(fork.level().at(1, 3) == 0);
  check_matches_full_inspection(base, eval);
  check_matches_full_inspection(fork, eval);
}
