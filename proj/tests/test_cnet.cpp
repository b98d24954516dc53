#include "tilefix/cnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "tilefix/inspect.hpp"
#include "tilefix/level.hpp"
#include "tilefix/rng.hpp"

using namespace tilefix;

namespace {

SurroundingInfo random_surrounding(Rng& rng, int level_height) {
  SurroundingInfo s;
  s.center_height = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(level_height)));
  for (auto& t : s.neighbors) {
    t = static_cast<tile_t>(rng.uniform_index(kChannelCount));  // concrete or outer
  }
  return s;
}

}  // namespace

TEST_CASE("input encoding is one-hot per slot plus a height scalar") {
  SurroundingInfo empty;
  empty.center_height = 0;
  empty.neighbors.fill(2);
  const auto dense = encode_input(empty, 14).to_dense();
  double total = 0.0;
  for (int slot = 0; slot < 8; ++slot) {
    double slot_sum = 0.0;
    for (int ch = 0; ch < kChannelCount; ++ch) {
      slot_sum += dense[static_cast<std::size_t>(slot * kChannelCount + ch)];
    }
    CHECK(slot_sum == 1.0);
    CHECK(dense[static_cast<std::size_t>(slot * kChannelCount + 2)] == 1.0);
    total += slot_sum;
  }
  CHECK(total == 8.0);
  CHECK(dense[kInputDim - 1] == 0.0);

  // The worked pipe-top surrounding sits on the bottom row of a 14-row
  // level, so its normalized height is exactly 1.
  SurroundingInfo pipe_top;
  pipe_top.center_height = 13;
  pipe_top.neighbors = {2, 2, 5, 0, 7, 0, 8, 9};
  CHECK(encode_input(pipe_top, 14).height_value == 1.0);
  CHECK(encode_input(pipe_top, 14, false).height_value == 13.0);

  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const SurroundingInfo s = random_surrounding(rng, 20);
    const auto x = encode_input(s, 20).to_dense();
    double ones = 0.0;
    for (int i = 0; i < kInputDim - 1; ++i) ones += x[static_cast<std::size_t>(i)];
    CHECK(ones == 8.0);
    CHECK(x[kInputDim - 1] >= 0.0);
    CHECK(x[kInputDim - 1] <= 1.0);
  }

  CHECK_THROWS_AS(encode_input(empty, 0), std::invalid_argument);
}

TEST_CASE("zero weights give the uniform distribution") {
  const CNet net = CNet::zero_init();
  SurroundingInfo s;
  s.center_height = 3;
  s.neighbors.fill(0);
  const auto probs = forward(net, encode_input(s, 10));
  for (const double p : probs) {
    CHECK(p == doctest::Approx(1.0 / 11).epsilon(1e-12));
  }
}

TEST_CASE("forward outputs are positive and normalized") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const CNet net = CNet::random_init(rng.next_u64());
    const SurroundingInfo s = random_surrounding(rng, 14);
    const auto probs = forward(net, encode_input(s, 14));
    double sum = 0.0;
    for (const double p : probs) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
}

TEST_CASE("analytic gradients agree with finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const CNet net = CNet::random_init(rng.next_u64());
    const SurroundingInfo s = random_surrounding(rng, 14);
    const auto label = static_cast<tile_t>(rng.uniform_index(kTileCount));
    CHECK(gradient_check(net, encode_input(s, 14), label) <= 1e-4);
  }

  const CNet zero = CNet::zero_init();
  SurroundingInfo s;
  s.center_height = 1;
  s.neighbors.fill(4);
  CHECK(gradient_check(zero, encode_input(s, 4), 4) <= 1e-4);
}

TEST_CASE("a corrupted gradient is caught by the finite-difference check") {
  const CNet net = CNet::random_init(123);
  SurroundingInfo s;
  s.center_height = 2;
  s.neighbors = {0, 1, 2, 3, 4, 5, 6, 7};
  const EncodedInput x = encode_input(s, 5);
  Gradients g = backprop(net, x, 3);
  CHECK(gradient_error_vs_fd(net, x, 3, g) <= 1e-4);
  g.w2[0] += 0.1;
  CHECK(gradient_error_vs_fd(net, x, 3, g) >= 1e-2);
}

TEST_CASE("a single example is memorized") {
  // Lone top-left pipe tile: one training sample with center type 6.
  const TrainingSet ts = extract_training_set(std::vector<Level>{Level(1, 1, 6)});
  REQUIRE(ts.size() == 1);

  CNet net = CNet::random_init(5);
  TrainingConfig config;
  config.epochs = 1000;
  config.learning_rate = 0.05;
  config.seed = 5;
  const TrainingReport report = train(net, ts, config);

  const SurroundingInfo s = surrounding_of(ts.samples.front());
  const auto probs = forward(net, encode_for_net(net, s, 1));
  CHECK(probs[6] > 0.99);
  CHECK(report.final_accuracy == 1.0);
  CHECK(report.mean_loss.back() < report.mean_loss.front());

  // With the mass piled on one type, the default threshold keeps only it.
  const std::vector<tile_t> candidates = candidate_types(net, s, 1, 0.05);
  CHECK(candidates == std::vector<tile_t>{6});
  const CandidateMap map = inspect_level(net, Level(1, 1, 6), 0.05);
  CHECK(!map.at(0, 0).wrong);
  CHECK(unstable_value(map) == 0);
}

TEST_CASE("training is deterministic and rejects bad configs") {
  const TrainingSet ts = extract_training_set(std::vector<Level>{Level(2, 3, 0)});

  CNet a = CNet::random_init(11);
  CNet b = CNet::random_init(11);
  TrainingConfig config;
  config.epochs = 20;
  config.seed = 11;
  const TrainingReport ra = train(a, ts, config);
  const TrainingReport rb = train(b, ts, config);
  CHECK(ra.mean_loss == rb.mean_loss);
  CHECK(ra.accuracy == rb.accuracy);
  CHECK(save_model(a) == save_model(b));

  CNet c = CNet::random_init(11);
  TrainingConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(train(c, ts, bad), std::invalid_argument);
  CHECK_THROWS_AS(train(c, TrainingSet{}, config), std::invalid_argument);
}

TEST_CASE("divergence is surfaced, not swallowed") {
  const TrainingSet ts = extract_training_set(std::vector<Level>{Level(3, 3, 0)});
  CNet net = CNet::random_init(3);
  TrainingConfig config;
  config.epochs = 50;
  // Large enough that the weight updates themselves overflow; the saturating
  // loss alone stays finite for any finite weights.
  config.learning_rate = std::numeric_limits<double>::max();
  config.seed = 3;
  CHECK_THROWS_AS(train(net, ts, config), std::runtime_error);
}

TEST_CASE("threshold filtering matches the defining inequality") {
  const CNet zero = CNet::zero_init();
  SurroundingInfo s;
  s.center_height = 0;
  s.neighbors.fill(2);
  // Uniform 1/11 ~ 0.0909 clears 0.05 for every type and fails 0.95 for all.
  CHECK(candidate_types(zero, s, 1, 0.05).size() == 11);
  CHECK(candidate_types(zero, s, 1, 0.95).empty());

  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const CNet net = CNet::random_init(rng.next_u64());
    const SurroundingInfo probe = random_surrounding(rng, 14);
    const auto probs = forward(net, encode_for_net(net, probe, 14));
    const double theta = 0.01 + 0.9 * rng.uniform_real();
    const std::vector<tile_t> cand = candidate_types(net, probe, 14, theta);
    for (int t = 0; t < kTileCount; ++t) {
      const bool in = std::find(cand.begin(), cand.end(), static_cast<tile_t>(t)) != cand.end();
      CHECK(in == (probs[static_cast<std::size_t>(t)] >= theta));
    }
  }
}

TEST_CASE("inspection flags follow the candidate sets") {
  Rng rng(31);
  const Level level = parse_level("--<>--\n--[]--\nXXXXXX");
  for (int trial = 0; trial < 10; ++trial) {
    const CNet net = CNet::random_init(rng.next_u64());
    const double theta = 0.02 + 0.2 * rng.uniform_real();
    const CandidateMap map = inspect_level(net, level, theta);
    CHECK(map.theta == theta);
    for (int r = 0; r < level.height(); ++r) {
      for (int c = 0; c < level.width(); ++c) {
        const CellAssessment& cell = map.at(r, c);
        const tile_t current = level.at(r, c);
        CHECK(cell.wrong == (cell.probs[current] < theta));
        CHECK(cell.wrong == (((cell.candidates >> current) & 1) == 0));
        CHECK(cell.unstable == (std::popcount(cell.candidates) >= 2));
      }
    }
  }
}

TEST_CASE("unstable value sums candidate counts over unstable cells only") {
  CandidateMap map;
  map.height = 1;
  map.width = 3;
  map.theta = 0.05;
  map.cells.resize(3);
  map.cells[0].candidates = 0b0000000000111;  // three candidates
  map.cells[1].candidates = 0b0000000000001;  // stable
  map.cells[2].candidates = 0b0000001100000;  // two candidates
  map.cells[0].unstable = true;
  map.cells[2].unstable = true;
  CHECK(unstable_value(map) == 5);

  map.cells[0].candidates = 0b1;
  map.cells[0].unstable = false;
  map.cells[2].candidates = 0b0;
  map.cells[2].unstable = false;
  CHECK(unstable_value(map) == 0);
}

TEST_CASE("model files round trip exactly") {
  CNet net = CNet::random_init(77);
  net.trained_level_height = 14;
  const std::vector<std::uint8_t> bytes = save_model(net);
  const CNet back = load_model(bytes);
  CHECK(back.normalize_height == net.normalize_height);
  CHECK(back.trained_level_height == net.trained_level_height);
  CHECK(back.rng_seed == net.rng_seed);

  Rng rng(78);
  for (int trial = 0; trial < 25; ++trial) {
    const SurroundingInfo s = random_surrounding(rng, 14);
    const EncodedInput x = encode_input(s, 14);
    CHECK(forward(net, x) == forward(back, x));
  }

  std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 9);
  try {
    load_model(truncated);
    FAIL("expected ModelIoError");
  } catch (const ModelIoError& e) {
    CHECK(e.kind == ModelIoError::Kind::CorruptModel);
  }

  std::vector<std::uint8_t> wrong_version = bytes;
  wrong_version[4] = 9;
  try {
    load_model(wrong_version);
    FAIL("expected ModelIoError");
  } catch (const ModelIoError& e) {
    CHECK(e.kind == ModelIoError::Kind::FormatVersionMismatch);
  }

  std::vector<std::uint8_t> padded = bytes;
  padded.push_back(0);
  CHECK_THROWS_AS(load_model(padded), ModelIoError);
}
