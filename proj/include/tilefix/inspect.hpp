#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tilefix/cnet.hpp"
#include "tilefix/level.hpp"

namespace tilefix {

inline std::uint16_t candidate_mask(const std::array<double, kOutputDim>& probs, double theta) {
  std::uint16_t mask = 0;
  for (int t = 0; t < kOutputDim; ++t) {
    if (probs[static_cast<std::size_t>(t)] >= theta) {
      mask |= static_cast<std::uint16_t>(1u << t);
    }
  }
  return mask;
}

struct CellAssessment {
  std::array<double, kOutputDim> probs{};
  std::uint16_t candidates = 0;
  bool wrong = false;     // current type's probability fell below theta
  bool unstable = false;  // two or more candidate types
};

struct CandidateMap {
  int height = 0;
  int width = 0;
  double theta = 0.0;
  std::vector<CellAssessment> cells;

  const CellAssessment& at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * width + col];
  }
};

// Forward-pass memoizer. Inputs are discrete (8 neighbor types + row), so the
// distribution for a surrounding is computed once per run and reused across
// every level and candidate scheme sharing this evaluator. Not synchronized.
class TileEvaluator {
 public:
  TileEvaluator(const CNet& net, int level_height, double theta);

  const std::array<double, kOutputDim>& probs(const SurroundingInfo& s);
  std::uint16_t candidates(const SurroundingInfo& s);

  const CNet& net() const { return *net_; }
  double theta() const { return theta_; }
  int level_height() const { return level_height_; }

 private:
  const CNet* net_;
  int level_height_;
  double theta_;
  std::unordered_map<std::uint64_t, std::array<double, kOutputDim>> cache_;
};

// Types whose probability for this surrounding clears theta.
std::vector<tile_t> candidate_types(const CNet& net, const SurroundingInfo& s, int level_height,
                                    double theta);

CandidateMap inspect_level(const CNet& net, const Level& level, double theta);
CandidateMap inspect_level(TileEvaluator& eval, const Level& level);

// Sum of candidate-set sizes over cells with two or more candidates.
int unstable_value(const CandidateMap& cm);

// A level plus its per-cell candidate masks, with single-tile writes updating
// only the neighbors whose windows contain the edited cell. Wrong-tile count
// and unstable value are maintained incrementally and match a from-scratch
// inspection at all times.
class InspectedLevel {
 public:
  InspectedLevel(TileEvaluator& eval, Level level);

  const Level& level() const { return level_; }
  std::uint16_t candidates(int row, int col) const {
    return masks_[static_cast<std::size_t>(row) * level_.width() + col];
  }
  bool wrong(int row, int col) const {
    return !((candidates(row, col) >> level_.at(row, col)) & 1);
  }
  bool unstable(int row, int col) const { return std::popcount(candidates(row, col)) >= 2; }

  int wrong_count() const { return wrong_count_; }
  int unstable_value() const { return unstable_value_; }

  void set_tile(int row, int col, tile_t t);

 private:
  int wrong_contribution(int row, int col) const { return wrong(row, col) ? 1 : 0; }
  int uv_contribution(int row, int col) const {
    const int n = std::popcount(candidates(row, col));
    return n >= 2 ? n : 0;
  }
  void recompute_mask(int row, int col);

  TileEvaluator* eval_;
  Level level_;
  std::vector<std::uint16_t> masks_;
  int wrong_count_ = 0;
  int unstable_value_ = 0;
};

}  // namespace tilefix
