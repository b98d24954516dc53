#include "tilefix/inspect.hpp"

#include <stdexcept>

namespace tilefix {

TileEvaluator::TileEvaluator(const CNet& net, int level_height, double theta)
    : net_(&net), level_height_(level_height), theta_(theta) {
  if (theta <= 0.0 || theta >= 1.0) {
    throw std::invalid_argument("TileEvaluator: theta must be in (0, 1)");
  }
}

const std::array<double, kOutputDim>& TileEvaluator::probs(const SurroundingInfo& s) {
  const auto [it, inserted] = cache_.try_emplace(s.key());
  if (inserted) {
    it->second = forward(*net_, encode_for_net(*net_, s, level_height_));
  }
  return it->second;
}

std::uint16_t TileEvaluator::candidates(const SurroundingInfo& s) {
  return candidate_mask(probs(s), theta_);
}

std::vector<tile_t> candidate_types(const CNet& net, const SurroundingInfo& s, int level_height,
                                    double theta) {
  if (theta <= 0.0 || theta >= 1.0) {
    throw std::invalid_argument("candidate_types: theta must be in (0, 1)");
  }
  const auto probs = forward(net, encode_for_net(net, s, level_height));
  std::vector<tile_t> out;
  for (tile_t t = 0; t < kOutputDim; ++t) {
    if (probs[t] >= theta) {
      out.push_back(t);
    }
  }
  return out;
}

CandidateMap inspect_level(const CNet& net, const Level& level, double theta) {
  TileEvaluator eval(net, effective_level_height(net, level), theta);
  return inspect_level(eval, level);
}

CandidateMap inspect_level(TileEvaluator& eval, const Level& level) {
  CandidateMap cm;
  cm.height = level.height();
  cm.width = level.width();
  cm.theta = eval.theta();
  cm.cells.reserve(static_cast<std::size_t>(level.cell_count()));
  for (int r = 0; r < level.height(); ++r) {
    for (int c = 0; c < level.width(); ++c) {
      CellAssessment cell;
      cell.probs = eval.probs(surrounding_at(level, r, c));
      cell.candidates = candidate_mask(cell.probs, eval.theta());
      cell.wrong = !((cell.candidates >> level.at(r, c)) & 1);
      cell.unstable = std::popcount(cell.candidates) >= 2;
      cm.cells.push_back(cell);
    }
  }
  return cm;
}

int unstable_value(const CandidateMap& cm) {
  int uv = 0;
  for (const CellAssessment& cell : cm.cells) {
    const int n = std::popcount(cell.candidates);
    if (n >= 2) {
      uv += n;
    }
  }
  return uv;
}

InspectedLevel::InspectedLevel(TileEvaluator& eval, Level level)
    : eval_(&eval), level_(std::move(level)) {
  masks_.resize(static_cast<std::size_t>(level_.cell_count()));
  for (int r = 0; r < level_.height(); ++r) {
    for (int c = 0; c < level_.width(); ++c) {
      masks_[static_cast<std::size_t>(r) * level_.width() + c] =
          eval_->candidates(surrounding_at(level_, r, c));
    }
  }
  for (int r = 0; r < level_.height(); ++r) {
    for (int c = 0; c < level_.width(); ++c) {
      wrong_count_ += wrong_contribution(r, c);
      unstable_value_ += uv_contribution(r, c);
    }
  }
}

void InspectedLevel::recompute_mask(int row, int col) {
  masks_[static_cast<std::size_t>(row) * level_.width() + col] =
      eval_->candidates(surrounding_at(level_, row, col));
}

void InspectedLevel::set_tile(int row, int col, tile_t t) {
  if (level_.at(row, col) == t) {
    return;
  }
  // The edited cell keeps its candidate mask (its own surroundings did not
  // change) but its wrong flag is re-read; the 8 neighbors get fresh masks.
  wrong_count_ -= wrong_contribution(row, col);
  level_.set(row, col, t);
  wrong_count_ += wrong_contribution(row, col);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) {
        continue;
      }
      const int r = row + dr;
      const int c = col + dc;
      if (!level_.in_bounds(r, c)) {
        continue;
      }
      wrong_count_ -= wrong_contribution(r, c);
      unstable_value_ -= uv_contribution(r, c);
      recompute_mask(r, c);
      wrong_count_ += wrong_contribution(r, c);
      unstable_value_ += uv_contribution(r, c);
    }
  }
}

}  // namespace tilefix
