#include "tilefix/audit.hpp"

#include <unordered_set>

#include "tilefix/inspect.hpp"

namespace tilefix {

std::vector<std::uint8_t> wrong_labels_by_membership(const Level& level, const TrainingSet& ts) {
  std::unordered_set<std::uint32_t> known;
  known.reserve(ts.samples.size() * 2);
  for (const Combination& c : ts.samples) {
    known.insert(surrounding_of(c).heightless_key());
  }
  std::vector<std::uint8_t> wrong(static_cast<std::size_t>(level.cell_count()), 0);
  std::size_t i = 0;
  for (int r = 0; r < level.height(); ++r) {
    for (int c = 0; c < level.width(); ++c, ++i) {
      wrong[i] = known.contains(surrounding_at(level, r, c).heightless_key()) ? 0 : 1;
    }
  }
  return wrong;
}

std::vector<std::uint8_t> wrong_labels_by_cnet(const CNet& net, const Level& level, double theta) {
  TileEvaluator eval(net, effective_level_height(net, level), theta);
  std::vector<std::uint8_t> wrong(static_cast<std::size_t>(level.cell_count()), 0);
  std::size_t i = 0;
  for (int r = 0; r < level.height(); ++r) {
    for (int c = 0; c < level.width(); ++c, ++i) {
      const std::uint16_t mask = eval.candidates(surrounding_at(level, r, c));
      wrong[i] = ((mask >> level.at(r, c)) & 1) ? 0 : 1;
    }
  }
  return wrong;
}

std::vector<std::uint8_t> pipe_adjacent_mask(const Level& level) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(level.cell_count()), 0);
  std::size_t i = 0;
  for (int r = 0; r < level.height(); ++r) {
    for (int c = 0; c < level.width(); ++c, ++i) {
      for (int dr = -1; dr <= 1 && !mask[i]; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (level.in_bounds(r + dr, c + dc) && is_pipe(level.at(r + dr, c + dc))) {
            mask[i] = 1;
            break;
          }
        }
      }
    }
  }
  return mask;
}

RepairAudit audit_repair(const Level& before, const Level& after,
                         const std::vector<std::uint8_t>& wrong_before,
                         const std::vector<std::uint8_t>& wrong_after,
                         const std::vector<std::uint8_t>& scope) {
  if (before.height() != after.height() || before.width() != after.width()) {
    throw DimensionMismatch();
  }
  const std::size_t cells = static_cast<std::size_t>(before.cell_count());
  if (wrong_before.size() != cells || wrong_after.size() != cells ||
      (!scope.empty() && scope.size() != cells)) {
    throw std::invalid_argument("label vectors must cover every cell");
  }

  RepairAudit audit;
  std::size_t i = 0;
  for (int r = 0; r < before.height(); ++r) {
    for (int c = 0; c < before.width(); ++c, ++i) {
      if (!scope.empty() && !scope[i]) continue;
      const bool changed = before.at(r, c) != after.at(r, c);
      const bool wb = wrong_before[i] != 0;
      const bool wa = wrong_after[i] != 0;
      if (changed) {
        if (wb && wa) ++audit.w_to_w;
        if (wb && !wa) ++audit.w_to_r;
        if (!wb && wa) ++audit.r_to_w;
        if (!wb && !wa) ++audit.r_to_r;
      } else {
        if (wb && wa) ++audit.w_eq_w;
        if (wb && !wa) ++audit.w_eq_r;
        if (!wb && wa) ++audit.r_eq_w;
        if (!wb && !wa) ++audit.r_eq_r;
      }
      ++audit.audited;
      audit.wrong_before += wb ? 1 : 0;
      audit.wrong_after += wa ? 1 : 0;
    }
  }
  if (audit.wrong_before > 0) {
    audit.ratio = static_cast<double>(audit.wrong_after) / audit.wrong_before;
  }
  return audit;
}

}  // namespace tilefix
