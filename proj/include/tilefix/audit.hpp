#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tilefix/cnet.hpp"
#include "tilefix/corpus.hpp"
#include "tilefix/level.hpp"

namespace tilefix {

struct DimensionMismatch : std::runtime_error {
  DimensionMismatch() : std::runtime_error("levels differ in dimensions") {}
};

// Row-major per-cell wrong flags (1 = wrong).
//
// Membership labeler: a tile is right iff its surrounding info, height
// excluded, occurs in the training data. Stricter than the net's threshold
// and independent of it, which makes it a fair before/after referee.
std::vector<std::uint8_t> wrong_labels_by_membership(const Level& level, const TrainingSet& ts);

// Threshold labeler: wrong iff the net puts less than theta on the current type.
std::vector<std::uint8_t> wrong_labels_by_cnet(const CNet& net, const Level& level, double theta);

// 1 for cells with at least one pipe tile among their 8 neighbors. The
// default audit scope: pipe structure is where placement errors concentrate.
std::vector<std::uint8_t> pipe_adjacent_mask(const Level& level);

// Outcome tally for a repair. Each audited cell lands in exactly one of the
// eight buckets: first letter its label before, second after; "to" means the
// tile was replaced, "eq" that it kept its type (a kept tile can still change
// label when its neighborhood changed around it).
struct RepairAudit {
  int w_to_w = 0;
  int w_to_r = 0;
  int r_to_w = 0;
  int r_to_r = 0;
  int w_eq_w = 0;
  int w_eq_r = 0;
  int r_eq_w = 0;
  int r_eq_r = 0;
  int audited = 0;
  int wrong_before = 0;
  int wrong_after = 0;
  std::optional<double> ratio;  // wrong_after / wrong_before; absent when none were wrong

  int total() const {
    return w_to_w + w_to_r + r_to_w + r_to_r + w_eq_w + w_eq_r + r_eq_w + r_eq_r;
  }
};

// `scope` restricts the audit to cells flagged 1; pass empty to audit all.
RepairAudit audit_repair(const Level& before, const Level& after,
                         const std::vector<std::uint8_t>& wrong_before,
                         const std::vector<std::uint8_t>& wrong_after,
                         const std::vector<std::uint8_t>& scope = {});

}  // namespace tilefix
