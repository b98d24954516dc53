#pragma once

#include <cstdint>
#include <string>

#include "tilefix/cnet.hpp"
#include "tilefix/corpus.hpp"
#include "tilefix/inspect.hpp"

namespace tilefix {

// Three characters per cell: wrong tiles are bracketed, merely-unstable
// tiles parenthesized, stable tiles padded with spaces. Wrong wins when a
// cell is both.
std::string render_marked(const Level& level, const CandidateMap& map);

struct ExperimentTables {
  std::string legal_csv;      // per-type counts of legal centers wrongly eliminated
  std::string illegal_csv;    // per-type counts of illegal centers detected
  std::string stability_csv;  // unstable-tile counts and unstable values per variant
  std::string summary_csv;    // one row per experiment and variant
};

// The net's report card on its own training data: elimination of legal
// centers and detection of illegal ones under true surroundings and under
// surroundings with 1..3 neighbor slots faked, plus unstable statistics
// (three independently drawn fake sets).
ExperimentTables run_experiments(const CNet& net, const TrainingSet& ts, double theta,
                                 std::uint64_t seed);

int run_cli(int argc, const char* const* argv);

}  // namespace tilefix
