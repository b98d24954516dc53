#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tilefix/inspect.hpp"
#include "tilefix/level.hpp"
#include "tilefix/rng.hpp"

namespace tilefix {

struct Position {
  int row = 0;
  int col = 0;

  bool operator==(const Position&) const = default;
};

struct FitnessWeights {
  double wrong = 5.0;
  double replaced = 3.0;
  double unstable = 1.0;
};

struct GAParams {
  int population = 20;
  int generations = 25;
  double p_m0 = 0.8;  // per-offspring mutation gate
  double p_m1 = 0.0;  // per-position mutation rate; 0 means 1/|search space|
  double p_r = 0.3;   // per-position repair rate
  int rrt_m = 4;      // opponents per candidate in survivor selection
  FitnessWeights weights;
  std::int64_t time_limit_ms = 0;  // 0 = generation cap only
  std::uint64_t seed = 0;
  // Draw mutation/repair replacements from the defective level's candidate
  // sets instead of the current solution's.
  bool candidates_from_original = false;
};

// Flat key=value file, '#' comments. Unknown keys are rejected.
GAParams load_ga_config(const std::filesystem::path& path);
void apply_ga_config_line(GAParams& params, const std::string& line, int line_no);

struct EmptySearchSpace : std::runtime_error {
  EmptySearchSpace() : std::runtime_error("level has no wrong or unstable tiles") {}
};

// Frozen view of one defective level: the candidate map of the original and
// the search space (wrong or unstable positions, row-major order). The
// evaluator cache is shared by every scheme evaluation in the run.
// base_state points into evaluator, so the context is pinned in place.
struct RepairContext {
  RepairContext(const CNet& net, Level level, double theta);
  RepairContext(const RepairContext&) = delete;
  RepairContext& operator=(const RepairContext&) = delete;

  Level original;
  const CNet* net;
  double theta;
  CandidateMap initial_map;
  std::vector<Position> search_space;
  TileEvaluator evaluator;
  InspectedLevel base_state;

  std::uint16_t original_candidates(int idx) const {
    const Position p = search_space[static_cast<std::size_t>(idx)];
    return initial_map.at(p.row, p.col).candidates;
  }
};

RepairContext make_repair_context(const CNet& net, const Level& level, double theta);

// One solution: a type per search-space position. Positions outside the
// search space are untouchable by construction. `values` starts at the
// original types (the identity scheme).
struct ReplacementScheme {
  std::vector<tile_t> values;
  double fitness = std::numeric_limits<double>::infinity();
  int wrong = 0;
  int replaced = 0;
  int unstable = 0;
};

ReplacementScheme identity_scheme(const RepairContext& ctx);
Level materialize(const ReplacementScheme& scheme, const RepairContext& ctx);
int replaced_count(const ReplacementScheme& scheme, const RepairContext& ctx);

double fitness_from_counts(int wrong, int replaced, int unstable, const FitnessWeights& w);

// Inspects the materialized level and fills fitness plus its three parts.
void evaluate(ReplacementScheme& scheme, RepairContext& ctx, const FitnessWeights& w);
double fitness(const ReplacementScheme& scheme, RepairContext& ctx, const FitnessWeights& w);

// Independent 0.5 swap per search-space position.
std::pair<ReplacementScheme, ReplacementScheme> crossover(const ReplacementScheme& a,
                                                          const ReplacementScheme& b, Rng& rng);

// Walks the search space; with probability p_m1 re-draws positions that are
// currently unstable from their candidate set. The working level is updated
// after every draw, so later positions see the effect of earlier ones.
void mutate(ReplacementScheme& scheme, RepairContext& ctx, double p_m1, bool from_original,
            Rng& rng);

// Same walk, but re-draws positions that are currently wrong, with
// probability p_r. Positions with an empty candidate set are left alone.
void repair_op(ReplacementScheme& scheme, RepairContext& ctx, double p_r, bool from_original,
               Rng& rng);

// Identity plus a uniform draw from the original candidate set at every
// originally-unstable position, then one repair pass. All evaluated.
std::vector<ReplacementScheme> init_population(RepairContext& ctx, const GAParams& params,
                                               Rng& rng);

// Rank-proportional parent distribution: best fitness gets rank n, worst
// rank 1, ties resolved by insertion order.
std::vector<double> parent_probs(const std::vector<ReplacementScheme>& population);

// Each candidate faces rrt_m distinct random opponents; strictly lower
// fitness wins a pairing, equal fitness counts half. The n candidates with
// the most wins survive (ties: lower fitness, then insertion order).
std::vector<ReplacementScheme> round_robin_select(std::vector<ReplacementScheme> candidates,
                                                  int n, int rrt_m, Rng& rng);

struct GenerationLog {
  int generation = 0;
  double best_fitness = 0.0;  // best-so-far, non-increasing
  double mean_fitness = 0.0;  // over the current population
  int wrong = 0;              // parts of the best-so-far scheme
  int replaced = 0;
  int unstable = 0;
};

struct RepairResult {
  ReplacementScheme best;
  Level repaired;
  std::vector<GenerationLog> log;
  bool already_clean = false;
};

RepairResult evolve(RepairContext& ctx, const GAParams& params);

std::string evolution_log_csv(const std::vector<GenerationLog>& log);

}  // namespace tilefix
