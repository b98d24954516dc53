#include "tilefix/repair.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace tilefix {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void config_error(int line_no, const std::string& what) {
  throw std::runtime_error("ga config line " + std::to_string(line_no) + ": " + what);
}

long long parse_int(const std::string& value, int line_no) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    config_error(line_no, "expected an integer, got '" + value + "'");
  }
  if (used != value.size()) config_error(line_no, "trailing junk in '" + value + "'");
  return v;
}

double parse_real(const std::string& value, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    config_error(line_no, "expected a number, got '" + value + "'");
  }
  if (used != value.size()) config_error(line_no, "trailing junk in '" + value + "'");
  return v;
}

bool parse_bool(const std::string& value, int line_no) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  config_error(line_no, "expected true/false, got '" + value + "'");
}

void validate(const GAParams& p) {
  if (p.population < 2) throw std::invalid_argument("population must be at least 2");
  if (p.generations < 1) throw std::invalid_argument("generations must be at least 1");
  if (p.p_m0 < 0.0 || p.p_m0 > 1.0) throw std::invalid_argument("p_m0 must be in [0,1]");
  if (p.p_m1 < 0.0 || p.p_m1 > 1.0) throw std::invalid_argument("p_m1 must be in [0,1]");
  if (p.p_r < 0.0 || p.p_r > 1.0) throw std::invalid_argument("p_r must be in [0,1]");
  if (p.rrt_m < 1) throw std::invalid_argument("rrt_m must be at least 1");
  if (p.weights.wrong < 0.0 || p.weights.replaced < 0.0 || p.weights.unstable < 0.0) {
    throw std::invalid_argument("fitness weights must be non-negative");
  }
  if (p.time_limit_ms < 0) throw std::invalid_argument("time_limit_ms must be non-negative");
}

// Copy of the inspected original with the scheme's replacements written in.
InspectedLevel working_state(const ReplacementScheme& scheme, const RepairContext& ctx) {
  InspectedLevel state = ctx.base_state;
  for (std::size_t i = 0; i < scheme.values.size(); ++i) {
    const Position p = ctx.search_space[i];
    if (scheme.values[i] != ctx.original.at(p.row, p.col)) {
      state.set_tile(p.row, p.col, scheme.values[i]);
    }
  }
  return state;
}

tile_t draw_from_mask(std::uint16_t mask, Rng& rng) {
  const int count = std::popcount(mask);
  int pick = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(count)));
  for (int t = 0; t < kOutputDim; ++t) {
    if ((mask >> t) & 1) {
      if (pick == 0) return static_cast<tile_t>(t);
      --pick;
    }
  }
  return 0;  // unreachable: mask has popcount(mask) set bits
}

void clear_evaluation(ReplacementScheme& scheme) {
  scheme.fitness = std::numeric_limits<double>::infinity();
  scheme.wrong = 0;
  scheme.replaced = 0;
  scheme.unstable = 0;
}

int draw_weighted(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform_real();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

GAParams load_ga_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ga config: " + path.string());
  GAParams params;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    apply_ga_config_line(params, line, line_no);
  }
  return params;
}

void apply_ga_config_line(GAParams& params, const std::string& line, int line_no) {
  const std::string body = trimmed(line.substr(0, line.find('#')));
  if (body.empty()) return;
  const std::size_t eq = body.find('=');
  if (eq == std::string::npos) config_error(line_no, "expected key=value");
  const std::string key = trimmed(body.substr(0, eq));
  const std::string value = trimmed(body.substr(eq + 1));
  if (key == "population") {
    params.population = static_cast<int>(parse_int(value, line_no));
  } else if (key == "generations") {
    params.generations = static_cast<int>(parse_int(value, line_no));
  } else if (key == "p_m0") {
    params.p_m0 = parse_real(value, line_no);
  } else if (key == "p_m1") {
    params.p_m1 = parse_real(value, line_no);
  } else if (key == "p_r") {
    params.p_r = parse_real(value, line_no);
  } else if (key == "rrt_m") {
    params.rrt_m = static_cast<int>(parse_int(value, line_no));
  } else if (key == "w1") {
    params.weights.wrong = parse_real(value, line_no);
  } else if (key == "w2") {
    params.weights.replaced = parse_real(value, line_no);
  } else if (key == "w3") {
    params.weights.unstable = parse_real(value, line_no);
  } else if (key == "time_limit_ms") {
    params.time_limit_ms = parse_int(value, line_no);
  } else if (key == "seed") {
    params.seed = static_cast<std::uint64_t>(parse_int(value, line_no));
  } else if (key == "candidates_from_original") {
    params.candidates_from_original = parse_bool(value, line_no);
  } else {
    config_error(line_no, "unknown key '" + key + "'");
  }
}

RepairContext::RepairContext(const CNet& net_in, Level level, double theta_in)
    : original(std::move(level)),
      net(&net_in),
      theta(theta_in),
      evaluator(net_in, effective_level_height(net_in, original), theta_in),
      base_state(evaluator, original) {
  initial_map = inspect_level(evaluator, original);
  for (int r = 0; r < original.height(); ++r) {
    for (int c = 0; c < original.width(); ++c) {
      const CellAssessment& cell = initial_map.at(r, c);
      if (cell.wrong || cell.unstable) search_space.push_back({r, c});
    }
  }
}

RepairContext make_repair_context(const CNet& net, const Level& level, double theta) {
  return RepairContext(net, level, theta);
}

ReplacementScheme identity_scheme(const RepairContext& ctx) {
  ReplacementScheme scheme;
  scheme.values.reserve(ctx.search_space.size());
  for (const Position p : ctx.search_space) {
    scheme.values.push_back(ctx.original.at(p.row, p.col));
  }
  return scheme;
}

Level materialize(const ReplacementScheme& scheme, const RepairContext& ctx) {
  Level level = ctx.original;
  for (std::size_t i = 0; i < scheme.values.size(); ++i) {
    const Position p = ctx.search_space[i];
    level.set(p.row, p.col, scheme.values[i]);
  }
  return level;
}

int replaced_count(const ReplacementScheme& scheme, const RepairContext& ctx) {
  int n = 0;
  for (std::size_t i = 0; i < scheme.values.size(); ++i) {
    const Position p = ctx.search_space[i];
    if (scheme.values[i] != ctx.original.at(p.row, p.col)) ++n;
  }
  return n;
}

double fitness_from_counts(int wrong, int replaced, int unstable, const FitnessWeights& w) {
  return w.wrong * wrong + w.replaced * replaced + w.unstable * unstable;
}

void evaluate(ReplacementScheme& scheme, RepairContext& ctx, const FitnessWeights& w) {
  const InspectedLevel state = working_state(scheme, ctx);
  scheme.wrong = state.wrong_count();
  scheme.replaced = replaced_count(scheme, ctx);
  scheme.unstable = state.unstable_value();
  scheme.fitness = fitness_from_counts(scheme.wrong, scheme.replaced, scheme.unstable, w);
}

double fitness(const ReplacementScheme& scheme, RepairContext& ctx, const FitnessWeights& w) {
  ReplacementScheme copy = scheme;
  evaluate(copy, ctx, w);
  return copy.fitness;
}

std::pair<ReplacementScheme, ReplacementScheme> crossover(const ReplacementScheme& a,
                                                          const ReplacementScheme& b, Rng& rng) {
  std::pair<ReplacementScheme, ReplacementScheme> children{a, b};
  clear_evaluation(children.first);
  clear_evaluation(children.second);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (rng.chance(0.5)) {
      std::swap(children.first.values[i], children.second.values[i]);
    }
  }
  return children;
}

void mutate(ReplacementScheme& scheme, RepairContext& ctx, double p_m1, bool from_original,
            Rng& rng) {
  InspectedLevel state = working_state(scheme, ctx);
  for (std::size_t i = 0; i < scheme.values.size(); ++i) {
    if (!rng.chance(p_m1)) continue;
    const Position p = ctx.search_space[i];
    if (!state.unstable(p.row, p.col)) continue;
    const std::uint16_t mask = from_original ? ctx.original_candidates(static_cast<int>(i))
                                             : state.candidates(p.row, p.col);
    if (mask == 0) continue;
    const tile_t drawn = draw_from_mask(mask, rng);
    scheme.values[i] = drawn;
    state.set_tile(p.row, p.col, drawn);
  }
}

void repair_op(ReplacementScheme& scheme, RepairContext& ctx, double p_r, bool from_original,
               Rng& rng) {
  InspectedLevel state = working_state(scheme, ctx);
  for (std::size_t i = 0; i < scheme.values.size(); ++i) {
    if (!rng.chance(p_r)) continue;
    const Position p = ctx.search_space[i];
    if (!state.wrong(p.row, p.col)) continue;
    const std::uint16_t mask = from_original ? ctx.original_candidates(static_cast<int>(i))
                                             : state.candidates(p.row, p.col);
    if (mask == 0) continue;
    const tile_t drawn = draw_from_mask(mask, rng);
    scheme.values[i] = drawn;
    state.set_tile(p.row, p.col, drawn);
  }
}

std::vector<ReplacementScheme> init_population(RepairContext& ctx, const GAParams& params,
                                               Rng& rng) {
  if (ctx.search_space.empty()) throw EmptySearchSpace();
  std::vector<ReplacementScheme> population;
  population.reserve(static_cast<std::size_t>(params.population));
  for (int k = 0; k < params.population; ++k) {
    ReplacementScheme scheme = identity_scheme(ctx);
    for (std::size_t i = 0; i < scheme.values.size(); ++i) {
      const Position p = ctx.search_space[i];
      if (!ctx.initial_map.at(p.row, p.col).unstable) continue;
      const std::uint16_t mask = ctx.original_candidates(static_cast<int>(i));
      if (mask == 0) continue;
      scheme.values[i] = draw_from_mask(mask, rng);
    }
    repair_op(scheme, ctx, params.p_r, params.candidates_from_original, rng);
    evaluate(scheme, ctx, params.weights);
    population.push_back(std::move(scheme));
  }
  return population;
}

std::vector<double> parent_probs(const std::vector<ReplacementScheme>& population) {
  const std::size_t n = population.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return population[a].fitness < population[b].fitness;
  });
  const double total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
  std::vector<double> probs(n, 0.0);
  for (std::size_t rank_pos = 0; rank_pos < n; ++rank_pos) {
    probs[order[rank_pos]] = static_cast<double>(n - rank_pos) / total;
  }
  return probs;
}

std::vector<ReplacementScheme> round_robin_select(std::vector<ReplacementScheme> candidates,
                                                  int n, int rrt_m, Rng& rng) {
  const int total = static_cast<int>(candidates.size());
  const int plays = std::min(rrt_m, total - 1);
  std::vector<double> score(candidates.size(), 0.0);
  std::vector<int> opponents;
  for (int i = 0; i < total; ++i) {
    opponents.clear();
    while (static_cast<int>(opponents.size()) < plays) {
      const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(total)));
      if (j == i || std::find(opponents.begin(), opponents.end(), j) != opponents.end()) continue;
      opponents.push_back(j);
    }
    for (const int j : opponents) {
      if (candidates[static_cast<std::size_t>(i)].fitness <
          candidates[static_cast<std::size_t>(j)].fitness) {
        score[static_cast<std::size_t>(i)] += 1.0;
      } else if (candidates[static_cast<std::size_t>(i)].fitness ==
                 candidates[static_cast<std::size_t>(j)].fitness) {
        score[static_cast<std::size_t>(i)] += 0.5;
      }
    }
  }
  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const std::size_t ua = static_cast<std::size_t>(a);
    const std::size_t ub = static_cast<std::size_t>(b);
    if (score[ua] != score[ub]) return score[ua] > score[ub];
    return candidates[ua].fitness < candidates[ub].fitness;
  });
  std::vector<ReplacementScheme> survivors;
  survivors.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n && k < total; ++k) {
    survivors.push_back(std::move(candidates[static_cast<std::size_t>(order[k])]));
  }
  return survivors;
}

RepairResult evolve(RepairContext& ctx, const GAParams& params) {
  validate(params);
  if (ctx.search_space.empty()) {
    ReplacementScheme identity = identity_scheme(ctx);
    identity.fitness = 0.0;
    return RepairResult{std::move(identity), ctx.original, {{0, 0.0, 0.0, 0, 0, 0}}, true};
  }

  const double p_m1 = params.p_m1 > 0.0
                          ? params.p_m1
                          : 1.0 / static_cast<double>(ctx.search_space.size());
  Rng rng(params.seed);
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&start]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  std::vector<ReplacementScheme> population = init_population(ctx, params, rng);
  std::vector<GenerationLog> log;
  log.reserve(static_cast<std::size_t>(params.generations) + 1);

  ReplacementScheme best = population.front();
  for (const ReplacementScheme& s : population) {
    if (s.fitness < best.fitness) best = s;
  }
  const auto log_generation = [&](int generation) {
    double mean = 0.0;
    for (const ReplacementScheme& s : population) mean += s.fitness;
    mean /= static_cast<double>(population.size());
    log.push_back({generation, best.fitness, mean, best.wrong, best.replaced, best.unstable});
  };
  log_generation(0);

  for (int gen = 1; gen <= params.generations; ++gen) {
    if (params.time_limit_ms > 0 && elapsed_ms() >= params.time_limit_ms) break;

    const std::vector<double> probs = parent_probs(population);
    std::vector<ReplacementScheme> offspring;
    offspring.reserve(static_cast<std::size_t>(params.population));
    while (static_cast<int>(offspring.size()) < params.population) {
      const int first = draw_weighted(probs, rng);
      int second = first;
      while (second == first) second = draw_weighted(probs, rng);
      auto children = crossover(population[static_cast<std::size_t>(first)],
                                population[static_cast<std::size_t>(second)], rng);
      offspring.push_back(std::move(children.first));
      if (static_cast<int>(offspring.size()) < params.population) {
        offspring.push_back(std::move(children.second));
      }
    }
    for (ReplacementScheme& child : offspring) {
      if (rng.chance(params.p_m0)) {
        mutate(child, ctx, p_m1, params.candidates_from_original, rng);
      }
      repair_op(child, ctx, params.p_r, params.candidates_from_original, rng);
      evaluate(child, ctx, params.weights);
    }

    std::vector<ReplacementScheme> pool = std::move(population);
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()),
                std::make_move_iterator(offspring.end()));
    population = round_robin_select(std::move(pool), params.population, params.rrt_m, rng);

    for (const ReplacementScheme& s : population) {
      if (s.fitness < best.fitness) best = s;
    }
    log_generation(gen);
  }

  Level repaired = materialize(best, ctx);
  return RepairResult{std::move(best), std::move(repaired), std::move(log), false};
}

std::string evolution_log_csv(const std::vector<GenerationLog>& log) {
  std::string out = "generation,best_F,mean_F,wrong,replaced,UV\n";
  char buf[160];
  for (const GenerationLog& row : log) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%d,%d\n", row.generation,
                  row.best_fitness, row.mean_fitness, row.wrong, row.replaced, row.unstable);
    out += buf;
  }
  return out;
}

}  // namespace tilefix
