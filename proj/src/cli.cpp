#include "tilefix/cli.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tilefix/audit.hpp"
#include "tilefix/repair.hpp"

namespace tilefix {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_rate(int count, int total) {
  if (total == 0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", static_cast<double>(count) / total);
  return buf;
}

FitnessWeights parse_weights(const std::string& text) {
  std::array<double, 3> values{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t comma = text.find(',', pos);
    const bool last = i == 2;
    if (last != (comma == std::string::npos)) {
      throw std::runtime_error("--weights expects three comma-separated numbers");
    }
    const std::string part = text.substr(pos, last ? std::string::npos : comma - pos);
    std::size_t used = 0;
    values[static_cast<std::size_t>(i)] = std::stod(part, &used);
    if (used != part.size()) throw std::runtime_error("bad weight value '" + part + "'");
    pos = comma + 1;
  }
  return FitnessWeights{values[0], values[1], values[2]};
}

struct TrainOptions {
  std::string corpus_dir;
  std::string out_model;
  std::string report_path;
  std::string dump_path;
  int epochs = 4000;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  bool raw_height = false;
};

int cmd_train(const TrainOptions& opt) {
  const std::vector<Level> levels = load_corpus_dir(opt.corpus_dir);
  if (levels.empty()) throw std::runtime_error("corpus is empty: " + opt.corpus_dir);
  const TrainingSet ts = extract_training_set(levels);
  std::printf("corpus: %zu levels, %zu distinct combinations, %zu distinct surroundings\n",
              levels.size(), ts.size(), ts.index.size());

  CNet net = CNet::random_init(opt.seed);
  net.normalize_height = !opt.raw_height;
  TrainingConfig config;
  config.epochs = opt.epochs;
  config.learning_rate = opt.learning_rate;
  config.seed = opt.seed;
  const TrainingReport report = train(net, ts, config);

  save_model_file(net, opt.out_model);
  std::printf("model -> %s\n", opt.out_model.c_str());
  if (!opt.report_path.empty()) {
    write_text(opt.report_path, training_report_csv(report));
    std::printf("training report -> %s\n", opt.report_path.c_str());
  }
  if (!opt.dump_path.empty()) {
    write_text(opt.dump_path, dump_training_set(ts));
    std::printf("training samples -> %s\n", opt.dump_path.c_str());
  }
  std::printf("final train accuracy: %.4f\n", report.final_accuracy);
  return 0;
}

struct InspectOptions {
  std::string model_path;
  std::string level_path;
  std::string json_path;
  double theta = 0.05;
};

ordered_json inspection_json(const Level& level, const CandidateMap& map) {
  ordered_json wrong = ordered_json::array();
  ordered_json unstable = ordered_json::array();
  int wrong_count = 0;
  int unstable_count = 0;
  for (int r = 0; r < level.height(); ++r) {
    for (int c = 0; c < level.width(); ++c) {
      const CellAssessment& cell = map.at(r, c);
      if (cell.wrong) {
        wrong.push_back({{"row", r},
                         {"col", c},
                         {"type", std::string(1, tile_symbol(level.at(r, c)))}});
        ++wrong_count;
      }
      if (cell.unstable) {
        ordered_json candidates = ordered_json::array();
        for (int t = 0; t < kOutputDim; ++t) {
          if ((cell.candidates >> t) & 1) {
            candidates.push_back(std::string(1, tile_symbol(static_cast<tile_t>(t))));
          }
        }
        unstable.push_back({{"row", r}, {"col", c}, {"candidates", candidates}});
        ++unstable_count;
      }
    }
  }
  return ordered_json{{"height", level.height()},
                      {"width", level.width()},
                      {"theta", map.theta},
                      {"wrong", wrong},
                      {"unstable", unstable},
                      {"wrong_count", wrong_count},
                      {"unstable_count", unstable_count},
                      {"unstable_value", unstable_value(map)}};
}

int cmd_inspect(const InspectOptions& opt) {
  const CNet net = load_model_file(opt.model_path);
  const Level level = load_level_file(opt.level_path);
  const CandidateMap map = inspect_level(net, level, opt.theta);

  std::fputs(render_marked(level, map).c_str(), stdout);
  const ordered_json summary = inspection_json(level, map);
  std::printf("wrong: %d  unstable: %d  unstable value: %d\n",
              summary["wrong_count"].get<int>(), summary["unstable_count"].get<int>(),
              summary["unstable_value"].get<int>());
  if (!opt.json_path.empty()) {
    write_text(opt.json_path, summary.dump(2) + "\n");
    std::printf("summary -> %s\n", opt.json_path.c_str());
  }
  return 0;
}

struct DestroyOptions {
  std::string level_path;
  std::string out_path;
  int count = 0;  // 0 = 15% of pipe-adjacent cells
  std::uint64_t seed = 0;
};

int cmd_destroy(const DestroyOptions& opt) {
  const Level level = load_level_file(opt.level_path);
  int count = opt.count;
  if (count == 0) {
    const std::vector<std::uint8_t> adjacent = pipe_adjacent_mask(level);
    int near_pipes = 0;
    for (const std::uint8_t flag : adjacent) near_pipes += flag;
    count = std::max(1, static_cast<int>(std::lround(0.15 * near_pipes)));
  }
  Rng rng(opt.seed);
  const Level broken = destroy_level(level, count, rng);
  write_level_file(broken, opt.out_path);
  std::printf("destroyed %d of %d cells -> %s\n", count, level.cell_count(),
              opt.out_path.c_str());
  return 0;
}

ordered_json audit_json(const RepairAudit& audit, const std::string& labeler,
                        const std::string& scope) {
  ordered_json j{{"labeler", labeler},
                 {"scope", scope},
                 {"audited", audit.audited},
                 {"replaced",
                  {{"wrong_to_wrong", audit.w_to_w},
                   {"wrong_to_right", audit.w_to_r},
                   {"right_to_wrong", audit.r_to_w},
                   {"right_to_right", audit.r_to_r}}},
                 {"kept",
                  {{"wrong_to_wrong", audit.w_eq_w},
                   {"wrong_to_right", audit.w_eq_r},
                   {"right_to_wrong", audit.r_eq_w},
                   {"right_to_right", audit.r_eq_r}}},
                 {"wrong_before", audit.wrong_before},
                 {"wrong_after", audit.wrong_after}};
  if (audit.ratio.has_value()) {
    j["ratio"] = *audit.ratio;
  } else {
    j["ratio"] = nullptr;
  }
  return j;
}

struct RepairOptions {
  std::string model_path;
  std::string level_path;
  std::string out_path;
  std::string config_path;
  std::string log_path;
  std::string audit_path;
  std::string samples_path;
  double theta = 0.05;
  int generations = 25;
  int population = 20;
  std::string weights;
  std::uint64_t seed = 0;
  bool audit_all = false;
  bool generations_set = false;
  bool population_set = false;
  bool seed_set = false;
};

int cmd_repair(const RepairOptions& opt) {
  const CNet net = load_model_file(opt.model_path);
  const Level level = load_level_file(opt.level_path);

  GAParams params;
  if (!opt.config_path.empty()) params = load_ga_config(opt.config_path);
  if (opt.generations_set || opt.config_path.empty()) params.generations = opt.generations;
  if (opt.population_set || opt.config_path.empty()) params.population = opt.population;
  if (opt.seed_set || opt.config_path.empty()) params.seed = opt.seed;
  if (!opt.weights.empty()) params.weights = parse_weights(opt.weights);

  RepairContext ctx = make_repair_context(net, level, opt.theta);
  const int wrong_before = ctx.base_state.wrong_count();
  std::printf("search space: %zu positions (wrong: %d, unstable value: %d)\n",
              ctx.search_space.size(), wrong_before, ctx.base_state.unstable_value());

  const RepairResult result = evolve(ctx, params);
  write_level_file(result.repaired, opt.out_path);
  if (result.already_clean) {
    std::printf("already clean, level copied unchanged -> %s\n", opt.out_path.c_str());
  } else {
    std::printf("repaired level -> %s\n", opt.out_path.c_str());
  }
  if (!opt.log_path.empty()) {
    write_text(opt.log_path, evolution_log_csv(result.log));
    std::printf("evolution log -> %s\n", opt.log_path.c_str());
  }

  const int wrong_after = result.already_clean ? 0 : result.best.wrong;
  std::printf("wrong tiles: %d -> %d, replaced: %d, fitness: %g\n", wrong_before, wrong_after,
              result.best.replaced, result.best.fitness);

  if (!opt.audit_path.empty()) {
    std::vector<std::uint8_t> before_labels;
    std::vector<std::uint8_t> after_labels;
    std::string labeler;
    if (!opt.samples_path.empty()) {
      const TrainingSet ts = parse_training_dump(read_text(opt.samples_path));
      before_labels = wrong_labels_by_membership(level, ts);
      after_labels = wrong_labels_by_membership(result.repaired, ts);
      labeler = "membership";
    } else {
      before_labels = wrong_labels_by_cnet(net, level, opt.theta);
      after_labels = wrong_labels_by_cnet(net, result.repaired, opt.theta);
      labeler = "cnet";
    }
    const std::vector<std::uint8_t> scope =
        opt.audit_all ? std::vector<std::uint8_t>{} : pipe_adjacent_mask(level);
    const RepairAudit audit =
        audit_repair(level, result.repaired, before_labels, after_labels, scope);
    write_text(opt.audit_path,
               audit_json(audit, labeler, opt.audit_all ? "all" : "pipe_adjacent").dump(2) + "\n");
    std::printf("audit -> %s\n", opt.audit_path.c_str());
  }

  return wrong_after <= wrong_before ? 0 : 2;
}

struct ExperimentsOptions {
  std::string model_path;
  std::string corpus_dir;
  std::string out_dir;
  double theta = 0.05;
  std::uint64_t seed = 0;
};

int cmd_experiments(const ExperimentsOptions& opt) {
  const CNet net = load_model_file(opt.model_path);
  const std::vector<Level> levels = load_corpus_dir(opt.corpus_dir);
  if (levels.empty()) throw std::runtime_error("corpus is empty: " + opt.corpus_dir);
  const TrainingSet ts = extract_training_set(levels);
  const ExperimentTables tables = run_experiments(net, ts, opt.theta, opt.seed);

  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  write_text(dir / "legal_elimination.csv", tables.legal_csv);
  write_text(dir / "illegal_detection.csv", tables.illegal_csv);
  write_text(dir / "stability.csv", tables.stability_csv);
  write_text(dir / "summary.csv", tables.summary_csv);
  std::printf("experiment tables -> %s\n", dir.string().c_str());
  return 0;
}

struct AuditOptions {
  std::string before_path;
  std::string after_path;
  std::string samples_path;
  std::string model_path;
  std::string json_path;
  double theta = 0.05;
  bool all_cells = false;
};

int cmd_audit(const AuditOptions& opt) {
  const Level before = load_level_file(opt.before_path);
  const Level after = load_level_file(opt.after_path);

  std::vector<std::uint8_t> before_labels;
  std::vector<std::uint8_t> after_labels;
  std::string labeler;
  if (!opt.samples_path.empty()) {
    const TrainingSet ts = parse_training_dump(read_text(opt.samples_path));
    before_labels = wrong_labels_by_membership(before, ts);
    after_labels = wrong_labels_by_membership(after, ts);
    labeler = "membership";
  } else if (!opt.model_path.empty()) {
    const CNet net = load_model_file(opt.model_path);
    before_labels = wrong_labels_by_cnet(net, before, opt.theta);
    after_labels = wrong_labels_by_cnet(net, after, opt.theta);
    labeler = "cnet";
  } else {
    throw std::runtime_error("audit needs --samples or --model to label tiles");
  }

  const std::vector<std::uint8_t> scope =
      opt.all_cells ? std::vector<std::uint8_t>{} : pipe_adjacent_mask(before);
  const RepairAudit audit = audit_repair(before, after, before_labels, after_labels, scope);

  std::printf("audited %d cells (%s labels, %s scope)\n", audit.audited, labeler.c_str(),
              opt.all_cells ? "all" : "pipe-adjacent");
  std::printf("replaced  W->W %d  W->R %d  R->W %d  R->R %d\n", audit.w_to_w, audit.w_to_r,
              audit.r_to_w, audit.r_to_r);
  std::printf("kept      W=W %d  W=R %d  R=W %d  R=R %d\n", audit.w_eq_w, audit.w_eq_r,
              audit.r_eq_w, audit.r_eq_r);
  if (audit.ratio.has_value()) {
    std::printf("wrong: %d -> %d (ratio %.4f)\n", audit.wrong_before, audit.wrong_after,
                *audit.ratio);
  } else {
    std::printf("wrong: %d -> %d\n", audit.wrong_before, audit.wrong_after);
  }
  if (!opt.json_path.empty()) {
    write_text(opt.json_path,
               audit_json(audit, labeler, opt.all_cells ? "all" : "pipe_adjacent").dump(2) + "\n");
    std::printf("audit -> %s\n", opt.json_path.c_str());
  }
  return 0;
}

}  // namespace

std::string render_marked(const Level& level, const CandidateMap& map) {
  std::string out;
  out.reserve(static_cast<std::size_t>(level.cell_count()) * 3 +
              static_cast<std::size_t>(level.height()));
  for (int r = 0; r < level.height(); ++r) {
    for (int c = 0; c < level.width(); ++c) {
      const CellAssessment& cell = map.at(r, c);
      const char sym = tile_symbol(level.at(r, c));
      if (cell.wrong) {
        out += '[';
        out += sym;
        out += ']';
      } else if (cell.unstable) {
        out += '(';
        out += sym;
        out += ')';
      } else {
        out += ' ';
        out += sym;
        out += ' ';
      }
    }
    out += '\n';
  }
  return out;
}

ExperimentTables run_experiments(const CNet& net, const TrainingSet& ts, double theta,
                                 std::uint64_t seed) {
  const int height =
      net.trained_level_height > 0 ? static_cast<int>(net.trained_level_height)
                                   : ts.max_level_height;
  TileEvaluator eval(net, height, theta);

  const std::vector<LabeledExample> legal = legal_test_set(ts);
  const std::vector<LabeledExample> illegal = illegal_test_set(ts);

  std::array<int, kTileCount> legal_total{};
  std::array<int, kTileCount> illegal_total{};
  std::array<std::array<int, 4>, kTileCount> legal_hits{};
  std::array<std::array<int, 4>, kTileCount> illegal_hits{};
  for (const LabeledExample& e : legal) ++legal_total[e.center];
  for (const LabeledExample& e : illegal) ++illegal_total[e.center];

  const auto eliminated = [&eval](const SurroundingInfo& s, tile_t center) {
    return ((eval.candidates(s) >> center) & 1) == 0;
  };

  for (int variant = 0; variant < 4; ++variant) {
    Rng legal_rng(Rng::mix(seed, 0x10 + static_cast<std::uint64_t>(variant)));
    for (const LabeledExample& e : legal) {
      const SurroundingInfo s =
          variant == 0 ? e.surrounding : fake_surroundings(e.surrounding, variant, legal_rng);
      if (eliminated(s, e.center)) ++legal_hits[e.center][static_cast<std::size_t>(variant)];
    }
    Rng illegal_rng(Rng::mix(seed, 0x20 + static_cast<std::uint64_t>(variant)));
    for (const LabeledExample& e : illegal) {
      const SurroundingInfo s =
          variant == 0 ? e.surrounding : fake_surroundings(e.surrounding, variant, illegal_rng);
      if (eliminated(s, e.center)) ++illegal_hits[e.center][static_cast<std::size_t>(variant)];
    }
  }

  const auto per_type_csv = [](const char* count_name,
                               const std::array<int, kTileCount>& totals,
                               const std::array<std::array<int, 4>, kTileCount>& hits) {
    std::string csv = "type,total";
    const std::array<const char*, 4> variants = {"true", "fake1", "fake2", "fake3"};
    for (const char* v : variants) {
      csv += ',';
      csv += v;
      csv += '_';
      csv += count_name;
      csv += ',';
      csv += v;
      csv += "_rate";
    }
    csv += '\n';
    for (int t = 0; t < kTileCount; ++t) {
      const std::size_t ut = static_cast<std::size_t>(t);
      if (totals[ut] == 0) continue;
      csv += std::to_string(t) + ',' + std::to_string(totals[ut]);
      for (int v = 0; v < 4; ++v) {
        const int count = hits[ut][static_cast<std::size_t>(v)];
        csv += ',' + std::to_string(count) + ',' + format_rate(count, totals[ut]);
      }
      csv += '\n';
    }
    return csv;
  };

  ExperimentTables tables;
  tables.legal_csv = per_type_csv("eliminated", legal_total, legal_hits);
  tables.illegal_csv = per_type_csv("detected", illegal_total, illegal_hits);

  // Unstable statistics over the distinct surroundings: once from raw data
  // co-occurrence, once through the net, then three independent fake draws.
  tables.stability_csv = "set,variant,surroundings,unstable_tiles,unstable_value\n";
  const std::string universe = std::to_string(ts.index.size());
  const auto stability_row = [&tables, &universe](int set, const std::string& variant,
                                                  int unstable, long long uv) {
    tables.stability_csv += std::to_string(set) + ',' + variant + ',' + universe + ',' +
                            std::to_string(unstable) + ',' + std::to_string(uv) + '\n';
  };
  {
    int unstable = 0;
    long long uv = 0;
    for (const auto& [key, mask] : ts.index) {
      const int k = std::popcount(mask);
      if (k >= 2) {
        ++unstable;
        uv += k;
      }
    }
    stability_row(1, "original", unstable, uv);
  }
  {
    int unstable = 0;
    long long uv = 0;
    for (const auto& [key, mask] : ts.index) {
      const int k = std::popcount(eval.candidates(surrounding_from_key(key)));
      if (k >= 2) {
        ++unstable;
        uv += k;
      }
    }
    stability_row(1, "true", unstable, uv);
  }
  for (int set = 1; set <= 3; ++set) {
    for (int k = 1; k <= 3; ++k) {
      Rng rng(Rng::mix(seed, 0x30 + static_cast<std::uint64_t>(set * 4 + k)));
      int unstable = 0;
      long long uv = 0;
      for (const auto& [key, mask] : ts.index) {
        const SurroundingInfo s = fake_surroundings(surrounding_from_key(key), k, rng);
        const int c = std::popcount(eval.candidates(s));
        if (c >= 2) {
          ++unstable;
          uv += c;
        }
      }
      stability_row(set, "fake" + std::to_string(k), unstable, uv);
    }
  }

  tables.summary_csv = "experiment,variant,total,count,rate\n";
  const std::array<const char*, 4> variants = {"true", "fake1", "fake2", "fake3"};
  const auto summary_rows = [&tables, &variants](const char* name,
                                                 const std::array<int, kTileCount>& totals,
                                                 const std::array<std::array<int, 4>,
                                                                  kTileCount>& hits) {
    int total = 0;
    for (const int t : totals) total += t;
    for (int v = 0; v < 4; ++v) {
      int count = 0;
      for (int t = 0; t < kTileCount; ++t) {
        count += hits[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)];
      }
      tables.summary_csv += std::string(name) + ',' + variants[static_cast<std::size_t>(v)] +
                            ',' + std::to_string(total) + ',' + std::to_string(count) + ',' +
                            format_rate(count, total) + '\n';
    }
  };
  summary_rows("legal_elimination", legal_total, legal_hits);
  summary_rows("illegal_detection", illegal_total, illegal_hits);
  return tables;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"learns tile-placement constraints from levels, flags violations, repairs them"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  CLI::App* train_cmd = app.add_subcommand("train", "train a constraint net on a level corpus");
  train_cmd->add_option("--corpus", train_opt.corpus_dir, "directory of level .txt files")
      ->required();
  train_cmd->add_option("--out", train_opt.out_model, "output model file")->required();
  train_cmd->add_option("--epochs", train_opt.epochs, "training epochs")->capture_default_str();
  train_cmd->add_option("--lr", train_opt.learning_rate, "SGD learning rate")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_opt.seed, "weight init and shuffle seed")
      ->capture_default_str();
  train_cmd->add_option("--report", train_opt.report_path, "per-epoch CSV report");
  train_cmd->add_option("--dump-samples", train_opt.dump_path,
                        "write the de-duplicated training samples");
  train_cmd->add_flag("--raw-height", train_opt.raw_height,
                      "feed the row index unnormalized");

  InspectOptions inspect_opt;
  CLI::App* inspect_cmd =
      app.add_subcommand("inspect", "mark wrong and unstable tiles in a level");
  inspect_cmd->add_option("--model", inspect_opt.model_path, "trained model file")->required();
  inspect_cmd->add_option("--level", inspect_opt.level_path, "level file")->required();
  inspect_cmd->add_option("--theta", inspect_opt.theta, "candidate probability threshold")
      ->capture_default_str();
  inspect_cmd->add_option("--json", inspect_opt.json_path, "write a JSON summary");

  RepairOptions repair_opt;
  CLI::App* repair_cmd = app.add_subcommand("repair", "evolve a fix for a defective level");
  repair_cmd->add_option("--model", repair_opt.model_path, "trained model file")->required();
  repair_cmd->add_option("--level", repair_opt.level_path, "level file")->required();
  repair_cmd->add_option("--out", repair_opt.out_path, "output level file")->required();
  repair_cmd->add_option("--theta", repair_opt.theta, "candidate probability threshold")
      ->capture_default_str();
  CLI::Option* gen_opt =
      repair_cmd->add_option("--generations", repair_opt.generations, "generation cap")
          ->capture_default_str();
  CLI::Option* pop_opt = repair_cmd->add_option("--pop", repair_opt.population, "population size")
                             ->capture_default_str();
  repair_cmd->add_option("--weights", repair_opt.weights,
                         "fitness weights wrong,replaced,unstable (default 5,3,1)");
  CLI::Option* seed_opt =
      repair_cmd->add_option("--seed", repair_opt.seed, "evolution seed")->capture_default_str();
  repair_cmd->add_option("--config", repair_opt.config_path, "key=value GA parameter file");
  repair_cmd->add_option("--log", repair_opt.log_path, "per-generation CSV log");
  repair_cmd->add_option("--audit", repair_opt.audit_path, "write a before/after audit JSON");
  repair_cmd->add_option("--samples", repair_opt.samples_path,
                         "training-sample dump; audit labels by membership instead of the net");
  repair_cmd->add_flag("--audit-all", repair_opt.audit_all,
                       "audit every cell, not just pipe-adjacent ones");

  DestroyOptions destroy_opt;
  CLI::App* destroy_cmd =
      app.add_subcommand("destroy", "randomly corrupt cells of a level");
  destroy_cmd->add_option("--level", destroy_opt.level_path, "level file")->required();
  destroy_cmd->add_option("--out", destroy_opt.out_path, "output level file")->required();
  destroy_cmd->add_option("--count", destroy_opt.count,
                          "cells to corrupt (default: 15% of pipe-adjacent cells)");
  destroy_cmd->add_option("--seed", destroy_opt.seed, "destruction seed")
      ->capture_default_str();

  ExperimentsOptions exp_opt;
  CLI::App* exp_cmd = app.add_subcommand(
      "experiments", "run the elimination, detection, and stability studies");
  exp_cmd->add_option("--model", exp_opt.model_path, "trained model file")->required();
  exp_cmd->add_option("--corpus", exp_opt.corpus_dir, "directory of level .txt files")
      ->required();
  exp_cmd->add_option("--outdir", exp_opt.out_dir, "directory for the CSV tables")->required();
  exp_cmd->add_option("--theta", exp_opt.theta, "candidate probability threshold")
      ->capture_default_str();
  exp_cmd->add_option("--seed", exp_opt.seed, "fake-surrounding seed")->capture_default_str();

  AuditOptions audit_opt;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "compare wrong-tile labels before and after a repair");
  audit_cmd->add_option("--before", audit_opt.before_path, "level before repair")->required();
  audit_cmd->add_option("--after", audit_opt.after_path, "level after repair")->required();
  audit_cmd->add_option("--samples", audit_opt.samples_path,
                        "training-sample dump for membership labels");
  audit_cmd->add_option("--model", audit_opt.model_path,
                        "model file for threshold labels (used when --samples is absent)");
  audit_cmd->add_option("--theta", audit_opt.theta, "candidate probability threshold")
      ->capture_default_str();
  audit_cmd->add_flag("--all", audit_opt.all_cells, "audit every cell");
  audit_cmd->add_option("--json", audit_opt.json_path, "write the audit as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(train_cmd)) return cmd_train(train_opt);
    if (app.got_subcommand(inspect_cmd)) return cmd_inspect(inspect_opt);
    if (app.got_subcommand(repair_cmd)) {
      repair_opt.generations_set = gen_opt->count() > 0;
      repair_opt.population_set = pop_opt->count() > 0;
      repair_opt.seed_set = seed_opt->count() > 0;
      return cmd_repair(repair_opt);
    }
    if (app.got_subcommand(destroy_cmd)) return cmd_destroy(destroy_opt);
    if (app.got_subcommand(exp_cmd)) return cmd_experiments(exp_opt);
    if (app.got_subcommand(audit_cmd)) return cmd_audit(audit_opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace tilefix
