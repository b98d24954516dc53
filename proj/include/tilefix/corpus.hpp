#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tilefix/level.hpp"
#include "tilefix/rng.hpp"

namespace tilefix {

// De-duplicated 3x3 window samples plus the surrounding -> observed-centers
// index derived from them. `index` values are bitmasks over the 11 concrete
// types. Iteration order is deterministic: samples keep first-seen order and
// the index is ordered by packed surrounding key.
struct TrainingSet {
  std::vector<Combination> samples;
  std::map<std::uint64_t, std::uint16_t> index;
  int max_level_height = 0;

  std::size_t size() const { return samples.size(); }

  std::uint16_t centers_for(const SurroundingInfo& s) const {
    const auto it = index.find(s.key());
    return it == index.end() ? 0 : it->second;
  }

  bool contains(const Combination& c) const {
    return (centers_for(surrounding_of(c)) >> c.center()) & 1;
  }
};

struct LabeledExample {
  SurroundingInfo surrounding;
  tile_t center = 0;
  bool legal = false;
};

TrainingSet extract_training_set(std::span<const Level> levels);

// One legal example per de-duplicated sample.
std::vector<LabeledExample> legal_test_set(const TrainingSet& ts);

// For every known surrounding, every concrete center type that never
// co-occurred with it. Together with the legal set this partitions
// surrounding x type space over the known surroundings.
std::vector<LabeledExample> illegal_test_set(const TrainingSet& ts);

// Replaces exactly k of the 8 neighbor slots (chosen without replacement)
// with a uniformly random concrete type different from the original entry.
SurroundingInfo fake_surroundings(const SurroundingInfo& s, int k, Rng& rng);

// Copy of `level` with `count` distinct cells overwritten, each by a
// uniformly random concrete type different from the original tile.
Level destroy_level(const Level& level, int count, Rng& rng);

// All *.txt files under `dir`, sorted by filename.
std::vector<Level> load_corpus_dir(const std::filesystem::path& dir);

Level load_level_file(const std::filesystem::path& path);
void write_level_file(const Level& level, const std::filesystem::path& path);

// Line-oriented dump: "height,t0,...,t8" per sample, in sample order.
std::string dump_training_set(const TrainingSet& ts);
TrainingSet parse_training_dump(std::string_view text);

}  // namespace tilefix
