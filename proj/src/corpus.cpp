#include "tilefix/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace tilefix {

namespace {

// Uniform concrete type different from `original`. `original` may be the
// outer pseudo-type, in which case all 11 concrete types are admissible.
tile_t random_other_type(tile_t original, Rng& rng) {
  if (!is_concrete(original)) {
    return static_cast<tile_t>(rng.uniform_index(kTileCount));
  }
  if (kTileCount < 2) {
    throw std::logic_error("random_other_type: alphabet too small to alter a tile");
  }
  const auto draw = static_cast<tile_t>(rng.uniform_index(kTileCount - 1));
  return draw < original ? draw : static_cast<tile_t>(draw + 1);
}

// First k entries of a seeded partial Fisher-Yates over [0, n).
std::vector<int> sample_positions(int n, int k, Rng& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pool[static_cast<std::size_t>(i)] = i;
  }
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace

TrainingSet extract_training_set(std::span<const Level> levels) {
  if (levels.empty()) {
    throw std::invalid_argument("extract_training_set: empty corpus");
  }
  TrainingSet ts;
  std::unordered_set<std::uint64_t> seen;
  for (const Level& level : levels) {
    ts.max_level_height = std::max(ts.max_level_height, level.height());
    for (int r = 0; r < level.height(); ++r) {
      for (int c = 0; c < level.width(); ++c) {
        const Combination comb = combination_at(level, r, c);
        if (!seen.insert(comb.key()).second) {
          continue;
        }
        ts.samples.push_back(comb);
        ts.index[surrounding_of(comb).key()] |= static_cast<std::uint16_t>(1u << comb.center());
      }
    }
  }
  return ts;
}

std::vector<LabeledExample> legal_test_set(const TrainingSet& ts) {
  if (ts.samples.empty()) {
    throw std::invalid_argument("legal_test_set: empty training set");
  }
  std::vector<LabeledExample> out;
  out.reserve(ts.samples.size());
  for (const Combination& comb : ts.samples) {
    out.push_back({surrounding_of(comb), comb.center(), true});
  }
  return out;
}

std::vector<LabeledExample> illegal_test_set(const TrainingSet& ts) {
  if (ts.index.empty()) {
    throw std::invalid_argument("illegal_test_set: empty training set");
  }
  std::vector<LabeledExample> out;
  for (const auto& [key, mask] : ts.index) {
    const SurroundingInfo s = surrounding_from_key(key);
    for (tile_t t = 0; t < kTileCount; ++t) {
      if (!((mask >> t) & 1)) {
        out.push_back({s, t, false});
      }
    }
  }
  return out;
}

SurroundingInfo fake_surroundings(const SurroundingInfo& s, int k, Rng& rng) {
  if (k < 1 || k > 8) {
    throw std::invalid_argument("fake_surroundings: k must be in [1, 8]");
  }
  SurroundingInfo fake = s;
  for (int slot : sample_positions(8, k, rng)) {
    fake.neighbors[static_cast<std::size_t>(slot)] =
        random_other_type(s.neighbors[static_cast<std::size_t>(slot)], rng);
  }
  return fake;
}

Level destroy_level(const Level& level, int count, Rng& rng) {
  if (count < 1 || count > level.cell_count()) {
    throw std::invalid_argument("destroy_level: count must be in [1, cell count]");
  }
  Level out = level;
  for (int cell : sample_positions(level.cell_count(), count, rng)) {
    const int r = cell / level.width();
    const int c = cell % level.width();
    out.set(r, c, random_other_type(level.at(r, c), rng));
  }
  return out;
}

std::vector<Level> load_corpus_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Level> levels;
  levels.reserve(files.size());
  for (const auto& path : files) {
    levels.push_back(load_level_file(path));
  }
  return levels;
}

Level load_level_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open level file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_level(buf.str());
}

void write_level_file(const Level& level, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write level file: " + path.string());
  }
  out << serialize_level(level) << '\n';
}

std::string dump_training_set(const TrainingSet& ts) {
  std::string out;
  for (const Combination& comb : ts.samples) {
    out += std::to_string(comb.center_height);
    for (tile_t t : comb.types) {
      out += ',';
      out += std::to_string(static_cast<int>(t));
    }
    out += '\n';
  }
  return out;
}

TrainingSet parse_training_dump(std::string_view text) {
  std::vector<Combination> combos;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    Combination comb;
    std::istringstream fields(line);
    std::string field;
    int idx = -1;
    while (std::getline(fields, field, ',')) {
      const int value = std::stoi(field);
      if (idx < 0) {
        comb.center_height = value;
      } else if (idx < 9) {
        if (value < 0 || value > kOuterTile || (idx == 4 && value >= kTileCount)) {
          throw std::invalid_argument("training dump: bad tile code at line " +
                                      std::to_string(line_no));
        }
        comb.types[static_cast<std::size_t>(idx)] = static_cast<tile_t>(value);
      }
      ++idx;
    }
    if (idx != 9) {
      throw std::invalid_argument("training dump: expected 10 fields at line " +
                                  std::to_string(line_no));
    }
    combos.push_back(comb);
  }

  TrainingSet ts;
  std::unordered_set<std::uint64_t> seen;
  for (const Combination& comb : combos) {
    if (!seen.insert(comb.key()).second) {
      continue;
    }
    ts.samples.push_back(comb);
    ts.index[surrounding_of(comb).key()] |= static_cast<std::uint16_t>(1u << comb.center());
    // Every cell of a level is sampled, so the deepest center equals H-1.
    ts.max_level_height = std::max(ts.max_level_height, comb.center_height + 1);
  }
  return ts;
}

}  // namespace tilefix
