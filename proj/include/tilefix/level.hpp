#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tilefix {

using tile_t = std::uint8_t;

// Concrete tile alphabet. Codes 0..10 map onto the text symbols below;
// kOuterTile stands for "outside the level" and never occurs in a grid.
inline constexpr int kTileCount = 11;
inline constexpr tile_t kOuterTile = 11;
inline constexpr int kChannelCount = 12;  // concrete types plus outer

inline constexpr std::array<char, kTileCount> kTileSymbols = {
    'X',  // 0  solid / ground
    'S',  // 1  breakable
    '-',  // 2  empty (passable)
    '?',  // 3  full question block
    'Q',  // 4  empty question block
    'E',  // 5  enemy
    '<',  // 6  top-left pipe
    '>',  // 7  top-right pipe
    '[',  // 8  left pipe
    ']',  // 9  right pipe
    'o',  // 10 coin
};

constexpr bool is_concrete(tile_t t) { return t < kTileCount; }
constexpr bool is_pipe(tile_t t) { return t >= 6 && t <= 9; }

char tile_symbol(tile_t t);
std::optional<tile_t> tile_from_symbol(char c);

struct ParseError : std::runtime_error {
  enum class Kind { EmptyInput, UnequalRowLength, UnknownSymbol };

  ParseError(Kind k, const std::string& message, int line_arg = -1, int col_arg = -1,
             char symbol_arg = '\0')
      : std::runtime_error(message), kind(k), line(line_arg), col(col_arg), symbol(symbol_arg) {}

  Kind kind;
  int line;
  int col;
  char symbol;
};

// Rectangular grid of concrete tiles. Value type; copies are independent.
class Level {
 public:
  Level(int height, int width, tile_t fill = 2);
  Level(int height, int width, std::vector<tile_t> cells);

  int height() const { return height_; }
  int width() const { return width_; }
  int cell_count() const { return height_ * width_; }

  tile_t at(int row, int col) const { return cells_[static_cast<std::size_t>(row) * width_ + col]; }
  void set(int row, int col, tile_t t);
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  const std::vector<tile_t>& cells() const { return cells_; }

  bool operator==(const Level&) const = default;

 private:
  int height_;
  int width_;
  std::vector<tile_t> cells_;
};

// One line per row, top row first, one symbol per tile. A single trailing
// newline is tolerated on parse; serialize never emits one.
Level parse_level(std::string_view text);
std::string serialize_level(const Level& level);

// Height of the central tile plus the 3x3 window read row-major, center at
// index 4. Cells outside the level read as kOuterTile.
struct Combination {
  int center_height = 0;
  std::array<tile_t, 9> types{};

  tile_t center() const { return types[4]; }

  // Packed identity: 9 types at 4 bits each, height above. Drives
  // de-duplication and hashing; heights must stay below 2^27.
  std::uint64_t key() const {
    std::uint64_t k = 0;
    for (int i = 8; i >= 0; --i) {
      k = (k << 4) | types[static_cast<std::size_t>(i)];
    }
    return k | (static_cast<std::uint64_t>(center_height) << 36);
  }

  bool operator==(const Combination&) const = default;
};

// A combination with the center removed: what the classifier conditions on.
struct SurroundingInfo {
  int center_height = 0;
  std::array<tile_t, 8> neighbors{};

  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(center_height) << 32) | heightless_key();
  }

  // 8 neighbor types at 4 bits each, height excluded.
  std::uint32_t heightless_key() const {
    std::uint32_t k = 0;
    for (int i = 7; i >= 0; --i) {
      k = (k << 4) | neighbors[static_cast<std::size_t>(i)];
    }
    return k;
  }

  bool operator==(const SurroundingInfo&) const = default;
};

SurroundingInfo surrounding_from_key(std::uint64_t key);

Combination combination_at(const Level& level, int row, int col);
SurroundingInfo surrounding_of(const Combination& c);
SurroundingInfo surrounding_at(const Level& level, int row, int col);

}  // namespace tilefix
