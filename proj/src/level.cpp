#include "tilefix/level.hpp"

#include <utility>

namespace tilefix {

namespace {

std::array<std::int8_t, 128> build_symbol_table() {
  std::array<std::int8_t, 128> table{};
  table.fill(-1);
  for (int t = 0; t < kTileCount; ++t) {
    table[static_cast<unsigned char>(kTileSymbols[static_cast<std::size_t>(t)])] =
        static_cast<std::int8_t>(t);
  }
  return table;
}

const std::array<std::int8_t, 128> kSymbolTable = build_symbol_table();

}  // namespace

char tile_symbol(tile_t t) {
  if (!is_concrete(t)) {
    throw std::invalid_argument("tile_symbol: not a concrete tile code");
  }
  return kTileSymbols[t];
}

std::optional<tile_t> tile_from_symbol(char c) {
  const auto uc = static_cast<unsigned char>(c);
  if (uc >= 128 || kSymbolTable[uc] < 0) {
    return std::nullopt;
  }
  return static_cast<tile_t>(kSymbolTable[uc]);
}

Level::Level(int height, int width, tile_t fill) : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("Level: dimensions must be at least 1x1");
  }
  if (!is_concrete(fill)) {
    throw std::invalid_argument("Level: fill tile must be concrete");
  }
  cells_.assign(static_cast<std::size_t>(height) * width, fill);
}

Level::Level(int height, int width, std::vector<tile_t> cells)
    : height_(height), width_(width), cells_(std::move(cells)) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("Level: dimensions must be at least 1x1");
  }
  if (cells_.size() != static_cast<std::size_t>(height) * width) {
    throw std::invalid_argument("Level: cell buffer does not match dimensions");
  }
  for (tile_t t : cells_) {
    if (!is_concrete(t)) {
      throw std::invalid_argument("Level: grid may only hold concrete tiles");
    }
  }
}

void Level::set(int row, int col, tile_t t) {
  if (!in_bounds(row, col)) {
    throw std::out_of_range("Level::set: position outside grid");
  }
  if (!is_concrete(t)) {
    throw std::invalid_argument("Level::set: grid may only hold concrete tiles");
  }
  cells_[static_cast<std::size_t>(row) * width_ + col] = t;
}

Level parse_level(std::string_view text) {
  // A single trailing newline is dropped so files round-trip cleanly.
  if (!text.empty() && text.back() == '\n') {
    text.remove_suffix(1);
  }
  if (text.empty()) {
    throw ParseError(ParseError::Kind::EmptyInput, "parse_level: empty input");
  }

  std::vector<tile_t> cells;
  cells.reserve(text.size());
  int width = -1;
  int row = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    if (width < 0) {
      width = static_cast<int>(line.size());
      if (width == 0) {
        throw ParseError(ParseError::Kind::EmptyInput, "parse_level: first row is empty");
      }
    } else if (static_cast<int>(line.size()) != width) {
      throw ParseError(ParseError::Kind::UnequalRowLength,
                       "parse_level: row " + std::to_string(row) + " has length " +
                           std::to_string(line.size()) + ", expected " + std::to_string(width),
                       row);
    }
    for (int col = 0; col < static_cast<int>(line.size()); ++col) {
      const char c = line[static_cast<std::size_t>(col)];
      const auto tile = tile_from_symbol(c);
      if (!tile) {
        throw ParseError(ParseError::Kind::UnknownSymbol,
                         std::string("parse_level: unknown symbol '") + c + "' at line " +
                             std::to_string(row) + ", column " + std::to_string(col),
                         row, col, c);
      }
      cells.push_back(*tile);
    }
    ++row;
    if (eol == std::string_view::npos) {
      break;
    }
    pos = eol + 1;
    if (pos == text.size()) {
      // Text ended with '\n' followed by nothing: already handled above, but
      // guard against "a\n\n" style inputs producing a phantom row.
      throw ParseError(ParseError::Kind::UnequalRowLength,
                       "parse_level: trailing empty row at line " + std::to_string(row), row);
    }
  }
  return Level(row, width, std::move(cells));
}

std::string serialize_level(const Level& level) {
  std::string out;
  out.reserve(static_cast<std::size_t>(level.height()) * (level.width() + 1));
  for (int r = 0; r < level.height(); ++r) {
    if (r > 0) {
      out.push_back('\n');
    }
    for (int c = 0; c < level.width(); ++c) {
      out.push_back(tile_symbol(level.at(r, c)));
    }
  }
  return out;
}

SurroundingInfo surrounding_from_key(std::uint64_t key) {
  SurroundingInfo s;
  s.center_height = static_cast<int>(key >> 32);
  for (int i = 0; i < 8; ++i) {
    s.neighbors[static_cast<std::size_t>(i)] = static_cast<tile_t>((key >> (4 * i)) & 0xF);
  }
  return s;
}

Combination combination_at(const Level& level, int row, int col) {
  if (!level.in_bounds(row, col)) {
    throw std::out_of_range("combination_at: center outside grid");
  }
  Combination c;
  c.center_height = row;
  int i = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc, ++i) {
      const int r = row + dr;
      const int cc = col + dc;
      c.types[static_cast<std::size_t>(i)] =
          level.in_bounds(r, cc) ? level.at(r, cc) : kOuterTile;
    }
  }
  return c;
}

SurroundingInfo surrounding_of(const Combination& c) {
  SurroundingInfo s;
  s.center_height = c.center_height;
  int out = 0;
  for (int i = 0; i < 9; ++i) {
    if (i == 4) {
      continue;
    }
    s.neighbors[static_cast<std::size_t>(out++)] = c.types[static_cast<std::size_t>(i)];
  }
  return s;
}

SurroundingInfo surrounding_at(const Level& level, int row, int col) {
  return surrounding_of(combination_at(level, row, col));
}

}  // namespace tilefix
