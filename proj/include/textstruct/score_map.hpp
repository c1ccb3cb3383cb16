#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "textstruct/chars.hpp"

namespace textstruct {

// Column order follows the score map layout: two body columns, then the
// three border columns.
enum class EventKind : uint8_t {
  BodyFullMatch = 0,
  BodyGroupMatch = 1,
  BorderFullMatch = 2,
  BorderGroupMatch = 3,
  BorderNoMatch = 4,
  NoEvent = 5,
};

inline constexpr int kMapRows = 3;  // Alpha, Numeric, Symbol
inline constexpr int kMapCols = 5;

struct ScoreEvent {
  EventKind kind = EventKind::NoEvent;
  CharClass cls = CharClass::Space;  // row; meaningless for NoEvent
};

// 3x5 matrix of event reward weights, rows Alpha/Numeric/Symbol.
struct FeatureScoreMap {
  std::array<std::array<double, kMapCols>, kMapRows> w{};

  double& at(int row, int col) { return w[static_cast<size_t>(row)][static_cast<size_t>(col)]; }
  double at(int row, int col) const { return w[static_cast<size_t>(row)][static_cast<size_t>(col)]; }

  double sum() const {
    double s = 0;
    for (const auto& row : w)
      for (double v : row) s += v;
    return s;
  }
  double mean() const { return sum() / (kMapRows * kMapCols); }

  bool operator==(const FeatureScoreMap&) const = default;
};

inline FeatureScoreMap default_score_map() {
  FeatureScoreMap m;
  m.w = {{{3, 3, 5, 5, 1}, {3, 5, 7, 5, 1}, {8, 6, 9, 5, 1}}};
  return m;
}

inline FeatureScoreMap uniform_score_map(double v) {
  FeatureScoreMap m;
  for (auto& row : m.w) row.fill(v);
  return m;
}

inline int class_row(CharClass c) {
  switch (c) {
    case CharClass::Alpha: return 0;
    case CharClass::Numeric: return 1;
    case CharClass::Symbol: return 2;
    default: return -1;
  }
}

// Table-driven per-column event decision. One-sided blanks yield no event;
// the column still counts as active in the normalization.
inline ScoreEvent classify_event(char32_t ca, PositionRole ra, char32_t cb, PositionRole rb) {
  bool blank_a = ra == PositionRole::Blank;
  bool blank_b = rb == PositionRole::Blank;
  if (blank_a || blank_b) return {EventKind::NoEvent, CharClass::Space};
  CharClass cla = classify_char(ca);
  CharClass clb = classify_char(cb);
  if (cla == clb) {
    bool body = ra == PositionRole::Body && rb == PositionRole::Body;
    bool full = ca == cb;
    EventKind k = body ? (full ? EventKind::BodyFullMatch : EventKind::BodyGroupMatch)
                       : (full ? EventKind::BorderFullMatch : EventKind::BorderGroupMatch);
    return {k, cla};
  }
  // Class mismatch: scores only when a border is involved; row from the
  // first argument's character.
  if (ra == PositionRole::Border || rb == PositionRole::Border)
    return {EventKind::BorderNoMatch, cla};
  return {EventKind::NoEvent, CharClass::Space};
}

struct PairEvents {
  // occurrence count per map element
  std::array<std::array<int, kMapCols>, kMapRows> count{};
  int active_columns = 0;
  double weight_sum(const FeatureScoreMap& m) const {
    double s = 0;
    for (int r = 0; r < kMapRows; ++r)
      for (int c = 0; c < kMapCols; ++c) s += count[static_cast<size_t>(r)][static_cast<size_t>(c)] * m.at(r, c);
    return s;
  }
  int total_events() const {
    int n = 0;
    for (const auto& row : count)
      for (int v : row) n += v;
    return n;
  }
};

inline PairEvents enumerate_events(std::string_view a, std::string_view b) {
  auto ca = decode_columns(a);
  auto cb = decode_columns(b);
  auto ra = position_roles(ca);
  auto rb = position_roles(cb);
  size_t n = std::max(ca.size(), cb.size());
  PairEvents ev;
  for (size_t i = 0; i < n; ++i) {
    char32_t xa = i < ca.size() ? ca[i] : U' ';
    char32_t xb = i < cb.size() ? cb[i] : U' ';
    PositionRole pa = i < ra.size() ? ra[i] : PositionRole::Blank;
    PositionRole pb = i < rb.size() ? rb[i] : PositionRole::Blank;
    bool active = pa != PositionRole::Blank || pb != PositionRole::Blank;
    if (active) ++ev.active_columns;
    ScoreEvent e = classify_event(xa, pa, xb, pb);
    if (e.kind == EventKind::NoEvent) continue;
    int row = class_row(e.cls);
    ++ev.count[static_cast<size_t>(row)][static_cast<size_t>(static_cast<int>(e.kind))];
  }
  return ev;
}

// Normalized formatting similarity: 100 * sum(weights) / (N_active * mean(m)).
// Exactly map-scale invariant; two empty lines score 0.
inline double compare_lines(std::string_view a, std::string_view b, const FeatureScoreMap& m) {
  double s = m.sum();
  if (!(s > 0)) throw std::invalid_argument("degenerate score map");
  PairEvents ev = enumerate_events(a, b);
  if (ev.active_columns == 0) return 0.0;
  return 100.0 * ev.weight_sum(m) * (kMapRows * kMapCols) / (ev.active_columns * s);
}

// Scores with the (row, col) element swept over 1..9; the input map is
// untouched.
inline std::array<double, 9> vary_element(std::string_view a, std::string_view b,
                                          const FeatureScoreMap& m, int row, int col) {
  if (row < 0 || row >= kMapRows || col < 0 || col >= kMapCols)
    throw std::out_of_range("score map index");
  std::array<double, 9> out{};
  FeatureScoreMap probe = m;
  for (int v = 1; v <= 9; ++v) {
    probe.at(row, col) = v;
    out[static_cast<size_t>(v - 1)] = compare_lines(a, b, probe);
  }
  return out;
}

// Zeroes every element whose event never occurs for this pair. An element
// with no occurrences cannot move the raw feature sum, so dropping it
// raises the relative weight of the ones that fired.
inline FeatureScoreMap adapt_map(std::string_view a, std::string_view b, const FeatureScoreMap& m) {
  if (!(m.sum() > 0)) throw std::invalid_argument("degenerate score map");
  PairEvents ev = enumerate_events(a, b);
  if (ev.total_events() == 0) throw std::invalid_argument("no common features");
  FeatureScoreMap out = m;
  for (int r = 0; r < kMapRows; ++r)
    for (int c = 0; c < kMapCols; ++c)
      if (ev.count[static_cast<size_t>(r)][static_cast<size_t>(c)] == 0) out.at(r, c) = 0;
  return out;
}

inline bool element_influential(const PairEvents& ev, int row, int col) {
  return ev.count[static_cast<size_t>(row)][static_cast<size_t>(col)] > 0;
}

// Score-map file: three rows of five numbers, '#' comments allowed.
inline FeatureScoreMap parse_score_map(std::istream& in) {
  FeatureScoreMap m;
  int row = 0;
  std::string line;
  while (row < kMapRows && std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v;
    int col = 0;
    while (col < kMapCols && ls >> v) {
      if (v < 0) throw std::invalid_argument("score map: negative weight");
      m.at(row, col) = v;
      ++col;
    }
    if (col == 0) continue;  // blank/comment line
    if (col != kMapCols) throw std::invalid_argument("score map: expected 5 values per row");
    ++row;
  }
  if (row != kMapRows) throw std::invalid_argument("score map: expected 3 rows");
  if (!(m.sum() > 0)) throw std::invalid_argument("degenerate score map");
  return m;
}

inline void write_score_map(std::ostream& out, const FeatureScoreMap& m) {
  out << "# rows: Alpha Numeric Symbol\n"
      << "# cols: BodyFull BodyGroup BorderFull BorderGroup BorderNoMatch\n";
  for (int r = 0; r < kMapRows; ++r) {
    for (int c = 0; c < kMapCols; ++c) out << (c ? " " : "") << m.at(r, c);
    out << "\n";
  }
}

}  // namespace textstruct
