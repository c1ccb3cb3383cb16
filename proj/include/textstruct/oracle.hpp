#pragma once

// Brute-force reference implementations used by the test and acceptance
// suites. Deliberately written from the contract alone, sharing no logic
// with score_map.hpp or hierarchy.hpp.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "textstruct/score_map.hpp"

namespace textstruct::oracle {

// Naive per-column event counter with its own classing and word scanning.
inline double oracle_score(std::string_view a, std::string_view b, const FeatureScoreMap& m) {
  double total_weight = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 5; ++c) total_weight += m.at(r, c);
  if (total_weight <= 0) throw std::invalid_argument("degenerate score map");

  auto widen = [](std::string_view s) {
    // byte-per-column for ASCII; multibyte UTF-8 folded to one slot
    std::vector<unsigned> out;
    for (size_t i = 0; i < s.size();) {
      unsigned char ch = static_cast<unsigned char>(s[i]);
      if (ch < 0x80) { out.push_back(ch); ++i; }
      else {
        size_t j = i + 1;
        while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80) ++j;
        out.push_back(0x100);  // opaque non-ascii slot
        i = j;
      }
    }
    return out;
  };
  auto wa = widen(a);
  auto wb = widen(b);
  size_t n = std::max(wa.size(), wb.size());
  wa.resize(n, ' ');
  wb.resize(n, ' ');

  auto is_sp = [](unsigned c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; };
  // 0 alpha, 1 numeric, 2 symbol, 3 space
  auto cls = [&](unsigned c) -> int {
    if (is_sp(c)) return 3;
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return 0;
    if (c >= '0' && c <= '9') return 1;
    if (c >= 0xC0 && c <= 0xFF && c != 0xD7 && c != 0xF7) return 0;
    return 2;
  };
  // true when column i is the first or last column of its word
  auto border = [&](const std::vector<unsigned>& w, size_t i) {
    if (is_sp(w[i])) return false;
    bool left = i == 0 || is_sp(w[i - 1]);
    bool right = i + 1 >= w.size() || is_sp(w[i + 1]);
    return left || right;
  };

  double earned = 0;
  long active = 0;
  for (size_t i = 0; i < n; ++i) {
    int ca = cls(wa[i]);
    int cb = cls(wb[i]);
    if (ca == 3 && cb == 3) continue;
    ++active;
    if (ca == 3 || cb == 3) continue;  // one-sided blank: active, no reward
    bool ba = border(wa, i);
    bool bb = border(wb, i);
    if (ca == cb) {
      bool body = !ba && !bb;
      int col = body ? (wa[i] == wb[i] ? 0 : 1) : (wa[i] == wb[i] ? 2 : 3);
      earned += m.at(ca, col);
    } else if (ba || bb) {
      earned += m.at(ca, 4);
    }
  }
  if (active == 0) return 0.0;
  return 100.0 * earned * 15.0 / (static_cast<double>(active) * total_weight);
}

struct RepeatMotif {
  std::vector<int> motif;
  std::vector<size_t> run_starts;  // start index of each maximal run
  std::vector<int> run_lengths;    // repeats per run
};

// Exhaustive O(n^3) finder of every motif that occurs as >= 2 adjacent
// repeats somewhere in the series.
inline std::vector<RepeatMotif> oracle_repeats(const std::vector<int>& series) {
  std::vector<RepeatMotif> found;
  size_t n = series.size();
  for (size_t len = 1; len <= n / 2; ++len) {
    for (size_t start = 0; start + 2 * len <= n; ++start) {
      // maximal run of the motif beginning at start
      int reps = 1;
      while (start + static_cast<size_t>(reps + 1) * len <= n &&
             std::equal(series.begin() + static_cast<long>(start),
                        series.begin() + static_cast<long>(start + len),
                        series.begin() + static_cast<long>(start + static_cast<size_t>(reps) * len)))
        ++reps;
      if (reps < 2) continue;
      // skip if not maximal on the left (same motif one period earlier)
      if (start >= len &&
          std::equal(series.begin() + static_cast<long>(start - len),
                     series.begin() + static_cast<long>(start),
                     series.begin() + static_cast<long>(start)))
        continue;
      std::vector<int> motif(series.begin() + static_cast<long>(start),
                             series.begin() + static_cast<long>(start + len));
      auto it = std::find_if(found.begin(), found.end(),
                             [&](const RepeatMotif& r) { return r.motif == motif; });
      if (it == found.end()) {
        found.push_back({motif, {start}, {reps}});
      } else {
        it->run_starts.push_back(start);
        it->run_lengths.push_back(reps);
      }
    }
  }
  return found;
}

}  // namespace textstruct::oracle
