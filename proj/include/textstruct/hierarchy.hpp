#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace textstruct {

// Series symbols: template ids are >= 0, collapsed-pattern references are
// negative (-2, -3, ...). -1 stays reserved for blank lines.
using Series = std::vector<int>;

inline bool is_ref_symbol(int s) { return s <= -2; }

struct PatternNode {
  std::vector<int> header;
  std::vector<int> footer;
  std::vector<int> detail;         // leaf symbol sequence (detailed pattern)
  std::vector<PatternNode> child;  // at most one

  std::vector<int> flat_ids() const {
    std::vector<int> ids = header;
    if (child.empty())
      ids.insert(ids.end(), detail.begin(), detail.end());
    else {
      auto inner = child.front().flat_ids();
      ids.insert(ids.end(), inner.begin(), inner.end());
    }
    ids.insert(ids.end(), footer.begin(), footer.end());
    return ids;
  }
};

struct HierarchyResult {
  std::vector<PatternNode> structures;  // detail-bearing structure first
  std::vector<std::pair<int, std::string>> noise_log;
  std::vector<int> residue;  // ids that fit no pattern
  std::vector<std::string> trace;
};

namespace hdetail {

inline bool match_at(const Series& s, size_t pos, const std::vector<int>& seq) {
  if (pos + seq.size() > s.size()) return false;
  for (size_t k = 0; k < seq.size(); ++k)
    if (s[pos + k] != seq[k]) return false;
  return true;
}

}  // namespace hdetail

// Replaces every maximal run of k >= 1 consecutive occurrences of the
// pattern sequence with a single reference symbol. Leftmost-first,
// non-overlapping; unrelated symbols pass through. A truncated fragment is
// honored only at the series edges: a suffix of the pattern at the start or
// a prefix at the end, and only next to a full occurrence.
inline Series collapse_runs(const Series& s, const std::vector<int>& seq, int ref) {
  if (seq.empty()) throw std::invalid_argument("empty pattern");
  Series out;
  size_t i = 0;
  while (i < s.size()) {
    if (hdetail::match_at(s, i, seq)) {
      size_t j = i;
      while (hdetail::match_at(s, j, seq)) j += seq.size();
      // end-of-series truncation: proper prefix of the pattern
      if (j < s.size()) {
        size_t rem = s.size() - j;
        if (rem < seq.size() && hdetail::match_at(s, j, {seq.begin(), seq.begin() + static_cast<long>(rem)}))
          j = s.size();
      }
      out.push_back(ref);
      i = j;
      continue;
    }
    // start-of-series truncation: proper suffix followed by a full occurrence
    if (i == 0 && s.size() > 1) {
      bool absorbed = false;
      for (size_t cut = 1; cut < seq.size(); ++cut) {
        std::vector<int> suffix(seq.begin() + static_cast<long>(cut), seq.end());
        if (hdetail::match_at(s, 0, suffix) && hdetail::match_at(s, suffix.size(), seq)) {
          size_t j = suffix.size();
          while (hdetail::match_at(s, j, seq)) j += seq.size();
          if (j < s.size()) {
            size_t rem = s.size() - j;
            if (rem < seq.size() &&
                hdetail::match_at(s, j, {seq.begin(), seq.begin() + static_cast<long>(rem)}))
              j = s.size();
          }
          out.push_back(ref);
          i = j;
          absorbed = true;
          break;
        }
      }
      if (absorbed) continue;
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

struct Disagreement {
  bool footer_side = true;
  int offset = 0;               // 1-based distance from the reference symbol
  std::map<int, int> counts;    // context symbol -> occurrences (non-wildcard)
};

// Noise verdict for one disagreement: a >= 2/3 majority makes every
// minority symbol a candidate; the least frequent one in the series is
// returned (ties to the higher id). Protected ids are never noise.
inline std::optional<int> pick_noise(const Disagreement& d, const Series& series,
                                     const std::set<int>& protected_ids = {}) {
  if (d.counts.empty()) return std::nullopt;
  int total = 0;
  int best_sym = 0, best_count = -1;
  for (auto [sym, cnt] : d.counts) {
    total += cnt;
    if (cnt > best_count) { best_count = cnt; best_sym = sym; }
  }
  if (best_count * 3 < total * 2) return std::nullopt;  // no 2/3 majority
  std::optional<int> pick;
  long pick_freq = 0;
  for (auto [sym, cnt] : d.counts) {
    if (sym == best_sym || is_ref_symbol(sym) || protected_ids.count(sym)) continue;
    long freq = static_cast<long>(std::count(series.begin(), series.end(), sym));
    if (!pick || freq < pick_freq || (freq == pick_freq && sym > *pick)) {
      pick = sym;
      pick_freq = freq;
    }
  }
  return pick;
}

struct GrowResult {
  std::vector<int> header;
  std::vector<int> footer;
  std::optional<Disagreement> footer_dis;  // first disagreement per side
  std::optional<Disagreement> header_dis;
};

namespace hdetail {

struct SideProbe {
  enum class State { Extend, Wildcard, Stop, Disagree } state = State::Stop;
  int symbol = 0;
  int evidence = 0;
  Disagreement dis;
};

// Context one symbol beyond the committed footer (or before the header) at
// every occurrence of the reference symbol. Positions claimed by another
// occurrence or holding a reference mean the pattern is adjacent to itself:
// the side is complete.
inline SideProbe probe_side(const Series& s, const std::vector<size_t>& occ, int hl, int fl,
                            bool footer_side) {
  SideProbe p;
  auto claimed = [&](long pos) {
    for (size_t o : occ) {
      long lo = static_cast<long>(o) - hl;
      long hi = static_cast<long>(o) + fl;
      if (pos >= lo && pos <= hi) return true;
    }
    return false;
  };
  std::map<int, int> counts;
  bool any_blocked = false;
  int wildcards = 0;
  for (size_t o : occ) {
    long pos = footer_side ? static_cast<long>(o) + fl + 1 : static_cast<long>(o) - hl - 1;
    if (pos < 0 || pos >= static_cast<long>(s.size())) { ++wildcards; continue; }
    if (claimed(pos) || is_ref_symbol(s[static_cast<size_t>(pos)])) { any_blocked = true; continue; }
    ++counts[s[static_cast<size_t>(pos)]];
  }
  if (any_blocked || counts.empty()) {
    p.state = counts.empty() && !any_blocked ? SideProbe::State::Wildcard : SideProbe::State::Stop;
    return p;
  }
  if (counts.size() == 1) {
    p.state = SideProbe::State::Extend;
    p.symbol = counts.begin()->first;
    p.evidence = counts.begin()->second;
    return p;
  }
  p.state = SideProbe::State::Disagree;
  p.dis.footer_side = footer_side;
  p.dis.offset = footer_side ? fl + 1 : hl + 1;
  p.dis.counts = counts;
  return p;
}

}  // namespace hdetail

// Grows the longest header/footer context shared by every occurrence of the
// reference symbol. Series boundaries act as wildcards; growth on a side
// stops at another reference, at a position already consumed by a
// neighboring occurrence, or at the first disagreement (which is reported).
inline GrowResult grow_parent(const Series& s, int ref) {
  GrowResult g;
  std::vector<size_t> occ;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] == ref) occ.push_back(i);
  if (occ.empty()) throw std::invalid_argument("reference symbol absent");

  bool header_open = true, footer_open = true;
  std::optional<Disagreement> header_dis, footer_dis;
  while (header_open || footer_open) {
    int hl = static_cast<int>(g.header.size());
    int fl = static_cast<int>(g.footer.size());
    hdetail::SideProbe pf, ph;
    if (footer_open) pf = hdetail::probe_side(s, occ, hl, fl, true);
    if (header_open) ph = hdetail::probe_side(s, occ, hl, fl, false);

    bool can_f = footer_open && pf.state == hdetail::SideProbe::State::Extend;
    bool can_h = header_open && ph.state == hdetail::SideProbe::State::Extend;
    if (can_f && can_h) {
      // more agreeing occurrences wins; ties favor the footer
      if (ph.evidence > pf.evidence) can_f = false;
      else can_h = false;
    }
    if (can_f) {
      g.footer.push_back(pf.symbol);
      continue;
    }
    if (can_h) {
      g.header.insert(g.header.begin(), ph.symbol);
      continue;
    }
    if (footer_open) {
      if (pf.state == hdetail::SideProbe::State::Disagree) footer_dis = pf.dis;
      footer_open = false;
    }
    if (header_open) {
      if (ph.state == hdetail::SideProbe::State::Disagree) header_dis = ph.dis;
      header_open = false;
    }
  }
  g.footer_dis = footer_dis;
  g.header_dis = header_dis;
  return g;
}

namespace hdetail {

// Seed motif: the repeating unit of the first maximal consecutive run of
// detail symbols that covers all of them.
inline std::vector<int> find_seed(const Series& s, const std::set<int>& detail_ids) {
  size_t i = 0;
  while (i < s.size()) {
    if (!detail_ids.count(s[i])) { ++i; continue; }
    size_t j = i;
    std::set<int> seen;
    while (j < s.size() && detail_ids.count(s[j])) seen.insert(s[j++]);
    if (seen.size() == detail_ids.size()) {
      std::vector<int> run(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(j));
      // smallest period whose unit covers every detail id
      for (size_t p = 1; p <= run.size(); ++p) {
        bool periodic = true;
        for (size_t k = p; k < run.size() && periodic; ++k)
          if (run[k] != run[k - p]) periodic = false;
        if (!periodic) continue;
        std::set<int> unit(run.begin(), run.begin() + static_cast<long>(p));
        if (unit.size() == detail_ids.size())
          return {run.begin(), run.begin() + static_cast<long>(p)};
      }
    }
    i = j;
  }
  return {};
}

// Most frequent motif occurring as adjacent repeats; ties go to the longer
// motif, then to the earlier one.
inline std::vector<int> find_repeat_motif(const Series& s) {
  std::vector<int> best;
  long best_freq = 0;
  for (size_t len = 1; len <= s.size() / 2; ++len) {
    for (size_t start = 0; start + 2 * len <= s.size(); ++start) {
      std::vector<int> motif(s.begin() + static_cast<long>(start),
                             s.begin() + static_cast<long>(start + len));
      if (start >= len && match_at(s, start - len, motif)) continue;  // not maximal
      if (!match_at(s, start + len, motif)) continue;
      // total adjacent occurrences of this motif anywhere in the series
      long freq = 0;
      size_t i = 0;
      while (i < s.size()) {
        if (match_at(s, i, motif)) {
          long reps = 0;
          while (match_at(s, i, motif)) { ++reps; i += len; }
          if (reps >= 2) freq += reps;
        } else {
          ++i;
        }
      }
      if (freq > best_freq || (freq == best_freq && len > best.size())) {
        best = motif;
        best_freq = freq;
      }
    }
  }
  return best;
}

struct LevelInfo {
  std::vector<int> header;
  std::vector<int> footer;
};

struct EngineOutcome {
  bool noise = false;
  int noise_id = 0;
  std::string noise_reason;
  std::vector<LevelInfo> levels;
  Series final_series;
};

inline Series collapse_level(const Series& s, const std::vector<int>& header, int ref,
                             const std::vector<int>& footer, int new_ref) {
  std::vector<int> seq = header;
  seq.push_back(ref);
  seq.insert(seq.end(), footer.begin(), footer.end());
  return collapse_runs(s, seq, new_ref);
}

// One full collapsing pass over a fixed series: grows levels until no side
// can extend, or reports the first noise verdict.
inline EngineOutcome run_levels(Series cur, const std::vector<int>& seed,
                                const std::set<int>& protected_ids,
                                std::vector<std::string>* trace) {
  EngineOutcome out;
  int ref = -2;
  cur = collapse_runs(cur, seed, ref);
  std::set<int> pattern_ids(seed.begin(), seed.end());

  size_t guard = cur.size() + 2;
  while (guard-- > 0) {
    if (std::count(cur.begin(), cur.end(), ref) == 0) break;
    GrowResult g = grow_parent(cur, ref);
    std::set<int> pat = pattern_ids;
    for (int h : g.header) pat.insert(h);
    for (int f : g.footer) pat.insert(f);
    // footer verdict first; the header side gets a say when the footer split
    // is structural (majority symbol already belongs to the pattern) or
    // carries no 2/3 majority
    for (const auto& dis : {g.footer_dis, g.header_dis}) {
      if (!dis) continue;
      const Disagreement& d = *dis;
      int best_sym = 0, best_count = -1;
      for (auto [sym, cnt] : d.counts)
        if (cnt > best_count) { best_count = cnt; best_sym = sym; }
      if (pat.count(best_sym) > 0) continue;  // pattern completing itself
      auto verdict = pick_noise(d, cur, protected_ids);
      if (verdict) {
        out.noise = true;
        out.noise_id = *verdict;
        std::ostringstream reason;
        reason << (d.footer_side ? "footer" : "header") << " context at offset " << d.offset
               << " split";
        for (auto [sym, cnt] : d.counts) reason << " " << sym << ":" << cnt;
        out.noise_reason = reason.str();
        if (trace)
          trace->push_back("noise " + std::to_string(*verdict) + " (" + out.noise_reason + ")");
        out.final_series = std::move(cur);
        return out;
      }
      if (trace) {
        std::ostringstream msg;
        msg << "growth stopped, no majority at " << (d.footer_side ? "footer" : "header")
            << " offset " << d.offset << ":";
        for (auto [sym, cnt] : d.counts) msg << " " << sym << ":" << cnt;
        trace->push_back(msg.str());
      }
    }
    if (g.header.empty() && g.footer.empty()) break;
    out.levels.push_back({g.header, g.footer});
    for (int h : g.header) pattern_ids.insert(h);
    for (int f : g.footer) pattern_ids.insert(f);
    int new_ref = ref - 1;
    cur = collapse_level(cur, g.header, ref, g.footer, new_ref);
    ref = new_ref;
  }
  out.final_series = std::move(cur);
  return out;
}

inline PatternNode assemble(const std::vector<int>& seed, const std::vector<LevelInfo>& levels) {
  PatternNode node;
  node.detail = seed;
  for (const auto& lv : levels) {
    PatternNode parent;
    parent.header = lv.header;
    parent.footer = lv.footer;
    parent.child.push_back(std::move(node));
    node = std::move(parent);
  }
  return node;
}

inline void analyze_structures(const Series& input, std::vector<int> seed,
                               const std::set<int>& detail_ids, HierarchyResult& result, int depth);

// Collapsing + noise-removal iterations with restart after each removal.
inline void analyze_structures(const Series& input, std::vector<int> seed,
                               const std::set<int>& detail_ids, HierarchyResult& result,
                               int depth) {
  if (depth > 6 || seed.empty()) {
    std::set<int> ids(input.begin(), input.end());
    for (int id : ids)
      if (!is_ref_symbol(id)) result.residue.push_back(id);
    return;
  }
  std::set<int> protected_ids(seed.begin(), seed.end());
  std::set<int> removed;
  EngineOutcome out;
  size_t max_removals = std::set<int>(input.begin(), input.end()).size() + 1;
  for (size_t iter = 0; iter <= max_removals; ++iter) {
    Series work;
    for (int sym : input)
      if (!removed.count(sym)) work.push_back(sym);
    if (std::search(work.begin(), work.end(), seed.begin(), seed.end()) == work.end() &&
        !(seed.size() == 1 && std::count(work.begin(), work.end(), seed[0]) > 0)) {
      // seed vanished; everything left is residue
      std::set<int> ids(work.begin(), work.end());
      for (int id : ids) result.residue.push_back(id);
      return;
    }
    out = run_levels(work, seed, protected_ids, &result.trace);
    if (!out.noise) break;
    removed.insert(out.noise_id);
    result.noise_log.emplace_back(out.noise_id, out.noise_reason);
  }

  result.structures.push_back(assemble(seed, out.levels));

  // leftover plain symbols in the collapsed series fit no pattern
  std::set<int> structure_ids;
  for (int id : result.structures.back().flat_ids()) structure_ids.insert(id);
  std::set<int> leftovers;
  for (int sym : out.final_series)
    if (!is_ref_symbol(sym) && !structure_ids.count(sym) && !removed.count(sym))
      leftovers.insert(sym);
  for (int id : leftovers) result.residue.push_back(id);

  if (removed.empty()) return;
  Series noise_sub;
  for (int sym : input)
    if (removed.count(sym)) noise_sub.push_back(sym);
  std::vector<int> motif = find_repeat_motif(noise_sub);
  if (motif.empty()) {
    for (int id : removed) result.residue.push_back(id);
    return;
  }
  analyze_structures(noise_sub, motif, {motif.begin(), motif.end()}, result, depth + 1);
}

}  // namespace hdetail

// Full pipeline: seed from the detail templates, iterative collapse with
// noise removal, then recursive analysis of the removed noise.
inline HierarchyResult build_hierarchy(const Series& series, const std::set<int>& detail_ids) {
  if (detail_ids.empty()) throw std::invalid_argument("no detail templates");
  for (int id : detail_ids)
    if (std::count(series.begin(), series.end(), id) == 0)
      throw std::invalid_argument("detail template absent from series");
  HierarchyResult result;
  std::vector<int> seed = hdetail::find_seed(series, detail_ids);
  if (seed.empty()) throw std::invalid_argument("detail templates never run consecutively");
  hdetail::analyze_structures(series, seed, detail_ids, result, 0);
  return result;
}

inline void render_pattern(std::ostream& os, const PatternNode& p) {
  os << "[";
  bool first = true;
  auto emit = [&](const std::string& tok) {
    if (!first) os << ", ";
    os << tok;
    first = false;
  };
  for (int h : p.header) emit(std::to_string(h));
  if (!p.child.empty()) {
    if (!first) os << ", ";
    render_pattern(os, p.child.front());
    first = false;
  } else {
    for (int d : p.detail) emit(std::to_string(d));
  }
  for (int f : p.footer) emit(std::to_string(f));
  os << "]";
}

inline std::string render_dss(const HierarchyResult& r) {
  std::ostringstream os;
  for (size_t i = 0; i < r.structures.size(); ++i) {
    if (i) os << " / ";
    render_pattern(os, r.structures[i]);
  }
  return os.str();
}

}  // namespace textstruct
