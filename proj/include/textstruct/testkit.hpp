#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "textstruct/hierarchy.hpp"
#include "textstruct/oracle.hpp"
#include "textstruct/score_map.hpp"

namespace textstruct::testkit {

// --- verbatim figure-3 fixture pairs (single-spaced rendering) ---

inline std::string fig3_line1() {
  return "REPORT: MCDRA3 INVOICE VARIANCE REPORT RUN 4815 PAGE: 1";
}
inline std::string fig3_line55() {
  return "REPORT: MCDRA3 INVOICE VARIANCE REPORT RUN 4972 PAGE: 2";
}
inline std::string fig3_line7() {
  return "02610080575 8 CT 10 63.04 2.0000 8.0000 -6.0000 CT SHORT";
}
inline std::string fig3_line8() {
  return "292235 NEWPORT MTL BX FSC";
}
inline std::string fig3_line9() {
  return "02720001865 4 CT 10 54.74 2.0000 4.0000 -2.0000 CT SHORT";
}

// --- generator spec ---

enum class SegKind : uint8_t { Literal, Digits, Alpha };

struct Segment {
  int col = 1;  // 1-based
  SegKind kind = SegKind::Literal;
  std::string literal;
  int width = 0;  // for Digits/Alpha
};

struct TemplateGrammar {
  std::vector<Segment> segments;
};

struct LevelSpec {
  std::vector<int> header;  // grammar indices
  std::vector<int> footer;
  int min_repeat = 1;  // child instances per instance of this level
  int max_repeat = 1;
};

struct NoiseSpec {
  std::vector<int> block;  // grammar indices, injected as a unit
  int period = 0;          // minimum emitted lines between injections
};

struct StructureSpec {
  std::string builtin;  // "figure3" selects the built-in document
  std::vector<TemplateGrammar> grammars;
  std::vector<int> detail;       // innermost pattern, grammar indices
  std::vector<LevelSpec> levels; // innermost first
  std::optional<NoiseSpec> noise;
  int top_instances = 1;
  uint64_t seed = 0;
};

struct GroundTruth {
  std::vector<int> line_templates;  // discovery-order ids, -1 for blank/none
  std::string dss;
  std::vector<std::map<std::string, std::string>> records;
  size_t noise_injections = 0;
};

inline void validate_spec(const StructureSpec& spec) {
  if (spec.builtin == "figure3") return;
  if (!spec.builtin.empty()) throw std::invalid_argument("unknown builtin spec");
  if (spec.detail.empty()) throw std::invalid_argument("invalid spec: empty detail pattern");
  if (spec.top_instances < 1) throw std::invalid_argument("invalid spec: top_instances < 1");
  auto check_id = [&](int id) {
    if (id < 0 || static_cast<size_t>(id) >= spec.grammars.size())
      throw std::invalid_argument("invalid spec: grammar index out of range");
  };
  for (int id : spec.detail) check_id(id);
  for (const auto& lv : spec.levels) {
    if (lv.header.empty() && lv.footer.empty())
      throw std::invalid_argument("invalid spec: level with neither header nor footer");
    if (lv.min_repeat < 1 || lv.max_repeat < lv.min_repeat)
      throw std::invalid_argument("invalid spec: repeat counts");
    for (int id : lv.header) check_id(id);
    for (int id : lv.footer) check_id(id);
  }
  if (spec.noise) {
    if (spec.noise->block.empty() || spec.noise->period < 1)
      throw std::invalid_argument("invalid spec: noise block");
    for (int id : spec.noise->block) check_id(id);
  }
}

namespace tdetail {

inline void put(std::string& line, int col, std::string_view text) {
  size_t need = static_cast<size_t>(col - 1) + text.size();
  if (line.size() < need) line.resize(need, ' ');
  for (size_t i = 0; i < text.size(); ++i) line[static_cast<size_t>(col - 1) + i] = text[i];
}

inline std::string digits(std::mt19937_64& rng, int width) {
  std::string s;
  for (int i = 0; i < width; ++i) s += static_cast<char>('0' + rng() % 10);
  return s;
}

inline std::string letters(std::mt19937_64& rng, int width) {
  std::string s;
  for (int i = 0; i < width; ++i) s += static_cast<char>('A' + rng() % 26);
  return s;
}

inline std::string render(const TemplateGrammar& g, std::mt19937_64& rng) {
  std::string line;
  for (const auto& seg : g.segments) {
    switch (seg.kind) {
      case SegKind::Literal: put(line, seg.col, seg.literal); break;
      case SegKind::Digits: put(line, seg.col, digits(rng, seg.width)); break;
      case SegKind::Alpha: put(line, seg.col, letters(rng, seg.width)); break;
    }
  }
  return line;
}

inline std::string pad_left(const std::string& s, size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string money(long units, int cents) {
  std::ostringstream os;
  os << "(-" << units << "." << (cents < 10 ? "0" : "") << cents << ")";
  return os.str();
}

}  // namespace tdetail

// --- built-in figure-3 document -------------------------------------------
//
// 400 lines, 12 pages of 34 lines (5-line page header + 29 body lines).
// Body = divisions of groups; each group is a header line, item pairs, and a
// group total; each division closes with a division total. The layout is
// frozen so the first 200 lines cluster into exactly the Table-5 census.

struct Fig3Item {
  std::string upc, qty, um, pack, price, inv_val, mcl_val, variance, um2, adj;
  std::string desc_code, desc;
};

namespace tdetail {

inline const std::vector<std::vector<int>>& fig3_divisions() {
  static const std::vector<std::vector<int>> d = {
      {3, 6, 6, 4, 5}, {6, 6, 4, 3, 6}, {2, 3, 4, 4, 6},
      {2, 6, 6, 5},    {2, 4, 3, 3, 4, 2}, {4, 6, 4, 2, 6, 6, 3}};
  return d;
}

inline std::string fig3_page_header_line(int page) {
  std::string s;
  put(s, 1, "REPORT:");
  put(s, 9, "MCDRA3");
  put(s, 44, "INVOICE");
  put(s, 53, "VARIANCE");
  put(s, 63, "REPORT");
  put(s, 104, "RUN");
  put(s, 108, std::to_string(4815 + 157 * (page - 1)));
  put(s, 117, "PAGE:");
  put(s, 122, pad_left(std::to_string(page), 4));
  return s;
}

inline std::string fig3_program_line() {
  std::string s;
  put(s, 1, "PROGRAM:");
  put(s, 10, "ED89510");
  put(s, 20, "WALGREENVA INV SW");
  put(s, 70, "DATE: 09-20-17");
  put(s, 90, "TIME: 11:46:33");
  return s;
}

inline std::string fig3_banner_line() {
  std::string s;
  put(s, 53, "UPC/");
  put(s, 68, "INV");
  put(s, 91, "CUSTOMER");
  put(s, 101, "MCLANE");
  return s;
}

inline std::string fig3_columns_line() {
  std::string s;
  put(s, 1, "DIV");
  put(s, 5, "CUST-NUM");
  put(s, 14, "STORE");
  put(s, 21, "INV-VAR-ID");
  put(s, 42, "PO-NUM");
  put(s, 53, "UPC");
  put(s, 66, "QTY");
  put(s, 74, "UM");
  put(s, 80, "PACK");
  put(s, 86, "PRICE");
  put(s, 95, "VALUE");
  put(s, 103, "VALUE");
  put(s, 110, "VARIANCE");
  put(s, 123, "UM");
  put(s, 126, "ADJ-TYP");
  return s;
}

inline std::string fig3_rule_line() {
  std::string s;
  put(s, 1, "---");
  put(s, 5, "--------");
  put(s, 14, "------");
  put(s, 21, "-----------");
  put(s, 42, "------");
  put(s, 53, "-----------");
  put(s, 66, "---");
  put(s, 74, "--");
  put(s, 80, "----");
  put(s, 86, "------");
  put(s, 93, "--------");
  put(s, 101, "--------");
  put(s, 110, "--------");
  put(s, 123, "--");
  put(s, 126, "-------");
  return s;
}

inline std::string fig3_group_line(const std::string& cust, const std::string& store,
                                   const std::string& invvar, const std::string& po) {
  std::string s;
  put(s, 1, "SW");
  put(s, 5, cust);
  put(s, 14, store);
  put(s, 21, invvar);
  put(s, 42, po);
  return s;
}

inline std::string fig3_item_line(const Fig3Item& it) {
  std::string s;
  put(s, 53, it.upc);
  put(s, 66, pad_left(it.qty, 3));
  put(s, 74, it.um);
  put(s, 80, it.pack);
  put(s, 86, pad_left(it.price, 6));
  put(s, 93, pad_left(it.inv_val, 8));
  put(s, 101, pad_left(it.mcl_val, 8));
  put(s, 110, pad_left(it.variance, 8));
  put(s, 123, it.um2);
  put(s, 126, it.adj);
  return s;
}

inline std::string fig3_desc_line(const Fig3Item& it) {
  std::string s;
  put(s, 53, it.desc_code);
  put(s, 60, it.desc);
  return s;
}

inline std::string fig3_group_total_line(const std::string& amount) {
  std::string s;
  put(s, 24, "TOTAL");
  put(s, 30, "INVOICE");
  put(s, 38, "ADJUSTMENT");
  put(s, 62 - static_cast<int>(amount.size()) + 1, amount);
  return s;
}

inline std::string fig3_division_total_line(const std::string& amount) {
  std::string s;
  put(s, 22, "DIVISION");
  put(s, 31, "TOTAL");
  put(s, 37, "ADJUSTMENTS");
  put(s, 64 - static_cast<int>(amount.size()) + 1, amount);
  return s;
}

inline Fig3Item fig3_random_item(std::mt19937_64& rng) {
  static const char* words[] = {"NEWPORT", "PALL",  "MALL", "MTL",  "BX",   "FSC", "GOLD",
                                "SLIM",    "LT",    "MTHL", "KING", "BLUE", "RED", "SFT",
                                "PK",      "VIRG",  "SS",   "CIG",  "MARL", "CML"};
  Fig3Item it;
  it.upc = "0" + digits(rng, 10);
  it.qty = std::to_string(1 + rng() % 40);
  it.um = rng() % 2 ? "CT" : "EA";
  static const char* packs[] = {"10", "12", "15", "20"};
  it.pack = packs[rng() % 4];
  it.price = std::to_string(10 + rng() % 90) + "." + digits(rng, 2);
  it.inv_val = std::to_string(1 + rng() % 9) + ".0000";
  it.mcl_val = std::to_string(1 + rng() % 20) + ".0000";
  it.variance = "-" + std::to_string(1 + rng() % 9) + ".0000";
  it.um2 = "CT";
  it.adj = rng() % 2 ? "SHORT" : "PRICE";
  it.desc_code = digits(rng, 6);
  int nwords = 3 + static_cast<int>(rng() % 3);
  for (int w = 0; w < nwords; ++w) {
    if (w) it.desc += " ";
    it.desc += words[rng() % 20];
  }
  return it;
}

// the original report's first group, verbatim values
inline std::vector<Fig3Item> fig3_first_group_items() {
  std::vector<Fig3Item> items(3);
  items[0] = {"02610080575", "8", "CT", "10", "63.04", "2.0000", "8.0000", "-6.0000",
              "CT", "SHORT", "292235", "NEWPORT MTL BX FSC"};
  items[1] = {"02720001865", "4", "CT", "10", "54.74", "2.0000", "4.0000", "-2.0000",
              "CT", "SHORT", "358416", "PALL MALL MTHL 100 BX FSC"};
  items[2] = {"02820019830", "1", "CT", "10", "62.44", "1.0000", "1.0000", "-1.0000",
              "CT", "SHORT", "738708", "VIRG SL SS GOLD MTL BX FSC"};
  return items;
}

}  // namespace tdetail

inline std::pair<std::vector<std::string>, GroundTruth> gen_figure3(uint64_t seed = 7) {
  using namespace tdetail;
  std::mt19937_64 rng(seed);

  // body stream with truth ids 5..9
  std::vector<std::string> body;
  std::vector<int> body_ids;
  GroundTruth truth;
  bool first_group = true;
  for (const auto& groups : fig3_divisions()) {
    long div_units = 100 + static_cast<long>(rng() % 9900);
    std::string div_total = money(div_units, static_cast<int>(rng() % 100));
    for (int items : groups) {
      std::string cust, store, invvar, po, total;
      std::vector<Fig3Item> its;
      if (first_group) {
        cust = "01667949"; store = "004513"; invvar = "0130687732I"; po = "337261";
        total = "(-550.16)";
        its = fig3_first_group_items();
        first_group = false;
      } else {
        cust = "01" + digits(rng, 6);
        store = "00" + digits(rng, 4);
        invvar = "01307" + digits(rng, 5) + "I";
        po = digits(rng, 6);
        total = money(1 + static_cast<long>(rng() % 999), static_cast<int>(rng() % 100));
        for (int k = 0; k < items; ++k) its.push_back(fig3_random_item(rng));
      }
      body.push_back(fig3_group_line(cust, store, invvar, po));
      body_ids.push_back(5);
      for (const auto& it : its) {
        body.push_back(fig3_item_line(it));
        body_ids.push_back(6);
        body.push_back(fig3_desc_line(it));
        body_ids.push_back(7);
        truth.records.push_back({{"invvar", invvar},
                                 {"upc", it.upc},
                                 {"desc_code", it.desc_code},
                                 {"desc", it.desc},
                                 {"group_total", total}});
      }
      body.push_back(fig3_group_total_line(total));
      body_ids.push_back(8);
    }
    body.push_back(fig3_division_total_line(div_total));
    body_ids.push_back(9);
  }

  // paginate: 5 header lines + 29 body lines per page, 400 lines total
  const size_t kTotal = 400, kPageBody = 29;
  std::vector<std::string> lines;
  size_t bi = 0;
  int page = 0;
  while (lines.size() < kTotal && bi < body.size()) {
    ++page;
    lines.push_back(fig3_page_header_line(page));
    truth.line_templates.push_back(0);
    lines.push_back(fig3_program_line());
    truth.line_templates.push_back(1);
    lines.push_back(fig3_banner_line());
    truth.line_templates.push_back(2);
    lines.push_back(fig3_columns_line());
    truth.line_templates.push_back(3);
    lines.push_back(fig3_rule_line());
    truth.line_templates.push_back(4);
    for (size_t k = 0; k < kPageBody && lines.size() < kTotal && bi < body.size(); ++k, ++bi) {
      lines.push_back(body[bi]);
      truth.line_templates.push_back(body_ids[bi]);
    }
  }
  truth.noise_injections = static_cast<size_t>(page);
  truth.dss = "[[5, [6, 7], 8], 9] / [0, 1, 2, 3, 4]";
  // records for items never emitted (document cut at 400 lines)
  size_t emitted_pairs = 0;
  for (size_t k = 0; k < truth.line_templates.size(); ++k)
    if (truth.line_templates[k] == 7) ++emitted_pairs;
  truth.records.resize(emitted_pairs);
  return {std::move(lines), std::move(truth)};
}

// --- generic spec-driven generator ---

inline std::pair<std::vector<std::string>, GroundTruth> gen_document(const StructureSpec& spec) {
  validate_spec(spec);
  if (spec.builtin == "figure3") return gen_figure3(spec.seed ? spec.seed : 7);

  std::mt19937_64 rng(spec.seed);
  std::vector<std::string> lines;
  std::vector<int> raw_ids;  // grammar indices per line
  GroundTruth truth;
  size_t last_noise = 0;
  size_t injections = 0;

  auto emit = [&](int id) {
    lines.push_back(tdetail::render(spec.grammars[static_cast<size_t>(id)], rng));
    raw_ids.push_back(id);
  };
  // jittered injection distance so the noise never aliases with the
  // structure's own instance period (which would make it look like a header)
  size_t next_gap = spec.noise ? static_cast<size_t>(spec.noise->period) : 0;
  auto maybe_noise = [&]() {
    if (!spec.noise) return;
    if (lines.size() - last_noise < next_gap) return;
    for (int id : spec.noise->block) emit(id);
    last_noise = lines.size();
    ++injections;
    size_t p = static_cast<size_t>(spec.noise->period);
    next_gap = p + rng() % (p / 2 + 1);
  };

  // recursive emission; level -1 = one detail occurrence. Noise goes only
  // between detail occurrences of the same innermost instance: an injection
  // sitting exactly on an instance boundary is indistinguishable from a
  // legitimate header/footer once clean runs collapse, so the ground truth
  // would be ambiguous.
  auto emit_level = [&](auto&& self, int level, bool first_child) -> void {
    if (level < 0) {
      if (!first_child) maybe_noise();
      std::map<std::string, std::string> rec;
      for (size_t k = 0; k < spec.detail.size(); ++k) {
        emit(spec.detail[k]);
        rec["line" + std::to_string(k)] = lines.back();
      }
      truth.records.push_back(std::move(rec));
      return;
    }
    const LevelSpec& lv = spec.levels[static_cast<size_t>(level)];
    for (int id : lv.header) emit(id);
    int span = lv.max_repeat - lv.min_repeat + 1;
    int reps = lv.min_repeat + static_cast<int>(rng() % static_cast<uint64_t>(span));
    for (int r = 0; r < reps; ++r) self(self, level - 1, r == 0);
    for (int id : lv.footer) emit(id);
  };
  for (int t = 0; t < spec.top_instances; ++t)
    emit_level(emit_level, static_cast<int>(spec.levels.size()) - 1, t == 0);

  // discovery-order relabeling: ids in order of first appearance
  std::map<int, int> remap;
  for (int id : raw_ids)
    if (!remap.count(id)) {
      int next = static_cast<int>(remap.size());
      remap[id] = next;
    }
  for (int id : raw_ids) truth.line_templates.push_back(remap.at(id));

  PatternNode node;
  for (int id : spec.detail) node.detail.push_back(remap.at(id));
  for (const auto& lv : spec.levels) {
    PatternNode parent;
    for (int id : lv.header) parent.header.push_back(remap.at(id));
    for (int id : lv.footer) parent.footer.push_back(remap.at(id));
    parent.child.push_back(std::move(node));
    node = std::move(parent);
  }
  std::ostringstream os;
  render_pattern(os, node);
  if (spec.noise && injections > 0) {
    PatternNode noise_node;
    for (int id : spec.noise->block) noise_node.detail.push_back(remap.at(id));
    os << " / ";
    render_pattern(os, noise_node);
  }
  truth.dss = os.str();
  truth.noise_injections = injections;
  return {std::move(lines), std::move(truth)};
}

// --- randomized specs for round-trip testing ---
//
// Templates are constrained to be pairwise dissimilar (oracle score < 40
// between reference renders) so the ground truth is well-posed, and the
// detail pattern is guaranteed to be the strict majority of lines.

namespace tdetail {

inline TemplateGrammar random_grammar(std::mt19937_64& rng, bool force_digits) {
  static const char* words[] = {"TOTAL", "BATCH", "REGION", "STORE", "ORDER", "SHIP",
                                "ITEM",  "GROUP", "PAGE",   "SUM",   "CODE",  "END"};
  TemplateGrammar g;
  int col = 1 + static_cast<int>(rng() % 30);
  int nseg = 3 + static_cast<int>(rng() % 3);
  for (int s = 0; s < nseg; ++s) {
    Segment seg;
    seg.col = col;
    uint64_t k = rng() % 3;
    if (force_digits && s < 2) k = 1;
    switch (k) {
      case 0:
        seg.kind = SegKind::Literal;
        seg.literal = words[rng() % 12];
        col += static_cast<int>(seg.literal.size());
        break;
      case 1:
        seg.kind = SegKind::Digits;
        seg.width = 3 + static_cast<int>(rng() % 6);
        col += seg.width;
        break;
      default:
        seg.kind = SegKind::Alpha;
        seg.width = 3 + static_cast<int>(rng() % 6);
        col += seg.width;
        break;
    }
    col += 2 + static_cast<int>(rng() % 6);  // gap
    g.segments.push_back(seg);
  }
  return g;
}

inline bool pairwise_dissimilar(const std::vector<TemplateGrammar>& gs, std::mt19937_64& rng) {
  FeatureScoreMap m = default_score_map();
  std::vector<std::string> refs;
  for (const auto& g : gs) refs.push_back(render(g, rng));
  for (size_t a = 0; a < refs.size(); ++a)
    for (size_t b = a + 1; b < refs.size(); ++b)
      if (oracle::oracle_score(refs[a], refs[b], m) >= 40.0) return false;
  return true;
}

}  // namespace tdetail

inline StructureSpec random_spec(uint64_t seed, bool with_noise) {
  std::mt19937_64 rng(seed);
  StructureSpec spec;
  spec.seed = seed * 1000003 + 17;

  int depth = 1 + static_cast<int>(rng() % 3);       // levels above the detail
  int n_detail = 1 + static_cast<int>(rng() % 2);
  int n_noise = with_noise ? 1 + static_cast<int>(rng() % 2) : 0;

  for (int attempt = 0; attempt < 200; ++attempt) {
    spec.grammars.clear();
    spec.detail.clear();
    spec.levels.clear();
    spec.noise.reset();

    for (int d = 0; d < n_detail; ++d) {
      spec.detail.push_back(static_cast<int>(spec.grammars.size()));
      spec.grammars.push_back(tdetail::random_grammar(rng, true));
    }
    for (int l = 0; l < depth; ++l) {
      LevelSpec lv;
      bool has_header = rng() % 2 == 0;
      bool has_footer = !has_header || rng() % 2 == 0;
      if (has_header) {
        lv.header.push_back(static_cast<int>(spec.grammars.size()));
        spec.grammars.push_back(tdetail::random_grammar(rng, false));
      }
      if (has_footer) {
        lv.footer.push_back(static_cast<int>(spec.grammars.size()));
        spec.grammars.push_back(tdetail::random_grammar(rng, false));
      }
      if (l == 0) {
        lv.min_repeat = 2;  // detail must strictly dominate the line census
        lv.max_repeat = 4;
      } else {
        // repeats of 1 everywhere would make adjacent levels observationally
        // indistinguishable from a single merged level
        lv.min_repeat = 2;
        lv.max_repeat = 3;
      }
      spec.levels.push_back(std::move(lv));
    }
    if (n_noise > 0) {
      NoiseSpec ns;
      for (int k = 0; k < n_noise; ++k) {
        ns.block.push_back(static_cast<int>(spec.grammars.size()));
        spec.grammars.push_back(tdetail::random_grammar(rng, false));
      }
      ns.period = 1;  // placeholder, fixed below
      spec.noise = std::move(ns);
    }
    // noisy documents need enough pattern instances at every level for the
    // 2/3 majority rule; shallow hierarchies get extra top-level instances
    if (with_noise)
      spec.top_instances = depth == 1 ? 8 + static_cast<int>(rng() % 3)
                                      : 4 + static_cast<int>(rng() % 2);
    else
      spec.top_instances = 3 + static_cast<int>(rng() % 3);
    if (tdetail::pairwise_dissimilar(spec.grammars, rng)) break;
  }

  if (spec.noise) {
    // exactly 2 injections: one never forms an adjacent repeat, and more
    // would make the noise globally as frequent as a sparse structural
    // template, defeating the minority-frequency verdict
    StructureSpec dry = spec;
    dry.noise.reset();
    auto [lines, truth] = gen_document(dry);
    (void)truth;
    int period = std::max<int>(8, static_cast<int>(lines.size()) / 3);
    for (int tries = 0;; ++tries) {
      spec.noise->period = period;
      auto [nlines, ntruth] = gen_document(spec);
      (void)nlines;
      if (ntruth.noise_injections == 2) break;
      if (tries >= 40 || period <= 4) {
        spec.noise.reset();
        break;
      }
      if (ntruth.noise_injections > 2)
        period += std::max(1, period / 4);
      else
        period = std::max(4, period * 3 / 4);
    }
  }
  return spec;
}

}  // namespace textstruct::testkit
