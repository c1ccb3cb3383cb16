#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "textstruct/chars.hpp"
#include "textstruct/score_map.hpp"

namespace textstruct {

inline constexpr int kBlankTemplateId = -1;

enum class Role : uint8_t { Body, Heading, Decor, Detail };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::Body: return "body";
    case Role::Heading: return "heading";
    case Role::Decor: return "decor";
    case Role::Detail: return "detail";
  }
  return "body";
}

struct FieldSpan {
  int start = 0;  // 1-based, inclusive
  int end = 0;
  bool operator==(const FieldSpan&) const = default;
};

struct MaskColumn {
  bool literal = false;
  char32_t literal_char = U' ';
  std::set<CharClass> classes;  // observed classes when not literal
  bool optional = false;        // blank in at least one member
};

struct Template {
  int id = 0;
  size_t reference_line = 0;           // index into the sample
  std::vector<size_t> members;         // sample line indices, ascending
  std::optional<double> threshold;     // none for singleton templates
  FeatureScoreMap adapted_map;
  std::vector<FieldSpan> field_layout;
  std::string key_name;
  std::vector<MaskColumn> mask;
  Role role = Role::Body;
  std::string reference_text;
};

struct TemplateSet {
  std::vector<Template> templates;
};

struct SeriesEntry {
  size_t line = 0;  // 1-based line number
  int template_id = 0;
};
using TemplateSeries = std::vector<SeriesEntry>;

struct DetectOptions {
  size_t sample_size = 200;
  double min_similarity = 50.0;
  bool adaptive = true;
  double decor_symbol_fraction = 0.8;
  double heading_digit_fraction = 0.05;
};

// Midpoint of the largest gap between consecutive distinct values; ties on
// gap size resolve to the highest-valued gap.
inline double gap_threshold(std::vector<double> scores) {
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  if (scores.size() < 2) throw std::invalid_argument("no gap");
  double best = -1;
  double mid = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    double gap = scores[i] - scores[i - 1];
    if (gap >= best) {
      best = gap;
      mid = (scores[i] + scores[i - 1]) / 2.0;
    }
  }
  return mid;
}

// A column is a separator iff it is blank in every member; fields are the
// maximal non-separator runs.
inline std::pair<std::vector<FieldSpan>, std::string> build_field_layout(
    const std::vector<std::string>& members) {
  if (members.empty()) throw std::invalid_argument("no members");
  std::vector<std::vector<char32_t>> cols;
  size_t width = 0;
  for (const auto& m : members) {
    cols.push_back(decode_columns(m));
    width = std::max(width, cols.back().size());
  }
  std::vector<bool> separator(width, true);
  for (const auto& c : cols)
    for (size_t i = 0; i < c.size(); ++i)
      if (!is_space_cp(c[i])) separator[i] = false;

  std::vector<FieldSpan> fields;
  std::string key;
  size_t i = 0;
  while (i < width) {
    if (separator[i]) { ++i; continue; }
    size_t j = i;
    while (j < width && !separator[j]) ++j;
    fields.push_back({static_cast<int>(i + 1), static_cast<int>(j)});
    if (!key.empty()) key += '-';
    key += std::to_string(i + 1);
    i = j;
  }
  return {fields, key};
}

inline std::vector<MaskColumn> build_mask(const std::vector<std::string>& members) {
  std::vector<std::vector<char32_t>> cols;
  size_t width = 0;
  for (const auto& m : members) {
    cols.push_back(decode_columns(m));
    width = std::max(width, cols.back().size());
  }
  std::vector<MaskColumn> mask(width);
  for (size_t i = 0; i < width; ++i) {
    std::set<char32_t> chars;
    bool any_blank = false;
    for (const auto& c : cols) {
      char32_t ch = i < c.size() ? c[i] : U' ';
      chars.insert(ch);
      if (is_space_cp(ch)) any_blank = true;
    }
    MaskColumn& mc = mask[i];
    mc.optional = any_blank;
    if (chars.size() == 1) {
      mc.literal = true;
      mc.literal_char = *chars.begin();
    } else {
      for (char32_t ch : chars)
        if (!is_space_cp(ch)) mc.classes.insert(classify_char(ch));
    }
  }
  return mask;
}

namespace detail {

inline void line_char_stats(const std::vector<std::string>& members, long& nonspace, long& symbols,
                            long& digits) {
  nonspace = symbols = digits = 0;
  for (const auto& m : members)
    for (char32_t c : decode_columns(m)) {
      CharClass cl = classify_char(c);
      if (cl == CharClass::Space) continue;
      ++nonspace;
      if (cl == CharClass::Symbol) ++symbols;
      if (cl == CharClass::Numeric) ++digits;
    }
}

}  // namespace detail

// First matching rule wins: decor, heading, detail, body.
inline Role classify_role(const std::vector<std::string>& member_lines, size_t member_count,
                          size_t max_member_count, const DetectOptions& opts) {
  long nonspace, symbols, digits;
  detail::line_char_stats(member_lines, nonspace, symbols, digits);
  if (nonspace > 0 && static_cast<double>(symbols) / static_cast<double>(nonspace) >= opts.decor_symbol_fraction)
    return Role::Decor;
  bool identical = true;
  for (size_t i = 1; i < member_lines.size(); ++i)
    if (rstrip(member_lines[i]) != rstrip(member_lines[0])) { identical = false; break; }
  if (identical && nonspace > 0 &&
      static_cast<double>(digits) / static_cast<double>(nonspace) < opts.heading_digit_fraction)
    return Role::Heading;
  if (member_count == max_member_count) return Role::Detail;
  return Role::Body;
}

inline bool is_blank_line(std::string_view s) {
  return rstrip(s).empty();
}

// Sequential compare-against-all clustering over the sample with gap-based
// thresholds and per-template adaptive maps.
inline std::pair<TemplateSet, TemplateSeries> detect_templates(
    const std::vector<std::string>& lines, const FeatureScoreMap& m, const DetectOptions& opts = {}) {
  if (lines.empty()) throw std::invalid_argument("empty document");
  size_t sample = std::min(opts.sample_size, lines.size());
  bool any = false;
  for (size_t i = 0; i < sample; ++i)
    if (!is_blank_line(lines[i])) any = true;
  if (!any) throw std::invalid_argument("empty document");

  std::vector<int> assigned(sample, std::numeric_limits<int>::min());
  for (size_t i = 0; i < sample; ++i)
    if (is_blank_line(lines[i])) assigned[i] = kBlankTemplateId;

  TemplateSet ts;
  int next_id = 0;
  for (size_t i = 0; i < sample; ++i) {
    if (assigned[i] != std::numeric_limits<int>::min()) continue;
    // scores are computed against every other non-blank sample line (marked
    // ones included) so the gap statistic always sees the dissimilar mass;
    // only unmarked lines are eligible as members
    std::vector<size_t> others;
    for (size_t j = 0; j < sample; ++j)
      if (j != i && assigned[j] != kBlankTemplateId) others.push_back(j);

    Template t;
    t.id = next_id++;
    t.reference_line = i;
    t.reference_text = rstrip(lines[i]);
    t.adapted_map = m;
    t.members = {i};

    if (!others.empty()) {
      std::vector<double> scores(others.size());
      for (size_t k = 0; k < others.size(); ++k)
        scores[k] = compare_lines(lines[i], lines[others[k]], m);

      if (opts.adaptive) {
        size_t best = 0;
        for (size_t k = 1; k < others.size(); ++k)
          if (scores[k] > scores[best]) best = k;
        if (scores[best] >= opts.min_similarity) {
          // adaptation needs a trusted similar exemplar
          t.adapted_map = adapt_map(lines[i], lines[others[best]], m);
          for (size_t k = 0; k < others.size(); ++k)
            scores[k] = compare_lines(lines[i], lines[others[k]], t.adapted_map);
        }
      }

      std::vector<double> distinct = scores;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      if (distinct.size() >= 2) {
        double thr = std::max(gap_threshold(distinct), opts.min_similarity);
        t.threshold = thr;
        for (size_t k = 0; k < others.size(); ++k)
          if (scores[k] >= thr && assigned[others[k]] == std::numeric_limits<int>::min())
            t.members.push_back(others[k]);
        std::sort(t.members.begin(), t.members.end());
      }
      // < 2 distinct values: singleton template, threshold stays unset
    }

    for (size_t mline : t.members) assigned[mline] = t.id;
    ts.templates.push_back(std::move(t));
  }

  // per-template statistics
  size_t max_count = 0;
  for (const auto& t : ts.templates) max_count = std::max(max_count, t.members.size());
  for (auto& t : ts.templates) {
    std::vector<std::string> member_lines;
    for (size_t idx : t.members) member_lines.push_back(rstrip(lines[idx]));
    auto [fields, key] = build_field_layout(member_lines);
    t.field_layout = std::move(fields);
    t.key_name = std::move(key);
    t.mask = build_mask(member_lines);
    t.role = classify_role(member_lines, t.members.size(), max_count, opts);
  }

  TemplateSeries series;
  for (size_t i = 0; i < sample; ++i)
    if (assigned[i] != kBlankTemplateId) series.push_back({i + 1, assigned[i]});
  return {std::move(ts), std::move(series)};
}

// Best-scoring template whose threshold admits the line; ties go to the
// lowest id. Singleton templates match by exact equality only.
inline std::optional<int> match_line(std::string_view line, const TemplateSet& ts) {
  if (ts.templates.empty()) throw std::invalid_argument("empty template set");
  std::string stripped = rstrip(line);
  if (stripped.empty()) return std::nullopt;
  std::optional<int> best_id;
  double best_score = -1;
  for (const auto& t : ts.templates) {
    double score;
    if (stripped == t.reference_text) {
      // exact equality always wins; a reference line's own score under the
      // adapted map can land below its template's threshold
      score = std::numeric_limits<double>::infinity();
    } else if (!t.threshold) {
      continue;  // singletons match by equality only
    } else {
      score = compare_lines(stripped, t.reference_text, t.adapted_map);
      if (score < *t.threshold) continue;
    }
    if (score > best_score) {
      best_score = score;
      best_id = t.id;
    }
  }
  return best_id;
}

// Template-id series over the whole document: sample lines keep their
// assignment, the rest go through match_line. Unmatched lines are skipped.
inline TemplateSeries full_series(const std::vector<std::string>& lines, const TemplateSet& ts,
                                  const TemplateSeries& sample_series, size_t sample_size,
                                  size_t* unmatched = nullptr) {
  TemplateSeries series = sample_series;
  size_t skipped = 0;
  for (size_t i = std::min(sample_size, lines.size()); i < lines.size(); ++i) {
    if (is_blank_line(lines[i])) continue;
    auto id = match_line(lines[i], ts);
    if (id)
      series.push_back({i + 1, *id});
    else
      ++skipped;
  }
  if (unmatched) *unmatched = skipped;
  return series;
}

}  // namespace textstruct
