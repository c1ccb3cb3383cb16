#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "textstruct/chars.hpp"
#include "textstruct/hierarchy.hpp"
#include "textstruct/templates.hpp"

namespace textstruct {

enum class BindingRole : uint8_t { Detail, Header, Footer, Page };

struct FieldBinding {
  std::string column;  // output column name
  int template_id = 0;
  FieldSpan span;
};

struct TemplateBinding {
  int template_id = 0;
  int level = 0;  // 0 = detail; page bindings use level -1
  BindingRole role = BindingRole::Detail;
  std::vector<FieldBinding> fields;
};

struct ExtractionPlan {
  std::vector<int> detail_templates;       // in pattern order
  std::vector<TemplateBinding> bindings;   // detail, per-level header/footer, page
  std::vector<std::string> columns;        // output schema, in emission order
  int levels = 0;
};

struct Record {
  std::map<std::string, std::string> fields;  // column -> trimmed value
  std::vector<size_t> provenance;             // contributing line numbers
  std::vector<int> group_indices;             // one per hierarchy level >= 1
};

struct ExtractStats {
  size_t skipped = 0;     // unmatched lines
  size_t incomplete = 0;  // detail occurrences missing a template
};

namespace edetail {

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string field_value(const std::string& line, const FieldSpan& span) {
  auto cols = decode_columns(line);
  if (span.start < 1 || static_cast<size_t>(span.start) > cols.size()) return "";
  size_t b = static_cast<size_t>(span.start - 1);
  size_t e = std::min(cols.size(), static_cast<size_t>(span.end));
  return trim(encode_utf8(cols, b, e));
}

inline const Template* find_template(const TemplateSet& ts, int id) {
  for (const auto& t : ts.templates)
    if (t.id == id) return &t;
  return nullptr;
}

inline std::vector<FieldBinding> make_fields(const Template& t, const std::string& prefix) {
  std::vector<FieldBinding> out;
  for (const auto& span : t.field_layout)
    out.push_back({prefix + "_C" + std::to_string(span.start), t.id, span});
  return out;
}

}  // namespace edetail

// Translates templates + hierarchy into the extraction configuration:
// detail bindings from the innermost pattern, header/footer bindings per
// enclosing level, page bindings from the body-role templates of the other
// structures.
inline ExtractionPlan build_plan(const TemplateSet& ts, const HierarchyResult& h) {
  const PatternNode* detail_structure = nullptr;
  for (const auto& s : h.structures) {
    const PatternNode* leaf = &s;
    while (!leaf->child.empty()) leaf = &leaf->child.front();
    bool has_detail = false;
    for (int id : leaf->detail) {
      const Template* t = edetail::find_template(ts, id);
      if (t && t->role == Role::Detail) has_detail = true;
    }
    if (has_detail) { detail_structure = &s; break; }
  }
  if (!detail_structure) throw std::invalid_argument("no detail level");

  ExtractionPlan plan;
  // walk from the outside in, then assign levels from the detail upward
  std::vector<const PatternNode*> chain;
  for (const PatternNode* n = detail_structure; n; n = n->child.empty() ? nullptr : &n->child.front())
    chain.push_back(n);
  std::reverse(chain.begin(), chain.end());  // chain[0] = leaf
  plan.levels = static_cast<int>(chain.size()) - 1;

  plan.detail_templates = chain[0]->detail;
  for (int id : plan.detail_templates) {
    const Template* t = edetail::find_template(ts, id);
    if (!t) throw std::invalid_argument("detail template missing from set");
    TemplateBinding b{id, 0, BindingRole::Detail,
                      edetail::make_fields(*t, "D_T" + std::to_string(id))};
    plan.bindings.push_back(std::move(b));
  }
  for (size_t lvl = 1; lvl < chain.size(); ++lvl) {
    const PatternNode* n = chain[lvl];
    for (int id : n->header) {
      const Template* t = edetail::find_template(ts, id);
      if (!t) continue;
      std::string prefix = "L" + std::to_string(lvl) + "_H_T" + std::to_string(id);
      plan.bindings.push_back({id, static_cast<int>(lvl), BindingRole::Header,
                               edetail::make_fields(*t, prefix)});
    }
    for (int id : n->footer) {
      const Template* t = edetail::find_template(ts, id);
      if (!t) continue;
      std::string prefix = "L" + std::to_string(lvl) + "_F_T" + std::to_string(id);
      plan.bindings.push_back({id, static_cast<int>(lvl), BindingRole::Footer,
                               edetail::make_fields(*t, prefix)});
    }
  }
  // body-role templates from the remaining structures
  for (const auto& s : h.structures) {
    if (&s == detail_structure) continue;
    for (int id : s.flat_ids()) {
      const Template* t = edetail::find_template(ts, id);
      if (!t || t->role != Role::Body) continue;
      plan.bindings.push_back({id, -1, BindingRole::Page,
                               edetail::make_fields(*t, "P_T" + std::to_string(id))});
    }
  }

  // column schema: page, headers outer-to-inner, detail, footers inner-to-outer
  auto add_cols = [&](BindingRole role, bool outer_first) {
    std::vector<const TemplateBinding*> sel;
    for (const auto& b : plan.bindings)
      if (b.role == role) sel.push_back(&b);
    std::stable_sort(sel.begin(), sel.end(), [&](const TemplateBinding* a, const TemplateBinding* b) {
      return outer_first ? a->level > b->level : a->level < b->level;
    });
    for (const auto* b : sel)
      for (const auto& f : b->fields) plan.columns.push_back(f.column);
  };
  add_cols(BindingRole::Page, true);
  add_cols(BindingRole::Header, true);
  add_cols(BindingRole::Detail, false);
  add_cols(BindingRole::Footer, false);
  return plan;
}

namespace edetail {

struct PendingRecord {
  Record rec;
  bool flushed = false;
};

}  // namespace edetail

// Single streaming pass: detail occurrences buffer one record each, header
// values attach immediately, footer values attach retroactively to every
// record of the enclosing group instance. Records flush in document order
// when the outermost group closes; end of input flushes the rest with
// whatever footer values arrived.
inline std::vector<Record> extract(const std::vector<std::string>& lines, const TemplateSet& ts,
                                   const ExtractionPlan& plan, ExtractStats* stats = nullptr) {
  std::map<int, const TemplateBinding*> detail_bind, header_bind, footer_bind, page_bind;
  for (const auto& b : plan.bindings) {
    switch (b.role) {
      case BindingRole::Detail: detail_bind[b.template_id] = &b; break;
      case BindingRole::Header: header_bind[b.template_id] = &b; break;
      case BindingRole::Footer: footer_bind[b.template_id] = &b; break;
      case BindingRole::Page: page_bind[b.template_id] = &b; break;
    }
  }

  int levels = plan.levels;
  std::vector<int> group_index(static_cast<size_t>(levels) + 1, 0);  // [1..levels]
  std::map<std::string, std::string> header_values;  // live header/page fields
  std::vector<Record> done;
  std::vector<Record> buffered;

  ExtractStats local;
  ExtractStats& st = stats ? *stats : local;

  // in-progress detail occurrence
  size_t detail_pos = 0;
  Record current;
  bool in_detail = false;

  auto begin_detail = [&]() {
    current = Record{};
    current.group_indices.assign(static_cast<size_t>(levels), 0);
    for (int l = 1; l <= levels; ++l)
      current.group_indices[static_cast<size_t>(l - 1)] = group_index[static_cast<size_t>(l)];
    detail_pos = 0;
    in_detail = true;
  };
  auto finish_detail = [&](bool complete) {
    if (!in_detail) return;
    if (!complete) ++st.incomplete;
    for (const auto& [k, v] : header_values) current.fields[k] = v;
    buffered.push_back(std::move(current));
    in_detail = false;
    detail_pos = 0;
  };
  auto attach_footer = [&](const TemplateBinding& b, const std::string& line, size_t lineno) {
    int lvl = b.level;
    for (auto& r : buffered) {
      if (r.group_indices[static_cast<size_t>(lvl - 1)] != group_index[static_cast<size_t>(lvl)])
        continue;
      bool had = false;
      for (const auto& f : b.fields)
        if (r.fields.count(f.column)) had = true;
      if (had) continue;
      for (const auto& f : b.fields) r.fields[f.column] = edetail::field_value(line, f.span);
      r.provenance.push_back(lineno);
    }
  };
  auto flush_outermost = [&]() {
    for (auto& r : buffered) done.push_back(std::move(r));
    buffered.clear();
  };
  auto open_group = [&](int lvl) {
    // a new instance at lvl implies new instances at every inner level
    for (int l = 1; l <= lvl; ++l) ++group_index[static_cast<size_t>(l)];
    if (lvl == levels && levels > 0) flush_outermost();
    // header fields of inner levels go stale
    for (auto it = header_values.begin(); it != header_values.end();) {
      bool inner = false;
      for (int l = 1; l <= lvl; ++l)
        if (it->first.rfind("L" + std::to_string(l) + "_", 0) == 0) inner = true;
      it = inner ? header_values.erase(it) : ++it;
    }
  };

  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string line = rstrip(expand_tabs(lines[i]));
    size_t lineno = i + 1;
    if (line.empty()) continue;
    auto id_opt = match_line(line, ts);
    if (!id_opt) { ++st.skipped; continue; }
    int id = *id_opt;

    if (auto it = detail_bind.find(id); it != detail_bind.end()) {
      size_t pos_in_pattern = 0;
      for (size_t k = 0; k < plan.detail_templates.size(); ++k)
        if (plan.detail_templates[k] == id) { pos_in_pattern = k; break; }
      if (!in_detail) {
        if (pos_in_pattern != 0) {
          // occurrence starting mid-pattern: emit it as incomplete
          begin_detail();
          detail_pos = pos_in_pattern;
        } else {
          begin_detail();
        }
      } else if (pos_in_pattern != detail_pos) {
        finish_detail(false);
        begin_detail();
        detail_pos = pos_in_pattern;
      }
      for (const auto& f : it->second->fields)
        current.fields[f.column] = edetail::field_value(line, f.span);
      current.provenance.push_back(lineno);
      ++detail_pos;
      if (detail_pos == plan.detail_templates.size()) finish_detail(true);
      else if (detail_pos > plan.detail_templates.size()) finish_detail(false);
      continue;
    }

    if (in_detail) finish_detail(false);

    if (auto it = header_bind.find(id); it != header_bind.end()) {
      const TemplateBinding& b = *it->second;
      open_group(b.level);
      for (const auto& f : b.fields) header_values[f.column] = edetail::field_value(line, f.span);
      continue;
    }
    if (auto it = footer_bind.find(id); it != footer_bind.end()) {
      const TemplateBinding& b = *it->second;
      attach_footer(b, line, lineno);
      if (b.level == levels && levels > 0) flush_outermost();
      continue;
    }
    if (auto it = page_bind.find(id); it != page_bind.end()) {
      for (const auto& f : it->second->fields) header_values[f.column] = edetail::field_value(line, f.span);
      continue;
    }
    // matched a template outside the plan (heading/decor): ignore
  }
  if (in_detail) finish_detail(false);
  flush_outermost();

  // every schema column present on every record
  for (auto& r : done)
    for (const auto& c : plan.columns)
      if (!r.fields.count(c)) r.fields[c] = "";
  return done;
}

}  // namespace textstruct
