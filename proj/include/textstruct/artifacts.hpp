#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "textstruct/extraction.hpp"
#include "textstruct/hierarchy.hpp"
#include "textstruct/templates.hpp"

namespace textstruct {

using ordered_json = nlohmann::ordered_json;

// LF or CRLF; trailing whitespace stripped; tabs expanded at 8-column stops
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(rstrip(expand_tabs(line)));
  return lines;
}

// temp file in the target directory + rename, so readers never see a partial file
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path().empty() ? fs::path(".") : target.parent_path();
  fs::path tmp = dir / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

namespace adetail {

inline ordered_json pattern_json(const PatternNode& p) {
  ordered_json j;
  j["header"] = p.header;
  if (p.child.empty())
    j["detail"] = p.detail;
  else
    j["child"] = pattern_json(p.child.front());
  j["footer"] = p.footer;
  return j;
}

inline std::string class_name(CharClass c) {
  switch (c) {
    case CharClass::Alpha: return "alpha";
    case CharClass::Numeric: return "numeric";
    case CharClass::Symbol: return "symbol";
    case CharClass::Space: return "space";
  }
  return "space";
}

}  // namespace adetail

inline std::string templates_json(const TemplateSet& ts, const HierarchyResult* h = nullptr) {
  ordered_json doc;
  doc["templates"] = ordered_json::array();
  for (const auto& t : ts.templates) {
    ordered_json jt;
    jt["id"] = t.id;
    jt["key_name"] = t.key_name;
    jt["role"] = role_name(t.role);
    jt["line_count"] = t.members.size();
    if (t.threshold)
      jt["threshold"] = *t.threshold;
    else
      jt["threshold"] = nullptr;
    jt["fields"] = ordered_json::array();
    for (const auto& f : t.field_layout) jt["fields"].push_back({{"start", f.start}, {"end", f.end}});
    jt["adapted_map"] = ordered_json::array();
    for (int r = 0; r < 3; ++r) {
      ordered_json row = ordered_json::array();
      for (int c = 0; c < 5; ++c) row.push_back(t.adapted_map.at(r, c));
      jt["adapted_map"].push_back(row);
    }
    jt["mask"] = ordered_json::array();
    for (size_t i = 0; i < t.mask.size(); ++i) {
      const MaskColumn& mc = t.mask[i];
      ordered_json jm;
      jm["col"] = i + 1;
      if (mc.literal) {
        std::vector<char32_t> one{mc.literal_char};
        jm["literal"] = encode_utf8(one, 0, 1);
      } else {
        ordered_json cls = ordered_json::array();
        for (CharClass c : mc.classes) cls.push_back(adetail::class_name(c));
        jm["classes"] = cls;
      }
      jm["optional"] = mc.optional;
      jt["mask"].push_back(jm);
    }
    doc["templates"].push_back(jt);
  }
  if (h) {
    ordered_json js;
    js["dss"] = render_dss(*h);
    js["structures"] = ordered_json::array();
    for (const auto& s : h->structures) js["structures"].push_back(adetail::pattern_json(s));
    js["noise"] = ordered_json::array();
    for (const auto& [id, reason] : h->noise_log)
      js["noise"].push_back({{"id", id}, {"reason", reason}});
    js["residue"] = h->residue;
    doc["structure"] = js;
  }
  return doc.dump(2) + "\n";
}

inline std::string series_csv(const TemplateSeries& series) {
  std::ostringstream os;
  os << "line,template_id\n";
  for (const auto& e : series) os << e.line << "," << e.template_id << "\n";
  return os.str();
}

namespace adetail {

inline std::string csv_quote(const std::string& v) {
  bool need = v.find_first_of(",\"\n\r") != std::string::npos;
  if (!need) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace adetail

inline std::string records_csv(const std::vector<Record>& records, const ExtractionPlan& plan) {
  std::ostringstream os;
  for (size_t i = 0; i < plan.columns.size(); ++i)
    os << (i ? "," : "") << adetail::csv_quote(plan.columns[i]);
  os << "\n";
  for (const auto& r : records) {
    for (size_t i = 0; i < plan.columns.size(); ++i) {
      auto it = r.fields.find(plan.columns[i]);
      os << (i ? "," : "") << adetail::csv_quote(it == r.fields.end() ? "" : it->second);
    }
    os << "\n";
  }
  return os.str();
}

inline std::string records_jsonl(const std::vector<Record>& records, const ExtractionPlan& plan) {
  std::ostringstream os;
  for (const auto& r : records) {
    ordered_json jr;
    for (const auto& c : plan.columns) {
      auto it = r.fields.find(c);
      jr[c] = it == r.fields.end() ? "" : it->second;
    }
    os << jr.dump() << "\n";
  }
  return os.str();
}

// Deterministic step chart of (x, y) points; byte-stable for identical input.
inline std::string chart_svg(const std::vector<std::pair<double, double>>& points,
                             const std::string& x_label, const std::string& y_label) {
  if (points.empty()) throw std::invalid_argument("no points to chart");
  double xmin = points[0].first, xmax = points[0].first;
  double ymin = points[0].second, ymax = points[0].second;
  for (const auto& [x, y] : points) {
    xmin = std::min(xmin, x); xmax = std::max(xmax, x);
    ymin = std::min(ymin, y); ymax = std::max(ymax, y);
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double W = 800, H = 400, ML = 50, MR = 15, MT = 15, MB = 40;
  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
        "viewBox=\"0 0 800 400\">\n";
  os << "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
  os << "<line x1=\"" << num(ML) << "\" y1=\"" << num(H - MB) << "\" x2=\"" << num(W - MR)
     << "\" y2=\"" << num(H - MB) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(ML) << "\" y1=\"" << num(MT) << "\" x2=\"" << num(ML) << "\" y2=\""
     << num(H - MB) << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(W / 2) << "\" y=\"" << num(H - 8)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  os << "<text x=\"12\" y=\"" << num(H / 2)
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 " << num(H / 2)
     << ")\">" << y_label << "</text>\n";
  os << "<text x=\"" << num(ML - 4) << "\" y=\"" << num(H - MB)
     << "\" text-anchor=\"end\" font-size=\"10\">" << num(ymin) << "</text>\n";
  os << "<text x=\"" << num(ML - 4) << "\" y=\"" << num(MT + 10)
     << "\" text-anchor=\"end\" font-size=\"10\">" << num(ymax) << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
  for (size_t i = 0; i < points.size(); ++i) {
    if (i) {
      // horizontal-then-vertical step
      os << " " << num(px(points[i].first)) << "," << num(py(points[i - 1].second));
    }
    os << (i ? " " : "") << num(px(points[i].first)) << "," << num(py(points[i].second));
  }
  os << "\"/>\n";
  for (const auto& [x, y] : points)
    os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
       << "\" r=\"2\" fill=\"crimson\"/>\n";
  os << "</svg>\n";
  return os.str();
}

// Parses this tool's own CSV output ("line,template_id" or "line,score").
inline std::vector<std::pair<double, double>> parse_chart_csv(const std::string& content,
                                                              std::string* y_label = nullptr) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("malformed CSV: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  size_t comma = line.find(',');
  if (comma == std::string::npos || line.substr(0, comma) != "line")
    throw std::runtime_error("malformed CSV: expected header 'line,<value>'");
  if (y_label) *y_label = line.substr(comma + 1);
  std::vector<std::pair<double, double>> points;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed CSV at row " + std::to_string(lineno));
    try {
      points.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::runtime_error("malformed CSV at row " + std::to_string(lineno));
    }
  }
  if (points.empty()) throw std::runtime_error("malformed CSV: no data rows");
  return points;
}

}  // namespace textstruct
