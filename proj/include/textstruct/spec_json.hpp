#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "textstruct/testkit.hpp"

namespace textstruct::testkit {

inline StructureSpec spec_from_json(const nlohmann::json& j) {
  StructureSpec spec;
  spec.builtin = j.value("builtin", std::string{});
  spec.top_instances = j.value("top_instances", 1);
  spec.seed = j.value("seed", uint64_t{0});
  for (const auto& jg : j.value("grammars", nlohmann::json::array())) {
    TemplateGrammar g;
    for (const auto& js : jg.at("segments")) {
      Segment seg;
      seg.col = js.at("col").get<int>();
      std::string kind = js.at("kind").get<std::string>();
      if (kind == "literal") {
        seg.kind = SegKind::Literal;
        seg.literal = js.at("text").get<std::string>();
      } else if (kind == "digits") {
        seg.kind = SegKind::Digits;
        seg.width = js.at("width").get<int>();
      } else if (kind == "alpha") {
        seg.kind = SegKind::Alpha;
        seg.width = js.at("width").get<int>();
      } else {
        throw std::invalid_argument("invalid spec: segment kind '" + kind + "'");
      }
      g.segments.push_back(std::move(seg));
    }
    spec.grammars.push_back(std::move(g));
  }
  spec.detail = j.value("detail", std::vector<int>{});
  for (const auto& jl : j.value("levels", nlohmann::json::array())) {
    LevelSpec lv;
    lv.header = jl.value("header", std::vector<int>{});
    lv.footer = jl.value("footer", std::vector<int>{});
    lv.min_repeat = jl.value("min_repeat", 1);
    lv.max_repeat = jl.value("max_repeat", lv.min_repeat);
    spec.levels.push_back(std::move(lv));
  }
  if (j.contains("noise")) {
    NoiseSpec ns;
    ns.block = j.at("noise").at("block").get<std::vector<int>>();
    ns.period = j.at("noise").at("period").get<int>();
    spec.noise = ns;
  }
  validate_spec(spec);
  return spec;
}

inline nlohmann::ordered_json spec_to_json(const StructureSpec& spec) {
  nlohmann::ordered_json j;
  if (!spec.builtin.empty()) j["builtin"] = spec.builtin;
  j["grammars"] = nlohmann::ordered_json::array();
  for (const auto& g : spec.grammars) {
    nlohmann::ordered_json jg;
    jg["segments"] = nlohmann::ordered_json::array();
    for (const auto& seg : g.segments) {
      nlohmann::ordered_json js;
      js["col"] = seg.col;
      switch (seg.kind) {
        case SegKind::Literal:
          js["kind"] = "literal";
          js["text"] = seg.literal;
          break;
        case SegKind::Digits:
          js["kind"] = "digits";
          js["width"] = seg.width;
          break;
        case SegKind::Alpha:
          js["kind"] = "alpha";
          js["width"] = seg.width;
          break;
      }
      jg["segments"].push_back(std::move(js));
    }
    j["grammars"].push_back(std::move(jg));
  }
  j["detail"] = spec.detail;
  j["levels"] = nlohmann::ordered_json::array();
  for (const auto& lv : spec.levels)
    j["levels"].push_back({{"header", lv.header},
                           {"footer", lv.footer},
                           {"min_repeat", lv.min_repeat},
                           {"max_repeat", lv.max_repeat}});
  if (spec.noise) j["noise"] = {{"block", spec.noise->block}, {"period", spec.noise->period}};
  j["top_instances"] = spec.top_instances;
  j["seed"] = spec.seed;
  return j;
}

inline nlohmann::ordered_json truth_to_json(const GroundTruth& truth) {
  nlohmann::ordered_json j;
  j["dss"] = truth.dss;
  j["line_templates"] = truth.line_templates;
  j["noise_injections"] = truth.noise_injections;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : truth.records) {
    nlohmann::ordered_json jr;
    for (const auto& [k, v] : r) jr[k] = v;
    j["records"].push_back(std::move(jr));
  }
  return j;
}

}  // namespace textstruct::testkit
