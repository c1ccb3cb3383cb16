// Acceptance suite: one line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "textstruct/extraction.hpp"
#include "textstruct/hierarchy.hpp"
#include "textstruct/oracle.hpp"
#include "textstruct/score_map.hpp"
#include "textstruct/templates.hpp"
#include "textstruct/testkit.hpp"

using namespace textstruct;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail = "") {
  std::printf("criterion %2d: %s  %s%s%s\n", n, ok ? "PASS" : "FAIL", what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string random_line(std::mt19937_64& rng) {
  static const char* pool = "ABCWXYZ0189.-/$%  ";
  size_t len = rng() % 70;
  std::string s;
  for (size_t i = 0; i < len; ++i) s += pool[rng() % 18];
  return s;
}

}  // namespace

int main() {
  const auto m = default_score_map();
  const std::string l7 = testkit::fig3_line7();
  const std::string l8 = testkit::fig3_line8();
  const std::string l9 = testkit::fig3_line9();

  // 1. score separation with calibration bands
  {
    auto t0 = Clock::now();
    double sim = compare_lines(l7, l9, m);
    double dis = compare_lines(l7, l8, m);
    double elapsed = ms_since(t0);
    bool ok = sim >= 5.0 * dis && sim >= 98.0 && sim <= 148.0 && dis <= 35.0 && elapsed < 1.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "similar %.3f, dissimilar %.3f, %.3f ms", sim, dis, elapsed);
    report(1, ok, "score separation on the fixture pairs", detail);
  }

  // 2. variation non-overlap
  {
    auto t0 = Clock::now();
    double lo_sim = 1e18, hi_dis = -1e18;
    for (int r = 0; r < kMapRows; ++r)
      for (int c = 0; c < kMapCols; ++c) {
        for (double v : vary_element(l7, l9, m, r, c)) lo_sim = std::min(lo_sim, v);
        for (double v : vary_element(l7, l8, m, r, c)) hi_dis = std::max(hi_dis, v);
      }
    double elapsed = ms_since(t0);
    bool ok = lo_sim > hi_dis && elapsed < 1000.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "min similar %.3f > max dissimilar %.3f", lo_sim, hi_dis);
    report(2, ok, "variation envelopes do not overlap", detail);
  }

  // 3. even-map values
  {
    auto even = uniform_score_map(5.0);
    double sim = compare_lines(l7, l9, even);
    double dis = compare_lines(l7, l8, even);
    bool ok = std::abs(sim - 100.0) < 1e-9 && dis >= 10.0 && dis <= 32.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "similar %.6f, dissimilar %.3f", sim, dis);
    report(3, ok, "even-map calibration values", detail);
  }

  // 4. map scale invariance
  {
    std::mt19937_64 rng(31);
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
      std::string a = random_line(rng), b = random_line(rng);
      double base = compare_lines(a, b, m);
      for (double k : {0.5, 2.0, 10.0}) {
        FeatureScoreMap km = m;
        for (auto& row : km.w)
          for (double& v : row) v *= k;
        if (std::abs(compare_lines(a, b, km) - base) > 1e-9 * std::max(1.0, base)) ok = false;
      }
    }
    report(4, ok, "map scale invariance on 100 random pairs");
  }

  // 5. adaptive zeroing of the page-header pair
  {
    FeatureScoreMap want;
    want.w = {{{3, 0, 5, 0, 0}, {0, 5, 7, 5, 0}, {0, 0, 9, 0, 0}}};
    auto adapted = adapt_map(testkit::fig3_line1(), testkit::fig3_line55(), m);
    report(5, adapted == want, "adapt_map zeroes exactly the nine non-influential elements");
  }

  // shared pipeline run over the figure-3 reconstruction
  auto [lines, truth] = testkit::gen_figure3();
  auto t_detect = Clock::now();
  auto [ts, sample_series] = detect_templates(lines, m);
  double detect_ms = ms_since(t_detect);

  // 6. adaptive gain on the page-header cluster
  {
    auto gap_ratio = [&](const FeatureScoreMap& map) {
      std::vector<double> scores;
      for (size_t j = 1; j < 200; ++j) scores.push_back(compare_lines(lines[0], lines[j], map));
      std::sort(scores.begin(), scores.end());
      scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
      double g1 = 0, g2 = 0;
      for (size_t i = 1; i < scores.size(); ++i) {
        double g = scores[i] - scores[i - 1];
        if (g > g1) { g2 = g1; g1 = g; }
        else if (g > g2) g2 = g;
      }
      return g2 > 0 ? g1 / g2 : 0.0;
    };
    double base = gap_ratio(m);
    double adapted = gap_ratio(ts.templates.empty() ? m : ts.templates[0].adapted_map);
    char detail[128];
    std::snprintf(detail, sizeof detail, "gap ratio default %.3f < adapted %.3f", base, adapted);
    report(6, adapted > base, "adapted map widens the recognition gap", detail);
  }

  // 7. template recovery
  {
    const size_t want_counts[] = {6, 6, 6, 6, 6, 16, 68, 68, 15, 3};
    const Role want_roles[] = {Role::Body,   Role::Body,   Role::Heading, Role::Heading,
                               Role::Decor,  Role::Body,   Role::Detail,  Role::Detail,
                               Role::Body,   Role::Body};
    bool ok = ts.templates.size() == 10 && detect_ms < 10000.0;
    size_t max_count = 0;
    for (const auto& t : ts.templates) max_count = std::max(max_count, t.members.size());
    for (size_t i = 0; ok && i < ts.templates.size(); ++i) {
      if (ts.templates[i].members.size() != want_counts[i]) ok = false;
      if (ts.templates[i].role != want_roles[i]) ok = false;
      if (ts.templates[i].role == Role::Detail && ts.templates[i].members.size() != max_count)
        ok = false;
    }
    char detail[128];
    std::snprintf(detail, sizeof detail, "%zu templates in %.1f ms", ts.templates.size(), detect_ms);
    report(7, ok, "template counts and roles match the published table", detail);
  }

  // 8. DSS golden tests
  std::string fig3_dss;
  HierarchyResult fig3_h;
  {
    auto series = full_series(lines, ts, sample_series, 200);
    Series s;
    for (const auto& e : series) s.push_back(e.template_id);
    std::set<int> detail_ids;
    for (const auto& t : ts.templates)
      if (t.role == Role::Detail) detail_ids.insert(t.id);
    fig3_h = build_hierarchy(s, detail_ids);
    fig3_dss = render_dss(fig3_h);

    Series invoice = {1, 2, 3, 3, 4, 5, 1, 2, 3, 3, 3, 3, 3, 3, 5, 1, 3, 3, 3, 3, 4, 5};
    std::string invoice_dss = render_dss(build_hierarchy(invoice, {3}));
    bool ok = fig3_dss == "[[5, [6, 7], 8], 9] / [0, 1, 2, 3, 4]" &&
              invoice_dss == "[2, [3], 4] / [1, 5]";
    report(8, ok, "golden DSS strings", fig3_dss + " ; " + invoice_dss);
  }

  // 9. round-trip property over 100 random specs
  {
    auto t0 = Clock::now();
    int ok_clean = 0, n_clean = 0, ok_noise = 0, n_noise = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
      auto spec = testkit::random_spec(seed, seed % 2 == 0);
      auto [doc, gt] = testkit::gen_document(spec);
      bool noisy = gt.noise_injections > 0;
      (noisy ? n_noise : n_clean)++;
      std::string got;
      try {
        DetectOptions opts;
        opts.sample_size = doc.size();
        auto [rts, rseries] = detect_templates(doc, m, opts);
        Series s;
        for (const auto& e : rseries) s.push_back(e.template_id);
        std::set<int> detail_ids;
        for (const auto& t : rts.templates)
          if (t.role == Role::Detail) detail_ids.insert(t.id);
        auto h = build_hierarchy(s, detail_ids);
        got = render_dss(h);
        if (got == gt.dss) {
          (noisy ? ok_noise : ok_clean)++;
        } else {
          std::printf("  [round-trip] seed %llu (%s): got \"%s\" want \"%s\"\n",
                      static_cast<unsigned long long>(seed), noisy ? "noisy" : "clean",
                      got.c_str(), gt.dss.c_str());
          for (const auto& t : h.trace) std::printf("    trace: %s\n", t.c_str());
        }
      } catch (const std::exception& e) {
        std::printf("  [round-trip] seed %llu error: %s\n",
                    static_cast<unsigned long long>(seed), e.what());
      }
    }
    double elapsed = ms_since(t0);
    bool ok = ok_clean == n_clean && ok_noise * 100 >= n_noise * 95 && elapsed < 60000.0;
    char detail[160];
    std::snprintf(detail, sizeof detail, "clean %d/%d, noisy %d/%d, %.0f ms", ok_clean, n_clean,
                  ok_noise, n_noise, elapsed);
    report(9, ok, "generator/pipeline round trip", detail);
  }

  // 10. oracle equivalence
  {
    std::mt19937_64 rng(47);
    bool scores_ok = true;
    for (int i = 0; i < 1000 && scores_ok; ++i) {
      std::string a = random_line(rng), b = random_line(rng);
      if (compare_lines(a, b, m) != oracle::oracle_score(a, b, m)) scores_ok = false;
    }
    bool repeats_ok = true;
    for (int iter = 0; iter < 200 && repeats_ok; ++iter) {
      size_t n = 5 + rng() % 40;
      Series s;
      for (size_t i = 0; i < n; ++i) s.push_back(static_cast<int>(rng() % 5));
      for (const auto& motif : oracle::oracle_repeats(s)) {
        Series collapsed = collapse_runs(s, motif.motif, -2);
        if (std::count(collapsed.begin(), collapsed.end(), -2) < 1) repeats_ok = false;
      }
    }
    report(10, scores_ok && repeats_ok, "scoring and collapsing agree with brute-force oracles");
  }

  // 11. extraction correctness
  {
    bool ok = false;
    std::string detail;
    try {
      auto plan = build_plan(ts, fig3_h);
      ExtractStats stats;
      auto records = extract(lines, ts, plan, &stats);
      size_t spot = 0, with_total = 0;
      for (const auto& r : records) {
        bool hit = false;
        for (const auto& [k, v] : r.fields)
          if (k.rfind("L1_H_T5_", 0) == 0 && v == "0130687732I") hit = true;
        if (!hit) continue;
        ++spot;
        for (const auto& [k, v] : r.fields)
          if (k.rfind("L1_F_T8_", 0) == 0 && v == "(-550.16)") { ++with_total; break; }
      }
      ok = records.size() == truth.records.size() && spot == 3 && with_total == 3;
      detail = std::to_string(records.size()) + " records (want " +
               std::to_string(truth.records.size()) + "), spot group " + std::to_string(spot) +
               "/3 with footer total " + std::to_string(with_total) + "/3";
    } catch (const std::exception& e) {
      detail = e.what();
    }
    report(11, ok, "extraction record count and spot-group fields", detail);
  }

  std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL CRITERIA PASS" : "CRITERIA FAILED",
              failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}
