#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "textstruct/hierarchy.hpp"
#include "textstruct/oracle.hpp"

using namespace textstruct;

TEST_CASE("collapse_runs basics") {
  CHECK(collapse_runs({3, 3, 3}, {3}, -2) == Series{-2});
  CHECK(collapse_runs({1, 2, 3, 3, 4}, {3}, -2) == Series{1, 2, -2, 4});
  CHECK(collapse_runs({1, 2, 1, 2, 1, 2}, {1, 2}, -5) == Series{-5});
  CHECK(collapse_runs({9, 1, 2, 1, 2, 9}, {1, 2}, -2) == Series{9, -2, 9});
  // two separated runs collapse to two references
  CHECK(collapse_runs({1, 2, 1, 2, 7, 1, 2}, {1, 2}, -2) == Series{-2, 7, -2});
  CHECK_THROWS_AS(collapse_runs({1}, {}, -2), std::invalid_argument);
}

TEST_CASE("collapse_runs honors truncated fragments at the edges only") {
  // suffix of the pattern at the start, adjacent to a full occurrence
  CHECK(collapse_runs({2, 1, 2, 1, 2}, {1, 2}, -2) == Series{-2});
  // prefix at the end
  CHECK(collapse_runs({1, 2, 1, 2, 1}, {1, 2}, -2) == Series{-2});
  // interior fragment is NOT absorbed
  CHECK(collapse_runs({1, 2, 1, 1, 2}, {1, 2}, -2) == Series{-2, 1, -2});
}

TEST_CASE("invoice series golden") {
  Series s = {1, 2, 3, 3, 4, 5, 1, 2, 3, 3, 3, 3, 3, 3, 5, 1, 3, 3, 3, 3, 4, 5};
  auto h = build_hierarchy(s, {3});
  CHECK(render_dss(h) == "[2, [3], 4] / [1, 5]");
  REQUIRE(h.noise_log.size() == 2);
}

TEST_CASE("pick_noise verdicts") {
  Series series = {7, 7, 7, 4, 4, 9};
  Disagreement d;
  d.counts = {{7, 4}, {4, 1}, {9, 1}};
  auto v = pick_noise(d, series);  // majority 7 (4 of 6 = 2/3)
  REQUIRE(v.has_value());
  CHECK(*v == 9);  // 9 rarer than 4 in the series

  Disagreement no_majority;
  no_majority.counts = {{7, 1}, {4, 1}, {9, 1}};
  CHECK_FALSE(pick_noise(no_majority, series).has_value());

  // protected ids are skipped; frequency tie goes to the higher id
  Series tied = {7, 7, 4, 9};
  auto v2 = pick_noise(d, tied, {9});
  REQUIRE(v2.has_value());
  CHECK(*v2 == 4);
  Disagreement tie;
  tie.counts = {{7, 4}, {4, 1}, {9, 1}};
  auto v3 = pick_noise(tie, tied);
  REQUIRE(v3.has_value());
  CHECK(*v3 == 9);
}

TEST_CASE("grow_parent finds the shared context") {
  //        h  ref f   h  ref f   h  ref f
  Series s = {1, -2, 9, 1, -2, 9, 1, -2, 9};
  auto g = grow_parent(s, -2);
  CHECK(g.header == std::vector<int>{1});
  CHECK(g.footer == std::vector<int>{9});
  CHECK_FALSE(g.footer_dis.has_value());
  CHECK_FALSE(g.header_dis.has_value());
  CHECK_THROWS_AS(grow_parent(s, -7), std::invalid_argument);
}

TEST_CASE("grow_parent reports disagreements") {
  Series s = {1, -2, 9, 1, -2, 8, 1, -2, 9};
  auto g = grow_parent(s, -2);
  CHECK(g.footer.empty());
  REQUIRE(g.footer_dis.has_value());
  CHECK(g.footer_dis->footer_side);
  CHECK(g.footer_dis->counts == std::map<int, int>{{9, 2}, {8, 1}});
}

TEST_CASE("build_hierarchy input validation") {
  CHECK_THROWS_AS(build_hierarchy({1, 2, 3}, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_hierarchy({1, 2, 3}, {7}), std::invalid_argument);
  // detail ids never run consecutively as a joint unit: no seed
  CHECK_THROWS_AS(build_hierarchy({3, 9, 1, 9}, {3, 1}), std::invalid_argument);
}

TEST_CASE("pure hierarchy recovery at depth 5") {
  // grammar: L5 = h5 L4 L4 f5 ; L4 = h4 L3 L3 ; L3 = L2 L2 f3 ; L2 = h2 L1 L1 f2 ; L1 = d d
  Series s;
  auto L1 = [&] { s.push_back(0); s.push_back(0); };
  auto L2 = [&] { s.push_back(2); L1(); L1(); s.push_back(3); };
  auto L3 = [&] { L2(); L2(); s.push_back(4); };
  auto L4 = [&] { s.push_back(5); L3(); L3(); };
  auto L5 = [&] { s.push_back(6); L4(); L4(); s.push_back(7); };
  for (int i = 0; i < 3; ++i) L5();
  auto h = build_hierarchy(s, {0});
  REQUIRE(h.structures.size() == 1);
  CHECK(render_dss(h) == "[6, [5, [[2, [0], 3], 4]], 7]");
  CHECK(h.noise_log.empty());
  CHECK(h.residue.empty());
}

TEST_CASE("collapse_runs agrees with the brute-force repeat finder") {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    size_t n = 5 + rng() % 40;
    Series s;
    for (size_t i = 0; i < n; ++i) s.push_back(static_cast<int>(rng() % 5));
    auto motifs = oracle::oracle_repeats(s);
    for (const auto& m : motifs) {
      Series collapsed = collapse_runs(s, m.motif, -2);
      CAPTURE(iter);
      // every maximal interior run the oracle found must have collapsed
      CHECK(std::count(collapsed.begin(), collapsed.end(), -2) >= 1);
      // collapsing shortens by at least (reps-1)*len for the longest run
      int max_reps = *std::max_element(m.run_lengths.begin(), m.run_lengths.end());
      CHECK(s.size() - collapsed.size() >=
            static_cast<size_t>(max_reps - 1) * m.motif.size());
    }
  }
}

TEST_CASE("oracle repeat examples") {
  auto r1 = oracle::oracle_repeats({3, 3, 3});
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].motif == std::vector<int>{3});
  CHECK(r1[0].run_lengths == std::vector<int>{3});

  auto r2 = oracle::oracle_repeats({1, 2, 1, 2, 1});
  bool found = false;
  for (const auto& m : r2)
    if (m.motif == std::vector<int>{1, 2} && m.run_starts == std::vector<size_t>{0} &&
        m.run_lengths == std::vector<int>{2})
      found = true;
  CHECK(found);
}
