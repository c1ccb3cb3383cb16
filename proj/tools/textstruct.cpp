#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "textstruct/artifacts.hpp"
#include "textstruct/extraction.hpp"
#include "textstruct/hierarchy.hpp"
#include "textstruct/score_map.hpp"
#include "textstruct/spec_json.hpp"
#include "textstruct/templates.hpp"
#include "textstruct/testkit.hpp"

namespace {

using namespace textstruct;

struct RunConfig {
  size_t sample_lines = 200;
  double min_similarity = 50.0;
  bool adaptive = true;
  std::string score_map_path;
  std::string out_dir = ".";
  std::string format = "csv";
  bool emit_series = false;
  bool emit_svg = false;
};

// key=value lines, '#' comments; keys mirror the long flags
void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::string line;
  size_t lineno = 0;
  auto truthy = [](const std::string& v) { return v == "1" || v == "true" || v == "yes" || v == "on"; };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = rstrip(line);
    size_t b = t.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    t = t.substr(b);
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config '" + path + "' line " + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = rstrip(t.substr(0, eq));
    std::string val = t.substr(eq + 1);
    size_t vb = val.find_first_not_of(" \t");
    val = vb == std::string::npos ? "" : rstrip(val.substr(vb));
    if (key == "sample_lines") cfg.sample_lines = std::stoul(val);
    else if (key == "min_similarity") cfg.min_similarity = std::stod(val);
    else if (key == "adaptive") cfg.adaptive = truthy(val);
    else if (key == "score_map") cfg.score_map_path = val;
    else if (key == "out_dir") cfg.out_dir = val;
    else if (key == "format") cfg.format = val;
    else if (key == "emit_series") cfg.emit_series = truthy(val);
    else if (key == "emit_svg") cfg.emit_svg = truthy(val);
    else
      throw std::runtime_error("config '" + path + "' line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
  }
}

FeatureScoreMap load_map(const RunConfig& cfg) {
  if (cfg.score_map_path.empty()) return default_score_map();
  std::ifstream in(cfg.score_map_path);
  if (!in) throw std::runtime_error("cannot read score map '" + cfg.score_map_path + "'");
  return parse_score_map(in);
}

DetectOptions detect_options(const RunConfig& cfg) {
  DetectOptions opts;
  opts.sample_size = cfg.sample_lines;
  opts.min_similarity = cfg.min_similarity;
  opts.adaptive = cfg.adaptive;
  return opts;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

struct Analysis {
  TemplateSet templates;
  TemplateSeries series;  // whole document
  HierarchyResult hierarchy;
  size_t unmatched = 0;
};

Analysis analyze_document(const std::vector<std::string>& lines, const RunConfig& cfg) {
  Analysis a;
  FeatureScoreMap m = load_map(cfg);
  DetectOptions opts = detect_options(cfg);
  auto [ts, sample_series] = detect_templates(lines, m, opts);
  a.templates = std::move(ts);
  a.series = full_series(lines, a.templates, sample_series,
                         std::min(opts.sample_size, lines.size()), &a.unmatched);
  Series s;
  for (const auto& e : a.series) s.push_back(e.template_id);
  std::set<int> detail_ids;
  for (const auto& t : a.templates.templates)
    if (t.role == Role::Detail) detail_ids.insert(t.id);
  a.hierarchy = build_hierarchy(s, detail_ids);
  return a;
}

void write_analysis_artifacts(const Analysis& a, const RunConfig& cfg) {
  atomic_write(out_path(cfg, "dss.txt"), render_dss(a.hierarchy) + "\n");
  atomic_write(out_path(cfg, "templates.json"), templates_json(a.templates, &a.hierarchy));
  if (cfg.emit_series) atomic_write(out_path(cfg, "series.csv"), series_csv(a.series));
  if (cfg.emit_svg) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& e : a.series)
      pts.emplace_back(static_cast<double>(e.line), static_cast<double>(e.template_id));
    atomic_write(out_path(cfg, "chart.svg"), chart_svg(pts, "line", "template_id"));
  }
}

int cmd_analyze(const std::string& input, const RunConfig& cfg) {
  Analysis a = analyze_document(read_lines(input), cfg);
  write_analysis_artifacts(a, cfg);
  std::cout << render_dss(a.hierarchy) << "\n";
  return 0;
}

int cmd_extract(const std::string& input, const RunConfig& cfg) {
  auto lines = read_lines(input);
  Analysis a = analyze_document(lines, cfg);
  write_analysis_artifacts(a, cfg);
  ExtractionPlan plan = build_plan(a.templates, a.hierarchy);
  ExtractStats stats;
  auto records = extract(lines, a.templates, plan, &stats);
  if (cfg.format == "jsonl")
    atomic_write(out_path(cfg, "records.jsonl"), records_jsonl(records, plan));
  else
    atomic_write(out_path(cfg, "records.csv"), records_csv(records, plan));
  std::cerr << "skipped " << stats.skipped << " unmatched line(s)\n";
  std::cout << records.size() << " record(s)\n";
  return 0;
}

int cmd_score(const std::string& a, const std::string& b, const RunConfig& cfg) {
  FeatureScoreMap m = load_map(cfg);
  double total = compare_lines(a, b, m);
  PairEvents ev = enumerate_events(rstrip(expand_tabs(a)), rstrip(expand_tabs(b)));
  std::cout << "total score: ";
  std::cout.setf(std::ios::fixed);
  std::cout.precision(3);
  std::cout << total << "\n";
  static const char* kRows[] = {"alpha", "numeric", "symbol"};
  static const char* kCols[] = {"body-full", "body-group", "border-full", "border-group",
                                "border-nomatch"};
  std::cout << "element variation over weights 1..9:\n";
  for (int r = 0; r < kMapRows; ++r)
    for (int c = 0; c < kMapCols; ++c) {
      auto scores = vary_element(a, b, m, r, c);
      double lo = scores[0], hi = scores[0];
      for (double v : scores) { lo = std::min(lo, v); hi = std::max(hi, v); }
      std::cout << "  " << kRows[r] << " " << kCols[c] << ": min " << lo << " max " << hi << " "
                << (element_influential(ev, r, c) ? "influential" : "non-influential") << "\n";
    }
  return 0;
}

int cmd_chart(const std::string& input, const RunConfig& cfg) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + input + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string y_label;
  auto points = parse_chart_csv(buf.str(), &y_label);
  atomic_write(out_path(cfg, "chart.svg"), chart_svg(points, "line", y_label));
  std::cout << points.size() << " point(s)\n";
  return 0;
}

int cmd_gen(const std::string& spec_arg, std::optional<size_t> max_lines,
            std::optional<uint64_t> seed, const std::string& out,
            const std::string& truth_path) {
  testkit::StructureSpec spec;
  if (spec_arg == "figure3") {
    spec.builtin = "figure3";
  } else {
    std::ifstream in(spec_arg);
    if (!in) throw std::runtime_error("cannot read spec '" + spec_arg + "'");
    nlohmann::json j;
    in >> j;
    spec = testkit::spec_from_json(j);
  }
  if (seed) spec.seed = *seed;
  auto [lines, truth] = testkit::gen_document(spec);
  if (max_lines && lines.size() > *max_lines) {
    lines.resize(*max_lines);
    truth.line_templates.resize(*max_lines);
  }
  std::string doc;
  for (const auto& l : lines) doc += l + "\n";
  atomic_write(out, doc);
  if (!truth_path.empty())
    atomic_write(truth_path, testkit::truth_to_json(truth).dump(2) + "\n");
  std::cout << lines.size() << " line(s) -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised document-structure discovery and extraction"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--sample-lines", cfg.sample_lines, "analysis sample size")->check(CLI::PositiveNumber);
    sub->add_option("--min-similarity", cfg.min_similarity, "recognition floor")->check(CLI::NonNegativeNumber);
    sub->add_flag("--no-adaptive{false}", cfg.adaptive, "disable adaptive score maps");
    sub->add_option("--score-map", cfg.score_map_path, "score map file (3 rows x 5 weights)");
    sub->add_option("--out-dir", cfg.out_dir, "artifact directory");
    sub->add_flag("--emit-series", cfg.emit_series, "also write series.csv");
    sub->add_flag("--emit-svg", cfg.emit_svg, "also write chart.svg");
  };

  std::string input, line_b;
  auto* analyze = app.add_subcommand("analyze", "discover templates and structure");
  analyze->add_option("input", input, "document path")->required();
  add_common(analyze);

  auto* extract = app.add_subcommand("extract", "run the full pipeline and emit records");
  extract->add_option("input", input, "document path")->required();
  extract->add_option("--format", cfg.format, "records format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  add_common(extract);

  std::string score_file;
  size_t score_la = 0, score_lb = 0;
  auto* score = app.add_subcommand("score", "score two lines and show the variation table");
  score->add_option("line_a", input, "first line");
  score->add_option("line_b", line_b, "second line");
  score->add_option("--file", score_file, "take both lines from this file");
  score->add_option("--line-a", score_la, "1-based line number of the first line");
  score->add_option("--line-b", score_lb, "1-based line number of the second line");
  score->add_option("--score-map", cfg.score_map_path, "score map file");
  score->add_option("--config", config_path, "key=value config file");

  auto* chart = app.add_subcommand("chart", "render a series/score CSV as SVG");
  chart->add_option("input", input, "CSV path")->required();
  chart->add_option("--out-dir", cfg.out_dir, "artifact directory");
  chart->add_option("--config", config_path, "key=value config file");

  std::string spec_arg = "figure3", gen_out = "doc.txt", truth_path;
  std::optional<size_t> gen_lines;
  std::optional<uint64_t> gen_seed;
  auto* gen = app.add_subcommand("gen", "generate a synthetic document with ground truth");
  gen->add_option("--spec", spec_arg, "spec JSON file or builtin name 'figure3'");
  gen->add_option("--lines", gen_lines, "truncate output to N lines");
  gen->add_option("--seed", gen_seed, "override the spec seed");
  gen->add_option("--out", gen_out, "document output path");
  gen->add_option("--truth", truth_path, "ground-truth JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    // flags win over the config file: re-parse after loading it
    if (!config_path.empty()) {
      RunConfig from_file;
      load_config(config_path, from_file);
      RunConfig flags_only = cfg;
      cfg = from_file;
      CLI::App* sub = app.get_subcommands().front();
      auto keep = [&](const std::string& flag, auto RunConfig::* field) {
        if (sub->get_option_no_throw(flag) && sub->count(flag) > 0) cfg.*field = flags_only.*field;
      };
      keep("--sample-lines", &RunConfig::sample_lines);
      keep("--min-similarity", &RunConfig::min_similarity);
      keep("--no-adaptive", &RunConfig::adaptive);
      keep("--score-map", &RunConfig::score_map_path);
      keep("--out-dir", &RunConfig::out_dir);
      keep("--format", &RunConfig::format);
      keep("--emit-series", &RunConfig::emit_series);
      keep("--emit-svg", &RunConfig::emit_svg);
    }

    if (analyze->parsed()) return cmd_analyze(input, cfg);
    if (extract->parsed()) return cmd_extract(input, cfg);
    if (score->parsed()) {
      if (!score_file.empty()) {
        auto lines = read_lines(score_file);
        if (score_la < 1 || score_la > lines.size() || score_lb < 1 || score_lb > lines.size())
          throw std::invalid_argument("line number out of range");
        return cmd_score(lines[score_la - 1], lines[score_lb - 1], cfg);
      }
      if (score->count("line_a") == 0 || score->count("line_b") == 0)
        throw std::invalid_argument("need two lines or --file with --line-a/--line-b");
      return cmd_score(input, line_b, cfg);
    }
    if (chart->parsed()) return cmd_chart(input, cfg);
    if (gen->parsed()) return cmd_gen(spec_arg, gen_lines, gen_seed, gen_out, truth_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
