// Copyright 2026 The Smoothctl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// smoothctl: command-line front end.
//
// Every subcommand exits 0 on success. Failures exit 1 and print a single
// JSON record {"error": {"kind": ..., "message": ...}} on stderr.

#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "smoothctl/bench.h"
#include "smoothctl/json_io.h"
#include "smoothctl/metrics.h"
#include "smoothctl/param_select.h"
#include "smoothctl/remote_judge.h"
#include "smoothctl/scheduler.h"
#include "smoothctl/sim.h"

namespace smoothctl {
namespace {

struct JudgeFlags {
  std::string judge_config;
  std::string oracle_truth;
  std::string oracle_mode = "PROBABILISTIC";
  double flip_prob = 0.0;
  std::string attribute = "anger";
};

void AddJudgeFlags(CLI::App* cmd, JudgeFlags& f) {
  cmd->add_option("--judge-config", f.judge_config,
                  "Remote judge config (JSON)");
  cmd->add_option("--oracle-truth", f.oracle_truth,
                  "Use a synthetic oracle over these true ratings (JSONL)");
  cmd->add_option("--oracle-mode", f.oracle_mode,
                  "PROBABILISTIC, DETERMINISTIC or NOISY");
  cmd->add_option("--flip-prob", f.flip_prob, "Flip probability for NOISY");
}

// Owns whatever a pairwise judge needs to stay alive.
struct JudgeHandle {
  std::optional<JudgeConfig> config;
  std::unique_ptr<HttpChatClient> client;
  std::unique_ptr<PromptTemplateSet> templates;
  std::unique_ptr<VerdictCache> cache;
  std::unique_ptr<PairwiseJudge> judge;
};

JudgeHandle MakeJudge(const JudgeFlags& f,
                      std::unordered_map<ItemId, std::string> texts,
                      uint64_t seed) {
  JudgeHandle h;
  if (!f.judge_config.empty() == !f.oracle_truth.empty()) {
    throw InvalidArgument("pass exactly one of --judge-config, --oracle-truth");
  }
  if (!f.judge_config.empty()) {
    h.config = JudgeConfig::Load(f.judge_config);
    h.client = std::make_unique<HttpChatClient>(h.config->http);
    h.templates = std::make_unique<PromptTemplateSet>(
        PromptTemplateSet::LoadDirectory(h.config->templates_dir));
    h.cache = std::make_unique<VerdictCache>(h.config->cache_path);
    RemoteJudgeOptions options;
    options.attribute = f.attribute;
    options.accept_tie = h.config->accept_tie;
    options.randomize_presentation = h.config->randomize_presentation;
    options.presentation_seed = h.config->presentation_seed;
    options.model = h.config->http.model;
    h.judge = std::make_unique<RemotePairwiseJudge>(
        *h.client, h.templates->pairwise, std::move(texts), *h.cache, options);
    return h;
  }
  SyntheticOracleConfig oc;
  ReadJsonl(f.oracle_truth, [&](int, const Json& j) {
    oc.true_ratings[j.at("id").get<std::string>()] = j.at("rating").get<double>();
  });
  oc.mode = ParseOracleMode(f.oracle_mode);
  oc.flip_prob = f.flip_prob;
  oc.rng_seed = seed;
  h.judge = std::make_unique<SyntheticOracle>(std::move(oc));
  return h;
}

std::vector<ResponseRecord> LoadResponses(const std::string& path,
                                          const std::string& queries,
                                          const std::string& attribute) {
  std::optional<QueryIngest> ingest;
  if (!queries.empty()) ingest = IngestQueries(queries);
  std::vector<ResponseRecord> all =
      IngestResponses(path, ingest ? &ingest->records : nullptr);
  if (attribute.empty()) return all;
  const Attribute a = ParseAttribute(attribute);
  std::vector<ResponseRecord> out;
  for (ResponseRecord& r : all) {
    if (r.attribute == a) out.push_back(std::move(r));
  }
  return out;
}

void PrintJson(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"Smooth-control evaluation toolkit"};
  app.require_subcommand(1);

  // build-library
  std::string bl_queries, bl_responses, bl_attribute, bl_out, bl_log,
      bl_range_out;
  int64_t bl_duels = 0;
  size_t bl_size = kDefaultLibrarySize;
  uint64_t bl_seed = 0;
  JudgeFlags bl_judge;
  auto* build = app.add_subcommand("build-library",
                                   "Rate an anchor set exhaustively and freeze it");
  build->add_option("--queries", bl_queries, "Queries (JSONL) for id checks");
  build->add_option("--responses", bl_responses, "Responses (JSONL)")->required();
  build->add_option("--attribute", bl_attribute, "Attribute to rate")->required();
  build->add_option("--duels", bl_duels, "Total duels (default 50 per member)");
  build->add_option("--size", bl_size, "Library size");
  build->add_option("--seed", bl_seed, "Random seed");
  build->add_option("--out", bl_out, "Library JSON output")->required();
  build->add_option("--log", bl_log, "Comparison log output (JSONL)");
  build->add_option("--range-out", bl_range_out,
                    "Write a range config from the 5th/95th percentiles");
  AddJudgeFlags(build, bl_judge);

  // rate
  std::string rt_library, rt_responses, rt_attribute, rt_strategy = "CLOSEST_LIB",
      rt_out, rt_log;
  int rt_budget = 20;
  uint64_t rt_seed = 0;
  JudgeFlags rt_judge;
  auto* rate = app.add_subcommand("rate", "Rate responses by pairwise duels");
  rate->add_option("--library", rt_library, "Frozen library JSON");
  rate->add_option("--responses", rt_responses, "Responses (JSONL)")->required();
  rate->add_option("--attribute", rt_attribute, "Only rate this attribute");
  rate->add_option("--strategy", rt_strategy,
                   "RANDOM_NO_LIB, CLOSEST_NO_LIB, RANDOM_LIB or CLOSEST_LIB");
  rate->add_option("--budget", rt_budget, "Comparisons per response");
  rate->add_option("--seed", rt_seed, "Random seed");
  rate->add_option("--out", rt_out, "Ratings output (JSONL)")->required();
  rate->add_option("--log", rt_log, "Comparison log output (JSONL)");
  AddJudgeFlags(rate, rt_judge);

  // metrics
  std::string mt_ratings, mt_range_config, mt_attribute, mt_out, mt_relevance;
  double mt_alpha = kDefaultAlpha;
  int mt_levels = kDefaultControlLevels;
  auto* metrics = app.add_subcommand("metrics", "Compute smooth-control metrics");
  metrics->add_option("--ratings", mt_ratings, "Ratings (JSONL)")->required();
  metrics->add_option("--range-config", mt_range_config, "Range config (JSON)")
      ->required();
  metrics->add_option("--attribute", mt_attribute, "Attribute key in the range config")
      ->required();
  metrics->add_option("--alpha", mt_alpha, "MAE weight in the overall metric");
  metrics->add_option("--levels", mt_levels, "Number of control values");
  metrics->add_option("--relevance", mt_relevance,
                      "Relevance verdicts (JSONL {id, relevance}); "
                      "defaults to the ratings' own field");
  metrics->add_option("--out", mt_out, "Metrics JSON output");

  // select-params
  std::string sp_candidates, sp_range_config, sp_attribute, sp_model, sp_out;
  int sp_n = kDefaultControlLevels;
  double sp_alpha = kDefaultAlpha;
  bool sp_any_order = false;
  auto* select = app.add_subcommand("select-params",
                                    "Pick the best sequence of degree descriptions");
  select->add_option("--candidates", sp_candidates, "Candidates (JSONL)")->required();
  select->add_option("--n", sp_n, "Sequence length");
  select->add_option("--range-config", sp_range_config, "Range config (JSON)")
      ->required();
  select->add_option("--attribute", sp_attribute, "Attribute key in the range config")
      ->required();
  select->add_option("--alpha", sp_alpha, "MAE weight in the overall metric");
  select->add_option("--model", sp_model, "Model name recorded in the output");
  select->add_flag("--any-order", sp_any_order,
                   "Allow non-monotone sequences (small inputs only)");
  select->add_option("--out", sp_out, "Selection JSON output");

  // simulate
  std::string sim_config, sim_csv, sim_json;
  int sim_threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Run the convergence study");
  simulate->add_option("--config", sim_config, "Experiment config (JSON)")->required();
  simulate->add_option("--out-csv", sim_csv, "Curve CSV output")->required();
  simulate->add_option("--out-json", sim_json, "Curve bundle with config");
  simulate->add_option("--threads", sim_threads, "Worker threads (0 = all)");

  // calibrate-judge
  std::string cj_pool, cj_csv;
  double cj_granularity = 100.0;
  int cj_pairs = 1000;
  uint64_t cj_seed = 0;
  JudgeFlags cj_judge;
  auto* calibrate = app.add_subcommand(
      "calibrate-judge", "Compare judge win rates with the Elo curve");
  calibrate->add_option("--pool", cj_pool, "Rated items (JSONL {id, rating[, text]})")
      ->required();
  calibrate->add_option("--granularity", cj_granularity, "Bucket width in points");
  calibrate->add_option("--pairs-per-bucket", cj_pairs, "Samples per bucket");
  calibrate->add_option("--seed", cj_seed, "Random seed");
  calibrate->add_option("--out-csv", cj_csv, "Curve CSV output")->required();
  calibrate->add_option("--attribute", cj_judge.attribute, "Attribute for remote judging");
  AddJudgeFlags(calibrate, cj_judge);

  // bin
  std::string bn_ratings, bn_out;
  double bn_width = 100.0;
  std::optional<double> bn_origin;
  auto* bin = app.add_subcommand("bin", "Group rated items into rating bins");
  bin->add_option("--ratings", bn_ratings, "Ratings (JSONL {id, rating})")->required();
  bin->add_option("--width", bn_width, "Bin width in points");
  bin->add_option("--origin", bn_origin, "Lower edge of bin 0 (default: minimum)");
  bin->add_option("--out", bn_out, "Bins JSON output");

  // evaluate
  std::string ev_manifest;
  auto* evaluate = app.add_subcommand("evaluate", "Run a full evaluation manifest");
  evaluate->add_option("--manifest", ev_manifest, "Run manifest (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << Json{{"error", {{"kind", "invalid_argument"},
                                 {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  }

  if (*build) {
    bl_judge.attribute = bl_attribute;
    const std::vector<ResponseRecord> responses =
        LoadResponses(bl_responses, bl_queries, bl_attribute);
    std::unordered_map<ItemId, std::string> texts;
    std::vector<ItemId> ids;
    for (const ResponseRecord& r : responses) {
      texts[r.id] = r.text;
      ids.push_back(r.id);
    }
    JudgeHandle judge = MakeJudge(bl_judge, texts, bl_seed);
    const std::vector<ItemId> members =
        SampleLibraryMembers(ids, bl_size, DeriveSeed({bl_seed, 1}));
    LibraryBuildOptions options;
    options.duels_total =
        bl_duels > 0 ? bl_duels : static_cast<int64_t>(members.size()) * 50;
    options.rng_seed = DeriveSeed({bl_seed, 2});
    LibraryBuild lib = BuildLibrary(members, *judge.judge, options);
    WriteJsonFile(bl_out, lib.library.ToJson());
    if (!bl_log.empty()) WriteComparisonLog(bl_log, lib.log);
    if (!bl_range_out.empty()) {
      std::vector<double> r;
      for (const LibraryMember& m : lib.library.members()) r.push_back(m.rating);
      WriteJsonFile(bl_range_out,
                    Json{{std::string(AttributeName(ParseAttribute(bl_attribute))),
                          {{"r_min", RoundPoints(Percentile(r, 5))},
                           {"r_max", RoundPoints(Percentile(r, 95))}}}});
    }
    PrintJson({{"members", lib.library.size()},
               {"duels", lib.log.size()},
               {"iterations", lib.fit.iterations},
               {"regularized", lib.fit.regularized}});
  } else if (*rate) {
    rt_judge.attribute = rt_attribute.empty() ? "intensity" : rt_attribute;
    const std::vector<ResponseRecord> responses =
        LoadResponses(rt_responses, "", rt_attribute);
    std::unordered_map<ItemId, std::string> texts;
    std::vector<ItemId> ids;
    for (const ResponseRecord& r : responses) {
      texts[r.id] = r.text;
      ids.push_back(r.id);
    }
    ScheduleConfig config;
    config.strategy = ParseStrategy(rt_strategy);
    config.comparisons_per_item = rt_budget;
    config.rng_seed = rt_seed;
    std::optional<Library> library;
    if (UsesLibrary(config.strategy)) {
      if (rt_library.empty()) {
        throw PreconditionError(rt_strategy + " needs --library");
      }
      library = Library::FromJson(ReadJsonFile(rt_library));
    }
    JudgeHandle judge = MakeJudge(rt_judge, texts, rt_seed);
    std::vector<ComparisonRecord> log;
    ComparisonSink sink(&log);
    const std::vector<RatingEstimate> estimates =
        RateGroup(ids, library ? &*library : nullptr, *judge.judge, config,
                  kDefaultAnchorMean, &sink);
    std::vector<Json> lines;
    int failed = 0;
    for (size_t i = 0; i < estimates.size(); ++i) {
      const RatingEstimate& e = estimates[i];
      Json line = ResponseRating{e.id, responses[i].query_id,
                                 responses[i].control_value, e.current,
                                 e.duels_played, 1}
                      .ToJson();
      line.erase("relevance");
      if (e.failed) {
        ++failed;
        line["failed"] = true;
        line["error"] = e.error;
      }
      lines.push_back(std::move(line));
    }
    WriteJsonl(rt_out, lines);
    if (!rt_log.empty()) WriteComparisonLog(rt_log, log);
    PrintJson({{"rated", estimates.size()}, {"failed", failed},
               {"duels", log.size()}});
    if (failed > 0) {
      throw JudgeError(ErrorKind::kJudgeProtocol,
                       std::to_string(failed) +
                           " responses could not be fully rated; partial "
                           "estimates were written");
    }
  } else if (*metrics) {
    const AttributeRange range = ReadRangeConfig(mt_range_config, mt_attribute);
    std::vector<ResponseRating> ratings;
    ReadJsonl(mt_ratings, [&](int, const Json& j) {
      ratings.push_back(ResponseRating::FromJson(j));
    });
    if (!mt_relevance.empty()) {
      std::unordered_map<std::string, int> rel;
      ReadJsonl(mt_relevance, [&](int, const Json& j) {
        rel[j.at("id").get<std::string>()] = j.at("relevance").get<int>();
      });
      for (ResponseRating& r : ratings) {
        auto it = rel.find(r.id);
        if (it == rel.end()) {
          throw PreconditionError("no relevance verdict for '" + r.id + "'");
        }
        r.relevance = it->second;
      }
    }
    std::vector<std::vector<Rating>> per_level(mt_levels);
    std::vector<int> relevance;
    for (const ResponseRating& r : ratings) {
      if (r.control_value < 0 || r.control_value >= mt_levels) {
        throw InvalidArgument("control value " + std::to_string(r.control_value) +
                              " outside 0.." + std::to_string(mt_levels - 1));
      }
      per_level[r.control_value].push_back(r.rating);
      relevance.push_back(r.relevance);
    }
    std::vector<ControlLevelStats> levels;
    for (int cv = 0; cv < mt_levels; ++cv) {
      levels.push_back(ControlLevelStats::FromRatings(cv, per_level[cv]));
    }
    const MetricsReport report =
        BuildMetricsReport(levels, range, RelevanceScore(relevance), mt_alpha);
    if (!mt_out.empty()) WriteJsonFile(mt_out, report.ToJson());
    PrintJson(report.ToJson());
  } else if (*select) {
    const AttributeRange range = ReadRangeConfig(sp_range_config, sp_attribute);
    const std::vector<CandidateParameter> candidates = ReadCandidates(sp_candidates);
    SelectionOptions options;
    options.n = sp_n;
    options.alpha = sp_alpha;
    options.order = sp_any_order ? SequenceOrder::kAnyOrder : SequenceOrder::kMonotone;
    const ParameterSequence best = SelectBestSequence(candidates, range, options);
    const Json out{{"attribute", sp_attribute},
                   {"model", sp_model},
                   {"chosen_labels", best.chosen_labels},
                   {"overall", best.metric},
                   {"positions", best.chosen},
                   {"report", best.report.ToJson()},
                   {"enumerated", best.enumerated}};
    if (!sp_out.empty()) WriteJsonFile(sp_out, out);
    PrintJson(out);
  } else if (*simulate) {
    ConvergenceExperimentConfig config =
        ConvergenceExperimentConfig::FromJson(ReadJsonFile(sim_config));
    if (sim_threads > 0) config.threads = sim_threads;
    const std::vector<ConvergenceCurve> curves = RunConvergence(config);
    WriteTextFile(sim_csv, ConvergenceCsv(curves));
    if (!sim_json.empty()) {
      WriteJsonFile(sim_json, ConvergenceBundle(config, curves));
    }
  } else if (*calibrate) {
    std::vector<RatedItem> pool;
    std::unordered_map<ItemId, std::string> texts;
    ReadJsonl(cj_pool, [&](int, const Json& j) {
      RatedItem item{j.at("id").get<std::string>(), j.at("rating").get<double>()};
      if (j.contains("text")) texts[item.id] = j.at("text").get<std::string>();
      pool.push_back(std::move(item));
    });
    if (cj_judge.judge_config.empty() && cj_judge.oracle_truth.empty()) {
      cj_judge.oracle_truth = cj_pool;  // the pool's ratings are the truth
    }
    JudgeHandle judge = MakeJudge(cj_judge, texts, DeriveSeed({cj_seed, 1}));
    CalibrationOptions options{cj_granularity, cj_pairs, DeriveSeed({cj_seed, 2})};
    const std::vector<CalibrationPoint> points =
        RunCalibration(*judge.judge, pool, options);
    for (const CalibrationPoint& p : points) {
      if (p.sparse) {
        std::cerr << "warning: bucket " << p.bucket
                  << " has fewer distinct pairs than requested samples\n";
      }
    }
    WriteTextFile(cj_csv, CalibrationCsv(points));
  } else if (*bin) {
    std::vector<RatedItem> items;
    ReadJsonl(bn_ratings, [&](int, const Json& j) {
      items.push_back({j.at("id").get<std::string>(), j.at("rating").get<double>()});
    });
    Json out = Json::array();
    for (const RatingBin& b : BinByRating(items, bn_width, bn_origin)) {
      out.push_back({{"bin", b.bin_index},
                     {"width", b.width},
                     {"mean_rating", RoundPoints(b.mean_rating)},
                     {"members", b.members}});
    }
    if (!bn_out.empty()) WriteJsonFile(bn_out, out);
    PrintJson(out);
  } else if (*evaluate) {
    const EvaluationResult result = RunEvaluation(RunManifest::Load(ev_manifest));
    Json out = result.report.ToJson();
    out["comparisons"] = result.comparisons.size();
    PrintJson(out);
  }
  return 0;
}

}  // namespace smoothctl

int main(int argc, char** argv) {
  try {
    return smoothctl::Main(argc, argv);
  } catch (const smoothctl::Error& e) {
    std::cerr << nlohmann::json{{"error",
                                 {{"kind", smoothctl::ErrorKindName(e.kind())},
                                  {"message", e.what()}}}}
                     .dump()
              << "\n";
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error",
                                 {{"kind", "internal"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
  }
  return 1;
}
