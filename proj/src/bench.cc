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

#include "smoothctl/bench.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "smoothctl/json_io.h"
#include "smoothctl/remote_judge.h"

namespace smoothctl {
namespace {

constexpr std::string_view kAttributeNames[] = {
    "Anger", "Happiness", "Formality", "Understandability", "Conciseness"};

Error SchemaError(const std::string& message) {
  return Error(ErrorKind::kSchema, message);
}

Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string Lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Runs `fn(i)` for i in [0, n) on up to `threads` workers and rethrows the
// first failure after all workers stop.
void ParallelFor(size_t n, int threads,
                 const std::function<void(size_t)>& fn) {
  threads = std::clamp(threads, 1, static_cast<int>(std::max<size_t>(n, 1)));
  std::atomic<size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (size_t i = next++; i < n && !stop; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> workers;
    for (int t = 0; t < threads; ++t) workers.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

std::unordered_map<ItemId, std::string> ReadItemTexts(
    const std::filesystem::path& path) {
  std::unordered_map<ItemId, std::string> out;
  ReadJsonl(path, [&](int line, const Json& j) {
    try {
      out[j.at("id").get<std::string>()] = j.at("text").get<std::string>();
    } catch (const Json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line) + ": " +
                        e.what());
    }
  });
  return out;
}

std::unordered_map<ItemId, Rating> ReadTrueRatings(
    const std::filesystem::path& path) {
  std::unordered_map<ItemId, Rating> out;
  ReadJsonl(path, [&](int line, const Json& j) {
    try {
      out[j.at("id").get<std::string>()] = j.at("rating").get<double>();
    } catch (const Json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line) + ": " +
                        e.what());
    }
  });
  return out;
}

}  // namespace

std::string_view AttributeName(Attribute a) {
  return kAttributeNames[static_cast<int>(a)];
}

Attribute ParseAttribute(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (EqualsIgnoreCase(name, kAttributeNames[i])) {
      return static_cast<Attribute>(i);
    }
  }
  throw SchemaError("unknown attribute '" + std::string(name) + "'");
}

std::string_view MethodName(Method m) {
  return m == Method::kPrompting ? "PROMPTING" : "EXTERNAL";
}

Method ParseMethod(std::string_view name) {
  if (EqualsIgnoreCase(name, "PROMPTING")) return Method::kPrompting;
  if (EqualsIgnoreCase(name, "EXTERNAL")) return Method::kExternal;
  throw SchemaError("unknown method '" + std::string(name) + "'");
}

nlohmann::json QueryRecord::ToJson() const {
  return Json{{"id", id}, {"attribute", AttributeName(attribute)}, {"text", text}};
}

QueryRecord QueryRecord::FromJson(const nlohmann::json& j) {
  QueryRecord q;
  q.id = j.at("id").get<std::string>();
  q.attribute = ParseAttribute(j.at("attribute").get<std::string>());
  q.text = j.at("text").get<std::string>();
  if (q.id.empty()) throw SchemaError("query id is empty");
  if (q.text.empty()) throw SchemaError("query '" + q.id + "' has empty text");
  return q;
}

nlohmann::json ResponseRecord::ToJson() const {
  return Json{{"id", id},
              {"query_id", query_id},
              {"attribute", AttributeName(attribute)},
              {"control_value", control_value},
              {"method", MethodName(method)},
              {"parameter_label", parameter_label},
              {"text", text},
              {"model", model}};
}

ResponseRecord ResponseRecord::FromJson(const nlohmann::json& j) {
  ResponseRecord r;
  r.id = j.at("id").get<std::string>();
  r.query_id = j.at("query_id").get<std::string>();
  r.attribute = ParseAttribute(j.at("attribute").get<std::string>());
  r.control_value = j.at("control_value").get<int>();
  r.method = ParseMethod(j.value("method", std::string("PROMPTING")));
  r.parameter_label = j.value("parameter_label", std::string());
  r.text = j.at("text").get<std::string>();
  r.model = j.value("model", std::string());
  if (r.id.empty()) throw SchemaError("response id is empty");
  if (r.control_value < 0 || r.control_value > kMaxControlValue) {
    throw SchemaError("response '" + r.id + "' has control value " +
                      std::to_string(r.control_value) + " outside 0..9");
  }
  return r;
}

QueryIngest IngestQueries(const std::filesystem::path& path) {
  QueryIngest out;
  std::unordered_set<std::string> ids;
  ReadJsonl(path, [&](int line, const Json& j) {
    QueryRecord q;
    try {
      q = QueryRecord::FromJson(j);
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ":" + std::to_string(line) + ": " +
                                e.what());
    } catch (const Json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line) + ": " +
                        e.what());
    }
    if (!ids.insert(q.id).second) {
      throw SchemaError(path.string() + ":" + std::to_string(line) +
                        ": duplicate query id '" + q.id + "'");
    }
    ++out.counts[q.attribute];
    out.records.push_back(std::move(q));
  });
  if (out.records.empty()) {
    out.warnings.push_back(path.string() + " contains no queries");
  }
  return out;
}

std::vector<ResponseRecord> IngestResponses(
    const std::filesystem::path& path,
    const std::vector<QueryRecord>* queries) {
  std::unordered_set<std::string> query_ids;
  if (queries) {
    for (const QueryRecord& q : *queries) query_ids.insert(q.id);
  }
  std::vector<ResponseRecord> out;
  std::unordered_set<std::string> ids;
  ReadJsonl(path, [&](int line, const Json& j) {
    const std::string where = path.string() + ":" + std::to_string(line) + ": ";
    ResponseRecord r;
    try {
      r = ResponseRecord::FromJson(j);
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    } catch (const Json::exception& e) {
      throw SchemaError(where + e.what());
    }
    if (!ids.insert(r.id).second) {
      throw SchemaError(where + "duplicate response id '" + r.id + "'");
    }
    if (queries && !query_ids.count(r.query_id)) {
      throw SchemaError(where + "unknown query id '" + r.query_id + "'");
    }
    out.push_back(std::move(r));
  });
  return out;
}

void WriteQueries(const std::filesystem::path& path,
                  std::span<const QueryRecord> records) {
  std::vector<Json> lines;
  for (const QueryRecord& q : records) lines.push_back(q.ToJson());
  WriteJsonl(path, lines);
}

void WriteResponses(const std::filesystem::path& path,
                    std::span<const ResponseRecord> records) {
  std::vector<Json> lines;
  for (const ResponseRecord& r : records) lines.push_back(r.ToJson());
  WriteJsonl(path, lines);
}

int ConcisenessIntensity(std::string_view text) {
  int words = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

Rating ConcisenessRating(int word_count, const AttributeRange& range,
                         bool inverted) {
  const double w = static_cast<double>(word_count);
  return inverted ? range.r_min + range.r_max - w : w;
}

AttributeRange ReadRangeConfig(const std::filesystem::path& path,
                               std::string_view attribute) {
  const Json j = ReadJsonFile(path);
  for (const auto& [key, value] : j.items()) {
    if (!EqualsIgnoreCase(key, attribute)) continue;
    AttributeRange range;
    range.attribute = std::string(attribute);
    try {
      range.r_min = value.at("r_min").get<double>();
      range.r_max = value.at("r_max").get<double>();
    } catch (const Json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    range.Validate();
    return range;
  }
  throw ConfigError(path.string() + " has no range for attribute '" +
                    std::string(attribute) + "'");
}

double Percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw InvalidArgument("percentile of an empty list");
  if (!(pct >= 0.0 && pct <= 100.0)) {
    throw InvalidArgument("percentile must lie in [0, 100]");
  }
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void RunManifest::Validate() const {
  if (levels < 2 || levels > kMaxControlValue + 1) {
    throw ConfigError("levels must lie in 2..10");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in [0, 1]");
  }
  if (range) range->Validate();
  if (!range && !range_percentiles) {
    throw ConfigError("manifest needs a rating range or range percentiles");
  }
  if (range_percentiles &&
      !(range_percentiles->first >= 0 &&
        range_percentiles->first < range_percentiles->second &&
        range_percentiles->second <= 100)) {
    throw ConfigError("range percentiles must satisfy 0 <= lo < hi <= 100");
  }
  schedule.Validate();
  if (parallelism < 1) throw ConfigError("parallelism must be positive");
  auto require = [](const std::filesystem::path& p, const char* what) {
    if (!p.empty() && !std::filesystem::exists(p)) {
      throw Error(ErrorKind::kIo, std::string(what) + " '" + p.string() +
                                      "' does not exist");
    }
  };
  if (queries.empty()) throw ConfigError("manifest needs a queries file");
  require(queries, "queries file");
  require(responses, "responses file");
  require(library.load, "library file");
  require(library.texts, "library texts file");
  require(judge.true_ratings, "true ratings file");
  require(remote_config, "remote judge config");
  if (responses.empty() &&
      static_cast<int>(degree_descriptions.size()) != levels) {
    throw ConfigError("generating responses needs one degree description per "
                      "control value");
  }
}

RunManifest RunManifest::FromJson(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir) {
  auto resolve = [&](const Json& v) -> std::filesystem::path {
    std::filesystem::path p(v.get<std::string>());
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  RunManifest m;
  try {
    m.attribute = ParseAttribute(j.at("attribute").get<std::string>());
    m.model = j.value("model", std::string());
    m.method = ParseMethod(j.value("method", std::string("PROMPTING")));
    if (j.contains("range")) {
      const Json& r = j.at("range");
      if (r.contains("percentiles")) {
        const auto p = r.at("percentiles").get<std::vector<double>>();
        if (p.size() != 2) throw ConfigError("range percentiles need 2 values");
        m.range_percentiles = {p[0], p[1]};
      } else {
        m.range = AttributeRange{std::string(AttributeName(m.attribute)),
                                 r.at("r_min").get<double>(),
                                 r.at("r_max").get<double>()};
      }
    }
    m.levels = j.value("levels", m.levels);
    m.alpha = j.value("alpha", m.alpha);
    m.conciseness_inverted =
        j.value("conciseness_inverted", m.conciseness_inverted);
    m.queries = resolve(j.at("queries"));
    if (j.contains("responses")) m.responses = resolve(j.at("responses"));
    m.degree_descriptions =
        j.value("degree_descriptions", m.degree_descriptions);
    if (j.contains("library")) {
      const Json& l = j.at("library");
      if (l.contains("load")) m.library.load = resolve(l.at("load"));
      if (l.contains("texts")) m.library.texts = resolve(l.at("texts"));
      m.library.size = l.value("size", m.library.size);
      m.library.duels = l.value("duels", m.library.duels);
    }
    if (j.contains("judge")) {
      const Json& jd = j.at("judge");
      const std::string kind = jd.value("kind", std::string("oracle"));
      if (kind == "remote") {
        m.judge.kind = JudgeSpec::Kind::kRemote;
      } else if (kind == "oracle") {
        m.judge.kind = JudgeSpec::Kind::kOracle;
        m.judge.oracle_mode =
            ParseOracleMode(jd.value("mode", std::string("PROBABILISTIC")));
        m.judge.flip_prob = jd.value("flip_prob", 0.0);
        if (jd.contains("true_ratings")) {
          m.judge.true_ratings = resolve(jd.at("true_ratings"));
        }
      } else {
        throw ConfigError("unknown judge kind '" + kind + "'");
      }
    }
    if (j.contains("relevance")) {
      const Json& r = j.at("relevance");
      const std::string kind = r.value("kind", std::string("constant"));
      if (kind == "remote") {
        m.relevance.kind = RelevanceSpec::Kind::kRemote;
      } else if (kind == "constant") {
        m.relevance.kind = RelevanceSpec::Kind::kConstant;
        m.relevance.constant_score = r.value("score", 1);
      } else {
        throw ConfigError("unknown relevance kind '" + kind + "'");
      }
    }
    if (j.contains("remote")) m.remote_config = resolve(j.at("remote"));
    if (j.contains("scheduler")) {
      const Json& s = j.at("scheduler");
      m.schedule.strategy =
          ParseStrategy(s.value("strategy", std::string("CLOSEST_LIB")));
      m.schedule.comparisons_per_item =
          s.value("budget", m.schedule.comparisons_per_item);
      if (s.contains("k_schedule")) {
        m.schedule.k_schedule =
            KSchedule(s.at("k_schedule").get<std::vector<double>>());
      }
    }
    m.anchor_mean = j.value("anchor_mean", m.anchor_mean);
    m.parallelism = j.value("parallelism", m.parallelism);
    m.seed = j.value("seed", m.seed);
    m.schedule.rng_seed = m.seed;
    if (j.contains("output_dir")) m.output_dir = resolve(j.at("output_dir"));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest RunManifest::Load(const std::filesystem::path& path) {
  return FromJson(ReadJsonFile(path), path.parent_path());
}

nlohmann::json ResponseRating::ToJson() const {
  return Json{{"id", id},
              {"query_id", query_id},
              {"control_value", control_value},
              {"rating", RoundPoints(rating)},
              {"duels", duels},
              {"relevance", relevance}};
}

ResponseRating ResponseRating::FromJson(const nlohmann::json& j) {
  ResponseRating r;
  r.id = j.at("id").get<std::string>();
  r.query_id = j.value("query_id", std::string());
  r.control_value = j.at("control_value").get<int>();
  r.rating = j.at("rating").get<double>();
  r.duels = j.value("duels", 0);
  r.relevance = j.value("relevance", 1);
  return r;
}

EvaluationResult RunEvaluation(const RunManifest& manifest,
                               EvaluationComponents& components) {
  manifest.Validate();
  const QueryIngest ingest = IngestQueries(manifest.queries);
  for (const std::string& w : ingest.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  std::unordered_map<std::string, const QueryRecord*> query_by_id;
  for (const QueryRecord& q : ingest.records) query_by_id[q.id] = &q;

  // Stage 1: responses.
  std::vector<ResponseRecord> responses;
  if (!manifest.responses.empty()) {
    for (ResponseRecord& r :
         IngestResponses(manifest.responses, &ingest.records)) {
      if (r.attribute == manifest.attribute) responses.push_back(std::move(r));
    }
  } else {
    if (components.generator == nullptr) {
      throw PreconditionError("no responses file and no generator configured");
    }
    for (const QueryRecord& q : ingest.records) {
      if (q.attribute != manifest.attribute) continue;
      for (int cv = 0; cv < manifest.levels; ++cv) {
        const std::string& desc = manifest.degree_descriptions[cv];
        ResponseRecord r{q.id + "-cv" + std::to_string(cv),
                         q.id,
                         q.attribute,
                         cv,
                         manifest.method,
                         desc,
                         components.generator->Generate(q.text, desc),
                         manifest.model};
        responses.push_back(std::move(r));
      }
    }
    if (!manifest.output_dir.empty()) {
      WriteResponses(manifest.output_dir / "responses.jsonl", responses);
    }
  }
  if (responses.empty()) {
    throw PreconditionError("no responses for attribute " +
                            std::string(AttributeName(manifest.attribute)));
  }
  for (const ResponseRecord& r : responses) {
    if (r.control_value >= manifest.levels) {
      throw PreconditionError("response '" + r.id + "' has control value " +
                              std::to_string(r.control_value) + " but only " +
                              std::to_string(manifest.levels) +
                              " levels are configured");
    }
  }

  EvaluationResult result;
  std::vector<Rating> ratings(responses.size());
  std::vector<int> duels(responses.size(), 0);

  // Stage 2: intensity ratings.
  if (manifest.attribute == Attribute::kConciseness) {
    std::vector<double> counts;
    for (const ResponseRecord& r : responses) {
      counts.push_back(ConcisenessIntensity(r.text));
    }
    if (manifest.range) {
      result.range = *manifest.range;
    } else {
      result.range = {std::string(AttributeName(manifest.attribute)),
                      Percentile(counts, manifest.range_percentiles->first),
                      Percentile(counts, manifest.range_percentiles->second)};
      result.range.Validate();
    }
    for (size_t i = 0; i < responses.size(); ++i) {
      ratings[i] = ConcisenessRating(static_cast<int>(counts[i]), result.range,
                                     manifest.conciseness_inverted);
    }
  } else {
    if (!components.make_judge) {
      throw PreconditionError("no pairwise judge configured");
    }
    std::unordered_map<ItemId, std::string> texts;
    std::vector<ItemId> response_ids;
    for (const ResponseRecord& r : responses) {
      texts[r.id] = r.text;
      response_ids.push_back(r.id);
    }
    std::vector<ItemId> library_pool = response_ids;
    if (!manifest.library.texts.empty()) {
      library_pool.clear();
      for (auto& [id, text] : ReadItemTexts(manifest.library.texts)) {
        library_pool.push_back(id);
        texts.emplace(id, std::move(text));
      }
      std::sort(library_pool.begin(), library_pool.end());
    }
    std::unique_ptr<PairwiseJudge> inner = components.make_judge(texts);
    CountingJudge judge(*inner);

    const bool with_library = UsesLibrary(manifest.schedule.strategy);
    if (with_library) {
      if (!manifest.library.load.empty()) {
        result.library = Library::FromJson(ReadJsonFile(manifest.library.load));
      } else {
        const std::vector<ItemId> members = SampleLibraryMembers(
            library_pool, manifest.library.size,
            DeriveSeed({manifest.seed, 0x6c6962ULL}));
        LibraryBuildOptions options;
        options.duels_total =
            manifest.library.duels > 0
                ? manifest.library.duels
                : static_cast<int64_t>(members.size()) * 50;
        options.anchor_mean = manifest.anchor_mean;
        options.rng_seed = DeriveSeed({manifest.seed, 0x6275696c64ULL});
        LibraryBuild build = BuildLibrary(members, judge, options);
        result.library = std::move(build.library);
        result.comparisons = std::move(build.log);
      }
    }
    const int64_t next_seq =
        result.comparisons.empty() ? 0 : result.comparisons.back().sequence_no + 1;
    ComparisonSink sink(&result.comparisons, next_seq);
    const std::vector<RatingEstimate> estimates =
        RateGroup(response_ids, with_library ? &*result.library : nullptr,
                  judge, manifest.schedule, manifest.anchor_mean, &sink);
    for (size_t i = 0; i < estimates.size(); ++i) {
      const RatingEstimate& e = estimates[i];
      if (e.failed) {
        throw JudgeError(e.error_kind,
                         "rating '" + e.id + "' failed: " + e.error);
      }
      ratings[i] = e.current;
      duels[i] = e.duels_played;
    }
    result.comparisons_requested = judge.calls();

    if (manifest.range) {
      result.range = *manifest.range;
    } else {
      std::vector<double> basis;
      if (result.library) {
        for (const LibraryMember& m : result.library->members()) {
          basis.push_back(m.rating);
        }
      } else {
        basis = ratings;
      }
      result.range = {std::string(AttributeName(manifest.attribute)),
                      Percentile(basis, manifest.range_percentiles->first),
                      Percentile(basis, manifest.range_percentiles->second)};
      result.range.Validate();
    }
  }

  // Stage 3: relevance.
  if (components.relevance == nullptr) {
    throw PreconditionError("no relevance judge configured");
  }
  std::vector<int> relevance(responses.size(), 0);
  ParallelFor(responses.size(), manifest.parallelism, [&](size_t i) {
    const QueryRecord* q = query_by_id.at(responses[i].query_id);
    relevance[i] =
        JudgeRelevance(*components.relevance, q->text, responses[i].text).score;
  });

  // Stage 4: metrics.
  std::vector<std::vector<Rating>> per_level(manifest.levels);
  for (size_t i = 0; i < responses.size(); ++i) {
    per_level[responses[i].control_value].push_back(ratings[i]);
    result.ratings.push_back({responses[i].id, responses[i].query_id,
                              responses[i].control_value, ratings[i], duels[i],
                              relevance[i]});
  }
  for (int cv = 0; cv < manifest.levels; ++cv) {
    if (per_level[cv].empty()) {
      throw PreconditionError("control value " + std::to_string(cv) +
                              " has no responses");
    }
    result.levels.push_back(
        ControlLevelStats::FromRatings(cv, std::move(per_level[cv])));
  }
  result.report = BuildMetricsReport(result.levels, result.range,
                                     RelevanceScore(relevance), manifest.alpha);

  if (!manifest.output_dir.empty()) {
    const std::filesystem::path& out = manifest.output_dir;
    if (result.library) {
      WriteJsonFile(out / "library.json", result.library->ToJson());
    }
    WriteComparisonLog(out / "comparisons.jsonl", result.comparisons);
    std::vector<Json> lines;
    for (const ResponseRating& r : result.ratings) lines.push_back(r.ToJson());
    WriteJsonl(out / "ratings.jsonl", lines);
    Json metrics = result.report.ToJson();
    metrics["attribute"] = AttributeName(manifest.attribute);
    metrics["r_min"] = result.range.r_min;
    metrics["r_max"] = result.range.r_max;
    WriteJsonFile(out / "metrics.json", metrics);
  }
  return result;
}

EvaluationResult RunEvaluation(const RunManifest& manifest) {
  manifest.Validate();
  const bool any_remote = manifest.judge.kind == JudgeSpec::Kind::kRemote ||
                          manifest.relevance.kind == RelevanceSpec::Kind::kRemote ||
                          manifest.responses.empty();
  std::optional<JudgeConfig> remote;
  std::unique_ptr<HttpChatClient> client;
  std::unique_ptr<PromptTemplateSet> templates;
  std::unique_ptr<VerdictCache> cache;
  if (any_remote) {
    if (manifest.remote_config.empty()) {
      throw ConfigError("remote components need a 'remote' judge config");
    }
    remote = JudgeConfig::Load(manifest.remote_config);
    if (remote->templates_dir.empty()) {
      throw ConfigError("judge config has no templates directory");
    }
    client = std::make_unique<HttpChatClient>(remote->http);
    templates = std::make_unique<PromptTemplateSet>(
        PromptTemplateSet::LoadDirectory(remote->templates_dir));
    cache = std::make_unique<VerdictCache>(remote->cache_path);
  }

  EvaluationComponents components;
  const std::string attribute = Lowercase(AttributeName(manifest.attribute));
  if (manifest.judge.kind == JudgeSpec::Kind::kRemote) {
    components.make_judge = [&](const auto& texts) {
      RemoteJudgeOptions options;
      options.attribute = attribute;
      options.accept_tie = remote->accept_tie;
      options.randomize_presentation = remote->randomize_presentation;
      options.presentation_seed = remote->presentation_seed;
      options.model = remote->http.model;
      return std::unique_ptr<PairwiseJudge>(std::make_unique<RemotePairwiseJudge>(
          *client, templates->pairwise, texts, *cache, options));
    };
  } else {
    if (manifest.judge.true_ratings.empty() &&
        manifest.attribute != Attribute::kConciseness) {
      throw ConfigError("oracle judge needs a true_ratings file");
    }
    components.make_judge = [&](const auto&) {
      SyntheticOracleConfig oc;
      oc.true_ratings = ReadTrueRatings(manifest.judge.true_ratings);
      oc.mode = manifest.judge.oracle_mode;
      oc.flip_prob = manifest.judge.flip_prob;
      oc.rng_seed = DeriveSeed({manifest.seed, 0x6f7261636c65ULL});
      return std::unique_ptr<PairwiseJudge>(
          std::make_unique<SyntheticOracle>(std::move(oc)));
    };
  }

  std::unique_ptr<RelevanceJudge> relevance;
  if (manifest.relevance.kind == RelevanceSpec::Kind::kRemote) {
    relevance = std::make_unique<RemoteRelevanceJudge>(
        *client, templates->relevance, *cache, remote->http.model);
  } else {
    relevance =
        std::make_unique<ConstantRelevanceJudge>(manifest.relevance.constant_score);
  }
  components.relevance = relevance.get();

  std::unique_ptr<Generator> generator;
  if (manifest.responses.empty()) {
    generator = std::make_unique<RemoteGenerator>(
        *client, templates->generation, *cache, manifest.degree_descriptions,
        remote->generation_temperature, remote->http.model);
    components.generator = generator.get();
  }
  return RunEvaluation(manifest, components);
}

}  // namespace smoothctl
