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

#include "smoothctl/remote_judge.h"

#include "httplib.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <thread>

#include "smoothctl/hashing.h"
#include "smoothctl/json_io.h"
#include "smoothctl/random.h"

namespace smoothctl {
namespace {

Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}

// Releases an in-flight slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) {
    sem_.acquire();
  }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

std::vector<std::string> Tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string ToUpper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

HttpChatClient::HttpChatClient(HttpChatOptions options)
    : options_(std::move(options)),
      in_flight_(std::max(1, options_.max_in_flight)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.endpoint, m, kUrl)) {
    throw ConfigError("judge endpoint must be an http(s) URL, got '" +
                      options_.endpoint + "'");
  }
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (options_.transport_retries < 0) {
    throw ConfigError("transport retries must be non-negative");
  }
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::SendOnce(const std::string& body,
                                     bool& retryable) {
  httplib::Client cli(scheme_host_port_);
  cli.set_connection_timeout(options_.timeout);
  cli.set_read_timeout(options_.timeout);
  cli.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  ++requests_sent_;
  auto res = cli.Post(path_, headers, body, "application/json");
  if (!res) {
    retryable = true;
    throw JudgeError(ErrorKind::kTransport,
                     "request to " + scheme_host_port_ + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    retryable = true;
    throw JudgeError(ErrorKind::kTransport,
                     "endpoint answered HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    retryable = false;
    throw JudgeError(ErrorKind::kTransport,
                     "endpoint answered HTTP " + std::to_string(res->status) +
                         ": " + res->body.substr(0, 200));
  }
  return res->body;
}

std::string HttpChatClient::Complete(const std::vector<ChatMessage>& messages,
                                     double temperature) {
  Json request{{"model", options_.model},
               {"temperature", temperature},
               {"messages", Json::array()}};
  for (const ChatMessage& m : messages) {
    request["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  const std::string body = request.dump();

  std::string reply;
  {
    SlotGuard slot(in_flight_);
    for (int attempt = 0;; ++attempt) {
      bool retryable = false;
      try {
        reply = SendOnce(body, retryable);
        break;
      } catch (const JudgeError&) {
        if (!retryable || attempt >= options_.transport_retries) throw;
      }
      std::this_thread::sleep_for(options_.backoff_base * (1 << attempt));
    }
  }
  Json parsed = Json::parse(reply, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    throw JudgeError(ErrorKind::kJudgeProtocol,
                     "completion response is not JSON");
  }
  try {
    return parsed.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const Json::exception&) {
    throw JudgeError(ErrorKind::kJudgeProtocol,
                     "completion response lacks choices[0].message.content");
  }
}

PromptTemplate::PromptTemplate(std::string text,
                               std::vector<std::string> placeholders)
    : text_(std::move(text)),
      placeholders_(std::move(placeholders)),
      id_(Sha256Hex(text_).substr(0, 16)) {
  for (const std::string& name : placeholders_) {
    const std::string token = "{" + name + "}";
    size_t count = 0;
    for (size_t pos = text_.find(token); pos != std::string::npos;
         pos = text_.find(token, pos + token.size())) {
      ++count;
    }
    if (count != 1) {
      throw ConfigError("template placeholder " + token + " occurs " +
                        std::to_string(count) + " times, expected once");
    }
  }
}

std::string PromptTemplate::Fill(
    const std::map<std::string, std::string>& values) const {
  // Locate every placeholder in the template first so substituted text is
  // never scanned again.
  std::vector<std::pair<size_t, const std::string*>> spots;
  for (const std::string& name : placeholders_) {
    auto it = values.find(name);
    if (it == values.end()) {
      throw InvalidArgument("no value for template placeholder {" + name + "}");
    }
    spots.emplace_back(text_.find("{" + name + "}"), &it->first);
  }
  std::sort(spots.begin(), spots.end());
  std::string out;
  size_t at = 0;
  for (const auto& [pos, name] : spots) {
    out.append(text_, at, pos - at);
    out += values.at(*name);
    at = pos + name->size() + 2;
  }
  out.append(text_, at, std::string::npos);
  return out;
}

PromptTemplateSet PromptTemplateSet::Load(
    const std::filesystem::path& pairwise,
    const std::filesystem::path& relevance,
    const std::filesystem::path& generation) {
  return PromptTemplateSet{
      PromptTemplate(ReadTextFile(pairwise),
                     {"attribute", "response_a", "response_b"}),
      PromptTemplate(ReadTextFile(relevance), {"query", "response"}),
      PromptTemplate(ReadTextFile(generation), {"query", "degree_description"})};
}

PromptTemplateSet PromptTemplateSet::LoadDirectory(
    const std::filesystem::path& dir) {
  return Load(dir / "pairwise.txt", dir / "relevance.txt",
              dir / "generation.txt");
}

nlohmann::json CacheEntry::ToJson() const {
  Json j{{"hash", hash}, {"kind", kind}, {"raw_reply", raw_reply}};
  j[kind == "gen" ? "text" : "verdict"] = value;
  return j;
}

CacheEntry CacheEntry::FromJson(const nlohmann::json& j) {
  CacheEntry e;
  e.hash = j.at("hash").get<std::string>();
  e.kind = j.at("kind").get<std::string>();
  if (e.kind != "pair" && e.kind != "relevance" && e.kind != "gen") {
    throw Error(ErrorKind::kSchema, "unknown cache entry kind '" + e.kind + "'");
  }
  e.value = j.at(e.kind == "gen" ? "text" : "verdict").get<std::string>();
  e.raw_reply = j.at("raw_reply").get<std::string>();
  return e;
}

VerdictCache::VerdictCache(std::filesystem::path path)
    : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  const std::string text = ReadTextFile(path_);
  size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    const bool last = end == std::string::npos;
    if (last) end = text.size();
    ++line_no;
    const std::string line = text.substr(start, end - start);
    const size_t line_start = start;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      CacheEntry e = CacheEntry::FromJson(Json::parse(line));
      entries_.emplace(e.hash, std::move(e));
    } catch (const std::exception& ex) {
      if (last) {
        // A writer died mid-line. Cut the fragment off so later appends
        // start on a clean line.
        std::cerr << "warning: dropping truncated cache line " << line_no
                  << " in " << path_.string() << "\n";
        std::filesystem::resize_file(path_, line_start);
        return;
      }
      throw Error(ErrorKind::kSchema, path_.string() + ":" +
                                          std::to_string(line_no) + ": " +
                                          ex.what());
    }
  }
  if (!text.empty() && text.back() != '\n') {
    std::ofstream(path_, std::ios::app) << '\n';
  }
}

std::optional<CacheEntry> VerdictCache::Lookup(const std::string& hash) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(hash);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void VerdictCache::Store(const CacheEntry& entry) {
  std::unique_lock lock(mu_);
  if (!entries_.emplace(entry.hash, entry).second) return;
  if (path_.empty()) return;
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << entry.ToJson().dump() << '\n';
  out.flush();
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot append to cache " + path_.string());
  }
}

size_t VerdictCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::optional<Outcome> ParsePairwiseReply(std::string_view reply,
                                          bool accept_tie) {
  std::set<Outcome> seen;
  for (const std::string& tok : Tokens(reply)) {
    if (tok == "A") {
      seen.insert(Outcome::kAWins);
    } else if (tok == "B") {
      seen.insert(Outcome::kBWins);
    } else if (ToUpper(tok) == "TIE") {
      if (!accept_tie) return std::nullopt;
      seen.insert(Outcome::kTie);
    }
  }
  if (seen.size() != 1) return std::nullopt;
  return *seen.begin();
}

std::optional<int> ParseRelevanceReply(std::string_view reply) {
  std::set<int> seen;
  for (const std::string& tok : Tokens(reply)) {
    if (tok == "0") seen.insert(0);
    if (tok == "1") seen.insert(1);
  }
  if (seen.size() != 1) return std::nullopt;
  return *seen.begin();
}

RemotePairwiseJudge::RemotePairwiseJudge(
    ChatClient& client, const PromptTemplate& tmpl,
    std::unordered_map<ItemId, std::string> texts, VerdictCache& cache,
    RemoteJudgeOptions options)
    : client_(client),
      tmpl_(tmpl),
      texts_(std::move(texts)),
      cache_(cache),
      options_(std::move(options)) {}

std::string RemotePairwiseJudge::Name() const {
  return "remote:" + (options_.model.empty() ? "judge" : options_.model);
}

JudgeVerdict RemotePairwiseJudge::Compare(const ItemId& a, const ItemId& b) {
  if (a == b) throw PreconditionError("cannot compare '" + a + "' with itself");
  auto text_of = [&](const ItemId& id) -> const std::string& {
    auto it = texts_.find(id);
    if (it == texts_.end() || it->second.empty()) {
      throw PreconditionError("no text for item '" + id + "'");
    }
    return it->second;
  };
  const std::string& ta = text_of(a);
  const std::string& tb = text_of(b);

  bool swap = false;
  if (options_.randomize_presentation) {
    const uint64_t h = HashPrefix64(ContentHash({"present", ta, tb}));
    swap = (DeriveSeed({options_.presentation_seed, h}) & 1) != 0;
  }
  const std::string& first = swap ? tb : ta;
  const std::string& second = swap ? ta : tb;
  const std::string key = ContentHash(
      {"pair", tmpl_.id(), options_.model, options_.attribute, first, second});
  auto restore = [&](Outcome shown) { return swap ? Mirror(shown) : shown; };

  if (auto hit = cache_.Lookup(key)) {
    return {restore(ParseOutcome(hit->value)), hit->raw_reply, true};
  }
  std::vector<ChatMessage> messages{
      {"user", tmpl_.Fill({{"attribute", options_.attribute},
                           {"response_a", first},
                           {"response_b", second}})}};
  ++calls_;
  std::string raw = client_.Complete(messages, 0.0);
  std::optional<Outcome> shown = ParsePairwiseReply(raw, options_.accept_tie);
  if (!shown) {
    messages.push_back({"assistant", raw});
    messages.push_back(
        {"user", options_.accept_tie
                     ? "Answer with a single word: A, B or TIE."
                     : "Answer with a single letter: A or B."});
    ++calls_;
    raw = client_.Complete(messages, 0.0);
    shown = ParsePairwiseReply(raw, options_.accept_tie);
  }
  if (!shown) {
    throw JudgeError(ErrorKind::kJudgeProtocol,
                     "unparseable pairwise verdict: '" + raw.substr(0, 200) +
                         "'");
  }
  cache_.Store({key, "pair", std::string(OutcomeName(*shown)), raw});
  return {restore(*shown), raw, false};
}

RemoteRelevanceJudge::RemoteRelevanceJudge(ChatClient& client,
                                           const PromptTemplate& tmpl,
                                           VerdictCache& cache,
                                           std::string model)
    : client_(client), tmpl_(tmpl), cache_(cache), model_(std::move(model)) {}

RelevanceVerdict RemoteRelevanceJudge::Judge(std::string_view query,
                                             std::string_view response) {
  if (query.empty() || response.empty()) {
    throw PreconditionError("relevance judging needs a query and a response");
  }
  const std::string key =
      ContentHash({"relevance", tmpl_.id(), model_, query, response});
  if (auto hit = cache_.Lookup(key)) {
    return {std::stoi(hit->value), hit->raw_reply, true};
  }
  std::vector<ChatMessage> messages{
      {"user", tmpl_.Fill({{"query", std::string(query)},
                           {"response", std::string(response)}})}};
  ++calls_;
  std::string raw = client_.Complete(messages, 0.0);
  std::optional<int> score = ParseRelevanceReply(raw);
  if (!score) {
    messages.push_back({"assistant", raw});
    messages.push_back(
        {"user", "Answer with a single digit: 1 if relevant, 0 if not."});
    ++calls_;
    raw = client_.Complete(messages, 0.0);
    score = ParseRelevanceReply(raw);
  }
  if (!score) {
    throw JudgeError(ErrorKind::kJudgeProtocol,
                     "unparseable relevance verdict: '" + raw.substr(0, 200) +
                         "'");
  }
  cache_.Store({key, "relevance", std::to_string(*score), raw});
  return {*score, raw, false};
}

RemoteGenerator::RemoteGenerator(ChatClient& client,
                                 const PromptTemplate& tmpl,
                                 VerdictCache& cache,
                                 std::vector<std::string> candidates,
                                 double temperature, std::string model)
    : Generator(std::move(candidates)),
      client_(client),
      tmpl_(tmpl),
      cache_(cache),
      temperature_(temperature),
      model_(std::move(model)) {}

std::string RemoteGenerator::DoGenerate(std::string_view query,
                                        std::string_view degree_description) {
  const std::string key =
      ContentHash({"gen", tmpl_.id(), model_, std::to_string(temperature_),
                   query, degree_description});
  if (auto hit = cache_.Lookup(key)) return hit->value;
  ++calls_;
  std::string text = client_.Complete(
      {{"user", tmpl_.Fill({{"query", std::string(query)},
                            {"degree_description",
                             std::string(degree_description)}})}},
      temperature_);
  if (!text.empty()) cache_.Store({key, "gen", text, text});
  return text;
}

JudgeConfig JudgeConfig::FromJson(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  JudgeConfig c;
  try {
    c.http.endpoint = j.at("endpoint").get<std::string>();
    c.http.model = j.value("model", std::string());
    c.http.api_key = j.value("api_key", std::string());
    c.http.max_in_flight = j.value("max_in_flight", c.http.max_in_flight);
    c.http.transport_retries = j.value("retries", c.http.transport_retries);
    c.http.backoff_base = std::chrono::milliseconds(
        j.value("backoff_ms", static_cast<int64_t>(c.http.backoff_base.count())));
    c.http.timeout = std::chrono::seconds(
        j.value("timeout_s", static_cast<int64_t>(c.http.timeout.count())));
    if (j.contains("cache")) c.cache_path = resolve(j.at("cache"));
    if (j.contains("templates")) c.templates_dir = resolve(j.at("templates"));
    c.accept_tie = j.value("accept_tie", c.accept_tie);
    c.randomize_presentation =
        j.value("randomize_presentation", c.randomize_presentation);
    c.presentation_seed = j.value("seed", c.presentation_seed);
    c.generation_temperature =
        j.value("generation_temperature", c.generation_temperature);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("judge config: ") + e.what());
  }
  if (const char* key = std::getenv("JUDGE_API_KEY"); key && *key) {
    c.http.api_key = key;
  }
  if (c.http.max_in_flight < 1) {
    throw ConfigError("max_in_flight must be positive");
  }
  return c;
}

JudgeConfig JudgeConfig::Load(const std::filesystem::path& path) {
  return FromJson(ReadJsonFile(path), path.parent_path());
}

}  // namespace smoothctl
