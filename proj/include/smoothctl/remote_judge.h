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

// Chat-completion backed judges and generator.
//
// Every verdict and generation goes through a VerdictCache first, so an
// interrupted run can be repeated without paying for finished calls twice.

#ifndef SMOOTHCTL_REMOTE_JUDGE_H_
#define SMOOTHCTL_REMOTE_JUDGE_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "smoothctl/judge.h"

namespace smoothctl {

struct ChatMessage {
  std::string role;
  std::string content;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the assistant message content.
  virtual std::string Complete(const std::vector<ChatMessage>& messages,
                               double temperature) = 0;
};

struct HttpChatOptions {
  // Full endpoint, e.g. "https://host/v1/chat/completions".
  std::string endpoint;
  std::string model;
  std::string api_key;
  int max_in_flight = 8;
  int transport_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::seconds timeout{60};
};

// POSTs {model, messages, temperature} and reads choices[0].message.content.
// Connection failures, 429 and 5xx are retried with exponential backoff;
// anything still failing raises a transport error.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatOptions options);
  ~HttpChatClient() override;

  std::string Complete(const std::vector<ChatMessage>& messages,
                       double temperature) override;

  // Requests actually sent, retries included.
  int64_t requests_sent() const { return requests_sent_.load(); }

 private:
  std::string SendOnce(const std::string& body, bool& retryable);

  HttpChatOptions options_;
  std::string scheme_host_port_;
  std::string path_;
  std::counting_semaphore<> in_flight_;
  std::atomic<int64_t> requests_sent_{0};
};

// Plain-text templates with {name} placeholders.
class PromptTemplate {
 public:
  // Throws a config error unless each required placeholder occurs exactly
  // once.
  PromptTemplate(std::string text, std::vector<std::string> placeholders);

  std::string Fill(const std::map<std::string, std::string>& values) const;
  const std::string& text() const { return text_; }
  // Short content digest; part of every cache key.
  const std::string& id() const { return id_; }

 private:
  std::string text_;
  std::vector<std::string> placeholders_;
  std::string id_;
};

struct PromptTemplateSet {
  PromptTemplate pairwise;    // {attribute} {response_a} {response_b}
  PromptTemplate relevance;   // {query} {response}
  PromptTemplate generation;  // {query} {degree_description}

  static PromptTemplateSet Load(const std::filesystem::path& pairwise,
                                const std::filesystem::path& relevance,
                                const std::filesystem::path& generation);
  // Loads pairwise.txt, relevance.txt and generation.txt from `dir`.
  static PromptTemplateSet LoadDirectory(const std::filesystem::path& dir);
};

struct CacheEntry {
  std::string hash;
  std::string kind;  // "pair", "relevance" or "gen"
  std::string value;  // verdict letter, "0"/"1", or generated text
  std::string raw_reply;

  nlohmann::json ToJson() const;
  static CacheEntry FromJson(const nlohmann::json& j);
  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

// Append-only JSONL store shared by all remote components. Lookups take a
// shared lock; stores are serialized and flushed line by line. A truncated
// last line (from a killed process) is ignored on load.
class VerdictCache {
 public:
  // An empty path keeps the cache in memory only.
  explicit VerdictCache(std::filesystem::path path = {});

  std::optional<CacheEntry> Lookup(const std::string& hash) const;
  // First write wins; storing an existing hash is a no-op.
  void Store(const CacheEntry& entry);
  size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, CacheEntry> entries_;
};

struct RemoteJudgeOptions {
  std::string attribute;
  bool accept_tie = false;
  // Randomize which response is shown first; the verdict is mapped back.
  bool randomize_presentation = true;
  uint64_t presentation_seed = 0;
  std::string model;  // part of the cache key
};

// Judges item ids by their texts. Presentation order for a pair is a pure
// function of (texts, seed), so cached and live runs agree.
class RemotePairwiseJudge : public PairwiseJudge {
 public:
  RemotePairwiseJudge(ChatClient& client, const PromptTemplate& tmpl,
                      std::unordered_map<ItemId, std::string> texts,
                      VerdictCache& cache, RemoteJudgeOptions options);

  JudgeVerdict Compare(const ItemId& a, const ItemId& b) override;
  std::string Name() const override;

  // Network calls made by this judge (parse retries included).
  int64_t calls() const { return calls_.load(); }

 private:
  ChatClient& client_;
  const PromptTemplate& tmpl_;
  std::unordered_map<ItemId, std::string> texts_;
  VerdictCache& cache_;
  RemoteJudgeOptions options_;
  std::atomic<int64_t> calls_{0};
};

class RemoteRelevanceJudge : public RelevanceJudge {
 public:
  RemoteRelevanceJudge(ChatClient& client, const PromptTemplate& tmpl,
                       VerdictCache& cache, std::string model = {});

  RelevanceVerdict Judge(std::string_view query,
                         std::string_view response) override;
  int64_t calls() const { return calls_.load(); }

 private:
  ChatClient& client_;
  const PromptTemplate& tmpl_;
  VerdictCache& cache_;
  std::string model_;
  std::atomic<int64_t> calls_{0};
};

class RemoteGenerator : public Generator {
 public:
  RemoteGenerator(ChatClient& client, const PromptTemplate& tmpl,
                  VerdictCache& cache, std::vector<std::string> candidates,
                  double temperature, std::string model = {});
  int64_t calls() const { return calls_.load(); }

 protected:
  std::string DoGenerate(std::string_view query,
                         std::string_view degree_description) override;

 private:
  ChatClient& client_;
  const PromptTemplate& tmpl_;
  VerdictCache& cache_;
  double temperature_;
  std::string model_;
  std::atomic<int64_t> calls_{0};
};

// Parses a pairwise reply in the presented frame. Returns nullopt unless
// exactly one of the labels A, B (and TIE when allowed) appears as a token.
std::optional<Outcome> ParsePairwiseReply(std::string_view reply,
                                          bool accept_tie);
std::optional<int> ParseRelevanceReply(std::string_view reply);

// Remote judge settings as stored in a JSON config file. Relative paths
// resolve against the file's directory. JUDGE_API_KEY overrides api_key.
struct JudgeConfig {
  HttpChatOptions http;
  std::filesystem::path cache_path;
  std::filesystem::path templates_dir;
  bool accept_tie = false;
  bool randomize_presentation = true;
  uint64_t presentation_seed = 0;
  double generation_temperature = 0.7;

  static JudgeConfig FromJson(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
  static JudgeConfig Load(const std::filesystem::path& path);
};

}  // namespace smoothctl

#endif  // SMOOTHCTL_REMOTE_JUDGE_H_
