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


// Shared helpers for the unit and acceptance tests.

#ifndef SMOOTHCTL_TESTS_TEST_UTIL_H_
#define SMOOTHCTL_TESTS_TEST_UTIL_H_

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "smoothctl/rating.h"

namespace smoothctl::testing {

// `a_wins` + `b_wins` + `ties` duels between a and b, numbered from `seq`.
inline std::vector<ComparisonRecord> Duels(const ItemId& a, const ItemId& b,
                                           int a_wins, int b_wins,
                                           int ties = 0, int64_t seq = 0) {
  std::vector<ComparisonRecord> out;
  auto add = [&](Outcome o, int n) {
    for (int i = 0; i < n; ++i) out.push_back({a, b, o, "test", seq++});
  };
  add(Outcome::kAWins, a_wins);
  add(Outcome::kBWins, b_wins);
  add(Outcome::kTie, ties);
  return out;
}

inline void Append(std::vector<ComparisonRecord>& to,
                   std::vector<ComparisonRecord> more) {
  const int64_t base = to.empty() ? 0 : to.back().sequence_no + 1;
  for (ComparisonRecord& r : more) {
    r.sequence_no += base;
    to.push_back(std::move(r));
  }
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("smoothctl-test-" + std::to_string(rd()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// A local chat-completion endpoint. The handler sees the parsed request and
// returns the assistant content; requests numbered at or past fail_from get
// HTTP 500 instead.
class MockChatServer {
 public:
  using Handler = std::function<std::string(const nlohmann::json& request)>;

  explicit MockChatServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   const int64_t n = requests_++;
                   if (n >= fail_from_.load()) {
                     res.status = 500;
                     res.set_content("{\"error\":\"scripted failure\"}",
                                     "application/json");
                     return;
                   }
                   std::string content;
                   {
                     std::lock_guard lock(mu_);
                     content = handler_(nlohmann::json::parse(req.body));
                   }
                   nlohmann::json body{
                       {"choices",
                        {{{"message",
                           {{"role", "assistant"}, {"content", content}}}}}}};
                   res.set_content(body.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int64_t requests() const { return requests_.load(); }
  void FailFrom(int64_t n) { fail_from_ = n; }
  void Heal() { fail_from_ = INT64_MAX; }

  // Content of the last user message in a request.
  static std::string LastUserContent(const nlohmann::json& request) {
    const auto& messages = request.at("messages");
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
      if ((*it).at("role") == "user") return (*it).at("content");
    }
    return {};
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int64_t> requests_{0};
  std::atomic<int64_t> fail_from_{INT64_MAX};
  std::mutex mu_;
};

}  // namespace smoothctl::testing

#endif  // SMOOTHCTL_TESTS_TEST_UTIL_H_
