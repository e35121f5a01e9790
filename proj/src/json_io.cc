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

#include "smoothctl/json_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace smoothctl {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid_argument";
    case ErrorKind::kPrecondition:
      return "precondition";
    case ErrorKind::kEstimation:
      return "estimation";
    case ErrorKind::kScheduling:
      return "scheduling";
    case ErrorKind::kJudgeProtocol:
      return "judge_protocol";
    case ErrorKind::kTransport:
      return "transport";
    case ErrorKind::kGeneration:
      return "generation";
    case ErrorKind::kLibraryBuild:
      return "library_build";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kSchema:
      return "schema";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

double RoundPoints(double points) {
  if (!std::isfinite(points)) return points;
  return std::round(points * 1e6) / 1e6;
}

void ReadJsonl(const std::filesystem::path& path,
               const std::function<void(int, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorKind::kSchema, path.string() + ":" +
                                          std::to_string(line_no) +
                                          ": malformed JSON: " + e.what());
    }
    try {
      fn(line_no, record);
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kSchema, path.string() + ":" +
                                          std::to_string(line_no) + ": " +
                                          e.what());
    }
  }
}

void WriteJsonl(const std::filesystem::path& path,
                std::span<const Json> records) {
  std::ostringstream out;
  for (const Json& r : records) out << r.dump() << '\n';
  WriteTextFile(path, out.str());
}

Json ReadJsonFile(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kSchema,
                path.string() + ": malformed JSON: " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const Json& value) {
  WriteTextFile(path, value.dump(2) + "\n");
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
}

Json ComparisonToJson(const ComparisonRecord& record) {
  return Json{{"a", record.item_a},
              {"b", record.item_b},
              {"outcome", OutcomeName(record.outcome)},
              {"judge", record.judge_id},
              {"seq", record.sequence_no}};
}

ComparisonRecord ComparisonFromJson(const Json& j) {
  ComparisonRecord r;
  r.item_a = j.at("a").get<std::string>();
  r.item_b = j.at("b").get<std::string>();
  r.outcome = ParseOutcome(j.at("outcome").get<std::string>());
  r.judge_id = j.value("judge", "");
  r.sequence_no = j.at("seq").get<int64_t>();
  return r;
}

std::vector<ComparisonRecord> ReadComparisonLog(
    const std::filesystem::path& path) {
  std::vector<ComparisonRecord> out;
  ReadJsonl(path, [&](int, const Json& j) {
    out.push_back(ComparisonFromJson(j));
  });
  ValidateComparisonLog(out);
  return out;
}

void WriteComparisonLog(const std::filesystem::path& path,
                        std::span<const ComparisonRecord> records) {
  std::vector<Json> lines;
  lines.reserve(records.size());
  for (const ComparisonRecord& r : records) lines.push_back(ComparisonToJson(r));
  WriteJsonl(path, lines);
}

void ValidateComparisonLog(std::span<const ComparisonRecord> records) {
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].item_a == records[i].item_b) {
      throw Error(ErrorKind::kSchema, "record " + std::to_string(i) +
                                          " compares '" + records[i].item_a +
                                          "' with itself");
    }
    if (i > 0 && records[i].sequence_no <= records[i - 1].sequence_no) {
      throw Error(ErrorKind::kSchema,
                  "sequence numbers must strictly increase (record " +
                      std::to_string(i) + ")");
    }
  }
}

}  // namespace smoothctl
