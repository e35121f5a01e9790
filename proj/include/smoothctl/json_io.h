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

#ifndef SMOOTHCTL_JSON_IO_H_
#define SMOOTHCTL_JSON_IO_H_

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "smoothctl/rating.h"

namespace smoothctl {

using Json = nlohmann::json;

// Ratings are written with at most 6 decimal places.
double RoundPoints(double points);

// Calls `fn(line_number, record)` for every non-blank line. Malformed JSON
// raises a schema error naming the 1-based line number.
void ReadJsonl(const std::filesystem::path& path,
               const std::function<void(int, const Json&)>& fn);

void WriteJsonl(const std::filesystem::path& path,
                std::span<const Json> records);

Json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const Json& value);
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

// {"a": id, "b": id, "outcome": "A"|"B"|"TIE", "judge": str, "seq": int}
Json ComparisonToJson(const ComparisonRecord& record);
ComparisonRecord ComparisonFromJson(const Json& j);

std::vector<ComparisonRecord> ReadComparisonLog(
    const std::filesystem::path& path);
void WriteComparisonLog(const std::filesystem::path& path,
                        std::span<const ComparisonRecord> records);

// Throws a schema error if `sequence_no` is not strictly increasing or a
// record compares an item with itself.
void ValidateComparisonLog(std::span<const ComparisonRecord> records);

}  // namespace smoothctl

#endif  // SMOOTHCTL_JSON_IO_H_
