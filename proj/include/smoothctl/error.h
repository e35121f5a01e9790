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

#ifndef SMOOTHCTL_ERROR_H_
#define SMOOTHCTL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace smoothctl {

enum class ErrorKind {
  kInvalidArgument,
  kPrecondition,
  kEstimation,
  kScheduling,
  kJudgeProtocol,
  kTransport,
  kGeneration,
  kLibraryBuild,
  kConfig,
  kSchema,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// Base for every error raised by the toolkit. The kind is what the CLI
// reports in its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error InvalidArgument(const std::string& message) {
  return Error(ErrorKind::kInvalidArgument, message);
}

inline Error PreconditionError(const std::string& message) {
  return Error(ErrorKind::kPrecondition, message);
}

}  // namespace smoothctl

#endif  // SMOOTHCTL_ERROR_H_
