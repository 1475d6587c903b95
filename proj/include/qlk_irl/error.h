// Copyright 2026 The QLK-IRL Authors
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

#ifndef QLK_IRL_ERROR_H_
#define QLK_IRL_ERROR_H_

#include <stdexcept>
#include <string>

namespace qlk_irl {

// Error categories. The CLI maps each one onto a process exit code.
enum class ErrorKind {
  kUsage,           // exit 1
  kConfig,          // exit 2
  kNonConvergence,  // exit 3
  kValidation,      // exit 4
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what)
      : Error(ErrorKind::kUsage, what) {}
};

// Malformed maze, bad grid shape, unreadable config file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

// Out-of-range indices, non-normalized policies, bad trajectory records.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

// Trajectory import failure. `record` is the zero-based data row.
class ImportError : public Error {
 public:
  ImportError(int record, const std::string& what);
  int record() const { return record_; }

 private:
  int record_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(ErrorKind::kNonConvergence, what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Metric applied to an environment it is not defined for.
class UnsupportedMetricError : public Error {
 public:
  explicit UnsupportedMetricError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

int ExitCode(ErrorKind kind);

}  // namespace qlk_irl

#endif  // QLK_IRL_ERROR_H_
