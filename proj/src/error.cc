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

#include "qlk_irl/error.h"

namespace qlk_irl {

ImportError::ImportError(int record, const std::string& what)
    : Error(ErrorKind::kValidation,
            "record " + std::to_string(record) + ": " + what),
      record_(record) {}

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return 1;
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kNonConvergence:
      return 3;
    case ErrorKind::kValidation:
      return 4;
  }
  return 4;
}

}  // namespace qlk_irl
