// Copyright 2026 The vcl Authors. All Rights Reserved.
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vcl::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Criteria 1 to 8 in order. Without `include_slow` only the fast checks
/// (1, 2, 3, 5) run. `cli` is the path of the vcl executable used for the
/// determinism check; empty runs it in-process. Each result is printed to
/// `progress` as soon as it is known.
std::vector<CriterionResult> run_criteria(bool include_slow, const std::string& cli = {},
                                          std::ostream* progress = nullptr);

std::string format_line(const CriterionResult& r);

/// Prints one PASS/FAIL line per criterion; true when all pass.
bool run_selftest(std::ostream& out, bool include_slow, const std::string& cli = {});

}  // namespace vcl::acceptance
