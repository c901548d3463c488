// Copyright 2026 The docinspect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace docinspect {

// Half-open interval in canonical units: Unicode scalar values for text and
// LaTeX, cell indices (row-major over the parsed cells) for tables.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

// Replace input[start, end) with `replacement`. Offsets refer to the input of
// the perturbation that produced the receipt.
struct Splice {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string replacement;

  bool operator==(const Splice&) const = default;
};

struct PerturbationReceipt {
  std::string error_type;
  std::vector<Span> spans_touched;  // in the output of this perturbation
  std::uint64_t rng_seed = 0;
  std::map<std::string, std::string> parameters;
  std::vector<Splice> edits;  // empty for table perturbations

  bool operator==(const PerturbationReceipt&) const = default;
};

// Applies splices (non-overlapping, any order) to UTF-8 text whose offsets are
// scalar values. Throws ValidationError on out-of-range or overlapping edits.
std::string apply_splices(const std::string& input, std::vector<Splice> edits);

}  // namespace docinspect
