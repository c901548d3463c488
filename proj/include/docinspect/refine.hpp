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

#include <optional>
#include <string>
#include <string_view>

#include "docinspect/cocl.hpp"
#include "docinspect/corpus.hpp"

namespace docinspect::client {

enum class RefineMode { NoGuidance, BinaryGuidance, DetailedGuidance };
std::string_view to_string(RefineMode mode);
// Accepts "none", "binary", "detailed" and the short forms "ng", "bg", "dg".
RefineMode parse_refine_mode(std::string_view name);

// Renders the refinement prompt for one case. Guided modes need the judge
// output and return nullopt when its verdict is Good, since only bad cases
// are refined. The detailed mode lists every detected type with its
// definition, followed by the judge's reasoning when present.
std::optional<std::string> build_refiner_prompt(RefineMode mode, const ParsingCase& c,
                                                const std::optional<cocl::JudgeOutput>& judge);

}  // namespace docinspect::client
