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

#include <map>
#include <string>
#include <string_view>

// Data files compiled into the binary (taxonomy manifest, prompt templates,
// lookup tables, presets). Keys are paths relative to data/.
namespace docinspect::resources {

const std::map<std::string_view, std::string_view>& all();

// Throws IoError when the resource does not exist.
std::string_view get(std::string_view path);

bool contains(std::string_view path);

// Splits a "@@ name" sectioned resource into name -> body. Bodies keep their
// trailing newline stripped.
std::map<std::string, std::string> sections(std::string_view text);

}  // namespace docinspect::resources
