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

#include "docinspect/resources.hpp"

#include "docinspect/error.hpp"

namespace docinspect::resources {

std::string_view get(std::string_view path) {
  const auto& table = all();
  auto it = table.find(path);
  if (it == table.end()) throw IoError("missing built-in resource: " + std::string(path));
  return it->second;
}

bool contains(std::string_view path) { return all().count(path) > 0; }

std::map<std::string, std::string> sections(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string current;
  std::string body;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    while (!body.empty() && body.back() == '\n') body.pop_back();
    out[current] = body;
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (line.rfind("@@ ", 0) == 0) {
      flush();
      current = std::string(line.substr(3));
      body.clear();
      open = true;
    } else if (open) {
      body.append(line);
      body.push_back('\n');
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  flush();
  return out;
}

}  // namespace docinspect::resources
