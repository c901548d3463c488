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

#include "docinspect/receipt.hpp"

#include <algorithm>

#include "docinspect/error.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect {

std::string apply_splices(const std::string& input, std::vector<Splice> edits) {
  std::u32string text = unicode::decode(input);
  std::sort(edits.begin(), edits.end(), [](const Splice& a, const Splice& b) {
    return a.start != b.start ? a.start > b.start : a.end > b.end;
  });
  std::size_t limit = text.size();
  for (const auto& e : edits) {
    if (e.start > e.end || e.end > limit) throw ValidationError("splice out of range or overlapping");
    text.replace(e.start, e.end - e.start, unicode::decode(e.replacement));
    limit = e.start;
  }
  return unicode::encode(text);
}

}  // namespace docinspect
