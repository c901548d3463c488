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
#include <string>
#include <string_view>
#include <vector>

// Unicode helpers. Offsets throughout the toolkit are counted in Unicode
// scalar values, so text is manipulated as std::u32string and converted at
// the boundaries. Invalid UTF-8 sequences decode to U+FFFD.
namespace docinspect::unicode {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
std::string encode(char32_t c);

std::size_t length(std::string_view utf8);

std::string nfc(std::string_view utf8);

// Grapheme cluster boundaries of `text`, always including 0 and text.size().
std::vector<std::size_t> grapheme_boundaries(std::u32string_view text);

// Categories Po, Ps, Pe, Pi, Pf. Fullwidth CJK punctuation falls in these too.
bool is_punctuation(char32_t c);
bool is_whitespace(char32_t c);
bool is_han(char32_t c);
// Letters and digits of the Latin script (ASCII digits included).
bool is_latin_alnum(char32_t c);
bool is_latin_letter(char32_t c);
bool is_letter(char32_t c);

// Trims trailing whitespace (any Unicode White_Space character).
std::u32string_view trim_trailing(std::u32string_view text);
std::string trim(std::string_view utf8);

// Lowercases ASCII letters only; used for tag and name matching.
std::string ascii_lower(std::string_view s);

}  // namespace docinspect::unicode
