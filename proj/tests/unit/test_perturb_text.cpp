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

#include <gtest/gtest.h>

#include <algorithm>

#include "corpus_gen.hpp"
#include "docinspect/corpus.hpp"
#include "docinspect/error.hpp"
#include "docinspect/latex.hpp"
#include "docinspect/perturb_text.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::text {
namespace {

std::size_t count_of(std::string_view s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

// Replaying the receipt's splices on the input must give the output.
void expect_honest(std::string_view input, const TextPerturbation& p) {
  EXPECT_EQ(apply_splices(std::string(input), p.receipt.edits), p.output) << p.receipt.error_type;
  EXPECT_FALSE(canonical_equal(ElementKind::Text, input, p.output)) << p.receipt.error_type << ": " << input;
}

TEST(Title, PrefixesOneToThreeHashes) {
  std::set<int> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(s);
    const auto p = misrecognize_as_title("Results", rng);
    const std::size_t k = p.output.find(' ');
    ASSERT_GE(k, 1u);
    ASSERT_LE(k, 3u);
    EXPECT_EQ(p.output, std::string(k, '#') + " Results");
    EXPECT_EQ(p.receipt.parameters.at("k"), std::to_string(k));
    seen.insert(static_cast<int>(k));
    expect_honest("Results", p);
  }
  EXPECT_EQ(seen.size(), 3u);
}

TEST(Title, Preconditions) {
  Rng rng(1);
  EXPECT_THROW(misrecognize_as_title("", rng), PreconditionError);
  EXPECT_THROW(misrecognize_as_title(std::string(61, 'a'), rng), PreconditionError);
  EXPECT_NO_THROW(misrecognize_as_title(std::string(60, 'a'), rng));
}

TEST(Paragraph, DeleteAndInsertBranches) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    const std::string in = "First line here\nsecond line there\nthird";
    const auto p = paragraph_format_error(in, rng);
    expect_honest(in, p);
    const auto before = count_of(in, '\n'), after = count_of(p.output, '\n');
    if (p.receipt.parameters.at("branch") == "delete") {
      EXPECT_LT(after, before);
      EXPECT_GE(after + 2, before);
    } else {
      EXPECT_GE(after, before + 1);
      EXPECT_LE(after, before + 5);
    }
  }
}

TEST(Paragraph, DeletionJoinsPlainly) {
  bool saw = false;
  for (std::uint64_t s = 0; s < 100 && !saw; ++s) {
    Rng rng(s);
    const auto p = paragraph_format_error("a\nb", rng);
    if (p.receipt.parameters.at("branch") == "delete") {
      EXPECT_EQ(p.output, "ab");
      saw = true;
    }
  }
  EXPECT_TRUE(saw);
}

TEST(Paragraph, SingleLineInsertsOneToFive) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const std::string in = "A single line of body text without breaks.";
    const auto p = paragraph_format_error(in, rng);
    const auto n = count_of(p.output, '\n');
    EXPECT_GE(n, 1u);
    EXPECT_LE(n, 5u);
    EXPECT_NE(p.output.front(), '\n');
    EXPECT_NE(p.output.back(), '\n');
  }
}

TEST(List, JoinsMarkerLines) {
  bool joined = false;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    const auto p = list_format_error("1. a\n2. b", rng);
    expect_honest("1. a\n2. b", p);
    joined = joined || p.output == "1. a2. b";
  }
  EXPECT_TRUE(joined);
  Rng rng(1);
  EXPECT_THROW(list_format_error("A plain paragraph with no list at all.", rng), PreconditionError);
}

// Hand-labeled marker offsets.
TEST(List, MarkerDetectionFixture) {
  const std::vector<std::pair<std::u32string, std::vector<std::size_t>>> fixture = {
      {U"1. a\n2. b", {0, 5}},
      {U"(1) first\n(2) second", {0, 10}},
      {U"- x\n- y\n- z", {0, 4, 8}},
      {U"• apples\n• pears", {0, 9}},
      {U"一、总则\n二、范围", {0, 5}},
      {U"① 第一\n② 第二", {0, 5}},
      {U"Plain text.", {}},
      {U"The value 1. is odd", {}},
      {U"  3. indented", {2}},
      {U"10. ten\n11. eleven", {0, 8}},
      {U"a - b", {}},
      {U"intro\n1) one\n2) two", {6, 13}},
      {U"(a) alpha\n(b) beta", {}},
      {U"* star\n* star", {0, 7}},
      {U"1.5 is a number", {}},
      {U"（1）中文\n（2）列表", {0, 6}},
      {U"", {}},
      {U"\n- after blank", {1}},
      {U"x\ny", {}},
      {U"1. only one", {0}},
  };
  ASSERT_EQ(fixture.size(), 20u);
  for (const auto& [text, want] : fixture) {
    EXPECT_EQ(find_list_markers(text), want) << unicode::encode(text);
  }
}

TEST(TitleFormat, RemovesLeadingSyntaxOnly) {
  EXPECT_EQ(title_format_error("## Intro").output, "Intro");
  EXPECT_EQ(title_format_error("# A # B").output, "A # B");
  expect_honest("### Deep", title_format_error("### Deep"));
  EXPECT_THROW(title_format_error("Intro"), PreconditionError);
}

TEST(Superscript, PlainEquivalents) {
  EXPECT_EQ(superscript_citation_error("水²").output, "水2");
  EXPECT_EQ(superscript_citation_error("x$^{12}$").output, "x12");
  EXPECT_EQ(superscript_citation_error("ref<sup>3</sup> and H₂O").output, "ref3 and H2O");
  EXPECT_THROW(superscript_citation_error("So $E=mc^2$ holds."), PreconditionError);
  expect_honest("Prior work$^{4}$ and more²", superscript_citation_error("Prior work$^{4}$ and more²"));
}

TEST(Repetition, RepeatsSpanTenToTwentyTimes) {
  const std::string in = "Start here, then the end of line.";
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    const auto p = text_repetition(in, rng);
    expect_honest(in, p);
    const int k = std::stoi(p.receipt.parameters.at("k"));
    EXPECT_GE(k, 10);
    EXPECT_LE(k, 20);
    const std::string& range = p.receipt.parameters.at("span");
    const std::size_t span = std::stoul(range.substr(range.find(',') + 1)) - std::stoul(range);
    EXPECT_GE(unicode::decode(p.output).size(), unicode::decode(in).size() + 9 * span);
    const std::size_t start = std::stoul(range);
    const auto cps = unicode::decode(in);
    EXPECT_TRUE(start == 0 || unicode::is_punctuation(cps[start - 1]) || unicode::is_whitespace(cps[start - 1]))
        << range;
  }
}

TEST(Redundancy, InsertsDonorFragment) {
  const std::vector<Donor> pool = {{"d1", "Completely different donor sentence."}};
  const std::string in = "Base text of the record.";
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const auto p = text_redundancy(in, pool, rng);
    expect_honest(in, p);
    ASSERT_EQ(p.receipt.edits.size(), 1u);
    const auto& e = p.receipt.edits[0];
    EXPECT_EQ(e.start, e.end);
    EXPECT_LE(e.start, unicode::decode(in).size());
    EXPECT_NE(pool[0].text.find(e.replacement), std::string::npos);
    EXPECT_EQ(unicode::decode(p.output).size(), unicode::decode(in).size() + unicode::decode(e.replacement).size());
    EXPECT_EQ(p.receipt.parameters.at("donor_id"), "d1");
  }
  Rng rng(1);
  EXPECT_THROW(text_redundancy(in, {}, rng), PreconditionError);
  EXPECT_THROW(text_redundancy(in, {{"self", in}}, rng), PreconditionError);
}

TEST(SegmentLost, KeepsDelimiters) {
  const std::string in = "one, two, three.";
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    const auto p = text_segment_lost(in, rng);
    expect_honest(in, p);
    EXPECT_EQ(count_of(p.output, ','), 2u);
    EXPECT_EQ(count_of(p.output, '.'), 1u);
  }
  Rng rng(1);
  EXPECT_THROW(text_segment_lost("no marks here", rng), PreconditionError);
}

TEST(CharactersLost, BoundsPerCategory) {
  const std::string in = "Layout analysis 版面分析 precedes recognition.";
  for (std::uint64_t s = 0; s < 500; ++s) {
    Rng rng(s);
    const auto p = characters_lost(in, rng);
    expect_honest(in, p);
    const auto& cat = p.receipt.parameters.at("category");
    const int k = std::stoi(p.receipt.parameters.at("k"));
    EXPECT_GE(k, 1);
    EXPECT_LE(k, cat == "english_words" ? 3 : 5);
    EXPECT_EQ(static_cast<int>(p.receipt.edits.size()), k);
  }
  Rng rng(1);
  EXPECT_THROW(characters_lost("12 ,.;", rng), PreconditionError);
}

TEST(CharactersLost, NeverEmptiesShortText) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    EXPECT_FALSE(unicode::trim(characters_lost("Parsing Document Image", rng).output).empty());
  }
}

TEST(Punctuation, OneSubRule) {
  const std::string in = "他说：“你好（世界）”, and left.";
  std::set<std::string> rules;
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    const auto p = punctuation_error(in, rng);
    expect_honest(in, p);
    rules.insert(p.receipt.parameters.at("sub_rule"));
  }
  EXPECT_EQ(rules, (std::set<std::string>{"delete_any", "delete_pair", "swap"}));
  Rng rng(1);
  EXPECT_THROW(punctuation_error("no punctuation", rng), PreconditionError);
}

TEST(Spaces, ChangesSpacing) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const std::string in = "The judge checks every element.";
    const auto p = space_error(in, rng);
    expect_honest(in, p);
    EXPECT_NE(count_of(p.output, ' '), count_of(in, ' '));
  }
  Rng rng(1);
  EXPECT_THROW(space_error("", rng), PreconditionError);
}

TEST(InlineFormula, MissedRemovesDelimitedFormula) {
  bool exact = false;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    const auto p = inline_formula_missed("$a+b$ text", rng);
    expect_honest("$a+b$ text", p);
    exact = exact || p.output == " text";
  }
  EXPECT_TRUE(exact);
  Rng rng(1);
  EXPECT_THROW(inline_formula_missed("no formula", rng), PreconditionError);
  EXPECT_THROW(inline_formula_missed("only display $$x+y$$ here", rng), PreconditionError);
}

TEST(InlineFormula, ErrorKeepsDelimiters) {
  const std::string in = "so $\\alpha_{i}+\\beta_{j}=\\gamma$ holds";
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const auto p = inline_formula_error(in, rng);
    expect_honest(in, p);
    const auto regions = find_formula_regions(unicode::decode(p.output));
    ASSERT_EQ(regions.size(), 1u) << p.output;
    if (p.receipt.parameters.at("rule") != "syntax") {
      const auto inner = unicode::decode(p.output).substr(regions[0].inner_start,
                                                          regions[0].inner_end - regions[0].inner_start);
      EXPECT_TRUE(latex::validate_balanced(unicode::encode(inner)));
    }
  }
  Rng rng(1);
  EXPECT_THROW(inline_formula_error("tiny $x$ formula", rng), PreconditionError);
}

TEST(Determinism, SameSeedSameReceipt) {
  Rng gen(3);
  TextContext ctx;
  ctx.donor_pool = {{"d", "A donor paragraph with words."}};
  for (const auto& type : rule_based_types()) {
    for (std::size_t v = 0; v < 8; ++v) {
      const std::string in = fixtures::synthetic_text(v, gen);
      for (std::uint64_t s = 0; s < 5; ++s) {
        Rng a(s), b(s);
        try {
          const auto p = apply_rule(type, in, a, ctx);
          const auto q = apply_rule(type, in, b, ctx);
          EXPECT_EQ(p.output, q.output);
          EXPECT_EQ(p.receipt, q.receipt);
          expect_honest(in, p);
        } catch (const PreconditionError&) {
        }
      }
    }
  }
}

// Offsets never land inside a grapheme cluster.
TEST(Graphemes, NoClusterIsSplit) {
  const std::vector<std::string> corpus = {
      "Family 👨‍👩‍👧 trip, then café visit.", "Accents: été, naı̈ve; done.",
      "Flags 🇫🇷🇩🇪 and text, more text.", "Hangul 한국어 문장, 그리고.", "Thumbs 👍🏽 up, ok."};
  TextContext ctx;
  ctx.donor_pool = {{"d", "Emoji donor 🙂 with é accents."}};
  for (const auto& in : corpus) {
    const auto cps = unicode::decode(in);
    std::set<std::size_t> bounds;
    for (const auto& g : unicode::grapheme_boundaries(cps)) bounds.insert(g);
    for (const auto& type : rule_based_types()) {
      for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(s);
        try {
          const auto p = apply_rule(type, in, rng, ctx);
          for (const auto& e : p.receipt.edits) {
            EXPECT_TRUE(bounds.count(e.start) && bounds.count(e.end)) << type << " on " << in;
          }
        } catch (const PreconditionError&) {
        }
      }
    }
  }
}

TEST(Dispatch, UnknownTypeIsValidationError) {
  Rng rng(1);
  EXPECT_THROW(apply_rule("table_cell_lost", "x", rng), ValidationError);
  EXPECT_TRUE(is_rule_based("text_repetition"));
  EXPECT_FALSE(is_rule_based("text_character_recognition_error"));
  EXPECT_EQ(rule_based_types().size(), 13u);
}

}  // namespace
}  // namespace docinspect::text
