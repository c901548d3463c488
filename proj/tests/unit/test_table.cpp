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

#include "corpus_gen.hpp"
#include "docinspect/error.hpp"
#include "docinspect/table.hpp"

namespace docinspect::table {
namespace {

TableGrid square(std::size_t n) {
  TableGrid g;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<Cell> row;
    for (std::size_t c = 0; c < n; ++c) row.push_back({std::to_string(r) + std::to_string(c)});
    g.rows.push_back(row);
  }
  return g;
}

std::vector<Cell> flat(const TableGrid& g) {
  std::vector<Cell> out;
  for (const auto& row : g.rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::size_t count(const std::string& s, char sep) {
  if (s.empty()) return 0;
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), sep)) + 1;
}

TEST(Parse, SingleCell) {
  const auto g = parse_table("<table><tr><td>a</td></tr></table>");
  ASSERT_EQ(g.rows.size(), 1u);
  ASSERT_EQ(g.rows[0].size(), 1u);
  EXPECT_EQ(g.rows[0][0].text, "a");
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_table("<div>x</div>"), ValidationError);
  EXPECT_THROW(parse_table("<table><tr><td><table><tr><td>x</td></tr></table></td></tr></table>"), ValidationError);
  EXPECT_THROW(parse_table("<table><tr><td colspan=\"0\">x</td></tr></table>"), ValidationError);
}

TEST(Parse, Tolerance) {
  const auto g = parse_table(
      "<p>before</p><TABLE border=1><thead><tr><th style='x'>H<td>v</tbody><tr><td rowspan=2>a<td>b<tr><td>c</table>");
  ASSERT_EQ(g.rows.size(), 3u);
  EXPECT_TRUE(g.rows[0][0].header);
  EXPECT_EQ(g.rows[0][0].text, "H");
  EXPECT_FALSE(g.rows[0][1].header);
  EXPECT_EQ(g.rows[1][0].rowspan, 2);
  EXPECT_EQ(serialize_table(g),
            "<table><tr><th>H</th><td>v</td></tr><tr><td rowspan=\"2\">a</td><td>b</td></tr><tr><td>c</td></tr></table>");
}

TEST(Occupancy, ColspanClaimsTwoColumns) {
  const auto g = parse_table("<table><tr><td colspan=\"2\">a</td><td>b</td></tr><tr><td>c</td><td>d</td><td>e</td></tr></table>");
  const auto occ = occupancy(g);
  EXPECT_EQ(occ.n_rows, 2u);
  EXPECT_EQ(occ.n_cols, 3u);
  EXPECT_EQ(occ.owner[0][0], 0);
  EXPECT_EQ(occ.owner[0][1], 0);
  EXPECT_EQ(occ.owner[0][2], 1);
  EXPECT_EQ(occ.owner[1][2], 4);
  EXPECT_EQ(occ.placements[1].col, 2u);
}

TEST(Occupancy, RowspanShiftsCursor) {
  const auto g = parse_table("<table><tr><td rowspan=\"2\">a</td><td>b</td></tr><tr><td>c</td></tr></table>");
  const auto occ = occupancy(g);
  EXPECT_EQ(occ.placements[2].row, 1u);
  EXPECT_EQ(occ.placements[2].col, 1u);
  EXPECT_EQ(occ.owner[1][0], 0);
}

TEST(Occupancy, RowspanPastLastRowIsInvalid) {
  TableGrid g;
  g.rows.push_back({{"a", 1, 3}});
  g.rows.push_back({});
  EXPECT_FALSE(well_formed(g));
}

TEST(Serialize, Canonical) {
  TableGrid one;
  one.rows.push_back({Cell{}});
  EXPECT_EQ(serialize_table(one), "<table><tr><td></td></tr></table>");
  TableGrid h;
  h.rows.push_back({Cell{"x", 1, 1, true}});
  EXPECT_EQ(serialize_table(h), "<table><tr><th>x</th></tr></table>");
  TableGrid esc;
  esc.rows.push_back({Cell{"a<b & c"}});
  EXPECT_EQ(parse_table(serialize_table(esc)), esc);
}

TEST(Serialize, RoundTripOnGeneratedTables) {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto g = fixtures::synthetic_table(rng);
    ASSERT_TRUE(well_formed(g));
    EXPECT_EQ(parse_table(serialize_table(g)), g);
  }
}

TEST(DeleteRowsColumns, ShrinksAndStaysWellFormed) {
  Rng gen(22);
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto g = fixtures::synthetic_table(gen);
    const auto before = occupancy(g);
    Rng rng(s);
    const auto e = delete_rows_columns(g, rng);
    ASSERT_TRUE(well_formed(e.grid));
    const auto after = occupancy(e.grid);
    const std::size_t dr = count(e.parameters.at("deleted_rows"), ',');
    const std::size_t dc = count(e.parameters.at("deleted_columns"), ',');
    EXPECT_TRUE(dr > 0 || dc > 0);
    EXPECT_EQ(after.n_rows, before.n_rows - dr);
    EXPECT_EQ(after.n_cols, before.n_cols - dc) << serialize_table(g) << " -> " << serialize_table(e.grid);
    EXPECT_GE(after.n_rows, 1u);
    EXPECT_GE(after.n_cols, 1u);
    ASSERT_EQ(e.cell_map.size(), g.cell_count());
    const auto in_cells = flat(g), out_cells = flat(e.grid);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < e.cell_map.size(); ++i) {
      if (e.cell_map[i] < 0) continue;
      ++kept;
      EXPECT_EQ(out_cells.at(static_cast<std::size_t>(e.cell_map[i])).text, in_cells[i].text);
    }
    EXPECT_EQ(kept, e.grid.cell_count());
  }
}

TEST(DeleteRowsColumns, ThreeByThreeRow) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng(s);
    const auto e = delete_rows_columns(square(3), rng);
    if (e.parameters.at("mode") == "rows" && e.parameters.at("deleted_rows") == "1") {
      EXPECT_EQ(e.grid.rows.size(), 2u);
      EXPECT_EQ(e.grid.rows[0].size(), 3u);
      EXPECT_EQ(e.grid.rows[1][0].text, "20");
      return;
    }
  }
  FAIL() << "no seed deleted exactly row 1";
}

TEST(DeleteRowsColumns, RowspanShrinksAcrossDeletedRow) {
  TableGrid g;
  g.rows.push_back({{"a", 1, 2}, {"b"}});
  g.rows.push_back({{"c"}});
  g.rows.push_back({{"d"}, {"e"}});
  for (std::uint64_t s = 0; s < 500; ++s) {
    Rng rng(s);
    const auto e = delete_rows_columns(g, rng);
    if (e.parameters.at("mode") == "rows" && e.parameters.at("deleted_rows") == "1") {
      EXPECT_EQ(e.grid.rows[0][0].rowspan, 1);
      EXPECT_TRUE(well_formed(e.grid));
      return;
    }
  }
  FAIL() << "no seed deleted exactly row 1";
}

TEST(DeleteRowsColumns, TooSmall) {
  Rng rng(1);
  EXPECT_THROW(delete_rows_columns(square(1), rng), PreconditionError);
}

TEST(DeleteCells, EmptiesBoundedNumberOfCells) {
  Rng gen(23);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto g = s % 2 ? square(2) : fixtures::synthetic_table(gen);
    Rng rng(s);
    const auto e = delete_cells(g, rng);
    std::size_t emptied = 0;
    ASSERT_EQ(e.grid.rows.size(), g.rows.size());
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      ASSERT_EQ(e.grid.rows[r].size(), g.rows[r].size());
      for (std::size_t c = 0; c < g.rows[r].size(); ++c) {
        const auto &a = g.rows[r][c], &b = e.grid.rows[r][c];
        EXPECT_EQ(a.colspan, b.colspan);
        EXPECT_EQ(a.rowspan, b.rowspan);
        EXPECT_EQ(a.header, b.header);
        if (a.text != b.text) {
          EXPECT_TRUE(b.text.empty());
          ++emptied;
        }
      }
    }
    const std::size_t bound = std::max<std::size_t>(1, g.cell_count() / 5);
    EXPECT_GE(emptied, 1u);
    EXPECT_LE(emptied, bound);
    if (s % 2) EXPECT_EQ(emptied, 1u);
  }
}

TEST(DeleteCells, AllEmpty) {
  TableGrid g;
  g.rows.push_back({Cell{}, Cell{}});
  Rng rng(1);
  EXPECT_THROW(delete_cells(g, rng), PreconditionError);
}

}  // namespace
}  // namespace docinspect::table
