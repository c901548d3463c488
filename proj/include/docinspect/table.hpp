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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "docinspect/rng.hpp"

namespace docinspect::table {

struct Cell {
  std::string text;
  int colspan = 1;
  int rowspan = 1;
  bool header = false;

  bool operator==(const Cell&) const = default;
};

struct TableGrid {
  std::vector<std::vector<Cell>> rows;

  bool operator==(const TableGrid&) const = default;
  std::size_t cell_count() const;
};

// Where a cell lands in the logical grid. Cells are indexed row-major in the
// order they appear in `rows`.
struct Placement {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t rowspan = 1;
  std::size_t colspan = 1;
};

struct Occupancy {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<Placement> placements;       // one per cell
  std::vector<std::vector<long>> owner;    // [row][col] -> cell index or -1
};

// Places cells with the usual HTML cursor rule. Throws ValidationError when
// two cells claim one slot or a rowspan runs past the last row.
Occupancy occupancy(const TableGrid& grid);
bool well_formed(const TableGrid& grid);

// Tolerant parse of the first <table> in `html`.
TableGrid parse_table(std::string_view html);
std::string serialize_table(const TableGrid& grid);

// Result of a structural edit. cell_map sends each input cell index to its
// output index, or -1 when the cell disappeared.
struct TableEdit {
  TableGrid grid;
  std::vector<long> cell_map;
  std::vector<std::size_t> touched_input;
  std::vector<std::size_t> touched_output;
  std::map<std::string, std::string> parameters;
};

TableEdit delete_rows_columns(const TableGrid& grid, Rng& rng);
TableEdit delete_cells(const TableGrid& grid, Rng& rng);

}  // namespace docinspect::table
