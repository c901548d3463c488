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

#include "docinspect/table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "docinspect/error.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::table {

namespace {

constexpr int kMaxSpan = 1000;

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t x : v) {
    if (!out.empty()) out += ",";
    out += std::to_string(x);
  }
  return out;
}

}  // namespace

std::size_t TableGrid::cell_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

Occupancy occupancy(const TableGrid& grid) {
  Occupancy occ;
  occ.n_rows = grid.rows.size();
  occ.owner.assign(occ.n_rows, {});
  auto claim = [&](std::size_t r, std::size_t c, long who) {
    auto& row = occ.owner[r];
    if (row.size() <= c) row.resize(c + 1, -1);
    if (row[c] != -1) throw ValidationError("overlapping table cells");
    row[c] = who;
  };
  long index = 0;
  for (std::size_t r = 0; r < grid.rows.size(); ++r) {
    std::size_t cursor = 0;
    for (const auto& cell : grid.rows[r]) {
      if (cell.colspan < 1 || cell.rowspan < 1) throw ValidationError("invalid span");
      while (cursor < occ.owner[r].size() && occ.owner[r][cursor] != -1) ++cursor;
      const auto rs = static_cast<std::size_t>(cell.rowspan);
      const auto cs = static_cast<std::size_t>(cell.colspan);
      if (r + rs > occ.n_rows) throw ValidationError("rowspan runs past the last row");
      for (std::size_t dr = 0; dr < rs; ++dr) {
        for (std::size_t dc = 0; dc < cs; ++dc) claim(r + dr, cursor + dc, index);
      }
      occ.placements.push_back({r, cursor, rs, cs});
      cursor += cs;
      ++index;
    }
  }
  for (const auto& row : occ.owner) occ.n_cols = std::max(occ.n_cols, row.size());
  for (auto& row : occ.owner) row.resize(occ.n_cols, -1);
  return occ;
}

bool well_formed(const TableGrid& grid) {
  try {
    occupancy(grid);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

namespace {

std::string decode_entities(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i++];
      continue;
    }
    std::string_view name = s.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (name == "amp") cp = U'&';
    else if (name == "lt") cp = U'<';
    else if (name == "gt") cp = U'>';
    else if (name == "quot") cp = U'"';
    else if (name == "apos") cp = U'\'';
    else if (name == "nbsp") cp = U' ';
    else if (name.size() > 1 && name[0] == '#') {
      const bool hex = name[1] == 'x' || name[1] == 'X';
      std::string_view digits = name.substr(hex ? 2 : 1);
      unsigned long v = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, hex ? 16 : 10);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty() && v > 0 && v <= 0x10FFFF) {
        cp = static_cast<char32_t>(v);
      }
    }
    if (!cp) {
      out += s[i++];
      continue;
    }
    out += unicode::encode(*cp);
    i = semi + 1;
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::u32string in = unicode::decode(s);
  std::u32string out;
  bool pending = false;
  for (char32_t c : in) {
    if (unicode::is_whitespace(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += U' ';
    pending = false;
    out += c;
  }
  return unicode::encode(out);
}

struct Tag {
  std::string name;
  bool closing = false;
  std::map<std::string, std::string> attrs;
};

Tag parse_tag(std::string_view body) {
  Tag tag;
  std::size_t i = 0;
  if (i < body.size() && body[i] == '/') {
    tag.closing = true;
    ++i;
  }
  std::size_t start = i;
  while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i])) && body[i] != '/' && body[i] != '>') ++i;
  tag.name = unicode::ascii_lower(body.substr(start, i - start));
  while (i < body.size()) {
    while (i < body.size() && (std::isspace(static_cast<unsigned char>(body[i])) || body[i] == '/')) ++i;
    std::size_t ns = i;
    while (i < body.size() && body[i] != '=' && !std::isspace(static_cast<unsigned char>(body[i])) && body[i] != '/') ++i;
    std::string name = unicode::ascii_lower(body.substr(ns, i - ns));
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    std::string value;
    if (i < body.size() && body[i] == '=') {
      ++i;
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
        char q = body[i++];
        std::size_t vs = i;
        while (i < body.size() && body[i] != q) ++i;
        value = std::string(body.substr(vs, i - vs));
        if (i < body.size()) ++i;
      } else {
        std::size_t vs = i;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        value = std::string(body.substr(vs, i - vs));
      }
    }
    if (!name.empty()) tag.attrs.emplace(name, decode_entities(value));
  }
  return tag;
}

int parse_span(const std::map<std::string, std::string>& attrs, const char* key) {
  auto it = attrs.find(key);
  if (it == attrs.end()) return 1;
  std::string v = unicode::trim(it->second);
  if (v.empty() || v.size() > 9 || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ValidationError("invalid span");
  }
  int n = std::stoi(v);
  if (n <= 0) throw ValidationError("invalid span");
  return std::min(n, kMaxSpan);
}

// Clamp spans so that the cursor placement never overlaps and never runs
// past the last row.
void normalize_spans(TableGrid& grid) {
  const std::size_t n_rows = grid.rows.size();
  std::vector<std::vector<bool>> used(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::size_t cursor = 0;
    for (auto& cell : grid.rows[r]) {
      auto taken = [&](std::size_t rr, std::size_t c) { return c < used[rr].size() && used[rr][c]; };
      while (taken(r, cursor)) ++cursor;
      std::size_t cs = 1;
      while (cs < static_cast<std::size_t>(cell.colspan) && !taken(r, cursor + cs)) ++cs;
      cell.colspan = static_cast<int>(cs);
      cell.rowspan = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cell.rowspan), n_rows - r));
      for (std::size_t dr = 0; dr < static_cast<std::size_t>(cell.rowspan); ++dr) {
        auto& row = used[r + dr];
        if (row.size() < cursor + cs) row.resize(cursor + cs, false);
        for (std::size_t dc = 0; dc < cs; ++dc) row[cursor + dc] = true;
      }
      cursor += cs;
    }
  }
}

}  // namespace

TableGrid parse_table(std::string_view html) {
  TableGrid grid;
  bool in_table = false;
  bool done = false;
  bool row_open = false;
  std::optional<Cell> cell;
  std::string cell_raw;

  auto close_cell = [&] {
    if (!cell) return;
    cell->text = collapse_whitespace(decode_entities(cell_raw));
    grid.rows.back().push_back(std::move(*cell));
    cell.reset();
    cell_raw.clear();
  };
  auto close_row = [&] {
    close_cell();
    row_open = false;
  };
  auto open_row = [&] {
    close_row();
    grid.rows.emplace_back();
    row_open = true;
  };

  std::size_t i = 0;
  while (i < html.size() && !done) {
    if (html[i] != '<') {
      std::size_t next = html.find('<', i);
      if (next == std::string_view::npos) next = html.size();
      if (cell) cell_raw.append(html.substr(i, next - i));
      i = next;
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    std::size_t end = html.find('>', i);
    if (end == std::string_view::npos) {
      if (cell) cell_raw.append(html.substr(i));
      break;
    }
    Tag tag = parse_tag(html.substr(i + 1, end - i - 1));
    i = end + 1;
    if (tag.name == "table") {
      if (tag.closing) {
        if (in_table) {
          close_row();
          done = true;
        }
      } else if (in_table) {
        throw ValidationError("nested table unsupported");
      } else {
        in_table = true;
      }
      continue;
    }
    if (!in_table) continue;
    if (tag.name == "tr") {
      if (tag.closing) close_row();
      else open_row();
    } else if (tag.name == "td" || tag.name == "th") {
      close_cell();
      if (tag.closing) continue;
      if (!row_open) open_row();
      Cell c;
      c.header = tag.name == "th";
      c.colspan = parse_span(tag.attrs, "colspan");
      c.rowspan = parse_span(tag.attrs, "rowspan");
      cell = std::move(c);
    } else if (tag.name == "br") {
      if (cell) cell_raw += ' ';
    } else if (tag.name == "thead" || tag.name == "tbody" || tag.name == "tfoot") {
      close_row();
    } else if (cell && (tag.name == "p" || tag.name == "div" || tag.name == "li")) {
      cell_raw += ' ';
    }
  }
  if (!in_table) throw ValidationError("not a table");
  close_row();
  normalize_spans(grid);
  return grid;
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string serialize_table(const TableGrid& grid) {
  std::string out = "<table>";
  for (const auto& row : grid.rows) {
    out += "<tr>";
    for (const auto& cell : row) {
      const char* tag = cell.header ? "th" : "td";
      out += "<";
      out += tag;
      if (cell.colspan > 1) out += " colspan=\"" + std::to_string(cell.colspan) + "\"";
      if (cell.rowspan > 1) out += " rowspan=\"" + std::to_string(cell.rowspan) + "\"";
      out += ">" + escape(cell.text) + "</" + tag + ">";
    }
    out += "</tr>";
  }
  out += "</table>";
  return out;
}

TableEdit delete_rows_columns(const TableGrid& grid, Rng& rng) {
  const Occupancy occ = occupancy(grid);
  const std::size_t R = occ.n_rows;
  const std::size_t C = occ.n_cols;
  std::vector<std::string> modes;
  if (R >= 2) modes.push_back("rows");
  if (C >= 2) modes.push_back("columns");
  if (R >= 2 && C >= 2) modes.push_back("both");
  if (modes.empty()) throw PreconditionError("too small");
  const std::string mode = modes[rng.below(modes.size())];

  std::vector<std::size_t> del_rows, del_cols;
  if (mode != "columns") del_rows = rng.sample_indices(R, static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(R) - 1)));
  if (mode != "rows") del_cols = rng.sample_indices(C, static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(C) - 1)));

  // new_index[i] = position among survivors, or npos if deleted.
  auto survivors = [](std::size_t n, const std::vector<std::size_t>& deleted) {
    std::vector<std::size_t> map(n, std::string::npos);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::binary_search(deleted.begin(), deleted.end(), i)) map[i] = next++;
    }
    return map;
  };
  const auto row_map = survivors(R, del_rows);
  const auto col_map = survivors(C, del_cols);

  struct Moved {
    std::size_t src;
    std::size_t row, col;
    Cell cell;
  };
  std::vector<Moved> moved;
  TableEdit edit;
  edit.cell_map.assign(occ.placements.size(), -1);
  std::vector<const Cell*> flat;
  for (const auto& row : grid.rows) {
    for (const auto& c : row) flat.push_back(&c);
  }
  std::vector<bool> changed(flat.size(), false);
  for (std::size_t k = 0; k < occ.placements.size(); ++k) {
    const Placement& p = occ.placements[k];
    std::optional<std::size_t> first_row, first_col;
    std::size_t rs = 0, cs = 0;
    for (std::size_t r = p.row; r < p.row + p.rowspan; ++r) {
      if (row_map[r] == std::string::npos) continue;
      if (!first_row) first_row = row_map[r];
      ++rs;
    }
    for (std::size_t c = p.col; c < p.col + p.colspan; ++c) {
      if (col_map[c] == std::string::npos) continue;
      if (!first_col) first_col = col_map[c];
      ++cs;
    }
    if (rs == 0 || cs == 0) {
      edit.touched_input.push_back(k);
      continue;
    }
    Cell c = *flat[k];
    c.rowspan = static_cast<int>(rs);
    c.colspan = static_cast<int>(cs);
    if (rs != p.rowspan || cs != p.colspan) {
      edit.touched_input.push_back(k);
      changed[k] = true;
    }
    moved.push_back({k, *first_row, *first_col, std::move(c)});
  }
  std::stable_sort(moved.begin(), moved.end(), [](const Moved& a, const Moved& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  edit.grid.rows.assign(R - del_rows.size(), {});
  std::size_t out_index = 0;
  for (auto& m : moved) {
    edit.cell_map[m.src] = static_cast<long>(out_index);
    if (changed[m.src]) edit.touched_output.push_back(out_index);
    edit.grid.rows[m.row].push_back(std::move(m.cell));
    ++out_index;
  }
  std::sort(edit.touched_input.begin(), edit.touched_input.end());
  edit.parameters["mode"] = mode;
  edit.parameters["deleted_rows"] = join(del_rows);
  edit.parameters["deleted_columns"] = join(del_cols);
  return edit;
}

TableEdit delete_cells(const TableGrid& grid, Rng& rng) {
  std::vector<std::size_t> non_empty;
  std::size_t index = 0;
  for (const auto& row : grid.rows) {
    for (const auto& c : row) {
      if (!c.text.empty()) non_empty.push_back(index);
      ++index;
    }
  }
  if (non_empty.empty()) throw PreconditionError("all cells empty");
  const std::size_t total = index;
  const auto upper = std::max<std::size_t>(1, total / 5);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(upper))),
                                       non_empty.size());
  auto picks = rng.sample_indices(non_empty.size(), k);
  TableEdit edit;
  edit.grid = grid;
  edit.cell_map.resize(total);
  for (std::size_t i = 0; i < total; ++i) edit.cell_map[i] = static_cast<long>(i);
  std::vector<std::size_t> chosen;
  for (std::size_t p : picks) chosen.push_back(non_empty[p]);
  index = 0;
  for (auto& row : edit.grid.rows) {
    for (auto& c : row) {
      if (std::binary_search(chosen.begin(), chosen.end(), index)) c.text.clear();
      ++index;
    }
  }
  edit.touched_input = chosen;
  edit.touched_output = chosen;
  edit.parameters["k"] = std::to_string(k);
  edit.parameters["cells"] = join(chosen);
  return edit;
}

}  // namespace docinspect::table
