#include "mapweave/table.hpp"

#include <fstream>
#include <unordered_set>

#include "mapweave/error.hpp"

namespace mapweave {

void SourceTable::finalize() {
  index_.clear();
  index_.reserve(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!index_.emplace(columns[i], static_cast<int>(i)).second)
      throw Error("duplicate column '" + columns[i] + "' in source '" +
                  signature.id + "'");
  }
}

int SourceTable::column_of(const std::string& name) const {
  int col = try_column_of(name);
  if (col < 0)
    throw Error("unknown attribute '" + name + "' in source '" + signature.id + "'");
  return col;
}

int SourceTable::try_column_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

namespace {

// One CSV record; understands quoted fields and CRLF. Returns false at EOF
// with no data consumed.
bool read_record(std::istream& in, std::vector<std::string>& fields,
                 std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool quoted = false, field_started_quoted = false, any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += static_cast<char>(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
      continue;
    }
    if (c == '\r') continue;
    if (c == '\n') {
      ++line_no;
      fields.push_back(std::move(field));
      return true;
    }
    field += static_cast<char>(c);
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  ++line_no;
  return true;
}

}  // namespace

SourceTable load_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& expected_attributes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open source file '" + path.string() + "'");

  SourceTable table;
  table.signature.id = path.stem().string();
  table.signature.location = path.filename().string();

  std::vector<std::string> fields;
  std::size_t line_no = 0;
  if (!read_record(in, fields, line_no))
    throw Error("source file '" + path.string() + "' is empty (header required)");
  table.columns = fields;
  table.finalize();
  table.signature.attributes = table.columns;

  for (const auto& attr : expected_attributes)
    if (table.try_column_of(attr) < 0)
      throw Error("source file '" + path.string() + "' lacks required attribute '" +
                  attr + "'");

  const std::size_t arity = table.columns.size();
  while (read_record(in, fields, line_no)) {
    if (fields.size() != arity)
      throw Error("ragged row " + std::to_string(line_no) + " in '" + path.string() +
                  "': expected " + std::to_string(arity) + " fields, got " +
                  std::to_string(fields.size()));
    Row row;
    row.reserve(arity);
    for (std::size_t i = 0; i < arity; ++i) {
      if (fields[i].empty())
        row.emplace_back(std::nullopt);  // empty loads as missing
      else
        row.emplace_back(std::move(fields[i]));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(const SourceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  std::string buffer;
  buffer.reserve(1 << 16);

  auto emit_field = [&buffer](const std::string& value) {
    bool needs_quotes = value.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) {
      buffer += value;
      return;
    }
    buffer += '"';
    for (char c : value) {
      if (c == '"') buffer += '"';
      buffer += c;
    }
    buffer += '"';
  };

  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) buffer += ',';
    emit_field(table.columns[i]);
  }
  buffer += '\n';
  for (const Row& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) buffer += ',';
      if (row[i]) emit_field(*row[i]);
    }
    buffer += '\n';
    if (buffer.size() > (1 << 16)) {
      out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string encode_cells(const Row& row, const std::vector<int>& cols) {
  std::string key;
  for (int c : cols) {
    const Cell& cell = row[c];
    if (!cell) {
      key += '\x01';
    } else {
      key += '\x02';
      key += std::to_string(cell->size());
      key += ':';
      key += *cell;
    }
  }
  return key;
}

SourceTable project_distinct(const SourceTable& table,
                             const std::vector<std::string>& attrs) {
  std::vector<int> cols;
  cols.reserve(attrs.size());
  for (const auto& a : attrs) cols.push_back(table.column_of(a));

  SourceTable out;
  out.signature = table.signature;
  out.columns = attrs;
  out.finalize();
  out.signature.attributes = attrs;

  std::unordered_set<std::string> seen;
  seen.reserve(table.rows.size());
  for (const Row& row : table.rows) {
    bool all_missing = true;
    for (int c : cols) all_missing &= !row[c].has_value();
    if (all_missing && !cols.empty()) continue;
    std::string key = encode_cells(row, cols);
    if (!seen.insert(std::move(key)).second) continue;
    Row projected;
    projected.reserve(cols.size());
    for (int c : cols) projected.push_back(row[c]);
    out.rows.push_back(std::move(projected));
  }
  return out;
}

SourceTable inner_join(const SourceTable& left, const SourceTable& right,
                       const std::vector<std::pair<std::string, std::string>>& conditions,
                       const std::vector<JoinOutputColumn>& output) {
  if (conditions.empty() && left.signature.id != right.signature.id)
    throw Error("join between '" + left.signature.id + "' and '" +
                right.signature.id + "' has no conditions");

  std::vector<int> lcols, rcols;
  for (const auto& [l, r] : conditions) {
    lcols.push_back(left.column_of(l));
    rcols.push_back(right.column_of(r));
  }

  SourceTable out;
  out.signature.id = left.signature.id + "_x_" + right.signature.id;
  out.signature.generated = true;
  std::vector<std::pair<JoinSide, int>> out_cols;
  std::unordered_set<std::string> used_names;
  for (const auto& spec : output) {
    const SourceTable& side = spec.side == JoinSide::Left ? left : right;
    std::string name = spec.attribute;
    if (!used_names.insert(name).second) {
      name += "_r";
      while (!used_names.insert(name).second) name += "_r";
    }
    out.columns.push_back(name);
    out_cols.emplace_back(spec.side, side.column_of(spec.attribute));
  }
  out.finalize();
  out.signature.attributes = out.columns;

  // Build on the right, probe with the left.
  std::unordered_map<std::string, std::vector<std::size_t>> hash;
  hash.reserve(right.rows.size());
  for (std::size_t i = 0; i < right.rows.size(); ++i) {
    bool usable = true;
    for (int c : rcols) usable &= right.rows[i][c].has_value();
    if (!usable) continue;
    hash[encode_cells(right.rows[i], rcols)].push_back(i);
  }

  std::unordered_set<std::string> seen;
  std::vector<int> all_out(out.columns.size());
  for (std::size_t i = 0; i < all_out.size(); ++i) all_out[i] = static_cast<int>(i);

  for (const Row& lrow : left.rows) {
    bool usable = true;
    for (int c : lcols) usable &= lrow[c].has_value();
    if (!usable) continue;
    auto it = hash.find(encode_cells(lrow, lcols));
    if (it == hash.end()) continue;
    for (std::size_t ri : it->second) {
      Row joined;
      joined.reserve(out_cols.size());
      for (const auto& [side, col] : out_cols)
        joined.push_back(side == JoinSide::Left ? lrow[col] : right.rows[ri][col]);
      std::string key = encode_cells(joined, all_out);
      if (!seen.insert(std::move(key)).second) continue;
      out.rows.push_back(std::move(joined));
    }
  }
  return out;
}

}  // namespace mapweave
