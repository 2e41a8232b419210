#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapweave/dis.hpp"

namespace mapweave {

using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

/// Row-oriented table with optional (missing) cells. Immutable once built;
/// the ops below return fresh tables.
struct SourceTable {
  SourceSignature signature;
  std::vector<std::string> columns;
  std::vector<Row> rows;

  void finalize();  // builds the column index; call after filling columns
  int column_of(const std::string& name) const;       // throws on unknown
  int try_column_of(const std::string& name) const;   // -1 on unknown

  const Cell& at(std::size_t row, int col) const { return rows[row][col]; }

 private:
  std::unordered_map<std::string, int> index_;
};

/// Loads a CSV file (RFC 4180 quoting, mandatory header). Empty cells load
/// as missing. When expected_attributes is non-empty, every one of them must
/// appear in the header.
SourceTable load_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& expected_attributes = {});

/// Writes header + rows, quoting as needed; missing cells become empty
/// fields; LF line endings.
void write_csv(const SourceTable& table, const std::filesystem::path& path);

/// Projection onto `attrs` with duplicate removal, first-occurrence order.
/// Rows whose projected cells are all missing are dropped.
SourceTable project_distinct(const SourceTable& table,
                             const std::vector<std::string>& attrs);

enum class JoinSide { Left, Right };

struct JoinOutputColumn {
  JoinSide side;
  std::string attribute;
};

/// Hash equi-join under the conjunction of all conditions. Rows with a
/// missing value in any join attribute never match. Output columns are
/// caller-specified; right-side name collisions get an "_r" suffix. The
/// result is deduplicated.
SourceTable inner_join(const SourceTable& left, const SourceTable& right,
                       const std::vector<std::pair<std::string, std::string>>& conditions,
                       const std::vector<JoinOutputColumn>& output);

/// Injective key over selected cells; missing is its own token.
std::string encode_cells(const Row& row, const std::vector<int>& cols);

}  // namespace mapweave
