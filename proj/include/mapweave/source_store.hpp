#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapweave/table.hpp"

namespace mapweave {

/// Loads and caches source tables by signature id. Generated intermediate
/// tables are registered in memory and can be persisted as CSV files.
/// Tables are immutable once stored; lookups are thread-safe.
class SourceStore {
 public:
  explicit SourceStore(std::filesystem::path base_dir = ".");

  /// Returns the table for a signature, loading base_dir/location on first
  /// use. Generated tables must have been put() first.
  std::shared_ptr<const SourceTable> table(const SourceSignature& sig) const;

  /// Registers a generated table under its signature id.
  void put(SourceTable table);

  bool contains(const std::string& id) const;
  std::vector<std::string> generated_ids() const;  // registration order

  /// Writes every generated table to dir as <id>.csv.
  void persist_generated(const std::filesystem::path& dir) const;

  const std::filesystem::path& base_dir() const { return base_; }

 private:
  std::filesystem::path base_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, std::shared_ptr<const SourceTable>> cache_;
  std::vector<std::string> generated_order_;
};

/// Loads every source of the DIS through the store, fills signature
/// attribute lists, and runs attribute-level validation.
void bind_sources(DataIntegrationSystem& dis, const SourceStore& store);

}  // namespace mapweave
