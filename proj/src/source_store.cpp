#include "mapweave/source_store.hpp"

#include "mapweave/error.hpp"

namespace mapweave {

SourceStore::SourceStore(std::filesystem::path base_dir) : base_(std::move(base_dir)) {}

std::shared_ptr<const SourceTable> SourceStore::table(const SourceSignature& sig) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(sig.id);
    if (it != cache_.end()) return it->second;
  }
  if (sig.generated)
    throw Error("generated source '" + sig.id + "' is not registered in the store");
  auto loaded = std::make_shared<SourceTable>(load_csv(base_ / sig.location));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = cache_.emplace(sig.id, std::move(loaded));
  return it->second;
}

void SourceStore::put(SourceTable table) {
  table.signature.generated = true;
  if (table.signature.location.empty())
    table.signature.location = table.signature.id + ".csv";
  const std::string id = table.signature.id;
  auto ptr = std::make_shared<const SourceTable>(std::move(table));
  std::lock_guard<std::mutex> lock(mu_);
  if (!cache_.emplace(id, std::move(ptr)).second)
    throw Error("source '" + id + "' already present in the store");
  generated_order_.push_back(id);
}

bool SourceStore::contains(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.count(id) > 0;
}

std::vector<std::string> SourceStore::generated_ids() const {
  std::lock_guard<std::mutex> lock(mu_);
  return generated_order_;
}

void SourceStore::persist_generated(const std::filesystem::path& dir) const {
  std::vector<std::shared_ptr<const SourceTable>> tables;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& id : generated_order_) tables.push_back(cache_.at(id));
  }
  std::filesystem::create_directories(dir);
  for (const auto& t : tables) write_csv(*t, dir / t->signature.location);
}

void bind_sources(DataIntegrationSystem& dis, const SourceStore& store) {
  for (SourceSignature& sig : dis.sources()) {
    auto t = store.table(sig);
    sig.attributes = t->columns;
  }
  validate_bound(dis);
}

}  // namespace mapweave
