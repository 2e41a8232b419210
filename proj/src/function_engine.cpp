#include "mapweave/function_engine.hpp"

#include <algorithm>
#include <unordered_set>

#include "mapweave/error.hpp"

namespace mapweave {

const char* function_kind_name(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Bijective: return "bijective";
    case FunctionKind::NonInjectiveSurjective: return "non-injective-surjective";
    case FunctionKind::Unclassified: return "unclassified";
  }
  return "?";
}

void FunctionRegistry::register_function(FunctionDef def) {
  if (!def.body) throw Error("function <" + def.iri + "> has no body");
  if (defs_.count(def.iri)) throw Error("function <" + def.iri + "> already registered");
  counters_[def.iri].store(0);
  defs_.emplace(def.iri, std::move(def));
}

const FunctionDef* FunctionRegistry::find(const std::string& iri) const {
  auto it = defs_.find(iri);
  return it == defs_.end() ? nullptr : &it->second;
}

const FunctionDef& FunctionRegistry::require(const std::string& iri) const {
  const FunctionDef* def = find(iri);
  if (!def) throw Error("unregistered function <" + iri + ">");
  return *def;
}

std::string FunctionRegistry::execute(const std::string& iri,
                                      const std::vector<std::string>& args) const {
  const FunctionDef& def = require(iri);
  if (args.size() != def.parameter_iris.size())
    throw Error("function <" + iri + "> expects " +
                std::to_string(def.parameter_iris.size()) + " arguments, got " +
                std::to_string(args.size()));
  counters_.at(iri).fetch_add(1, std::memory_order_relaxed);
  try {
    return def.body(args);
  } catch (const std::exception& e) {
    std::string tuple;
    for (const auto& a : args) tuple += (tuple.empty() ? "\"" : ", \"") + a + "\"";
    throw Error("function <" + iri + "> failed on (" + tuple + "): " + e.what());
  }
}

long long FunctionRegistry::invocation_count(const std::string& iri) const {
  auto it = counters_.find(iri);
  if (it == counters_.end()) throw Error("unregistered function <" + iri + ">");
  return it->second.load(std::memory_order_relaxed);
}

long long FunctionRegistry::total_invocations() const {
  long long total = 0;
  for (const auto& [_, c] : counters_) total += c.load(std::memory_order_relaxed);
  return total;
}

std::map<std::string, long long> FunctionRegistry::invocation_counts() const {
  std::map<std::string, long long> out;
  for (const auto& [iri, c] : counters_) out[iri] = c.load(std::memory_order_relaxed);
  return out;
}

namespace builtin {
std::string to_lower_case() { return std::string(kGrelNs) + "toLowerCase"; }
std::string to_upper_case() { return std::string(kGrelNs) + "toUpperCase"; }
std::string string_trim() { return std::string(kGrelNs) + "string_trim"; }
std::string reverse_string() { return std::string(kExNs) + "reverseString"; }
std::string concat2() { return std::string(kExNs) + "concat2"; }
std::string identity() { return std::string(kExNs) + "identity"; }
}  // namespace builtin

void register_builtin_catalogue(FunctionRegistry& registry) {
  const std::string value_param = std::string(builtin::kGrelNs) + "valueParameter";
  const std::string input_param = std::string(builtin::kExNs) + "input";

  registry.register_function(
      {builtin::to_lower_case(), {value_param}, FunctionKind::NonInjectiveSurjective,
       [](const std::vector<std::string>& args) {
         std::string out = args[0];
         std::transform(out.begin(), out.end(), out.begin(),
                        [](unsigned char c) { return std::tolower(c); });
         return out;
       }});
  registry.register_function(
      {builtin::to_upper_case(), {value_param}, FunctionKind::NonInjectiveSurjective,
       [](const std::vector<std::string>& args) {
         std::string out = args[0];
         std::transform(out.begin(), out.end(), out.begin(),
                        [](unsigned char c) { return std::toupper(c); });
         return out;
       }});
  registry.register_function(
      {builtin::string_trim(), {value_param}, FunctionKind::NonInjectiveSurjective,
       [](const std::vector<std::string>& args) {
         const std::string& s = args[0];
         std::size_t b = s.find_first_not_of(" \t\r\n");
         if (b == std::string::npos) return std::string();
         std::size_t e = s.find_last_not_of(" \t\r\n");
         return s.substr(b, e - b + 1);
       }});
  registry.register_function(
      {builtin::reverse_string(), {input_param}, FunctionKind::Bijective,
       [](const std::vector<std::string>& args) {
         return std::string(args[0].rbegin(), args[0].rend());
       }});
  registry.register_function(
      {builtin::concat2(),
       {std::string(builtin::kExNs) + "left", std::string(builtin::kExNs) + "right"},
       FunctionKind::Unclassified,
       [](const std::vector<std::string>& args) { return args[0] + args[1]; }});
  registry.register_function(
      {builtin::identity(), {input_param}, FunctionKind::Bijective,
       [](const std::vector<std::string>& args) { return args[0]; }});
}

namespace {

std::string memo_key(const std::string& iri, const std::vector<std::string>& args) {
  std::string key = iri;
  for (const auto& a : args) {
    key += '\x1f';
    key += std::to_string(a.size());
    key += ':';
    key += a;
  }
  return key;
}

}  // namespace

std::string MemoTable::evaluate(const FunctionRegistry& registry, const std::string& iri,
                                const std::vector<std::string>& args) {
  const std::string key = memo_key(iri, args);
  std::shared_future<std::string> future;
  std::promise<std::string> promise;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      future = promise.get_future().share();
      cache_.emplace(key, future);
      owner = true;
    } else {
      future = it->second;
    }
  }
  if (owner) {
    try {
      promise.set_value(registry.execute(iri, args));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

std::size_t MemoTable::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

namespace {

// Argument slot after resolution: either a fixed constant or a column of the
// working table.
struct ArgSlot {
  bool is_constant = false;
  std::string constant;
  int column = -1;
};

// Evaluates `app` over the working table, appending its output as a fresh
// synthetic column; inner applications resolve first. Returns the new
// column's index.
int append_application_column(SourceTable& work, const FunctionTerm& app,
                              const FunctionRegistry& registry, MemoTable& memo,
                              int& synth_counter) {
  std::vector<ArgSlot> slots;
  slots.reserve(app.args.size());
  for (const Term& arg : app.args) {
    ArgSlot slot;
    if (arg.is_constant()) {
      slot.is_constant = true;
      slot.constant = arg.as_constant().value;
    } else if (arg.is_reference()) {
      slot.column = work.column_of(arg.as_reference().attribute);
    } else if (arg.is_function()) {
      slot.column = append_application_column(work, arg.as_function(), registry, memo,
                                              synth_counter);
    } else {
      throw Error("template arguments to functions are not supported");
    }
    slots.push_back(std::move(slot));
  }

  std::vector<int> key_cols;
  for (const ArgSlot& s : slots)
    if (!s.is_constant) key_cols.push_back(s.column);

  std::string out_name = "__fn" + std::to_string(++synth_counter);
  work.columns.push_back(out_name);
  int out_col = static_cast<int>(work.columns.size()) - 1;
  work.finalize();

  // One body run per distinct usable tuple; rows with a missing argument get
  // a missing output.
  std::unordered_map<std::string, std::string> outputs;
  std::vector<std::string> args(slots.size());
  for (Row& row : work.rows) {
    bool usable = true;
    for (int c : key_cols) usable &= row[c].has_value();
    if (!usable) {
      row.push_back(std::nullopt);
      continue;
    }
    std::string key = encode_cells(row, key_cols);
    auto it = outputs.find(key);
    if (it == outputs.end()) {
      for (std::size_t i = 0; i < slots.size(); ++i)
        args[i] = slots[i].is_constant ? slots[i].constant : *row[slots[i].column];
      it = outputs.emplace(std::move(key), memo.evaluate(registry, app.function_iri, args))
               .first;
    }
    row.push_back(it->second);
  }
  return out_col;
}

}  // namespace

SourceTable evaluate_function_source(const SourceTable& source, const FunctionTerm& app,
                                     const FunctionRegistry& registry, MemoTable& memo) {
  Term whole(app);
  const std::vector<std::string> arg_attrs = ordered_references(whole);
  if (arg_attrs.empty())
    throw Error("function <" + app.function_iri + "> has no attribute-reference arguments");

  SourceTable work = project_distinct(source, arg_attrs);
  int synth = 0;
  int out_col = append_application_column(work, app, registry, memo, synth);

  SourceTable result;
  result.signature.id = source.signature.id + "__fn";
  result.signature.generated = true;
  result.columns = arg_attrs;
  result.columns.push_back("fnout");
  result.finalize();
  result.signature.attributes = result.columns;

  std::vector<int> key_cols;
  for (const auto& a : arg_attrs) key_cols.push_back(work.column_of(a));

  std::unordered_set<std::string> seen;
  for (const Row& row : work.rows) {
    if (!row[out_col].has_value()) continue;  // some argument was missing
    bool complete = true;
    for (int c : key_cols) complete &= row[c].has_value();
    if (!complete) continue;
    Row out_row;
    out_row.reserve(key_cols.size() + 1);
    for (int c : key_cols) out_row.push_back(row[c]);
    out_row.push_back(row[out_col]);
    std::vector<int> all(out_row.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    if (!seen.insert(encode_cells(out_row, all)).second) continue;
    result.rows.push_back(std::move(out_row));
  }
  return result;
}

}  // namespace mapweave
