#pragma once

#include <atomic>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapweave/table.hpp"
#include "mapweave/term.hpp"

namespace mapweave {

enum class FunctionKind { Bijective, NonInjectiveSurjective, Unclassified };

const char* function_kind_name(FunctionKind kind);

using FunctionBody = std::function<std::string(const std::vector<std::string>&)>;

/// Pure text -> text function. The kind tag is metadata for tests and bench
/// labels; nothing branches on it. Bodies must be deterministic.
struct FunctionDef {
  std::string iri;
  std::vector<std::string> parameter_iris;  // fixes positional order of named params
  FunctionKind kind = FunctionKind::Unclassified;
  FunctionBody body;
};

/// Registry of function definitions plus per-IRI body-execution counters.
/// Counters are atomic; the registry itself is immutable after setup.
class FunctionRegistry {
 public:
  FunctionRegistry() = default;
  FunctionRegistry(const FunctionRegistry&) = delete;
  FunctionRegistry& operator=(const FunctionRegistry&) = delete;

  void register_function(FunctionDef def);  // throws on duplicate IRI
  const FunctionDef* find(const std::string& iri) const;
  const FunctionDef& require(const std::string& iri) const;

  /// Runs the body and bumps the counter. Failures are wrapped with the
  /// offending argument tuple.
  std::string execute(const std::string& iri, const std::vector<std::string>& args) const;

  long long invocation_count(const std::string& iri) const;  // throws on unknown IRI
  long long total_invocations() const;
  std::map<std::string, long long> invocation_counts() const;

 private:
  std::map<std::string, FunctionDef> defs_;
  mutable std::map<std::string, std::atomic<long long>> counters_;
};

/// Registers the built-in catalogue: grel:toLowerCase, grel:toUpperCase,
/// grel:string_trim, ex:reverseString, ex:concat2, ex:identity.
void register_builtin_catalogue(FunctionRegistry& registry);

// Builtin IRIs.
namespace builtin {
inline constexpr const char* kGrelNs = "http://users.ugent.be/~bjdmeest/function/grel.ttl#";
inline constexpr const char* kExNs = "http://example.com/fn#";
std::string to_lower_case();   // grel:toLowerCase
std::string to_upper_case();   // grel:toUpperCase
std::string string_trim();     // grel:string_trim
std::string reverse_string();  // ex:reverseString
std::string concat2();         // ex:concat2
std::string identity();        // ex:identity
}  // namespace builtin

/// Memoization table keyed by (function IRI, argument tuple) with
/// single-flight semantics: concurrent requests for one key run the body
/// once and share the result.
class MemoTable {
 public:
  std::string evaluate(const FunctionRegistry& registry, const std::string& iri,
                       const std::vector<std::string>& args);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::shared_future<std::string>> cache_;
};

/// Eagerly evaluates `app` over the distinct argument tuples of `source`,
/// producing S_g: one column per distinct argument attribute plus `fnout`,
/// one row per distinct tuple with no missing arguments. Composite
/// applications evaluate innermost-first, feeding inner outputs to the outer
/// call through synthetic columns. Bodies run once per distinct tuple via
/// the memo table.
SourceTable evaluate_function_source(const SourceTable& source, const FunctionTerm& app,
                                     const FunctionRegistry& registry, MemoTable& memo);

}  // namespace mapweave
