#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mapweave/term.hpp"

namespace mapweave {

class FunctionRegistry;

/// Named tabular source. Attribute lists are filled in when the source is
/// bound to its file; `generated` marks intermediate results (S_g and
/// projections) produced by the transformer.
struct SourceSignature {
  std::string id;        // file stem; sources with the same file share an id
  std::string location;  // file name, resolved relative to the sources dir
  std::vector<std::string> attributes;
  bool generated = false;
};

struct JoinCondition {
  std::string child_attribute;
  std::string parent_attribute;

  bool operator==(const JoinCondition& o) const {
    return child_attribute == o.child_attribute && parent_attribute == o.parent_attribute;
  }
};

enum class AssertionKind {
  Concept,
  SingleRole,
  ReferencedSourceRole,
  MultiSourcesRole,
  Attribute,
};

const char* assertion_kind_name(AssertionKind kind);

/// One mapping assertion. Concept assertions with an empty class IRI are
/// subject anchors: they define a subject term for parent references but
/// emit no rdf:type triples.
struct MappingAssertion {
  std::string id;           // "<triples map IRI>|s" or "<tm IRI>|po<k>"
  std::string triples_map;  // owning triples map IRI
  std::string source_id;
  AssertionKind kind = AssertionKind::Concept;
  std::string class_iri;      // Concept only
  std::string predicate_iri;  // role/attribute kinds
  Term subject;
  std::optional<Term> object;     // SingleRole / Attribute
  std::string referenced_id;      // ReferencedSourceRole (MR) / MultiSourcesRole (MJ)
  std::vector<JoinCondition> joins;  // MultiSourcesRole; conditions conjoin

  bool has_function() const {
    return subject.contains_function() || (object && object->contains_function());
  }
};

/// The DIS = <O, S, M, F>. O is a vocabulary reachable through the prefix
/// map; immutable after construction aside from source binding.
class DataIntegrationSystem {
 public:
  DataIntegrationSystem() = default;

  void set_prefix(const std::string& label, const std::string& base);
  const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

  /// Adds or merges a source; returns its index. Throws on conflicting
  /// locations for one id.
  std::size_t add_source(SourceSignature sig);
  void add_assertion(MappingAssertion assertion);

  const std::vector<SourceSignature>& sources() const { return sources_; }
  std::vector<SourceSignature>& sources() { return sources_; }
  const std::vector<MappingAssertion>& assertions() const { return assertions_; }
  std::vector<MappingAssertion>& assertions() { return assertions_; }

  const SourceSignature* find_source(const std::string& id) const;
  const MappingAssertion* find_assertion(const std::string& id) const;

  const SourceSignature& source(const std::string& id) const;       // throws
  const MappingAssertion& assertion(const std::string& id) const;   // throws

  void set_functions(const FunctionRegistry* registry) { functions_ = registry; }
  const FunctionRegistry* functions() const { return functions_; }

 private:
  std::map<std::string, std::string> prefixes_;
  std::vector<SourceSignature> sources_;
  std::vector<MappingAssertion> assertions_;
  std::map<std::string, std::size_t> source_index_;
  std::map<std::string, std::size_t> assertion_index_;
  const FunctionRegistry* functions_ = nullptr;
};

/// Ids of assertions whose own terms contain a function application, in
/// document order (the paper's MF set).
std::vector<std::string> assertions_with_functions(const DataIntegrationSystem& dis);

struct StarJoinGroup {
  std::vector<std::string> assertion_ids;  // document order
  bool shared_parent = false;              // same MJ definition
  bool shared_subject = false;             // same subject concept definition
};

struct ChainPath {
  std::vector<std::string> assertion_ids;
  bool cyclic = false;  // path closes back onto its head
};

std::vector<StarJoinGroup> detect_star_joins(const DataIntegrationSystem& dis);
std::vector<ChainPath> detect_chain_joins(const DataIntegrationSystem& dis);

/// All attributes an assertion needs from its child-side source: term
/// references plus child join attributes.
std::vector<std::string> child_attributes(const MappingAssertion& assertion);

/// Structural validation (ids, references, arity, term shape). Source-schema
/// checks happen after binding; see bind_sources in source_store.hpp.
void validate_structure(const DataIntegrationSystem& dis);

/// Attribute-level validation once signatures carry their column lists.
void validate_bound(const DataIntegrationSystem& dis);

}  // namespace mapweave
