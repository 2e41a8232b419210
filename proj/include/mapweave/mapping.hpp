#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mapweave/dis.hpp"

namespace mapweave {

class FunctionRegistry;

/// Parsed term-map forms, before lowering into dis-model terms.
struct TermMapAst;

struct FunctionValueAst {
  std::string executes_iri;
  // parameter IRI -> argument term map, in document order
  std::vector<std::pair<std::string, TermMapAst>> parameters;
  int line = 0, column = 0;
};

struct TermMapAst {
  enum class Form { None, Constant, Reference, Template, FunctionValue, ParentTriplesMap };
  Form form = Form::None;
  std::string value;  // constant lexical / reference attribute / template pattern
  bool constant_is_iri = false;
  std::optional<TermKind> term_type;  // explicit rr:termType
  std::shared_ptr<FunctionValueAst> function;
  std::string parent_triples_map;
  std::vector<JoinCondition> joins;
  int line = 0, column = 0;
};

struct PredicateObjectMapAst {
  std::string predicate_iri;
  TermMapAst object;
};

struct TriplesMapAst {
  std::string iri;
  std::string source_file;
  TermMapAst subject;
  std::string class_iri;  // empty when absent
  std::vector<PredicateObjectMapAst> predicate_object_maps;
  int line = 0, column = 0;
};

struct MappingDocument {
  std::vector<std::pair<std::string, std::string>> prefixes;  // label -> base
  std::vector<TriplesMapAst> triples_maps;
};

/// Parses the restricted RML+FnO Turtle dialect. Unsupported Turtle features
/// (collections, blank-node labels, @base, numeric literals, ...) raise a
/// ParseError carrying line and column.
MappingDocument parse_mapping_document(const std::string& text);

/// Lowers a parsed document to the DIS model. Warnings (e.g. a triples map
/// yielding no assertions) are appended to `warnings` when given.
DataIntegrationSystem lower_to_assertions(const MappingDocument& doc,
                                          const FunctionRegistry& registry,
                                          std::vector<std::string>* warnings = nullptr);

/// Deterministic canonical serialization: prefixes sorted, triples maps
/// sorted by IRI, predicate-object maps in assertion order. Re-parsing
/// yields a structurally equal DIS.
std::string serialize_mapping_document(const DataIntegrationSystem& dis);

/// Structural equality over sources (id/location/generated), assertions,
/// and prefixes are ignored; signature attribute lists are not compared
/// (they are a binding artifact).
bool dis_equal(const DataIntegrationSystem& a, const DataIntegrationSystem& b);

// Well-known vocabulary IRIs.
namespace vocab {
inline constexpr const char* kRr = "http://www.w3.org/ns/r2rml#";
inline constexpr const char* kRml = "http://semweb.mmlab.be/ns/rml#";
inline constexpr const char* kQl = "http://semweb.mmlab.be/ns/ql#";
inline constexpr const char* kFnml = "http://semweb.mmlab.be/ns/fnml#";
inline constexpr const char* kFno = "https://w3id.org/function/ontology#";
inline constexpr const char* kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
}  // namespace vocab

}  // namespace mapweave
