#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mapweave {

enum class TermKind { Iri, Literal };

class Term;

/// Fixed lexical value. The kind records whether the constant was written as
/// an IRI or as a string literal.
struct ConstantTerm {
  std::string value;
  TermKind kind = TermKind::Literal;
};

/// Plain attribute reference. Its kind is positional: subjects and role
/// objects read it as IRI, attribute objects as Literal.
struct ReferenceTerm {
  std::string attribute;
};

struct TemplateSegment {
  bool is_reference = false;
  std::string text;  // literal text, or the referenced attribute name
};

/// String template with embedded attribute references ("http://x/{Att1}").
struct TemplateTerm {
  std::vector<TemplateSegment> segments;
  TermKind kind = TermKind::Iri;
};

/// Application of a registered function to argument terms.
struct FunctionTerm {
  std::string function_iri;
  std::vector<Term> args;
  TermKind kind = TermKind::Iri;
};

/// Inductive term: constant, attribute reference, template, or function
/// application. Immutable value type.
class Term {
 public:
  using Node = std::variant<ConstantTerm, ReferenceTerm, TemplateTerm, FunctionTerm>;

  Term() : node_(ConstantTerm{}) {}
  Term(ConstantTerm c) : node_(std::move(c)) {}
  Term(ReferenceTerm r) : node_(std::move(r)) {}
  Term(TemplateTerm t) : node_(std::move(t)) {}
  Term(FunctionTerm f) : node_(std::move(f)) {}

  static Term constant(std::string value, TermKind kind = TermKind::Literal) {
    return Term(ConstantTerm{std::move(value), kind});
  }
  static Term reference(std::string attribute) {
    return Term(ReferenceTerm{std::move(attribute)});
  }
  /// Parses "literal{Ref}literal..." into a template term. Throws Error on
  /// unbalanced braces, empty references, or a template without references.
  static Term from_template(const std::string& pattern, TermKind kind = TermKind::Iri);
  static Term function(std::string iri, std::vector<Term> args,
                       TermKind kind = TermKind::Iri) {
    return Term(FunctionTerm{std::move(iri), std::move(args), kind});
  }

  const Node& node() const { return node_; }

  bool is_constant() const { return std::holds_alternative<ConstantTerm>(node_); }
  bool is_reference() const { return std::holds_alternative<ReferenceTerm>(node_); }
  bool is_template() const { return std::holds_alternative<TemplateTerm>(node_); }
  bool is_function() const { return std::holds_alternative<FunctionTerm>(node_); }

  const ConstantTerm& as_constant() const { return std::get<ConstantTerm>(node_); }
  const ReferenceTerm& as_reference() const { return std::get<ReferenceTerm>(node_); }
  const TemplateTerm& as_template() const { return std::get<TemplateTerm>(node_); }
  const FunctionTerm& as_function() const { return std::get<FunctionTerm>(node_); }

  /// Kind carried by the term itself; references fall back to the positional
  /// kind supplied by the caller.
  TermKind kind(TermKind positional) const;

  /// True if any node in the term tree is a function application.
  bool contains_function() const;

  /// Canonical, injective string form; usable as a hash/map key.
  std::string key() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

 private:
  Node node_;
};

/// True iff any direct argument of the application is itself a function.
bool is_composite(const FunctionTerm& app);

/// All attribute names reachable anywhere in the term tree.
std::set<std::string> collect_references(const Term& term);

/// Same attribute set, in first-appearance order of a left-to-right
/// depth-first walk. Used wherever deterministic column order matters.
std::vector<std::string> ordered_references(const Term& term);

/// Reconstructs the original template pattern string.
std::string template_pattern(const TemplateTerm& tmpl);

}  // namespace mapweave
