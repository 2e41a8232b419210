#include "mapweave/term.hpp"

#include "mapweave/error.hpp"

namespace mapweave {

Term Term::from_template(const std::string& pattern, TermKind kind) {
  TemplateTerm tmpl;
  tmpl.kind = kind;
  std::string current;
  bool in_reference = false;
  for (char c : pattern) {
    if (c == '{') {
      if (in_reference) throw Error("nested '{' in template: " + pattern);
      if (!current.empty()) tmpl.segments.push_back({false, current});
      current.clear();
      in_reference = true;
    } else if (c == '}') {
      if (!in_reference) throw Error("unmatched '}' in template: " + pattern);
      if (current.empty()) throw Error("empty reference in template: " + pattern);
      tmpl.segments.push_back({true, current});
      current.clear();
      in_reference = false;
    } else {
      current += c;
    }
  }
  if (in_reference) throw Error("unterminated '{' in template: " + pattern);
  if (!current.empty()) tmpl.segments.push_back({false, current});
  bool has_reference = false;
  for (const auto& seg : tmpl.segments) has_reference |= seg.is_reference;
  if (!has_reference)
    throw Error("template contains no attribute reference: " + pattern);
  return Term(std::move(tmpl));
}

TermKind Term::kind(TermKind positional) const {
  if (is_constant()) return as_constant().kind;
  if (is_template()) return as_template().kind;
  if (is_function()) return as_function().kind;
  return positional;
}

bool Term::contains_function() const {
  if (is_function()) return true;
  return false;  // templates hold references only; constants/references are leaves
}

namespace {

void append_key(const Term& term, std::string& out) {
  std::visit(
      [&out](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ConstantTerm>) {
          out += node.kind == TermKind::Iri ? "C<" : "C\"";
          out += std::to_string(node.value.size());
          out += ':';
          out += node.value;
        } else if constexpr (std::is_same_v<T, ReferenceTerm>) {
          out += "R";
          out += std::to_string(node.attribute.size());
          out += ':';
          out += node.attribute;
        } else if constexpr (std::is_same_v<T, TemplateTerm>) {
          out += node.kind == TermKind::Iri ? "T<[" : "T\"[";
          for (const auto& seg : node.segments) {
            out += seg.is_reference ? 'r' : 'l';
            out += std::to_string(seg.text.size());
            out += ':';
            out += seg.text;
          }
          out += ']';
        } else {
          out += node.kind == TermKind::Iri ? "F<" : "F\"";
          out += node.function_iri;
          out += '(';
          for (const auto& arg : node.args) {
            append_key(arg, out);
            out += ',';
          }
          out += ')';
        }
      },
      term.node());
}

void collect(const Term& term, std::vector<std::string>& ordered,
             std::set<std::string>& seen) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ReferenceTerm>) {
          if (seen.insert(node.attribute).second) ordered.push_back(node.attribute);
        } else if constexpr (std::is_same_v<T, TemplateTerm>) {
          for (const auto& seg : node.segments)
            if (seg.is_reference && seen.insert(seg.text).second)
              ordered.push_back(seg.text);
        } else if constexpr (std::is_same_v<T, FunctionTerm>) {
          for (const auto& arg : node.args) collect(arg, ordered, seen);
        }
      },
      term.node());
}

}  // namespace

std::string Term::key() const {
  std::string out;
  append_key(*this, out);
  return out;
}

bool Term::operator==(const Term& other) const { return key() == other.key(); }

bool is_composite(const FunctionTerm& app) {
  for (const auto& arg : app.args)
    if (arg.is_function()) return true;
  return false;
}

std::set<std::string> collect_references(const Term& term) {
  std::vector<std::string> ordered;
  std::set<std::string> seen;
  collect(term, ordered, seen);
  return seen;
}

std::vector<std::string> ordered_references(const Term& term) {
  std::vector<std::string> ordered;
  std::set<std::string> seen;
  collect(term, ordered, seen);
  return ordered;
}

std::string template_pattern(const TemplateTerm& tmpl) {
  std::string out;
  for (const auto& seg : tmpl.segments) {
    if (seg.is_reference) {
      out += '{';
      out += seg.text;
      out += '}';
    } else {
      out += seg.text;
    }
  }
  return out;
}

}  // namespace mapweave
