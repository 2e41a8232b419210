#include <cctype>
#include <map>
#include <sstream>

#include "mapweave/error.hpp"
#include "mapweave/function_engine.hpp"
#include "mapweave/mapping.hpp"

namespace mapweave {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Eof,
  PrefixDirective,  // @prefix
  Iri,              // <...>
  PName,            // prefix:local (value holds the expanded-later raw form)
  String,           // "..."
  LBracket,
  RBracket,
  Semicolon,
  Comma,
  Dot,
  A,  // the 'a' keyword
};

struct Token {
  Tok kind = Tok::Eof;
  std::string value;
  int line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    if (pending_dot_) {
      pending_dot_ = false;
      Token tok;
      tok.kind = Tok::Dot;
      tok.line = line_;
      tok.column = column_ > 1 ? column_ - 1 : 1;
      return tok;
    }
    skip_trivia();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = Tok::Eof;
      return tok;
    }
    char c = text_[pos_];
    switch (c) {
      case '[': advance(); tok.kind = Tok::LBracket; return tok;
      case ']': advance(); tok.kind = Tok::RBracket; return tok;
      case ';': advance(); tok.kind = Tok::Semicolon; return tok;
      case ',': advance(); tok.kind = Tok::Comma; return tok;
      case '.': advance(); tok.kind = Tok::Dot; return tok;
      case '<': return lex_iri(tok);
      case '"': return lex_string(tok);
      case '@': return lex_directive(tok);
      case '(':
        fail(tok, "collections are not supported");
      case '_':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == ':')
          fail(tok, "blank node labels are not supported");
        break;
      case '\'':
        fail(tok, "single-quoted strings are not supported");
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-')
      fail(tok, "numeric literals are not supported");
    return lex_name(tok);
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(message, at.line, at.column);
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  Token lex_iri(Token tok) {
    advance();  // '<'
    tok.kind = Tok::Iri;
    while (pos_ < text_.size() && text_[pos_] != '>') {
      char c = text_[pos_];
      if (c == '\n' || c == ' ') fail(tok, "unterminated IRI");
      tok.value += c;
      advance();
    }
    if (pos_ >= text_.size()) fail(tok, "unterminated IRI");
    advance();  // '>'
    return tok;
  }

  void append_utf8(std::string& out, unsigned code) const {
    if (code < 0x80) {
      out += static_cast<char>(code);
    } else if (code < 0x800) {
      out += static_cast<char>(0xc0 | (code >> 6));
      out += static_cast<char>(0x80 | (code & 0x3f));
    } else if (code < 0x10000) {
      out += static_cast<char>(0xe0 | (code >> 12));
      out += static_cast<char>(0x80 | ((code >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (code & 0x3f));
    } else {
      out += static_cast<char>(0xf0 | (code >> 18));
      out += static_cast<char>(0x80 | ((code >> 12) & 0x3f));
      out += static_cast<char>(0x80 | ((code >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (code & 0x3f));
    }
  }

  unsigned lex_hex(const Token& tok, int len) {
    unsigned code = 0;
    for (int i = 0; i < len; ++i) {
      if (pos_ >= text_.size()) fail(tok, "truncated unicode escape");
      char c = text_[pos_];
      advance();
      code <<= 4;
      if (c >= '0' && c <= '9') code |= static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') code |= static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') code |= static_cast<unsigned>(c - 'A' + 10);
      else fail(tok, "invalid unicode escape");
    }
    return code;
  }

  Token lex_string(Token tok) {
    advance();  // '"'
    if (pos_ + 1 < text_.size() && text_[pos_] == '"' && text_[pos_ + 1] == '"')
      fail(tok, "long strings are not supported");
    tok.kind = Tok::String;
    while (true) {
      if (pos_ >= text_.size()) fail(tok, "unterminated string literal");
      char c = text_[pos_];
      if (c == '\n') fail(tok, "unterminated string literal");
      advance();
      if (c == '"') break;
      if (c != '\\') {
        tok.value += c;
        continue;
      }
      if (pos_ >= text_.size()) fail(tok, "unterminated escape sequence");
      char esc = text_[pos_];
      advance();
      switch (esc) {
        case 't': tok.value += '\t'; break;
        case 'n': tok.value += '\n'; break;
        case 'r': tok.value += '\r'; break;
        case '"': tok.value += '"'; break;
        case '\\': tok.value += '\\'; break;
        case 'u': append_utf8(tok.value, lex_hex(tok, 4)); break;
        case 'U': append_utf8(tok.value, lex_hex(tok, 8)); break;
        default: fail(tok, std::string("invalid escape sequence '\\") + esc + "'");
      }
    }
    return tok;
  }

  Token lex_directive(Token tok) {
    advance();  // '@'
    std::string word;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      word += text_[pos_];
      advance();
    }
    if (word == "prefix") {
      tok.kind = Tok::PrefixDirective;
      return tok;
    }
    if (word == "base") fail(tok, "@base is not supported");
    fail(tok, "unsupported directive '@" + word + "'");
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == '.' || c == '%';
  }

  Token lex_name(Token tok) {
    std::string word;
    while (pos_ < text_.size() && (name_char(text_[pos_]) || text_[pos_] == ':')) {
      word += text_[pos_];
      advance();
    }
    if (word.empty()) fail(tok, std::string("unexpected character '") + text_[pos_] + "'");
    // A trailing '.' belongs to the statement, not the name.
    if (word.size() > 1 && word.back() == '.') {
      word.pop_back();
      pending_dot_ = true;
    }
    if (word == "a") {
      tok.kind = Tok::A;
      return tok;
    }
    if (word == "true" || word == "false") fail(tok, "boolean literals are not supported");
    auto colon = word.find(':');
    if (colon == std::string::npos)
      fail(tok, "expected a prefixed name, got '" + word + "'");
    tok.kind = Tok::PName;
    tok.value = word;
    return tok;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, column_ = 1;
};

// ---------------------------------------------------------------------------
// Generic statement parser: builds property-list trees per subject.
// ---------------------------------------------------------------------------

struct Node {
  enum class Type { Iri, Literal, PropertyList };
  Type type = Type::Iri;
  std::string value;  // absolute IRI or literal lexical form
  std::vector<std::pair<std::string, std::vector<Node>>> properties;
  int line = 0, column = 0;

  const std::vector<Node>* find(const std::string& predicate) const {
    for (const auto& [p, objects] : properties)
      if (p == predicate) return &objects;
    return nullptr;
  }
};

struct Statement {
  std::string subject;
  Node body;  // PropertyList
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lexer_(text) { consume(); }

  std::vector<Statement> parse(std::vector<std::pair<std::string, std::string>>& prefixes) {
    std::vector<Statement> statements;
    while (current_.kind != Tok::Eof) {
      if (current_.kind == Tok::PrefixDirective) {
        parse_prefix(prefixes);
        continue;
      }
      statements.push_back(parse_statement());
    }
    return statements;
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(message, at.line, at.column);
  }

  void consume() { current_ = lexer_.next(); }

  Token expect(Tok kind, const std::string& what) {
    if (current_.kind != kind) fail(current_, "expected " + what);
    Token tok = current_;
    consume();
    return tok;
  }

  std::string expand_pname(const Token& tok) const {
    auto colon = tok.value.find(':');
    std::string prefix = tok.value.substr(0, colon);
    std::string local = tok.value.substr(colon + 1);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end())
      throw ParseError("unresolved prefix '" + prefix + ":'", tok.line, tok.column);
    return it->second + local;
  }

  void parse_prefix(std::vector<std::pair<std::string, std::string>>& prefixes) {
    Token at = current_;
    consume();  // @prefix
    Token name = expect(Tok::PName, "a prefix label ending in ':'");
    if (name.value.back() != ':')
      fail(name, "prefix label must end in ':'");
    std::string label = name.value.substr(0, name.value.size() - 1);
    Token iri = expect(Tok::Iri, "an IRI");
    expect(Tok::Dot, "'.' after @prefix");
    prefixes_[label] = iri.value;
    for (auto& [l, v] : prefixes) {
      if (l == label) {
        v = iri.value;
        return;
      }
    }
    prefixes.emplace_back(label, iri.value);
    (void)at;
  }

  std::string parse_subject() {
    if (current_.kind == Tok::Iri) {
      Token tok = current_;
      consume();
      return tok.value;
    }
    if (current_.kind == Tok::PName) {
      Token tok = current_;
      consume();
      return expand_pname(tok);
    }
    fail(current_, "expected a subject IRI");
  }

  std::string parse_predicate() {
    if (current_.kind == Tok::A) {
      consume();
      return vocab::kRdfType;
    }
    if (current_.kind == Tok::Iri) {
      Token tok = current_;
      consume();
      return tok.value;
    }
    if (current_.kind == Tok::PName) {
      Token tok = current_;
      consume();
      return expand_pname(tok);
    }
    fail(current_, "expected a predicate");
  }

  Node parse_object() {
    Node node;
    node.line = current_.line;
    node.column = current_.column;
    switch (current_.kind) {
      case Tok::Iri:
        node.type = Node::Type::Iri;
        node.value = current_.value;
        consume();
        return node;
      case Tok::PName: {
        node.type = Node::Type::Iri;
        node.value = expand_pname(current_);
        consume();
        return node;
      }
      case Tok::String:
        node.type = Node::Type::Literal;
        node.value = current_.value;
        consume();
        return node;
      case Tok::LBracket: {
        consume();
        node.type = Node::Type::PropertyList;
        if (current_.kind != Tok::RBracket) parse_property_list(node);
        expect(Tok::RBracket, "']'");
        return node;
      }
      default:
        fail(current_, "expected an object (IRI, string, or '[')");
    }
  }

  void parse_property_list(Node& node) {
    while (true) {
      std::string predicate = parse_predicate();
      std::vector<Node> objects;
      objects.push_back(parse_object());
      while (current_.kind == Tok::Comma) {
        consume();
        objects.push_back(parse_object());
      }
      // Merge repeated predicates so extraction sees one object list.
      bool merged = false;
      for (auto& [p, objs] : node.properties) {
        if (p == predicate) {
          for (auto& o : objects) objs.push_back(std::move(o));
          merged = true;
          break;
        }
      }
      if (!merged) node.properties.emplace_back(std::move(predicate), std::move(objects));
      if (current_.kind != Tok::Semicolon) break;
      while (current_.kind == Tok::Semicolon) consume();  // allow trailing ';'
      if (current_.kind == Tok::Dot || current_.kind == Tok::RBracket) break;
    }
  }

  Statement parse_statement() {
    Statement stmt;
    Token at = current_;
    stmt.subject = parse_subject();
    stmt.body.type = Node::Type::PropertyList;
    stmt.body.line = at.line;
    stmt.body.column = at.column;
    parse_property_list(stmt.body);
    expect(Tok::Dot, "'.' at end of statement");
    return stmt;
  }

  Lexer lexer_;
  Token current_;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace
namespace {


// ---------------------------------------------------------------------------
// Extraction: property-list trees -> MappingDocument
// ---------------------------------------------------------------------------

[[noreturn]] void fail_at(const Node& node, const std::string& message) {
  throw ParseError(message, node.line, node.column);
}

const Node& single(const Node& parent, const std::vector<Node>& objects,
                   const std::string& what) {
  if (objects.size() != 1)
    fail_at(objects.size() > 1 ? objects[1] : parent, "exactly one " + what + " required");
  return objects[0];
}

std::string iri_value(const Node& node, const std::string& what) {
  if (node.type != Node::Type::Iri) fail_at(node, what + " must be an IRI");
  return node.value;
}

std::string literal_value(const Node& node, const std::string& what) {
  if (node.type != Node::Type::Literal) fail_at(node, what + " must be a string literal");
  return node.value;
}

TermKind parse_term_type(const Node& node) {
  std::string iri = iri_value(node, "rr:termType");
  const std::string rr(vocab::kRr);
  if (iri == rr + "IRI") return TermKind::Iri;
  if (iri == rr + "Literal") return TermKind::Literal;
  if (iri == rr + "BlankNode")
    fail_at(node, "blank-node-producing term maps are not supported");
  fail_at(node, "unknown term type <" + iri + ">");
}

TermMapAst extract_term_map(const Node& node);

FunctionValueAst extract_function_value(const Node& node) {
  FunctionValueAst fn;
  fn.line = node.line;
  fn.column = node.column;
  if (node.type != Node::Type::PropertyList)
    fail_at(node, "fnml:functionValue must be a property list");
  const std::string rr(vocab::kRr);
  const std::string fno_executes = std::string(vocab::kFno) + "executes";
  int executes_count = 0;
  for (const auto& [predicate, objects] : node.properties) {
    if (predicate != rr + "predicateObjectMap")
      fail_at(node, "only rr:predicateObjectMap is allowed inside fnml:functionValue");
    for (const Node& pom : objects) {
      if (pom.type != Node::Type::PropertyList)
        fail_at(pom, "rr:predicateObjectMap must be a property list");
      const std::vector<Node>* pred = pom.find(rr + "predicate");
      const std::vector<Node>* object_map = pom.find(rr + "objectMap");
      if (!pred) fail_at(pom, "parameter map lacks rr:predicate");
      if (!object_map) fail_at(pom, "parameter map lacks rr:objectMap");
      for (const auto& [p, _] : pom.properties)
        if (p != rr + "predicate" && p != rr + "objectMap")
          fail_at(pom, "unsupported property in function parameter map");
      std::string param_iri = iri_value(single(pom, *pred, "rr:predicate"), "rr:predicate");
      const Node& om = single(pom, *object_map, "rr:objectMap");
      TermMapAst arg = extract_term_map(om);
      if (arg.form == TermMapAst::Form::ParentTriplesMap)
        fail_at(om, "parent triples maps cannot be function arguments");
      if (param_iri == fno_executes) {
        ++executes_count;
        if (arg.form != TermMapAst::Form::Constant || !arg.constant_is_iri)
          fail_at(om, "fno:executes requires a constant function IRI");
        fn.executes_iri = arg.value;
      } else {
        fn.parameters.emplace_back(param_iri, std::move(arg));
      }
    }
  }
  if (executes_count != 1)
    fail_at(node, "function term map needs exactly one fno:executes declaration, found " +
                      std::to_string(executes_count));
  return fn;
}

TermMapAst extract_term_map(const Node& node) {
  TermMapAst tm;
  tm.line = node.line;
  tm.column = node.column;
  if (node.type != Node::Type::PropertyList)
    fail_at(node, "term map must be a property list");
  const std::string rr(vocab::kRr);
  const std::string rml(vocab::kRml);
  const std::string fnml(vocab::kFnml);

  auto set_form = [&](TermMapAst::Form form) {
    if (tm.form != TermMapAst::Form::None)
      fail_at(node, "term map declares more than one value form");
    tm.form = form;
  };

  for (const auto& [predicate, objects] : node.properties) {
    if (predicate == rr + "constant") {
      const Node& o = single(node, objects, "rr:constant");
      set_form(TermMapAst::Form::Constant);
      tm.value = o.value;
      tm.constant_is_iri = o.type == Node::Type::Iri;
    } else if (predicate == rml + "reference") {
      set_form(TermMapAst::Form::Reference);
      tm.value = literal_value(single(node, objects, "rml:reference"), "rml:reference");
    } else if (predicate == rr + "template") {
      set_form(TermMapAst::Form::Template);
      tm.value = literal_value(single(node, objects, "rr:template"), "rr:template");
    } else if (predicate == fnml + "functionValue") {
      set_form(TermMapAst::Form::FunctionValue);
      tm.function = std::make_shared<FunctionValueAst>(
          extract_function_value(single(node, objects, "fnml:functionValue")));
    } else if (predicate == rr + "parentTriplesMap") {
      set_form(TermMapAst::Form::ParentTriplesMap);
      tm.parent_triples_map =
          iri_value(single(node, objects, "rr:parentTriplesMap"), "rr:parentTriplesMap");
    } else if (predicate == rr + "termType") {
      tm.term_type = parse_term_type(single(node, objects, "rr:termType"));
    } else if (predicate == rr + "joinCondition") {
      for (const Node& jc : objects) {
        if (jc.type != Node::Type::PropertyList)
          fail_at(jc, "rr:joinCondition must be a property list");
        const std::vector<Node>* child = jc.find(rr + "child");
        const std::vector<Node>* parent = jc.find(rr + "parent");
        if (!child || !parent) fail_at(jc, "join condition needs rr:child and rr:parent");
        for (const auto& [p, _] : jc.properties)
          if (p != rr + "child" && p != rr + "parent")
            fail_at(jc, "unsupported property in rr:joinCondition");
        tm.joins.push_back(
            {literal_value(single(jc, *child, "rr:child"), "rr:child"),
             literal_value(single(jc, *parent, "rr:parent"), "rr:parent")});
      }
    } else if (predicate == rr + "class") {
      fail_at(node, "rr:class belongs in the subject map");  // caller handles subject maps
    } else {
      fail_at(node, "unsupported term map property <" + predicate + ">");
    }
  }
  if (tm.form == TermMapAst::Form::None)
    fail_at(node, "term map declares no value form");
  if (!tm.joins.empty() && tm.form != TermMapAst::Form::ParentTriplesMap)
    fail_at(node, "rr:joinCondition requires rr:parentTriplesMap");
  return tm;
}

TermMapAst extract_subject_map(const Node& node, std::string& class_iri) {
  if (node.type != Node::Type::PropertyList)
    fail_at(node, "rr:subjectMap must be a property list");
  const std::string rr(vocab::kRr);
  Node stripped = node;
  stripped.properties.clear();
  for (const auto& [predicate, objects] : node.properties) {
    if (predicate == rr + "class") {
      if (!class_iri.empty() || objects.size() > 1)
        fail_at(node, "multiple rr:class values are not supported");
      class_iri = iri_value(single(node, objects, "rr:class"), "rr:class");
    } else {
      stripped.properties.emplace_back(predicate, objects);
    }
  }
  TermMapAst tm = extract_term_map(stripped);
  switch (tm.form) {
    case TermMapAst::Form::Template:
    case TermMapAst::Form::Reference:
    case TermMapAst::Form::FunctionValue:
      break;
    default:
      fail_at(node, "subject map must be a template, reference, or function value");
  }
  if (tm.term_type && *tm.term_type != TermKind::Iri)
    fail_at(node, "subject maps must produce IRIs");
  return tm;
}

TriplesMapAst extract_triples_map(const Statement& stmt) {
  TriplesMapAst tm;
  tm.iri = stmt.subject;
  tm.line = stmt.body.line;
  tm.column = stmt.body.column;
  const std::string rr(vocab::kRr);
  const std::string rml(vocab::kRml);
  const std::string ql(vocab::kQl);

  for (const auto& [predicate, objects] : stmt.body.properties) {
    if (predicate == vocab::kRdfType) {
      for (const Node& o : objects)
        if (iri_value(o, "type") != rr + "TriplesMap")
          fail_at(o, "unexpected type <" + o.value + "> (only rr:TriplesMap)");
    } else if (predicate == rml + "logicalSource") {
      const Node& ls = single(stmt.body, objects, "rml:logicalSource");
      if (ls.type != Node::Type::PropertyList)
        fail_at(ls, "rml:logicalSource must be a property list");
      for (const auto& [p, objs] : ls.properties) {
        if (p == rml + "source") {
          tm.source_file = literal_value(single(ls, objs, "rml:source"), "rml:source");
        } else if (p == rml + "referenceFormulation") {
          std::string rf = iri_value(single(ls, objs, "rml:referenceFormulation"),
                                     "rml:referenceFormulation");
          if (rf != ql + "CSV") fail_at(ls, "only ql:CSV sources are supported");
        } else {
          fail_at(ls, "unsupported logical source property <" + p + ">");
        }
      }
      if (tm.source_file.empty()) fail_at(ls, "logical source lacks rml:source");
    } else if (predicate == rr + "subjectMap") {
      tm.subject = extract_subject_map(single(stmt.body, objects, "rr:subjectMap"),
                                       tm.class_iri);
    } else if (predicate == rr + "predicateObjectMap") {
      for (const Node& pom : objects) {
        if (pom.type != Node::Type::PropertyList)
          fail_at(pom, "rr:predicateObjectMap must be a property list");
        const std::vector<Node>* pred = pom.find(rr + "predicate");
        const std::vector<Node>* object_map = pom.find(rr + "objectMap");
        if (!pred) fail_at(pom, "predicate-object map lacks rr:predicate");
        if (!object_map) fail_at(pom, "predicate-object map lacks rr:objectMap");
        for (const auto& [p, _] : pom.properties)
          if (p != rr + "predicate" && p != rr + "objectMap")
            fail_at(pom, "unsupported property in rr:predicateObjectMap");
        PredicateObjectMapAst entry;
        entry.predicate_iri =
            iri_value(single(pom, *pred, "rr:predicate"), "rr:predicate");
        entry.object = extract_term_map(single(pom, *object_map, "rr:objectMap"));
        tm.predicate_object_maps.push_back(std::move(entry));
      }
    } else {
      fail_at(stmt.body, "unsupported triples map property <" + predicate + ">");
    }
  }
  if (tm.source_file.empty())
    fail_at(stmt.body, "triples map <" + tm.iri + "> lacks rml:logicalSource");
  if (tm.subject.form == TermMapAst::Form::None)
    fail_at(stmt.body, "triples map <" + tm.iri + "> lacks rr:subjectMap");
  return tm;
}

}  // namespace

MappingDocument parse_mapping_document(const std::string& text) {
  MappingDocument doc;
  Parser parser(text);
  std::vector<Statement> statements = parser.parse(doc.prefixes);

  std::map<std::string, std::size_t> seen;
  for (const Statement& stmt : statements) {
    if (seen.count(stmt.subject))
      throw ParseError("triples map <" + stmt.subject + "> defined twice",
                       stmt.body.line, stmt.body.column);
    seen[stmt.subject] = doc.triples_maps.size();
    doc.triples_maps.push_back(extract_triples_map(stmt));
  }

  // Parent references must resolve within the document.
  auto check_parents = [&](const TermMapAst& tm) {
    if (tm.form == TermMapAst::Form::ParentTriplesMap && !seen.count(tm.parent_triples_map))
      throw ParseError("unresolved rr:parentTriplesMap <" + tm.parent_triples_map + ">",
                       tm.line, tm.column);
  };
  for (const TriplesMapAst& tm : doc.triples_maps)
    for (const PredicateObjectMapAst& pom : tm.predicate_object_maps)
      check_parents(pom.object);
  return doc;
}

}  // namespace mapweave
