#include "mapweave/dis.hpp"

#include <algorithm>
#include <set>

#include "mapweave/error.hpp"
#include "mapweave/function_engine.hpp"

namespace mapweave {

const char* assertion_kind_name(AssertionKind kind) {
  switch (kind) {
    case AssertionKind::Concept: return "concept";
    case AssertionKind::SingleRole: return "single-role";
    case AssertionKind::ReferencedSourceRole: return "referenced-source-role";
    case AssertionKind::MultiSourcesRole: return "multi-sources-role";
    case AssertionKind::Attribute: return "attribute";
  }
  return "?";
}

void DataIntegrationSystem::set_prefix(const std::string& label, const std::string& base) {
  prefixes_[label] = base;
}

std::size_t DataIntegrationSystem::add_source(SourceSignature sig) {
  auto it = source_index_.find(sig.id);
  if (it != source_index_.end()) {
    const SourceSignature& existing = sources_[it->second];
    if (existing.location != sig.location)
      throw Error("source id '" + sig.id + "' maps to two locations: '" +
                  existing.location + "' and '" + sig.location + "'");
    return it->second;
  }
  source_index_.emplace(sig.id, sources_.size());
  sources_.push_back(std::move(sig));
  return sources_.size() - 1;
}

void DataIntegrationSystem::add_assertion(MappingAssertion assertion) {
  if (assertion_index_.count(assertion.id))
    throw Error("duplicate assertion id '" + assertion.id + "'");
  assertion_index_.emplace(assertion.id, assertions_.size());
  assertions_.push_back(std::move(assertion));
}

const SourceSignature* DataIntegrationSystem::find_source(const std::string& id) const {
  auto it = source_index_.find(id);
  return it == source_index_.end() ? nullptr : &sources_[it->second];
}

const MappingAssertion* DataIntegrationSystem::find_assertion(const std::string& id) const {
  auto it = assertion_index_.find(id);
  return it == assertion_index_.end() ? nullptr : &assertions_[it->second];
}

const SourceSignature& DataIntegrationSystem::source(const std::string& id) const {
  const SourceSignature* s = find_source(id);
  if (!s) throw Error("unknown source '" + id + "'");
  return *s;
}

const MappingAssertion& DataIntegrationSystem::assertion(const std::string& id) const {
  const MappingAssertion* a = find_assertion(id);
  if (!a) throw Error("unknown assertion '" + id + "'");
  return *a;
}

std::vector<std::string> assertions_with_functions(const DataIntegrationSystem& dis) {
  std::vector<std::string> ids;
  for (const auto& a : dis.assertions())
    if (a.has_function()) ids.push_back(a.id);
  return ids;
}

namespace {

// Definition key of a concept assertion: source, subject term, class.
std::string concept_definition(const DataIntegrationSystem& dis,
                               const MappingAssertion& concept) {
  return concept.source_id + "\x1f" + concept.subject.key() + "\x1f" + concept.class_iri;
}

// Definition of the concept assertion standing behind a role assertion's
// subject (same source + same subject term), or an anonymous key when no
// concept assertion matches.
std::string subject_concept_definition(const DataIntegrationSystem& dis,
                                       const MappingAssertion& role) {
  for (const auto& a : dis.assertions()) {
    if (a.kind != AssertionKind::Concept) continue;
    if (a.source_id == role.source_id && a.subject == role.subject)
      return concept_definition(dis, a);
  }
  return role.source_id + "\x1f" + role.subject.key() + "\x1f";
}

std::string mj_definition(const DataIntegrationSystem& dis, const MappingAssertion& msr) {
  return concept_definition(dis, dis.assertion(msr.referenced_id));
}

}  // namespace

std::vector<StarJoinGroup> detect_star_joins(const DataIntegrationSystem& dis) {
  std::vector<std::size_t> msr;
  for (std::size_t i = 0; i < dis.assertions().size(); ++i)
    if (dis.assertions()[i].kind == AssertionKind::MultiSourcesRole) msr.push_back(i);

  // Group doc-ordered indices by key; keep groups of size >= 2.
  auto group_by = [&](auto key_of) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i : msr) groups[key_of(dis.assertions()[i])].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [_, members] : groups)
      if (members.size() >= 2) out.push_back(std::move(members));
    return out;
  };

  auto parent_groups = group_by(
      [&](const MappingAssertion& a) { return mj_definition(dis, a); });
  auto subject_groups = group_by(
      [&](const MappingAssertion& a) { return subject_concept_definition(dis, a); });

  // Merge tags for groups with identical member sets.
  std::map<std::vector<std::size_t>, StarJoinGroup> merged;
  auto insert = [&](const std::vector<std::size_t>& members, bool parent, bool subject) {
    auto& g = merged[members];
    if (g.assertion_ids.empty())
      for (std::size_t i : members) g.assertion_ids.push_back(dis.assertions()[i].id);
    g.shared_parent |= parent;
    g.shared_subject |= subject;
  };
  for (const auto& g : parent_groups) insert(g, true, false);
  for (const auto& g : subject_groups) insert(g, false, true);

  std::vector<std::pair<std::size_t, StarJoinGroup>> ordered;
  for (auto& [members, group] : merged) ordered.emplace_back(members.front(), group);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<StarJoinGroup> out;
  for (auto& [_, g] : ordered) out.push_back(std::move(g));
  return out;
}

std::vector<ChainPath> detect_chain_joins(const DataIntegrationSystem& dis) {
  std::vector<std::size_t> msr;
  for (std::size_t i = 0; i < dis.assertions().size(); ++i)
    if (dis.assertions()[i].kind == AssertionKind::MultiSourcesRole) msr.push_back(i);

  // Edge i -> j when i's MJ definition equals j's subject concept definition.
  std::map<std::size_t, std::vector<std::size_t>> succ;
  std::set<std::size_t> has_pred;
  for (std::size_t i : msr) {
    const std::string tail = mj_definition(dis, dis.assertions()[i]);
    for (std::size_t j : msr) {
      if (i == j) continue;
      if (tail == subject_concept_definition(dis, dis.assertions()[j])) {
        succ[i].push_back(j);
        has_pred.insert(j);
      }
    }
  }

  std::vector<ChainPath> out;
  std::set<std::size_t> on_some_path;

  auto emit = [&](const std::vector<std::size_t>& path, bool cyclic) {
    if (path.size() < 2) return;
    ChainPath cp;
    cp.cyclic = cyclic;
    for (std::size_t i : path) {
      cp.assertion_ids.push_back(dis.assertions()[i].id);
      on_some_path.insert(i);
    }
    out.push_back(std::move(cp));
  };

  // All maximal simple paths from a start node.
  auto extend = [&](auto&& self, std::vector<std::size_t>& path) -> void {
    std::size_t last = path.back();
    auto it = succ.find(last);
    bool extended = false;
    if (it != succ.end()) {
      for (std::size_t next : it->second) {
        if (next == path.front()) {
          emit(path, true);
          extended = true;
          continue;
        }
        if (std::find(path.begin(), path.end(), next) != path.end()) continue;
        path.push_back(next);
        self(self, path);
        path.pop_back();
        extended = true;
      }
    }
    if (!extended) emit(path, false);
  };

  for (std::size_t i : msr) {
    if (has_pred.count(i)) continue;  // not a path head
    if (!succ.count(i)) continue;
    std::vector<std::size_t> path{i};
    extend(extend, path);
  }
  // Pure cycles: every node has a predecessor; start each at its smallest index.
  for (std::size_t i : msr) {
    if (on_some_path.count(i) || !succ.count(i)) continue;
    std::vector<std::size_t> path{i};
    extend(extend, path);
  }
  return out;
}

std::vector<std::string> child_attributes(const MappingAssertion& assertion) {
  std::vector<std::string> attrs = ordered_references(assertion.subject);
  std::set<std::string> seen(attrs.begin(), attrs.end());
  auto add = [&](const std::string& name) {
    if (seen.insert(name).second) attrs.push_back(name);
  };
  if (assertion.object)
    for (const auto& r : ordered_references(*assertion.object)) add(r);
  for (const auto& jc : assertion.joins) add(jc.child_attribute);
  return attrs;
}

namespace {

void validate_term(const DataIntegrationSystem& dis, const MappingAssertion& a,
                   const Term& term) {
  if (term.is_template()) {
    bool has_ref = false;
    for (const auto& seg : term.as_template().segments) has_ref |= seg.is_reference;
    if (!has_ref)
      throw Error("assertion '" + a.id + "': template has no attribute reference");
  } else if (term.is_function()) {
    const FunctionTerm& app = term.as_function();
    if (!dis.functions())
      throw Error("assertion '" + a.id + "': no function registry attached");
    const FunctionDef* def = dis.functions()->find(app.function_iri);
    if (!def)
      throw Error("assertion '" + a.id + "': unregistered function <" +
                  app.function_iri + ">");
    if (def->parameter_iris.size() != app.args.size())
      throw Error("assertion '" + a.id + "': function <" + app.function_iri +
                  "> expects " + std::to_string(def->parameter_iris.size()) +
                  " arguments, got " + std::to_string(app.args.size()));
    if (ordered_references(term).empty())
      throw Error("assertion '" + a.id + "': function <" + app.function_iri +
                  "> has no attribute-reference arguments");
    for (const auto& arg : app.args) validate_term(dis, a, arg);
  }
}

}  // namespace

void validate_structure(const DataIntegrationSystem& dis) {
  for (const auto& a : dis.assertions()) {
    if (!dis.find_source(a.source_id))
      throw Error("assertion '" + a.id + "': unknown source '" + a.source_id + "'");
    validate_term(dis, a, a.subject);
    if (a.object) validate_term(dis, a, *a.object);

    switch (a.kind) {
      case AssertionKind::Concept:
        break;
      case AssertionKind::SingleRole:
        if (!a.object) throw Error("assertion '" + a.id + "': single-role needs an object");
        break;
      case AssertionKind::Attribute: {
        if (!a.object) throw Error("assertion '" + a.id + "': attribute needs an object");
        if (a.object->kind(TermKind::Literal) != TermKind::Literal)
          throw Error("assertion '" + a.id + "': attribute object must be a literal");
        break;
      }
      case AssertionKind::ReferencedSourceRole: {
        const MappingAssertion* mr = dis.find_assertion(a.referenced_id);
        if (!mr) throw Error("assertion '" + a.id + "': unresolved reference '" +
                             a.referenced_id + "'");
        if (mr->source_id != a.source_id)
          throw Error("assertion '" + a.id +
                      "': referenced-source role crosses sources without a join "
                      "condition (a join condition is mandatory across sources)");
        break;
      }
      case AssertionKind::MultiSourcesRole: {
        const MappingAssertion* mj = dis.find_assertion(a.referenced_id);
        if (!mj) throw Error("assertion '" + a.id + "': unresolved reference '" +
                             a.referenced_id + "'");
        if (mj->source_id == a.source_id)
          throw Error("assertion '" + a.id +
                      "': multi-sources role must reference a distinct source");
        if (a.joins.empty())
          throw Error("assertion '" + a.id + "': multi-sources role needs a join condition");
        break;
      }
    }
  }
}

void validate_bound(const DataIntegrationSystem& dis) {
  auto require_attr = [&](const MappingAssertion& a, const SourceSignature& sig,
                          const std::string& attr) {
    if (std::find(sig.attributes.begin(), sig.attributes.end(), attr) ==
        sig.attributes.end())
      throw Error("assertion '" + a.id + "': attribute '" + attr +
                  "' not in source '" + sig.id + "'");
  };
  for (const auto& a : dis.assertions()) {
    const SourceSignature& child = dis.source(a.source_id);
    for (const auto& attr : ordered_references(a.subject)) require_attr(a, child, attr);
    if (a.object)
      for (const auto& attr : ordered_references(*a.object)) require_attr(a, child, attr);
    if (a.kind == AssertionKind::MultiSourcesRole) {
      const SourceSignature& parent = dis.source(dis.assertion(a.referenced_id).source_id);
      for (const auto& jc : a.joins) {
        require_attr(a, child, jc.child_attribute);
        require_attr(a, parent, jc.parent_attribute);
      }
    }
  }
}

}  // namespace mapweave
