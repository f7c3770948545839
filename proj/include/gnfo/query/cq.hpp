#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/core/syntax.hpp"

namespace gnfo {

struct ConjunctiveQuery {
    std::vector<std::string> free_vars;
    std::vector<std::string> exist_vars;
    std::vector<Atom> atoms;

    // Builds a query whose existential variables are the remaining ones in
    // order of first occurrence; duplicate atoms are dropped.
    static ConjunctiveQuery make(std::vector<std::string> free, const std::vector<Atom>& atoms);
    bool is_boolean() const { return free_vars.empty(); }
    void validate() const;

    friend bool operator==(const ConjunctiveQuery&, const ConjunctiveQuery&) = default;
};

struct UnionOfCQs {
    std::vector<ConjunctiveQuery> disjuncts;
    void validate() const;
};

using Tuple = std::vector<Value>;

std::pair<Instance, Tuple> canon_inst(const ConjunctiveQuery& q);
std::set<Tuple> eval_cq(const ConjunctiveQuery& q, const Instance& I);
// True iff q holds of `answer` in I.
bool holds(const ConjunctiveQuery& q, const Instance& I, const Tuple& answer);
bool cq_contained(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2);
bool cq_equivalent(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2);
ConjunctiveQuery core_cq(const ConjunctiveQuery& q);
bool is_answer_guarded(const ConjunctiveQuery& q);
bool is_acyclic(const ConjunctiveQuery& q);
bool is_acyclic(const std::vector<Atom>& atoms);

// Variables renamed to v0, v1, ... minimizing the serialization over all
// renamings consistent with the free-variable order; atoms sorted.
ConjunctiveQuery canonical_form(const ConjunctiveQuery& q);
std::string serialize(const ConjunctiveQuery& q);

UnionOfCQs treeify(const ConjunctiveQuery& q, int max_atoms, int max_vars, const Signature* sig = nullptr);

std::string to_string(const ConjunctiveQuery& q, const std::string& head = "Q");

}  // namespace gnfo
