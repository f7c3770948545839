#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/core/syntax.hpp"

namespace gnfo {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class FormulaKind { atom, equality, exists, forall, conj, disj, neg };

struct Formula {
    FormulaKind kind = FormulaKind::atom;
    Atom atom;                       // atom
    Term lhs, rhs;                   // equality
    std::string var;                 // exists / forall
    std::vector<FormulaPtr> kids;    // conj / disj (n-ary), neg / quantifiers (one)
};

FormulaPtr f_atom(Atom a);
FormulaPtr f_eq(Term l, Term r);
FormulaPtr f_exists(const std::string& v, FormulaPtr body);
FormulaPtr f_exists(const std::vector<std::string>& vs, FormulaPtr body);
FormulaPtr f_forall(const std::string& v, FormulaPtr body);
FormulaPtr f_forall(const std::vector<std::string>& vs, FormulaPtr body);
FormulaPtr f_and(std::vector<FormulaPtr> kids);
FormulaPtr f_or(std::vector<FormulaPtr> kids);
FormulaPtr f_not(FormulaPtr body);
FormulaPtr f_implies(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr f_true();

std::set<std::string> free_vars(const FormulaPtr& f);
std::set<std::string> formula_constants(const FormulaPtr& f);
std::map<std::string, int> formula_relations(const FormulaPtr& f);
int quantifier_depth(const FormulaPtr& f);
bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);

std::string to_string(const FormulaPtr& f);

enum class FragmentVerdict { gnf, gfo, both, neither };

struct Violation {
    std::string node;
    std::string reason;
};

struct GnfCheckReport {
    FragmentVerdict verdict = FragmentVerdict::neither;
    std::vector<Violation> violations;
    bool accepted = false;
};

std::string to_string(FragmentVerdict v);

GnfCheckReport check_gnf(const FormulaPtr& f);
GnfCheckReport check_gfo(const FormulaPtr& f);

// Tarskian truth. Without an explicit domain the active domain plus the
// constant interpretations is used.
bool eval_fo(const FormulaPtr& f, const Instance& I, const std::optional<std::set<Value>>& domain = std::nullopt,
             const std::map<std::string, Value>& binding = {});

FormulaPtr relativize(const FormulaPtr& f, const std::string& pred);

}  // namespace gnfo
