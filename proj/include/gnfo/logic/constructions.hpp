#pragma once

#include <optional>
#include <set>
#include <string>

#include "gnfo/logic/formula.hpp"
#include "gnfo/tgd/tgd.hpp"

namespace gnfo {

// not exists body-vars (body & not exists existentials. head)
FormulaPtr tgd_to_gnf(const Tgd& t);

// Replaces free occurrences of variables by terms.
FormulaPtr substitute_free(const FormulaPtr& f, const std::map<std::string, Term>& theta);

// (P(c) for every constant and fresh d & phi^P(d)) -> phi(d).
FormulaPtr build_extension_preservation_sentence(const FormulaPtr& phi, const std::string& pred = "P");

// Domain predicates D1, D2 containing the active domain; phi^D1 <-> phi^D2.
FormulaPtr build_domain_independence_sentence(const FormulaPtr& phi, const std::string& d1 = "D1",
                                              const std::string& d2 = "D2");

// Input: a disjunction of existentially quantified conjunctions of literals.
FormulaPtr strip_unguarded_negatives(const FormulaPtr& phi);

struct CountermodelOptions {
    int max_size = 4;
    int max_fact_bits = 20;  // sizes with more candidate facts are skipped
};

struct CountermodelResult {
    std::optional<Instance> instance;
    std::set<Value> domain;
    int sizes_searched = 0;
    bool complete = true;  // false when some size was skipped
};

CountermodelResult search_countermodel(const FormulaPtr& phi, const CountermodelOptions& opts = {});

}  // namespace gnfo
