#pragma once

#include <set>
#include <string>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/core/syntax.hpp"
#include "gnfo/query/cq.hpp"

namespace gnfo {

struct DatalogRule {
    Atom head;
    std::vector<Atom> body;

    friend bool operator==(const DatalogRule&, const DatalogRule&) = default;
};

// Zero-ary predicates are unary over the constant `_top`.
struct DatalogProgram {
    Signature edb;
    Signature idb;
    std::vector<DatalogRule> rules;
    std::string goal;

    void validate() const;
    bool goal_is_boolean() const;
};

struct DatalogClass {
    bool guarded = false;
    bool internally_guarded = false;
    bool frontier_guarded = false;
};

DatalogClass classify_datalog(const DatalogProgram& P);

struct DatalogResult {
    std::set<Tuple> goal;
    Instance fixpoint;
    int iterations = 0;
};

// Semi-naive least fixpoint.
DatalogResult eval_datalog_full(const DatalogProgram& P, const Instance& I);
std::set<Tuple> eval_datalog(const DatalogProgram& P, const Instance& I);

std::string to_string(const DatalogRule& r);

}  // namespace gnfo
