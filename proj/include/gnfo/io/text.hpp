#pragma once

#include <set>
#include <string>
#include <vector>

#include "gnfo/datalog/datalog.hpp"
#include "gnfo/logic/formula.hpp"
#include "gnfo/query/cq.hpp"
#include "gnfo/tgd/tgd.hpp"

namespace gnfo {

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line(line), column(column)
    {
    }
    int line;
    int column;
};

struct NamedQuery {
    std::string name;
    ConjunctiveQuery query;
};

// Theory files:
//   rel R/2, U/1.
//   const c.
//   tgd R(x,y), U(y) -> exists z: S(x,z).
//   tgd R(x,y) -> U(x) | V(y).
//   query Q(x) :- R(x,y).
// Identifiers declared `const` are constants; other rule terms are variables.
struct Theory {
    Signature signature;
    std::vector<Tgd> tgds;
    std::vector<DisjunctiveTgd> disjunctive;
    std::vector<NamedQuery> queries;
};

Theory parse_theory(const std::string& text);

// Facts `R(a,b).`, `P().` for zero-ary facts, `const c.` or `const c = e.`
// for constants. `_nK` names are labelled nulls.
Instance parse_instance(const std::string& text);

// `Q(x) :- R(x,y), U(y).`, or a bare body whose variables are all free;
// the optional `const` block comes first.
NamedQuery parse_query(const std::string& text);

// `edb R/2.`, optional `const c.`, `goal Goal.` and rules `H :- B1, B2.`
DatalogProgram parse_datalog(const std::string& text);

// Optional `const c, d.` followed by a formula.
FormulaPtr parse_formula(const std::string& text);

std::string print_theory(const Theory& t);
std::string print_instance(const Instance& I);
std::string print_query(const NamedQuery& q);
std::string print_datalog(const DatalogProgram& P);
std::string print_formula(const FormulaPtr& f);

std::string read_file(const std::string& path);

}  // namespace gnfo
