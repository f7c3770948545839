#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gnfo/core/model.hpp"

namespace gnfo {

struct Term {
    enum class Kind { variable, constant };
    Kind kind = Kind::variable;
    std::string name;

    static Term var(std::string n) { return {Kind::variable, std::move(n)}; }
    static Term cst(std::string n) { return {Kind::constant, std::move(n)}; }
    bool is_var() const { return kind == Kind::variable; }

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term& a, const Term& b)
    {
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        return a.name <=> b.name;
    }
};

struct Atom {
    std::string relation;
    std::vector<Term> args;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom& a, const Atom& b)
    {
        if (auto c = a.relation <=> b.relation; c != 0) return c;
        return a.args <=> b.args;
    }
};

Atom make_atom(const std::string& rel, const std::vector<std::string>& vars);

std::vector<std::string> atom_vars(const Atom& a);
// Variables in order of first occurrence.
std::vector<std::string> vars_of(const std::vector<Atom>& atoms);
std::set<std::string> var_set(const std::vector<Atom>& atoms);
std::set<std::string> constants_of(const std::vector<Atom>& atoms);

Atom substitute(const Atom& a, const std::map<std::string, Term>& theta);
std::vector<Atom> substitute(const std::vector<Atom>& atoms, const std::map<std::string, Term>& theta);

// Variables become elements named after the variable; constants are looked up.
Fact ground(const Atom& a, const std::map<std::string, Value>& binding, const Instance* interp = nullptr);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const std::vector<Atom>& atoms);

// Adds each relation used in `atoms` to `sig` (checking arities).
void declare_atoms(Signature& sig, const std::vector<Atom>& atoms);

}  // namespace gnfo
