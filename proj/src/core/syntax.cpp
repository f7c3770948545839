#include "gnfo/core/syntax.hpp"

#include <algorithm>

namespace gnfo {

Atom make_atom(const std::string& rel, const std::vector<std::string>& vars)
{
    Atom a{rel, {}};
    for (const auto& v : vars) a.args.push_back(Term::var(v));
    return a;
}

std::vector<std::string> atom_vars(const Atom& a)
{
    std::vector<std::string> out;
    for (const Term& t : a.args)
        if (t.is_var() && std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return out;
}

std::vector<std::string> vars_of(const std::vector<Atom>& atoms)
{
    std::vector<std::string> out;
    for (const Atom& a : atoms)
        for (const Term& t : a.args)
            if (t.is_var() && std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return out;
}

std::set<std::string> var_set(const std::vector<Atom>& atoms)
{
    std::set<std::string> out;
    for (const Atom& a : atoms)
        for (const Term& t : a.args)
            if (t.is_var()) out.insert(t.name);
    return out;
}

std::set<std::string> constants_of(const std::vector<Atom>& atoms)
{
    std::set<std::string> out;
    for (const Atom& a : atoms)
        for (const Term& t : a.args)
            if (!t.is_var()) out.insert(t.name);
    return out;
}

Atom substitute(const Atom& a, const std::map<std::string, Term>& theta)
{
    Atom out{a.relation, {}};
    for (const Term& t : a.args) {
        if (t.is_var()) {
            auto it = theta.find(t.name);
            out.args.push_back(it == theta.end() ? t : it->second);
        } else {
            out.args.push_back(t);
        }
    }
    return out;
}

std::vector<Atom> substitute(const std::vector<Atom>& atoms, const std::map<std::string, Term>& theta)
{
    std::vector<Atom> out;
    for (const Atom& a : atoms) {
        Atom b = substitute(a, theta);
        if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(std::move(b));
    }
    return out;
}

Fact ground(const Atom& a, const std::map<std::string, Value>& binding, const Instance* interp)
{
    Fact f{a.relation, {}};
    for (const Term& t : a.args) {
        if (t.is_var()) {
            auto it = binding.find(t.name);
            if (it == binding.end()) throw Error("unbound variable " + t.name);
            f.args.push_back(it->second);
        } else {
            f.args.push_back(interp ? interp->constant_value(t.name) : Value::constant(t.name));
        }
    }
    return f;
}

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const Atom& a)
{
    if (a.args.size() == 1 && !a.args[0].is_var() && a.args[0].name == kTopConstant) return a.relation + "()";
    std::string s = a.relation + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ",";
        s += a.args[i].name;
    }
    return s + ")";
}

std::string to_string(const std::vector<Atom>& atoms)
{
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) s += ", ";
        s += to_string(atoms[i]);
    }
    return s;
}

void declare_atoms(Signature& sig, const std::vector<Atom>& atoms)
{
    for (const Atom& a : atoms) sig.add_relation(a.relation, static_cast<int>(a.args.size()));
}

}  // namespace gnfo
