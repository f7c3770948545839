#include "gnfo/core/model.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "gnfo/core/store.hpp"

namespace gnfo {

void Signature::add_relation(const std::string& name, int arity)
{
    if (arity < 1) throw Error("relation " + name + " must have positive arity");
    if (auto a = this->arity(name)) {
        if (*a != arity) throw Error("arity mismatch for relation " + name);
        return;
    }
    if (has_constant(name)) throw Error("name used both as relation and constant: " + name);
    relations.emplace_back(name, arity);
}

void Signature::add_constant(const std::string& name)
{
    if (has_constant(name)) return;
    if (has_relation(name)) throw Error("name used both as relation and constant: " + name);
    constants.push_back(name);
}

std::optional<int> Signature::arity(const std::string& name) const
{
    for (const auto& [n, a] : relations)
        if (n == name) return a;
    return std::nullopt;
}

bool Signature::has_constant(const std::string& name) const
{
    return std::find(constants.begin(), constants.end(), name) != constants.end();
}

void Signature::merge(const Signature& other)
{
    for (const auto& [n, a] : other.relations) add_relation(n, a);
    for (const auto& c : other.constants) add_constant(c);
}

Signature Signature::restricted_to(const std::set<std::string>& rels) const
{
    Signature out;
    for (const auto& [n, a] : relations)
        if (rels.count(n)) out.relations.emplace_back(n, a);
    out.constants = constants;
    return out;
}

void Signature::validate() const
{
    std::set<std::string> seen;
    for (const auto& [n, a] : relations) {
        if (a < 1) throw Error("relation " + n + " must have positive arity");
        if (!seen.insert(n).second) throw Error("duplicate relation " + n);
    }
    std::set<std::string> cs;
    for (const auto& c : constants) {
        if (!cs.insert(c).second) throw Error("duplicate constant " + c);
        if (seen.count(c)) throw Error("name used both as relation and constant: " + c);
    }
}

std::size_t ValueHash::operator()(const Value& v) const noexcept
{
    return std::hash<std::string>{}(v.name) * 3 + static_cast<std::size_t>(v.kind);
}

Instance::Instance(Signature sig) : signature(std::move(sig))
{
    for (const auto& c : signature.constants) constants.emplace(c, Value::constant(c));
}

void Instance::add(const Fact& f)
{
    if (f.args.empty()) throw Error("zero-ary fact " + f.relation + " is not allowed");
    signature.add_relation(f.relation, static_cast<int>(f.args.size()));
    facts.insert(f);
}

void Instance::declare_constant(const std::string& c)
{
    signature.add_constant(c);
    constants.emplace(c, Value::constant(c));
}

void Instance::interpret_constant(const std::string& c, const Value& v)
{
    signature.add_constant(c);
    constants[c] = v;
}

Value Instance::constant_value(const std::string& c) const
{
    auto it = constants.find(c);
    return it == constants.end() ? Value::constant(c) : it->second;
}

std::set<Value> Instance::constant_values() const
{
    std::set<Value> out;
    for (const auto& [c, v] : constants) out.insert(v);
    return out;
}

void Instance::validate() const
{
    signature.validate();
    for (const auto& c : signature.constants)
        if (!constants.count(c)) throw Error("constant " + c + " is not interpreted");
    for (const Fact& f : facts) {
        auto a = signature.arity(f.relation);
        if (!a) throw Error("undeclared relation " + f.relation);
        if (*a != static_cast<int>(f.args.size())) throw Error("arity mismatch in fact " + to_string(f));
    }
}

std::set<Value> active_domain(const Instance& I)
{
    std::set<Value> out;
    for (const Fact& f : I.facts) out.insert(f.args.begin(), f.args.end());
    return out;
}

std::set<Value> fact_values(const Fact& f) { return {f.args.begin(), f.args.end()}; }

bool is_guarded_set(const Instance& I, const std::set<Value>& X)
{
    std::set<Value> cv = I.constant_values();
    std::vector<Value> need;
    for (const Value& v : X)
        if (!cv.count(v)) need.push_back(v);
    if (need.empty()) return true;
    for (const Fact& f : I.facts) {
        bool all = true;
        for (const Value& v : need) {
            if (std::find(f.args.begin(), f.args.end(), v) == f.args.end()) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

bool weak_substructure(const Instance& A, const Instance& B)
{
    if (A.constants != B.constants) return false;
    return std::includes(B.facts.begin(), B.facts.end(), A.facts.begin(), A.facts.end());
}

Instance induced_substructure(const Instance& I, const std::set<Value>& X)
{
    Instance out(I.signature);
    out.constants = I.constants;
    std::set<Value> keep = X;
    for (const Value& v : I.constant_values()) keep.insert(v);
    for (const Fact& f : I.facts) {
        bool inside = std::all_of(f.args.begin(), f.args.end(), [&](const Value& v) { return keep.count(v) > 0; });
        if (inside) out.facts.insert(f);
    }
    return out;
}

std::vector<std::set<Value>> guarded_sets(const Instance& I)
{
    std::set<Value> cv = I.constant_values();
    std::set<std::set<Value>> all{{}};
    for (const Fact& f : I.facts) {
        std::vector<Value> vs;
        for (const Value& v : fact_values(f))
            if (!cv.count(v)) vs.push_back(v);
        std::size_t n = vs.size();
        for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
            std::set<Value> s;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::size_t{1} << i)) s.insert(vs[i]);
            all.insert(std::move(s));
        }
    }
    return {all.begin(), all.end()};
}

Value Homomorphism::apply(const Value& v) const
{
    auto it = mapping.find(v);
    if (it == mapping.end()) throw Error("homomorphism undefined on " + v.name);
    return it->second;
}

Fact Homomorphism::apply(const Fact& f) const
{
    Fact out{f.relation, {}};
    for (const Value& v : f.args) out.args.push_back(apply(v));
    return out;
}

bool verify_homomorphism(const Instance& S, const Instance& T, const Homomorphism& h)
{
    for (const auto& [c, v] : S.constants) {
        auto it = h.mapping.find(v);
        if (it != h.mapping.end() && !(it->second == T.constant_value(c))) return false;
    }
    for (const Fact& f : S.facts) {
        for (const Value& v : f.args)
            if (!h.mapping.count(v)) return false;
        if (!T.contains(h.apply(f))) return false;
    }
    return true;
}

std::optional<Homomorphism> find_homomorphism(const Instance& S, const Instance& T,
                                              const std::map<Value, Value>& seed, long max_nodes,
                                              bool* exhausted)
{
    if (exhausted) *exhausted = false;
    detail::Store store;
    detail::Interner values;
    detail::load(T, store, values);

    std::map<Value, int> fixed;
    for (const auto& [c, v] : S.constants) {
        int target = values.id(T.constant_value(c));
        auto [it, fresh] = fixed.emplace(v, target);
        if (!fresh && it->second != target) return std::nullopt;
    }
    for (const auto& [from, to] : seed) {
        int target = values.id(to);
        auto [it, fresh] = fixed.emplace(from, target);
        if (!fresh && it->second != target)
            throw PreconditionError("seed inconsistent with constant interpretation at " + from.name);
    }

    std::map<Value, int> slot;
    std::vector<Value> slot_value;
    std::vector<detail::PAtom> atoms;
    for (const Fact& f : S.facts) {
        detail::PAtom p;
        p.rel = store.relation_id(f.relation, static_cast<int>(f.args.size()));
        for (const Value& v : f.args) {
            auto fx = fixed.find(v);
            if (fx != fixed.end()) {
                p.terms.push_back(detail::fixed_term(fx->second));
                continue;
            }
            auto [it, fresh] = slot.emplace(v, static_cast<int>(slot_value.size()));
            if (fresh) slot_value.push_back(v);
            p.terms.push_back(it->second);
        }
        atoms.push_back(std::move(p));
    }

    std::optional<Homomorphism> result;
    std::vector<int> binding(slot_value.size(), -1);
    long budget = max_nodes;
    detail::MatchOptions opts;
    if (max_nodes >= 0) opts.budget = &budget;
    detail::match(store, atoms, binding, [&](const std::vector<int>& b) {
        Homomorphism h;
        for (const auto& [v, id] : fixed) h.mapping[v] = values.value(id);
        for (std::size_t i = 0; i < slot_value.size(); ++i) h.mapping[slot_value[i]] = values.value(b[i]);
        result = std::move(h);
        return false;
    }, opts);
    if (!result && max_nodes >= 0 && budget <= 0 && exhausted) *exhausted = true;
    return result;
}

Value pair_value(const Value& a, const Value& b) { return Value::element("p(" + a.name + "," + b.name + ")"); }

Instance direct_product(const Instance& I1, const Instance& I2)
{
    Instance out(I1.signature);
    out.signature.merge(I2.signature);
    out.constants.clear();
    for (const auto& c : out.signature.constants)
        out.constants[c] = pair_value(I1.constant_value(c), I2.constant_value(c));
    std::map<std::string, std::vector<const Fact*>> by_rel;
    for (const Fact& f : I2.facts) by_rel[f.relation].push_back(&f);
    for (const Fact& f1 : I1.facts) {
        auto it = by_rel.find(f1.relation);
        if (it == by_rel.end()) continue;
        for (const Fact* f2 : it->second) {
            Fact p{f1.relation, {}};
            for (std::size_t i = 0; i < f1.args.size(); ++i) p.args.push_back(pair_value(f1.args[i], f2->args[i]));
            out.facts.insert(std::move(p));
        }
    }
    return out;
}

Instance rename_values(const Instance& I, const std::map<Value, Value>& renaming)
{
    auto ren = [&](const Value& v) {
        auto it = renaming.find(v);
        return it == renaming.end() ? v : it->second;
    };
    Instance out(I.signature);
    for (const auto& [c, v] : I.constants) out.constants[c] = ren(v);
    for (const Fact& f : I.facts) {
        Fact g{f.relation, {}};
        for (const Value& v : f.args) g.args.push_back(ren(v));
        out.facts.insert(std::move(g));
    }
    return out;
}

Instance disjoint_union(const Instance& A, const Instance& B, const std::string& left_tag,
                        const std::string& right_tag)
{
    auto tagged = [](const Instance& I, const std::string& tag) {
        std::set<Value> cv = I.constant_values();
        std::map<Value, Value> ren;
        for (const Value& v : active_domain(I))
            if (!cv.count(v)) ren[v] = Value::element(v.name + "@" + tag);
        return rename_values(I, ren);
    };
    Instance out = tagged(A, left_tag);
    Instance right = tagged(B, right_tag);
    out.signature.merge(right.signature);
    for (const auto& [c, v] : right.constants) {
        auto it = out.constants.find(c);
        if (it != out.constants.end() && !(it->second == v))
            throw PreconditionError("constant " + c + " interpreted differently in disjoint union");
        out.constants[c] = v;
    }
    out.facts.insert(right.facts.begin(), right.facts.end());
    return out;
}

Instance restrict_relations(const Instance& I, const std::set<std::string>& rels)
{
    Instance out(I.signature.restricted_to(rels));
    out.constants = I.constants;
    for (const Fact& f : I.facts)
        if (rels.count(f.relation)) out.facts.insert(f);
    return out;
}

Instance minus(const Instance& B, const Instance& A)
{
    if (!weak_substructure(A, B)) throw PreconditionError("minus requires A to be a weak substructure of B");
    std::set<Value> adom = active_domain(A);
    Instance out(B.signature);
    out.constants = B.constants;
    for (const Fact& f : B.facts) {
        bool inside = std::all_of(f.args.begin(), f.args.end(), [&](const Value& v) { return adom.count(v) > 0; });
        if (!inside) out.facts.insert(f);
    }
    return out;
}

bool squid_check(const Instance& A, const Instance& B, const Tentacles& tentacles)
{
    if (!weak_substructure(A, B)) return false;
    std::set<Value> adom = active_domain(A);
    std::set<Value> cv = A.constant_values();

    // (i) every set of A-elements guarded in B is guarded in A.
    for (const Fact& f : B.facts) {
        std::set<Value> x;
        for (const Value& v : f.args)
            if (adom.count(v)) x.insert(v);
        if (!is_guarded_set(A, x)) return false;
    }

    // The tentacles must partition B minus A.
    Instance rest = minus(B, A);
    std::set<Fact> covered;
    for (const auto& t : tentacles) {
        for (const Fact& f : t) {
            if (!rest.contains(f)) return false;
            if (!covered.insert(f).second) return false;
        }
    }
    if (covered.size() != rest.facts.size()) return false;

    // (ii) tentacles overlap only inside adom(A) plus constants, and each
    // meets A in a guarded set.
    std::vector<std::set<Value>> doms;
    for (const auto& t : tentacles) {
        std::set<Value> d;
        for (const Fact& f : t) d.insert(f.args.begin(), f.args.end());
        std::set<Value> meet;
        for (const Value& v : d)
            if (adom.count(v) && !cv.count(v)) meet.insert(v);
        if (!is_guarded_set(A, meet)) return false;
        doms.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < doms.size(); ++i) {
        for (std::size_t j = i + 1; j < doms.size(); ++j) {
            for (const Value& v : doms[i])
                if (doms[j].count(v) && !adom.count(v) && !cv.count(v)) return false;
        }
    }
    return true;
}

SquidExtension squid_extension(const Instance& A, const Instance& B)
{
    if (!weak_substructure(A, B)) throw PreconditionError("squid_extension requires A to be a weak substructure of B");
    std::set<Value> cv = B.constant_values();
    std::set<Value> bdom = active_domain(B);
    std::set<std::string> used;
    for (const Value& v : bdom) used.insert(v.name);

    SquidExtension out;
    out.extension = Instance(B.signature);
    out.extension.constants = B.constants;
    std::set<Value> adom = active_domain(A);
    std::vector<std::set<Value>> roots = guarded_sets(A);
    std::set<Fact> assigned;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        const std::set<Value>& X = roots[k];
        std::map<Value, Value> ren;
        for (const Value& v : bdom) {
            if (X.count(v) || cv.count(v)) {
                out.projection.mapping[v] = v;
                continue;
            }
            std::string name = v.name + "@" + std::to_string(k);
            while (used.count(name)) name += "'";
            used.insert(name);
            Value copy = Value::element(name);
            ren[v] = copy;
            out.projection.mapping[copy] = v;
        }
        std::set<Fact> tentacle;
        for (const Fact& f : B.facts) {
            Fact g{f.relation, {}};
            bool outside = false;
            for (const Value& v : f.args) {
                auto it = ren.find(v);
                g.args.push_back(it == ren.end() ? v : it->second);
                if (!adom.count(g.args.back())) outside = true;
            }
            out.extension.facts.insert(g);
            if (outside && assigned.insert(g).second) tentacle.insert(std::move(g));
        }
        if (!tentacle.empty()) out.tentacles.push_back(std::move(tentacle));
    }
    for (const Value& v : cv) out.projection.mapping[v] = v;
    return out;
}

std::string to_string(const Value& v) { return v.name; }

std::string to_string(const Fact& f)
{
    std::string s = f.relation + "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) s += ",";
        s += f.args[i].name;
    }
    return s + ")";
}

}  // namespace gnfo
