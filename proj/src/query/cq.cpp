#include "gnfo/query/cq.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#include "gnfo/core/store.hpp"

namespace gnfo {

ConjunctiveQuery ConjunctiveQuery::make(std::vector<std::string> free, const std::vector<Atom>& atoms)
{
    ConjunctiveQuery q;
    q.free_vars = std::move(free);
    for (const Atom& a : atoms)
        if (std::find(q.atoms.begin(), q.atoms.end(), a) == q.atoms.end()) q.atoms.push_back(a);
    for (const auto& v : vars_of(q.atoms))
        if (std::find(q.free_vars.begin(), q.free_vars.end(), v) == q.free_vars.end()) q.exist_vars.push_back(v);
    return q;
}

void ConjunctiveQuery::validate() const
{
    std::set<std::string> fv(free_vars.begin(), free_vars.end());
    if (fv.size() != free_vars.size()) throw Error("repeated free variable in query");
    std::set<std::string> ev(exist_vars.begin(), exist_vars.end());
    for (const auto& v : ev)
        if (fv.count(v)) throw Error("variable " + v + " is both free and existential");
    std::set<std::string> used = var_set(atoms);
    for (const auto& v : free_vars)
        if (!used.count(v)) throw Error("free variable " + v + " does not occur in any atom");
    for (const auto& v : used)
        if (!fv.count(v) && !ev.count(v)) throw Error("variable " + v + " is not declared");
    std::set<Atom> seen;
    for (const Atom& a : atoms)
        if (!seen.insert(a).second) throw Error("duplicate atom " + to_string(a));
}

void UnionOfCQs::validate() const
{
    if (disjuncts.empty()) throw Error("a union of CQs needs at least one disjunct");
    for (const auto& d : disjuncts) {
        d.validate();
        if (d.free_vars.size() != disjuncts.front().free_vars.size())
            throw Error("disjuncts of a union must share the free-variable arity");
    }
}

std::pair<Instance, Tuple> canon_inst(const ConjunctiveQuery& q)
{
    Instance I;
    for (const auto& c : constants_of(q.atoms)) I.declare_constant(c);
    std::map<std::string, Value> binding;
    for (const auto& v : vars_of(q.atoms)) binding[v] = Value::element(v);
    for (const auto& v : q.free_vars) binding.emplace(v, Value::element(v));
    for (const Atom& a : q.atoms) I.add(ground(a, binding, &I));
    Tuple t;
    for (const auto& v : q.free_vars) t.push_back(binding.at(v));
    return {I, t};
}

namespace {

struct Compiled {
    detail::Store store;
    detail::Interner values;
    std::vector<detail::PAtom> atoms;
    std::vector<int> free_slots;
    std::size_t slots = 0;
};

void compile_query(const ConjunctiveQuery& q, const Instance& I, Compiled& c)
{
    detail::load(I, c.store, c.values);
    std::unordered_map<std::string, int> slots;
    for (const auto& v : q.free_vars) slots.emplace(v, static_cast<int>(slots.size()));
    c.atoms = detail::compile(q.atoms, c.store, c.values, slots, &I);
    for (const auto& v : q.free_vars) c.free_slots.push_back(slots.at(v));
    c.slots = slots.size();
}

}  // namespace

std::set<Tuple> eval_cq(const ConjunctiveQuery& q, const Instance& I)
{
    q.validate();
    Compiled c;
    compile_query(q, I, c);
    std::set<std::vector<int>> ids;
    std::vector<int> binding(c.slots, -1);
    detail::match(c.store, c.atoms, binding, [&](const std::vector<int>& b) {
        std::vector<int> t;
        for (int s : c.free_slots) t.push_back(b[s]);
        ids.insert(std::move(t));
        return true;
    });
    std::set<Tuple> out;
    for (const auto& t : ids) {
        Tuple row;
        for (int id : t) row.push_back(c.values.value(id));
        out.insert(std::move(row));
    }
    return out;
}

bool holds(const ConjunctiveQuery& q, const Instance& I, const Tuple& answer)
{
    if (answer.size() != q.free_vars.size()) throw Error("answer tuple has the wrong arity");
    Compiled c;
    compile_query(q, I, c);
    std::vector<int> binding(c.slots, -1);
    for (std::size_t i = 0; i < answer.size(); ++i) {
        int id = c.values.id(answer[i]);
        int s = c.free_slots[i];
        if (binding[s] >= 0 && binding[s] != id) return false;
        binding[s] = id;
    }
    return detail::exists_match(c.store, c.atoms, binding);
}

bool cq_contained(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2)
{
    if (q1.free_vars.size() != q2.free_vars.size()) throw Error("containment needs equal free-variable arity");
    auto [inst, tuple] = canon_inst(q1);
    return holds(q2, inst, tuple);
}

bool cq_equivalent(const ConjunctiveQuery& q1, const ConjunctiveQuery& q2)
{
    return cq_contained(q1, q2) && cq_contained(q2, q1);
}

namespace {

std::vector<Atom> atoms_of(const Instance& I)
{
    std::vector<Atom> out;
    for (const Fact& f : I.facts) {
        Atom a{f.relation, {}};
        for (const Value& v : f.args)
            a.args.push_back(v.kind == ValueKind::constant ? Term::cst(v.name) : Term::var(v.name));
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace

ConjunctiveQuery core_cq(const ConjunctiveQuery& q)
{
    ConjunctiveQuery cur = ConjunctiveQuery::make(q.free_vars, q.atoms);
    bool changed = true;
    while (changed) {
        changed = false;
        auto [inst, tuple] = canon_inst(cur);
        std::map<Value, Value> seed;
        for (const Value& v : tuple) seed[v] = v;
        for (const Fact& f : inst.facts) {
            Instance smaller = inst;
            smaller.facts.erase(f);
            auto h = find_homomorphism(inst, smaller, seed);
            if (!h) continue;
            Instance image(inst.signature);
            image.constants = inst.constants;
            for (const Fact& g : inst.facts) image.facts.insert(h->apply(g));
            cur = ConjunctiveQuery::make(q.free_vars, atoms_of(image));
            changed = true;
            break;
        }
    }
    // Keep the original atom order where possible for readability.
    std::vector<Atom> ordered;
    for (const Atom& a : q.atoms)
        if (std::find(cur.atoms.begin(), cur.atoms.end(), a) != cur.atoms.end() &&
            std::find(ordered.begin(), ordered.end(), a) == ordered.end())
            ordered.push_back(a);
    for (const Atom& a : cur.atoms)
        if (std::find(ordered.begin(), ordered.end(), a) == ordered.end()) ordered.push_back(a);
    return ConjunctiveQuery::make(q.free_vars, ordered);
}

bool is_answer_guarded(const ConjunctiveQuery& q)
{
    if (q.free_vars.empty()) return true;
    for (const Atom& a : q.atoms) {
        auto vs = atom_vars(a);
        bool all = std::all_of(q.free_vars.begin(), q.free_vars.end(), [&](const std::string& v) {
            return std::find(vs.begin(), vs.end(), v) != vs.end();
        });
        if (all) return true;
    }
    return false;
}

bool is_acyclic(const std::vector<Atom>& atoms)
{
    std::vector<std::set<std::string>> edges;
    for (const Atom& a : atoms) {
        auto vs = atom_vars(a);
        edges.emplace_back(vs.begin(), vs.end());
    }
    bool changed = true;
    while (changed && edges.size() > 1) {
        changed = false;
        std::map<std::string, int> count;
        for (const auto& e : edges)
            for (const auto& v : e) ++count[v];
        for (auto& e : edges) {
            for (auto it = e.begin(); it != e.end();) {
                if (count[*it] == 1) {
                    it = e.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            for (std::size_t j = 0; j < edges.size(); ++j) {
                if (i == j) continue;
                if (std::includes(edges[j].begin(), edges[j].end(), edges[i].begin(), edges[i].end())) {
                    edges.erase(edges.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
    }
    return edges.size() <= 1;
}

bool is_acyclic(const ConjunctiveQuery& q) { return is_acyclic(q.atoms); }

namespace {

std::string render(const std::vector<Atom>& atoms, std::size_t free_count)
{
    std::vector<std::string> parts;
    for (const Atom& a : atoms) parts.push_back(to_string(a));
    std::sort(parts.begin(), parts.end());
    std::string s = std::to_string(free_count) + "|";
    for (const auto& p : parts) s += p + ";";
    return s;
}

}  // namespace

ConjunctiveQuery canonical_form(const ConjunctiveQuery& q)
{
    std::vector<std::string> exist;
    for (const auto& v : vars_of(q.atoms))
        if (std::find(q.free_vars.begin(), q.free_vars.end(), v) == q.free_vars.end()) exist.push_back(v);
    std::map<std::string, Term> base;
    std::vector<std::string> free_names;
    for (std::size_t i = 0; i < q.free_vars.size(); ++i) {
        std::string n = "v" + std::to_string(i);
        base[q.free_vars[i]] = Term::var(n);
        free_names.push_back(n);
    }
    std::vector<std::size_t> perm(exist.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::string best_key;
    std::vector<Atom> best;
    bool first = true;
    bool exhaustive = exist.size() <= 6;
    do {
        auto theta = base;
        for (std::size_t i = 0; i < exist.size(); ++i)
            theta[exist[perm[i]]] = Term::var("v" + std::to_string(q.free_vars.size() + i));
        std::vector<Atom> renamed = substitute(q.atoms, theta);
        std::string key = render(renamed, q.free_vars.size());
        if (first || key < best_key) {
            first = false;
            best_key = key;
            best = renamed;
        }
        if (!exhaustive) break;
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(best.begin(), best.end(), [](const Atom& a, const Atom& b) { return to_string(a) < to_string(b); });
    return ConjunctiveQuery::make(free_names, best);
}

std::string serialize(const ConjunctiveQuery& q)
{
    ConjunctiveQuery c = canonical_form(q);
    return render(c.atoms, c.free_vars.size());
}

UnionOfCQs treeify(const ConjunctiveQuery& q, int max_atoms, int max_vars, const Signature* sig)
{
    if (max_atoms <= 0 || max_vars <= 0) throw PreconditionError("treeify bounds must be positive");
    if (!is_answer_guarded(q)) throw PreconditionError("treeify needs an answer-guarded query");
    Signature s;
    if (sig) s = *sig;
    else declare_atoms(s, q.atoms);

    std::size_t f = q.free_vars.size();
    UnionOfCQs out;
    if (static_cast<int>(f) > max_vars) return out;

    std::vector<Term> terms;
    for (int i = 0; i < max_vars; ++i) terms.push_back(Term::var("v" + std::to_string(i)));
    for (const auto& c : constants_of(q.atoms)) terms.push_back(Term::cst(c));
    std::vector<std::string> free_names;
    for (std::size_t i = 0; i < f; ++i) free_names.push_back("v" + std::to_string(i));

    std::vector<Atom> alphabet;
    for (const auto& [rel, arity] : s.relations) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
        while (true) {
            Atom a{rel, {}};
            for (auto i : idx) a.args.push_back(terms[i]);
            alphabet.push_back(std::move(a));
            std::size_t p = 0;
            while (p < idx.size() && ++idx[p] == terms.size()) idx[p++] = 0;
            if (p == idx.size()) break;
        }
    }

    std::map<std::string, ConjunctiveQuery> found;
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (!pick.empty()) {
            std::vector<Atom> atoms;
            for (auto i : pick) atoms.push_back(alphabet[i]);
            std::set<std::string> used = var_set(atoms);
            bool ok = true;
            for (const auto& v : free_names)
                if (!used.count(v)) ok = false;
            // Existential variables must form a prefix of the remaining names.
            for (std::size_t i = f; ok && i < static_cast<std::size_t>(max_vars); ++i) {
                if (used.count("v" + std::to_string(i))) continue;
                for (std::size_t j = i + 1; j < static_cast<std::size_t>(max_vars); ++j)
                    if (used.count("v" + std::to_string(j))) ok = false;
                break;
            }
            if (ok) {
                ConjunctiveQuery t = ConjunctiveQuery::make(free_names, atoms);
                if (is_answer_guarded(t) && is_acyclic(t)) {
                    auto [inst, tuple] = canon_inst(t);
                    if (holds(q, inst, tuple)) {
                        ConjunctiveQuery c = core_cq(t);
                        if (!is_acyclic(c)) c = t;
                        ConjunctiveQuery canon = canonical_form(c);
                        found.emplace(serialize(canon), canon);
                    }
                }
            }
        }
        if (static_cast<int>(pick.size()) == max_atoms) return;
        for (std::size_t i = start; i < alphabet.size(); ++i) {
            pick.push_back(i);
            rec(i + 1);
            pick.pop_back();
        }
    };
    rec(0);

    std::vector<std::pair<std::string, ConjunctiveQuery>> members(found.begin(), found.end());
    for (const auto& [key, t] : members) {
        bool dominated = false;
        for (const auto& [key2, t2] : members) {
            if (key2 == key) continue;
            if (cq_contained(t, t2) && !cq_contained(t2, t)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.disjuncts.push_back(t);
    }
    return out;
}

std::string to_string(const ConjunctiveQuery& q, const std::string& head)
{
    std::string s = head + "(";
    for (std::size_t i = 0; i < q.free_vars.size(); ++i) {
        if (i) s += ",";
        s += q.free_vars[i];
    }
    return s + ") :- " + to_string(q.atoms);
}

}  // namespace gnfo
