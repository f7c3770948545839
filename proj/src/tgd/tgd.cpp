#include "gnfo/tgd/tgd.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "gnfo/core/store.hpp"
#include "gnfo/query/cq.hpp"

namespace gnfo {

std::vector<std::string> Tgd::body_vars() const { return vars_of(body); }

std::vector<std::string> Tgd::frontier() const
{
    auto hv = var_set(head);
    std::vector<std::string> out;
    for (const auto& v : body_vars())
        if (hv.count(v)) out.push_back(v);
    return out;
}

std::vector<std::string> Tgd::existentials() const
{
    auto bv = var_set(body);
    std::vector<std::string> out;
    for (const auto& v : vars_of(head))
        if (!bv.count(v)) out.push_back(v);
    return out;
}

void Tgd::validate() const
{
    if (body.empty()) throw Error("tgd with empty body");
    if (head.empty()) throw Error("tgd with empty head");
    Signature sig;
    declare_atoms(sig, body);
    declare_atoms(sig, head);
}

void DisjunctiveTgd::validate() const
{
    if (heads.empty()) throw Error("disjunctive tgd without disjuncts");
    for (std::size_t i = 0; i < heads.size(); ++i) disjunct(i).validate();
}

bool guarded_by_body(const std::vector<Atom>& body, const std::vector<std::string>& vars)
{
    if (vars.size() <= 1) return true;
    for (const Atom& a : body) {
        auto av = atom_vars(a);
        bool all = std::all_of(vars.begin(), vars.end(),
                               [&](const std::string& v) { return std::find(av.begin(), av.end(), v) != av.end(); });
        if (all) return true;
    }
    return false;
}

bool is_guarded(const Tgd& t) { return guarded_by_body(t.body, t.body_vars()); }
bool is_frontier_guarded(const Tgd& t) { return guarded_by_body(t.body, t.frontier()); }

bool all_guarded(const std::vector<Tgd>& sigma) { return std::all_of(sigma.begin(), sigma.end(), is_guarded); }

bool all_frontier_guarded(const std::vector<Tgd>& sigma)
{
    return std::all_of(sigma.begin(), sigma.end(), is_frontier_guarded);
}

TgdClass classify(const Tgd& t)
{
    TgdClass c;
    c.full = t.is_full();
    c.guarded = is_guarded(t);
    c.frontier_guarded = is_frontier_guarded(t);
    if (c.frontier_guarded) {
        auto fr = t.frontier();
        std::vector<Atom> both = t.body;
        both.insert(both.end(), t.head.begin(), t.head.end());
        c.acyclic_fg = is_acyclic(ConjunctiveQuery::make(fr, t.body)) && is_acyclic(ConjunctiveQuery::make(fr, both));
    }
    c.quasi_frontier_guarded = is_quasi_frontier_guarded(t);
    return c;
}

std::vector<std::vector<int>> TgdGraph::components() const
{
    std::vector<int> parent(nodes);
    for (int i = 0; i < nodes; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [a, b] : edges) parent[find(a)] = find(b);
    std::vector<std::vector<int>> out;
    std::vector<int> slot(nodes, -1);
    for (int i = 0; i < nodes; ++i) {
        int r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot[r]].push_back(i);
    }
    return out;
}

TgdGraph tgd_graph(const Tgd& t)
{
    TgdGraph g;
    g.nodes = static_cast<int>(t.head.size());
    auto ex = t.existentials();
    std::set<std::string> exs(ex.begin(), ex.end());
    for (int i = 0; i < g.nodes; ++i) {
        auto vi = atom_vars(t.head[i]);
        for (int j = i + 1; j < g.nodes; ++j) {
            auto vj = atom_vars(t.head[j]);
            bool shared = std::any_of(vi.begin(), vi.end(), [&](const std::string& v) {
                return exs.count(v) && std::find(vj.begin(), vj.end(), v) != vj.end();
            });
            if (shared) g.edges.emplace_back(i, j);
        }
    }
    return g;
}

std::vector<Tgd> decompose_components(const Tgd& t)
{
    std::vector<Tgd> out;
    for (const auto& comp : tgd_graph(t).components()) {
        Tgd part{t.body, {}};
        for (int i : comp) part.head.push_back(t.head[i]);
        out.push_back(std::move(part));
    }
    return out;
}

bool is_quasi_frontier_guarded(const Tgd& t)
{
    for (const Tgd& part : decompose_components(t))
        if (!is_frontier_guarded(part)) return false;
    return true;
}

std::string canonical_key(const Tgd& t)
{
    std::vector<Atom> atoms = t.body;
    for (Atom a : t.head) {
        a.relation = "^" + a.relation;
        atoms.push_back(std::move(a));
    }
    return serialize(canonical_form(ConjunctiveQuery::make({}, atoms)));
}

std::vector<Tgd> specializations(const Tgd& t, const std::vector<std::string>& constants)
{
    auto ex = t.existentials();
    auto bv = t.body_vars();
    std::vector<Tgd> out;
    std::set<std::string> seen;
    std::map<std::string, Term> theta;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == ex.size()) {
            Tgd s{t.body, substitute(t.head, theta)};
            if (seen.insert(canonical_key(s)).second) out.push_back(std::move(s));
            return;
        }
        std::vector<Term> choices{Term::var(ex[i])};
        for (const auto& v : bv) choices.push_back(Term::var(v));
        for (const auto& c : constants) choices.push_back(Term::cst(c));
        for (const Term& c : choices) {
            theta[ex[i]] = c;
            rec(i + 1);
        }
        theta.erase(ex[i]);
    };
    rec(0);
    return out;
}

namespace {

bool satisfies_heads(const Instance& I, const std::vector<Atom>& body, const std::vector<std::vector<Atom>>& heads)
{
    detail::Store store;
    detail::Interner values;
    detail::load(I, store, values);
    std::unordered_map<std::string, int> slots;
    auto pbody = detail::compile(body, store, values, slots, &I);
    std::size_t nbody = slots.size();
    std::vector<std::vector<detail::PAtom>> pheads;
    for (const auto& h : heads) pheads.push_back(detail::compile(h, store, values, slots, &I));
    std::vector<int> binding(nbody, -1);
    bool ok = true;
    detail::match(store, pbody, binding, [&](const std::vector<int>& b) {
        std::vector<int> ext(slots.size(), -1);
        std::copy(b.begin(), b.begin() + static_cast<long>(nbody), ext.begin());
        for (const auto& ph : pheads)
            if (detail::exists_match(store, ph, ext)) return true;
        ok = false;
        return false;
    });
    return ok;
}

}  // namespace

bool satisfies(const Instance& I, const Tgd& t) { return satisfies_heads(I, t.body, {t.head}); }

bool satisfies(const Instance& I, const std::vector<Tgd>& sigma)
{
    return std::all_of(sigma.begin(), sigma.end(), [&](const Tgd& t) { return satisfies(I, t); });
}

bool satisfies(const Instance& I, const DisjunctiveTgd& t) { return satisfies_heads(I, t.body, t.heads); }

Signature signature_of(const std::vector<Tgd>& sigma)
{
    Signature sig;
    for (const Tgd& t : sigma) {
        declare_atoms(sig, t.body);
        declare_atoms(sig, t.head);
        for (const auto& c : constants_of(t.body)) sig.add_constant(c);
        for (const auto& c : constants_of(t.head)) sig.add_constant(c);
    }
    return sig;
}

namespace {

std::string head_string(const std::vector<Atom>& head, const std::vector<std::string>& ex)
{
    std::string s;
    if (!ex.empty()) {
        s = "exists ";
        for (std::size_t i = 0; i < ex.size(); ++i) s += (i ? "," : "") + ex[i];
        s += ": ";
    }
    return s + to_string(head);
}

}  // namespace

std::string to_string(const Tgd& t) { return to_string(t.body) + " -> " + head_string(t.head, t.existentials()); }

std::string to_string(const DisjunctiveTgd& t)
{
    std::string s = to_string(t.body) + " -> ";
    for (std::size_t i = 0; i < t.heads.size(); ++i) {
        if (i) s += " | ";
        s += head_string(t.heads[i], t.disjunct(i).existentials());
    }
    return s;
}

}  // namespace gnfo
