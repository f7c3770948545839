#include "support.hpp"

#include <algorithm>
#include <functional>

#include "gnfo/io/text.hpp"

using namespace gnfo;

namespace support {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string var(int i) { return "x" + std::to_string(i); }

Atom random_atom(Rng& rng, const Signature& sig, const std::vector<std::string>& vars)
{
    const auto& [rel, arity] = sig.relations[uniform(rng, 0, static_cast<int>(sig.relations.size()) - 1)];
    Atom a{rel, {}};
    for (int i = 0; i < arity; ++i) a.args.push_back(Term::var(vars[uniform(rng, 0, static_cast<int>(vars.size()) - 1)]));
    return a;
}

// Atom using exactly the variables in `must` (in some positions) plus others from `pool`.
std::optional<Atom> covering_atom(Rng& rng, const Signature& sig, const std::vector<std::string>& must,
                                  const std::vector<std::string>& pool)
{
    std::vector<std::pair<std::string, int>> fits;
    for (const auto& r : sig.relations)
        if (r.second >= static_cast<int>(must.size())) fits.push_back(r);
    if (fits.empty()) return std::nullopt;
    const auto& [rel, arity] = fits[uniform(rng, 0, static_cast<int>(fits.size()) - 1)];
    std::vector<std::string> args(must);
    while (static_cast<int>(args.size()) < arity) args.push_back(pool[uniform(rng, 0, static_cast<int>(pool.size()) - 1)]);
    std::shuffle(args.begin(), args.end(), rng);
    return make_atom(rel, args);
}

}  // namespace

Signature random_signature(Rng& rng, int relations, int max_arity)
{
    Signature sig;
    for (int i = 0; i < relations; ++i) sig.add_relation(std::string(1, static_cast<char>('A' + i)), uniform(rng, 1, max_arity));
    return sig;
}

Instance random_instance(Rng& rng, const Signature& sig, int elements, int facts)
{
    Instance I(sig);
    for (int k = 0; k < facts; ++k) {
        const auto& [rel, arity] = sig.relations[uniform(rng, 0, static_cast<int>(sig.relations.size()) - 1)];
        Fact f{rel, {}};
        for (int i = 0; i < arity; ++i) f.args.push_back(el("e" + std::to_string(uniform(rng, 1, elements))));
        I.add(f);
    }
    return I;
}

std::vector<Atom> random_atoms(Rng& rng, const Signature& sig, int atoms, int vars)
{
    std::vector<std::string> pool;
    for (int i = 0; i < vars; ++i) pool.push_back(var(i));
    std::vector<Atom> out;
    for (int i = 0; i < atoms; ++i) out.push_back(random_atom(rng, sig, pool));
    return out;
}

ConjunctiveQuery random_cq(Rng& rng, const Signature& sig, int atoms, int vars, int free)
{
    auto body = random_atoms(rng, sig, atoms, vars);
    auto vs = vars_of(body);
    std::shuffle(vs.begin(), vs.end(), rng);
    vs.resize(std::min<std::size_t>(vs.size(), static_cast<std::size_t>(free)));
    return ConjunctiveQuery::make(vs, body);
}

Tgd random_tgd(Rng& rng, const Signature& sig, TgdShape shape, bool allow_existentials)
{
    while (true) {
        int nb = uniform(rng, 1, 2);
        auto body = random_atoms(rng, sig, nb, uniform(rng, 1, 3));
        auto bvars = vars_of(body);
        if (shape == TgdShape::guarded && !guarded_by_body(body, bvars)) continue;
        std::vector<std::string> frontier_pool = bvars;
        if (shape == TgdShape::frontier_guarded) {
            // Frontier drawn from one body atom.
            const Atom& g = body[uniform(rng, 0, nb - 1)];
            frontier_pool = atom_vars(g);
        }
        std::vector<std::string> pool = frontier_pool;
        int ex = allow_existentials ? uniform(rng, 0, 1) : 0;
        for (int i = 0; i < ex; ++i) pool.push_back("z" + std::to_string(i));
        int nh = uniform(rng, 1, 2);
        std::vector<Atom> head;
        for (int i = 0; i < nh; ++i) head.push_back(random_atom(rng, sig, pool));
        Tgd t{body, head};
        if (shape != TgdShape::any && !is_frontier_guarded(t)) continue;
        if (shape == TgdShape::guarded && !is_guarded(t)) continue;
        return t;
    }
}

std::vector<Tgd> random_theory(Rng& rng, const Signature& sig, int rules, TgdShape shape, bool allow_existentials)
{
    std::vector<Tgd> out;
    for (int i = 0; i < rules; ++i) out.push_back(random_tgd(rng, sig, shape, allow_existentials));
    return out;
}

DatalogProgram random_program(Rng& rng, const Signature& sig, int rules)
{
    DatalogProgram P;
    P.edb = sig;
    P.goal = "Goal";
    Signature idb;
    idb.add_relation("Goal", 1);
    idb.add_relation("I1", 1);
    idb.add_relation("I2", 2);
    Signature all = sig;
    all.merge(idb);
    for (int k = 0; k < rules; ++k) {
        std::vector<std::string> pool{"x0", "x1", "x2"};
        std::vector<Atom> body;
        int nb = uniform(rng, 1, 3);
        for (int i = 0; i < nb; ++i) body.push_back(random_atom(rng, all, pool));
        body.erase(std::remove_if(body.begin(), body.end(), [](const Atom& a) { return a.relation == "Goal"; }),
                   body.end());
        if (body.empty()) body.push_back(random_atom(rng, sig, pool));
        auto vs = vars_of(body);
        const auto& [rel, arity] = idb.relations[k == 0 ? 0 : uniform(rng, 0, 2)];
        Atom head{rel, {}};
        for (int i = 0; i < arity; ++i) head.args.push_back(Term::var(vs[uniform(rng, 0, static_cast<int>(vs.size()) - 1)]));
        P.rules.push_back({head, body});
    }
    P.idb = idb;
    return P;
}

FormulaPtr random_gnf(Rng& rng, const Signature& sig, const std::vector<std::string>& free, int depth)
{
    // Atoms over the free variables; pad with a fresh-free choice.
    auto atom_over = [&](const std::vector<std::string>& vs) -> FormulaPtr {
        if (vs.empty()) {
            std::vector<std::string> one{"w"};
            return f_exists("w", f_atom(random_atom(rng, sig, one)));
        }
        return f_atom(random_atom(rng, sig, vs));
    };
    int choice = depth <= 0 ? uniform(rng, 0, 1) : uniform(rng, 0, 5);
    switch (choice) {
    case 0:
    case 1:
        if (choice == 1 && free.size() >= 1) return f_eq(Term::var(free[0]), Term::var(free.back()));
        return atom_over(free);
    case 2:
        return f_and({random_gnf(rng, sig, free, depth - 1), random_gnf(rng, sig, free, depth - 1)});
    case 3:
        return f_or({random_gnf(rng, sig, free, depth - 1), random_gnf(rng, sig, free, depth - 1)});
    case 4: {
        // Guarded negation: an atom covering the free variables conjoined
        // with a negated subformula over them.
        std::vector<std::string> pool = free;
        if (pool.empty()) pool.push_back("u");
        auto guard = covering_atom(rng, sig, free, pool);
        if (!guard) return atom_over(free);
        auto g = f_atom(*guard);
        if (free.empty()) return f_exists("u", f_and({g, f_not(random_gnf(rng, sig, {"u"}, depth - 1))}));
        return f_and({g, f_not(random_gnf(rng, sig, free, depth - 1))});
    }
    default: {
        std::string v = "y" + std::to_string(depth);
        std::vector<std::string> inner = free;
        inner.push_back(v);
        if (inner.size() > 3) inner.erase(inner.begin());
        return f_exists(v, random_gnf(rng, sig, inner, depth - 1));
    }
    }
}

FormulaPtr random_gfo_sentence(Rng& rng, const Signature& sig, int depth)
{
    std::function<FormulaPtr(const std::vector<std::string>&, int)> gen = [&](const std::vector<std::string>& free,
                                                                               int d) -> FormulaPtr {
        if (free.empty()) {
            auto a = f_atom(*covering_atom(rng, sig, {"q"}, {"q"}));
            if (d <= 0) return f_exists("q", a);
            auto body = gen({"q"}, d - 1);
            return uniform(rng, 0, 1) ? f_exists("q", f_and({a, body})) : f_forall("q", f_implies(a, body));
        }
        int choice = d <= 0 ? 0 : uniform(rng, 0, 3);
        switch (choice) {
        case 0:
            return f_atom(random_atom(rng, sig, free));
        case 1:
            return f_not(gen(free, d - 1));
        case 2:
            return uniform(rng, 0, 1) ? f_and({gen(free, d - 1), gen(free, d - 1)})
                                      : f_or({gen(free, d - 1), gen(free, d - 1)});
        default: {
            // Guarded quantification over a new variable together with one old one.
            std::string v = "g" + std::to_string(d);
            std::vector<std::string> keep{free[uniform(rng, 0, static_cast<int>(free.size()) - 1)], v};
            auto g = covering_atom(rng, sig, keep, keep);
            if (!g) return f_atom(random_atom(rng, sig, free));
            auto a = f_atom(*g);
            auto body = gen(keep, d - 1);
            return uniform(rng, 0, 1) ? f_exists(v, f_and({a, body})) : f_forall(v, f_implies(a, body));
        }
        }
    };
    return gen({}, depth);
}

FormulaPtr random_fo(Rng& rng, const Signature& sig, const std::vector<std::string>& free, int depth)
{
    std::vector<std::string> pool = free;
    if (pool.empty()) pool.push_back("c0");
    int choice = depth <= 0 ? uniform(rng, 0, 1) : uniform(rng, 0, 6);
    switch (choice) {
    case 0:
        if (free.empty()) return f_exists("c0", f_atom(random_atom(rng, sig, pool)));
        return f_atom(random_atom(rng, sig, pool));
    case 1:
        if (free.empty()) return f_true();
        return f_eq(Term::var(pool[uniform(rng, 0, static_cast<int>(pool.size()) - 1)]),
                    Term::var(pool[uniform(rng, 0, static_cast<int>(pool.size()) - 1)]));
    case 2:
        return f_not(random_fo(rng, sig, free, depth - 1));
    case 3:
        return f_and({random_fo(rng, sig, free, depth - 1), random_fo(rng, sig, free, depth - 1)});
    case 4:
        return f_or({random_fo(rng, sig, free, depth - 1), random_fo(rng, sig, free, depth - 1)});
    default: {
        std::string v = "v" + std::to_string(depth);
        std::vector<std::string> inner = free;
        if (std::find(inner.begin(), inner.end(), v) == inner.end()) inner.push_back(v);
        auto body = random_fo(rng, sig, inner, depth - 1);
        return choice == 5 ? f_exists(v, body) : f_forall(v, body);
    }
    }
}

std::set<Tuple> naive_eval_cq(const ConjunctiveQuery& q, const Instance& I)
{
    std::set<Value> dom = active_domain(I);
    for (const Value& v : I.constant_values()) dom.insert(v);
    std::vector<Value> values(dom.begin(), dom.end());
    auto vars = vars_of(q.atoms);
    for (const auto& v : q.free_vars)
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    std::set<Tuple> out;
    std::vector<std::size_t> idx(vars.size(), 0);
    if (values.empty() && !vars.empty()) return out;
    while (true) {
        std::map<std::string, Value> b;
        for (std::size_t i = 0; i < vars.size(); ++i) b[vars[i]] = values[idx[i]];
        bool ok = true;
        for (const Atom& a : q.atoms)
            if (!I.contains(ground(a, b, &I))) {
                ok = false;
                break;
            }
        if (ok) {
            Tuple t;
            for (const auto& v : q.free_vars) t.push_back(b.at(v));
            out.insert(t);
        }
        std::size_t p = 0;
        while (p < idx.size() && ++idx[p] == values.size()) idx[p++] = 0;
        if (p == idx.size()) break;
    }
    return out;
}

namespace {

Value term_value(const Term& t, const Instance& I, const std::map<std::string, Value>& b)
{
    if (t.is_var()) return b.at(t.name);
    return I.constant_value(t.name);
}

}  // namespace

bool naive_eval_fo(const FormulaPtr& f, const Instance& I, const std::set<Value>& domain,
                   std::map<std::string, Value> binding)
{
    switch (f->kind) {
    case FormulaKind::atom: {
        Fact fact{f->atom.relation, {}};
        for (const Term& t : f->atom.args) fact.args.push_back(term_value(t, I, binding));
        return I.contains(fact);
    }
    case FormulaKind::equality:
        return term_value(f->lhs, I, binding) == term_value(f->rhs, I, binding);
    case FormulaKind::neg:
        return !naive_eval_fo(f->kids[0], I, domain, binding);
    case FormulaKind::conj:
        for (const auto& k : f->kids)
            if (!naive_eval_fo(k, I, domain, binding)) return false;
        return true;
    case FormulaKind::disj:
        for (const auto& k : f->kids)
            if (naive_eval_fo(k, I, domain, binding)) return true;
        return false;
    case FormulaKind::exists:
    case FormulaKind::forall: {
        bool ex = f->kind == FormulaKind::exists;
        for (const Value& v : domain) {
            binding[f->var] = v;
            bool r = naive_eval_fo(f->kids[0], I, domain, binding);
            if (ex && r) return true;
            if (!ex && !r) return false;
        }
        return !ex;
    }
    }
    return false;
}

std::set<Tuple> naive_datalog(const DatalogProgram& P, const Instance& I)
{
    Instance cur = I;
    while (true) {
        std::vector<Fact> fresh;
        for (const DatalogRule& r : P.rules) {
            auto vs = vars_of(r.body);
            ConjunctiveQuery q = ConjunctiveQuery::make(vs, r.body);
            for (const Tuple& t : naive_eval_cq(q, cur)) {
                std::map<std::string, Value> b;
                for (std::size_t i = 0; i < vs.size(); ++i) b[vs[i]] = t[i];
                Fact h = ground(r.head, b, &cur);
                if (!cur.contains(h)) fresh.push_back(h);
            }
        }
        if (fresh.empty()) break;
        for (const Fact& f : fresh) cur.add(f);
    }
    std::set<Tuple> out;
    bool boolean = P.goal_is_boolean();
    for (const Fact& f : cur.facts)
        if (f.relation == P.goal) out.insert(boolean ? Tuple{} : f.args);
    return out;
}

bool exhaustive_homomorphism_exists(const Instance& S, const Instance& T, const std::map<Value, Value>& seed)
{
    std::set<Value> sdom = active_domain(S);
    for (const Value& v : S.constant_values()) sdom.insert(v);
    std::set<Value> tdom = active_domain(T);
    for (const Value& v : T.constant_values()) tdom.insert(v);
    std::vector<Value> src(sdom.begin(), sdom.end()), dst(tdom.begin(), tdom.end());
    if (dst.empty()) return src.empty();
    std::vector<std::size_t> idx(src.size(), 0);
    while (true) {
        Homomorphism h;
        for (std::size_t i = 0; i < src.size(); ++i) h.mapping[src[i]] = dst[idx[i]];
        bool ok = true;
        for (const auto& [x, y] : seed)
            if (h.mapping.count(x) && !(h.mapping[x] == y)) ok = false;
        if (ok && verify_homomorphism(S, T, h)) return true;
        std::size_t p = 0;
        while (p < idx.size() && ++idx[p] == dst.size()) idx[p++] = 0;
        if (p == idx.size()) break;
    }
    return false;
}

Value el(const std::string& n) { return Value::element(n); }
Instance instance(const std::string& text) { return parse_instance(text); }
ConjunctiveQuery query(const std::string& text) { return parse_query(text).query; }
Tgd tgd(const std::string& text) { return parse_theory("tgd " + text + ".").tgds.at(0); }
std::vector<Tgd> theory(const std::string& text) { return parse_theory(text).tgds; }
FormulaPtr formula(const std::string& text) { return parse_formula(text); }

std::set<Tuple> unary(const std::vector<std::string>& names)
{
    std::set<Tuple> out;
    for (const auto& n : names) out.insert({el(n)});
    return out;
}

std::vector<Tgd> sigma_ex()
{
    return theory("tgd R(x,y), U(y) -> U(x). tgd U(x) -> exists z: S(x,z). tgd S(x,y) -> T(x).");
}

Instance i_ex() { return instance("R(a,b). U(b)."); }

ConjunctiveQuery q_tri(const std::string& rel)
{
    return query("Q() :- " + rel + "(x,y), " + rel + "(y,z), " + rel + "(z,x).");
}

}  // namespace support
