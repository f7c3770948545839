#include "gnfo/rewrite/rewrite.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <thread>

#include "gnfo/io/text.hpp"

namespace gnfo {

std::string to_string(Completeness c) { return c == Completeness::complete_within_caps ? "complete_within_caps" : "capped"; }

namespace {

// Restricted growth strings: block index per element.
std::vector<std::vector<int>> set_partitions(int n)
{
    std::vector<std::vector<int>> out;
    std::vector<int> rgs(n, 0);
    std::function<void(int, int)> rec = [&](int i, int blocks) {
        if (i == n) {
            out.push_back(rgs);
            return;
        }
        for (int b = 0; b <= blocks; ++b) {
            rgs[i] = b;
            rec(i + 1, std::max(blocks, b + 1));
        }
    };
    rec(0, 0);
    return out;
}

std::string fnv_hex(const std::string& s)
{
    std::uint32_t h = 2166136261u;
    for (unsigned char c : s) {
        h ^= c;
        h *= 16777619u;
    }
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", h);
    return buf;
}

std::string copy_name(const std::string& r) { return r + "'"; }

std::string var_name(int i) { return "v" + std::to_string(i); }

void require_constant_free(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q)
{
    for (const Tgd& t : sigma)
        if (!constants_of(t.body).empty() || !constants_of(t.head).empty())
            throw PreconditionError("rewriting needs constant-free rules: " + to_string(t));
    if (!constants_of(q.atoms).empty()) throw PreconditionError("rewriting needs a constant-free query");
}

int max_body_atoms(const std::vector<Tgd>& sigma)
{
    std::size_t m = 0;
    for (const Tgd& t : sigma) m = std::max(m, t.body.size());
    return static_cast<int>(m);
}

struct BodyChase {
    std::vector<Atom> body;
    Instance result;
    bool terminated = false;
};

BodyChase chase_body(const std::vector<Tgd>& sigma, const std::vector<Atom>& body, const ChaseConfig& cfg)
{
    Instance A;
    std::map<std::string, Value> frozen;
    for (const auto& v : vars_of(body)) frozen[v] = Value::element(v);
    for (const Atom& a : body) A.add(ground(a, frozen));
    ChaseResult r = chase(A, sigma, cfg);
    return {body, std::move(r.result), r.status == ChaseStatus::terminated};
}

std::vector<BodyChase> chase_all(const std::vector<Tgd>& sigma, const std::vector<std::vector<Atom>>& bodies,
                                 const ChaseConfig& cfg, int jobs)
{
    std::vector<BodyChase> out(bodies.size());
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < bodies.size(); i += step) out[i] = chase_body(sigma, bodies[i], cfg);
    };
    std::size_t n = static_cast<std::size_t>(std::max(1, jobs));
    if (n == 1 || bodies.size() < 2) {
        work(0, 1);
        return out;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work, t, n);
    for (auto& th : pool) th.join();
    return out;
}

// Facts whose values are frozen variables or constants, read back as atoms.
std::vector<Atom> frozen_atoms(const Instance& I)
{
    std::vector<Atom> out;
    for (const Fact& f : I.facts) {
        Atom a{f.relation, {}};
        bool ok = true;
        for (const Value& v : f.args) {
            if (v.kind == ValueKind::element) a.args.push_back(Term::var(v.name));
            else if (v.kind == ValueKind::constant) a.args.push_back(Term::cst(v.name));
            else {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(std::move(a));
    }
    return out;
}

std::vector<Atom> sorted(std::vector<Atom> atoms)
{
    std::sort(atoms.begin(), atoms.end());
    return atoms;
}

// Renames variables to v0, v1, ... in order of their index, keeping order.
std::pair<std::vector<Atom>, std::map<std::string, Term>> compact(const std::vector<Atom>& atoms)
{
    auto vs = var_set(atoms);
    std::vector<std::string> order(vs.begin(), vs.end());
    std::sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    std::map<std::string, Term> theta;
    for (std::size_t i = 0; i < order.size(); ++i) theta[order[i]] = Term::var(var_name(static_cast<int>(i)));
    return {substitute(atoms, theta), theta};
}

// Number of head atoms over the body variables not already in the body.
long head_universe(const Signature& sig, const std::vector<Atom>& body)
{
    long nv = static_cast<long>(var_set(body).size()), total = 0;
    for (const auto& [rel, arity] : sig.relations) {
        long n = 1;
        for (int i = 0; i < arity; ++i) n *= nv;
        total += n;
    }
    for (const Atom& a : body)
        if (sig.has_relation(a.relation)) --total;
    return total;
}

struct Candidate {
    std::vector<Atom> body;
    Atom head;
};

// Certified candidates: heads read off one chase per body, dropping heads in
// the body and heads already derived by a body with one atom fewer.
struct Certifier {
    const std::vector<Tgd>& sigma;
    const RewriteConfig& cfg;
    RewriteArtifacts* art;

    std::vector<Candidate> run(const std::vector<std::vector<Atom>>& bodies,
                               const std::function<std::vector<Atom>(const BodyChase&)>& heads_of,
                               const std::function<long(const std::vector<Atom>&)>& universe)
    {
        std::vector<std::vector<Atom>> use = bodies;
        if (static_cast<long>(use.size()) > cfg.max_bodies) {
            use.resize(static_cast<std::size_t>(cfg.max_bodies));
            if (art) art->completeness = Completeness::capped;
        }
        auto chased = chase_all(sigma, use, cfg.chase, cfg.jobs);
        std::map<std::vector<Atom>, std::set<Atom>> derived;
        std::vector<std::vector<Atom>> heads(chased.size());
        for (std::size_t i = 0; i < chased.size(); ++i) {
            heads[i] = heads_of(chased[i]);
            derived[sorted(chased[i].body)] = std::set<Atom>(heads[i].begin(), heads[i].end());
        }
        std::vector<Candidate> out;
        for (std::size_t i = 0; i < chased.size(); ++i) {
            const auto& body = chased[i].body;
            if (art) {
                ++art->bodies;
                if (!chased[i].terminated) {
                    ++art->unknown;
                    art->completeness = Completeness::capped;
                    art->log.push_back({to_string(body) + " -> ?", Verdict::unknown});
                }
            }
            for (const Atom& h : heads[i]) {
                if (std::find(body.begin(), body.end(), h) != body.end()) continue;
                bool pruned = false;
                for (std::size_t j = 0; j < body.size() && !pruned; ++j) {
                    std::vector<Atom> sub = body;
                    sub.erase(sub.begin() + static_cast<long>(j));
                    if (sub.empty()) continue;
                    auto it = derived.find(sorted(sub));
                    if (it != derived.end()) {
                        pruned = it->second.count(h) > 0;
                        continue;
                    }
                    auto [csub, theta] = compact(sub);
                    auto hv = atom_vars(h);
                    if (!std::all_of(hv.begin(), hv.end(), [&](const std::string& v) { return theta.count(v) > 0; }))
                        continue;
                    it = derived.find(sorted(csub));
                    if (it != derived.end()) pruned = it->second.count(substitute(h, theta)) > 0;
                }
                if (pruned) continue;
                out.push_back({body, h});
                if (art) {
                    ++art->entailed;
                    art->log.push_back({to_string(body) + " -> " + to_string(h), Verdict::yes});
                }
            }
            if (art && chased[i].terminated) {
                long fresh = 0;
                for (const Atom& h : heads[i])
                    if (std::find(body.begin(), body.end(), h) == body.end()) ++fresh;
                art->rejected += std::max(0L, universe(body) - fresh);
            }
        }
        return out;
    }
};

std::vector<std::vector<int>> placements(int vars, int arity)
{
    std::vector<std::vector<int>> out;
    std::vector<int> idx(arity, 0);
    while (true) {
        std::vector<char> seen(vars, 0);
        for (int i : idx)
            if (i < vars) seen[i] = 1;
        if (std::all_of(seen.begin(), seen.end(), [](char c) { return c; })) out.push_back(idx);
        int p = arity - 1;
        while (p >= 0 && ++idx[p] == vars + 1) idx[p--] = 0;
        if (p < 0) break;
    }
    return out;
}

// Variants of `rule` whose bodies carry an EDB atom holding `guard` (after
// identifying guard variables in every possible way).
std::vector<DatalogRule> edb_guard_completion(const DatalogRule& rule, const std::vector<std::string>& guard,
                                              const Signature& edb)
{
    if (guard.size() <= 1) return {rule};
    std::vector<DatalogRule> out;
    for (const auto& part : set_partitions(static_cast<int>(guard.size()))) {
        std::map<std::string, Term> theta;
        std::vector<std::string> reps;
        for (std::size_t i = 0; i < guard.size(); ++i) {
            if (part[i] == static_cast<int>(reps.size())) reps.push_back(guard[i]);
            theta[guard[i]] = Term::var(reps[part[i]]);
        }
        DatalogRule q{substitute(rule.head, theta), substitute(rule.body, theta)};
        if (reps.size() <= 1) {
            out.push_back(q);
            continue;
        }
        for (const auto& [rel, arity] : edb.relations) {
            if (arity < static_cast<int>(reps.size())) continue;
            for (const auto& place : placements(static_cast<int>(reps.size()), arity)) {
                Atom g{rel, {}};
                for (int p = 0; p < arity; ++p)
                    g.args.push_back(place[p] < static_cast<int>(reps.size()) ? Term::var(reps[place[p]])
                                                                             : Term::var("_f" + std::to_string(p)));
                DatalogRule r = q;
                if (std::find(r.body.begin(), r.body.end(), g) == r.body.end()) r.body.push_back(g);
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

Atom transcribe(const Atom& a, const Signature& original)
{
    Atom b = a;
    if (original.has_relation(a.relation)) b.relation = copy_name(a.relation);
    return b;
}

DatalogRule transcribe(const std::vector<Atom>& body, const Atom& head, const Signature& original)
{
    DatalogRule r{transcribe(head, original), {}};
    for (const Atom& a : body) r.body.push_back(transcribe(a, original));
    return r;
}

std::string fresh_goal(const Signature& sig)
{
    std::string g = "Goal";
    while (sig.has_relation(g)) g += "_";
    return g;
}

Atom goal_atom(const std::string& goal, const std::vector<std::string>& vars)
{
    if (vars.empty()) return Atom{goal, {Term::cst(kTopConstant)}};
    return make_atom(goal, vars);
}

// Collects rules into the program, deduplicated and sorted.
void finish_program(DatalogProgram& P, std::vector<DatalogRule> rules)
{
    std::map<std::string, DatalogRule> uniq;
    for (auto& r : rules) uniq.emplace(to_string(r), std::move(r));
    P.rules.clear();
    for (auto& [s, r] : uniq) P.rules.push_back(std::move(r));
    for (const DatalogRule& r : P.rules) P.idb.add_relation(r.head.relation, static_cast<int>(r.head.args.size()));
    if (!P.idb.has_relation(P.goal)) P.idb.add_relation(P.goal, 1);
}

std::vector<DatalogRule> import_rules(const Signature& original)
{
    std::vector<DatalogRule> out;
    for (const auto& [rel, arity] : original.relations) {
        std::vector<std::string> xs;
        for (int i = 0; i < arity; ++i) xs.push_back("x" + std::to_string(i));
        out.push_back({make_atom(copy_name(rel), xs), {make_atom(rel, xs)}});
    }
    return out;
}

std::vector<std::string> vars_in(const std::vector<Atom>& atoms)
{
    auto v = vars_of(atoms);
    return v;
}

// Reduces the body to its core with the head variables fixed.
Tgd cored(const std::vector<Atom>& body, const Atom& head)
{
    auto hv = atom_vars(head);
    ConjunctiveQuery q = core_cq(ConjunctiveQuery::make(hv, body));
    return Tgd{q.atoms, {head}};
}

std::vector<Tgd> dedupe_rules(const std::vector<Candidate>& cands)
{
    std::map<std::string, Tgd> uniq;
    for (const Candidate& c : cands) {
        Tgd t = cored(c.body, c.head);
        uniq.emplace(canonical_key(t), t);
    }
    std::vector<Tgd> out;
    for (auto& [k, t] : uniq) out.push_back(std::move(t));
    return out;
}

Signature query_signature(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q)
{
    Signature sig = signature_of(sigma);
    declare_atoms(sig, q.atoms);
    return sig;
}

}  // namespace

std::vector<std::vector<Atom>> enumerate_guarded_bodies(const Signature& sig, int max_atoms)
{
    if (max_atoms < 1) throw PreconditionError("max_atoms must be positive");
    std::vector<std::vector<Atom>> out;
    for (const auto& [grel, garity] : sig.relations) {
        for (const auto& part : set_partitions(garity)) {
            Atom guard{grel, {}};
            int nvars = 0;
            for (int b : part) {
                guard.args.push_back(Term::var(var_name(b)));
                nvars = std::max(nvars, b + 1);
            }
            std::vector<Atom> sides;
            for (const auto& [rel, arity] : sig.relations) {
                std::vector<int> idx(arity, 0);
                while (true) {
                    Atom a{rel, {}};
                    for (int i : idx) a.args.push_back(Term::var(var_name(i)));
                    if (!(a == guard)) sides.push_back(std::move(a));
                    int p = arity - 1;
                    while (p >= 0 && ++idx[p] == nvars) idx[p--] = 0;
                    if (p < 0) break;
                }
            }
            std::vector<Atom> body{guard};
            std::function<void(std::size_t)> rec = [&](std::size_t from) {
                out.push_back(body);
                if (static_cast<int>(body.size()) == max_atoms) return;
                for (std::size_t i = from; i < sides.size(); ++i) {
                    body.push_back(sides[i]);
                    rec(i + 1);
                    body.pop_back();
                }
            };
            rec(0);
        }
    }
    return out;
}

std::vector<Tgd> enumerate_full_guarded_candidates(const Signature& sig, const std::optional<std::string>& head_rel,
                                                   int max_atoms)
{
    std::map<std::string, Tgd> uniq;
    for (const auto& body : enumerate_guarded_bodies(sig, max_atoms)) {
        int nvars = static_cast<int>(var_set(body).size());
        for (const auto& [rel, arity] : sig.relations) {
            if (head_rel && rel != *head_rel) continue;
            std::vector<int> idx(arity, 0);
            while (true) {
                Atom h{rel, {}};
                for (int i : idx) h.args.push_back(Term::var(var_name(i)));
                if (std::find(body.begin(), body.end(), h) == body.end()) {
                    Tgd t = cored(body, h);
                    if (std::find(t.body.begin(), t.body.end(), h) == t.body.end())
                        uniq.emplace(canonical_key(t), t);
                }
                int p = arity - 1;
                while (p >= 0 && ++idx[p] == nvars) idx[p--] = 0;
                if (p < 0) break;
            }
        }
    }
    std::vector<Tgd> out;
    for (auto& [k, t] : uniq) out.push_back(std::move(t));
    return out;
}

namespace {

std::vector<Candidate> derive_candidates(const std::vector<Tgd>& sigma, const Signature& sig,
                                         const std::vector<ConjunctiveQuery>& family, const RewriteConfig& cfg,
                                         int max_atoms, RewriteArtifacts* art)
{
    Certifier cert{sigma, cfg, art};
    auto heads_of = [&](const BodyChase& bc) {
        std::vector<Atom> heads;
        for (Atom& a : frozen_atoms(bc.result))
            if (sig.has_relation(a.relation)) heads.push_back(std::move(a));
        for (const ConjunctiveQuery& q : family) {
            std::string name = query_predicate_name(q);
            for (const Tuple& t : eval_cq(q, bc.result)) {
                if (!std::all_of(t.begin(), t.end(), [](const Value& v) { return v.kind == ValueKind::element; }))
                    continue;
                Atom h{name, {}};
                for (const Value& v : t) h.args.push_back(Term::var(v.name));
                if (t.empty()) h.args.push_back(Term::cst(kTopConstant));
                heads.push_back(std::move(h));
            }
        }
        return heads;
    };
    std::vector<std::vector<Atom>> bodies;
    for (auto& b : enumerate_guarded_bodies(sig, max_atoms)) bodies.push_back(std::move(b));
    Signature heads_sig = sig;
    for (const ConjunctiveQuery& q : family)
        heads_sig.add_relation(query_predicate_name(q), std::max<int>(1, static_cast<int>(q.free_vars.size())));
    auto universe = [&](const std::vector<Atom>& body) { return head_universe(heads_sig, body); };
    return cert.run(bodies, heads_of, universe);
}

}  // namespace

std::vector<Tgd> derive_full_guarded(const std::vector<Tgd>& sigma, const RewriteConfig& cfg,
                                     RewriteArtifacts* artifacts)
{
    if (!all_guarded(sigma)) throw PreconditionError("derive_full_guarded needs guarded rules");
    Signature sig = signature_of(sigma);
    int max_atoms = std::max(cfg.max_atoms, max_body_atoms(sigma));
    return dedupe_rules(derive_candidates(sigma, sig, {}, cfg, max_atoms, artifacts));
}

std::string query_predicate_name(const ConjunctiveQuery& q) { return "Rq_" + fnv_hex(serialize(canonical_form(q))); }

std::vector<DatalogRule> query_generation_rules(const std::vector<Tgd>& sigma,
                                                const std::vector<ConjunctiveQuery>& family,
                                                const RewriteConfig& cfg, RewriteArtifacts* artifacts)
{
    if (!all_guarded(sigma)) throw PreconditionError("query generation needs guarded rules");
    Signature sig = signature_of(sigma);
    for (const auto& q : family) declare_atoms(sig, q.atoms);
    int max_atoms = std::max(cfg.max_atoms, max_body_atoms(sigma));
    std::set<std::string> names;
    for (const auto& q : family) names.insert(query_predicate_name(q));
    std::vector<DatalogRule> out;
    for (const Candidate& c : derive_candidates(sigma, sig, family, cfg, max_atoms, artifacts)) {
        if (!names.count(c.head.relation)) continue;
        Tgd t = cored(c.body, c.head);
        out.push_back({t.head.front(), t.body});
    }
    return out;
}

namespace {

struct Decomposition {
    std::vector<ConjunctiveQuery> pieces;    // canonical forms
    std::vector<std::vector<std::string>> args;  // R_q arguments per piece
    std::vector<std::string> head;           // Goal arguments
    std::vector<Atom> quotient;
};

std::vector<Decomposition> decompositions(const ConjunctiveQuery& q)
{
    std::vector<Decomposition> out;
    auto vars = vars_of(q.atoms);
    for (const auto& part : set_partitions(static_cast<int>(vars.size()))) {
        std::map<std::string, Term> theta;
        std::vector<std::string> reps;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (part[i] == static_cast<int>(reps.size())) reps.push_back(vars[i]);
            theta[vars[i]] = Term::var(reps[part[i]]);
        }
        auto atoms = substitute(q.atoms, theta);
        std::vector<std::string> head;
        std::set<std::string> free_set;
        for (const auto& v : q.free_vars) {
            head.push_back(theta.at(v).name);
            free_set.insert(head.back());
        }
        for (const auto& groups : set_partitions(static_cast<int>(atoms.size()))) {
            int ng = groups.empty() ? 0 : *std::max_element(groups.begin(), groups.end()) + 1;
            std::vector<std::vector<Atom>> parts(ng);
            for (std::size_t i = 0; i < atoms.size(); ++i) parts[groups[i]].push_back(atoms[i]);
            Decomposition d;
            d.head = head;
            d.quotient = atoms;
            for (int g = 0; g < ng; ++g) {
                std::set<std::string> elsewhere;
                for (int h = 0; h < ng; ++h)
                    if (h != g)
                        for (const auto& v : var_set(parts[h])) elsewhere.insert(v);
                std::vector<std::string> fv;
                for (const auto& v : vars_of(parts[g]))
                    if (elsewhere.count(v) || free_set.count(v)) fv.push_back(v);
                d.pieces.push_back(canonical_form(ConjunctiveQuery::make(fv, parts[g])));
                d.args.push_back(fv);
            }
            out.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace

std::vector<ConjunctiveQuery> query_family(const ConjunctiveQuery& q)
{
    std::map<std::string, ConjunctiveQuery> uniq;
    for (const auto& d : decompositions(q))
        for (const auto& p : d.pieces) uniq.emplace(serialize(p), p);
    std::vector<ConjunctiveQuery> out;
    for (auto& [k, p] : uniq) out.push_back(std::move(p));
    return out;
}

std::vector<DatalogRule> goal_rules(const ConjunctiveQuery& q, int k, const std::string& goal)
{
    auto [canon, answer] = canon_inst(q);
    std::map<std::string, DatalogRule> uniq;
    for (const auto& d : decompositions(q)) {
        DatalogRule r{goal_atom(goal, d.head), {}};
        for (std::size_t i = 0; i < d.pieces.size(); ++i) {
            Atom a{query_predicate_name(d.pieces[i]), {}};
            for (const auto& v : d.args[i]) a.args.push_back(Term::var(v));
            if (d.args[i].empty()) a.args.push_back(Term::cst(kTopConstant));
            if (std::find(r.body.begin(), r.body.end(), a) == r.body.end()) r.body.push_back(std::move(a));
        }
        if (static_cast<int>(var_set(r.body).size()) > k) continue;
        // Certify: the pieces together entail q at the head tuple.
        Instance target;
        std::map<std::string, Value> frozen;
        for (const auto& v : vars_of(d.quotient)) frozen[v] = Value::element(v);
        for (const Atom& a : d.quotient) target.add(ground(a, frozen));
        std::map<Value, Value> seed;
        bool consistent = true;
        for (std::size_t i = 0; i < q.free_vars.size(); ++i) {
            auto [it, fresh] = seed.emplace(answer[i], frozen.at(d.head[i]));
            if (!fresh && !(it->second == frozen.at(d.head[i]))) consistent = false;
        }
        if (!consistent || !find_homomorphism(canon, target, seed)) continue;
        uniq.emplace(to_string(r), r);
    }
    std::vector<DatalogRule> out;
    for (auto& [s, r] : uniq) out.push_back(std::move(r));
    return out;
}

RewriteArtifacts rewrite_atomic_guarded(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q,
                                        const RewriteConfig& cfg)
{
    if (!all_guarded(sigma)) throw PreconditionError("atomic rewriting needs guarded rules");
    if (q.atoms.size() != 1) throw PreconditionError("atomic rewriting needs a single-atom query");
    require_constant_free(sigma, q);
    Signature sig = query_signature(sigma, q);
    RewriteArtifacts art;
    art.max_atoms = std::max(cfg.max_atoms, max_body_atoms(sigma));
    art.max_vars = 0;
    auto cands = derive_candidates(sigma, sig, {}, cfg, art.max_atoms, &art);
    DatalogProgram& P = art.program;
    P.edb = sig;
    P.goal = fresh_goal(sig);
    std::vector<DatalogRule> rules;
    for (const Tgd& t : dedupe_rules(cands)) {
        DatalogRule r = transcribe(t.body, t.head.front(), sig);
        for (auto& v : edb_guard_completion(r, vars_in(t.body), sig)) rules.push_back(std::move(v));
    }
    for (auto& r : import_rules(sig)) rules.push_back(std::move(r));
    DatalogRule g{goal_atom(P.goal, q.free_vars), {transcribe(q.atoms.front(), sig)}};
    for (auto& v : edb_guard_completion(g, vars_in(q.atoms), sig)) rules.push_back(std::move(v));
    finish_program(P, std::move(rules));
    P.validate();
    return art;
}

RewriteArtifacts rewrite_cq_guarded(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q,
                                    const RewriteConfig& cfg)
{
    if (!all_guarded(sigma)) throw PreconditionError("cq rewriting needs guarded rules");
    require_constant_free(sigma, q);
    q.validate();
    Signature sig = query_signature(sigma, q);
    RewriteArtifacts art;
    int k = 0;
    for (const Tgd& t : sigma) k = std::max(k, static_cast<int>(t.body_vars().size()));
    k = std::max(k, static_cast<int>(vars_of(q.atoms).size()));
    if (cfg.max_vars > 0) k = cfg.max_vars;
    art.max_vars = k;
    art.max_atoms = std::max(cfg.max_atoms, max_body_atoms(sigma));
    std::vector<ConjunctiveQuery> family;
    for (const auto& p : query_family(q))
        if (static_cast<int>(vars_of(p.atoms).size()) <= k) family.push_back(p);
    for (const auto& p : family) art.query_predicates.emplace_back(query_predicate_name(p), p);

    DatalogProgram& P = art.program;
    P.edb = sig;
    P.goal = fresh_goal(sig);
    std::vector<DatalogRule> rules;
    auto cands = derive_candidates(sigma, sig, family, cfg, art.max_atoms, &art);
    for (const Tgd& t : dedupe_rules(cands)) {
        DatalogRule r = transcribe(t.body, t.head.front(), sig);
        for (auto& v : edb_guard_completion(r, vars_in(t.body), sig)) rules.push_back(std::move(v));
    }
    for (auto& r : import_rules(sig)) rules.push_back(std::move(r));
    for (auto& r : goal_rules(q, k, P.goal)) rules.push_back(std::move(r));
    finish_program(P, std::move(rules));
    P.validate();
    return art;
}

std::string guard_extension_name(const std::string& rel, const std::vector<int>& positions)
{
    std::string s = rel + "_";
    if (positions.empty()) return s + "0";
    for (int p : positions) s += std::to_string(p);
    return s;
}

std::pair<Signature, std::vector<Tgd>> guard_extension_axioms(const Signature& sig)
{
    Signature ext = sig;
    std::vector<Tgd> axioms;
    for (const auto& [rel, arity] : sig.relations) {
        std::vector<std::string> xs;
        for (int i = 1; i <= arity; ++i) xs.push_back("x" + std::to_string(i));
        for (unsigned mask = 0; mask < (1u << arity); ++mask) {
            std::vector<int> pos;
            std::vector<std::string> proj;
            for (int i = 0; i < arity; ++i)
                if (mask >> i & 1) {
                    pos.push_back(i + 1);
                    proj.push_back(xs[i]);
                }
            std::string name = guard_extension_name(rel, pos);
            Atom small = goal_atom(name, proj);
            ext.add_relation(name, std::max<int>(1, static_cast<int>(proj.size())));
            axioms.push_back({{make_atom(rel, xs)}, {small}});
            axioms.push_back({{small}, {make_atom(rel, xs)}});
        }
    }
    return {ext, axioms};
}

namespace {

// Answer-guarded pieces of rule bodies; interface variables are free.
std::vector<ConjunctiveQuery> body_pieces(const std::vector<Tgd>& rules, int k)
{
    std::map<std::string, ConjunctiveQuery> uniq;
    for (const Tgd& t : rules) {
        auto head_vars = var_set(t.head);
        std::size_t n = t.body.size();
        if (n > 12) continue;
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::vector<Atom> in, out;
            for (std::size_t i = 0; i < n; ++i) (mask >> i & 1 ? in : out).push_back(t.body[i]);
            auto outside = var_set(out);
            std::vector<std::string> fv;
            for (const auto& v : vars_of(in))
                if (outside.count(v) || head_vars.count(v)) fv.push_back(v);
            ConjunctiveQuery q = core_cq(ConjunctiveQuery::make(fv, in));
            if (static_cast<int>(vars_of(q.atoms).size()) > k || !is_answer_guarded(q)) continue;
            if (q.atoms.size() == 1 && q.exist_vars.empty()) {
                auto av = atom_vars(q.atoms[0]);
                if (av.size() == q.atoms[0].args.size()) continue;  // same as the relation itself
            }
            q = canonical_form(q);
            uniq.emplace(serialize(q), q);
        }
    }
    std::vector<ConjunctiveQuery> out;
    for (auto& [s, q] : uniq) out.push_back(std::move(q));
    return out;
}

}  // namespace

RewriteArtifacts rewrite_fg(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q, const RewriteConfig& cfg)
{
    if (!all_frontier_guarded(sigma)) throw PreconditionError("fg rewriting needs frontier-guarded rules");
    if (!is_answer_guarded(q)) throw PreconditionError("fg rewriting needs an answer-guarded query");
    require_constant_free(sigma, q);
    q.validate();
    Signature sig = query_signature(sigma, q);
    RewriteArtifacts art;
    DatalogProgram& P = art.program;
    P.edb = sig;
    P.goal = fresh_goal(sig);

    Tgd answer_rule{q.atoms, {goal_atom(P.goal, q.free_vars)}};
    std::vector<Tgd> rules = sigma;
    rules.push_back(answer_rule);
    int k = 0;
    for (const Tgd& t : rules) k = std::max(k, static_cast<int>(var_set(t.body).size() + t.existentials().size()));
    if (cfg.max_vars > 0) k = cfg.max_vars;
    art.max_vars = k;
    art.max_atoms = std::max(cfg.max_atoms, max_body_atoms(rules));

    // Extended theory: guard extensions over proper non-empty position sets
    // and query extension predicates with both directions.
    std::vector<Tgd> ext_theory = rules;
    Signature ext;
    auto [ge_sig, ge_axioms] = guard_extension_axioms(sig);
    std::set<std::string> skip;
    for (const auto& [rel, arity] : sig.relations) {
        std::vector<int> all;
        for (int i = 1; i <= arity; ++i) all.push_back(i);
        skip.insert(guard_extension_name(rel, {}));
        skip.insert(guard_extension_name(rel, all));
    }
    for (const auto& [rel, arity] : ge_sig.relations)
        if (!skip.count(rel)) ext.add_relation(rel, arity);
    for (const Tgd& ax : ge_axioms) {
        bool used = true;
        for (const Atom& a : ax.body) used &= !skip.count(a.relation);
        for (const Atom& a : ax.head) used &= !skip.count(a.relation);
        if (used) ext_theory.push_back(ax);
    }
    for (const ConjunctiveQuery& piece : body_pieces(rules, k)) {
        std::string name = query_predicate_name(piece);
        art.query_predicates.emplace_back(name, piece);
        Atom rq = goal_atom(name, piece.free_vars);
        ext.add_relation(name, static_cast<int>(rq.args.size()));
        ext_theory.push_back({piece.atoms, {rq}});
        ext_theory.push_back({{rq}, piece.atoms});
    }

    // Candidate bodies: up to max_atoms atoms over k variables.
    std::vector<Atom> pool;
    for (const auto& [rel, arity] : ext.relations) {
        if (rel.rfind("Rq_", 0) == 0) {
            auto it = std::find_if(art.query_predicates.begin(), art.query_predicates.end(),
                                   [&](const auto& p) { return p.first == rel; });
            if (it->second.free_vars.empty()) {
                pool.push_back(goal_atom(rel, {}));
                continue;
            }
        }
        std::vector<int> idx(arity, 0);
        while (true) {
            Atom a{rel, {}};
            for (int i : idx) a.args.push_back(Term::var(var_name(i)));
            pool.push_back(std::move(a));
            int p = arity - 1;
            while (p >= 0 && ++idx[p] == k) idx[p--] = 0;
            if (p < 0) break;
        }
    }
    std::vector<std::vector<Atom>> bodies;
    std::vector<Atom> body;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (!body.empty()) {
            auto vs = var_set(body);
            bool prefix = true;
            for (std::size_t i = 0; i < vs.size(); ++i) prefix &= vs.count(var_name(static_cast<int>(i))) > 0;
            if (prefix) bodies.push_back(body);
        }
        if (static_cast<int>(body.size()) == art.max_atoms) return;
        for (std::size_t i = from; i < pool.size(); ++i) {
            body.push_back(pool[i]);
            rec(i + 1);
            body.pop_back();
        }
    };
    if (k > 0) rec(0);

    Signature heads_sig = ext;
    heads_sig.add_relation(P.goal, std::max<int>(1, static_cast<int>(q.free_vars.size())));
    Certifier cert{ext_theory, cfg, &art};
    auto heads_of = [&](const BodyChase& bc) {
        std::vector<Atom> heads;
        for (Atom& a : frozen_atoms(bc.result)) {
            if (!heads_sig.has_relation(a.relation)) continue;
            if (!guarded_by_body(bc.body, atom_vars(a))) continue;
            heads.push_back(std::move(a));
        }
        return heads;
    };
    auto universe = [&](const std::vector<Atom>& body) { return head_universe(heads_sig, body); };
    auto cands = cert.run(bodies, heads_of, universe);

    std::vector<DatalogRule> prog;
    std::map<std::string, Tgd> uniq;
    for (const Candidate& c : cands) {
        Tgd t{c.body, {c.head}};
        uniq.emplace(canonical_key(t), t);
    }
    for (const auto& [key, t] : uniq) {
        DatalogRule r = transcribe(t.body, t.head.front(), sig);
        for (auto& v : edb_guard_completion(r, atom_vars(t.head.front()), sig)) prog.push_back(std::move(v));
    }
    for (auto& r : import_rules(sig)) prog.push_back(std::move(r));
    finish_program(P, std::move(prog));
    P.validate();
    return art;
}

OracleAnswer certain_answers_oracle(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q, const Instance& A,
                                    const ChaseConfig& cfg)
{
    ChaseResult res = chase(A, sigma, cfg);
    auto base = active_domain(A);
    for (const Value& v : A.constant_values()) base.insert(v);
    OracleAnswer out;
    out.complete = res.status == ChaseStatus::terminated;
    for (const Tuple& t : eval_cq(q, res.result))
        if (std::all_of(t.begin(), t.end(), [&](const Value& v) { return base.count(v) > 0; })) out.answers.insert(t);
    return out;
}

std::string serialize_artifacts(const RewriteArtifacts& a)
{
    std::string s;
    s += "# completeness: " + to_string(a.completeness) + "\n";
    s += "# max_atoms: " + std::to_string(a.max_atoms) + "\n";
    s += "# max_vars: " + std::to_string(a.max_vars) + "\n";
    s += "# bodies: " + std::to_string(a.bodies) + "\n";
    s += "# entailed: " + std::to_string(a.entailed) + "\n";
    s += "# rejected: " + std::to_string(a.rejected) + "\n";
    s += "# unknown: " + std::to_string(a.unknown) + "\n";
    for (const auto& [name, q] : a.query_predicates) s += "# " + to_string(q, name) + "\n";
    return s + print_datalog(a.program);
}

}  // namespace gnfo
