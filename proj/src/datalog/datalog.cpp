#include "gnfo/datalog/datalog.hpp"

#include <algorithm>

#include "gnfo/core/store.hpp"

namespace gnfo {

void DatalogProgram::validate() const
{
    for (const auto& [name, arity] : idb.relations)
        if (edb.has_relation(name)) throw Error("relation is both edb and idb: " + name);
    if (!idb.has_relation(goal)) throw Error("goal is not an idb relation: " + goal);
    for (const DatalogRule& r : rules) {
        auto ha = idb.arity(r.head.relation);
        if (!ha) throw Error("rule head is not an idb relation: " + to_string(r));
        if (*ha != static_cast<int>(r.head.args.size())) throw Error("arity mismatch in " + to_string(r));
        auto bv = var_set(r.body);
        for (const Term& t : r.head.args)
            if (t.is_var() && !bv.count(t.name)) throw Error("head variable not in body: " + to_string(r));
        for (const Atom& a : r.body) {
            if (a.relation == goal) throw Error("goal relation used in a body: " + to_string(r));
            auto ar = edb.has_relation(a.relation) ? edb.arity(a.relation) : idb.arity(a.relation);
            if (!ar) throw Error("undeclared relation " + a.relation);
            if (*ar != static_cast<int>(a.args.size())) throw Error("arity mismatch in " + to_string(r));
        }
    }
}

bool DatalogProgram::goal_is_boolean() const
{
    bool any = false;
    for (const DatalogRule& r : rules) {
        if (r.head.relation != goal) continue;
        any = true;
        if (r.head.args.size() != 1 || r.head.args[0].is_var() || r.head.args[0].name != kTopConstant) return false;
    }
    return any;
}

namespace {

bool edb_guarded(const DatalogProgram& P, const std::vector<Atom>& body, const std::set<std::string>& vars)
{
    if (vars.size() <= 1) return true;
    for (const Atom& a : body) {
        if (!P.edb.has_relation(a.relation)) continue;
        auto av = atom_vars(a);
        if (std::all_of(vars.begin(), vars.end(),
                        [&](const std::string& v) { return std::find(av.begin(), av.end(), v) != av.end(); }))
            return true;
    }
    return false;
}

}  // namespace

DatalogClass classify_datalog(const DatalogProgram& P)
{
    DatalogClass c{true, true, true};
    for (const DatalogRule& r : P.rules) {
        auto all = var_set(r.body);
        auto hv = var_set({r.head});
        bool g = edb_guarded(P, r.body, all);
        if (!g) {
            c.guarded = false;
            if (r.head.relation != P.goal) c.internally_guarded = false;
        }
        if (!edb_guarded(P, r.body, hv)) c.frontier_guarded = false;
    }
    return c;
}

DatalogResult eval_datalog_full(const DatalogProgram& P, const Instance& I)
{
    P.validate();
    detail::Store store;
    detail::Interner values;
    detail::load(I, store, values);
    struct Compiled {
        std::vector<detail::PAtom> body;
        detail::PAtom head;
        int slots;
    };
    std::vector<Compiled> rules;
    std::set<int> idb_rels;
    for (const auto& [name, arity] : P.idb.relations) idb_rels.insert(store.relation_id(name, arity));
    for (const DatalogRule& r : P.rules) {
        std::unordered_map<std::string, int> slots;
        Compiled c;
        c.body = detail::compile(r.body, store, values, slots, &I);
        c.head = detail::compile({r.head}, store, values, slots, &I).front();
        c.slots = static_cast<int>(slots.size());
        rules.push_back(std::move(c));
    }

    DatalogResult res;
    std::vector<int> prev(store.relation_count(), 0);
    bool first = true;
    while (true) {
        std::vector<int> snap(store.relation_count());
        for (std::size_t r = 0; r < snap.size(); ++r) snap[r] = store.size(static_cast<int>(r));
        std::vector<std::pair<int, std::vector<int>>> derived;
        for (const Compiled& c : rules) {
            auto emit = [&](const std::vector<int>& b) {
                std::vector<int> args;
                for (int t : c.head.terms) args.push_back(t >= 0 ? b[t] : -t - 1);
                derived.emplace_back(c.head.rel, std::move(args));
                return true;
            };
            std::size_t n = c.body.size();
            std::vector<detail::FactRange> ranges(n);
            if (first) {
                for (std::size_t i = 0; i < n; ++i) ranges[i] = {0, snap[c.body[i].rel]};
                std::vector<int> binding(c.slots, -1);
                detail::MatchOptions opts;
                opts.ranges = &ranges;
                detail::match(store, c.body, binding, emit, opts);
                continue;
            }
            for (std::size_t d = 0; d < n; ++d) {
                int drel = c.body[d].rel;
                if (!idb_rels.count(drel) || prev[drel] >= snap[drel]) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    int rel = c.body[i].rel;
                    if (i < d) ranges[i] = {0, prev[rel]};
                    else if (i == d) ranges[i] = {prev[rel], snap[rel]};
                    else ranges[i] = {0, snap[rel]};
                }
                std::vector<int> binding(c.slots, -1);
                detail::MatchOptions opts;
                opts.ranges = &ranges;
                detail::match(store, c.body, binding, emit, opts);
            }
        }
        first = false;
        ++res.iterations;
        prev = snap;
        bool added = false;
        for (const auto& [rel, args] : derived) added |= store.insert(rel, args);
        if (!added) break;
    }

    res.fixpoint = I;
    for (std::size_t r = 0; r < store.relation_count(); ++r) {
        int rel = static_cast<int>(r);
        res.fixpoint.signature.add_relation(store.relation_name(rel), store.arity(rel));
        for (int i = 0; i < store.size(rel); ++i) {
            Fact f{store.relation_name(rel), {}};
            for (int v : store.tuple(rel, i)) f.args.push_back(values.value(v));
            if (rel == store.find_relation(P.goal)) res.goal.insert(f.args);
            res.fixpoint.facts.insert(std::move(f));
        }
    }
    if (P.goal_is_boolean()) {
        bool yes = !res.goal.empty();
        res.goal.clear();
        if (yes) res.goal.insert(Tuple{});
    }
    return res;
}

std::set<Tuple> eval_datalog(const DatalogProgram& P, const Instance& I) { return eval_datalog_full(P, I).goal; }

std::string to_string(const DatalogRule& r) { return to_string(r.head) + " :- " + to_string(r.body) + "."; }

}  // namespace gnfo
