#include "gnfo/core/store.hpp"

#include <algorithm>
#include <limits>

namespace gnfo::detail {

int Interner::id(const Value& v)
{
    auto it = ids_.find(v);
    if (it != ids_.end()) return it->second;
    int n = static_cast<int>(values_.size());
    ids_.emplace(v, n);
    values_.push_back(v);
    return n;
}

int Interner::find(const Value& v) const
{
    auto it = ids_.find(v);
    return it == ids_.end() ? -1 : it->second;
}

int Store::relation_id(const std::string& name, int arity)
{
    auto it = by_name_.find(name);
    if (it != by_name_.end()) {
        if (arity_[it->second] != arity) throw Error("arity mismatch for relation " + name);
        return it->second;
    }
    int r = static_cast<int>(names_.size());
    by_name_.emplace(name, r);
    names_.push_back(name);
    arity_.push_back(arity);
    tuples_.emplace_back();
    members_.emplace_back();
    index_.emplace_back(static_cast<std::size_t>(arity));
    return r;
}

int Store::find_relation(const std::string& name) const
{
    auto it = by_name_.find(name);
    return it == by_name_.end() ? -1 : it->second;
}

bool Store::insert(int rel, const std::vector<int>& args)
{
    if (!members_[rel].insert(args).second) return false;
    int idx = static_cast<int>(tuples_[rel].size());
    tuples_[rel].push_back(args);
    for (std::size_t p = 0; p < args.size(); ++p) index_[rel][p][args[p]].push_back(idx);
    ++total_;
    return true;
}

bool Store::contains(int rel, const std::vector<int>& args) const
{
    return members_[rel].count(args) > 0;
}

const std::vector<int>* Store::lookup(int rel, int pos, int value) const
{
    const auto& m = index_[rel][pos];
    auto it = m.find(value);
    return it == m.end() ? nullptr : &it->second;
}

namespace {

struct Matcher {
    const Store& store;
    const std::vector<PAtom>& atoms;
    std::vector<int>& binding;
    const std::function<bool(const std::vector<int>&)>& on_match;
    const MatchOptions& opts;
    std::vector<char> done;

    int value_of(int term) const { return term >= 0 ? binding[term] : -term - 1; }

    int hi_of(std::size_t i) const
    {
        int size = store.size(atoms[i].rel);
        if (opts.ranges) {
            int hi = (*opts.ranges)[i].hi;
            if (hi >= 0) return std::min(hi, size);
        }
        return size;
    }
    int lo_of(std::size_t i) const { return opts.ranges ? (*opts.ranges)[i].lo : 0; }

    // Candidate list for atom i: smallest index list over bound positions,
    // or nullptr meaning the whole range.
    const std::vector<int>* candidates(std::size_t i, std::size_t& count, bool& empty) const
    {
        const PAtom& a = atoms[i];
        const std::vector<int>* best = nullptr;
        empty = false;
        count = static_cast<std::size_t>(std::max(0, hi_of(i) - lo_of(i)));
        for (std::size_t p = 0; p < a.terms.size(); ++p) {
            int v = value_of(a.terms[p]);
            if (v < 0) continue;
            const std::vector<int>* l = store.lookup(a.rel, static_cast<int>(p), v);
            if (!l) {
                empty = true;
                count = 0;
                return nullptr;
            }
            if (!best || l->size() < best->size()) best = l;
        }
        if (best && best->size() < count) count = best->size();
        return best;
    }

    bool run(std::size_t remaining)
    {
        if (opts.budget) {
            if (*opts.budget <= 0) return false;
            --*opts.budget;
        }
        if (remaining == 0) return on_match(binding);
        std::size_t pick = atoms.size();
        std::size_t best_count = std::numeric_limits<std::size_t>::max();
        const std::vector<int>* best_list = nullptr;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (done[i]) continue;
            std::size_t count;
            bool empty;
            const std::vector<int>* l = candidates(i, count, empty);
            if (empty || count == 0) return true;
            if (count < best_count) {
                best_count = count;
                pick = i;
                best_list = l;
            }
        }
        done[pick] = 1;
        const PAtom& a = atoms[pick];
        int lo = lo_of(pick), hi = hi_of(pick);
        std::vector<int> newly;
        newly.reserve(a.terms.size());
        auto try_fact = [&](int idx) -> bool {
            const std::vector<int>& t = store.tuple(a.rel, idx);
            newly.clear();
            bool ok = true;
            for (std::size_t p = 0; p < a.terms.size(); ++p) {
                int term = a.terms[p];
                if (term < 0) {
                    if (t[p] != -term - 1) { ok = false; break; }
                } else if (binding[term] < 0) {
                    binding[term] = t[p];
                    newly.push_back(term);
                } else if (binding[term] != t[p]) {
                    ok = false;
                    break;
                }
            }
            bool cont = true;
            if (ok) cont = run(remaining - 1);
            for (int v : newly) binding[v] = -1;
            return cont;
        };
        bool cont = true;
        if (best_list) {
            for (int idx : *best_list) {
                if (idx < lo || idx >= hi) continue;
                if (!try_fact(idx)) { cont = false; break; }
            }
        } else {
            for (int idx = lo; idx < hi; ++idx) {
                if (!try_fact(idx)) { cont = false; break; }
            }
        }
        done[pick] = 0;
        return cont;
    }
};

}  // namespace

bool match(const Store& store, const std::vector<PAtom>& atoms, std::vector<int>& binding,
           const std::function<bool(const std::vector<int>&)>& on_match, const MatchOptions& opts)
{
    Matcher m{store, atoms, binding, on_match, opts, std::vector<char>(atoms.size(), 0)};
    return m.run(atoms.size());
}

bool exists_match(const Store& store, const std::vector<PAtom>& atoms, std::vector<int> binding,
                  const MatchOptions& opts)
{
    bool found = false;
    match(store, atoms, binding, [&](const std::vector<int>&) {
        found = true;
        return false;
    }, opts);
    return found;
}

void load(const Instance& I, Store& store, Interner& values)
{
    for (const auto& [name, arity] : I.signature.relations) store.relation_id(name, arity);
    for (const auto& [c, v] : I.constants) values.id(v);
    std::vector<int> args;
    for (const Fact& f : I.facts) {
        int r = store.relation_id(f.relation, static_cast<int>(f.args.size()));
        args.clear();
        for (const Value& v : f.args) args.push_back(values.id(v));
        store.insert(r, args);
    }
}

std::vector<PAtom> compile(const std::vector<Atom>& atoms, Store& store, Interner& values,
                           std::unordered_map<std::string, int>& slots, const Instance* interp)
{
    std::vector<PAtom> out;
    out.reserve(atoms.size());
    for (const Atom& a : atoms) {
        PAtom p;
        p.rel = store.relation_id(a.relation, static_cast<int>(a.args.size()));
        for (const Term& t : a.args) {
            if (t.is_var()) {
                auto it = slots.find(t.name);
                if (it == slots.end()) it = slots.emplace(t.name, static_cast<int>(slots.size())).first;
                p.terms.push_back(it->second);
            } else {
                Value v = interp ? interp->constant_value(t.name) : Value::constant(t.name);
                p.terms.push_back(fixed_term(values.id(v)));
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace gnfo::detail
