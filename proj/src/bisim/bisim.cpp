#include "gnfo/bisim/bisim.hpp"

#include <algorithm>

#include "gnfo/core/store.hpp"

namespace gnfo {

Instance directed_cycle(int k)
{
    if (k < 1) throw PreconditionError("cycle length must be positive");
    Instance I;
    for (int i = 1; i <= k; ++i)
        I.add("E", {Value::element("n" + std::to_string(i)), Value::element("n" + std::to_string(i % k + 1))});
    return I;
}

namespace {

struct Side {
    Instance reduct;
    std::set<Value> consts;
    std::vector<Value> domain;                // adom of the full instance plus constants
    std::vector<std::vector<Value>> fact_sets;  // distinct non-constant value sets of reduct facts
    std::set<std::set<Value>> guarded;        // all non-empty guarded sets
};

Side make_side(const Instance& I, const std::optional<std::set<std::string>>& rels)
{
    Side s;
    s.reduct = rels ? restrict_relations(I, *rels) : I;
    s.consts = I.constant_values();
    for (const Fact& f : I.facts)
        for (const Value& v : f.args)
            if (v.kind == ValueKind::constant) s.consts.insert(v);
    std::set<Value> dom = active_domain(I);
    dom.insert(s.consts.begin(), s.consts.end());
    s.domain.assign(dom.begin(), dom.end());
    std::set<std::vector<Value>> sets;
    for (const Fact& f : s.reduct.facts) {
        std::vector<Value> vs;
        for (const Value& v : fact_values(f))
            if (!s.consts.count(v)) vs.push_back(v);
        if (vs.empty()) continue;
        sets.insert(vs);
        for (std::size_t mask = 1; mask < (std::size_t{1} << vs.size()); ++mask) {
            std::set<Value> sub;
            for (std::size_t i = 0; i < vs.size(); ++i)
                if (mask >> i & 1) sub.insert(vs[i]);
            s.guarded.insert(std::move(sub));
        }
    }
    s.fact_sets.assign(sets.begin(), sets.end());
    return s;
}

// Constant value of A -> constant value of B; none when the constant parts
// cannot be matched.
std::optional<PartialMap> constant_map(const Instance& A, const Side& a, const Instance& B, const Side& b)
{
    PartialMap m;
    std::set<std::string> names;
    for (const auto& [c, v] : A.constants) names.insert(c);
    for (const auto& [c, v] : B.constants) names.insert(c);
    auto bind = [&](const Value& x, const Value& y) {
        auto [it, fresh] = m.emplace(x, y);
        return fresh || it->second == y;
    };
    for (const auto& c : names)
        if (!bind(A.constant_value(c), B.constant_value(c))) return std::nullopt;
    for (const Value& v : a.consts)
        if (!A.constants.count(v.name) && v.kind == ValueKind::constant && !bind(v, v)) return std::nullopt;
    std::set<Value> image;
    for (const auto& [x, y] : m)
        if (!image.insert(y).second) return std::nullopt;
    for (const Value& v : b.consts)
        if (!image.count(v)) {
            if (v.kind != ValueKind::constant || B.constants.count(v.name) || m.count(v)) return std::nullopt;
            m.emplace(v, v);
        }
    return m;
}

PartialMap inverse(const PartialMap& f)
{
    PartialMap g;
    for (const auto& [x, y] : f) g.emplace(y, x);
    return g;
}

// f together with the constant map is an injective partial isomorphism.
bool partial_iso(const Side& a, const Side& b, const PartialMap& f, const PartialMap& cmap)
{
    PartialMap full = cmap;
    for (const auto& [x, y] : f)
        if (!full.emplace(x, y).second) return false;
    PartialMap back = inverse(full);
    if (back.size() != full.size()) return false;
    auto maps_into = [](const Instance& from, const Instance& to, const PartialMap& m) {
        for (const Fact& fact : from.facts) {
            Fact img{fact.relation, {}};
            bool inside = true;
            for (const Value& v : fact.args) {
                auto it = m.find(v);
                if (it == m.end()) {
                    inside = false;
                    break;
                }
                img.args.push_back(it->second);
            }
            if (inside && !to.contains(img)) return false;
        }
        return true;
    };
    return maps_into(a.reduct, b.reduct, full) && maps_into(b.reduct, a.reduct, back);
}

// All partial isomorphisms between guarded sets, plus the empty map.
std::set<PartialMap> candidate_maps(const Side& a, const Side& b, const PartialMap& cmap)
{
    std::set<PartialMap> out{PartialMap{}};
    for (const auto& X : a.guarded) {
        std::vector<Value> xs(X.begin(), X.end());
        for (const auto& Y : b.guarded) {
            if (Y.size() != X.size()) continue;
            std::vector<Value> ys(Y.begin(), Y.end());
            do {
                PartialMap f;
                for (std::size_t i = 0; i < xs.size(); ++i) f.emplace(xs[i], ys[i]);
                if (partial_iso(a, b, f, cmap)) out.insert(std::move(f));
            } while (std::next_permutation(ys.begin(), ys.end()));
        }
    }
    return out;
}

std::set<Value> domain_of(const PartialMap& f)
{
    std::set<Value> d;
    for (const auto& [x, y] : f) d.insert(x);
    return d;
}

// Homomorphisms from `from` to `to` whose restriction to every guarded set
// of `from` is one of the allowed maps (a table constraint per fact set).
class Csp {
public:
    Csp(const Side& from, const Side& to, const std::set<PartialMap>& allowed, const PartialMap& cmap)
        : cmap_(cmap)
    {
        for (const Value& v : to.domain) values_.id(v);
        std::map<std::set<Value>, std::vector<const PartialMap*>> by_domain;
        for (const PartialMap& f : allowed) by_domain[domain_of(f)].push_back(&f);
        std::set<Value> covered;
        for (std::size_t i = 0; i < from.fact_sets.size(); ++i) {
            const auto& xs = from.fact_sets[i];
            int rel = store_.relation_id("T" + std::to_string(i), static_cast<int>(xs.size()));
            auto it = by_domain.find(std::set<Value>(xs.begin(), xs.end()));
            if (it != by_domain.end())
                for (const PartialMap* f : it->second) {
                    std::vector<int> row;
                    for (const Value& x : xs) row.push_back(values_.id(f->at(x)));
                    store_.insert(rel, row);
                }
            detail::PAtom atom{rel, {}};
            for (const Value& x : xs) {
                atom.terms.push_back(slot(x));
                covered.insert(x);
            }
            atoms_.push_back(std::move(atom));
        }
        // Elements outside every guarded set range over the whole domain.
        int any = store_.relation_id("D", 1);
        for (const Value& v : to.domain) store_.insert(any, {values_.id(v)});
        for (const Value& v : from.domain)
            if (!from.consts.count(v) && !covered.count(v)) atoms_.push_back({any, {slot(v)}});
        for (const Value& v : from.domain)
            if (from.consts.count(v) && !cmap_.count(v)) consistent_ = false;
    }

    // Solves with `seed` as a partial assignment; fills `witness` if given.
    bool solve(const std::vector<std::pair<Value, Value>>& seed, Homomorphism* witness = nullptr) const
    {
        if (!consistent_) return false;
        std::vector<int> binding(slots_.size(), -1);
        for (const auto& [x, y] : seed) {
            auto c = cmap_.find(x);
            if (c != cmap_.end()) {
                if (!(c->second == y)) return false;
                continue;
            }
            auto s = slot_of_.find(x);
            int id = values_.find(y);
            if (s == slot_of_.end()) return false;
            if (id < 0) return false;
            if (binding[s->second] >= 0 && binding[s->second] != id) return false;
            binding[s->second] = id;
        }
        if (!witness) return detail::exists_match(store_, atoms_, binding);
        bool found = false;
        detail::match(store_, atoms_, binding, [&](const std::vector<int>& b) {
            witness->mapping = cmap_;
            for (std::size_t i = 0; i < b.size(); ++i) witness->mapping[slots_[i]] = values_.value(b[i]);
            found = true;
            return false;
        });
        return found;
    }

private:
    int slot(const Value& v)
    {
        auto [it, fresh] = slot_of_.emplace(v, static_cast<int>(slots_.size()));
        if (fresh) slots_.push_back(v);
        return it->second;
    }

    PartialMap cmap_;
    detail::Store store_;
    mutable detail::Interner values_;
    std::vector<detail::PAtom> atoms_;
    std::map<Value, int> slot_of_;
    std::vector<Value> slots_;
    bool consistent_ = true;
};

std::vector<std::pair<Value, Value>> pairs_of(const PartialMap& f) { return {f.begin(), f.end()}; }

std::set<PartialMap> inverses(const std::set<PartialMap>& z)
{
    std::set<PartialMap> out;
    for (const auto& f : z) out.insert(inverse(f));
    return out;
}

struct StrongResult {
    std::set<PartialMap> z;
    std::map<PartialMap, std::pair<Homomorphism, Homomorphism>> witnesses;
};

StrongResult greatest_strong(const Side& a, const Side& b, const PartialMap& cmap)
{
    StrongResult r;
    r.z = candidate_maps(a, b, cmap);
    PartialMap back_c = inverse(cmap);
    while (!r.z.empty()) {
        Csp fwd(a, b, r.z, cmap);
        Csp bwd(b, a, inverses(r.z), back_c);
        std::vector<PartialMap> order(r.z.begin(), r.z.end());
        std::stable_sort(order.begin(), order.end(),
                         [](const PartialMap& x, const PartialMap& y) { return x.size() > y.size(); });
        r.witnesses.clear();
        std::set<PartialMap> keep;
        for (const PartialMap& f : order) {
            if (keep.count(f)) continue;
            Homomorphism h, g;
            if (!fwd.solve(pairs_of(f), &h) || !bwd.solve(pairs_of(inverse(f)), &g)) continue;
            // Sub-maps share the witnesses.
            std::vector<std::pair<Value, Value>> items(f.begin(), f.end());
            for (std::size_t mask = 0; mask < (std::size_t{1} << items.size()); ++mask) {
                PartialMap sub;
                for (std::size_t i = 0; i < items.size(); ++i)
                    if (mask >> i & 1) sub.insert(items[i]);
                if (r.z.count(sub) && keep.insert(sub).second) r.witnesses.emplace(sub, std::make_pair(h, g));
            }
        }
        if (keep.size() == r.z.size()) break;
        r.z = std::move(keep);
    }
    return r;
}

bool restriction_in(const Homomorphism& h, const std::set<Value>& X, const std::set<PartialMap>& z, bool invert)
{
    PartialMap f;
    std::set<Value> image;
    for (const Value& x : X) {
        auto it = h.mapping.find(x);
        if (it == h.mapping.end() || !image.insert(it->second).second) return false;
        if (invert) f.emplace(it->second, x);
        else f.emplace(x, it->second);
    }
    return z.count(f) > 0;
}

bool extends(const Homomorphism& h, const PartialMap& f)
{
    for (const auto& [x, y] : f) {
        auto it = h.mapping.find(x);
        if (it == h.mapping.end() || !(it->second == y)) return false;
    }
    return true;
}

}  // namespace

std::optional<GuardedBisimWitness> check_guarded_bisim(const Instance& A, const Instance& B)
{
    Side a = make_side(A, std::nullopt), b = make_side(B, std::nullopt);
    auto cmap = constant_map(A, a, B, b);
    if (!cmap) return std::nullopt;
    std::set<PartialMap> family = candidate_maps(a, b, *cmap);
    auto agree = [](const PartialMap& f, const PartialMap& g) {
        for (const auto& [x, y] : f) {
            auto it = g.find(x);
            if (it != g.end() && !(it->second == y)) return false;
        }
        return true;
    };
    while (true) {
        std::map<std::set<Value>, std::vector<const PartialMap*>> by_dom, by_range;
        for (const PartialMap& f : family) {
            by_dom[domain_of(f)].push_back(&f);
            by_range[domain_of(inverse(f))].push_back(&f);
        }
        auto has = [&](const std::map<std::set<Value>, std::vector<const PartialMap*>>& idx, const std::set<Value>& S,
                       const PartialMap& f, bool back) {
            auto it = idx.find(S);
            if (it == idx.end()) return false;
            for (const PartialMap* g : it->second)
                if (back ? agree(inverse(f), inverse(*g)) : agree(f, *g)) return true;
            return false;
        };
        std::set<PartialMap> keep;
        for (const PartialMap& f : family) {
            bool ok = true;
            for (const auto& X : a.guarded)
                if (ok && !has(by_dom, X, f, false)) ok = false;
            for (const auto& Y : b.guarded)
                if (ok && !has(by_range, Y, f, true)) ok = false;
            if (ok) keep.insert(f);
        }
        if (keep.size() == family.size()) break;
        family = std::move(keep);
    }
    if (family.empty()) return std::nullopt;
    GuardedBisimWitness w{{family.begin(), family.end()}};
    if (!verify_guarded_bisim(A, B, w)) throw Error("guarded bisimulation failed verification");
    return w;
}

bool verify_guarded_bisim(const Instance& A, const Instance& B, const GuardedBisimWitness& w)
{
    if (w.family.empty()) return false;
    Side a = make_side(A, std::nullopt), b = make_side(B, std::nullopt);
    auto cmap = constant_map(A, a, B, b);
    if (!cmap) return false;
    for (const PartialMap& f : w.family) {
        if (!partial_iso(a, b, f, *cmap)) return false;
        auto dom = domain_of(f), rng = domain_of(inverse(f));
        if (!dom.empty() && (!a.guarded.count(dom) || !b.guarded.count(rng))) return false;
    }
    for (const PartialMap& f : w.family) {
        for (const auto& X : a.guarded) {
            bool found = std::any_of(w.family.begin(), w.family.end(), [&](const PartialMap& g) {
                if (domain_of(g) != X) return false;
                for (const auto& [x, y] : f)
                    if (g.count(x) && !(g.at(x) == y)) return false;
                return true;
            });
            if (!found) return false;
        }
        for (const auto& Y : b.guarded) {
            bool found = std::any_of(w.family.begin(), w.family.end(), [&](const PartialMap& g) {
                PartialMap gi = inverse(g), fi = inverse(f);
                if (domain_of(gi) != Y) return false;
                for (const auto& [x, y] : fi)
                    if (gi.count(x) && !(gi.at(x) == y)) return false;
                return true;
            });
            if (!found) return false;
        }
    }
    return true;
}

std::optional<StrongGnBisimWitness> check_strong_gn(const Instance& A, const Instance& B,
                                                    const std::optional<std::set<std::string>>& relations)
{
    Side a = make_side(A, relations), b = make_side(B, relations);
    auto cmap = constant_map(A, a, B, b);
    if (!cmap || !partial_iso(a, b, {}, *cmap)) return std::nullopt;
    StrongResult r = greatest_strong(a, b, *cmap);
    if (r.z.empty()) return std::nullopt;
    StrongGnBisimWitness w;
    w.relations = relations;
    for (const PartialMap& f : r.z) {
        w.family.push_back(f);
        w.forward.push_back(r.witnesses.at(f).first);
        w.backward.push_back(r.witnesses.at(f).second);
    }
    if (!verify_strong_gn(A, B, w)) throw Error("strong GN-bisimulation failed verification");
    return w;
}

bool verify_strong_gn(const Instance& A, const Instance& B, const StrongGnBisimWitness& w)
{
    if (w.family.empty() || w.forward.size() != w.family.size() || w.backward.size() != w.family.size())
        return false;
    Side a = make_side(A, w.relations), b = make_side(B, w.relations);
    auto cmap = constant_map(A, a, B, b);
    if (!cmap) return false;
    std::set<PartialMap> z(w.family.begin(), w.family.end());
    for (const PartialMap& f : w.family) {
        if (!partial_iso(a, b, f, *cmap)) return false;
        auto dom = domain_of(f), rng = domain_of(inverse(f));
        if (!dom.empty() && (!a.guarded.count(dom) || !b.guarded.count(rng))) return false;
        std::vector<std::pair<Value, Value>> items(f.begin(), f.end());
        for (std::size_t mask = 0; mask < (std::size_t{1} << items.size()); ++mask) {
            PartialMap sub;
            for (std::size_t i = 0; i < items.size(); ++i)
                if (mask >> i & 1) sub.insert(items[i]);
            if (!z.count(sub)) return false;
        }
    }
    PartialMap back_c = inverse(*cmap);
    for (std::size_t i = 0; i < w.family.size(); ++i) {
        const Homomorphism& h = w.forward[i];
        const Homomorphism& g = w.backward[i];
        if (!verify_homomorphism(a.reduct, b.reduct, h) || !verify_homomorphism(b.reduct, a.reduct, g)) return false;
        if (!extends(h, w.family[i]) || !extends(g, inverse(w.family[i]))) return false;
        if (!extends(h, *cmap) || !extends(g, back_c)) return false;
        for (const auto& X : a.guarded)
            if (!restriction_in(h, X, z, false)) return false;
        for (const auto& Y : b.guarded)
            if (!restriction_in(g, Y, z, true)) return false;
    }
    return true;
}

bool check_directional(const Instance& A, const Tuple& a, const Instance& B, const Tuple& b,
                       const std::optional<std::set<std::string>>& relations)
{
    if (a.size() != b.size()) throw PreconditionError("tuples of different length");
    Side sa = make_side(A, relations), sb = make_side(B, relations);
    auto cmap = constant_map(A, sa, B, sb);
    if (!cmap || !partial_iso(sa, sb, {}, *cmap)) return false;
    StrongResult r = greatest_strong(sa, sb, *cmap);
    if (r.z.empty()) return false;
    Csp fwd(sa, sb, r.z, *cmap);
    std::vector<std::pair<Value, Value>> seed;
    for (std::size_t i = 0; i < a.size(); ++i) seed.emplace_back(a[i], b[i]);
    return fwd.solve(seed);
}

Instance amalgamate(const Instance& A, const Instance& B, const StrongGnBisimWitness& z, const Signature& sigma,
                    const Signature& tau)
{
    if (!verify_strong_gn(A, B, z)) throw PreconditionError("amalgamation needs a verified strong GN-bisimulation");
    Side a = make_side(A, z.relations), b = make_side(B, z.relations);
    PartialMap cmap = *constant_map(A, a, B, b);
    std::set<PartialMap> family(z.family.begin(), z.family.end());
    Csp fwd(a, b, family, cmap);
    Csp bwd(b, a, inverses(family), inverse(cmap));

    auto pair_of = [&](const Value& c, const Value& d) {
        if (c.kind == ValueKind::constant && c.name == kTopConstant && c == d) return c;
        return pair_value(c, d);
    };
    std::map<Value, std::vector<Value>> partners;  // c -> d with (c -> d) in Z
    for (const Value& c : a.domain)
        for (const Value& d : b.domain)
            if (fwd.solve({{c, d}})) partners[c].push_back(d);
    std::map<Value, std::vector<Value>> back_partners;
    for (const auto& [c, ds] : partners)
        for (const Value& d : ds) back_partners[d].push_back(c);

    Instance U;
    for (const auto& [c, v] : A.constants) {
        U.declare_constant(c);
        U.interpret_constant(c, pair_of(v, B.constant_value(c)));
    }
    for (const auto& [c, v] : B.constants)
        if (!U.constants.count(c)) {
            U.declare_constant(c);
            U.interpret_constant(c, pair_of(A.constant_value(c), v));
        }
    auto product = [](const Fact& f, const std::map<Value, std::vector<Value>>& opts,
                      const std::function<void(const std::vector<Value>&)>& emit) {
        std::vector<Value> pick(f.args.size());
        std::map<Value, Value> chosen;
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == f.args.size()) {
                emit(pick);
                return;
            }
            auto fixed = chosen.find(f.args[i]);
            if (fixed != chosen.end()) {
                pick[i] = fixed->second;
                rec(i + 1);
                return;
            }
            auto it = opts.find(f.args[i]);
            if (it == opts.end()) return;
            for (const Value& v : it->second) {
                pick[i] = v;
                chosen[f.args[i]] = v;
                rec(i + 1);
                chosen.erase(f.args[i]);
            }
        };
        rec(0);
    };
    for (const Fact& f : A.facts) {
        if (!sigma.has_relation(f.relation)) continue;
        product(f, partners, [&](const std::vector<Value>& ds) {
            std::vector<std::pair<Value, Value>> seed;
            for (std::size_t i = 0; i < ds.size(); ++i) seed.emplace_back(f.args[i], ds[i]);
            if (!fwd.solve(seed)) return;
            Fact g{f.relation, {}};
            for (std::size_t i = 0; i < ds.size(); ++i) g.args.push_back(pair_of(f.args[i], ds[i]));
            U.add(g);
        });
    }
    for (const Fact& f : B.facts) {
        if (!tau.has_relation(f.relation)) continue;
        product(f, back_partners, [&](const std::vector<Value>& cs) {
            std::vector<std::pair<Value, Value>> seed;
            for (std::size_t i = 0; i < cs.size(); ++i) seed.emplace_back(f.args[i], cs[i]);
            if (!bwd.solve(seed)) return;
            Fact g{f.relation, {}};
            for (std::size_t i = 0; i < cs.size(); ++i) g.args.push_back(pair_of(cs[i], f.args[i]));
            U.add(g);
        });
    }
    return U;
}

}  // namespace gnfo
