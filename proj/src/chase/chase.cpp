#include "gnfo/chase/chase.hpp"

#include <algorithm>
#include <functional>

#include "gnfo/core/store.hpp"

namespace gnfo {

void ChaseConfig::validate() const
{
    if (max_rounds < 1) throw PreconditionError("max_rounds must be positive");
    if (max_facts < 1) throw PreconditionError("max_facts must be positive");
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::unknown: return "unknown";
    }
    return "";
}

std::string to_string(ChaseStatus s) { return s == ChaseStatus::terminated ? "terminated" : "budget_exhausted"; }

namespace {

struct Rule {
    std::vector<detail::PAtom> body;
    std::vector<detail::PAtom> head;
    int body_slots = 0;
    int slots = 0;
    std::vector<int> existential_slots;
    int guard = -1;  // first body atom holding the frontier
};

struct Trigger {
    int rule;
    std::vector<int> binding;
};

class Engine {
public:
    Engine(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg) : A_(A), cfg_(cfg)
    {
        cfg.validate();
        for (const Tgd& t : sigma) t.validate();
        detail::load(A, store_, values_);
        for (const Value& v : active_domain(A)) adom_.insert(values_.id(v));
        for (const Value& v : A.constant_values()) constants_.insert(values_.id(v));
        track_ = all_frontier_guarded(sigma);
        for (const Tgd& t : sigma) {
            Rule r;
            std::unordered_map<std::string, int> slots;
            r.body = detail::compile(t.body, store_, values_, slots, &A);
            r.body_slots = static_cast<int>(slots.size());
            r.head = detail::compile(t.head, store_, values_, slots, &A);
            r.slots = static_cast<int>(slots.size());
            for (int s = r.body_slots; s < r.slots; ++s) r.existential_slots.push_back(s);
            auto fr = t.frontier();
            for (std::size_t i = 0; i < t.body.size() && r.guard < 0; ++i) {
                auto av = atom_vars(t.body[i]);
                if (std::all_of(fr.begin(), fr.end(),
                                [&](const std::string& v) { return std::find(av.begin(), av.end(), v) != av.end(); }))
                    r.guard = static_cast<int>(i);
            }
            rules_.push_back(std::move(r));
        }
        next_null_ = cfg.null_seed;
        prev_.assign(store_.relation_count(), 0);
    }

    // Runs one round; returns false when no trigger was active.
    bool step(bool fire)
    {
        std::vector<int> snap(store_.relation_count());
        for (std::size_t r = 0; r < snap.size(); ++r) snap[r] = store_.size(static_cast<int>(r));
        std::vector<Trigger> triggers;
        for (std::size_t ri = 0; ri < rules_.size(); ++ri) collect(static_cast<int>(ri), snap, triggers);
        std::sort(triggers.begin(), triggers.end(), [&](const Trigger& a, const Trigger& b) {
            if (a.rule != b.rule) return a.rule < b.rule;
            for (std::size_t i = 0; i < a.binding.size(); ++i) {
                const Value& va = values_.value(a.binding[i]);
                const Value& vb = values_.value(b.binding[i]);
                if (!(va == vb)) return va < vb;
            }
            return false;
        });
        prev_ = snap;
        bool active = false;
        for (const Trigger& t : triggers) {
            if (!is_active(t)) continue;
            active = true;
            if (!fire) break;
            apply(t);
            if (static_cast<long>(store_.total_facts()) >= cfg_.max_facts) {
                overflow_ = true;
                break;
            }
        }
        return active;
    }

    bool overflow() const { return overflow_; }
    int round() const { return round_; }
    void next_round() { ++round_; }
    const detail::Store& store() const { return store_; }
    detail::Interner& values() { return values_; }
    long nulls() const { return next_null_ - cfg_.null_seed; }

    ChaseResult result(int rounds, ChaseStatus status) const
    {
        ChaseResult res;
        res.result = A_;
        for (std::size_t r = 0; r < store_.relation_count(); ++r) {
            int rel = static_cast<int>(r);
            res.result.signature.add_relation(store_.relation_name(rel), store_.arity(rel));
            for (int i = 0; i < store_.size(rel); ++i) {
                Fact f{store_.relation_name(rel), {}};
                for (int v : store_.tuple(rel, i)) f.args.push_back(values_.value(v));
                res.result.facts.insert(std::move(f));
            }
        }
        res.rounds_executed = rounds;
        res.status = status;
        res.nulls_created = nulls();
        res.tracked = track_;
        if (track_) {
            res.origins = origins_;
            for (const auto& [key, origin] : tentacle_) {
                Fact f{store_.relation_name(key.first), {}};
                for (int v : key.second) f.args.push_back(values_.value(v));
                res.tentacle_map[f] = origin;
            }
        }
        return res;
    }

private:
    void collect(int ri, const std::vector<int>& snap, std::vector<Trigger>& out)
    {
        const Rule& rule = rules_[ri];
        std::size_t n = rule.body.size();
        std::vector<detail::FactRange> ranges(n);
        for (std::size_t d = 0; d < n; ++d) {
            int drel = rule.body[d].rel;
            if (prev_at(drel) >= snap[drel]) continue;
            for (std::size_t i = 0; i < n; ++i) {
                int rel = rule.body[i].rel;
                if (i < d) ranges[i] = {0, prev_at(rel)};
                else if (i == d) ranges[i] = {prev_at(rel), snap[rel]};
                else ranges[i] = {0, snap[rel]};
            }
            detail::MatchOptions opts;
            opts.ranges = &ranges;
            std::vector<int> binding(rule.body_slots, -1);
            detail::match(store_, rule.body, binding, [&](const std::vector<int>& b) {
                out.push_back({ri, b});
                return true;
            }, opts);
        }
    }

    int prev_at(int rel) const { return rel < static_cast<int>(prev_.size()) ? prev_[rel] : 0; }

    bool is_active(const Trigger& t) const
    {
        const Rule& rule = rules_[t.rule];
        if (cfg_.mode == ChaseMode::oblivious_dedup) return !fired_.count({t.rule, t.binding});
        std::vector<int> ext(rule.slots, -1);
        std::copy(t.binding.begin(), t.binding.end(), ext.begin());
        return !detail::exists_match(store_, rule.head, ext);
    }

    void apply(const Trigger& t)
    {
        const Rule& rule = rules_[t.rule];
        if (cfg_.mode == ChaseMode::oblivious_dedup) fired_.insert({t.rule, t.binding});
        int origin = -1;
        if (track_) origin = origin_of(rule, t);
        std::vector<int> ext(rule.slots, -1);
        std::copy(t.binding.begin(), t.binding.end(), ext.begin());
        for (int s : rule.existential_slots) {
            Provenance p{round_, t.rule, origin};
            ext[s] = values_.id(Value::null(next_null_++, p));
        }
        std::vector<int> args;
        for (const detail::PAtom& a : rule.head) {
            args.clear();
            for (int term : a.terms) args.push_back(term >= 0 ? ext[term] : -term - 1);
            if (store_.insert(a.rel, args) && track_) {
                bool outside = std::any_of(args.begin(), args.end(),
                                           [&](int v) { return !adom_.count(v); });
                if (outside) tentacle_[{a.rel, args}] = origin;
            }
        }
    }

    // The tentacle of the guard fact, or a root keyed by its values in adom(A).
    int origin_of(const Rule& rule, const Trigger& t)
    {
        if (rule.guard < 0) return -1;
        const detail::PAtom& g = rule.body[rule.guard];
        std::vector<int> args;
        for (int term : g.terms) args.push_back(term >= 0 ? t.binding[term] : -term - 1);
        auto it = tentacle_.find({g.rel, args});
        if (it != tentacle_.end()) return it->second;
        std::set<Value> root;
        for (int v : args)
            if (adom_.count(v) && !constants_.count(v)) root.insert(values_.value(v));
        auto found = std::find(origins_.begin(), origins_.end(), root);
        if (found != origins_.end()) return static_cast<int>(found - origins_.begin());
        origins_.push_back(root);
        return static_cast<int>(origins_.size()) - 1;
    }

    const Instance& A_;
    ChaseConfig cfg_;
    detail::Store store_;
    detail::Interner values_;
    std::set<int> adom_, constants_;
    std::vector<Rule> rules_;
    std::vector<int> prev_;
    std::set<std::pair<int, std::vector<int>>> fired_;
    long next_null_ = 1;
    int round_ = 1;
    bool overflow_ = false;
    bool track_ = false;
    std::map<std::pair<int, std::vector<int>>, int> tentacle_;
    std::vector<std::set<Value>> origins_;
};

// Drives rounds; `stop` is consulted after each productive round.
ChaseResult run(Engine& engine, const ChaseConfig& cfg, const std::function<bool()>& stop)
{
    int rounds = 0;
    while (true) {
        if (rounds == cfg.max_rounds) {
            bool active = engine.step(false);
            return engine.result(rounds, active ? ChaseStatus::budget_exhausted : ChaseStatus::terminated);
        }
        if (!engine.step(true)) return engine.result(rounds, ChaseStatus::terminated);
        ++rounds;
        engine.next_round();
        if (engine.overflow()) return engine.result(rounds, ChaseStatus::budget_exhausted);
        if (stop && stop()) return engine.result(rounds, ChaseStatus::budget_exhausted);
    }
}

}  // namespace

ChaseResult chase(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg)
{
    Engine engine(A, sigma, cfg);
    return run(engine, cfg, nullptr);
}

Verdict chase_entails_cq(const Instance& A, const std::vector<Tgd>& sigma, const ConjunctiveQuery& q,
                         const Tuple& answer, const ChaseConfig& cfg)
{
    if (answer.size() != q.free_vars.size()) throw PreconditionError("answer arity differs from the query");
    Engine engine(A, sigma, cfg);
    // Compile against the engine store so the query can be tested between rounds.
    auto& store = const_cast<detail::Store&>(engine.store());
    std::unordered_map<std::string, int> slots;
    for (const auto& v : q.free_vars) slots.emplace(v, static_cast<int>(slots.size()));
    auto atoms = detail::compile(q.atoms, store, engine.values(), slots, &A);
    std::vector<int> seed(slots.size(), -1);
    for (std::size_t i = 0; i < answer.size(); ++i) seed[i] = engine.values().id(answer[i]);
    auto holds_now = [&] { return detail::exists_match(engine.store(), atoms, seed); };
    if (holds_now()) return Verdict::yes;
    ChaseResult res = run(engine, cfg, holds_now);
    if (holds_now()) return Verdict::yes;
    return res.status == ChaseStatus::terminated ? Verdict::no : Verdict::unknown;
}

Verdict entails_tgd(const std::vector<Tgd>& sigma, const Tgd& t, const ChaseConfig& cfg)
{
    Instance A;
    std::map<std::string, Value> frozen;
    for (const auto& v : t.body_vars()) frozen[v] = Value::element(v);
    for (const Atom& a : t.body) A.add(ground(a, frozen));
    auto fr = t.frontier();
    Tuple answer;
    for (const auto& v : fr) answer.push_back(frozen[v]);
    return chase_entails_cq(A, sigma, ConjunctiveQuery::make(fr, t.head), answer, cfg);
}

std::set<Fact> missing_entailed_facts(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg,
                                      bool* complete)
{
    ChaseResult res = chase(A, sigma, cfg);
    if (complete) *complete = res.status == ChaseStatus::terminated;
    auto base = active_domain(A);
    for (const Value& v : A.constant_values()) base.insert(v);
    std::set<Fact> out;
    for (const Fact& f : res.result.facts) {
        if (A.contains(f)) continue;
        if (std::all_of(f.args.begin(), f.args.end(), [&](const Value& v) { return base.count(v) > 0; }))
            out.insert(f);
    }
    return out;
}

namespace {

// Chases with a growing round budget so the witness is a fact of the
// earliest round that produces one.
SaturationVerdict saturation(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg, bool guarded)
{
    cfg.validate();
    auto base = active_domain(A);
    for (const Value& v : A.constant_values()) base.insert(v);
    for (int rounds = 1; rounds <= cfg.max_rounds; ++rounds) {
        ChaseConfig step = cfg;
        step.max_rounds = rounds;
        ChaseResult res = chase(A, sigma, step);
        for (const Fact& f : res.result.facts) {
            if (A.contains(f)) continue;
            if (!std::all_of(f.args.begin(), f.args.end(), [&](const Value& v) { return base.count(v) > 0; }))
                continue;
            if (guarded && !is_guarded_set(A, fact_values(f))) continue;
            return {Verdict::no, f};
        }
        if (res.status == ChaseStatus::terminated) return {Verdict::yes, std::nullopt};
        if (res.rounds_executed < rounds) break;
    }
    return {Verdict::unknown, std::nullopt};
}

}  // namespace

SaturationVerdict is_fact_saturated(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg)
{
    return saturation(A, sigma, cfg, false);
}

SaturationVerdict is_guardedly_fact_saturated(const Instance& A, const std::vector<Tgd>& sigma,
                                              const ChaseConfig& cfg)
{
    return saturation(A, sigma, cfg, true);
}

Tentacles tentacle_decomposition(const ChaseResult& res, const Instance& A)
{
    if (!res.tracked) throw PreconditionError("tentacles are only tracked for frontier-guarded theories");
    if (res.status != ChaseStatus::terminated) throw PreconditionError("chase did not terminate");
    Tentacles out(res.origins.size());
    for (const Fact& f : minus(res.result, A).facts) {
        auto it = res.tentacle_map.find(f);
        if (it == res.tentacle_map.end() || it->second < 0) throw Error("untracked fact " + to_string(f));
        out[it->second].insert(f);
    }
    if (out.empty()) out.emplace_back();
    return out;
}

}  // namespace gnfo
