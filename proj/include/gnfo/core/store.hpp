#pragma once

// Interned, indexed fact storage and the backtracking join used by
// homomorphism search, CQ evaluation, the chase and Datalog.

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/core/syntax.hpp"

namespace gnfo::detail {

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept
    {
        std::size_t h = 1469598103934665603ULL;
        for (int x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

class Interner {
public:
    int id(const Value& v);
    int find(const Value& v) const;  // -1 when absent
    const Value& value(int id) const { return values_[id]; }
    std::size_t size() const { return values_.size(); }

private:
    std::unordered_map<Value, int, ValueHash> ids_;
    std::vector<Value> values_;
};

class Store {
public:
    int relation_id(const std::string& name, int arity);
    int find_relation(const std::string& name) const;  // -1 when absent
    const std::string& relation_name(int r) const { return names_[r]; }
    int arity(int r) const { return arity_[r]; }
    std::size_t relation_count() const { return names_.size(); }

    bool insert(int rel, const std::vector<int>& args);
    bool contains(int rel, const std::vector<int>& args) const;
    int size(int rel) const { return static_cast<int>(tuples_[rel].size()); }
    const std::vector<int>& tuple(int rel, int idx) const { return tuples_[rel][idx]; }
    // Fact indices of `rel` whose position `pos` holds `value`.
    const std::vector<int>* lookup(int rel, int pos, int value) const;
    std::size_t total_facts() const { return total_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> by_name_;
    std::vector<int> arity_;
    std::vector<std::vector<std::vector<int>>> tuples_;
    std::vector<std::unordered_set<std::vector<int>, VecHash>> members_;
    std::vector<std::vector<std::unordered_map<int, std::vector<int>>>> index_;
    std::size_t total_ = 0;
};

// Term >= 0: variable slot; term < 0: fixed value id (-term - 1).
struct PAtom {
    int rel = -1;
    std::vector<int> terms;
};

inline int fixed_term(int value_id) { return -value_id - 1; }

struct FactRange {
    int lo = 0;
    int hi = -1;  // -1: up to the current size
};

struct MatchOptions {
    // Optional per-atom fact index ranges (semi-naive deltas, snapshots).
    const std::vector<FactRange>* ranges = nullptr;
    long* budget = nullptr;  // decremented per search node; stop at 0
};

// Enumerates bindings of variable slots extending `binding` (-1 = unbound)
// that map every atom to a stored fact. The callback returns false to stop.
// Returns false if stopped by the callback or the budget.
bool match(const Store& store, const std::vector<PAtom>& atoms, std::vector<int>& binding,
           const std::function<bool(const std::vector<int>&)>& on_match,
           const MatchOptions& opts = {});

bool exists_match(const Store& store, const std::vector<PAtom>& atoms, std::vector<int> binding,
                  const MatchOptions& opts = {});

// Loads an instance; values are interned into `values`.
void load(const Instance& I, Store& store, Interner& values);

// Compiles atoms; variables get slots in `slots` (extended on demand),
// constants are resolved through `interp` and interned.
std::vector<PAtom> compile(const std::vector<Atom>& atoms, Store& store, Interner& values,
                           std::unordered_map<std::string, int>& slots, const Instance* interp);

}  // namespace gnfo::detail
