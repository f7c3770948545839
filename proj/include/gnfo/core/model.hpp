#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gnfo {

// Reserved constant carrying facts of zero-ary predicates.
inline constexpr const char* kTopConstant = "_top";

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

struct Signature {
    std::vector<std::pair<std::string, int>> relations;
    std::vector<std::string> constants;

    void add_relation(const std::string& name, int arity);
    void add_constant(const std::string& name);
    std::optional<int> arity(const std::string& name) const;
    bool has_relation(const std::string& name) const { return arity(name).has_value(); }
    bool has_constant(const std::string& name) const;
    // Adds all symbols of `other`, failing on arity conflicts.
    void merge(const Signature& other);
    Signature restricted_to(const std::set<std::string>& rels) const;
    void validate() const;
};

enum class ValueKind { element, constant, null };

struct Provenance {
    int round = 0;
    int rule = -1;
    int origin = -1;
};

// Values are identified by kind and name; provenance is metadata only.
struct Value {
    ValueKind kind = ValueKind::element;
    std::string name;
    std::optional<Provenance> provenance;

    static Value element(std::string n) { return {ValueKind::element, std::move(n), std::nullopt}; }
    static Value constant(std::string n) { return {ValueKind::constant, std::move(n), std::nullopt}; }
    static Value null(long id, std::optional<Provenance> p = std::nullopt)
    {
        return {ValueKind::null, "_n" + std::to_string(id), p};
    }

    friend bool operator==(const Value& a, const Value& b) { return a.kind == b.kind && a.name == b.name; }
    friend std::strong_ordering operator<=>(const Value& a, const Value& b)
    {
        if (auto c = a.name <=> b.name; c != 0) return c;
        return a.kind <=> b.kind;
    }
};

struct ValueHash {
    std::size_t operator()(const Value& v) const noexcept;
};

struct Fact {
    std::string relation;
    std::vector<Value> args;

    friend bool operator==(const Fact&, const Fact&) = default;
    friend auto operator<=>(const Fact& a, const Fact& b)
    {
        if (auto c = a.relation <=> b.relation; c != 0) return c;
        return a.args <=> b.args;
    }
};

class Instance {
public:
    Signature signature;
    std::set<Fact> facts;
    std::map<std::string, Value> constants;

    Instance() = default;
    explicit Instance(Signature sig);

    // Declares an undeclared relation on first use; rejects arity mismatches.
    void add(const Fact& f);
    void add(const std::string& rel, const std::vector<Value>& args) { add(Fact{rel, args}); }
    bool contains(const Fact& f) const { return facts.count(f) > 0; }
    void declare_constant(const std::string& c);
    void interpret_constant(const std::string& c, const Value& v);
    // Interpretation of a constant; undeclared constants denote themselves.
    Value constant_value(const std::string& c) const;
    std::set<Value> constant_values() const;
    std::size_t size() const { return facts.size(); }
    void validate() const;
};

std::set<Value> active_domain(const Instance& I);
std::set<Value> fact_values(const Fact& f);

bool is_guarded_set(const Instance& I, const std::set<Value>& X);
bool weak_substructure(const Instance& A, const Instance& B);
Instance induced_substructure(const Instance& I, const std::set<Value>& X);
// Every maximal guarded set is the value set of a fact (minus constants);
// this returns all guarded sets, including the empty one, in sorted order.
std::vector<std::set<Value>> guarded_sets(const Instance& I);

struct Homomorphism {
    std::map<Value, Value> mapping;

    Value apply(const Value& v) const;
    Fact apply(const Fact& f) const;
};

bool verify_homomorphism(const Instance& S, const Instance& T, const Homomorphism& h);

// Complete backtracking search. `max_nodes` < 0 means unbounded; when the
// budget runs out `exhausted` is set and none is returned.
std::optional<Homomorphism> find_homomorphism(const Instance& S, const Instance& T,
                                              const std::map<Value, Value>& seed = {},
                                              long max_nodes = -1, bool* exhausted = nullptr);

Value pair_value(const Value& a, const Value& b);
Instance direct_product(const Instance& I1, const Instance& I2);
Instance disjoint_union(const Instance& A, const Instance& B, const std::string& left_tag,
                        const std::string& right_tag);
Instance rename_values(const Instance& I, const std::map<Value, Value>& renaming);
Instance restrict_relations(const Instance& I, const std::set<std::string>& rels);

Instance minus(const Instance& B, const Instance& A);

using Tentacles = std::vector<std::set<Fact>>;

bool squid_check(const Instance& A, const Instance& B, const Tentacles& tentacles);

struct SquidExtension {
    Instance extension;
    Homomorphism projection;
    Tentacles tentacles;
};

SquidExtension squid_extension(const Instance& A, const Instance& B);

std::string to_string(const Value& v);
std::string to_string(const Fact& f);

}  // namespace gnfo
