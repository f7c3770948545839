#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/query/cq.hpp"

namespace gnfo {

// Partial maps between non-constant elements; constants map by name.
using PartialMap = std::map<Value, Value>;

// Elements n1..nk with E(n_i, n_{i+1 mod k}).
Instance directed_cycle(int k);

struct GuardedBisimWitness {
    std::vector<PartialMap> family;
};

// Greatest family of partial isomorphisms between guarded sets with the
// back-and-forth properties; none when it is empty.
std::optional<GuardedBisimWitness> check_guarded_bisim(const Instance& A, const Instance& B);
bool verify_guarded_bisim(const Instance& A, const Instance& B, const GuardedBisimWitness& w);

// Z as a downward-closed family of bijections between guarded sets: the pair
// (c, d) of guarded tuples is in Z iff c_i -> d_i is a sub-map of a member.
// forward[i] / backward[i] witness the two homomorphisms for family[i].
struct StrongGnBisimWitness {
    std::vector<PartialMap> family;
    std::vector<Homomorphism> forward;
    std::vector<Homomorphism> backward;
    std::optional<std::set<std::string>> relations;  // reduct, all when empty
};

// Greatest strong GN-bisimulation between the reducts to `relations`.
std::optional<StrongGnBisimWitness> check_strong_gn(const Instance& A, const Instance& B,
                                                    const std::optional<std::set<std::string>>& relations = std::nullopt);
bool verify_strong_gn(const Instance& A, const Instance& B, const StrongGnBisimWitness& w);

// a -> b extends to a homomorphism compatible with the greatest strong
// GN-bisimulation (which must be non-empty).
bool check_directional(const Instance& A, const Tuple& a, const Instance& B, const Tuple& b,
                       const std::optional<std::set<std::string>>& relations = std::nullopt);

// Amalgam of A (sigma facts) and B (tau facts) along z, a verified strong
// GN-bisimulation over the shared relations. Elements are pairs p(c,d).
Instance amalgamate(const Instance& A, const Instance& B, const StrongGnBisimWitness& z, const Signature& sigma,
                    const Signature& tau);

}  // namespace gnfo
