#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/core/syntax.hpp"

namespace gnfo {

// body -> exists (head variables not in body). head.
struct Tgd {
    std::vector<Atom> body;
    std::vector<Atom> head;

    std::vector<std::string> body_vars() const;
    std::vector<std::string> frontier() const;
    std::vector<std::string> existentials() const;
    bool is_full() const { return existentials().empty(); }
    void validate() const;

    friend bool operator==(const Tgd&, const Tgd&) = default;
};

struct DisjunctiveTgd {
    std::vector<Atom> body;
    std::vector<std::vector<Atom>> heads;

    Tgd disjunct(std::size_t i) const { return Tgd{body, heads.at(i)}; }
    void validate() const;
};

struct TgdClass {
    bool full = false;
    bool guarded = false;
    bool frontier_guarded = false;
    bool acyclic_fg = false;
    bool quasi_frontier_guarded = false;
};

TgdClass classify(const Tgd& t);
// Some body atom contains every variable of `vars` (sets of at most one
// variable are guarded by equality).
bool guarded_by_body(const std::vector<Atom>& body, const std::vector<std::string>& vars);
bool is_guarded(const Tgd& t);
bool is_frontier_guarded(const Tgd& t);
bool all_guarded(const std::vector<Tgd>& sigma);
bool all_frontier_guarded(const std::vector<Tgd>& sigma);

struct TgdGraph {
    int nodes = 0;
    std::vector<std::pair<int, int>> edges;

    std::vector<std::vector<int>> components() const;
};

// Nodes are head atoms; edges join atoms sharing an existential variable.
TgdGraph tgd_graph(const Tgd& t);
std::vector<Tgd> decompose_components(const Tgd& t);
bool is_quasi_frontier_guarded(const Tgd& t);

// Renaming-invariant key; equal keys mean equal up to variable renaming.
std::string canonical_key(const Tgd& t);
// Substitutes each existential by a constant, a body variable or itself.
std::vector<Tgd> specializations(const Tgd& t, const std::vector<std::string>& constants);

// Model checking.
bool satisfies(const Instance& I, const Tgd& t);
bool satisfies(const Instance& I, const std::vector<Tgd>& sigma);
bool satisfies(const Instance& I, const DisjunctiveTgd& t);

Signature signature_of(const std::vector<Tgd>& sigma);

std::string to_string(const Tgd& t);
std::string to_string(const DisjunctiveTgd& t);

}  // namespace gnfo
