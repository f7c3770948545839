#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnfo/chase/chase.hpp"
#include "gnfo/tgd/tgd.hpp"

namespace gnfo {

struct SelectResult {
    std::optional<std::size_t> index;
    std::vector<Verdict> verdicts;  // one per disjunct, in test order
};

// First disjunct whose TGD is entailed by sigma.
SelectResult select_disjunct(const std::vector<Tgd>& sigma, const DisjunctiveTgd& d, const ChaseConfig& cfg = {});

struct SpecializeReport {
    bool ok = true;
    std::vector<Tgd> tgds;
    std::vector<std::size_t> failed;  // indices into sigma
    std::vector<std::string> log;
};

// Replaces each rule by the frontier-guarded components of its first
// certified quasi-frontier-guarded specialization.
SpecializeReport specialize_to_fg(const std::vector<Tgd>& sigma, const std::vector<std::string>& constants = {},
                                  const ChaseConfig& cfg = {});

struct AcyclicReport {
    bool ok = true;
    std::vector<Tgd> tgds;
    std::vector<std::string> log;
};

// Treeifies body and head of each frontier-guarded rule and keeps, for every
// body member, one entailed head member.
AcyclicReport acyclic_fg_composition(const std::vector<Tgd>& sigma, int max_atoms, int max_vars,
                                     const ChaseConfig& cfg = {});

}  // namespace gnfo
