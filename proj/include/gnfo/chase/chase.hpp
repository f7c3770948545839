#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/query/cq.hpp"
#include "gnfo/tgd/tgd.hpp"

namespace gnfo {

enum class ChaseMode { restricted, oblivious_dedup };

struct ChaseConfig {
    ChaseMode mode = ChaseMode::restricted;
    int max_rounds = 64;
    long max_facts = 200000;
    long null_seed = 1;

    void validate() const;
};

enum class ChaseStatus { terminated, budget_exhausted };

struct ChaseResult {
    Instance result;
    int rounds_executed = 0;
    ChaseStatus status = ChaseStatus::terminated;
    long nulls_created = 0;
    // Filled for frontier-guarded inputs: fact -> origin id, where origins[id]
    // is the guarded set of the input the tentacle hangs from.
    bool tracked = false;
    std::map<Fact, int> tentacle_map;
    std::vector<std::set<Value>> origins;
};

ChaseResult chase(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg = {});

enum class Verdict { yes, no, unknown };

std::string to_string(Verdict v);
std::string to_string(ChaseStatus s);

Verdict chase_entails_cq(const Instance& A, const std::vector<Tgd>& sigma, const ConjunctiveQuery& q,
                         const Tuple& answer, const ChaseConfig& cfg = {});

// Body variables are frozen to elements named after them.
Verdict entails_tgd(const std::vector<Tgd>& sigma, const Tgd& t, const ChaseConfig& cfg = {});

struct SaturationVerdict {
    Verdict verdict = Verdict::unknown;
    std::optional<Fact> witness;
};

// Entailed facts over adom(A) and the constants that are missing from A.
// `complete` reports whether the chase terminated.
std::set<Fact> missing_entailed_facts(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg,
                                      bool* complete);

SaturationVerdict is_fact_saturated(const Instance& A, const std::vector<Tgd>& sigma, const ChaseConfig& cfg = {});
SaturationVerdict is_guardedly_fact_saturated(const Instance& A, const std::vector<Tgd>& sigma,
                                              const ChaseConfig& cfg = {});

Tentacles tentacle_decomposition(const ChaseResult& res, const Instance& A);

}  // namespace gnfo
