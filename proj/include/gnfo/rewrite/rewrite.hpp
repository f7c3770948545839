#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gnfo/chase/chase.hpp"
#include "gnfo/datalog/datalog.hpp"
#include "gnfo/query/cq.hpp"
#include "gnfo/tgd/tgd.hpp"

namespace gnfo {

struct RewriteConfig {
    ChaseConfig chase{ChaseMode::restricted, 32, 20000, 1};
    int max_atoms = 3;       // body atoms per candidate (raised to cover the input rules)
    int max_vars = 0;        // 0: max(body variables of sigma, query variables)
    long max_bodies = 50000; // candidate bodies certified before giving up
    int jobs = 1;
};

enum class Completeness { complete_within_caps, capped };

struct CertEntry {
    std::string candidate;
    Verdict verdict = Verdict::unknown;
};

struct RewriteArtifacts {
    DatalogProgram program;
    std::vector<CertEntry> log;  // entailed rules and bodies with unknown verdicts
    Completeness completeness = Completeness::complete_within_caps;
    int max_atoms = 0;
    int max_vars = 0;
    long bodies = 0;
    long entailed = 0;
    long rejected = 0;
    long unknown = 0;
    std::vector<std::pair<std::string, ConjunctiveQuery>> query_predicates;
};

std::string to_string(Completeness c);

// Guarded bodies (guard atom plus side atoms over its variables) over sig.
std::vector<std::vector<Atom>> enumerate_guarded_bodies(const Signature& sig, int max_atoms);

// Full guarded single-head TGDs, bodies reduced to cores, one per renaming class.
std::vector<Tgd> enumerate_full_guarded_candidates(const Signature& sig, const std::optional<std::string>& head_rel,
                                                   int max_atoms = 3);

std::vector<Tgd> derive_full_guarded(const std::vector<Tgd>& sigma, const RewriteConfig& cfg = {},
                                     RewriteArtifacts* artifacts = nullptr);

// Query extension predicate name for q.
std::string query_predicate_name(const ConjunctiveQuery& q);

// Rules guard & side atoms -> R_q(x) for q in `family`, certified by the chase.
std::vector<DatalogRule> query_generation_rules(const std::vector<Tgd>& sigma,
                                                const std::vector<ConjunctiveQuery>& family,
                                                const RewriteConfig& cfg = {}, RewriteArtifacts* artifacts = nullptr);

// Pieces of Q after variable identification and atom grouping.
std::vector<ConjunctiveQuery> query_family(const ConjunctiveQuery& q);
std::vector<DatalogRule> goal_rules(const ConjunctiveQuery& q, int k, const std::string& goal = "Goal");

RewriteArtifacts rewrite_atomic_guarded(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q,
                                        const RewriteConfig& cfg = {});
RewriteArtifacts rewrite_cq_guarded(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q,
                                    const RewriteConfig& cfg = {});

// Predicates R_S per position subset S (1-based digits, `R_0` for the empty
// set, unary over `_top`) and the axioms R -> R_S, R_S -> exists R.
std::pair<Signature, std::vector<Tgd>> guard_extension_axioms(const Signature& sig);
std::string guard_extension_name(const std::string& rel, const std::vector<int>& positions);

RewriteArtifacts rewrite_fg(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q, const RewriteConfig& cfg = {});

struct OracleAnswer {
    std::set<Tuple> answers;
    bool complete = false;
};

OracleAnswer certain_answers_oracle(const std::vector<Tgd>& sigma, const ConjunctiveQuery& q, const Instance& A,
                                    const ChaseConfig& cfg = {});

// Datalog text with a metadata header.
std::string serialize_artifacts(const RewriteArtifacts& a);

}  // namespace gnfo
