#pragma once

// Random generators and naive reference implementations used as oracles.

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gnfo/core/model.hpp"
#include "gnfo/datalog/datalog.hpp"
#include "gnfo/logic/formula.hpp"
#include "gnfo/query/cq.hpp"
#include "gnfo/tgd/tgd.hpp"

namespace support {

using Rng = std::mt19937;

gnfo::Signature random_signature(Rng& rng, int relations, int max_arity);
gnfo::Instance random_instance(Rng& rng, const gnfo::Signature& sig, int elements, int facts);
std::vector<gnfo::Atom> random_atoms(Rng& rng, const gnfo::Signature& sig, int atoms, int vars);
gnfo::ConjunctiveQuery random_cq(Rng& rng, const gnfo::Signature& sig, int atoms, int vars, int free);

enum class TgdShape { any, guarded, frontier_guarded };
gnfo::Tgd random_tgd(Rng& rng, const gnfo::Signature& sig, TgdShape shape, bool allow_existentials = true);
std::vector<gnfo::Tgd> random_theory(Rng& rng, const gnfo::Signature& sig, int rules, TgdShape shape,
                                     bool allow_existentials = true);

// Datalog program over edb `sig` with fresh IDB relations and goal "Goal".
gnfo::DatalogProgram random_program(Rng& rng, const gnfo::Signature& sig, int rules);

// Formulas: GNF by construction when gnf is true; GFO sentences otherwise.
gnfo::FormulaPtr random_gnf(Rng& rng, const gnfo::Signature& sig, const std::vector<std::string>& free, int depth);
gnfo::FormulaPtr random_gfo_sentence(Rng& rng, const gnfo::Signature& sig, int depth);
gnfo::FormulaPtr random_fo(Rng& rng, const gnfo::Signature& sig, const std::vector<std::string>& free, int depth);

// All assignments of the variables of q over adom(I) and constants.
std::set<gnfo::Tuple> naive_eval_cq(const gnfo::ConjunctiveQuery& q, const gnfo::Instance& I);

// Direct recursive evaluation without indexing.
bool naive_eval_fo(const gnfo::FormulaPtr& f, const gnfo::Instance& I, const std::set<gnfo::Value>& domain,
                   std::map<std::string, gnfo::Value> binding = {});

// Recompute-all fixpoint by assignment enumeration.
std::set<gnfo::Tuple> naive_datalog(const gnfo::DatalogProgram& P, const gnfo::Instance& I);

// First homomorphism in the enumeration of all maps adom(S) -> adom(T) ∪ constants.
bool exhaustive_homomorphism_exists(const gnfo::Instance& S, const gnfo::Instance& T,
                                    const std::map<gnfo::Value, gnfo::Value>& seed = {});

gnfo::Value el(const std::string& n);
gnfo::Instance instance(const std::string& text);
gnfo::ConjunctiveQuery query(const std::string& text);
gnfo::Tgd tgd(const std::string& text);
std::vector<gnfo::Tgd> theory(const std::string& text);
gnfo::FormulaPtr formula(const std::string& text);
std::set<gnfo::Tuple> unary(const std::vector<std::string>& names);

// Sigma and I from the running example, the triangle query.
std::vector<gnfo::Tgd> sigma_ex();
gnfo::Instance i_ex();
gnfo::ConjunctiveQuery q_tri(const std::string& rel = "E");

}  // namespace support
