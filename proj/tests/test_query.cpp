#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "gnfo/bisim/bisim.hpp"
#include "gnfo/query/cq.hpp"
#include "support.hpp"

using namespace gnfo;
using support::el;
using support::instance;
using support::query;

TEST(CanonInst, Examples)
{
    auto [I, t] = canon_inst(query("Q(x) :- T(x)."));
    EXPECT_EQ(I.facts, instance("T(x).").facts);
    EXPECT_EQ(t, Tuple{el("x")});

    auto [tri, none] = canon_inst(support::q_tri("R"));
    EXPECT_TRUE(none.empty());
    EXPECT_EQ(tri.size(), 3u);
    EXPECT_TRUE(find_homomorphism(tri, instance("R(a,b). R(b,c). R(c,a).")));

    auto [Ic, tc] = canon_inst(query("const c. Q(x) :- R(x,c)."));
    ASSERT_EQ(Ic.size(), 1u);
    EXPECT_EQ(Ic.facts.begin()->args[1], Ic.constant_value("c"));
}

TEST(EvalCq, Examples)
{
    EXPECT_EQ(eval_cq(support::q_tri(), directed_cycle(3)), std::set<Tuple>{Tuple{}});
    EXPECT_TRUE(eval_cq(support::q_tri(), directed_cycle(4)).empty());
    EXPECT_EQ(eval_cq(query("Q(x) :- R(x,y), U(y)."), support::i_ex()), support::unary({"a"}));
}

TEST(EvalCq, ConstantsInQueries)
{
    Instance I = instance("const c = a. R(a,b). R(b,b).");
    EXPECT_EQ(eval_cq(query("const c. Q(x) :- R(c,x)."), I), support::unary({"b"}));
}

TEST(EvalCq, AgreesWithAssignmentEnumeration)
{
    support::Rng rng(3);
    for (int round = 0; round < 300; ++round) {
        Signature sig = support::random_signature(rng, 3, 3);
        Instance I = support::random_instance(rng, sig, 5, 8);
        ConjunctiveQuery q = support::random_cq(rng, sig, 3, 4, 2);
        ASSERT_EQ(eval_cq(q, I), support::naive_eval_cq(q, I)) << to_string(q);
    }
}

TEST(Containment, Examples)
{
    auto tri = support::q_tri("R");
    auto loop = query("Q() :- R(x,x).");
    EXPECT_TRUE(cq_contained(tri, tri));
    EXPECT_TRUE(cq_contained(loop, tri));
    EXPECT_FALSE(cq_contained(tri, loop));
}

TEST(Containment, IsAPreorder)
{
    support::Rng rng(7);
    Signature sig;
    sig.add_relation("R", 2);
    sig.add_relation("U", 1);
    for (int round = 0; round < 200; ++round) {
        auto a = support::random_cq(rng, sig, 3, 3, 1);
        auto b = support::random_cq(rng, sig, 2, 3, 1);
        auto c = support::random_cq(rng, sig, 2, 2, 1);
        if (a.free_vars.size() != 1 || b.free_vars.size() != 1 || c.free_vars.size() != 1) continue;
        ASSERT_TRUE(cq_contained(a, a));
        if (cq_contained(a, b) && cq_contained(b, c)) ASSERT_TRUE(cq_contained(a, c));
    }
}

TEST(Core, Examples)
{
    auto q = query("Q(x) :- R(x,y), R(x,z).");
    auto c = core_cq(q);
    EXPECT_EQ(c.atoms.size(), 1u);
    EXPECT_TRUE(cq_equivalent(c, q));
    EXPECT_EQ(core_cq(support::q_tri()).atoms.size(), 3u);
    auto dup = ConjunctiveQuery::make({"x"}, {make_atom("T", {"x"}), make_atom("T", {"x"})});
    EXPECT_EQ(core_cq(dup).atoms.size(), 1u);
}

TEST(Core, EquivalentAndIdempotent)
{
    support::Rng rng(13);
    Signature sig;
    sig.add_relation("R", 2);
    sig.add_relation("U", 1);
    for (int round = 0; round < 200; ++round) {
        auto q = support::random_cq(rng, sig, 4, 4, 1);
        auto c = core_cq(q);
        ASSERT_TRUE(cq_equivalent(c, q)) << to_string(q);
        ASSERT_LE(c.atoms.size(), q.atoms.size());
        ASSERT_EQ(core_cq(c).atoms.size(), c.atoms.size());
    }
}

TEST(AnswerGuarded, Examples)
{
    EXPECT_TRUE(is_answer_guarded(query("Q(x) :- T(x).")));
    EXPECT_FALSE(is_answer_guarded(query("Q(x,y) :- R(x,z), R(z,y).")));
    EXPECT_TRUE(is_answer_guarded(support::q_tri()));
}

TEST(Acyclic, Examples)
{
    EXPECT_TRUE(is_acyclic(query("Q(x) :- A(x), R(x,y).")));
    EXPECT_FALSE(is_acyclic(support::q_tri("R")));
    EXPECT_TRUE(is_acyclic(query("Q() :- S(x,y,z).")));
    // A ternary atom covering the triangle makes it acyclic.
    EXPECT_TRUE(is_acyclic(query("Q() :- R(x,y), R(y,z), R(z,x), S(x,y,z).")));
}

namespace {

// Brute force: some tree on the atoms satisfies the running-intersection property.
bool has_join_tree(const std::vector<Atom>& atoms)
{
    const int n = static_cast<int>(atoms.size());
    if (n <= 1) return true;
    std::vector<std::set<std::string>> vs;
    for (const Atom& a : atoms) {
        auto v = atom_vars(a);
        vs.emplace_back(v.begin(), v.end());
    }
    // Enumerate parent vectors: parent[i] < n for i >= 1, rooted at 0, acyclic.
    std::vector<int> parent(n, 0);
    std::function<bool(int)> rec = [&](int i) -> bool {
        if (i == n) {
            for (int j = 1; j < n; ++j) {
                std::set<int> seen;
                int k = j;
                while (k != 0) {
                    if (!seen.insert(k).second) return false;
                    k = parent[k];
                }
            }
            // Running intersection: for each variable the atoms containing it are connected.
            std::set<std::string> all;
            for (const auto& s : vs) all.insert(s.begin(), s.end());
            for (const auto& x : all) {
                std::vector<int> holders;
                for (int j = 0; j < n; ++j)
                    if (vs[j].count(x)) holders.push_back(j);
                // Connected iff exactly one holder has a parent that is not a holder (or is the root).
                int tops = 0;
                for (int j : holders)
                    if (j == 0 || !vs[parent[j]].count(x)) ++tops;
                if (tops != 1) return false;
            }
            return true;
        }
        for (int p = 0; p < n; ++p) {
            if (p == i) continue;
            parent[i] = p;
            if (rec(i + 1)) return true;
        }
        return false;
    };
    return rec(1);
}

}  // namespace

TEST(Acyclic, AgreesWithJoinTreeSearch)
{
    support::Rng rng(19);
    Signature sig;
    sig.add_relation("R", 2);
    sig.add_relation("S", 3);
    sig.add_relation("U", 1);
    for (int round = 0; round < 300; ++round) {
        auto atoms = support::random_atoms(rng, sig, 1 + round % 4, 4);
        auto q = ConjunctiveQuery::make({}, atoms);
        ASSERT_EQ(is_acyclic(q), has_join_tree(q.atoms)) << to_string(q);
    }
}

TEST(Treeify, Examples)
{
    Signature sig;
    sig.add_relation("R", 2);
    auto t = treeify(support::q_tri("R"), 3, 3, &sig);
    ASSERT_EQ(t.disjuncts.size(), 1u);
    EXPECT_TRUE(cq_equivalent(t.disjuncts[0], query("Q() :- R(x,x).")));

    auto tq = treeify(query("Q(x) :- T(x)."), 2, 2);
    ASSERT_EQ(tq.disjuncts.size(), 1u);
    EXPECT_TRUE(cq_equivalent(tq.disjuncts[0], query("Q(x) :- T(x).")));

    auto path = query("Q(x) :- R(x,y), R(y,z).");
    auto tp = treeify(path, 3, 3);
    EXPECT_TRUE(std::any_of(tp.disjuncts.begin(), tp.disjuncts.end(),
                            [&](const ConjunctiveQuery& m) { return cq_equivalent(m, core_cq(path)); }));
}

TEST(Treeify, MembersAreAcyclicAndEntailSource)
{
    Signature sig;
    sig.add_relation("R", 2);
    sig.add_relation("U", 1);
    support::Rng rng(29);
    for (int round = 0; round < 20; ++round) {
        auto q = support::random_cq(rng, sig, 3, 3, 1);
        if (!is_answer_guarded(q)) continue;
        auto t = treeify(q, 3, 3, &sig);
        for (const auto& m : t.disjuncts) {
            ASSERT_TRUE(is_acyclic(m));
            ASSERT_TRUE(cq_contained(m, q));
            ASSERT_TRUE(is_answer_guarded(m));
        }
    }
}

TEST(Treeify, RejectsBadInput)
{
    EXPECT_THROW(treeify(support::q_tri(), 0, 3), PreconditionError);
    EXPECT_THROW(treeify(query("Q(x,y) :- R(x,z), R(z,y)."), 3, 3), PreconditionError);
}

TEST(CanonicalForm, RenamingInvariant)
{
    auto a = query("Q(x) :- R(x,y), U(y).");
    auto b = query("Q(u) :- U(w), R(u,w).");
    EXPECT_EQ(serialize(canonical_form(a)), serialize(canonical_form(b)));
}
