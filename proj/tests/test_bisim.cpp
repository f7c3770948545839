#include <gtest/gtest.h>

#include "gnfo/bisim/bisim.hpp"
#include "gnfo/logic/formula.hpp"
#include "support.hpp"

using namespace gnfo;
using support::el;
using support::instance;

namespace {

Instance two_triangles() { return disjoint_union(directed_cycle(3), directed_cycle(3), "l", "r"); }

Signature edge_signature()
{
    Signature sig;
    sig.add_relation("E", 2);
    return sig;
}

}  // namespace

TEST(Cycles, Generator)
{
    EXPECT_EQ(directed_cycle(3).facts, instance("E(n1,n2). E(n2,n3). E(n3,n1).").facts);
    EXPECT_EQ(directed_cycle(1).facts, instance("E(n1,n1).").facts);
    EXPECT_THROW(directed_cycle(0), PreconditionError);
    EXPECT_FALSE(eval_cq(support::q_tri(), directed_cycle(3)).empty());
    EXPECT_TRUE(eval_cq(support::q_tri(), directed_cycle(4)).empty());
}

TEST(GuardedBisim, CyclesAreBisimilar)
{
    for (int k = 3; k <= 7; ++k)
        for (int l = k + 1; l <= 7; ++l) {
            Instance a = directed_cycle(k), b = directed_cycle(l);
            auto w = check_guarded_bisim(a, b);
            ASSERT_TRUE(w) << k << " " << l;
            EXPECT_TRUE(verify_guarded_bisim(a, b, *w));
        }
}

TEST(GuardedBisim, Examples)
{
    Instance a = support::i_ex();
    auto self = check_guarded_bisim(a, a);
    ASSERT_TRUE(self);
    EXPECT_TRUE(verify_guarded_bisim(a, a, *self));
    EXPECT_FALSE(check_guarded_bisim(instance("U(a)."), instance("V(a).")));
}

TEST(GuardedBisim, VerifierRejectsBrokenFamily)
{
    Instance a = directed_cycle(3), b = directed_cycle(4);
    GuardedBisimWitness w{{PartialMap{{el("n1"), el("n2")}, {el("n2"), el("n1")}}}};
    EXPECT_FALSE(verify_guarded_bisim(a, b, w));
}

TEST(GuardedBisim, AgreeOnGfoSentences)
{
    support::Rng rng(109);
    Signature sig = edge_signature();
    sig.add_relation("U", 1);
    int bisimilar = 0;
    for (int round = 0; round < 80; ++round) {
        Instance a = support::random_instance(rng, sig, 3, 4);
        Instance b = support::random_instance(rng, sig, 3, 4);
        if (round % 3 == 0) b = disjoint_union(a, a, "l", "r");
        if (!check_guarded_bisim(a, b)) continue;
        ++bisimilar;
        for (int k = 0; k < 30; ++k) {
            auto f = support::random_gfo_sentence(rng, sig, 3);
            ASSERT_EQ(eval_fo(f, a), eval_fo(f, b)) << to_string(f);
        }
    }
    EXPECT_GE(bisimilar, 20);
}

TEST(StrongGn, Examples)
{
    Instance a = support::i_ex();
    auto self = check_strong_gn(a, a);
    ASSERT_TRUE(self);
    EXPECT_TRUE(verify_strong_gn(a, a, *self));
    EXPECT_FALSE(check_strong_gn(directed_cycle(3), directed_cycle(4)));
    auto w = check_strong_gn(directed_cycle(3), two_triangles());
    ASSERT_TRUE(w);
    EXPECT_TRUE(verify_strong_gn(directed_cycle(3), two_triangles(), *w));
}

TEST(StrongGn, VerdictIsSymmetric)
{
    support::Rng rng(113);
    Signature sig = edge_signature();
    sig.add_relation("U", 1);
    for (int round = 0; round < 60; ++round) {
        Instance a = support::random_instance(rng, sig, 3, 4);
        Instance b = round % 2 ? disjoint_union(a, support::random_instance(rng, sig, 2, 2), "l", "r")
                               : support::random_instance(rng, sig, 3, 4);
        auto ab = check_strong_gn(a, b), ba = check_strong_gn(b, a);
        ASSERT_EQ(ab.has_value(), ba.has_value());
        if (ab) ASSERT_TRUE(verify_strong_gn(a, b, *ab));
    }
}

TEST(StrongGn, GreatestFamilyContainsUnionOfBothDirections)
{
    // The family for (A,B) and the inverted family for (B,A) are both strong
    // GN-bisimulations; their union verifies too.
    Instance a = directed_cycle(3), b = two_triangles();
    auto ab = check_strong_gn(a, b);
    auto ba = check_strong_gn(b, a);
    ASSERT_TRUE(ab && ba);
    StrongGnBisimWitness u = *ab;
    std::set<PartialMap> have(u.family.begin(), u.family.end());
    for (std::size_t i = 0; i < ba->family.size(); ++i) {
        PartialMap inv;
        for (const auto& [x, y] : ba->family[i]) inv[y] = x;
        if (!have.insert(inv).second) continue;
        u.family.push_back(inv);
        u.forward.push_back(ba->backward[i]);
        u.backward.push_back(ba->forward[i]);
    }
    EXPECT_TRUE(verify_strong_gn(a, b, u));
    EXPECT_EQ(u.family.size(), ab->family.size());
}

TEST(StrongGn, ReductToRelations)
{
    Instance a = instance("E(a,b). U(a).");
    Instance b = instance("E(c,d).");
    EXPECT_FALSE(check_strong_gn(a, b));
    EXPECT_TRUE(check_strong_gn(a, b, std::set<std::string>{"E"}));
}

TEST(StrongGn, ConstantsMustMatch)
{
    Instance a = instance("const c = a. E(a,b).");
    Instance b = instance("const c = d. E(e,d).");
    EXPECT_FALSE(check_strong_gn(a, b));
}

TEST(Directional, Examples)
{
    Instance a = support::i_ex();
    EXPECT_TRUE(check_directional(a, {el("a")}, a, {el("a")}));
    EXPECT_TRUE(check_directional(directed_cycle(3), {}, two_triangles(), {}));
    // U(b) holds at b but not at a.
    EXPECT_FALSE(check_directional(a, {el("b")}, a, {el("a")}));
}

TEST(Directional, PreservesGnfFormulas)
{
    support::Rng rng(127);
    Signature sig = edge_signature();
    sig.add_relation("U", 1);
    int pairs = 0;
    for (int round = 0; round < 200 && pairs < 40; ++round) {
        Instance a = support::random_instance(rng, sig, 3, 4);
        Instance b = disjoint_union(a, support::random_instance(rng, sig, 3, 3), "l", "r");
        if (round % 2) std::swap(a, b);
        auto adom = active_domain(a), bdom = active_domain(b);
        if (adom.empty() || bdom.empty()) continue;
        Value x = *std::next(adom.begin(), static_cast<long>(rng() % adom.size()));
        Value y = *std::next(bdom.begin(), static_cast<long>(rng() % bdom.size()));
        if (!check_directional(a, {x}, b, {y})) continue;
        ++pairs;
        for (int k = 0; k < 30; ++k) {
            auto f = support::random_gnf(rng, sig, {"x"}, 3);
            if (eval_fo(f, a, std::nullopt, {{"x", x}})) ASSERT_TRUE(eval_fo(f, b, std::nullopt, {{"x", y}})) << to_string(f);
        }
    }
    EXPECT_GE(pairs, 10);
}

TEST(Amalgam, IdentityGivesBackTheInstance)
{
    Instance a = instance("E(a,b). E(b,c). U(a).");
    auto z = check_strong_gn(a, a);
    ASSERT_TRUE(z);
    Signature sig;
    sig.add_relation("E", 2);
    sig.add_relation("U", 1);
    Instance u = amalgamate(a, a, *z, sig, sig);
    EXPECT_TRUE(find_homomorphism(u, a));
    EXPECT_TRUE(find_homomorphism(a, u));
}

TEST(Amalgam, ProjectionsAreHomomorphisms)
{
    Instance a = directed_cycle(3), b = two_triangles();
    auto z = check_strong_gn(a, b);
    ASSERT_TRUE(z);
    Signature sig = edge_signature();
    Instance u = amalgamate(a, b, *z, sig, sig);
    EXPECT_TRUE(find_homomorphism(u, a));
    EXPECT_TRUE(find_homomorphism(u, b));
}

TEST(Amalgam, DirectionalClaims)
{
    Signature sigma = edge_signature();
    sigma.add_relation("U", 1);
    Signature tau = edge_signature();
    tau.add_relation("V", 1);
    Instance a = instance("E(a1,a2). E(a2,a3). E(a3,a1). U(a1).");
    Instance b = instance("E(b1,b2). E(b2,b3). E(b3,b1). E(c1,c2). E(c2,c3). E(c3,c1). V(b2). V(c3).");
    auto z = check_strong_gn(a, b, std::set<std::string>{"E"});
    ASSERT_TRUE(z);
    Instance u = amalgamate(a, b, *z, sigma, tau);
    EXPECT_TRUE(check_directional(a, {}, restrict_relations(u, {"E", "U"}), {}, std::set<std::string>{"E", "U"}));
    EXPECT_TRUE(check_directional(restrict_relations(u, {"E", "V"}), {}, b, {}, std::set<std::string>{"E", "V"}));
}

TEST(Amalgam, RejectsUnverifiedWitness)
{
    Instance a = directed_cycle(3), b = directed_cycle(4);
    StrongGnBisimWitness bogus;
    bogus.family.push_back({{el("n1"), el("n1")}});
    bogus.forward.push_back({});
    bogus.backward.push_back({});
    Signature sig = edge_signature();
    EXPECT_THROW(amalgamate(a, b, bogus, sig, sig), PreconditionError);
}
