#include "tmot/puiseux.hpp"

#include <random>

#include "doctest.h"

using namespace tmot;

static FieldCtx K2 = FieldCtx::make(2, 1);
static FieldCtx K3 = FieldCtx::make(3, 1);
static FieldCtx K4 = FieldCtx::make(2, 2);

static Px random_px(std::mt19937_64& rng, const FieldCtx& k, int maxterms = 5, bool exact = false) {
    std::uniform_int_distribution<int> nt(0, maxterms);
    std::uniform_int_distribution<long long> num(-8, 20);
    std::uniform_int_distribution<long long> den(1, 3);
    std::uniform_int_distribution<uint64_t> cf(0, 7);
    Px x = exact ? Px::zero(k) : Px::zero_mod(k, Rat(24));
    int n = nt(rng);
    for (int i = 0; i < n; ++i) {
        Fq c = Fq::gen_pow(k.p, 2, cf(rng));
        x = x + Px::monomial(k, c, Rat(num(rng), den(rng)));
    }
    return x;
}

TEST_CASE("polynomial identities") {
    // (1+z)(1-z) = 1-z^2
    Px z = Px::zeta(K3);
    Px one = Px::from_int(K3, 1);
    Px lhs = (one + z) * (one - z);
    Px rhs = one - z * z;
    CHECK(lhs.identical(rhs));
    CHECK(lhs.is_exact());
}

TEST_CASE("valuation of monomials") {
    Px x = Px::monomial(K2, Fq::one(2), Rat(3, 2));
    REQUIRE(x.val().has_value());
    CHECK(*x.val() == Rat(3, 2));
    CHECK(x.ramification() == 2);
}

TEST_CASE("geometric series inverse") {
    // (1 - z)^{-1} = 1 + z + z^2 + O(z^3)
    Px z = Px::zeta(K2);
    Px one = Px::from_int(K2, 1);
    Px inv = (one - z).inv(Prec(Rat(3)));
    Px expect = (one + z + z * z).with_prec(Prec(Rat(3)));
    CHECK(inv.identical(expect));
}

TEST_CASE("precision propagation") {
    Px x = (Px::from_int(K2, 1) + Px::zeta(K2)).with_prec(Prec(Rat(5)));
    Px y = Px::monomial(K2, Fq::one(2), Rat(-2));
    Px prod = x * y;  // precision 5 + (-2) = 3
    REQUIRE(prod.prec().has_value());
    CHECK(*prod.prec() == Rat(3));
    // sigma multiplies precision by q, sigma-check divides
    CHECK(*x.frob_sigma().prec() == Rat(10));
    CHECK(*x.frob_sigma_check().prec() == Rat(5, 2));
    CHECK(x.frob_sigma().frob_sigma_check().identical(x));
}

TEST_CASE("ultrametric on random samples") {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 300; ++i) {
        Px a = random_px(rng, K3), b = random_px(rng, K3);
        if (!a.has_terms() || !b.has_terms()) continue;
        Px s = a + b;
        Rat va = *a.val(), vb = *b.val();
        if (s.has_terms()) CHECK(*s.val() >= std::min(va, vb));
        if (va != vb && s.has_terms()) CHECK(*s.val() == std::min(va, vb));
        // sigma is multiplicative
        CHECK(agree_at_precision((a * b).frob_sigma(), a.frob_sigma() * b.frob_sigma()));
    }
}

TEST_CASE("eta: root of y^(q-1) = -zeta") {
    for (auto k : {K3, K4}) {
        Px mz = -Px::zeta(k);
        Px eta = mz.nth_root(k.q - 1, Prec(Rat(20)));
        CHECK(*eta.val() == Rat(1, (long long)(k.q - 1)));
        Px pw = eta.pow((long long)(k.q - 1));
        CHECK(agree_at_precision(pw, mz));
        // deterministic
        Px eta2 = mz.nth_root(k.q - 1, Prec(Rat(20)));
        CHECK(eta.identical(eta2));
    }
}

TEST_CASE("nth_root of full series via Hensel") {
    std::mt19937_64 rng(777);
    for (int i = 0; i < 40; ++i) {
        Px x = random_px(rng, K3);
        if (!x.has_terms()) continue;
        for (uint64_t n : {2ull, 3ull, 6ull, 9ull}) {
            Px r = x.nth_root(n, Prec(Rat(12)));
            Px back = r.pow((long long)n);
            CHECK((back - x).with_prec(Prec(Rat(6))).is_known_zero());
        }
    }
}

TEST_CASE("serialization round trip") {
    std::mt19937_64 rng(999);
    for (int i = 0; i < 60; ++i) {
        Px x = random_px(rng, K4, 4, i % 2 == 0);
        std::string s = x.str();
        auto back = Px::parse(K4, s);
        REQUIRE(back.has_value());
        CHECK(back->identical(x));
    }
}
