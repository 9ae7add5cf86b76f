#include "tmot/skew.hpp"

#include <random>

#include "doctest.h"

using namespace tmot;

static FieldCtx K2 = FieldCtx::make(2, 1);
static FieldCtx K3 = FieldCtx::make(3, 1);

static SkewPoly rand_skew(std::mt19937_64& rng, const FieldCtx& k, Side s, int maxdeg) {
    std::uniform_int_distribution<int> d(0, maxdeg), e(-2, 4), c(0, (int)k.q - 1);
    std::vector<Px> coeffs;
    int deg = d(rng);
    for (int i = 0; i <= deg; ++i) coeffs.push_back(Px::monomial(k, Fq::from_int(k.p, c(rng)), Rat(e(rng))));
    return SkewPoly(k, s, std::move(coeffs));
}

TEST_CASE("commutation rule") {
    // tau * b = b^q * tau
    for (auto k : {K2, K3}) {
        Px b = Px::from_int(k, 1) + Px::zeta(k);
        SkewPoly tau = SkewPoly::variable(k, Side::tau);
        SkewPoly lhs = tau * SkewPoly::constant(k, Side::tau, b);
        SkewPoly rhs = SkewPoly::constant(k, Side::tau, b.frob_sigma()) * tau;
        CHECK((lhs - rhs).is_zero());
    }
}

TEST_CASE("(theta + tau)^2 via the rule and via evaluation") {
    for (auto k : {K2, K3}) {
        Px th = Px::theta(k);
        SkewPoly f(k, Side::tau, {th, Px::from_int(k, 1)});
        SkewPoly sq = f * f;
        // coefficients: theta^2 + (theta^q + theta) tau + tau^2
        CHECK(agree_at_precision(sq.coeff(0), th * th));
        CHECK(agree_at_precision(sq.coeff(1), th.frob_sigma() + th));
        CHECK(agree_at_precision(sq.coeff(2), Px::from_int(k, 1)));
        // oracle: evaluation as F_q-linear maps on random points
        std::mt19937_64 rng(5);
        for (int i = 0; i < 10; ++i) {
            std::uniform_int_distribution<int> e(-2, 5);
            Px x = Px::monomial(k, Fq::one(k.p), Rat(e(rng))) + Px::from_int(k, e(rng));
            CHECK(agree_at_precision(sq.apply(x), f.apply(f.apply(x))));
        }
    }
}

TEST_CASE("associativity and distributivity on random triples") {
    std::mt19937_64 rng(77);
    for (auto k : {K2, K3}) {
        for (int it = 0; it < 20; ++it) {
            auto a = rand_skew(rng, k, Side::tau, 3);
            auto b = rand_skew(rng, k, Side::tau, 3);
            auto c = rand_skew(rng, k, Side::tau, 3);
            CHECK(((a * b) * c - a * (b * c)).is_zero());
            CHECK((a * (b + c) - (a * b + a * c)).is_zero());
        }
    }
}

TEST_CASE("skew_mul agrees with composition of induced maps") {
    std::mt19937_64 rng(99);
    FieldCtx k = K3;
    for (int it = 0; it < 10; ++it) {
        auto a = rand_skew(rng, k, Side::tau, 2);
        auto b = rand_skew(rng, k, Side::tau, 2);
        std::uniform_int_distribution<int> e(-1, 3);
        Px x = Px::monomial(k, Fq::gen_pow(k.p, 2, (uint64_t)(e(rng) + 2)), Rat(e(rng)));
        CHECK(agree_at_precision((a * b).apply(x), a.apply(b.apply(x))));
    }
}

TEST_CASE("dagger") {
    FieldCtx k = K3;
    // (b tau)^dagger = b^{1/q} taucheck on 1x1 matrices
    Px b = Px::theta(k) + Px::zeta(k);
    SkewMat B(1, 1, SkewPoly(k, Side::tau, {Px::zero(k), b}));
    SkewMat Bd = dagger(B);
    CHECK(agree_at_precision(Bd.at(0, 0).coeff(1), b.frob_sigma_check()));
    // anti-homomorphism on random 2x2 pairs
    std::mt19937_64 rng(123);
    for (int it = 0; it < 25; ++it) {
        SkewMat X(2, 2, SkewPoly::zero(k, Side::tau)), Y(2, 2, SkewPoly::zero(k, Side::tau));
        for (auto m : {&X, &Y})
            for (auto& e : m->a) e = rand_skew(rng, k, Side::tau, 2);
        SkewMat lhs = dagger(skew_mul(X, Y));
        SkewMat rhs = skew_mul(dagger(Y), dagger(X));
        for (size_t i = 0; i < 4; ++i) CHECK((lhs.a[i] - rhs.a[i]).is_zero());
        // involutive up to the inverse operation
        SkewMat back = dagger_inverse(dagger(X));
        for (size_t i = 0; i < 4; ++i) CHECK((back.a[i] - X.a[i]).is_zero());
    }
    // identity^dagger = identity
    SkewMat I = skew_identity(k, Side::tau, 3);
    SkewMat Id = dagger(I);
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 3; ++j) CHECK((Id.at(i, j) - (i == j ? SkewPoly::constant(k, Side::taucheck, Px::from_int(k, 1)) : SkewPoly::zero(k, Side::taucheck))).is_zero());
}

TEST_CASE("series inverse") {
    FieldCtx k = K2;
    // (1 - tau)^{-1} = 1 + tau + tau^2 + ...
    SkewPoly f(k, Side::tau, {Px::from_int(k, 1), -Px::from_int(k, 1)});
    SkewPoly g = skew_series_inverse(f, 5, Prec(Rat(20)));
    for (int i = 0; i <= 5; ++i) CHECK(agree_at_precision(g.coeff(i), Px::from_int(k, 1)));
    SkewPoly prod = f * g;
    CHECK(agree_at_precision(prod.coeff(0), Px::from_int(k, 1)));
    for (int i = 1; i <= 5; ++i) CHECK(!prod.coeff(i).has_terms());
    // constant b0: inverse is b0^{-1}
    SkewPoly c = SkewPoly::constant(k, Side::tau, Px::zeta(k));
    SkewPoly ci = skew_series_inverse(c, 3, Prec(Rat(20)));
    CHECK(agree_at_precision(ci.coeff(0), Px::monomial(k, Fq::one(2), Rat(-1))));
}
