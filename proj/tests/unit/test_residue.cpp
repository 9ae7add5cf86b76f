#include "tmot/residue.hpp"

#include <random>

#include "doctest.h"

using namespace tmot;

static FieldCtx K3 = FieldCtx::make(3, 1);
static Work W{Rat(32), 20, 10};

TEST_CASE("residues at infinity") {
    // Res_inf(t^{-1} dt) = -1, Res_inf(t^k dt) = 0 for k >= 0
    RatDiff w{TPoly::constant(K3, Px::from_int(K3, 1)), TPoly::t(K3)};
    Px r = residue_at_infinity(w, W);
    CHECK(agree_at_precision(r, Px::from_int(K3, -1)));
    for (int kk = 0; kk < 4; ++kk) {
        TPoly tk = TPoly::constant(K3, Px::from_int(K3, 1));
        for (int i = 0; i < kk; ++i) tk = tk * TPoly::t(K3);
        RatDiff wk{tk, TPoly::constant(K3, Px::from_int(K3, 1))};
        CHECK(!residue_at_infinity(wk, W).has_terms());
    }
}

TEST_CASE("residue at theta") {
    RatDiff w{TPoly::constant(K3, Px::from_int(K3, 1)), TPoly::t_minus_theta(K3)};
    CHECK(agree_at_precision(residue_at_theta(w, W), Px::from_int(K3, 1)));
    // double pole has no residue
    RatDiff w2{TPoly::constant(K3, Px::from_int(K3, 1)), TPoly::t_minus_theta(K3) * TPoly::t_minus_theta(K3)};
    CHECK(!residue_at_theta(w2, W).has_terms());
}

TEST_CASE("residue is linear and kills exact differentials") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> c(0, 2), d(0, 5);
    for (int it = 0; it < 20; ++it) {
        // random polynomial g; d(g) = g' dt has zero residue everywhere
        std::vector<Px> coeffs;
        int deg = d(rng);
        for (int i = 0; i <= deg; ++i) coeffs.push_back(Px::from_int(K3, c(rng)));
        TPoly g(K3, coeffs);
        // derivative
        std::vector<Px> dc;
        for (int i = 1; i <= g.deg(); ++i) dc.push_back(g.coeff(i).scaled(Fq::from_int(3, i)));
        TPoly gp(K3, dc);
        RatDiff w{gp, TPoly::constant(K3, Px::from_int(K3, 1))};
        CHECK(!residue_at_infinity(w, W).has_terms());
        CHECK(!residue_at_theta(w, W).has_terms());
    }
    // sum of residues of t^k/(t-theta) dt over both places vanishes
    for (int kk = 0; kk < 3; ++kk) {
        TPoly tk = TPoly::constant(K3, Px::from_int(K3, 1));
        for (int i = 0; i < kk; ++i) tk = tk * TPoly::t(K3);
        RatDiff w{tk, TPoly::t_minus_theta(K3)};
        Px s = residue_at_infinity(w, W) + residue_at_theta(w, W);
        CHECK(!s.has_terms());
    }
}
