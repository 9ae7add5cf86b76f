#include "tmot/hodge_pink.hpp"

#include "doctest.h"

using namespace tmot;

static Work W{Rat(48), 30, 12};

static AndersonModule carlitz(const FieldCtx& k) {
    return AndersonModule::make(k, 1, {PxMat(1, 1, Px::theta(k)), PxMat(1, 1, Px::from_int(k, 1))});
}

static AMotive triangular_example(const FieldCtx& k, const TPoly& b, const Work& w) {
    TPolyMat phi(2, 2, TPoly::zero(k));
    phi.at(0, 0) = TPoly::t_minus_theta(k);
    phi.at(0, 1) = b;
    TPoly c = TPoly::t_minus_theta(k);
    phi.at(1, 1) = c * c * c;
    return make_amotive(phi, 0, w);
}

TEST_CASE("hodge-pink weights of the triangular family") {
    FieldCtx k = FieldCtx::make(3, 1);
    std::vector<FlagStep> flag = {{Rat(1), 1}, {Rat(3), 2}};
    // (t-theta) | b: weights (1,3); otherwise (0,4)
    std::vector<std::pair<TPoly, std::vector<long long>>> cases;
    TPoly tm = TPoly::t_minus_theta(k);
    cases.push_back({TPoly::zero(k) + tm, {1, 3}});
    cases.push_back({tm * tm, {1, 3}});
    cases.push_back({tm.scaled(Px::zeta(k)), {1, 3}});
    cases.push_back({tm * tm * tm, {1, 3}});
    cases.push_back({TPoly::constant(k, Px::from_int(k, 1)), {0, 4}});
    cases.push_back({TPoly::constant(k, Px::zeta(k)), {0, 4}});
    cases.push_back({TPoly::t(k), {0, 4}});
    cases.push_back({tm + TPoly::constant(k, Px::from_int(k, 1)), {0, 4}});
    for (auto& [b, expect] : cases) {
        AMotive M = triangular_example(k, b, W);
        Trivialization t = rigid_trivialization(M, W);
        HPStructure H = hp_of_motive(M, t, flag, W);
        CHECK(hp_weights(H, W) == expect);
        // dual side: weights are the negatives, reversed
        DualAMotive Md;
        Md.phi = M.phi.transposed();
        Md.jshift = 0;
        Md.dj = M.dj;
        HPStructure Hd = hp_of_dual_motive(Md, t, {{Rat(-3), 1}, {Rat(-1), 2}}, W);
        std::vector<long long> dual_expect = {-expect[1], -expect[0]};
        CHECK(hp_weights(Hd, W) == dual_expect);
        // deg_q = dim M and the polygon chain
        CHECK(hp_total_degree(H, W) == 4);
        PolygonReport pr = polygons_compare(H, W);
        CHECK(pr.wp_above_hp);
        CHECK(pr.endpoints_equal);
    }
}

TEST_CASE("carlitz hodge-pink structures") {
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1)}) {
        AndersonModule C = carlitz(k);
        AMotive M = motive_of(C, W);
        Trivialization t = rigid_trivialization(M, W);
        HPStructure H1 = hp_of_motive(M, t, {{Rat(1), 1}}, W);
        CHECK(hp_weights(H1, W) == std::vector<long long>{1});
        // H_1(E): q = u p, weight -1
        LatticeResult lat = drinfeld_lattice(C, t, W);
        HPStructure HE = hp_of_anderson(C, lat.basis, W);
        CHECK(hp_weights(HE, W) == std::vector<long long>{-1});
        auto o = HE.U.at(0, 0).ord();
        REQUIRE(o.has_value());
        CHECK(*o == 1);
        // unit object: q = p, weight 0, tensor identity
        HPStructure one = hp_unit(k, W);
        HPStructure HT = hp_tensor(H1, one, W);
        CHECK(hp_weights(HT, W) == hp_weights(H1, W));
        // dual weights are negated and reversed
        HPStructure Hd = hp_dual(H1, W);
        CHECK(hp_weights(Hd, W) == std::vector<long long>{-1});
    }
}

TEST_CASE("filtration dims lose the fine data") {
    // q = (z-zeta)^2 p + span(v0 + (z-zeta) v1): F-dims (2,1,1,0) on i=-2..1
    FieldCtx k = FieldCtx::make(2, 1);
    long long N = W.u_order;
    LSMat G(2, 3, LS::zero(k, LVar::u, N));
    // v0 = e1, v1 = e2
    G.at(0, 0) = LS::constant(k, LVar::u, N, Px::from_int(k, 1));
    G.at(1, 0) = LS::uniformizer_pow(k, LVar::u, N, 1);
    G.at(0, 1) = LS::uniformizer_pow(k, LVar::u, N, 2);
    G.at(1, 2) = LS::uniformizer_pow(k, LVar::u, N, 2);
    HPStructure H;
    H.wt = {Rat(0), Rat(0)};
    H.U = lattice_basis_from_generators(G, W);
    auto wts = hp_weights(H, W);
    CHECK(wts == std::vector<long long>{-2, 0});
    auto dims = hp_filtration_dims(H, W);
    // i = -2 -> 2, i = -1 -> 1, i = 0 -> 1, i = 1 -> 0
    std::vector<int> got;
    for (auto& [i, d] : dims) got.push_back(d);
    CHECK(got == std::vector<int>{2, 1, 1, 0});
}

TEST_CASE("degrees and semistability") {
    FieldCtx k = FieldCtx::make(3, 1);
    // pure motive: H' = H gives deg_q = deg^W = mu * r
    AndersonModule C = carlitz(k);
    AMotive M = motive_of(C, W);
    Trivialization t = rigid_trivialization(M, W);
    HPStructure H = hp_of_motive(M, t, {{Rat(1), 1}}, W);
    SemistabilityReport rep = degrees_and_semistability(H, {}, W);
    CHECK(rep.consistent);
    CHECK(rep.filtration_equalities);
    REQUIRE(!rep.checks.empty());
    CHECK(rep.checks[0].deg_q == 1);
    CHECK(rep.checks[0].deg_w == Rat(1));

    // the triangular family: every check passes, equality on the filtration
    AMotive T = triangular_example(k, TPoly::t_minus_theta(k), W);
    Trivialization tt = rigid_trivialization(T, W);
    HPStructure HT = hp_of_motive(T, tt, {{Rat(1), 1}, {Rat(3), 2}}, W);
    SemistabilityReport r2 = degrees_and_semistability(HT, {}, W);
    CHECK(r2.consistent);
    CHECK(r2.filtration_equalities);

    // Drinfeld H_1(E): proper subspaces give strict inequality
    AndersonModule D = AndersonModule::make(
        k, 1, {PxMat(1, 1, Px::theta(k)), PxMat(1, 1, Px::from_int(k, 1)), PxMat(1, 1, Px::from_int(k, 1))});
    AMotive MD = motive_of(D, W);
    Trivialization td = rigid_trivialization(MD, W);
    LatticeResult lat = drinfeld_lattice(D, td, W);
    HPStructure HD = hp_of_anderson(D, lat.basis, W);
    SemistabilityReport r3 = degrees_and_semistability(HD, {}, W);
    CHECK(r3.consistent);
    for (auto& c : r3.checks) {
        if (c.label == "e_1" || c.label == "e_2") CHECK(Rat(c.deg_q) < c.deg_w);
    }
    // zero-degree sanity on a user subspace equal to a coordinate line
    long long N = W.u_order;
    LSMat B(2, 1, LS::zero(k, LVar::z, N));
    B.at(0, 0) = LS::constant(k, LVar::z, N, Px::from_int(k, 1));
    SemistabilityReport r4 = degrees_and_semistability(HD, {B}, W);
    CHECK(r4.consistent);
}

TEST_CASE("compatibility of the three structures") {
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1)}) {
        AndersonModule C = carlitz(k);
        CompatReport rep = compatibility_checks(C, W);
        CHECK(rep.h1e_vs_dual);
        CHECK(rep.h1e_vs_motive);
        CHECK(rep.square_commutes);
        CHECK(rep.weights_h1e == rep.weights_h1m);
        // a rank-2 module with constant coefficients
        AndersonModule D = AndersonModule::make(
            k, 1,
            {PxMat(1, 1, Px::theta(k)), PxMat(1, 1, Px::from_fq(k, Fq::generator(k.p, 2))),
             PxMat(1, 1, Px::from_int(k, 1))});
        CompatReport r2 = compatibility_checks(D, W);
        CHECK(r2.h1e_vs_dual);
        CHECK(r2.h1e_vs_motive);
        CHECK(r2.square_commutes);
    }
}

TEST_CASE("tensor weights on rank-1 factors") {
    FieldCtx k = FieldCtx::make(2, 1);
    Work w = W;
    AndersonModule C = carlitz(k);
    AMotive M = motive_of(C, w);
    Trivialization t = rigid_trivialization(M, w);
    HPStructure H1 = hp_of_motive(M, t, {{Rat(1), 1}}, w);
    HPStructure H2 = hp_tensor(H1, H1, w);
    CHECK(hp_weights(H2, w) == std::vector<long long>{2});
    HPStructure H3 = hp_hom(H1, H2, w);
    CHECK(hp_weights(H3, w) == std::vector<long long>{1});
}
