#include "tmot/motives.hpp"

#include <random>

#include "doctest.h"

using namespace tmot;

static Work W{Rat(48), 30, 10};

static AndersonModule carlitz(const FieldCtx& k) {
    return AndersonModule::make(k, 1, {PxMat(1, 1, Px::theta(k)), PxMat(1, 1, Px::from_int(k, 1))});
}

static AndersonModule drinfeld(const FieldCtx& k, std::vector<Px> alphas) {
    std::vector<PxMat> d = {PxMat(1, 1, Px::theta(k))};
    for (auto& a : alphas) d.push_back(PxMat(1, 1, a));
    return AndersonModule::make(k, 1, d);
}

// the running triangular example phi = [[t-theta, b],[0,(t-theta)^3]]
static AMotive triangular_example(const FieldCtx& k, const TPoly& b, const Work& w) {
    TPolyMat phi(2, 2, TPoly::zero(k));
    phi.at(0, 0) = TPoly::t_minus_theta(k);
    phi.at(0, 1) = b;
    TPoly c = TPoly::t_minus_theta(k);
    phi.at(1, 1) = c * c * c;
    return make_amotive(phi, 0, w);
}

TEST_CASE("companion forms and the xi relation") {
    std::mt19937_64 rng(17);
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1)}) {
        // Carlitz: phi = (t - theta), phid = (t - theta), X = -1
        AndersonModule C = carlitz(k);
        AMotive M = motive_of(C, W);
        CHECK(M.rank() == 1);
        CHECK(M.dim() == 1);
        DualAMotive Md = dual_motive_of(C, W);
        PxMat X = xi_matrix(C, W);
        CHECK(agree_at_precision(X.at(0, 0), Px::from_int(k, -1)));
        CHECK(xi_relation_holds(C, M, Md, X));

        // Drinfeld ranks 2..4 with random exact monomial coefficients
        std::uniform_int_distribution<int> e(-2, 2);
        std::uniform_int_distribution<uint64_t> g(0, 7);
        for (int r = 2; r <= 4; ++r) {
            std::vector<Px> alphas;
            for (int i = 0; i < r; ++i) alphas.push_back(Px::monomial(k, Fq::gen_pow(k.p, 2, g(rng)), Rat(e(rng))));
            AndersonModule E = drinfeld(k, alphas);
            AMotive Mr = motive_of(E, W);
            DualAMotive Mdr = dual_motive_of(E, W);
            PxMat Xr = xi_matrix(E, W);
            CHECK(Mr.rank() == r);
            CHECK(Mr.dim() == 1);
            CHECK(xi_relation_holds(E, Mr, Mdr, Xr));
        }
        // block module with d = 2, s = 2, Delta_2 invertible
        PxMat d0(2, 2, Px::zero(k));
        d0.at(0, 0) = d0.at(1, 1) = Px::theta(k);
        d0.at(0, 1) = Px::from_int(k, 1);
        PxMat d1(2, 2, Px::zero(k));
        d1.at(0, 0) = Px::zeta(k);
        d1.at(1, 0) = Px::from_int(k, 1);
        PxMat d2(2, 2, Px::zero(k));
        d2.at(0, 1) = Px::from_int(k, 1);
        d2.at(1, 0) = -Px::from_int(k, 1);
        AndersonModule E22 = AndersonModule::make(k, 2, {d0, d1, d2});
        AMotive M22 = motive_of(E22, W);
        DualAMotive Md22 = dual_motive_of(E22, W);
        PxMat X22 = xi_matrix(E22, W);
        CHECK(M22.rank() == 4);
        CHECK(M22.dim() == 2);
        CHECK(xi_relation_holds(E22, M22, Md22, X22));
    }
}

TEST_CASE("rank dim calculus") {
    FieldCtx k = FieldCtx::make(3, 1);
    AMotive C = carlitz_power(k, 1, W);
    AMotive C2 = tensor_motive(C, C, W);
    CHECK(C2.rank() == 1);
    CHECK(C2.dim() == 2);
    AMotive one = unit_motive(k, W);
    AMotive t1 = tensor_motive(one, C, W);
    CHECK(t1.rank() == 1);
    CHECK(t1.dim() == 1);
    // triangular example: dim 4, dual has dim -4
    AMotive T = triangular_example(k, TPoly::constant(k, Px::from_int(k, 1)), W);
    CHECK(T.dim() == 4);
    AMotive Td = dual_of_motive(T, W);
    CHECK(Td.rank() == 2);
    CHECK(Td.dim() == -4);
    // hom/tensor bookkeeping on random small shapes
    AMotive H = hom_motive(C, T, W);
    CHECK(H.rank() == 2);
    CHECK(H.dim() == T.rank() * C.dim() * -1 + C.rank() * T.dim());  // rk(M) dim(N) - rk(N) dim(M) = 1*4 - 2*1
    AMotive S = sum_motive(C, T, W);
    CHECK(S.rank() == 3);
    CHECK(S.dim() == 5);
    // dual of dual
    AMotive Tdd = dual_of_motive(Td, W);
    CHECK(Tdd.dim() == 4);
}

TEST_CASE("isocrystal slopes") {
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1)}) {
        AMotive C = carlitz_power(k, 1, W);
        SlopeResult s = isocrystal_slopes(C, W);
        REQUIRE(s.slopes.size() == 1);
        CHECK(s.slopes[0].first == Rat(1));
        CHECK(s.pure);

        // [[ (t-theta)^2, 1],[0, t-theta]]: slopes {1, 2}
        TPolyMat phi(2, 2, TPoly::zero(k));
        TPoly tm = TPoly::t_minus_theta(k);
        phi.at(0, 0) = tm * tm;
        phi.at(0, 1) = TPoly::constant(k, Px::from_int(k, 1));
        phi.at(1, 1) = tm;
        AMotive M = make_amotive(phi, 0, W);
        SlopeResult s2 = isocrystal_slopes(M, W);
        REQUIRE(s2.slopes.size() == 2);
        CHECK(s2.slopes[0].first == Rat(1));
        CHECK(s2.slopes[1].first == Rat(2));
        CHECK(!s2.pure);

        // triangular example: slopes {1, 3}
        AMotive T = triangular_example(k, TPoly::constant(k, Px::from_int(k, 1)), W);
        SlopeResult s3 = isocrystal_slopes(T, W);
        REQUIRE(s3.slopes.size() == 2);
        CHECK(s3.slopes[0].first == Rat(1));
        CHECK(s3.slopes[1].first == Rat(3));

        // rank-2 drinfeld: pure of weight 1/2
        AndersonModule D2 = drinfeld(k, {Px::from_int(k, 1), Px::from_int(k, 1)});
        SlopeResult s4 = isocrystal_slopes(motive_of(D2, W), W);
        CHECK(s4.pure);
        CHECK(s4.weight == Rat(1, 2));
    }
}

TEST_CASE("slope invariance under polynomial base change") {
    FieldCtx k = FieldCtx::make(2, 1);
    AMotive T = triangular_example(k, TPoly::constant(k, Px::zeta(k)), W);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> c(0, 1), d(0, 2);
    int done = 0;
    for (int it = 0; it < 12 && done < 6; ++it) {
        // unipotent upper/lower random base change U: phi -> U^{-1} phi sigma*(U)
        TPolyMat U = tp_identity(k, 2);
        std::vector<Px> coeffs;
        for (int i = 0; i <= d(rng); ++i) coeffs.push_back(Px::from_int(k, c(rng)));
        U.at(0, 1) = TPoly(k, coeffs);
        // inverse of unipotent: U^{-1} = 2I - U for this shape
        TPolyMat Uinv = tp_identity(k, 2);
        Uinv.at(0, 1) = -U.at(0, 1);
        TPolyMat sU = U.map([](const TPoly& f) { return f.frob_sigma(); });
        TPolyMat phi2 = mat_mul(mat_mul(Uinv, T.phi, TPoly::zero(k)), sU, TPoly::zero(k));
        AMotive T2 = make_amotive(phi2, 0, W);
        auto s2 = isocrystal_slopes(T2, W);
        auto s1 = isocrystal_slopes(T, W);
        CHECK(s1.slopes == s2.slopes);
        ++done;
    }
    CHECK(done >= 5);
}

TEST_CASE("weight filtration checks") {
    FieldCtx k = FieldCtx::make(3, 1);
    AMotive T = triangular_example(k, TPoly::constant(k, Px::from_int(k, 1)), W);
    FiltrationReport rep = check_weight_filtration(T, {{Rat(1), 1}, {Rat(3), 2}}, W);
    CHECK(rep.applicable);
    CHECK(rep.mixed);
    // pure motive, trivial filtration
    AMotive C = carlitz_power(k, 1, W);
    FiltrationReport rc = check_weight_filtration(C, {{Rat(1), 1}}, W);
    CHECK(rc.mixed);
    // the not-mixed example: [[(t-theta)^2, 1],[0, t-theta]] has no weight-1 sub
    TPolyMat phi(2, 2, TPoly::zero(k));
    TPoly tm = TPoly::t_minus_theta(k);
    phi.at(0, 0) = tm * tm;
    phi.at(0, 1) = TPoly::constant(k, Px::from_int(k, 1));
    phi.at(1, 1) = tm;
    AMotive M = make_amotive(phi, 0, W);
    auto search = find_rank1_submotive(M, Rat(1), 6, W);
    CHECK(!search.found);
    // and the declared filtration with weights in the wrong order is not tau-stable
    FiltrationReport r2 = check_weight_filtration(M, {{Rat(1), 1}, {Rat(2), 2}}, W);
    CHECK((!r2.applicable || !r2.mixed));
}

TEST_CASE("trivialization of the carlitz motive") {
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1)}) {
        AndersonModule C = carlitz(k);
        AMotive M = motive_of(C, W);
        Trivialization t = rigid_trivialization(M, W);
        CHECK(ts_mat_known_zero(t.residual));
        // (Psi^T)^{-1} should be eta l_zeta^- up to an F_q scalar: check the
        // defining difference equation (t - theta) sigma*(lambda) = lambda
        TS lam = t.psiT_inv.at(0, 0);
        TS lhs = lam.frob_sigma().mul_tpoly(TPoly::t_minus_theta(k));
        TS diff = lhs - lam;
        CHECK(diff.truncated(W.t_order - 1).is_known_zero());
        // lattice recovery matches the period up to F_q^x
        LatticeResult lat = drinfeld_lattice(C, t, W);
        CHECK(lat.exp_zero_certificate[0]);
        CHECK(lat.discreteness_certificate);
        CarlitzPeriod cp = carlitz_period(k, W);
        Px ratio = lat.basis.at(0, 0).div(cp.value, Prec(Rat(10)));
        REQUIRE(ratio.has_terms());
        CHECK(*ratio.val() == Rat(0));
        CHECK(ratio.leading_coeff().deg() == 1);  // scalar in F_q
    }
}

TEST_CASE("trivialization of random rank-2 drinfeld modules") {
    // random modules over F_{q^m}: constant coefficients keep the torsion and
    // the trivialization inside the (tame) Puiseux model
    std::mt19937_64 rng(4321);
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1)}) {
        std::uniform_int_distribution<uint64_t> g(0, 7);
        for (int it = 0; it < 3; ++it) {
            std::vector<Px> alphas = {Px::from_fq(k, Fq::gen_pow(k.p, 2, g(rng))),
                                      Px::from_fq(k, Fq::gen_pow(k.p, 2, g(rng)))};
            AndersonModule E = drinfeld(k, alphas);
            AMotive M = motive_of(E, W);
            Trivialization t = rigid_trivialization(M, W);
            CHECK(ts_mat_known_zero(t.residual));
            // dual side, companion convention: PsiCheck = sigma*(Psi^{-1}) X^{-1}
            DualAMotive Md = dual_motive_of(E, W);
            PxMat X = xi_matrix(E, W);
            DualTrivialization dt = dual_trivialization_companion(Md, t, X, W);
            CHECK(ts_mat_known_zero(dt.residual));
            // in this convention Psi sigma-check*(PsiCheck) = sigma-check*(X^{-1})
            TSMat prod = ts_mat_mul(t.psi, ts_sigma_check(dt.psi_check));
            PxMat Xinv = px_inverse(X, W);
            TSMat expect(2, 2, TS::zero(k, prod.a[0].order()));
            for (size_t i = 0; i < 2; ++i)
                for (size_t j = 0; j < 2; ++j)
                    expect.at(i, j) = TS::constant(k, prod.a[0].order(), Xinv.at(i, j).frob_sigma_check());
            CHECK(ts_mat_known_zero(mat_sub(prod, expect)));
            // dual-basis convention: PhiCheck = Phi^T, PsiCheck = (sigma* Psi)^{-1},
            // and Psi sigma-check*(PsiCheck) = Id
            DualAMotive Mdb;
            Mdb.phi = M.phi.transposed();
            Mdb.jshift = 0;
            Mdb.dj = M.dj;
            DualTrivialization db = dual_trivialization(Mdb, t, W);
            CHECK(ts_mat_known_zero(db.residual));
            TSMat prod2 = ts_mat_mul(t.psi, ts_sigma_check(db.psi_check));
            TSMat idm = ts_identity(k, prod2.a[0].order(), 2);
            CHECK(ts_mat_known_zero(mat_sub(prod2, idm)));
            // lattice certificates
            LatticeResult lat = drinfeld_lattice(E, t, W);
            CHECK(lat.exp_zero_certificate[0]);
            CHECK(lat.exp_zero_certificate[1]);
        }
    }
}

TEST_CASE("trivialization of the triangular family") {
    FieldCtx k = FieldCtx::make(3, 1);
    for (auto b : {TPoly::zero(k), TPoly::constant(k, Px::from_int(k, 1)), TPoly::t_minus_theta(k)}) {
        AMotive T = triangular_example(k, b, W);
        Trivialization t = rigid_trivialization(T, W);
        CHECK(ts_mat_known_zero(t.residual));
        DualAMotive Td;
        Td.phi = T.phi.transposed();
        Td.jshift = 0;
        Td.dj = T.dj;
        DualTrivialization dt = dual_trivialization(Td, t, W);
        CHECK(ts_mat_known_zero(dt.residual));
    }
}

TEST_CASE("trivializations are unique up to GL_r(F_q[t])") {
    // two bases of the lattice differ by a sigma-fixed matrix: check that
    // sigma*(Psi1^T) (Psi2^T)^{-1} ... i.e. C := Psi1^T (Psi2^T)^{-1}-inverse
    // pattern: C = (Psi2^T)(Psi1^T)^{-1} has sigma*(C) = C
    FieldCtx k = FieldCtx::make(2, 1);
    AndersonModule E = drinfeld(k, {Px::from_fq(k, Fq::generator(2, 2)), Px::from_int(k, 1)});
    AMotive M = motive_of(E, W);
    Trivialization t1 = rigid_trivialization(M, W);
    Work W2 = W;
    W2.zeta_prec = Rat(40);
    Trivialization t2 = rigid_trivialization(M, W2);
    TSMat C = ts_mat_mul(t2.psi.transposed(), t1.psiT_inv);
    TSMat diff = mat_sub(ts_sigma(C), C);
    CHECK(ts_mat_known_zero(diff));
}

TEST_CASE("betti-de-rham value for the carlitz motive") {
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1), FieldCtx::make(2, 2)}) {
        Px v = carlitz_betti_de_rham_value(k, W);
        CarlitzPeriod cp = carlitz_period(k, W);
        // v = pi^{-1} exactly at stored precision
        Px prod = v * cp.value;
        CHECK(agree_at_precision(prod, Px::from_int(k, 1)));
        // and it matches the trivialization route: sigma*(psiT_inv) at theta
        AndersonModule C = carlitz(k);
        AMotive M = motive_of(C, W);
        Trivialization t = rigid_trivialization(M, W);
        TS lam = t.psiT_inv.at(0, 0).frob_sigma();
        LS at_th = lam.taylor_at_theta(1, Rat((long long)k.q) * Rat(9, 10), W);
        Px route = at_th.coeff(0);
        // equal up to the F_q^x ambiguity of the lattice basis
        Px ratio = route.div(v, Prec(Rat(8)));
        REQUIRE(ratio.has_terms());
        CHECK(*ratio.val() == Rat(0));
        CHECK(ratio.leading_coeff().deg() == 1);
        CHECK((ratio - Px::from_fq(k, ratio.leading_coeff())).is_known_zero());
    }
}

TEST_CASE("gekeler pairing two routes") {
    for (auto k : {FieldCtx::make(2, 1), FieldCtx::make(3, 1)}) {
        AndersonModule C = carlitz(k);
        AMotive M = motive_of(C, W);
        Trivialization t = rigid_trivialization(M, W);
        LatticeResult lat = drinfeld_lattice(C, t, W);
        Px lambda = lat.basis.at(0, 0);
        // eta_t = tau (the generator of de Rham modulo strictly inner)
        SkewPoly eta(k, Side::tau, {Px::zero(k), Px::from_int(k, 1)});
        PairingResult pr = gekeler_pairing(C, t, eta, lambda, W);
        // the two routes agree up to the documented linear normalization term
        Px resid = pr.via_de_rham - pr.via_series - pr.linear_term * lambda;
        CHECK(!resid.has_terms());
        // strictly inner: eta_t = (t-theta)*tau-image: eta = phi_t tau - theta tau
        // i.e. eta_t = tau * phi_t: pairs to a value in the lattice ideal:
        // check integral: via_de_rham of tau*phi_t equals theta-shift relation
        SkewPoly tau(k, Side::tau, {Px::zero(k), Px::from_int(k, 1)});
        SkewPoly inner = tau * C.phi_t().at(0, 0);
        PairingResult pi2 = gekeler_pairing(C, t, inner, lambda, W);
        // eta' = tau phi_t: F_{eta'}(X) = F_eta(theta X): pairing value relates
        // by theta; sanity: both routes still agree
        Px resid2 = pi2.via_de_rham - pi2.via_series - pi2.linear_term * lambda;
        CHECK(!resid2.has_terms());
    }
}
