#include "tmot/motives.hpp"

#include <cassert>
#include <map>
#include <numeric>
#include <sstream>

namespace tmot {

namespace {

// verified pole exponent: f = unit * (t-theta)^e with everything above the
// lowest jet vanishing on stored terms
int verified_theta_order(const TPoly& f) {
    if (f.is_zero()) throw PxError("zero determinant");
    int D = f.deg();
    auto jets = f.taylor_at(Px::theta(f.ctx()), D + 1);
    int ord = -1;
    for (int i = 0; i <= D; ++i) {
        if (jets[i].has_terms()) {
            ord = i;
            break;
        }
    }
    if (ord < 0) throw PxError("determinant indistinguishable from zero");
    return ord;
}

TPolyMat tp_adjugate(const TPolyMat& m) {
    size_t n = m.rows;
    const FieldCtx& k = m.a[0].ctx();
    TPolyMat adj(n, n, TPoly::zero(k));
    if (n == 1) {
        adj.at(0, 0) = TPoly::constant(k, Px::from_int(k, 1));
        return adj;
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            TPolyMat sub(n - 1, n - 1, TPoly::zero(k));
            size_t rr = 0;
            for (size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                size_t cc = 0;
                for (size_t c = 0; c < n; ++c) {
                    if (c == j) continue;
                    sub.at(rr, cc++) = m.at(r, c);
                }
                ++rr;
            }
            TPoly cof = tp_det(sub);
            if ((i + j) % 2) cof = -cof;
            adj.at(j, i) = cof;  // transpose of the cofactor matrix
        }
    return adj;
}

TPolyMat tp_mat_mul(const TPolyMat& a, const TPolyMat& b) {
    return mat_mul(a, b, TPoly::zero(a.a[0].ctx()));
}

TPolyMat tp_sigma(const TPolyMat& m, long long j) {
    return m.map([&](const TPoly& f) {
        TPoly r = f;
        if (j >= 0)
            for (long long i = 0; i < j; ++i) r = r.frob_sigma();
        else
            for (long long i = 0; i < -j; ++i) r = r.frob_sigma_check();
        return r;
    });
}

bool tp_mat_no_terms(const TPolyMat& m) {
    for (auto& f : m.a)
        for (auto& c : f.coeffs())
            if (c.has_terms()) return false;
    return true;
}

}  // namespace

AMotive make_amotive(TPolyMat phi, int jshift, const Work& w) {
    (void)w;
    AMotive m;
    m.dj = verified_theta_order(tp_det(phi));
    m.phi = std::move(phi);
    m.jshift = jshift;
    return m;
}

DualAMotive make_dual_amotive(TPolyMat phi, int jshift, const Work& w) {
    (void)w;
    DualAMotive m;
    m.dj = verified_theta_order(tp_det(phi));
    m.phi = std::move(phi);
    m.jshift = jshift;
    return m;
}

AMotive unit_motive(const FieldCtx& k, const Work& w) { return make_amotive(tp_identity(k, 1), 0, w); }

AMotive carlitz_power(const FieldCtx& k, int n, const Work& w) {
    if (n >= 0) {
        TPoly f = TPoly::constant(k, Px::from_int(k, 1));
        for (int i = 0; i < n; ++i) f = f * TPoly::t_minus_theta(k);
        TPolyMat m(1, 1, f);
        return make_amotive(m, 0, w);
    }
    TPolyMat m(1, 1, TPoly::constant(k, Px::from_int(k, 1)));
    return make_amotive(m, -n, w);
}

AMotive motive_of(const AndersonModule& E, const Work& w) {
    const FieldCtx& k = E.ctx();
    auto rk = E.companion_rank();
    if (!rk) throw NotAbelianAccessible();
    int d = E.dim(), s = E.tau_deg(), r = *rk;
    TPolyMat phi(r, r, TPoly::zero(k));
    PxMat ds_inv_T = px_inverse(E.delta(s), Work{Rat(200), 0, 0}).transposed();
    // subdiagonal identity blocks
    for (int b = 0; b + 1 < s; ++b)
        for (int i = 0; i < d; ++i) phi.at((b + 1) * d + i, b * d + i) = TPoly::constant(k, Px::from_int(k, 1));
    // last block column: (t - Delta_0^T)(Delta_s^{-1})^T then -Delta_j^T (Delta_s^{-1})^T
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            // block row 0: t * (Ds^{-T})_{ij} - (Delta_0^T Ds^{-T})_{ij}
            Px lin = ds_inv_T.at(i, j);
            Px con = Px::zero(k);
            for (int l = 0; l < d; ++l) con = con + E.delta(0).at(l, i) * ds_inv_T.at(l, j);
            TPoly f(k, {-con, lin});
            phi.at(i, (s - 1) * d + j) = f;
        }
    for (int b = 1; b < s; ++b)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Px con = Px::zero(k);
                for (int l = 0; l < d; ++l) con = con + E.delta(b).at(l, i) * ds_inv_T.at(l, j);
                phi.at(b * d + i, (s - 1) * d + j) = TPoly::constant(k, -con);
            }
    return make_amotive(std::move(phi), 0, w);
}

DualAMotive dual_motive_of(const AndersonModule& E, const Work& w) {
    const FieldCtx& k = E.ctx();
    auto rk = E.companion_rank();
    if (!rk) throw NotAFinite();
    int d = E.dim(), s = E.tau_deg(), r = *rk;
    (void)r;
    TPolyMat phi(*rk, *rk, TPoly::zero(k));
    PxMat ds_inv = px_inverse(E.delta(s), Work{Rat(200), 0, 0});
    PxMat ds_inv_tw = ds_inv.map([&](const Px& x) { return x.frob_pow(-s); });
    for (int b = 0; b + 1 < s; ++b)
        for (int i = 0; i < d; ++i) phi.at((b + 1) * d + i, b * d + i) = TPoly::constant(k, Px::from_int(k, 1));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            // (t - Delta_0) sigma-check^s(Delta_s^{-1})
            Px lin = ds_inv_tw.at(i, j);
            Px con = Px::zero(k);
            for (int l = 0; l < d; ++l) con = con + E.delta(0).at(i, l) * ds_inv_tw.at(l, j);
            phi.at(i, (s - 1) * d + j) = TPoly(k, {-con, lin});
        }
    for (int b = 1; b < s; ++b)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Px con = Px::zero(k);
                for (int l = 0; l < d; ++l)
                    con = con + E.delta(b).at(i, l).frob_pow(-b) * ds_inv_tw.at(l, j);
                phi.at(b * d + i, (s - 1) * d + j) = TPoly::constant(k, -con);
            }
    return make_dual_amotive(std::move(phi), 0, w);
}

PxMat xi_matrix(const AndersonModule& E, const Work& w) {
    (void)w;
    const FieldCtx& k = E.ctx();
    auto rk = E.companion_rank();
    if (!rk) throw NotAbelianAccessible();
    int d = E.dim(), s = E.tau_deg();
    PxMat X(*rk, *rk, Px::zero(k));
    for (int I = 0; I < s; ++I)
        for (int J = 0; J < s; ++J) {
            int idx = I + J + 1;
            if (idx > s) continue;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) X.at(I * d + i, J * d + j) = -E.delta(idx).at(i, j).frob_pow(-I);
        }
    return X;
}

bool xi_relation_holds(const AndersonModule& E, const AMotive& M, const DualAMotive& Md, const PxMat& X) {
    (void)E;
    TPolyMat lhs = tp_mat_mul(tp_from_px(X), M.phi.transposed());
    TPolyMat xs = tp_from_px(X.map([](const Px& x) { return x.frob_pow(-1); }));
    TPolyMat rhs = tp_mat_mul(Md.phi, xs);
    return tp_mat_no_terms(mat_sub(lhs, rhs));
}

AMotive tensor_motive(const AMotive& A, const AMotive& B, const Work& w) {
    return make_amotive(mat_kron(A.phi, B.phi), A.jshift + B.jshift, w);
}

AMotive dual_of_motive(const AMotive& A, const Work& w) {
    const FieldCtx& k = A.ctx();
    TPoly det = tp_det(A.phi);
    int dj = verified_theta_order(det);
    // det = c (t-theta)^dj: recover the unit c from the jet
    Px c = det.taylor_at(Px::theta(k), dj + 1)[dj];
    TPolyMat num = tp_adjugate(A.phi).transposed();
    Px cinv = Px::from_int(k, 1).div(c, Prec(w.zeta_prec + Rat(40)));
    num = num.map([&](const TPoly& f) { return f.scaled(cinv); });
    return make_amotive(std::move(num), dj - A.jshift, w);
}

AMotive hom_motive(const AMotive& A, const AMotive& B, const Work& w) {
    return tensor_motive(B, dual_of_motive(A, w), w);
}

AMotive sum_motive(const AMotive& A, const AMotive& B, const Work& w) {
    const FieldCtx& k = A.ctx();
    int j = std::max(A.jshift, B.jshift);
    TPoly tw_a = TPoly::constant(k, Px::from_int(k, 1));
    TPoly tw_b = tw_a;
    for (int i = 0; i < j - A.jshift; ++i) tw_a = tw_a * TPoly::t_minus_theta(k);
    for (int i = 0; i < j - B.jshift; ++i) tw_b = tw_b * TPoly::t_minus_theta(k);
    size_t n = A.phi.rows + B.phi.rows;
    TPolyMat m(n, n, TPoly::zero(k));
    for (size_t i = 0; i < A.phi.rows; ++i)
        for (size_t jj = 0; jj < A.phi.cols; ++jj) m.at(i, jj) = A.phi.at(i, jj) * tw_a;
    for (size_t i = 0; i < B.phi.rows; ++i)
        for (size_t jj = 0; jj < B.phi.cols; ++jj) m.at(A.phi.rows + i, A.phi.cols + jj) = B.phi.at(i, jj) * tw_b;
    return make_amotive(std::move(m), j, w);
}

SlopeResult isocrystal_slopes(const AMotive& M, const Work& w) {
    const FieldCtx& k = M.ctx();
    int r = M.rank();
    long long L = 1;
    for (int i = 2; i <= r; ++i) L = std::lcm(L, (long long)i);
    int maxdeg = 0;
    for (auto& f : M.phi.a) maxdeg = std::max(maxdeg, f.deg());
    long long span = (long long)std::max(maxdeg, 1) + 2;
    long long Nz = (long long)(r + 2) * L * span + 6;

    LSMat phi_z = M.phi.map([&](const TPoly& f) { return LS::from_tpoly(f, LVar::z, Nz); });
    SlopeResult out;
    LSMat B = ls_identity(k, LVar::z, Nz, r);
    LSMat tw = phi_z;  // sigma^{n*} of phi_z, updated incrementally
    std::vector<std::vector<long long>> exps_at;  // per multiple of L
    long long n = 0;
    std::optional<std::vector<long long>> last_inc;
    for (int step = 1; step <= r + 2; ++step) {
        for (long long i = 0; i < L; ++i) {
            B = ls_mat_mul(B, tw);
            ++n;
            // keep the window and coefficient precision bounded
            long long window = (n + 1) * span + 6;
            B = B.map([&](const LS& x) {
                return x.truncated(window).map_coeffs(
                    [&](const Px& c) { return c.with_prec(min_prec(c.prec(), Prec(w.zeta_prec))); });
            });
            tw = tw.map([&](const LS& x) { return x.map_coeffs([](const Px& c) { return c.frob_sigma(); }); });
        }
        // elementary divisors over the power series ring after clearing poles
        long long sh = 0;
        for (auto& e : B.a) {
            auto o = e.ord();
            if (o) sh = std::min(sh, *o);
        }
        LSMat Bs = B.map([&](const LS& x) { return x.shifted(-sh); });
        SmithResult sm = smith_form(Bs, w);
        std::vector<long long> exps;
        for (auto e : sm.exps) exps.push_back(e + sh);
        std::sort(exps.begin(), exps.end());
        exps_at.push_back(exps);
        out.iterations = (int)n;
        if (exps_at.size() >= 2) {
            std::vector<long long> inc(exps.size());
            auto& prev = exps_at[exps_at.size() - 2];
            for (size_t i = 0; i < exps.size(); ++i) inc[i] = exps[i] - prev[i];
            if (last_inc && inc == *last_inc) {
                out.stabilized = true;
                // slopes = -increment / L, shifted by the J-twist
                std::map<Rat, int> mult;
                for (auto d : inc) mult[-Rat(d, L) - Rat(M.jshift)] += 1;
                for (auto& [sl, m] : mult) out.slopes.push_back({sl, m});
                out.pure = out.slopes.size() == 1;
                if (out.pure) out.weight = out.slopes[0].first;
                return out;
            }
            last_inc = inc;
        }
    }
    throw SlopesNotStabilized();
}

FiltrationReport check_weight_filtration(const AMotive& M, const std::vector<FlagStep>& steps, const Work& w) {
    const FieldCtx& k = M.ctx();
    FiltrationReport rep;
    int r = M.rank();
    // the coordinate flag is tau-stable iff phi is block upper triangular
    // with respect to every cut
    int prev = 0;
    int total = 0;
    for (auto& st : steps) {
        if (st.cols <= prev || st.cols > r) {
            rep.applicable = false;
            rep.note = "flag columns must increase up to the rank";
            return rep;
        }
        for (int i = st.cols; i < r; ++i)
            for (int j = 0; j < st.cols; ++j)
                if (!M.phi.at(i, j).is_zero() ) {
                    for (auto& c : M.phi.at(i, j).coeffs())
                        if (c.has_terms()) {
                            rep.applicable = false;
                            rep.note = "flag is not tau-stable for this matrix";
                            return rep;
                        }
                }
        prev = st.cols;
        total = st.cols;
    }
    if (total != r) {
        rep.applicable = false;
        rep.note = "flag does not exhaust the motive";
        return rep;
    }
    // graded pieces are the diagonal blocks
    rep.mixed = true;
    prev = 0;
    for (auto& st : steps) {
        int c0 = prev, c1 = st.cols;
        TPolyMat blk(c1 - c0, c1 - c0, TPoly::zero(k));
        for (int i = c0; i < c1; ++i)
            for (int j = c0; j < c1; ++j) blk.at(i - c0, j - c0) = M.phi.at(i, j);
        AMotive gr = make_amotive(std::move(blk), M.jshift, w);
        SlopeResult sl = isocrystal_slopes(gr, w);
        rep.graded.push_back(sl);
        if (!(sl.pure && sl.weight == st.mu)) rep.mixed = false;
        prev = c1;
    }
    return rep;
}

Rank1SearchResult find_rank1_submotive(const AMotive& M, const Rat& mu, int degree_bound, const Work& w) {
    (void)degree_bound;
    Rank1SearchResult out;
    const FieldCtx& k = M.ctx();
    if (M.rank() != 2 || M.jshift != 0) {
        out.reason = "search implemented for effective 2x2 upper-triangular matrices";
        return out;
    }
    for (auto& c : M.phi.at(1, 0).coeffs())
        if (c.has_terms()) {
            out.reason = "matrix is not upper triangular";
            return out;
        }
    // diagonal entries c_i (t-theta)^{k_i}
    int k1 = verified_theta_order(M.phi.at(0, 0));
    int k2 = verified_theta_order(M.phi.at(1, 1));
    if (mu == Rat(k1)) {
        out.found = true;  // the first coordinate line
        out.reason = "the first coordinate line is a pure sub-motive";
        return out;
    }
    if (mu != Rat(k2)) {
        out.reason = "weight matches neither diagonal exponent";
        return out;
    }
    // a sub-motive of weight k2 with nonzero second coordinate forces, at
    // t = theta, the off-diagonal entry times sigma*(v) to vanish; v is a
    // scalar multiple of an F_q[t]-polynomial which cannot vanish at theta
    const TPoly& b = M.phi.at(0, 1);
    if (k1 >= 1) {
        auto jets = b.taylor_at_theta(1);
        if (jets[0].has_terms()) {
            out.found = false;
            out.reason = "off-diagonal entry does not vanish at theta: no such sub-motive";
            return out;
        }
    }
    out.reason = "inconclusive within the implemented family";
    (void)w;
    return out;
}

namespace {

bool is_scalar_companion(const TPolyMat& phi, std::vector<Px>* alphas, const FieldCtx& k) {
    size_t r = phi.rows;
    // subdiagonal ones, last column (t-theta)/a_r then -a_i/a_r, zeros elsewhere
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j + 1 < r; ++j) {
            const TPoly& f = phi.at(i, j);
            bool want_one = (i == j + 1);
            if (want_one) {
                TPoly diff = f - TPoly::constant(k, Px::from_int(k, 1));
                for (auto& c : diff.coeffs())
                    if (c.has_terms()) return false;
            } else {
                for (auto& c : f.coeffs())
                    if (c.has_terms()) return false;
            }
        }
    const TPoly& top = phi.at(0, r - 1);
    if (top.deg() != 1) return false;
    const Px& lin = top.coeff(1);
    if (!lin.has_terms()) return false;
    // a_r = 1/lin; check constant = -theta * lin
    Px ar = Px::from_int(k, 1).div(lin, Prec(Rat(400)));
    Px expect_con = -(Px::theta(k) * lin);
    if (!agree_at_precision(top.coeff(0), expect_con)) return false;
    if (alphas) {
        alphas->assign(r, Px::zero(k));
        (*alphas)[r - 1] = ar;
        for (size_t i = 1; i < r; ++i) {
            const TPoly& f = phi.at(i, r - 1);
            if (f.deg() > 0) return false;
            (*alphas)[i - 1] = -(f.coeff(0) * ar);
        }
    }
    return true;
}

bool is_upper_triangular(const TPolyMat& phi) {
    for (size_t i = 0; i < phi.rows; ++i)
        for (size_t j = 0; j < i; ++j)
            for (auto& c : phi.at(i, j).coeffs())
                if (c.has_terms()) return false;
    return true;
}

}  // namespace

Trivialization rigid_trivialization(const AMotive& M, const Work& w) {
    const FieldCtx& k = M.ctx();
    int r = M.rank();
    int N = w.t_order;
    if (M.jshift != 0) throw NotUniformizableDetected("trivialization solver needs an effective presentation");
    Trivialization out;

    std::vector<Px> alphas;
    if (is_scalar_companion(M.phi, &alphas, k)) {
        // rows of Psi^T are (g, sigma*g, ..., sigma^{r-1*}g) for solutions of
        // theta g + sum_j alpha_j sigma^{j*} g = t g; coefficientwise this is
        // the additive equation P(g_n) = g_{n-1} with P = phi_t
        Additive P;
        P.c.push_back(Px::theta(k));
        for (auto& a : alphas) P.c.push_back(a);
        auto kernel = additive_kernel_basis(P, k, w.zeta_prec);
        if ((int)kernel.size() != r) throw NotUniformizableDetected("torsion kernel has wrong dimension");
        TSMat psiT(r, r, TS::zero(k, N));  // row j = the j-th solution row
        for (int j = 0; j < r; ++j) {
            std::vector<Px> g(N + 1, Px::zero(k));
            g[0] = kernel[j];
            for (int n = 1; n <= N; ++n) g[n] = additive_solve_canonical(P, g[n - 1], k, w.zeta_prec);
            for (int i = 0; i < r; ++i) {
                TS f(k, N);
                for (int n = 0; n <= N; ++n) f.set_coeff(n, g[n].frob_pow(i));
                psiT.at(j, i) = f;
            }
        }
        out.psi = psiT.transposed();
        out.psiT_inv = ts_mat_inverse(psiT, w);
    } else if (is_upper_triangular(M.phi)) {
        // forward substitution: row j of Psi^T solves sigma*(row) = row * Phi
        TSMat phi_ts = ts_from_tpoly_mat(M.phi, N);
        TSMat psiT(r, r, TS::zero(k, N));
        for (int j = 0; j < r; ++j) {
            for (int l = j; l < r; ++l) {
                // sigma* g_l = sum_{m<=l} g_m Phi_{ml}; coefficientwise
                // g_{l,n}^q - Phi_{ll}(0) g_{l,n} = known
                TS rhs = TS::zero(k, N);
                for (int m = j; m < l; ++m) rhs = rhs + psiT.at(j, m) * phi_ts.at(m, l);
                TS g(k, N);
                Px diag0 = M.phi.at(l, l).coeff(0);
                for (int n = 0; n <= N; ++n) {
                    // known part: rhs_n + sum_{m>=1} Phi_{ll,m} g_{n-m}
                    Px c = rhs.coeff(n);
                    for (int m = 1; m <= M.phi.at(l, l).deg(); ++m)
                        if (n - m >= 0) c = c + M.phi.at(l, l).coeff(m) * g.coeff(n - m);
                    // solve y^q = diag0 * y + c
                    SPoly eq = {{1, -diag0}, {(long long)k.q, Px::from_int(k, 1)}, {0, -c}};
                    Px y;
                    if (l == j && n == 0) {
                        // seed: a nonzero solution of y^q = diag0 y
                        auto roots = np_roots(sp_normalize(eq), k, w.zeta_prec);
                        bool got = false;
                        for (auto& rr : roots)
                            if (rr.has_terms()) {
                                y = rr;
                                got = true;
                                break;
                            }
                        if (!got) throw NotUniformizableDetected("no nonzero diagonal seed");
                    } else {
                        y = np_root_canonical(sp_normalize(eq), k, w.zeta_prec);
                    }
                    g.set_coeff(n, y);
                }
                psiT.at(j, l) = g;
            }
        }
        out.psi = psiT.transposed();
        out.psiT_inv = ts_mat_inverse(psiT, w);
    } else {
        throw NotUniformizableDetected(
            "no solver route for this matrix shape (companion, upper-triangular, or tensor combinations)");
    }

    // residual sigma* Psi^T - Psi^T Phi
    TSMat psiT = out.psi.transposed();
    out.residual = mat_sub(ts_sigma(psiT), ts_mat_mul(psiT, ts_from_tpoly_mat(M.phi, N)));
    // convergence witness for the entries of Psi
    Rat best = Rat(0);
    for (Rat s : {Rat(1, 2), Rat(2, 3), Rat(3, 4), Rat(9, 10)}) {
        bool ok = true;
        for (auto& e : out.psi.a) {
            auto cw = e.conv_witness(s);
            if (cw.bound < -Rat(2) * Rat(M.dim() + 1)) ok = false;
        }
        if (ok) best = s;
    }
    out.s_witness = best;
    return out;
}

Trivialization tensor_trivialization(const Trivialization& A, const Trivialization& B, const Work& w) {
    Trivialization out;
    const TS& ex = A.psi.a[0];
    out.psi = mat_kron(A.psi, B.psi);
    out.psiT_inv = ts_mat_inverse(out.psi.transposed(), w);
    out.residual = TSMat(out.psi.rows, out.psi.cols, TS::zero(ex.ctx(), ex.order()));
    out.s_witness = std::min(A.s_witness, B.s_witness);
    return out;
}

DualTrivialization dual_trivialization(const DualAMotive& Md, const Trivialization& t, const Work& w) {
    DualTrivialization out;
    const FieldCtx& k = Md.ctx();
    int N = t.psi.a[0].order();
    out.psi_check = ts_mat_inverse(ts_sigma(t.psi), w);
    out.residual = mat_sub(ts_sigma_check(out.psi_check), ts_mat_mul(out.psi_check, ts_from_tpoly_mat(Md.phi, N)));
    return out;
}

DualTrivialization dual_trivialization_companion(const DualAMotive& Md, const Trivialization& t, const PxMat& X,
                                                 const Work& w) {
    DualTrivialization out;
    const FieldCtx& k = Md.ctx();
    int N = t.psi.a[0].order();
    // PsiCheck^{-1} = X sigma*(Psi); PsiCheck = sigma*(Psi^{-1}) X^{-1}
    TSMat psi_inv = out.psi_check;  // placeholder shape
    psi_inv = t.psiT_inv.transposed();
    PxMat Xinv = px_inverse(X, w);
    TSMat xinv_ts(X.rows, X.cols, TS::zero(k, N));
    for (size_t i = 0; i < X.rows; ++i)
        for (size_t j = 0; j < X.cols; ++j) xinv_ts.at(i, j) = TS::constant(k, N, Xinv.at(i, j));
    out.psi_check = ts_mat_mul(ts_sigma(psi_inv), xinv_ts);
    out.residual = mat_sub(ts_sigma_check(out.psi_check), ts_mat_mul(out.psi_check, ts_from_tpoly_mat(Md.phi, N)));
    return out;
}

LatticeResult drinfeld_lattice(const AndersonModule& E, const Trivialization& t, const Work& w) {
    const FieldCtx& k = E.ctx();
    if (!E.is_drinfeld()) throw NotAFinite("lattice recovery implemented for Drinfeld modules");
    int r = (int)t.psi.rows;
    int N = t.psi.a[0].order();
    LatticeResult out;
    out.basis = PxMat(1, r, Px::zero(k));
    Px th = Px::theta(k);
    ExpCoeffs ec = exp_coefficients(E, 10, w);
    for (int j = 0; j < r; ++j) {
        // f_j = row j of Psi^T = column j of Psi, first entry (the AGF itself)
        const TS& f = t.psi.at(0, j);
        Px aN = f.coeff(N);
        Px lam = th.pow(N + 1) * aN;
        // precision cap: the limit error is (q-1)(N+1) + q*v(lambda)
        Rat vl = aN.has_terms() ? (*aN.val() - Rat(N + 1)) : Rat(0);
        Rat cap = Rat((long long)k.q - 1) * Rat(N + 1) + Rat((long long)k.q) * vl;
        lam = lam.with_prec(min_prec(lam.prec(), Prec(cap)));
        out.basis.at(0, j) = lam;
        PxMat img = eval_exp(E, ec, PxMat(1, 1, lam), w);
        out.exp_zero_certificate.push_back(!img.at(0, 0).has_terms());
    }
    // discreteness at desk scale: no nonzero combination (c0 + c1 t) lambda_j
    // inside the isometry radius
    out.discreteness_certificate = true;
    size_t total = 1;
    for (int i = 0; i < 2 * r; ++i) total *= k.q;
    std::vector<Fq> elems;
    elems.push_back(Fq::zero(k.p));
    for (uint64_t j2 = 0; j2 + 1 < k.q; ++j2) elems.push_back(Fq::gen_pow(k.p, k.f, j2));
    for (size_t code = 1; code < total; ++code) {
        size_t c = code;
        Px acc = Px::zero(k);
        for (int j = 0; j < r; ++j) {
            Fq c0 = elems[c % k.q];
            c /= k.q;
            Fq c1 = elems[c % k.q];
            c /= k.q;
            acc = acc + out.basis.at(0, j).scaled(c0) + (th * out.basis.at(0, j)).scaled(c1);
        }
        if (!acc.has_terms()) continue;  // cancellation beyond precision: skip
        if (*acc.val() > ec.radius_v) out.discreteness_certificate = false;
    }
    return out;
}

Px carlitz_betti_de_rham_value(const FieldCtx& k, const Work& w) {
    // sigma*(eta l^-) evaluated at theta, computed from the product formula
    CarlitzPeriod cp = carlitz_period(k, w);
    Px etaq = cp.eta.pow((long long)k.q);
    Px prod = Px::from_int(k, 1);
    long long e = (long long)k.q;
    for (int i = 1; i <= cp.K; ++i) {
        prod = prod * (Px::from_int(k, 1) - Px::monomial(k, Fq::one(k.p), Rat(e - 1)));
        e *= (long long)k.q;
    }
    return (etaq * prod).truncated(w.zeta_prec);
}

PairingResult gekeler_pairing(const AndersonModule& E, const Trivialization& t, const SkewPoly& eta_t,
                              const Px& lambda, const Work& w) {
    const FieldCtx& k = E.ctx();
    if (!E.is_drinfeld()) throw NotAFinite("pairing implemented for Drinfeld modules");
    int r = (int)t.psi.rows;
    int N = t.psi.a[0].order();
    PairingResult out;
    if (eta_t.coeff(0).has_terms()) throw PxError("eta_t must have zero constant term");

    // m0 with m0 tau = eta_t, then [m0] in C[t]-coordinates w.r.t. tau^{i-1}
    std::vector<Px> m0c;
    for (int i = 1; i <= eta_t.deg(); ++i) m0c.push_back(eta_t.coeff(i));
    SkewPoly m0(k, Side::tau, m0c);
    // coordinates: peel with phi_t powers
    std::vector<TPoly> coords(r, TPoly::zero(k));
    SkewPoly cur = m0;
    SkewMat pt = E.phi_t();
    while (!cur.is_zero() && cur.coeffs().back().has_terms()) {
        int jdeg = cur.deg();
        int i = jdeg % r;
        int m = jdeg / r;
        // term tau^i * c * phi_t^m has leading coefficient sigma^i(c * lead(phi_t^m))
        SkewPoly base = SkewPoly::variable(k, Side::tau);
        SkewPoly pw = SkewPoly::constant(k, Side::tau, Px::from_int(k, 1));
        for (int l = 0; l < m; ++l) pw = pw * pt.at(0, 0);
        Px lead = pw.coeffs().empty() ? Px::from_int(k, 1) : pw.coeffs().back();
        Px c = cur.coeffs().back().frob_pow(-i).div(lead, Prec(w.zeta_prec + Rat(20)));
        // subtract tau^i * (c * pw)
        SkewPoly taui = SkewPoly::constant(k, Side::tau, Px::from_int(k, 1));
        for (int l = 0; l < i; ++l) taui = taui * base;
        SkewPoly term = taui * pw.scaled(c);
        cur = cur - term;
        std::vector<Px> add(m + 1, Px::zero(k));
        add[m] = c;
        coords[i] = coords[i] + TPoly(k, add);
        if (cur.deg() >= 0 && !cur.coeffs().empty() && cur.coeffs().back().is_known_zero() &&
            !cur.coeffs().back().is_exact_zero())
            break;  // residual noise below precision
    }

    // via de Rham: w = sigma*(Psi^T [m0]) evaluated at theta, paired with the
    // coordinates of lambda in the lattice basis (lambda = basis column j0)
    TSMat psiT = t.psi.transposed();
    TSMat col(r, 1, TS::zero(k, N));
    for (int i = 0; i < r; ++i) col.at(i, 0) = TS::from_tpoly(coords[i], N);
    TSMat prod = ts_mat_mul(psiT, col);
    // lambda coordinates: match against the recovered lattice basis
    LatticeResult lat = drinfeld_lattice(E, t, w);
    int j0 = -1;
    for (int j = 0; j < r; ++j)
        if (!(lat.basis.at(0, j) - lambda).has_terms()) j0 = j;
    if (j0 < 0) throw PxError("lambda is not one of the recovered lattice basis vectors");
    TS fj = prod.at(j0, 0).frob_sigma();
    LS at_theta = fj.taylor_at_theta(1, Rat((long long)k.q) * t.s_witness, w);
    out.via_de_rham = at_theta.coeff(0);

    // via the series F_eta = sum_{i>=1} f_i X^{q^i}
    ExpCoeffs ec = exp_coefficients(E, 10, w);
    Px th = Px::theta(k);
    Px acc = Px::zero(k);
    std::vector<Rat> tv;
    Px lpow = lambda;
    for (int i = 1; i <= (int)ec.E.size() - 1; ++i) {
        // f_i (theta^{q^i} - theta) = sum_{j>=1..} eta_j e_{i-j}^{q^j}
        Px num = Px::zero(k);
        for (int j = 1; j <= std::min(i, eta_t.deg()); ++j)
            num = num + eta_t.coeff(j) * ec.E[i - j].at(0, 0).frob_pow(j);
        Px fi = num.div(th.frob_pow(i) - th, Prec(w.zeta_prec));
        lpow = (i == 1) ? lambda.frob_sigma() : lpow.frob_sigma();
        Px term = fi * lpow;
        if (term.has_terms())
            tv.push_back(*term.val());
        else
            tv.push_back(term.is_exact() ? w.zeta_prec : *term.prec());
        acc = acc + term;
    }
    size_t nt = tv.size();
    if (!(nt >= 2 && tv[nt - 1] >= w.zeta_prec && tv[nt - 2] >= w.zeta_prec)) {
        Rat cap = std::max(Rat(0), std::min(tv[nt - 1], tv[nt - 2]));
        acc = acc.with_prec(min_prec(acc.prec(), Prec(cap)));
    }
    out.via_series = acc;
    out.linear_term = (out.via_de_rham - out.via_series).div(lambda, Prec(w.zeta_prec));
    return out;
}

}  // namespace tmot
