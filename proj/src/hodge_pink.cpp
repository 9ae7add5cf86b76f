#include "tmot/hodge_pink.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace tmot {

int Polygon::total_mult() const {
    int n = 0;
    for (auto& [s, m] : slopes) n += m;
    return n;
}

Rat Polygon::endpoint() const {
    Rat e(0);
    for (auto& [s, m] : slopes) e += s * Rat(m);
    return e;
}

Rat Polygon::partial(int k) const {
    Rat e(0);
    int left = k;
    for (auto& [s, m] : slopes) {
        int take = std::min(left, m);
        e += s * Rat(take);
        left -= take;
        if (!left) break;
    }
    return e;
}

std::string Polygon::str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (auto& [s, m] : slopes)
        for (int i = 0; i < m; ++i) {
            if (!first) os << ",";
            first = false;
            os << to_string(s);
        }
    os << "}";
    return os.str();
}

bool polygon_above(const Polygon& A, const Polygon& B) {
    if (A.total_mult() != B.total_mult()) return false;
    int n = A.total_mult();
    for (int k = 1; k < n; ++k)
        if (A.partial(k) < B.partial(k)) return false;
    return true;
}

namespace {

std::vector<Rat> flag_to_wt(const std::vector<FlagStep>& flag, int rank) {
    std::vector<Rat> wt(rank, Rat(0));
    int prev = 0;
    for (auto& st : flag) {
        for (int i = prev; i < st.cols; ++i) wt[i] = st.mu;
        prev = st.cols;
    }
    return wt;
}

// expansion of Phi at u, inverted over the Laurent field
LSMat phi_u_inverse(const TPolyMat& phi, const Work& w) {
    long long N = w.u_order;
    LSMat pu = phi.map([&](const TPoly& f) { return LS::from_tpoly(f, LVar::u, N); });
    const FieldCtx& k = phi.a[0].ctx();
    return ls_solve(pu, ls_identity(k, LVar::u, N, phi.rows), w);
}

}  // namespace

HPStructure hp_of_motive(const AMotive& M, const Trivialization& t, const std::vector<FlagStep>& flag, const Work& w) {
    HPStructure H;
    H.wt = flag_to_wt(flag, M.rank());
    // q = Psi^T p; Psi^T = sigma*(Psi^T) Phi^{-1} with sigma*(Psi^T)
    // expandable at theta (its entries converge past |theta|)
    TSMat psiT = t.psi.transposed();
    Rat s = Rat((long long)M.ctx().q) * t.s_witness;
    if (s <= Rat(1)) s = Rat(11, 10);
    LSMat top = ts_mat_taylor_at_theta(ts_sigma(psiT), w.u_order, s, w);
    H.U = ls_mat_mul(top, phi_u_inverse(M.phi, w));
    if (M.jshift) {
        H.U = H.U.map([&](const LS& x) { return x.shifted(M.jshift); });
    }
    return H;
}

HPStructure hp_of_dual_motive(const DualAMotive& Md, const Trivialization& t, const std::vector<FlagStep>& flag,
                              const Work& w) {
    HPStructure H;
    H.wt = flag_to_wt(flag, Md.rank());
    // dual-basis convention: sigma-check* PsiCheck = Psi^{-1} = (psiT_inv)^T,
    // whose entries are entire in the effective case
    TSMat psi_inv = t.psiT_inv.transposed();
    Rat s = Rat(3, 2);
    H.U = ts_mat_taylor_at_theta(psi_inv, w.u_order, s, w);
    if (Md.jshift) H.U = H.U.map([&](const LS& x) { return x.shifted(Md.jshift); });
    return H;
}

HPStructure hp_of_anderson(const AndersonModule& E, const PxMat& lattice, const Work& w) {
    const FieldCtx& k = E.ctx();
    int d = E.dim();
    int r = (int)lattice.cols;
    if ((int)lattice.rows != d) throw LatticeRankMismatch();
    // gamma: Lambda (x) C[[u]] -> Lie E, e_j u^i -> N^i lambda_j, N = Lie phi_t - theta
    PxMat Nm = E.lie();
    for (int i = 0; i < d; ++i) Nm.at(i, i) = Nm.at(i, i) - Px::theta(k);
    // kernel of the C-linear map on jets of order d: unknowns x_{j,i}, j < r, i < d
    size_t unknowns = (size_t)r * d;
    PxMat A(d, unknowns, Px::zero(k));
    PxMat Npow = px_identity(k, d);
    std::vector<PxMat> Nlam(d, PxMat(d, r, Px::zero(k)));
    for (int i = 0; i < d; ++i) {
        Nlam[i] = px_mat_mul(Npow, lattice);
        Npow = px_mat_mul(Npow, Nm);
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < r; ++j)
            for (int row = 0; row < d; ++row) A.at(row, (size_t)j * d + i) = Nlam[i].at(row, j);
    // nullspace by elimination over the Puiseux field
    PxMat M2 = A;
    size_t rows = d, cols = unknowns;
    std::vector<int> pivot_of_col(cols, -1);
    size_t rr = 0;
    for (size_t c = 0; c < cols && rr < rows; ++c) {
        size_t sel = rows;
        Rat best(0);
        for (size_t i = rr; i < rows; ++i) {
            if (!M2.at(i, c).has_terms()) continue;
            Rat v = *M2.at(i, c).val();
            if (sel == rows || v < best) {
                sel = i;
                best = v;
            }
        }
        if (sel == rows) continue;
        for (size_t j = 0; j < cols; ++j) std::swap(M2.at(sel, j), M2.at(rr, j));
        Px piv = M2.at(rr, c);
        for (size_t i = 0; i < rows; ++i) {
            if (i == rr || !M2.at(i, c).has_terms()) continue;
            Px f = M2.at(i, c).div(piv, Prec(w.zeta_prec));
            for (size_t j = 0; j < cols; ++j) M2.at(i, j) = M2.at(i, j) - f * M2.at(rr, j);
        }
        pivot_of_col[c] = (int)rr;
        ++rr;
    }
    if (rr < rows) throw LatticeRankMismatch();
    // free columns give kernel vectors
    std::vector<std::vector<Px>> kernel;
    for (size_t c = 0; c < cols; ++c) {
        if (pivot_of_col[c] >= 0) continue;
        std::vector<Px> v(cols, Px::zero(k));
        v[c] = Px::from_int(k, 1);
        for (size_t c2 = 0; c2 < cols; ++c2) {
            if (pivot_of_col[c2] < 0) continue;
            int prow = pivot_of_col[c2];
            v[c2] = -(M2.at(prow, c).div(M2.at(prow, c2), Prec(w.zeta_prec)));
        }
        kernel.push_back(std::move(v));
    }
    // generators of q: kernel jets as u-polynomial vectors, plus u^d p
    long long N = w.u_order;
    LSMat G(r, kernel.size() + r, LS::zero(k, LVar::u, N));
    for (size_t c = 0; c < kernel.size(); ++c)
        for (int j = 0; j < r; ++j) {
            LS e(k, LVar::u, N);
            for (int i = 0; i < d; ++i) e.set_coeff(i, kernel[c][(size_t)j * d + i]);
            G.at(j, c) = e;
        }
    for (int j = 0; j < r; ++j) G.at(j, kernel.size() + j) = LS::uniformizer_pow(k, LVar::u, N, d);
    HPStructure H;
    H.U = lattice_basis_from_generators(G, w);
    // Anderson-side weights: pure of weight -d/r in the companion case
    H.wt.assign(r, Rat(-(long long)d, (long long)r));
    return H;
}

HPStructure hp_of_anderson_dual(const AndersonModule& E, const Trivialization& t, const PxMat& X,
                                const std::vector<Rat>& wt, const Work& w) {
    (void)E;
    HPStructure H;
    H.wt = wt;
    TSMat psi_inv = t.psiT_inv.transposed();
    LSMat base = ts_mat_taylor_at_theta(psi_inv, w.u_order, Rat(3, 2), w);
    PxMat Xinv = px_inverse(X, w);
    const FieldCtx& k = X.a[0].ctx();
    LSMat xs(X.rows, X.cols, LS::zero(k, LVar::u, w.u_order));
    for (size_t i = 0; i < X.rows; ++i)
        for (size_t j = 0; j < X.cols; ++j)
            xs.at(i, j) = LS::constant(k, LVar::u, w.u_order, Xinv.at(i, j).frob_sigma_check());
    H.U = ls_mat_mul(base, xs);
    return H;
}

HPStructure hp_unit(const FieldCtx& k, const Work& w) {
    HPStructure H;
    H.wt = {Rat(0)};
    H.U = ls_identity(k, LVar::u, w.u_order, 1);
    return H;
}

HPStructure hp_tensor(const HPStructure& A, const HPStructure& B, const Work& w) {
    (void)w;
    HPStructure H;
    for (auto& a : A.wt)
        for (auto& b : B.wt) H.wt.push_back(a + b);
    H.U = mat_kron(A.U, B.U);
    return H;
}

HPStructure hp_dual(const HPStructure& A, const Work& w) {
    HPStructure H;
    for (auto& a : A.wt) H.wt.push_back(-a);
    // q-dual = (U^T)^{-1} p
    const FieldCtx& k = A.ctx();
    LSMat UT = A.U.transposed();
    H.U = ls_solve(UT, ls_identity(k, LVar::u, A.U.a[0].trunc(), A.U.rows), w);
    return H;
}

HPStructure hp_hom(const HPStructure& A, const HPStructure& B, const Work& w) {
    return hp_tensor(B, hp_dual(A, w), w);
}

std::vector<long long> hp_weights(const HPStructure& H, const Work& w) {
    // shift into the ring, smith, shift back, negate
    long long sh = 0;
    for (auto& e : H.U.a) {
        auto o = e.ord();
        if (o) sh = std::min(sh, *o);
    }
    LSMat Us = H.U.map([&](const LS& x) { return x.shifted(-sh); });
    SmithResult sm = smith_form(Us, w);
    if (!sm.certified) throw PrecisionExhausted("hodge-pink weights not separated at the u-truncation");
    std::vector<long long> wts;
    for (auto e : sm.exps) wts.push_back(-(e + sh));
    std::sort(wts.begin(), wts.end());
    return wts;
}

std::vector<std::pair<long long, int>> hp_filtration_dims(const HPStructure& H, const Work& w) {
    auto wts = hp_weights(H, w);
    std::vector<std::pair<long long, int>> dims;
    long long lo = wts.front(), hi = wts.back();
    for (long long i = lo; i <= hi + 1; ++i) {
        int d = 0;
        for (auto& x : wts)
            if (x >= i) ++d;
        dims.push_back({i, d});
    }
    return dims;
}

Polygon hodge_polygon(const HPStructure& H, const Work& w) {
    Polygon P;
    auto wts = hp_weights(H, w);
    std::map<Rat, int> acc;
    for (auto e : wts) acc[Rat(e)] += 1;
    for (auto& [s, m] : acc) P.slopes.push_back({s, m});
    return P;
}

Polygon weight_polygon(const HPStructure& H) {
    Polygon P;
    std::map<Rat, int> acc;
    for (auto& mu : H.wt) acc[mu] += 1;
    for (auto& [s, m] : acc) P.slopes.push_back({s, m});
    return P;
}

PolygonReport polygons_compare(const HPStructure& H, const Work& w) {
    PolygonReport rep;
    rep.HP = hodge_polygon(H, w);
    rep.WP = weight_polygon(H);
    rep.wp_above_hp = polygon_above(rep.WP, rep.HP);
    rep.endpoints_equal = rep.WP.endpoint() == rep.HP.endpoint();
    return rep;
}

long long hp_total_degree(const HPStructure& H, const Work& w) {
    long long s = 0;
    for (auto e : hp_weights(H, w)) s += e;
    return s;
}

namespace {

// z expanded at u: z = zeta (1 + zeta u)^{-1}
LS z_at_u(const FieldCtx& k, const Work& w) {
    long long N = w.u_order;
    LS den(k, LVar::u, N);
    den.set_coeff(0, Px::from_int(k, 1));
    den.set_coeff(1, Px::zeta(k));
    LS r = den.inv(w);
    std::vector<Px> tmp;
    LS out(k, LVar::u, N);
    for (long long e = 0; e < N; ++e) out.set_coeff(e, r.coeff(e) * Px::zeta(k));
    return out;
}

// transport a z-side matrix (F_q-coefficient Laurent data) into u-side series
LSMat z_matrix_to_u(const LSMat& B, const Work& w) {
    const FieldCtx& k = B.a[0].ctx();
    LS zu = z_at_u(k, w);
    LS zu_inv = zu.inv(w);
    LSMat out(B.rows, B.cols, LS::zero(k, LVar::u, w.u_order));
    for (size_t i = 0; i < B.rows; ++i)
        for (size_t j = 0; j < B.cols; ++j) {
            const LS& f = B.at(i, j);
            LS acc(k, LVar::u, w.u_order);
            // evaluate the Laurent polynomial/series at z = zu
            for (long long e = -64; e < f.trunc(); ++e) {
                Px c = f.coeff(e);
                if (c.is_exact_zero()) continue;
                LS pw = LS::constant(k, LVar::u, w.u_order, Px::from_int(k, 1));
                long long a = e >= 0 ? e : -e;
                const LS& base = e >= 0 ? zu : zu_inv;
                for (long long q2 = 0; q2 < a; ++q2) pw = pw * base;
                acc = acc + pw.map_coeffs([&](const Px& x) { return x * c; });
            }
            out.at(i, j) = acc;
        }
    return out;
}

// rank of a z-side matrix over the Laurent field at the working truncation
int ls_rank(LSMat M, const Work& w) {
    size_t rows = M.rows, cols = M.cols;
    int rank = 0;
    size_t rr = 0;
    for (size_t c = 0; c < cols && rr < rows; ++c) {
        size_t sel = rows;
        long long best = 0;
        for (size_t i = rr; i < rows; ++i) {
            auto o = M.at(i, c).ord();
            if (!o) continue;
            if (sel == rows || *o < best) {
                sel = i;
                best = *o;
            }
        }
        if (sel == rows) continue;
        for (size_t j = 0; j < cols; ++j) std::swap(M.at(sel, j), M.at(rr, j));
        LS piv_inv = M.at(rr, c).shifted(-best).inv(w).shifted(-best);
        for (size_t i = rr + 1; i < rows; ++i) {
            if (M.at(i, c).is_known_zero()) continue;
            LS f = M.at(i, c) * piv_inv;
            for (size_t j = c; j < cols; ++j) M.at(i, j) = M.at(i, j) - f * M.at(rr, j);
        }
        ++rank;
        ++rr;
    }
    return rank;
}

// basis of the intersection lattice q' = q cap span(Bu), where q = U C[[u]]^r
LSMat q_intersect(const LSMat& U, const LSMat& Bu, const Work& w) {
    LSMat N = ls_solve(U, Bu, w);
    long long sh = 0;
    for (auto& e : N.a) {
        auto o = e.ord();
        if (o) sh = std::min(sh, *o);
    }
    LSMat Ns = N.map([&](const LS& x) { return x.shifted(-sh); });
    SmithResult sm = smith_form(Ns, w);
    if (!sm.certified) throw PrecisionExhausted("subspace basis rank not certified at truncation");
    // q' basis = U * Us^{-1} restricted to the first k columns
    LSMat W2 = ls_mat_mul(U, sm.Uinv);
    LSMat out(U.rows, Bu.cols, LS::zero(U.a[0].ctx(), LVar::u, U.a[0].trunc()));
    for (size_t i = 0; i < U.rows; ++i)
        for (size_t j = 0; j < Bu.cols; ++j) out.at(i, j) = W2.at(i, j);
    return out;
}

}  // namespace

SemistabilityReport degrees_and_semistability(const HPStructure& H, const std::vector<LSMat>& user_subspaces,
                                              const Work& w) {
    SemistabilityReport rep;
    const FieldCtx& k = H.ctx();
    int r = H.rank();
    long long N = w.u_order;

    // ambient lattice p and the identity basis
    LSMat P = ls_identity(k, LVar::u, N, r);

    // weights sorted ascending define the flag subspaces
    std::vector<Rat> mus = H.wt;
    std::sort(mus.begin(), mus.end());
    mus.erase(std::unique(mus.begin(), mus.end()), mus.end());

    auto run_check = [&](const std::string& label, const LSMat& Bz, bool require_equality) {
        SubspaceCheck chk;
        chk.label = label;
        int kdim = (int)Bz.cols;
        // saturation over F_q[[z]]: integral entries and unit elementary divisors
        for (auto& e : Bz.a) {
            auto o = e.ord();
            if (o && *o < 0) throw NotSaturated();
        }
        {
            SmithResult sm = smith_form(Bz, w);
            for (size_t i = 0; i < (size_t)kdim && i < sm.exps.size(); ++i)
                if (sm.exps[i] != 0) throw NotSaturated();
        }
        LSMat Bu = z_matrix_to_u(Bz, w);
        LSMat qp = q_intersect(H.U, Bu, w);
        LSMat pp = q_intersect(P, Bu, w);
        chk.deg_q = lattice_relative_degree(qp, pp, w);
        // induced weight degree over the z-side
        Rat dw(0);
        int prev_dim = 0;
        for (auto& mu : mus) {
            // W_mu = coordinates with weight <= mu
            std::vector<int> rows;
            for (int i = 0; i < r; ++i)
                if (H.wt[i] <= mu) rows.push_back(i);
            // dim(H' cap W_mu) = k - rank(rows outside W_mu of Bz)
            LSMat outside((size_t)(r - (int)rows.size()), Bz.cols, LS::zero(k, LVar::z, Bz.a[0].trunc()));
            size_t oi = 0;
            for (int i = 0; i < r; ++i) {
                bool inw = H.wt[i] <= mu;
                if (inw) continue;
                for (size_t j = 0; j < Bz.cols; ++j) outside.at(oi, j) = Bz.at(i, j);
                ++oi;
            }
            int dim_cap = kdim - (oi ? ls_rank(outside, w) : 0);
            dw += mu * Rat(dim_cap - prev_dim);
            prev_dim = dim_cap;
        }
        chk.deg_w = dw;
        chk.ok = Rat(chk.deg_q) <= chk.deg_w;
        chk.equality = Rat(chk.deg_q) == chk.deg_w;
        if (!chk.ok) rep.consistent = false;
        if (require_equality && !chk.equality) rep.filtration_equalities = false;
        rep.checks.push_back(chk);
    };

    // (a) the weight filtration subspaces (equality mandatory)
    for (auto& mu : mus) {
        std::vector<int> rows;
        for (int i = 0; i < r; ++i)
            if (H.wt[i] <= mu) rows.push_back(i);
        LSMat Bz(r, rows.size(), LS::zero(k, LVar::z, N));
        for (size_t j = 0; j < rows.size(); ++j)
            Bz.at(rows[j], j) = LS::constant(k, LVar::z, N, Px::from_int(k, 1));
        run_check("W_" + to_string(mu), Bz, true);
    }
    // (b) coordinate lines of the adapted basis
    for (int i = 0; i < r; ++i) {
        LSMat Bz(r, 1, LS::zero(k, LVar::z, N));
        Bz.at(i, 0) = LS::constant(k, LVar::z, N, Px::from_int(k, 1));
        run_check("e_" + std::to_string(i + 1), Bz, false);
    }
    // (c) user-supplied subspaces
    int idx = 0;
    for (auto& B : user_subspaces) run_check("user_" + std::to_string(++idx), B, false);
    return rep;
}

bool lattices_unit_equivalent(const LSMat& U1, const LSMat& U2, const Work& w) {
    LSMat T = ls_solve(U2, U1, w);
    // integral with unit elementary divisors
    for (auto& e : T.a) {
        auto o = e.ord();
        if (o && *o < 0) return false;
    }
    SmithResult sm = smith_form(T, w);
    for (auto e : sm.exps)
        if (e != 0) return false;
    return true;
}

LSMat hp_graded_U(const HPStructure& H, const Rat& mu, const Work& w) {
    const FieldCtx& k = H.ctx();
    int r = H.rank();
    long long N = H.U.a[0].trunc();
    std::vector<int> leq, lt, eq;
    for (int i = 0; i < r; ++i) {
        if (H.wt[i] <= mu) leq.push_back(i);
        if (H.wt[i] < mu) lt.push_back(i);
        if (H.wt[i] == mu) eq.push_back(i);
    }
    if (eq.empty()) throw PxError("no basis vectors of the requested weight");
    // q cap W_{<=mu}
    LSMat B(r, leq.size(), LS::zero(k, LVar::u, N));
    for (size_t j = 0; j < leq.size(); ++j) B.at(leq[j], j) = LS::constant(k, LVar::u, N, Px::from_int(k, 1));
    LSMat Q = q_intersect(H.U, B, w);
    // project away the lower-weight coordinates
    LSMat G(eq.size(), Q.cols, LS::zero(k, LVar::u, N));
    for (size_t i = 0; i < eq.size(); ++i)
        for (size_t j = 0; j < Q.cols; ++j) G.at(i, j) = Q.at(eq[i], j);
    return lattice_basis_from_generators(G, w);
}

CompatReport compatibility_checks(const AndersonModule& E, const Work& w) {
    CompatReport rep;
    AMotive M = motive_of(E, w);
    DualAMotive Md = dual_motive_of(E, w);
    PxMat X = xi_matrix(E, w);
    Trivialization t = rigid_trivialization(M, w);
    LatticeResult lat = drinfeld_lattice(E, t, w);

    HPStructure H1E = hp_of_anderson(E, lat.basis, w);
    HPStructure H1Md = hp_of_anderson_dual(E, t, X, H1E.wt, w);
    (void)Md;
    // H1(M) (x) Omega: dual of the motive structure, weights shifted by 0
    std::vector<FlagStep> flag = {{Rat(M.dim(), M.rank()), M.rank()}};
    HPStructure H1M = hp_of_motive(M, t, flag, w);
    HPStructure H1M_dual = hp_dual(H1M, w);

    rep.weights_h1e = hp_weights(H1E, w);
    rep.weights_h1m = hp_weights(H1M_dual, w);
    rep.h1e_vs_dual = lattices_unit_equivalent(H1E.U, H1Md.U, w);
    rep.h1e_vs_motive = lattices_unit_equivalent(H1E.U, H1M_dual.U, w);
    rep.square_commutes = rep.h1e_vs_dual && rep.h1e_vs_motive && lattices_unit_equivalent(H1Md.U, H1M_dual.U, w);
    return rep;
}

}  // namespace tmot
