#include "tmot/local.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace tmot {

void LS::normalize() {
    while (!c_.empty() && (long long)(lo_ + c_.size()) > N_) c_.pop_back();
    while (!c_.empty() && c_.front().is_exact_zero()) {
        c_.erase(c_.begin());
        ++lo_;
    }
    while (!c_.empty() && c_.back().is_exact_zero()) c_.pop_back();
    if (c_.empty()) lo_ = 0;
}

LS LS::constant(const FieldCtx& k, LVar v, long long N, const Px& c) {
    LS r(k, v, N);
    r.c_ = {c};
    r.normalize();
    return r;
}

LS LS::uniformizer_pow(const FieldCtx& k, LVar v, long long N, long long e) {
    LS r(k, v, N);
    r.lo_ = e;
    r.c_ = {Px::from_int(k, 1)};
    r.normalize();
    return r;
}

LS LS::from_tpoly(const TPoly& f, LVar v, long long N) {
    LS r(f.ctx(), v, N);
    if (v == LVar::u) {
        auto jets = f.taylor_at_theta((int)std::min<long long>(N, f.deg() + 1));
        r.lo_ = 0;
        r.c_ = std::move(jets);
    } else {
        // t = 1/z: coefficient of t^n goes to z^{-n}
        int d = f.deg();
        if (d < 0) return r;
        r.lo_ = -d;
        r.c_.assign(d + 1, Px::zero(f.ctx()));
        for (int n = 0; n <= d; ++n) r.c_[d - n] = f.coeff(n);
    }
    r.normalize();
    return r;
}

Px LS::coeff(long long e) const {
    if (e < lo_ || e >= lo_ + (long long)c_.size()) return Px::zero(k_);
    return c_[e - lo_];
}

std::optional<long long> LS::ord() const {
    for (size_t i = 0; i < c_.size(); ++i)
        if (c_[i].has_terms()) return lo_ + (long long)i;
    return std::nullopt;
}

bool LS::is_known_zero() const { return !ord().has_value(); }

LS LS::operator-() const {
    LS r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

LS operator+(const LS& a, const LS& b) {
    if (a.k_.p == 0) return b;
    if (b.k_.p == 0) return a;
    LS r(a.k_, a.v_, std::min(a.N_, b.N_));
    long long lo = std::min(a.c_.empty() ? b.lo_ : a.lo_, b.c_.empty() ? a.lo_ : b.lo_);
    long long hi = r.N_;
    if (a.c_.empty() && b.c_.empty()) return r;
    r.lo_ = lo;
    r.c_.assign(std::max<long long>(0, hi - lo), Px::zero(a.k_));
    for (size_t i = 0; i < a.c_.size(); ++i)
        if (a.lo_ + (long long)i < hi) r.c_[a.lo_ + i - lo] = r.c_[a.lo_ + i - lo] + a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i)
        if (b.lo_ + (long long)i < hi) r.c_[b.lo_ + i - lo] = r.c_[b.lo_ + i - lo] + b.c_[i];
    r.normalize();
    return r;
}

LS operator-(const LS& a, const LS& b) { return a + (-b); }

LS operator*(const LS& a, const LS& b) {
    assert(a.v_ == b.v_);
    // truncation: N = min(N_a + lo_b, N_b + lo_a) (lo as valuation lower bound)
    long long Na = a.N_ + (a.c_.empty() ? 0 : b.lo_);
    long long Nb = b.N_ + (b.c_.empty() ? 0 : a.lo_);
    long long N;
    if (a.c_.empty() && b.c_.empty())
        N = a.N_ + b.N_;
    else if (a.c_.empty())
        N = a.N_ + b.lo_;
    else if (b.c_.empty())
        N = b.N_ + a.lo_;
    else
        N = std::min(a.N_ + b.lo_, b.N_ + a.lo_);
    (void)Na;
    (void)Nb;
    LS r(a.k_, a.v_, N);
    if (a.c_.empty() || b.c_.empty()) return r;
    r.lo_ = a.lo_ + b.lo_;
    long long len = std::max<long long>(0, N - r.lo_);
    r.c_.assign(len, Px::zero(a.k_));
    for (size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_exact_zero()) continue;
        for (size_t j = 0; j < b.c_.size(); ++j) {
            long long e = a.lo_ + (long long)i + b.lo_ + (long long)j;
            if (e >= N) break;
            r.c_[e - r.lo_] = r.c_[e - r.lo_] + a.c_[i] * b.c_[j];
        }
    }
    r.normalize();
    return r;
}

LS LS::shifted(long long e) const {
    LS r = *this;
    r.lo_ += e;
    r.N_ += e;
    return r;
}

LS LS::truncated(long long N) const {
    LS r = *this;
    r.N_ = std::min(r.N_, N);
    r.normalize();
    return r;
}

LS LS::inv(const Work& w) const {
    auto o = ord();
    if (!o) {
        if (getenv("TMOT_SMITH_DEBUG")) {
            fprintf(stderr, "inv failure: lo=%lld size=%zu N=%lld coeffs:", lo_, c_.size(), N_);
            for (size_t i = 0; i < c_.size() && i < 8; ++i)
                fprintf(stderr, " [%lld]%s", lo_ + (long long)i,
                        c_[i].has_terms() ? "T" : (c_[i].is_exact() ? "0ex" : "0px"));
            fprintf(stderr, "\n");
        }
        throw PxError("local series: inverse of a series with no known nonzero term");
    }
    // Known-zero coefficients below the leading order cannot be inverted
    // through; drop them and cap the output precision by the propagated
    // error bound  min_j prec_j - 2 v(lead).
    Prec cap;
    LS x2 = *this;
    {
        while (x2.lo_ < *o && !x2.c_.empty()) {
            const Px& c0 = x2.c_.front();
            if (c0.has_terms()) break;
            if (!c0.is_exact() ) cap = min_prec(cap, c0.prec());
            x2.c_.erase(x2.c_.begin());
            ++x2.lo_;
        }
    }
    // x = c u^a (1 + y), invert by geometric series
    Px lead = x2.coeff(*o);
    if (cap) cap = Prec(*cap - Rat(2) * lead.val_lower_bound());
    LS rest = x2;
    rest.set_coeff(*o, Px::zero(k_));
    LS y = rest.shifted(-*o);  // (x - lead u^a) * u^{-a}; then divide by lead
    LS yn(k_, v_, N_ - *o);
    yn.lo_ = y.lo_;
    yn.c_.clear();
    for (long long e = y.lo_; e < y.lo_ + (long long)y.c_.size(); ++e) yn.c_.push_back(y.coeff(e).div(lead, Prec(w.zeta_prec)));
    yn.normalize();
    LS one = LS::constant(k_, v_, N_ - *o, Px::from_int(k_, 1));
    LS sum = one, term = one;
    for (long long k = 1; k <= N_ - *o; ++k) {
        term = term * (-yn);
        if (term.is_known_zero() && term.c_.empty()) break;
        sum = sum + term;
    }
    // result = sum * u^{-a} / lead
    LS r = sum.shifted(-*o);
    for (auto& c : r.c_) {
        c = c.div(lead, Prec(w.zeta_prec));
        if (cap) c = c.with_prec(min_prec(c.prec(), cap));
    }
    r.normalize();
    return r;
}

Px LS::eval_at_zero() const { return coeff(0); }

void LS::set_coeff(long long e, const Px& c) {
    if (e >= N_) return;
    if (c_.empty()) {
        lo_ = e;
        c_ = {c};
        normalize();
        return;
    }
    if (e < lo_) {
        c_.insert(c_.begin(), (size_t)(lo_ - e), Px::zero(k_));
        lo_ = e;
    } else if (e >= lo_ + (long long)c_.size()) {
        c_.resize((size_t)(e - lo_ + 1), Px::zero(k_));
    }
    c_[e - lo_] = c;
    normalize();
}

std::string LS::str(const std::string& var_name) const {
    std::ostringstream os;
    bool first = true;
    for (long long e = lo_; e < lo_ + (long long)c_.size(); ++e) {
        const Px& c = coeff(e);
        if (c.is_exact_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        if (e != 0) os << "*" << var_name << "^(" << e << ")";
    }
    if (!first) os << " + ";
    os << "O(" << var_name << "^(" << N_ << "))";
    return os.str();
}

LSMat ls_identity(const FieldCtx& k, LVar v, long long N, size_t n) {
    LSMat m(n, n, LS::zero(k, v, N));
    for (size_t i = 0; i < n; ++i) m.at(i, i) = LS::constant(k, v, N, Px::from_int(k, 1));
    return m;
}

LSMat ls_mat_mul(const LSMat& A, const LSMat& B) {
    const LS& ex = A.a.empty() ? B.a[0] : A.a[0];
    return mat_mul(A, B, LS::zero(ex.ctx(), ex.var(), ex.trunc()));
}

SmithResult smith_form(const LSMat& Min, const Work& w) {
    LSMat M = Min;
    size_t n = M.rows, m = M.cols;
    const FieldCtx& k = M.a[0].ctx();
    LVar var = M.a[0].var();
    long long N = M.a[0].trunc();
    for (auto& e : M.a) N = std::min(N, e.trunc());
    SmithResult res;
    res.U = ls_identity(k, var, N, n);
    res.Uinv = ls_identity(k, var, N, n);
    res.V = ls_identity(k, var, N, m);
    res.Vinv = ls_identity(k, var, N, m);
    for (auto& e : M.a) {
        for (long long x = 0; x < e.trunc(); ++x) {
            const Px c = e.coeff(x);
            if (c.is_known_zero() && !c.is_exact()) res.exact_zeros = false;
        }
    }

    size_t steps = std::min(n, m);
    for (size_t s = 0; s < steps; ++s) {
        // pivot: minimal order, row-major tie break
        size_t pi = n, pj = m;
        long long best = 0;
        for (size_t i = s; i < n; ++i) {
            for (size_t j = s; j < m; ++j) {
                auto o = M.at(i, j).ord();
                if (!o) continue;
                if (pi == n || *o < best) {
                    pi = i;
                    pj = j;
                    best = *o;
                }
            }
        }
        if (pi == n) {
            // remaining block is zero to truncation
            for (size_t r = s; r < steps; ++r) res.exps.push_back(N);
            res.certified = false;
            break;
        }
        // swap into place
        if (pi != s) {
            for (size_t j = 0; j < m; ++j) std::swap(M.at(pi, j), M.at(s, j));
            for (size_t j = 0; j < n; ++j) std::swap(res.U.at(pi, j), res.U.at(s, j));
            for (size_t i = 0; i < n; ++i) std::swap(res.Uinv.at(i, pi), res.Uinv.at(i, s));
        }
        if (pj != s) {
            for (size_t i = 0; i < n; ++i) std::swap(M.at(i, pj), M.at(i, s));
            for (size_t i = 0; i < m; ++i) std::swap(res.V.at(i, pj), res.V.at(i, s));
            for (size_t j = 0; j < m; ++j) std::swap(res.Vinv.at(s, j), res.Vinv.at(pj, j));
        }
        // clear column and row
        if (getenv("TMOT_SMITH_DEBUG")) {
            fprintf(stderr, "smith stage %zu pivot ord %lld trunc %lld\n", s,
                    M.at(s, s).ord() ? *M.at(s, s).ord() : -999, M.at(s, s).trunc());
        }
        LS piv_inv = M.at(s, s).inv(w);
        for (size_t i = s + 1; i < n; ++i) {
            if (M.at(i, s).is_known_zero()) continue;
            LS f = M.at(i, s) * piv_inv;
            for (size_t j = s; j < m; ++j) M.at(i, j) = M.at(i, j) - f * M.at(s, j);
            for (size_t j = 0; j < n; ++j) res.U.at(i, j) = res.U.at(i, j) - f * res.U.at(s, j);
            for (size_t j = 0; j < n; ++j) res.Uinv.at(j, s) = res.Uinv.at(j, s) + f * res.Uinv.at(j, i);
        }
        for (size_t j = s + 1; j < m; ++j) {
            if (M.at(s, j).is_known_zero()) continue;
            LS f = M.at(s, j) * piv_inv;
            for (size_t i = s; i < n; ++i) M.at(i, j) = M.at(i, j) - M.at(i, s) * f;
            for (size_t i = 0; i < m; ++i) res.V.at(i, j) = res.V.at(i, j) - res.V.at(i, s) * f;
            for (size_t i = 0; i < m; ++i) res.Vinv.at(s, i) = res.Vinv.at(s, i) + f * res.Vinv.at(j, i);
        }
        // normalize the pivot to a pure power of the uniformizer
        long long e = *M.at(s, s).ord();
        if (getenv("TMOT_SMITH_DEBUG")) fprintf(stderr, "  normalize stage %zu e=%lld\n", s, e);
        LS unit_inv = (M.at(s, s).shifted(-e)).inv(w);
        M.at(s, s) = LS::uniformizer_pow(k, var, M.at(s, s).trunc(), e);
        for (size_t j = 0; j < n; ++j) res.U.at(s, j) = res.U.at(s, j) * unit_inv;
        for (size_t j = 0; j < n; ++j) res.Uinv.at(j, s) = res.Uinv.at(j, s) * unit_inv.inv(w);
        res.exps.push_back(e);
    }
    std::sort(res.exps.begin(), res.exps.end());
    for (auto e : res.exps)
        if (e >= N) res.certified = false;
    return res;
}

LSMat lattice_basis_from_generators(const LSMat& G, const Work& w) {
    SmithResult s = smith_form(G, w);
    size_t r = G.rows;
    const FieldCtx& k = G.a[0].ctx();
    LVar var = G.a[0].var();
    long long N = G.a[0].trunc();
    // span of columns of G = Uinv * diag(var^e) * (first r columns)
    LSMat D(r, r, LS::zero(k, var, N));
    if (s.exps.size() < r) throw SmithError("lattice generators do not have full rank");
    // exponents in pivot order are those recorded before sorting; recompute:
    // conservative: use smith a second time without sorting via the diagonal of U*G*V
    LSMat UG = ls_mat_mul(s.U, G);
    LSMat UGV = ls_mat_mul(UG, s.V);
    for (size_t i = 0; i < r; ++i) {
        auto o = UGV.at(i, i).ord();
        if (!o) throw SmithError("lattice generators do not have full rank at truncation");
        D.at(i, i) = LS::uniformizer_pow(k, var, N, *o);
    }
    LSMat B = ls_mat_mul(s.Uinv, D);
    return B;
}

LSMat ls_solve(const LSMat& A, const LSMat& B, const Work& w) {
    size_t n = A.rows;
    const FieldCtx& k = A.a[0].ctx();
    LVar var = A.a[0].var();
    long long N = A.a[0].trunc();
    LSMat M(n, n + B.cols, LS::zero(k, var, N));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) M.at(i, j) = A.at(i, j);
        for (size_t j = 0; j < B.cols; ++j) M.at(i, n + j) = B.at(i, j);
    }
    std::vector<size_t> piv(n, 0);
    for (size_t s = 0; s < n; ++s) {
        size_t sel = n;
        long long best = 0;
        for (size_t i = s; i < n; ++i) {
            auto o = M.at(i, s).ord();
            if (!o) continue;
            if (sel == n || *o < best) {
                sel = i;
                best = *o;
            }
        }
        if (sel == n) throw SmithError("ls_solve: singular matrix at truncation");
        if (sel != s)
            for (size_t j = 0; j < M.cols; ++j) std::swap(M.at(sel, j), M.at(s, j));
        LS piv_inv = M.at(s, s).shifted(-best).inv(w).shifted(-best);
        for (size_t i = 0; i < n; ++i) {
            if (i == s || M.at(i, s).is_known_zero()) continue;
            LS f = M.at(i, s) * piv_inv;
            for (size_t j = s; j < M.cols; ++j) M.at(i, j) = M.at(i, j) - f * M.at(s, j);
        }
        piv[s] = s;
    }
    LSMat X(n, B.cols, LS::zero(k, var, N));
    for (size_t s = 0; s < n; ++s) {
        long long e = *M.at(s, s).ord();
        LS piv_inv = M.at(s, s).shifted(-e).inv(w).shifted(-e);
        for (size_t j = 0; j < B.cols; ++j) X.at(s, j) = M.at(s, n + j) * piv_inv;
    }
    return X;
}

long long lattice_relative_degree(const LSMat& G1, const LSMat& G2, const Work& w) {
    // G1, G2 are r x k bases of lattices with the same column span; solve
    // G2 T = G1 by elimination on the stacked system (k <= r allowed)
    size_t r = G2.rows, kk = G2.cols;
    const FieldCtx& k = G2.a[0].ctx();
    LVar var = G2.a[0].var();
    long long N = G2.a[0].trunc();
    Mat<LS> M(r, kk + G1.cols, LS::zero(k, var, N));
    for (size_t i = 0; i < r; ++i) {
        for (size_t j = 0; j < kk; ++j) M.at(i, j) = G2.at(i, j);
        for (size_t j = 0; j < G1.cols; ++j) M.at(i, kk + j) = G1.at(i, j);
    }
    std::vector<size_t> pivot_rows;
    size_t rr = 0;
    for (size_t c = 0; c < kk && rr < r; ++c) {
        size_t sel = r;
        long long best = 0;
        for (size_t i = rr; i < r; ++i) {
            auto o = M.at(i, c).ord();
            if (!o) continue;
            if (sel == r || *o < best) {
                sel = i;
                best = *o;
            }
        }
        if (sel == r) throw SmithError("relative degree: basis not of full rank at truncation");
        if (sel != rr)
            for (size_t j = 0; j < M.cols; ++j) std::swap(M.at(sel, j), M.at(rr, j));
        LS piv_inv = M.at(rr, c).shifted(-best).inv(w).shifted(-best);
        for (size_t i = 0; i < r; ++i) {
            if (i == rr || M.at(i, c).is_known_zero()) continue;
            LS f = M.at(i, c) * piv_inv;
            for (size_t j = c; j < M.cols; ++j) M.at(i, j) = M.at(i, j) - f * M.at(rr, j);
        }
        pivot_rows.push_back(rr);
        ++rr;
    }
    Mat<LS> T(kk, G1.cols, LS::zero(k, var, N));
    for (size_t c = 0; c < kk; ++c) {
        long long e = *M.at(c, c).ord();
        LS piv_inv = M.at(c, c).shifted(-e).inv(w).shifted(-e);
        for (size_t j = 0; j < G1.cols; ++j) T.at(c, j) = M.at(c, kk + j) * piv_inv;
    }
    long long sh = 0;
    for (auto& e : T.a) {
        auto o = e.ord();
        if (o) sh = std::min(sh, *o);
    }
    LSMat Ts = T.map([&](const LS& x) { return x.shifted(-sh); });
    SmithResult s = smith_form(Ts, w);
    long long sum = 0;
    for (auto e : s.exps) sum += e + sh;
    return -sum;
}

}  // namespace tmot
