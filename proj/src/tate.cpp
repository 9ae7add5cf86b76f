#include "tmot/tate.hpp"

#include <cassert>
#include <sstream>

namespace tmot {

namespace {

// binomial coefficient modulo p via the base-p digits
uint32_t binom_mod_p(long long n, long long k, uint32_t p) {
    if (k < 0 || k > n) return 0;
    uint32_t r = 1;
    while (n > 0 || k > 0) {
        long long nd = n % p, kd = k % p;
        if (kd > nd) return 0;
        // small binomial nd choose kd < p
        long long b = 1;
        for (long long j = 1; j <= kd; ++j) b = b * (nd - kd + j) / j;
        r = (uint32_t)((r * (b % p)) % p);
        n /= p;
        k /= p;
    }
    return r;
}

}  // namespace

void TS::fit() {
    if ((int)a_.size() > N_ + 1) a_.resize(N_ + 1);
    while (!a_.empty() && a_.back().is_exact_zero()) a_.pop_back();
}

TS TS::constant(const FieldCtx& k, int N, const Px& c) {
    TS r(k, N);
    r.a_ = {c};
    r.fit();
    return r;
}

TS TS::from_tpoly(const TPoly& f, int N) {
    TS r(f.ctx(), N);
    r.a_ = f.coeffs();
    r.fit();
    return r;
}

Px TS::coeff(int n) const {
    if (n < 0 || n >= (int)a_.size()) return Px::zero(k_);
    return a_[n];
}

void TS::set_coeff(int n, const Px& c) {
    if (n > N_) return;
    if ((int)a_.size() <= n) a_.resize(n + 1, Px::zero(k_));
    a_[n] = c;
    fit();
}

bool TS::is_known_zero() const {
    for (auto& c : a_)
        if (c.has_terms()) return false;
    return true;
}

TS TS::operator-() const {
    TS r = *this;
    for (auto& c : r.a_) c = -c;
    return r;
}

TS operator+(const TS& a, const TS& b) {
    const FieldCtx& k = a.k_.p ? a.k_ : b.k_;
    TS r(k, std::min(a.k_.p ? a.N_ : b.N_, b.k_.p ? b.N_ : a.N_));
    r.a_.resize(std::min<size_t>(std::max(a.a_.size(), b.a_.size()), r.N_ + 1), Px::zero(k));
    for (size_t i = 0; i < r.a_.size(); ++i) {
        Px s = Px::zero(k);
        if (i < a.a_.size()) s = s + a.a_[i];
        if (i < b.a_.size()) s = s + b.a_[i];
        r.a_[i] = s;
    }
    r.fit();
    return r;
}

TS operator-(const TS& a, const TS& b) { return a + (-b); }

TS operator*(const TS& a, const TS& b) {
    const FieldCtx& k = a.k_.p ? a.k_ : b.k_;
    TS r(k, std::min(a.k_.p ? a.N_ : b.N_, b.k_.p ? b.N_ : a.N_));
    if (a.a_.empty() || b.a_.empty()) return r;
    r.a_.assign(std::min<size_t>(a.a_.size() + b.a_.size() - 1, r.N_ + 1), Px::zero(k));
    for (size_t i = 0; i < a.a_.size(); ++i) {
        if (a.a_[i].is_exact_zero()) continue;
        for (size_t j = 0; j < b.a_.size() && i + j < r.a_.size(); ++j)
            r.a_[i + j] = r.a_[i + j] + a.a_[i] * b.a_[j];
    }
    r.fit();
    return r;
}

TS TS::scaled(const Px& c) const {
    TS r = *this;
    for (auto& x : r.a_) x = x * c;
    r.fit();
    return r;
}

TS TS::mul_tpoly(const TPoly& f) const { return *this * TS::from_tpoly(f, N_); }

TS TS::truncated(int N) const {
    TS r = *this;
    r.N_ = std::min(r.N_, N);
    r.fit();
    return r;
}

TS TS::frob_sigma() const {
    TS r = *this;
    for (auto& x : r.a_) x = x.frob_sigma();
    return r;
}

TS TS::frob_sigma_check() const {
    TS r = *this;
    for (auto& x : r.a_) x = x.frob_sigma_check();
    return r;
}

TS::ConvWitness TS::conv_witness(const Rat& s) const {
    ConvWitness w;
    bool first = true;
    Rat last(0);
    w.tail_increasing = true;
    for (int n = 0; n < (int)a_.size(); ++n) {
        if (!a_[n].has_terms()) continue;
        Rat v = *a_[n].val() - s * Rat(n);
        if (first || v < w.bound) w.bound = v;
        if (!first && n > (int)a_.size() / 2 && v < last) w.tail_increasing = false;
        last = v;
        first = false;
    }
    if (first) w.bound = Rat(0);
    return w;
}

Px TS::eval(const Px& x, const Rat& s_witness) const {
    Px acc = Px::zero(k_);
    Px xp = Px::from_int(k_, 1);
    for (int n = 0; n < (int)a_.size(); ++n) {
        if (n) xp = xp * x;
        if (!a_[n].is_exact_zero()) acc = acc + a_[n] * xp;
    }
    // tail certificate: v(a_n x^n) >= bound + n (s + v(x)) for n > N
    if (!x.is_exact_zero()) {
        ConvWitness wit = conv_witness(s_witness);
        Rat vx = x.val_lower_bound();
        if (s_witness + vx > Rat(0)) {
            Rat tail = wit.bound + Rat(N_ + 1) * (s_witness + vx);
            acc = acc.with_prec(Prec(tail));
        } else {
            acc = acc.with_prec(Prec(Rat(0)));  // no useful certificate
        }
    }
    return acc;
}

LS TS::taylor_at_theta(int u_order, const Rat& s_witness, const Work& w) const {
    assert(s_witness > Rat(1));
    LS out(k_, LVar::u, u_order);
    Px th = Px::theta(k_);
    // each witnessed growth exponent gives a valid tail bound; take the best
    std::vector<std::pair<Rat, Rat>> wits;  // (s, bound)
    for (Rat s : {s_witness, Rat(2), Rat(3), Rat(5), Rat(9)}) {
        if (s <= Rat(1)) continue;
        wits.push_back({s, conv_witness(s).bound});
    }
    for (int j = 0; j < u_order; ++j) {
        Px bj = Px::zero(k_);
        for (int n = j; n < (int)a_.size(); ++n) {
            if (a_[n].is_exact_zero()) continue;
            uint32_t c = binom_mod_p(n, j, k_.p);
            if (!c) continue;
            bj = bj + a_[n].scaled(Fq::from_int(k_.p, c)) * th.pow(n - j);
        }
        // tail bound: v >= bound + s n - (n - j) >= bound + j + (N+1)(s-1)
        Rat tail = wits[0].second + Rat(j) + Rat(N_ + 1) * (wits[0].first - Rat(1));
        for (auto& [s, b] : wits) tail = std::max(tail, b + Rat(j) + Rat(N_ + 1) * (s - Rat(1)));
        bj = bj.with_prec(min_prec(bj.prec(), Prec(std::min(tail, w.zeta_prec))));
        out.set_coeff(j, bj);
    }
    return out;
}

std::string TS::str(int max_terms) const {
    std::ostringstream os;
    int shown = 0;
    bool first = true;
    for (int n = 0; n < (int)a_.size() && shown < max_terms; ++n) {
        if (a_[n].is_exact_zero()) continue;
        if (!first) os << " + ";
        first = false;
        ++shown;
        os << "(" << a_[n].str() << ")";
        if (n == 1)
            os << "*t";
        else if (n > 1)
            os << "*t^" << n;
    }
    if (first) os << "0";
    os << " + O(t^" << N_ + 1 << ")";
    return os.str();
}

TSMat ts_identity(const FieldCtx& k, int N, size_t n) {
    TSMat m(n, n, TS::zero(k, N));
    for (size_t i = 0; i < n; ++i) m.at(i, i) = TS::constant(k, N, Px::from_int(k, 1));
    return m;
}

TSMat ts_mat_mul(const TSMat& A, const TSMat& B) {
    const TS& ex = A.a.empty() ? B.a[0] : A.a[0];
    return mat_mul(A, B, TS::zero(ex.ctx(), ex.order()));
}

TSMat ts_from_tpoly_mat(const TPolyMat& M, int N) {
    return M.map([&](const TPoly& f) { return TS::from_tpoly(f, N); });
}

TSMat ts_sigma(const TSMat& M) {
    return M.map([](const TS& f) { return f.frob_sigma(); });
}

TSMat ts_sigma_check(const TSMat& M) {
    return M.map([](const TS& f) { return f.frob_sigma_check(); });
}

bool ts_mat_known_zero(const TSMat& M) {
    for (auto& e : M.a)
        if (!e.is_known_zero()) return false;
    return true;
}

TSMat ts_mat_inverse(const TSMat& M, const Work& w) {
    size_t n = M.rows;
    const FieldCtx& k = M.a[0].ctx();
    int N = M.a[0].order();
    PxMat M0(n, n, Px::zero(k));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) M0.at(i, j) = M.at(i, j).coeff(0);
    PxMat G0 = px_inverse(M0, w);
    std::vector<PxMat> G = {G0};
    for (int i = 1; i <= N; ++i) {
        PxMat acc(n, n, Px::zero(k));
        for (int j = 1; j <= i; ++j) {
            PxMat Mj(n, n, Px::zero(k));
            bool nz = false;
            for (size_t r = 0; r < n; ++r)
                for (size_t c = 0; c < n; ++c) {
                    Mj.at(r, c) = M.at(r, c).coeff(j);
                    nz = nz || !Mj.at(r, c).is_exact_zero();
                }
            if (!nz) continue;
            acc = mat_add(acc, px_mat_mul(Mj, G[i - j]));
        }
        PxMat Gi = px_mat_mul(G0, acc);
        for (auto& x : Gi.a) x = -x;
        G.push_back(std::move(Gi));
    }
    TSMat out(n, n, TS::zero(k, N));
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) {
            TS f(k, N);
            for (int i = 0; i <= N; ++i) f.set_coeff(i, G[i].at(r, c));
            out.at(r, c) = f;
        }
    return out;
}

LSMat ts_mat_taylor_at_theta(const TSMat& M, int u_order, const Rat& s_witness, const Work& w) {
    return M.map([&](const TS& f) { return f.taylor_at_theta(u_order, s_witness, w); });
}

}  // namespace tmot
