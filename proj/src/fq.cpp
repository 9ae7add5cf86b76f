#include "tmot/fq.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace tmot {

namespace {

using Poly = std::vector<uint32_t>;  // dense, little-endian coefficients over F_p

void trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

int pdeg(const Poly& f) { return (int)f.size() - 1; }

Poly pmul(const Poly& a, const Poly& b, uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    trim(r);
    return r;
}

Poly padd(const Poly& a, const Poly& b, uint32_t p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        uint32_t v = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
        r[i] = v % p;
    }
    trim(r);
    return r;
}

Poly psub(const Poly& a, const Poly& b, uint32_t p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        uint32_t av = i < a.size() ? a[i] : 0, bv = i < b.size() ? b[i] : 0;
        r[i] = (av + p - bv) % p;
    }
    trim(r);
    return r;
}

uint32_t inv_mod(uint32_t a, uint32_t p) {
    long long t = 0, nt = 1, r = p, nr = a % p;
    while (nr) {
        long long q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    return (uint32_t)((t % p + p) % p);
}

Poly pmod(Poly a, const Poly& f, uint32_t p) {
    int df = pdeg(f);
    trim(a);
    while (pdeg(a) >= df) {
        uint32_t c = a.back();
        int sh = pdeg(a) - df;
        for (int i = 0; i <= df; ++i) a[i + sh] = (a[i + sh] + (p - c % p) * f[i]) % p;
        trim(a);
    }
    return a;
}

Poly pmulmod(const Poly& a, const Poly& b, const Poly& f, uint32_t p) { return pmod(pmul(a, b, p), f, p); }

Poly ppowmod(Poly base, uint64_t e, const Poly& f, uint32_t p) {
    Poly r = {1};
    base = pmod(std::move(base), f, p);
    while (e) {
        if (e & 1) r = pmulmod(r, base, f, p);
        base = pmulmod(base, base, f, p);
        e >>= 1;
    }
    return r;
}

Poly pinvmod(const Poly& a, const Poly& f, uint32_t p) {
    Poly r0 = f, r1 = pmod(a, f, p), s0 = {}, s1 = {1};
    while (!r1.empty()) {
        Poly q;
        Poly rem = r0;
        int d1 = pdeg(r1);
        uint32_t lcinv = inv_mod(r1.back(), p);
        while (!rem.empty() && pdeg(rem) >= d1) {
            int sh = pdeg(rem) - d1;
            uint32_t c = rem.back() * lcinv % p;
            if ((int)q.size() < sh + 1) q.resize(sh + 1, 0);
            q[sh] = (q[sh] + c) % p;
            for (int i = 0; i <= d1; ++i) rem[i + sh] = (rem[i + sh] + (p - c * r1[i] % p) % p) % p;
            trim(rem);
        }
        Poly ns = psub(s0, pmul(q, s1, p), p);
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(ns);
    }
    if (pdeg(r0) != 0) throw std::domain_error("fq: inverse of a non-unit");
    uint32_t li = inv_mod(r0[0], p);
    Poly res(s0.size());
    for (size_t i = 0; i < s0.size(); ++i) res[i] = s0[i] * li % p;
    trim(res);
    return res;
}

uint64_t ipow_u64(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= b;
    return r;
}

std::vector<uint64_t> prime_factors(uint64_t n) {
    std::vector<uint64_t> fs;
    for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d == 0) {
            fs.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

struct Tables {
    uint32_t p;
    std::map<uint32_t, Poly> conway;
    std::map<std::pair<uint32_t, uint32_t>, std::vector<Poly>> embed;  // (d,m) -> powers of image of g_d
    std::map<uint32_t, std::unordered_map<uint64_t, uint64_t>> logs;
    // small-field lookup: codes of g^0..g^{p^m-2} and code -> dlog
    std::map<uint32_t, std::vector<uint64_t>> exp_codes;
    std::map<uint32_t, std::unordered_map<uint64_t, uint64_t>> log_codes;
    std::recursive_mutex mu;

    static constexpr uint64_t kTableLimit = 1u << 20;

    const Poly& conway_poly(uint32_t m);
    const std::vector<Poly>& embed_pows(uint32_t d, uint32_t m);
    // build (or fetch) the exp/log tables; returns nullptr for large fields
    const std::vector<uint64_t>* exp_table(uint32_t m);
    uint64_t code_log(uint32_t m, uint64_t code);  // dlog of a nonzero code
};

Tables& tables_for(uint32_t p) {
    thread_local uint32_t last_p = 0;
    thread_local Tables* last_t = nullptr;
    if (last_p == p && last_t) return *last_t;
    static std::mutex mu;
    static std::map<uint32_t, Tables*> all;
    std::lock_guard<std::mutex> lk(mu);
    auto it = all.find(p);
    if (it == all.end()) {
        auto* t = new Tables;
        t->p = p;
        it = all.emplace(p, t).first;
    }
    last_p = p;
    last_t = it->second;
    return *last_t;
}

bool is_irreducible(const Poly& f, uint32_t p, uint32_t m) {
    Poly xp = pmod({0, 1}, f, p);
    std::vector<Poly> frob(m + 1);
    frob[0] = xp;
    for (uint32_t i = 1; i <= m; ++i) frob[i] = ppowmod(frob[i - 1], p, f, p);
    if (psub(frob[m], xp, p) != Poly{}) return false;
    for (uint64_t q : prime_factors(m)) {
        if (psub(frob[m / q], xp, p) == Poly{}) return false;
    }
    return true;
}

bool is_primitive_root_poly(const Poly& f, uint32_t p, uint32_t m) {
    if (f[0] == 0) return false;
    uint64_t n = ipow_u64(p, m) - 1;
    for (uint64_t q : prime_factors(n)) {
        Poly r = ppowmod({0, 1}, n / q, f, p);
        if (r.size() == 1 && r[0] == 1) return false;
    }
    return true;
}

const Poly& Tables::conway_poly(uint32_t m) {
    std::lock_guard<std::recursive_mutex> lk(mu);
    auto it = conway.find(m);
    if (it != conway.end()) return it->second;
    if (m > 40) throw std::domain_error("fq: field degree too large");
    std::vector<uint32_t> divs;
    for (uint32_t d = 1; d < m; ++d)
        if (m % d == 0) divs.push_back(d);
    for (uint32_t d : divs) conway_poly(d);

    uint64_t pm1 = ipow_u64(p, m) - 1;
    uint64_t count = ipow_u64(p, m);
    for (uint64_t code = 0; code < count; ++code) {
        Poly f(m + 1, 0);
        f[m] = 1;
        uint64_t c = code;
        for (uint32_t i = 0; i < m; ++i) {
            f[i] = (uint32_t)(c % p);
            c /= p;
        }
        if (m == 1) {
            // x + c0 with -c0 a generator of F_p^x
            if (f[0] == 0 && p > 2) continue;
        }
        if (f[0] == 0) continue;
        if (!is_irreducible(f, p, m)) continue;
        if (!is_primitive_root_poly(f, p, m)) continue;
        bool ok = true;
        for (uint32_t d : divs) {
            uint64_t s = pm1 / (ipow_u64(p, d) - 1);
            Poly xs = ppowmod({0, 1}, s, f, p);
            const Poly& cd = conway.at(d);
            Poly acc = {cd.back()};
            for (int i = (int)cd.size() - 2; i >= 0; --i) {
                acc = pmulmod(acc, xs, f, p);
                if (cd[i]) acc = padd(acc, Poly{cd[i]}, p);
            }
            if (!acc.empty()) {
                ok = false;
                break;
            }
        }
        if (ok) {
            auto r = conway.emplace(m, std::move(f));
            return r.first->second;
        }
    }
    throw std::logic_error("fq: no canonical polynomial found");
}

// thread-local snapshot of the small-field tables: immutable once built
struct SmallField {
    const std::vector<uint64_t>* exp = nullptr;
    const std::unordered_map<uint64_t, uint64_t>* log = nullptr;
    uint64_t n = 0;
};

const SmallField* small_field(Tables& T, uint32_t m);

const std::vector<uint64_t>* Tables::exp_table(uint32_t m) {
    std::lock_guard<std::recursive_mutex> lk(mu);
    auto it = exp_codes.find(m);
    if (it != exp_codes.end()) return &it->second;
    uint64_t n = ipow_u64(p, m);
    if (n > kTableLimit) return nullptr;
    const Poly& f = conway_poly(m);
    Poly g = {0, 1};
    if (m == 1) g = Poly{(uint32_t)((p - f[0]) % p)};
    std::vector<uint64_t> tab;
    std::unordered_map<uint64_t, uint64_t> logs2;
    tab.reserve(n - 1);
    Poly acc = {1};
    for (uint64_t i = 0; i + 1 < n; ++i) {
        uint64_t code = 0;
        for (size_t j = acc.size(); j-- > 0;) code = code * p + acc[j];
        tab.push_back(code);
        logs2.emplace(code, i);
        acc = pmulmod(acc, g, f, p);
    }
    auto r = exp_codes.emplace(m, std::move(tab));
    log_codes.emplace(m, std::move(logs2));
    return &r.first->second;
}

uint64_t Tables::code_log(uint32_t m, uint64_t code) {
    std::lock_guard<std::recursive_mutex> lk(mu);
    return log_codes.at(m).at(code);
}

const SmallField* small_field(Tables& T, uint32_t m) {
    thread_local std::map<std::pair<uint32_t, uint32_t>, SmallField> cache;
    auto key = std::make_pair(T.p, m);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.exp ? &it->second : nullptr;
    SmallField sf;
    const auto* e = T.exp_table(m);
    if (e) {
        std::lock_guard<std::recursive_mutex> lk(T.mu);
        sf.exp = e;
        sf.log = &T.log_codes.at(m);
        sf.n = ipow_u64(T.p, m) - 1;
    }
    auto r = cache.emplace(key, sf);
    return r.first->second.exp ? &r.first->second : nullptr;
}

const std::vector<Poly>& Tables::embed_pows(uint32_t d, uint32_t m) {
    std::lock_guard<std::recursive_mutex> lk(mu);
    auto key = std::make_pair(d, m);
    auto it = embed.find(key);
    if (it != embed.end()) return it->second;
    conway_poly(d);
    const Poly& fm = conway_poly(m);
    uint64_t s = (ipow_u64(p, m) - 1) / (ipow_u64(p, d) - 1);
    Poly g1 = {0, 1};
    if (m == 1) g1 = Poly{(uint32_t)((p - conway_poly(1)[0]) % p)};
    Poly im = ppowmod(g1, s, fm, p);
    if (d == 1) {
        // image of g_1 must be the canonical generator of F_p inside F_{p^m};
        // powers of it are scalars
        std::vector<Poly> pows(1);
        pows[0] = {1};
        auto r = embed.emplace(key, std::move(pows));
        return r.first->second;
    }
    std::vector<Poly> pows(d);
    pows[0] = {1};
    for (uint32_t i = 1; i < d; ++i) pows[i] = pmulmod(pows[i - 1], im, fm, p);
    auto r = embed.emplace(key, std::move(pows));
    return r.first->second;
}

// NOTE on the F_p -> F_{p^m} embedding: coordinates over F_p embed as scalars,
// so lift/descend for d = 1 act on the constant coefficient only.
Poly lift_into(const Poly& a, uint32_t d, uint32_t m, Tables& T) {
    if (d == m || a.empty()) return a;
    if (d == 1) return a;  // scalar embeds as scalar
    const auto& pows = T.embed_pows(d, m);
    Poly r;
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        Poly t = pows[i];
        for (auto& c : t) c = c * a[i] % T.p;
        r = padd(r, t, T.p);
    }
    return r;
}

std::optional<Poly> descend(const Poly& v, uint32_t d, uint32_t m, Tables& T) {
    if (d == 1) {
        // scalars
        for (size_t i = 1; i < v.size(); ++i)
            if (v[i]) return std::nullopt;
        return Poly(v.begin(), v.begin() + std::min<size_t>(1, v.size()));
    }
    const auto& pows = T.embed_pows(d, m);
    uint32_t p = T.p;
    std::vector<std::vector<uint32_t>> A(m, std::vector<uint32_t>(d + 1, 0));
    for (uint32_t j = 0; j < d; ++j)
        for (size_t i = 0; i < pows[j].size(); ++i) A[i][j] = pows[j][i];
    for (size_t i = 0; i < v.size(); ++i) A[i][d] = v[i];
    uint32_t row = 0;
    std::vector<int> pivot_col(m, -1);
    for (uint32_t col = 0; col < d && row < m; ++col) {
        uint32_t sel = row;
        while (sel < m && A[sel][col] == 0) ++sel;
        if (sel == m) continue;
        std::swap(A[sel], A[row]);
        uint32_t iv = inv_mod(A[row][col], p);
        for (auto& x : A[row]) x = x * iv % p;
        for (uint32_t r2 = 0; r2 < m; ++r2) {
            if (r2 == row || A[r2][col] == 0) continue;
            uint32_t c = A[r2][col];
            for (uint32_t k = col; k <= d; ++k) A[r2][k] = (A[r2][k] + (p - c) * A[row][k]) % p;
        }
        pivot_col[row] = (int)col;
        ++row;
    }
    for (uint32_t r2 = row; r2 < m; ++r2)
        if (A[r2][d] != 0) return std::nullopt;
    Poly res(d, 0);
    for (uint32_t r2 = 0; r2 < row; ++r2) res[pivot_col[r2]] = A[r2][d];
    trim(res);
    return res;
}

}  // namespace

void Fq::normalize() {
    Poly v(c_.begin(), c_.end());
    trim(v);
    if (v.empty()) {
        m_ = 1;
        c_.assign(1, (uint8_t)0);
        return;
    }
    if (m_ == 1) {
        c_.assign(1, (uint8_t)v[0]);
        return;
    }
    Tables& T = tables_for(p_);
    if (const SmallField* sf = small_field(T, m_)) {
        uint64_t code = 0;
        for (size_t j = v.size(); j-- > 0;) code = code * p_ + v[j];
        uint64_t n = sf->n;
        uint64_t dl = sf->log->at(code);
        for (uint32_t d = 1; d < m_; ++d) {
            if (m_ % d) continue;
            uint64_t nd = ipow_u64(p_, d) - 1;
            uint64_t s = n / nd;
            if (dl % s) continue;
            const auto* tabd = small_field(T, d)->exp;
            uint64_t cd = (*tabd)[dl / s];
            m_ = d;
            c_.clear();
            for (uint32_t i = 0; i < d; ++i) {
                c_.push_back((uint8_t)(cd % p_));
                cd /= p_;
            }
            return;
        }
        (void)sf;
        c_.assign(m_, 0);
        for (size_t i = 0; i < v.size(); ++i) c_[i] = (uint8_t)v[i];
        return;
    }
    for (uint32_t d = 1; d < m_; ++d) {
        if (m_ % d) continue;
        auto r = descend(v, d, m_, T);
        if (r) {
            m_ = d;
            c_.assign(m_, 0);
            for (size_t i = 0; i < r->size(); ++i) c_[i] = (uint8_t)(*r)[i];
            return;
        }
    }
    c_.assign(m_, 0);
    for (size_t i = 0; i < v.size(); ++i) c_[i] = (uint8_t)v[i];
}

Fq Fq::zero(uint32_t p) {
    Fq x;
    x.p_ = p;
    x.m_ = 1;
    x.c_ = {0};
    return x;
}

Fq Fq::one(uint32_t p) { return from_int(p, 1); }

Fq Fq::from_int(uint32_t p, long long n) {
    Fq x;
    x.p_ = p;
    x.m_ = 1;
    long long r = n % (long long)p;
    if (r < 0) r += p;
    x.c_ = {(uint8_t)r};
    return x;
}

Fq Fq::generator(uint32_t p, uint32_t m) {
    Tables& T = tables_for(p);
    const Poly& f = T.conway_poly(m);
    Fq x;
    x.p_ = p;
    x.m_ = m;
    x.c_.assign(m, 0);
    if (m == 1)
        x.c_[0] = (uint8_t)((p - f[0]) % p);
    else
        x.c_[1] = 1;
    x.normalize();
    return x;
}

Fq Fq::gen_pow(uint32_t p, uint32_t m, uint64_t k) {
    uint64_t n = ipow_u64(p, m) - 1;
    return generator(p, m).pow((long long)(k % n));
}

Fq Fq::from_coeffs(uint32_t p, uint32_t m, CoeffVec c) {
    tables_for(p).conway_poly(m);
    Fq x;
    x.p_ = p;
    x.m_ = m;
    c.resize(m, 0);
    x.c_ = std::move(c);
    x.normalize();
    return x;
}

bool Fq::is_zero() const {
    for (auto c : c_)
        if (c) return false;
    return true;
}

bool Fq::is_one() const { return m_ == 1 && c_[0] == 1; }

Fq Fq::operator-() const {
    Fq r = *this;
    for (auto& c : r.c_) c = (uint8_t)((p_ - c) % p_);
    r.normalize();
    return r;
}

static Fq binop(const Fq& a, const Fq& b, int kind) {
    assert(a.p() == b.p() && a.p() != 0);
    uint32_t p = a.p();
    if (a.deg() == 1 && b.deg() == 1) {
        // prime-field fast path
        uint32_t av = a.coeffs()[0], bv = b.coeffs()[0], r = 0;
        switch (kind) {
            case 0: r = (av + bv) % p; break;
            case 1: r = (av + p - bv) % p; break;
            case 2: r = av * bv % p; break;
            case 3: r = av * inv_mod(bv, p) % p; break;
        }
        return Fq::from_int(p, (long long)r);
    }
    Tables& T = tables_for(p);
    uint32_t m = std::lcm(a.deg(), b.deg());
    Poly va(a.coeffs().begin(), a.coeffs().end()), vb(b.coeffs().begin(), b.coeffs().end());
    trim(va);
    trim(vb);
    va = lift_into(va, a.deg(), m, T);
    vb = lift_into(vb, b.deg(), m, T);
    Poly r;
    if (kind <= 1) {
        r = kind == 0 ? padd(va, vb, p) : psub(va, vb, p);
    } else {
        const Poly& f = T.conway_poly(m);
        r = kind == 2 ? pmulmod(va, vb, f, p) : pmulmod(va, pinvmod(vb, f, p), f, p);
    }
    Fq::CoeffVec cc(r.begin(), r.end());
    return Fq::from_coeffs(p, m, std::move(cc));
}

Fq operator+(const Fq& a, const Fq& b) { return binop(a, b, 0); }
Fq operator-(const Fq& a, const Fq& b) { return binop(a, b, 1); }
Fq operator*(const Fq& a, const Fq& b) {
    if (a.is_zero() || b.is_zero()) return Fq::zero(a.p());
    return binop(a, b, 2);
}
Fq operator/(const Fq& a, const Fq& b) {
    if (b.is_zero()) throw std::domain_error("fq: division by zero");
    if (a.is_zero()) return a;
    return binop(a, b, 3);
}

Fq Fq::pow(long long e) const {
    if (is_zero()) {
        if (e < 0) throw std::domain_error("fq: 0^negative");
        return e == 0 ? one(p_) : *this;
    }
    uint64_t n = ipow_u64(p_, m_) - 1;
    long long r = e % (long long)n;
    if (r < 0) r += (long long)n;
    Tables& T = tables_for(p_);
    if (const SmallField* sf = small_field(T, m_)) {
        uint64_t dl = sf->log->at(code());
        uint64_t cr = (*sf->exp)[(uint64_t)((unsigned __int128)dl * (uint64_t)r % n)];
        CoeffVec cc;
        for (uint32_t i = 0; i < m_; ++i) {
            cc.push_back((uint8_t)(cr % p_));
            cr /= p_;
        }
        return from_coeffs(p_, m_, std::move(cc));
    }
    const Poly& f = T.conway_poly(m_);
    Poly v(c_.begin(), c_.end());
    trim(v);
    Poly res = ppowmod(v, (uint64_t)r, f, p_);
    CoeffVec cc(res.begin(), res.end());
    return from_coeffs(p_, m_, std::move(cc));
}

Fq Fq::inv() const {
    if (is_zero()) throw std::domain_error("fq: inverse of zero");
    return pow(-1);
}

Fq Fq::frob(long long k) const {
    if (is_zero() || m_ == 1) {
        // prime-field elements are Frobenius-fixed
        return *this;
    }
    long long r = k % (long long)m_;
    if (r < 0) r += m_;
    if (r == 0) return *this;
    Tables& T = tables_for(p_);
    if (const SmallField* sf = small_field(T, m_)) {
        const auto* tab = sf->exp;
        uint64_t n = sf->n;
        uint64_t dl = sf->log->at(code());
        uint64_t pk = 1;
        for (long long i = 0; i < r; ++i) pk = pk * p_ % n;
        uint64_t cr = (*tab)[(uint64_t)((unsigned __int128)dl * pk % n)];
        CoeffVec cc;
        for (uint32_t i = 0; i < m_; ++i) {
            cc.push_back((uint8_t)(cr % p_));
            cr /= p_;
        }
        Fq x;
        x.p_ = p_;
        x.m_ = m_;
        x.c_ = std::move(cc);
        return x;  // frobenius preserves the minimal field
    }
    Fq x = *this;
    for (long long i = 0; i < r; ++i) x = x.pow((long long)p_);
    return x;
}

Fq Fq::qth_root(uint32_t q) const {
    Fq x = *this;
    while (q > 1) {
        assert(q % p_ == 0);
        x = x.frob(-1);
        q /= p_;
    }
    return x;
}

Fq Fq::qth_power(uint32_t q) const {
    Fq x = *this;
    while (q > 1) {
        assert(q % p_ == 0);
        x = x.frob(1);
        q /= p_;
    }
    return x;
}

uint64_t Fq::code() const {
    uint64_t c = 0;
    for (size_t i = c_.size(); i-- > 0;) c = c * p_ + c_[i];
    return c;
}

uint64_t Fq::dlog() const {
    if (is_zero()) throw std::domain_error("fq: dlog of zero");
    Tables& T = tables_for(p_);
    uint64_t n = ipow_u64(p_, m_) - 1;
    if (n == 1) return 0;
    {
        std::lock_guard<std::recursive_mutex> lk(T.mu);
        auto it = T.logs.find(m_);
        if (it != T.logs.end()) {
            auto jt = it->second.find(code());
            if (jt != it->second.end()) return jt->second;
        }
    }
    if (n <= (1u << 20)) {
        std::unordered_map<uint64_t, uint64_t> table;
        Fq g = generator(p_, m_);
        Fq acc = one(p_);
        for (uint64_t k = 0; k < n; ++k) {
            Poly v(acc.coeffs().begin(), acc.coeffs().end());
            trim(v);
            v = lift_into(v, acc.deg(), m_, T);
            uint64_t cd = 0;
            v.resize(m_, 0);
            for (size_t i = v.size(); i-- > 0;) cd = cd * p_ + v[i];
            table.emplace(cd, k);
            acc = acc * g;
        }
        uint64_t mine;
        {
            Poly v(c_.begin(), c_.end());
            trim(v);
            v.resize(m_, 0);
            mine = 0;
            for (size_t i = v.size(); i-- > 0;) mine = mine * p_ + v[i];
        }
        std::lock_guard<std::recursive_mutex> lk(T.mu);
        auto& slot = T.logs[m_];
        if (slot.empty()) slot = std::move(table);
        return slot.at(mine);
    }
    // baby-step giant-step on larger fields
    uint64_t s = 1;
    while (s * s < n) ++s;
    Fq g = generator(p_, m_);
    std::unordered_map<uint64_t, uint64_t> baby;
    Fq acc = one(p_);
    for (uint64_t j = 0; j < s; ++j) {
        baby.emplace(acc.code() ^ ((uint64_t)acc.deg() << 48), j);
        acc = acc * g;
    }
    Fq giant = g.pow((long long)s).inv();
    Fq cur = *this;
    for (uint64_t i = 0; i <= s; ++i) {
        auto it = baby.find(cur.code() ^ ((uint64_t)cur.deg() << 48));
        if (it != baby.end()) return (i * s + it->second) % n;
        cur = cur * giant;
    }
    throw std::logic_error("fq: dlog failed");
}

bool Fq::operator<(const Fq& o) const {
    if (m_ != o.m_) return m_ < o.m_;
    return code() < o.code();
}

std::string Fq::str() const {
    if (is_zero()) return "0";
    if (is_one()) return "1";
    return "g" + std::to_string(m_) + "^" + std::to_string(dlog());
}

std::optional<Fq> Fq::parse(uint32_t p, std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s[0] == 'g') {
        size_t caret = s.find('^');
        if (caret == std::string_view::npos) return std::nullopt;
        try {
            uint32_t m = (uint32_t)std::stoul(std::string(s.substr(1, caret - 1)));
            uint64_t k = std::stoull(std::string(s.substr(caret + 1)));
            return gen_pow(p, m, k);
        } catch (...) {
            return std::nullopt;
        }
    }
    try {
        size_t pos = 0;
        long long v = std::stoll(std::string(s), &pos);
        if (pos != s.size()) return std::nullopt;
        return from_int(p, v);
    } catch (...) {
        return std::nullopt;
    }
}

std::vector<uint8_t> canonical_poly(uint32_t p, uint32_t m) {
    const Poly& f = tables_for(p).conway_poly(m);
    return std::vector<uint8_t>(f.begin(), f.end());
}

std::vector<Fq> nth_roots_fq(const Fq& x, uint64_t n) {
    assert(n >= 1);
    uint32_t p = x.p();
    if (x.is_zero()) return {Fq::zero(p)};
    Fq y = x;
    while (n % p == 0) {
        y = y.frob(-1);
        n /= p;
    }
    if (n == 1) return {y};
    uint32_t m = y.deg();
    for (uint32_t k = 1; k <= 64; ++k) {
        uint32_t M = m * k;
        uint64_t N = 1;
        bool overflow = false;
        for (uint32_t i = 0; i < M; ++i) {
            if (N > ((uint64_t)1 << 52)) {
                overflow = true;
                break;
            }
            N *= p;
        }
        if (overflow) break;
        uint64_t order = N - 1;
        uint64_t g = std::gcd(n, order);
        uint64_t sub = ipow_u64(p, m) - 1;
        uint64_t e = (y.dlog() % sub) * (order / sub);
        if (e % g != 0) continue;
        uint64_t n1 = (n / g) % (order / g), o1 = order / g, e1 = (e / g) % o1;
        long long t0 = 0, t1 = 1;
        long long r0 = (long long)o1, r1 = (long long)(n1 % o1);
        while (r1) {
            long long qq = r0 / r1;
            std::swap(t0 -= qq * t1, t1);
            std::swap(r0 -= qq * r1, r1);
        }
        uint64_t ninv = (uint64_t)((t0 % (long long)o1 + (long long)o1) % (long long)o1);
        uint64_t tbase = (uint64_t)((unsigned __int128)e1 * ninv % o1);
        std::vector<Fq> roots;
        for (uint64_t j = 0; j < g; ++j) {
            uint64_t t = (tbase + j * o1) % order;
            roots.push_back(Fq::gen_pow(p, M, t));
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }
    throw std::domain_error("fq: n-th root requires too large an extension");
}

Fq nth_root_canonical_fq(const Fq& x, uint64_t n) {
    auto roots = nth_roots_fq(x, n);
    uint32_t M = 1;
    for (auto& r : roots) M = std::lcm(M, r.deg());
    uint64_t best = UINT64_MAX;
    Fq bestr = roots[0];
    uint64_t order = ipow_u64(x.p(), M) - 1;
    for (auto& r : roots) {
        if (r.is_zero()) return r;
        uint64_t sub = ipow_u64(x.p(), r.deg()) - 1;
        uint64_t d = (r.dlog() % sub) * (order / sub);
        if (d < best) {
            best = d;
            bestr = r;
        }
    }
    return bestr;
}

namespace {

using FqPoly = std::vector<Fq>;

void ftrim(FqPoly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}

FqPoly fmul(const FqPoly& a, const FqPoly& b, uint32_t p) {
    if (a.empty() || b.empty()) return {};
    FqPoly r(a.size() + b.size() - 1, Fq::zero(p));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    }
    ftrim(r);
    return r;
}

FqPoly fmod(FqPoly a, const FqPoly& f) {
    ftrim(a);
    int df = (int)f.size() - 1;
    Fq lcinv = f.back().inv();
    while ((int)a.size() - 1 >= df) {
        Fq c = a.back() * lcinv;
        int sh = (int)a.size() - 1 - df;
        for (int i = 0; i <= df; ++i) a[i + sh] = a[i + sh] - c * f[i];
        ftrim(a);
    }
    return a;
}

// quotient of exact division (asserts divisibility when `exact`)
FqPoly fdiv(FqPoly num, const FqPoly& den, uint32_t p, bool exact) {
    ftrim(num);
    FqPoly q;
    if (num.size() < den.size()) return q;
    q.assign(num.size() - den.size() + 1, Fq::zero(p));
    Fq lcinv = den.back().inv();
    while (num.size() >= den.size() && !num.empty()) {
        Fq c = num.back() * lcinv;
        int sh = (int)num.size() - (int)den.size();
        q[sh] = c;
        for (size_t i = 0; i < den.size(); ++i) num[i + sh] = num[i + sh] - c * den[i];
        ftrim(num);
    }
    if (exact) assert(num.empty());
    return q;
}

FqPoly fgcd(FqPoly a, FqPoly b) {
    ftrim(a);
    ftrim(b);
    while (!b.empty()) {
        FqPoly r = fmod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Fq lcinv = a.back().inv();
        for (auto& c : a) c = c * lcinv;
    }
    return a;
}

FqPoly fderiv(const FqPoly& f, uint32_t p) {
    FqPoly r;
    for (size_t i = 1; i < f.size(); ++i) r.push_back(f[i] * Fq::from_int(p, (long long)i));
    ftrim(r);
    return r;
}

Fq feval(const FqPoly& f, const Fq& x, uint32_t p) {
    Fq acc = Fq::zero(p);
    for (size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
    return acc;
}

// extract all roots of h over F_{p^M}, where h is known to split into distinct
// linear factors over that field
void split_linear(FqPoly h, uint32_t p, uint32_t M, std::vector<Fq>& roots) {
    uint64_t N = ipow_u64(p, M);
    std::vector<FqPoly> stack = {std::move(h)};
    while (!stack.empty()) {
        FqPoly f = std::move(stack.back());
        stack.pop_back();
        ftrim(f);
        if (f.size() <= 1) continue;
        if (f.size() == 2) {
            roots.push_back(-(f[0] / f[1]));
            continue;
        }
        bool split = false;
        for (uint64_t attempt = 0; attempt < 8 * N + 64 && !split; ++attempt) {
            Fq c = attempt == 0 ? Fq::zero(p) : Fq::gen_pow(p, M, (attempt - 1) % (N - 1));
            FqPoly shift = {c, Fq::one(p)};
            FqPoly cand;
            if (p != 2) {
                FqPoly base = fmod(shift, f);
                FqPoly r = {Fq::one(p)};
                uint64_t e = (N - 1) / 2;
                while (e) {
                    if (e & 1) r = fmod(fmul(r, base, p), f);
                    base = fmod(fmul(base, base, p), f);
                    e >>= 1;
                }
                if (r.empty()) r = {Fq::zero(p)};
                r[0] = r[0] - Fq::one(p);
                ftrim(r);
                cand = fgcd(f, r);
            } else {
                // char 2: split by the trace of c*x (additive shifts do not
                // separate roots with equal trace)
                Fq cc = attempt == 0 ? Fq::one(p) : c;
                FqPoly base = fmod({Fq::zero(p), cc}, f);
                FqPoly acc = base, sq2 = base;
                for (uint32_t i = 1; i < M; ++i) {
                    sq2 = fmod(fmul(sq2, sq2, p), f);
                    if (acc.size() < sq2.size()) acc.resize(sq2.size(), Fq::zero(p));
                    for (size_t j = 0; j < sq2.size(); ++j) acc[j] = acc[j] + sq2[j];
                    ftrim(acc);
                }
                cand = fgcd(f, acc);
            }
            if (cand.size() > 1 && cand.size() < f.size()) {
                FqPoly q = fdiv(f, cand, p, true);
                stack.push_back(std::move(cand));
                stack.push_back(std::move(q));
                split = true;
            }
        }
        if (!split) throw std::logic_error("fq: equal-degree splitting failed");
    }
}

}  // namespace

std::vector<std::pair<Fq, int>> poly_roots_fq(uint32_t p, const std::vector<Fq>& coeffs) {
    FqPoly f = coeffs;
    ftrim(f);
    std::vector<std::pair<Fq, int>> out;
    if (f.size() <= 1) return out;

    int zmult = 0;
    while (!f.empty() && f[0].is_zero()) {
        f.erase(f.begin());
        ++zmult;
    }
    if (zmult) out.push_back({Fq::zero(p), zmult});
    if (f.size() <= 1) return out;

    // strip p-th power structure so the remaining polynomial has a nonzero
    // derivative; multiplicities get multiplied back at the end
    FqPoly base = f;
    int ppow = 1;
    while (base.size() > 1 && fderiv(base, p).empty()) {
        FqPoly g((base.size() - 1) / p + 1, Fq::zero(p));
        for (size_t i = 0; i < base.size(); ++i) {
            if (base[i].is_zero()) continue;
            g[i / p] = base[i].frob(-1);
        }
        base = std::move(g);
        ppow *= p;
    }

    FqPoly sq = base;
    {
        FqPoly d = fderiv(sq, p);
        FqPoly g = fgcd(sq, d);
        if (g.size() > 1) sq = fdiv(sq, g, p, true);
    }

    uint32_t m0 = 1;
    for (auto& c : sq) m0 = std::lcm(m0, c.deg());
    std::vector<Fq> roots;
    FqPoly rem = sq;
    for (uint32_t k = 1; rem.size() > 1 && k <= 24; ++k) {
        uint32_t M = m0 * k;
        uint64_t N = 1;
        bool overflow = false;
        for (uint32_t i = 0; i < M; ++i) {
            if (N > ((uint64_t)1 << 40)) {
                overflow = true;
                break;
            }
            N *= p;
        }
        if (overflow) break;
        // gcd(rem, x^{p^M} - x)
        FqPoly xq;
        {
            FqPoly r = {Fq::zero(p), Fq::one(p)};
            r = fmod(r, rem);
            FqPoly acc = r;
            // compute x^{p^M} mod rem by repeated p-th powering
            for (uint32_t i = 0; i < M; ++i) {
                FqPoly nxt = {Fq::one(p)};
                // acc^p mod rem
                FqPoly cur = acc;
                nxt = cur;
                for (uint32_t j = 1; j < p; ++j) nxt = fmod(fmul(nxt, cur, p), rem);
                // also apply frobenius to coefficients? no: x^{p} as polynomial power
                acc = std::move(nxt);
            }
            xq = acc;
        }
        FqPoly diff = xq;
        if (diff.size() < 2) diff.resize(2, Fq::zero(p));
        diff[1] = diff[1] - Fq::one(p);
        ftrim(diff);
        FqPoly g = fgcd(rem, diff);
        if (g.size() <= 1) continue;
        std::vector<Fq> newroots;
        split_linear(g, p, M, newroots);
        for (auto& r : newroots) {
            FqPoly lin = {-r, Fq::one(p)};
            rem = fdiv(rem, lin, p, true);
        }
        roots.insert(roots.end(), newroots.begin(), newroots.end());
    }

    for (auto& r : roots) {
        int mult = 0;
        FqPoly cur = base;
        while (cur.size() >= 2 && feval(cur, r, p).is_zero()) {
            FqPoly lin = {-r, Fq::one(p)};
            cur = fdiv(cur, lin, p, true);
            ++mult;
        }
        out.push_back({r, mult * ppow});
    }
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace tmot
