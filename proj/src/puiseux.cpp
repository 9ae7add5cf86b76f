#include "tmot/puiseux.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <sstream>

namespace tmot {

void Px::normalize() {
    std::sort(t_.begin(), t_.end(), [](const Term& a, const Term& b) { return a.e < b.e; });
    std::vector<Term> out;
    out.reserve(t_.size());
    for (auto& tm : t_) {
        if (s_ && tm.e >= *s_) continue;
        if (!out.empty() && out.back().e == tm.e) {
            out.back().c = out.back().c + tm.c;
            if (out.back().c.is_zero()) out.pop_back();
        } else if (!tm.c.is_zero()) {
            out.push_back(tm);
        }
    }
    t_ = std::move(out);
}

Px Px::zero(const FieldCtx& k) {
    Px x;
    x.k_ = k;
    return x;
}

Px Px::zero_mod(const FieldCtx& k, Rat s) {
    Px x;
    x.k_ = k;
    x.s_ = s;
    return x;
}

Px Px::from_fq(const FieldCtx& k, Fq c) { return monomial(k, std::move(c), Rat(0)); }

Px Px::from_int(const FieldCtx& k, long long n) { return from_fq(k, Fq::from_int(k.p, n)); }

Px Px::monomial(const FieldCtx& k, Fq c, Rat e) {
    Px x;
    x.k_ = k;
    if (!c.is_zero()) x.t_.push_back({std::move(e), std::move(c)});
    return x;
}

std::optional<Rat> Px::val() const {
    if (t_.empty()) return std::nullopt;
    return t_.front().e;
}

Rat Px::val_lower_bound() const {
    if (!t_.empty()) return t_.front().e;
    if (s_) return *s_;
    throw PxError("valuation of the exact zero");
}

Fq Px::leading_coeff() const {
    if (t_.empty()) throw PxError("leading coefficient of a zero element");
    return t_.front().c;
}

long long Px::ramification() const {
    long long e = 1;
    for (auto& tm : t_) e = std::lcm(e, tm.e.denominator());
    if (s_) e = std::lcm(e, s_->denominator());
    return e;
}

Px Px::truncated(Rat s) const {
    Px r = *this;
    r.s_ = min_prec(r.s_, Prec(s));
    r.normalize();
    return r;
}

Px Px::with_prec(Prec s) const {
    Px r = *this;
    r.s_ = min_prec(r.s_, s);
    r.normalize();
    return r;
}

Px Px::shift(const Rat& e) const {
    Px r = *this;
    for (auto& tm : r.t_) tm.e += e;
    if (r.s_) *r.s_ += e;
    return r;
}

Px Px::scaled(const Fq& c) const {
    if (c.is_zero()) {
        Px r = zero(k_);
        r.s_ = s_;  // scaling by an exact 0 of the field keeps it exact; keep precision conservative
        return is_exact() ? zero(k_) : r;
    }
    Px r = *this;
    for (auto& tm : r.t_) tm.c = tm.c * c;
    return r;
}

Fq Px::coeff_at(const Rat& e) const {
    for (auto& tm : t_) {
        if (tm.e == e) return tm.c;
        if (tm.e > e) break;
    }
    return Fq::zero(k_.p);
}

Px Px::operator-() const {
    Px r = *this;
    for (auto& tm : r.t_) tm.c = -tm.c;
    return r;
}

Px operator+(const Px& a, const Px& b) {
    Px r;
    r.k_ = a.k_.p ? a.k_ : b.k_;
    r.s_ = min_prec(a.s_, b.s_);
    r.t_ = a.t_;
    r.t_.insert(r.t_.end(), b.t_.begin(), b.t_.end());
    r.normalize();
    return r;
}

Px operator-(const Px& a, const Px& b) { return a + (-b); }

Px operator*(const Px& a, const Px& b) {
    Px r;
    r.k_ = a.k_.p ? a.k_ : b.k_;
    // precision: min(s_a + v(b), s_b + v(a)), using the precision itself as a
    // lower bound for the valuation of a known zero
    Prec s;
    if (a.s_) {
        if (b.is_exact_zero()) return Px::zero(r.k_);
        s = min_prec(s, Prec(*a.s_ + b.val_lower_bound()));
    }
    if (b.s_) {
        if (a.is_exact_zero()) return Px::zero(r.k_);
        s = min_prec(s, Prec(*b.s_ + a.val_lower_bound()));
    }
    r.s_ = s;
    if (!a.t_.empty() && !b.t_.empty()) {
        std::vector<Px::Term> acc;
        acc.reserve(a.t_.size() * b.t_.size());
        for (auto& ta : a.t_) {
            for (auto& tb : b.t_) {
                Rat e = ta.e + tb.e;
                if (s && e >= *s) continue;
                acc.push_back({e, ta.c * tb.c});
            }
        }
        std::sort(acc.begin(), acc.end(), [](const Px::Term& x, const Px::Term& y) { return x.e < y.e; });
        for (auto& tm : acc) {
            if (!r.t_.empty() && r.t_.back().e == tm.e) {
                r.t_.back().c = r.t_.back().c + tm.c;
                if (r.t_.back().c.is_zero()) r.t_.pop_back();
            } else if (!tm.c.is_zero()) {
                r.t_.push_back(tm);
            }
        }
    }
    return r;
}

Px Px::frob_sigma() const {
    Px r = *this;
    for (auto& tm : r.t_) {
        tm.e *= (long long)k_.q;
        tm.c = tm.c.qth_power(k_.q);
    }
    if (r.s_) *r.s_ *= (long long)k_.q;
    return r;
}

Px Px::frob_sigma_check() const {
    Px r = *this;
    for (auto& tm : r.t_) {
        tm.e /= (long long)k_.q;
        tm.c = tm.c.qth_root(k_.q);
    }
    if (r.s_) *r.s_ /= (long long)k_.q;
    return r;
}

Px Px::frob_pow(long long k) const {
    Px r = *this;
    for (; k > 0; --k) r = r.frob_sigma();
    for (; k < 0; ++k) r = r.frob_sigma_check();
    return r;
}

Px Px::inv(Prec at_least) const {
    if (t_.empty()) throw DivisionByPrecisionZero();
    if (t_.size() == 1 && is_exact()) {
        Px r = monomial(k_, t_.front().c.inv(), -t_.front().e);
        if (at_least) r = r.with_prec(at_least);
        return r;
    }
    Rat v = t_.front().e;
    Fq c = t_.front().c;
    // x = c zeta^v (1 + w), v(w) > 0
    Px lead = monomial(k_, c, v);
    Px w = *this;
    w.t_.erase(w.t_.begin());
    w = w.shift(-v).scaled(c.inv());  // now v(w) > 0, known mod s_ - v
    // relative target precision
    Prec rel;
    if (s_) rel = min_prec(rel, Prec(*s_ - v));
    if (at_least) rel = min_prec(rel, Prec(*at_least + v));
    if (!rel) throw PxError("inverse of an exact element needs a target precision");
    // geometric series sum (-w)^k, truncated at relative order rel
    Px sum = from_int(k_, 1).with_prec(rel);
    Px term = from_int(k_, 1);
    if (!w.t_.empty()) {
        Rat vw = w.t_.front().e;
        Px mw = (-w).truncated(*rel);
        for (Rat acc = vw; acc < *rel; acc += vw) {
            term = (term * mw).truncated(*rel);
            if (term.t_.empty()) break;
            sum = sum + term;
        }
    } else {
        sum = sum.with_prec(min_prec(rel, w.s_));
    }
    return sum.shift(-v).scaled(c.inv());
}

Px Px::div(const Px& y, Prec at_least) const {
    if (y.t_.empty()) throw DivisionByPrecisionZero();
    if (y.t_.size() == 1) {
        // dividing by a monomial is exact
        Px r = shift(-y.t_.front().e).scaled(y.t_.front().c.inv());
        if (y.s_) {
            // the divisor tail below its precision still perturbs the quotient
            Rat rel = *y.s_ - y.t_.front().e;
            Prec cap;
            if (!is_exact_zero()) cap = Prec(val_lower_bound() - y.t_.front().e + rel);
            r = r.with_prec(min_prec(cap, r.prec()));
        }
        return r;
    }
    Prec inv_target;
    if (at_least && !is_exact_zero()) inv_target = Prec(*at_least - val_lower_bound());
    return *this * y.inv(inv_target);
}

Px operator/(const Px& a, const Px& b) { return a.div(b); }

Px Px::pow(long long n, Prec at_least) const {
    if (n == 0) return from_int(k_, 1);
    Px base = n < 0 ? inv(at_least) : *this;
    unsigned long long e = n < 0 ? (unsigned long long)(-n) : (unsigned long long)n;
    Px r = base;
    --e;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

Px Px::nth_root(uint64_t n, Prec at_least) const {
    assert(n >= 1);
    if (t_.empty()) {
        if (is_exact()) return *this;
        throw PrecisionExhausted("n-th root of an element with no known term");
    }
    Rat v = t_.front().e;
    if (v.numerator() % (long long)n != 0) {
        // enlarge ramification: exponent v/n
    }
    Fq c = t_.front().c;
    Px w = *this;
    w.t_.erase(w.t_.begin());
    w = w.shift(-v).scaled(c.inv());  // x = c zeta^v (1+w)
    // split n = n0 * p^k
    uint64_t n0 = n, pk = 1;
    while (n0 % k_.p == 0) {
        n0 /= k_.p;
        pk *= k_.p;
    }
    // exact p-power part: (1+w)^{1/p^k} = 1 + w^{1/p^k} in characteristic p
    Px onew = from_int(k_, 1) + w;
    if (pk > 1) {
        Px r = onew;
        std::vector<Term> nt;
        for (auto& tm : r.t_) nt.push_back({tm.e / (long long)pk, tm.c.qth_root((uint32_t)pk)});
        r.t_ = std::move(nt);
        if (r.s_) *r.s_ /= (long long)pk;
        r.normalize();
        onew = r;
    }
    Px u = onew;  // now need u^{1/n0}
    if (n0 > 1) {
        Prec rel;
        if (u.s_) rel = u.s_;
        if (at_least) rel = min_prec(rel, Prec(*at_least - v / (long long)n));
        if (!rel) throw PxError("n-th root of an exact element needs a target precision");
        // Hensel iteration on f(y) = y^{n0} - u starting from y = 1
        Px y = from_int(k_, 1);
        Fq n0f = Fq::from_int(k_.p, (long long)n0);
        for (int it = 0; it < 64; ++it) {
            Px fy = y.pow((long long)n0) - u;
            fy = fy.truncated(*rel);
            if (fy.t_.empty()) break;
            Px fpy = y.pow((long long)n0 - 1).scaled(n0f);
            Px corr = fy.div(fpy, rel);
            y = (y - corr).truncated(*rel);
        }
        u = y.with_prec(rel);
    } else if (at_least) {
        u = u.with_prec(Prec(*at_least - v / (long long)n));
    }
    Fq croot = nth_root_canonical_fq(c, n);
    return u.shift(v / (long long)n).scaled(croot);
}

bool Px::identical(const Px& o) const {
    if (t_.size() != o.t_.size() || s_ != o.s_) return false;
    for (size_t i = 0; i < t_.size(); ++i)
        if (t_[i].e != o.t_[i].e || !(t_[i].c == o.t_[i].c)) return false;
    return true;
}

bool agree_at_precision(const Px& x, const Px& y) { return (x - y).is_known_zero(); }

std::string Px::str() const {
    std::ostringstream os;
    bool first = true;
    for (auto& tm : t_) {
        if (!first) os << " + ";
        first = false;
        os << tm.c.str();
        if (tm.e != Rat(0)) os << "*zeta^(" << to_string(tm.e) << ")";
    }
    if (s_) {
        if (!first) os << " + ";
        os << "O(zeta^(" << to_string(*s_) << "))";
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

std::optional<Px> Px::parse(const FieldCtx& k, std::string_view s) {
    Px r = zero(k);
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < s.size() && isspace((unsigned char)s[i])) ++i;
    };
    auto parse_rat = [&]() -> std::optional<Rat> {
        skip_ws();
        size_t j = i;
        if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
        size_t num_start = j;
        while (j < s.size() && isdigit((unsigned char)s[j])) ++j;
        if (j == num_start) return std::nullopt;
        long long num = std::stoll(std::string(s.substr(i, j - i)));
        i = j;
        long long den = 1;
        if (i < s.size() && s[i] == '/') {
            ++i;
            size_t d0 = i;
            while (i < s.size() && isdigit((unsigned char)s[i])) ++i;
            if (i == d0) return std::nullopt;
            den = std::stoll(std::string(s.substr(d0, i - d0)));
        }
        return Rat(num, den);
    };
    bool any = false;
    while (true) {
        skip_ws();
        if (i >= s.size()) break;
        if (any) {
            if (s[i] != '+') return std::nullopt;
            ++i;
            skip_ws();
        }
        if (s.substr(i, 2) == "O(") {
            i += 2;
            skip_ws();
            if (s.substr(i, 5) == "zeta^") {
                i += 5;
            } else
                return std::nullopt;
            bool paren = i < s.size() && s[i] == '(';
            if (paren) ++i;
            auto e = parse_rat();
            if (!e) return std::nullopt;
            if (paren) {
                skip_ws();
                if (i >= s.size() || s[i] != ')') return std::nullopt;
                ++i;
            }
            skip_ws();
            if (i >= s.size() || s[i] != ')') return std::nullopt;
            ++i;
            r.s_ = min_prec(r.s_, Prec(*e));
            any = true;
            continue;
        }
        // coefficient: "0", "1", "g<m>^<k>", or integer
        size_t j = i;
        while (j < s.size() && (isalnum((unsigned char)s[j]) || s[j] == '^' || s[j] == '-')) {
            if (s.substr(j, 4) == "zeta") break;
            ++j;
        }
        auto c = Fq::parse(k.p, s.substr(i, j - i));
        if (!c) return std::nullopt;
        i = j;
        skip_ws();
        Rat e(0);
        if (i < s.size() && s[i] == '*') {
            ++i;
            skip_ws();
            if (s.substr(i, 5) != "zeta^") return std::nullopt;
            i += 5;
            bool paren = i < s.size() && s[i] == '(';
            if (paren) ++i;
            auto ee = parse_rat();
            if (!ee) return std::nullopt;
            e = *ee;
            if (paren) {
                skip_ws();
                if (i >= s.size() || s[i] != ')') return std::nullopt;
                ++i;
            }
        }
        r.t_.push_back({e, *c});
        any = true;
    }
    r.normalize();
    return r;
}

}  // namespace tmot
