#include "tmot/skew.hpp"

#include <sstream>

namespace tmot {

void SkewPoly::trim() {
    while (!c_.empty() && c_.back().is_exact_zero()) c_.pop_back();
}

SkewPoly SkewPoly::constant(const FieldCtx& k, Side s, Px c) {
    SkewPoly r(k, s);
    r.c_.push_back(std::move(c));
    r.trim();
    return r;
}

SkewPoly SkewPoly::variable(const FieldCtx& k, Side s) {
    SkewPoly r(k, s);
    r.c_ = {Px::zero(k), Px::from_int(k, 1)};
    return r;
}

Px SkewPoly::coeff(int i) const {
    if (i < 0 || i >= (int)c_.size()) return Px::zero(k_);
    return c_[i];
}

SkewPoly SkewPoly::operator-() const {
    SkewPoly r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

SkewPoly operator+(const SkewPoly& a, const SkewPoly& b) {
    if (!a.c_.empty() && !b.c_.empty() && a.side_ != b.side_) throw ShapeMismatch();
    const FieldCtx& k = a.k_.p ? a.k_ : b.k_;
    SkewPoly r(k, a.k_.p ? a.side_ : b.side_);
    r.c_.resize(std::max(a.c_.size(), b.c_.size()), Px::zero(k));
    for (size_t i = 0; i < r.c_.size(); ++i) {
        Px s = Px::zero(k);
        if (i < a.c_.size()) s = s + a.c_[i];
        if (i < b.c_.size()) s = s + b.c_[i];
        r.c_[i] = s;
    }
    r.trim();
    return r;
}

SkewPoly operator-(const SkewPoly& a, const SkewPoly& b) { return a + (-b); }

SkewPoly operator*(const SkewPoly& a, const SkewPoly& b) {
    if (!a.c_.empty() && !b.c_.empty() && a.side_ != b.side_) throw ShapeMismatch();
    const FieldCtx& k = a.k_.p ? a.k_ : b.k_;
    Side side = a.k_.p ? a.side_ : b.side_;
    SkewPoly r(k, side);
    if (a.is_zero() || b.is_zero()) return r;
    long long dir = side == Side::tau ? 1 : -1;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, Px::zero(k));
    for (size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i].is_exact_zero()) continue;
        for (size_t j = 0; j < b.c_.size(); ++j) {
            if (b.c_[j].is_exact_zero()) continue;
            r.c_[i + j] = r.c_[i + j] + a.c_[i] * b.c_[j].frob_pow(dir * (long long)i);
        }
    }
    r.trim();
    return r;
}

SkewPoly SkewPoly::scaled(const Px& c) const {
    SkewPoly r = *this;
    for (auto& x : r.c_) x = c * x;
    r.trim();
    return r;
}

Px SkewPoly::apply(const Px& x) const {
    Px acc = Px::zero(k_);
    long long dir = side_ == Side::tau ? 1 : -1;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_exact_zero()) continue;
        acc = acc + c_[i] * x.frob_pow(dir * (long long)i);
    }
    return acc;
}

std::string SkewPoly::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    const char* var = side_ == Side::tau ? "tau" : "taucheck";
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_exact_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << c_[i].str() << ")";
        if (i == 1)
            os << "*" << var;
        else if (i > 1)
            os << "*" << var << "^" << i;
    }
    if (first) os << "0";
    return os.str();
}

SkewMat skew_identity(const FieldCtx& k, Side s, size_t n) {
    SkewMat m(n, n, SkewPoly::zero(k, s));
    for (size_t i = 0; i < n; ++i) m.at(i, i) = SkewPoly::constant(k, s, Px::from_int(k, 1));
    return m;
}

SkewMat skew_mul(const SkewMat& a, const SkewMat& b) {
    if (a.cols != b.rows) throw ShapeMismatch();
    const auto& ex = a.a[0];
    return mat_mul(a, b, SkewPoly::zero(ex.ctx(), ex.side()));
}

SkewMat skew_add(const SkewMat& a, const SkewMat& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw ShapeMismatch();
    return mat_add(a, b);
}

SkewMat skew_scaled(const SkewMat& a, const Px& c) {
    return a.map([&](const SkewPoly& f) { return f.scaled(c); });
}

PxMat skew_apply(const SkewMat& a, const PxMat& x) {
    const FieldCtx& k = a.a[0].ctx();
    PxMat r(a.rows, x.cols, Px::zero(k));
    for (size_t i = 0; i < a.rows; ++i)
        for (size_t j = 0; j < x.cols; ++j) {
            Px acc = Px::zero(k);
            for (size_t l = 0; l < a.cols; ++l) acc = acc + a.at(i, l).apply(x.at(l, j));
            r.at(i, j) = acc;
        }
    return r;
}

SkewMat dagger(const SkewMat& B) {
    const FieldCtx& k = B.a[0].ctx();
    if (B.a[0].side() != Side::tau) throw ShapeMismatch();
    int dmax = 0;
    for (auto& f : B.a) dmax = std::max(dmax, f.deg());
    SkewMat r(B.cols, B.rows, SkewPoly::zero(k, Side::taucheck));
    for (size_t i = 0; i < B.rows; ++i)
        for (size_t j = 0; j < B.cols; ++j) {
            std::vector<Px> c;
            for (int d = 0; d <= B.at(i, j).deg(); ++d) c.push_back(B.at(i, j).coeff(d).frob_pow(-d));
            r.at(j, i) = SkewPoly(k, Side::taucheck, std::move(c));
        }
    return r;
}

SkewMat dagger_inverse(const SkewMat& C) {
    const FieldCtx& k = C.a[0].ctx();
    if (C.a[0].side() != Side::taucheck) throw ShapeMismatch();
    SkewMat r(C.cols, C.rows, SkewPoly::zero(k, Side::tau));
    for (size_t i = 0; i < C.rows; ++i)
        for (size_t j = 0; j < C.cols; ++j) {
            std::vector<Px> c;
            for (int d = 0; d <= C.at(i, j).deg(); ++d) c.push_back(C.at(i, j).coeff(d).frob_pow(d));
            r.at(j, i) = SkewPoly(k, Side::tau, std::move(c));
        }
    return r;
}

SkewPoly skew_series_inverse(const SkewPoly& f, int N, Prec div_prec) {
    const FieldCtx& k = f.ctx();
    if (f.is_zero() || !f.coeff(0).has_terms()) throw NonUnitConstantTerm();
    long long dir = f.side() == Side::tau ? 1 : -1;
    Px b0inv = Px::from_int(k, 1).div(f.coeff(0), div_prec);
    std::vector<Px> g = {b0inv};
    for (int i = 1; i <= N; ++i) {
        // sum_j f_j sigma^{dir j}(g_{i-j}) = 0
        Px acc = Px::zero(k);
        for (int j = 1; j <= std::min(i, f.deg()); ++j) acc = acc + f.coeff(j) * g[i - j].frob_pow(dir * j);
        g.push_back(-(b0inv * acc));
    }
    return SkewPoly(k, f.side(), std::move(g));
}

SkewMat skew_mat_series_inverse(const SkewMat& F, int N, const Work& w) {
    const FieldCtx& k = F.a[0].ctx();
    Side side = F.a[0].side();
    long long dir = side == Side::tau ? 1 : -1;
    size_t n = F.rows;
    // constant-term inverse over the Puiseux field
    PxMat F0(n, n, Px::zero(k));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) F0.at(i, j) = F.at(i, j).coeff(0);
    PxMat B0 = px_inverse(F0, w);
    std::vector<PxMat> G = {B0};
    for (int i = 1; i <= N; ++i) {
        PxMat acc(n, n, Px::zero(k));
        for (int j = 1; j <= i; ++j) {
            PxMat Fj(n, n, Px::zero(k));
            bool nonzero = false;
            for (size_t r = 0; r < n; ++r)
                for (size_t c = 0; c < n; ++c) {
                    Fj.at(r, c) = F.at(r, c).coeff(j);
                    nonzero = nonzero || !Fj.at(r, c).is_exact_zero();
                }
            if (!nonzero) continue;
            PxMat Gs = G[i - j].map([&](const Px& x) { return x.frob_pow(dir * j); });
            acc = mat_add(acc, px_mat_mul(Fj, Gs));
        }
        PxMat Gi = px_mat_mul(B0, acc);
        for (auto& x : Gi.a) x = -x;
        G.push_back(std::move(Gi));
    }
    SkewMat out(n, n, SkewPoly::zero(k, side));
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) {
            std::vector<Px> coeffs;
            for (int i = 0; i <= N; ++i) coeffs.push_back(G[i].at(r, c));
            out.at(r, c) = SkewPoly(k, side, std::move(coeffs));
        }
    return out;
}

}  // namespace tmot
