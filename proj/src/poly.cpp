#include "tmot/poly.hpp"

#include <sstream>

namespace tmot {

void TPoly::trim() {
    while (!c_.empty() && c_.back().is_exact_zero()) c_.pop_back();
}

TPoly TPoly::constant(const FieldCtx& k, Px v) {
    TPoly r(k);
    r.c_.push_back(std::move(v));
    r.trim();
    return r;
}

TPoly TPoly::t(const FieldCtx& k) {
    TPoly r(k);
    r.c_ = {Px::zero(k), Px::from_int(k, 1)};
    return r;
}

TPoly TPoly::t_minus_theta(const FieldCtx& k) {
    TPoly r(k);
    r.c_ = {-Px::theta(k), Px::from_int(k, 1)};
    return r;
}

TPoly TPoly::from_fq(const FieldCtx& k, const std::vector<Fq>& c) {
    TPoly r(k);
    for (auto& x : c) r.c_.push_back(Px::from_fq(k, x));
    r.trim();
    return r;
}

Px TPoly::coeff(int i) const {
    if (i < 0 || i >= (int)c_.size()) return Px::zero(k_);
    return c_[i];
}

TPoly TPoly::operator-() const {
    TPoly r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

TPoly operator+(const TPoly& a, const TPoly& b) {
    const FieldCtx& k = a.k_.p ? a.k_ : b.k_;
    TPoly r(k);
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

TPoly operator-(const TPoly& a, const TPoly& b) { return a + (-b); }

TPoly operator*(const TPoly& a, const TPoly& b) {
    const FieldCtx& k = a.k_.p ? a.k_ : b.k_;
    TPoly r(k);
    if (a.is_zero() || b.is_zero()) return r;
    r.c_.assign(a.c_.size() + b.c_.size() - 1, Px::zero(k));
    for (size_t i = 0; i < a.c_.size(); ++i)
        for (size_t j = 0; j < b.c_.size(); ++j) r.c_[i + j] = r.c_[i + j] + a.c_[i] * b.c_[j];
    r.trim();
    return r;
}

TPoly TPoly::scaled(const Px& c) const {
    TPoly r = *this;
    for (auto& x : r.c_) x = x * c;
    r.trim();
    return r;
}

TPoly TPoly::shifted(int k) const {
    TPoly r = *this;
    if (r.is_zero()) return r;
    r.c_.insert(r.c_.begin(), (size_t)k, Px::zero(k_));
    return r;
}

TPoly TPoly::frob_sigma() const {
    TPoly r = *this;
    for (auto& x : r.c_) x = x.frob_sigma();
    return r;
}

TPoly TPoly::frob_sigma_check() const {
    TPoly r = *this;
    for (auto& x : r.c_) x = x.frob_sigma_check();
    return r;
}

Px TPoly::eval(const Px& x) const {
    Px acc = Px::zero(k_);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

std::vector<Px> TPoly::taylor_at_theta(int order) const { return taylor_at(Px::theta(k_), order); }

std::vector<Px> TPoly::taylor_at(const Px& point, int order) const {
    // repeated synthetic division by (t - point)
    std::vector<Px> cur = c_;
    std::vector<Px> out;
    const Px& th = point;
    for (int j = 0; j < order; ++j) {
        if (cur.empty()) {
            out.push_back(Px::zero(k_));
            continue;
        }
        Px rem = Px::zero(k_);
        for (size_t i = cur.size(); i-- > 0;) {
            rem = rem * th + cur[i];
        }
        // quotient coefficients
        std::vector<Px> quo(cur.size() > 0 ? cur.size() - 1 : 0, Px::zero(k_));
        Px acc = Px::zero(k_);
        for (size_t i = cur.size(); i-- > 1;) {
            acc = acc * th + cur[i];
            quo[i - 1] = acc;
        }
        out.push_back(rem);
        cur = std::move(quo);
    }
    return out;
}

int TPoly::order_at_theta(int max_order) const {
    auto jets = taylor_at_theta(max_order);
    for (int i = 0; i < (int)jets.size(); ++i)
        if (jets[i].has_terms()) return i;
    return max_order;
}

std::string TPoly::str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_exact_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << c_[i].str() << ")";
        if (i == 1)
            os << "*t";
        else if (i > 1)
            os << "*t^" << i;
    }
    if (first) os << "0";
    return os.str();
}

std::pair<TPoly, TPoly> tpoly_divmod(const TPoly& a, const TPoly& b) {
    if (b.is_zero() || !b.coeffs().back().has_terms()) throw PxError("tpoly division by zero-leading polynomial");
    const FieldCtx& k = a.ctx().p ? a.ctx() : b.ctx();
    std::vector<Px> rem = a.coeffs();
    int db = b.deg();
    std::vector<Px> quo;
    if ((int)rem.size() - 1 >= db) quo.assign(rem.size() - db, Px::zero(k));
    while ((int)rem.size() - 1 >= db) {
        if (rem.back().is_known_zero()) {
            rem.pop_back();
            continue;
        }
        Px c = rem.back().div(b.coeffs().back());
        int sh = (int)rem.size() - 1 - db;
        quo[sh] = quo[sh] + c;
        for (int i = 0; i <= db; ++i) rem[i + sh] = rem[i + sh] - c * b.coeffs()[i];
        rem.pop_back();
    }
    return {TPoly(k, std::move(quo)), TPoly(k, std::move(rem))};
}

PxMat px_identity(const FieldCtx& k, size_t n) {
    PxMat m(n, n, Px::zero(k));
    for (size_t i = 0; i < n; ++i) m.at(i, i) = Px::from_int(k, 1);
    return m;
}

TPolyMat tp_identity(const FieldCtx& k, size_t n) {
    TPolyMat m(n, n, TPoly::zero(k));
    for (size_t i = 0; i < n; ++i) m.at(i, i) = TPoly::constant(k, Px::from_int(k, 1));
    return m;
}

TPolyMat tp_from_px(const PxMat& m) {
    return m.map([](const Px& x) { return TPoly::constant(x.ctx(), x); });
}

TPoly tp_det(const TPolyMat& m) {
    // expansion by minors; fine at desk-scale ranks
    size_t n = m.rows;
    if (n == 0) return TPoly();
    const FieldCtx& k = m.a[0].ctx();
    if (n == 1) return m.at(0, 0);
    TPoly acc = TPoly::zero(k);
    for (size_t j = 0; j < n; ++j) {
        TPolyMat sub(n - 1, n - 1, TPoly::zero(k));
        for (size_t i = 1; i < n; ++i) {
            size_t cc = 0;
            for (size_t jj = 0; jj < n; ++jj) {
                if (jj == j) continue;
                sub.at(i - 1, cc++) = m.at(i, jj);
            }
        }
        TPoly term = m.at(0, j) * tp_det(sub);
        if (j % 2)
            acc = acc - term;
        else
            acc = acc + term;
    }
    return acc;
}

PxMat px_mat_mul(const PxMat& A, const PxMat& B) {
    const FieldCtx& k = A.a.empty() ? B.a[0].ctx() : A.a[0].ctx();
    return mat_mul(A, B, Px::zero(k));
}

PxMat px_solve(const PxMat& A, const PxMat& b, const Work& w) {
    const FieldCtx& k = A.a[0].ctx();
    size_t n = A.rows;
    PxMat M(n, A.cols + b.cols, Px::zero(k));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < A.cols; ++j) M.at(i, j) = A.at(i, j);
        for (size_t j = 0; j < b.cols; ++j) M.at(i, A.cols + j) = b.at(i, j);
    }
    size_t row = 0;
    std::vector<long long> piv;
    for (size_t col = 0; col < A.cols && row < n; ++col) {
        // pivot: minimal valuation among definitely nonzero entries
        size_t sel = n;
        Rat best(0);
        for (size_t i = row; i < n; ++i) {
            if (!M.at(i, col).has_terms()) continue;
            Rat v = *M.at(i, col).val();
            if (sel == n || v < best) {
                sel = i;
                best = v;
            }
        }
        if (sel == n) continue;
        for (size_t j = 0; j < M.cols; ++j) std::swap(M.at(sel, j), M.at(row, j));
        Px pivot = M.at(row, col);
        for (size_t i = 0; i < n; ++i) {
            if (i == row || !M.at(i, col).has_terms()) continue;
            Px f = M.at(i, col).div(pivot, Prec(w.zeta_prec));
            for (size_t j = col; j < M.cols; ++j) M.at(i, j) = M.at(i, j) - f * M.at(row, j);
        }
        piv.push_back((long long)col);
        ++row;
    }
    if (row < A.cols) throw PxError("px_solve: singular system at working precision");
    PxMat x(A.cols, b.cols, Px::zero(k));
    for (size_t r2 = 0; r2 < row; ++r2) {
        size_t col = (size_t)piv[r2];
        for (size_t j = 0; j < b.cols; ++j) x.at(col, j) = M.at(r2, A.cols + j).div(M.at(r2, col), Prec(w.zeta_prec));
    }
    return x;
}

PxMat px_inverse(const PxMat& A, const Work& w) { return px_solve(A, px_identity(A.a[0].ctx(), A.rows), w); }

}  // namespace tmot
