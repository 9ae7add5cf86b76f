#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tmot/puiseux.hpp"

namespace tmot {

// Working precisions, fixed per run: coefficients are computed modulo
// O(zeta^zeta_prec), t-series modulo t^{t_order+1}, local series modulo
// u^{u_order} (u the uniformizer at the distinguished place).
struct Work {
    Rat zeta_prec = Rat(48);
    int t_order = 32;
    int u_order = 10;
};

// Polynomial in t over the Puiseux coefficient field; exact coefficient list.
class TPoly {
  public:
    TPoly() = default;
    explicit TPoly(FieldCtx k) : k_(k) {}
    TPoly(FieldCtx k, std::vector<Px> c) : k_(k), c_(std::move(c)) { trim(); }

    static TPoly zero(const FieldCtx& k) { return TPoly(k); }
    static TPoly constant(const FieldCtx& k, Px v);
    static TPoly t(const FieldCtx& k);                  // the variable
    static TPoly t_minus_theta(const FieldCtx& k);      // t - theta
    static TPoly from_fq(const FieldCtx& k, const std::vector<Fq>& c);  // A = F_q[t] element

    const FieldCtx& ctx() const { return k_; }
    const std::vector<Px>& coeffs() const { return c_; }
    int deg() const { return (int)c_.size() - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    Px coeff(int i) const;

    TPoly operator-() const;
    friend TPoly operator+(const TPoly&, const TPoly&);
    friend TPoly operator-(const TPoly&, const TPoly&);
    friend TPoly operator*(const TPoly&, const TPoly&);
    TPoly scaled(const Px& c) const;
    TPoly shifted(int k) const;  // * t^k
    TPoly frob_sigma() const;    // coefficientwise sigma
    TPoly frob_sigma_check() const;

    Px eval(const Px& x) const;
    // Taylor coefficients at a point: poly = sum c[i] (t-point)^i
    std::vector<Px> taylor_at(const Px& point, int order) const;
    // Taylor coefficients at theta: returns c with poly = sum c[i] (t-theta)^i
    std::vector<Px> taylor_at_theta(int order) const;
    // order of vanishing at theta, scanning jets up to `max_order`
    int order_at_theta(int max_order) const;

    std::string str() const;

  private:
    FieldCtx k_;
    std::vector<Px> c_;
    void trim();
};

// quotient and remainder by a monic-leading polynomial (leading coeff must be
// definitely nonzero); division is exact on stored data
std::pair<TPoly, TPoly> tpoly_divmod(const TPoly& a, const TPoly& b);

// Minimal dense matrix over an arbitrary component type.
template <class T>
struct Mat {
    size_t rows = 0, cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(size_t r, size_t c, const T& fill) : rows(r), cols(c), a(r * c, fill) {}
    T& at(size_t i, size_t j) { return a[i * cols + j]; }
    const T& at(size_t i, size_t j) const { return a[i * cols + j]; }

    template <class F>
    auto map(F f) const {
        Mat<decltype(f(a[0]))> r;
        r.rows = rows;
        r.cols = cols;
        r.a.reserve(a.size());
        for (auto& x : a) r.a.push_back(f(x));
        return r;
    }

    Mat<T> transposed() const {
        Mat<T> r;
        r.rows = cols;
        r.cols = rows;
        r.a.reserve(a.size());
        for (size_t j = 0; j < cols; ++j)
            for (size_t i = 0; i < rows; ++i) r.a.push_back(at(i, j));
        return r;
    }
};

template <class T>
Mat<T> mat_mul(const Mat<T>& A, const Mat<T>& B, const T& zero) {
    Mat<T> r(A.rows, B.cols, zero);
    for (size_t i = 0; i < A.rows; ++i)
        for (size_t k = 0; k < A.cols; ++k)
            for (size_t j = 0; j < B.cols; ++j) r.at(i, j) = r.at(i, j) + A.at(i, k) * B.at(k, j);
    return r;
}

template <class T>
Mat<T> mat_add(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> r = A;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = r.a[i] + B.a[i];
    return r;
}

template <class T>
Mat<T> mat_sub(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> r = A;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = r.a[i] - B.a[i];
    return r;
}

template <class T>
Mat<T> mat_kron(const Mat<T>& A, const Mat<T>& B) {
    Mat<T> r;
    r.rows = A.rows * B.rows;
    r.cols = A.cols * B.cols;
    r.a.reserve(r.rows * r.cols);
    for (size_t i = 0; i < r.rows; ++i)
        for (size_t j = 0; j < r.cols; ++j) r.a.push_back(A.at(i / B.rows, j / B.cols) * B.at(i % B.rows, j % B.cols));
    return r;
}

using PxMat = Mat<Px>;
using TPolyMat = Mat<TPoly>;

PxMat px_identity(const FieldCtx& k, size_t n);
TPolyMat tp_identity(const FieldCtx& k, size_t n);
TPolyMat tp_from_px(const PxMat& m);
TPoly tp_det(const TPolyMat& m);

// Gaussian elimination over the Puiseux field (pivot = entry of minimal
// valuation, row-major tie break).  Solves A x = b; divisions are given the
// target precision from `w`.
PxMat px_solve(const PxMat& A, const PxMat& b, const Work& w);
PxMat px_inverse(const PxMat& A, const Work& w);
PxMat px_mat_mul(const PxMat& A, const PxMat& B);

}  // namespace tmot
