#pragma once

#include "tmot/poly.hpp"

namespace tmot {

// Twisted polynomials: side tau has the rule tau b = b^q tau, side taucheck
// has taucheck b = b^{1/q} taucheck.
enum class Side { tau, taucheck };

class SkewPoly {
  public:
    SkewPoly() = default;
    SkewPoly(FieldCtx k, Side s) : k_(k), side_(s) {}
    SkewPoly(FieldCtx k, Side s, std::vector<Px> c) : k_(k), side_(s), c_(std::move(c)) { trim(); }

    static SkewPoly zero(const FieldCtx& k, Side s) { return SkewPoly(k, s); }
    static SkewPoly constant(const FieldCtx& k, Side s, Px c);
    static SkewPoly variable(const FieldCtx& k, Side s);  // tau (or taucheck)

    const FieldCtx& ctx() const { return k_; }
    Side side() const { return side_; }
    int deg() const { return (int)c_.size() - 1; }
    bool is_zero() const { return c_.empty(); }
    Px coeff(int i) const;
    const std::vector<Px>& coeffs() const { return c_; }

    SkewPoly operator-() const;
    friend SkewPoly operator+(const SkewPoly&, const SkewPoly&);
    friend SkewPoly operator-(const SkewPoly&, const SkewPoly&);
    friend SkewPoly operator*(const SkewPoly&, const SkewPoly&);  // twisted convolution
    SkewPoly scaled(const Px& c) const;                           // left multiplication by a constant

    // the induced additive map: sum b_i x^{q^i} (tau) or sum b_i x^{q^-i}
    Px apply(const Px& x) const;

    std::string str() const;

  private:
    FieldCtx k_;
    Side side_ = Side::tau;
    std::vector<Px> c_;
    void trim();
};

using SkewMat = Mat<SkewPoly>;

struct ShapeMismatch : PxError {
    ShapeMismatch() : PxError("skew matrix shape/side mismatch") {}
};
struct NonUnitConstantTerm : PxError {
    NonUnitConstantTerm() : PxError("skew series inverse needs an invertible constant term") {}
};

SkewMat skew_identity(const FieldCtx& k, Side s, size_t n);
SkewMat skew_mul(const SkewMat& a, const SkewMat& b);
SkewMat skew_add(const SkewMat& a, const SkewMat& b);
SkewMat skew_scaled(const SkewMat& a, const Px& c);

// apply a matrix of tau-polynomials to a point vector
PxMat skew_apply(const SkewMat& a, const PxMat& x);

// the dagger anti-isomorphism: sum B_i tau^i -> (sum sigma-check^i(B_i) taucheck^i)^T
SkewMat dagger(const SkewMat& B);
// and its inverse
SkewMat dagger_inverse(const SkewMat& C);

// truncated inverse in the twisted power series ring: f g = g f = 1 mod the
// variable^{N+1}; requires an invertible constant term
SkewPoly skew_series_inverse(const SkewPoly& f, int N, Prec div_prec);
SkewMat skew_mat_series_inverse(const SkewMat& F, int N, const Work& w);

}  // namespace tmot
