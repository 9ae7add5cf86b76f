#pragma once

#include "tmot/poly.hpp"

namespace tmot {

// Truncated Laurent series over the Puiseux field in a local uniformizer:
// u = t - theta at the distinguished place, or z = 1/t at infinity.
enum class LVar { u, z };

class LS {
  public:
    LS() = default;
    LS(FieldCtx k, LVar v, long long N) : k_(k), v_(v), N_(N) {}

    static LS zero(const FieldCtx& k, LVar v, long long N) { return LS(k, v, N); }
    static LS constant(const FieldCtx& k, LVar v, long long N, const Px& c);
    static LS uniformizer_pow(const FieldCtx& k, LVar v, long long N, long long e);
    // expansion of a polynomial in t: at u this is the Taylor expansion at
    // theta, at z the substitution t = 1/z (an exact Laurent polynomial)
    static LS from_tpoly(const TPoly& f, LVar v, long long N);

    const FieldCtx& ctx() const { return k_; }
    LVar var() const { return v_; }
    long long trunc() const { return N_; }  // known modulo var^N
    Px coeff(long long e) const;
    std::optional<long long> ord() const;  // first definitely nonzero exponent
    bool is_known_zero() const;

    LS operator-() const;
    friend LS operator+(const LS&, const LS&);
    friend LS operator-(const LS&, const LS&);
    friend LS operator*(const LS&, const LS&);
    LS shifted(long long e) const;  // * var^e
    LS truncated(long long N) const;
    LS inv(const Work& w) const;  // requires a definitely nonzero leading term
    LS div(const LS& o, const Work& w) const { return *this * o.inv(w); }
    Px eval_at_zero() const;  // constant coefficient

    std::string str(const std::string& var_name) const;

    void set_coeff(long long e, const Px& c);

    // apply a map to every stored coefficient (grid-preserving)
    template <class F>
    LS map_coeffs(F f) const {
        LS r = *this;
        for (auto& c : r.c_) c = f(c);
        r.normalize();
        return r;
    }

  private:
    FieldCtx k_;
    LVar v_ = LVar::u;
    long long lo_ = 0;
    std::vector<Px> c_;  // exponents lo_ .. lo_+size-1, all < N_
    long long N_ = 0;
    void normalize();
};

using LSMat = Mat<LS>;

LSMat ls_identity(const FieldCtx& k, LVar v, long long N, size_t n);
LSMat ls_mat_mul(const LSMat& A, const LSMat& B);

struct SmithResult {
    std::vector<long long> exps;  // elementary divisor exponents, ascending
    LSMat U, V;                   // U * M * V = diag(var^exps)
    LSMat Uinv, Vinv;
    bool certified = true;  // all exponents strictly below the truncation order
    bool exact_zeros = true;  // no known-zero-at-finite-precision entry was treated as zero
};

struct SmithError : PxError {
    using PxError::PxError;
};

// Smith normal form over the truncated discrete valuation ring; pivots on the
// entry of minimal order, row-major tie break.
SmithResult smith_form(const LSMat& M, const Work& w);

// A full-rank square basis matrix for the column span (as a module over the
// power series ring) of a not-necessarily-square matrix of full row rank.
LSMat lattice_basis_from_generators(const LSMat& G, const Work& w);

// Solve A X = B over the Laurent-series fraction field (A square, invertible).
LSMat ls_solve(const LSMat& A, const LSMat& B, const Work& w);

// For two lattices with bases G1, G2 spanning the same space over the fraction
// field: dim(L1 / r) - dim(L2 / r) for any common sublattice r; equals the
// negative exponent sum of G2^{-1} G1.
long long lattice_relative_degree(const LSMat& G1, const LSMat& G2, const Work& w);

}  // namespace tmot
