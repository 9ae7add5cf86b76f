#pragma once

#include "tmot/local.hpp"

namespace tmot {

// Truncated power series in t over the Puiseux field, the working substitute
// for the entire/Tate algebras: coefficients a_0..a_N, element known modulo
// t^{N+1}.
class TS {
  public:
    TS() = default;
    TS(FieldCtx k, int N) : k_(k), N_(N) {}
    TS(FieldCtx k, int N, std::vector<Px> a) : k_(k), N_(N), a_(std::move(a)) { fit(); }

    static TS zero(const FieldCtx& k, int N) { return TS(k, N); }
    static TS constant(const FieldCtx& k, int N, const Px& c);
    static TS from_tpoly(const TPoly& f, int N);

    const FieldCtx& ctx() const { return k_; }
    int order() const { return N_; }
    Px coeff(int n) const;
    void set_coeff(int n, const Px& c);
    bool is_known_zero() const;

    TS operator-() const;
    friend TS operator+(const TS&, const TS&);
    friend TS operator-(const TS&, const TS&);
    friend TS operator*(const TS&, const TS&);
    TS scaled(const Px& c) const;
    TS mul_tpoly(const TPoly& f) const;
    TS truncated(int N) const;
    TS frob_sigma() const;        // coefficientwise q-power
    TS frob_sigma_check() const;  // coefficientwise q-th root

    // convergence witness for membership in the s-Tate algebra: the infimum of
    // v(a_n) - s*n over stored coefficients, together with whether the
    // sequence is increasing towards the tail (a desk-scale certificate)
    struct ConvWitness {
        Rat bound = Rat(0);
        bool tail_increasing = false;
    };
    ConvWitness conv_witness(const Rat& s) const;

    // evaluation at a point with |x| governed by v(x) = vx; tail certified by
    // the witness bound for the given s (requires vx + s > 0 ... recorded in
    // the returned precision)
    Px eval(const Px& x, const Rat& s_witness) const;

    // expansion at t = theta as a local series modulo u^{u_order}; the tail
    // n > N is certified by the convergence witness at s (needs s > 1)
    LS taylor_at_theta(int u_order, const Rat& s_witness, const Work& w) const;

    std::string str(int max_terms = 8) const;

  private:
    FieldCtx k_;
    int N_ = 0;
    std::vector<Px> a_;
    void fit();
};

using TSMat = Mat<TS>;

TSMat ts_identity(const FieldCtx& k, int N, size_t n);
TSMat ts_mat_mul(const TSMat& A, const TSMat& B);
TSMat ts_from_tpoly_mat(const TPolyMat& M, int N);
TSMat ts_sigma(const TSMat& M);
TSMat ts_sigma_check(const TSMat& M);
bool ts_mat_known_zero(const TSMat& M);
// matrix inverse of a series matrix whose constant term is invertible
TSMat ts_mat_inverse(const TSMat& M, const Work& w);
// expansion of a whole matrix at t = theta
LSMat ts_mat_taylor_at_theta(const TSMat& M, int u_order, const Rat& s_witness, const Work& w);

}  // namespace tmot
