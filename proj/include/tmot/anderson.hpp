#pragma once

#include "tmot/newton_puiseux.hpp"
#include "tmot/skew.hpp"
#include "tmot/tate.hpp"

namespace tmot {

struct NilpotencyViolated : PxError {
    NilpotencyViolated() : PxError("Lie coefficient is not theta plus nilpotent") {}
};
struct NotAFinite : PxError {
    using PxError::PxError;
    NotAFinite() : PxError("module is not in companion-accessible form") {}
};
struct OutsideRadius : PxError {
    OutsideRadius() : PxError("point outside the logarithm radius") {}
};

// A module structure phi_t = Delta_0 + Delta_1 tau + ... + Delta_s tau^s on
// the d-dimensional additive group, with (Delta_0 - theta)^d = 0.
class AndersonModule {
  public:
    AndersonModule() = default;
    static AndersonModule make(const FieldCtx& k, int d, std::vector<PxMat> delta);

    const FieldCtx& ctx() const { return k_; }
    int dim() const { return d_; }
    int tau_deg() const { return (int)delta_.size() - 1; }
    const PxMat& delta(int j) const { return delta_[j]; }
    const PxMat& lie() const { return delta_[0]; }  // Lie phi_t
    bool is_drinfeld() const { return d_ == 1; }
    // rank via the companion form: s for Drinfeld, s*d when Delta_s invertible
    std::optional<int> companion_rank() const;

    SkewMat phi_t() const;
    SkewMat phi_a(const std::vector<Fq>& a) const;  // a in F_q[t], little-endian
    PxMat lie_phi_a(const std::vector<Fq>& a, const Work& w) const;

  private:
    FieldCtx k_;
    int d_ = 1;
    std::vector<PxMat> delta_;
};

// Exponential coefficients E_0 = Id, E_1, ..., E_N with the functional
// equation exp . Lie phi_t = phi_t . exp to order N, plus the isometry radius
// certificate: the exponential is an isometry for v(xi) > radius_v (from the
// stored range).
struct ExpCoeffs {
    std::vector<PxMat> E;
    Rat radius_v = Rat(0);
    bool radius_from_stored_range = true;
};

struct LogCoeffs {
    std::vector<PxMat> L;
};

ExpCoeffs exp_coefficients(const AndersonModule& E, int N, const Work& w);
LogCoeffs log_coefficients(const AndersonModule& E, const ExpCoeffs& exp, int N, const Work& w);

// residual of the defining functional equation (must have no stored terms)
bool exp_functional_equation_ok(const AndersonModule& E, const ExpCoeffs& exp);

// evaluation with tail control; column vectors
PxMat eval_exp(const AndersonModule& E, const ExpCoeffs& exp, const PxMat& xi, const Work& w);
PxMat eval_log(const AndersonModule& E, const LogCoeffs& log, const PxMat& x, const Work& w);

// the canonical generator of the period lattice of the module phi_t = theta + tau
struct CarlitzPeriod {
    Px eta;        // the fixed canonical root of eta^{q-1} = -zeta
    Px value;      // (eta^q prod_{i=1..K} (1 - zeta^{q^i-1}))^{-1}
    Px generator;  // the lattice generator compatible with the scattering
                   // identity sum_k exp(theta^{-k-1} .) t^k = (eta l^-)^{-1};
                   // equals -value for odd q and value in characteristic 2
    int K;         // product truncation, tail below working precision
};
CarlitzPeriod carlitz_period(const FieldCtx& k, const Work& w);

// Anderson generating function sum_n exp(Lie phi_t^{-n-1} lambda) t^n, with
// the functional identity sum_j Delta_j sigma^j f = t f + exp(lambda)
struct Agf {
    TSMat f;          // d x 1
    TSMat residual;   // of the functional identity
    PxMat exp_lambda; // exp(lambda), zero for lattice points
};
Agf anderson_generating_function(const AndersonModule& E, const ExpCoeffs& exp, const PxMat& lambda, const Work& w);

// delta maps on columns of the dual module in its C{tau}^d presentation
PxMat delta0(const SkewMat& m_check);  // constant tau-coefficient
PxMat delta1(const SkewMat& m_check);  // sum of tau-coefficients

// torsion points of a Drinfeld module (d = 1): the kernel of phi_a as an
// F_q-vector space with an A/(a)-module structure certificate
struct TorsionResult {
    std::vector<Px> basis;    // F_q-basis of E[a]
    std::vector<Px> points;   // all q^{r deg a} points, canonical order
    std::vector<Px> module_basis;     // an A/(a)-basis (elements of maximal order)
    bool structure_verified = false;  // E[a] isomorphic to (A/(a))^r
};
TorsionResult torsion_points(const AndersonModule& E, const std::vector<Fq>& a, const Work& w);

// small F_q[t] helpers used by the torsion machinery (little-endian coeffs)
std::pair<std::vector<Fq>, std::vector<Fq>> poly_divmod_fq(const FieldCtx& k, const std::vector<Fq>& num,
                                                           const std::vector<Fq>& den);
std::vector<std::vector<Fq>> monic_prime_divisors(const FieldCtx& k, const std::vector<Fq>& a);

// a-division towers above delta1(m), built from a solution m' of
// taucheck(sigma-check m') - m' = m modulo a^{N+1} in the t-adic completion.
// Concretely both m and the tower live in the C{tau}^d presentation; m' is
// given t-adically as a sequence of skew columns.
struct DivisionTower {
    std::vector<PxMat> x;      // x_(0..N)
    PxMat limit;               // delta0(m' + m) when convergent
    bool convergent_witness = false;  // coefficient decay of m' at the stored range
    bool residual_ok = false;  // the defining difference equation holds mod t^{N+1}
};

// m and m' are given in the C[t]-coordinates of the companion basis of the
// dual module (columns tau^k e_nu); phid is the matrix of the dual motive.
// The tower solves phi_t(x_(n)) = x_(n-1) with phi_t(x_(0)) = delta1(m).
DivisionTower division_tower_from_dual(const AndersonModule& E, const TPolyMat& phid,
                                       const std::vector<TPoly>& m_coords, const TSMat& m_prime, const Work& w);

// delta maps on coordinate vectors over C[t] (companion basis)
SkewMat coords_to_skew(const AndersonModule& E, const std::vector<TPoly>& coords);

}  // namespace tmot
