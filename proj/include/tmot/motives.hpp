#pragma once

#include "tmot/anderson.hpp"
#include "tmot/local.hpp"
#include "tmot/residue.hpp"
#include "tmot/tate.hpp"

namespace tmot {

struct NotAbelianAccessible : PxError {
    NotAbelianAccessible() : PxError("module not in companion-accessible form") {}
};
struct NotUniformizableDetected : PxError {
    using PxError::PxError;
};
struct MissingTrivialization : PxError {
    MissingTrivialization() : PxError("operation needs a rigid analytic trivialization") {}
};
struct SlopesNotStabilized : PxError {
    SlopesNotStabilized() : PxError("slope iteration did not stabilize within the bound") {}
};
struct RelationViolated : PxError {
    RelationViolated() : PxError("internal consistency relation violated") {}
};

// A t-motive presented by a square matrix over C[t]: tau acts by
// phi * (t-theta)^{-jshift} (jshift = 0 is the effective case).  The pole
// exponent dj of det(phi) = unit (t-theta)^{dj} is verified on construction.
struct AMotive {
    TPolyMat phi;
    int jshift = 0;
    int dj = 0;

    int rank() const { return (int)phi.rows; }
    int dim() const { return dj - jshift * rank(); }
    const FieldCtx& ctx() const { return phi.a[0].ctx(); }
};

// A dual t-motive: the matrix represents the sigma-check-semilinear map.
struct DualAMotive {
    TPolyMat phi;
    int jshift = 0;
    int dj = 0;

    int rank() const { return (int)phi.rows; }
    int dim() const { return dj - jshift * rank(); }
    const FieldCtx& ctx() const { return phi.a[0].ctx(); }
};

AMotive make_amotive(TPolyMat phi, int jshift, const Work& w);
DualAMotive make_dual_amotive(TPolyMat phi, int jshift, const Work& w);
AMotive unit_motive(const FieldCtx& k, const Work& w);
// the motive with phi = (t-theta)^n (Carlitz power; n may be negative)
AMotive carlitz_power(const FieldCtx& k, int n, const Work& w);

// companion constructions from an Anderson module
AMotive motive_of(const AndersonModule& E, const Work& w);
DualAMotive dual_motive_of(const AndersonModule& E, const Work& w);
// the constant matrix X with X Phi^T = Phi-check sigma-check(X), exactly
PxMat xi_matrix(const AndersonModule& E, const Work& w);
// exact polynomial-identity check of the relation
bool xi_relation_holds(const AndersonModule& E, const AMotive& M, const DualAMotive& Md, const PxMat& X);

// tensor calculus; rank/dim bookkeeping follows the elementary divisor theorem
AMotive tensor_motive(const AMotive& A, const AMotive& B, const Work& w);
AMotive hom_motive(const AMotive& A, const AMotive& B, const Work& w);  // Hom(A, B)
AMotive dual_of_motive(const AMotive& A, const Work& w);
AMotive sum_motive(const AMotive& A, const AMotive& B, const Work& w);

// Newton slopes of the associated z-isocrystal
struct SlopeResult {
    std::vector<std::pair<Rat, int>> slopes;  // ascending, with multiplicities
    bool pure = false;
    Rat weight = Rat(0);  // = dim/rank when pure
    int iterations = 0;
    bool stabilized = false;
};
SlopeResult isocrystal_slopes(const AMotive& M, const Work& w);

// weight filtrations given by coordinate flags: step i declares the span of
// the first `cols` standard basis vectors to be W_mu
struct FlagStep {
    Rat mu;
    int cols = 0;
};
struct FiltrationReport {
    bool applicable = true;      // the flag is tau-stable for this phi
    bool mixed = false;          // all graded pieces pure of the declared weights
    std::vector<SlopeResult> graded;   // per step
    std::string note;
};
FiltrationReport check_weight_filtration(const AMotive& M, const std::vector<FlagStep>& steps, const Work& w);

// degree-bounded search for a pure rank-1 sub-motive of weight mu inside a
// 2x2 upper-triangular motive; returns whether one exists (the documented
// not-mixed detector for that family)
struct Rank1SearchResult {
    bool found = false;
    std::string reason;
};
Rank1SearchResult find_rank1_submotive(const AMotive& M, const Rat& mu, int degree_bound, const Work& w);

// rigid analytic trivialization: sigma* Psi^T = Psi^T Phi
struct Trivialization {
    TSMat psi;       // r x r
    TSMat psiT_inv;  // (Psi^T)^{-1}: columns = coordinates of a lattice basis
    TSMat residual;  // sigma* Psi^T - Psi^T Phi
    Rat s_witness = Rat(1, 2);  // Psi entries witnessed in the s-Tate ring
};
// routes: companion form (scattering-type scalar recursion), upper-triangular
// with rank-1 diagonal pieces, or Kronecker combination (see tensor helper)
Trivialization rigid_trivialization(const AMotive& M, const Work& w);
Trivialization tensor_trivialization(const Trivialization& A, const Trivialization& B, const Work& w);

struct DualTrivialization {
    TSMat psi_check;  // sigma-check* PsiCheck = PsiCheck PhiCheck
    TSMat residual;
};
// from the non-dual side: PsiCheck = (sigma* Psi)^{-1} (dual-basis convention)
DualTrivialization dual_trivialization(const DualAMotive& Md, const Trivialization& t, const Work& w);
// companion convention with the xi matrix: PsiCheck = sigma*(Psi^{-1}) X^{-1}
DualTrivialization dual_trivialization_companion(const DualAMotive& Md, const Trivialization& t, const PxMat& X,
                                                 const Work& w);

// period lattice of a companion Drinfeld module, recovered from the
// trivialization: lambda_j = -((t-theta) f_j)|_{t=theta}; certificates:
// exp(lambda_j) indistinguishable from zero
struct LatticeResult {
    PxMat basis;              // d x r, columns lambda_j
    std::vector<bool> exp_zero_certificate;
    bool discreteness_certificate = false;  // no short nonzero combination inside the log radius
};
LatticeResult drinfeld_lattice(const AndersonModule& E, const Trivialization& t, const Work& w);

// Betti / de Rham / v-adic realization data
struct Realizations {
    // Betti: the lattice basis is the standard basis of F_q[t]^r via psiT_inv
    // de Rham: sigma*M / J with the Hodge-Pink lattice matrix over C[[u]]
    LSMat hodge_pink_lattice;  // q = U p in the Betti basis
    // v-adic at v = t, level n: matrices of the comparison on A/(t^n)
    int v_level = 0;
    std::vector<PxMat> v_adic_points;  // division tower points realizing h_{Betti,v}
    Px betti_de_rham_value;            // 1x1 case: the period isomorphism value
};

// the comparison value for the Carlitz motive: the h_{Betti,dR} entry in the
// canonical bases (equals the inverse of the period for the cohomology side)
Px carlitz_betti_de_rham_value(const FieldCtx& k, const Work& w);

// Gekeler-style pairing for Drinfeld modules: eta_t in tau_M(sigma*M) given as
// a tau-polynomial multiple; returns both routes
struct PairingResult {
    Px via_de_rham;   // t = theta specialization of Psi^T [eta_t], paired with lambda
    Px via_series;    // F_eta(lambda) with F_eta = sum_{i>=1} f_i X^{q^i}
    Px linear_term;   // the f_0 lambda ambiguity fixed by the de Rham route
};
PairingResult gekeler_pairing(const AndersonModule& E, const Trivialization& t, const SkewPoly& eta_t,
                              const Px& lambda, const Work& w);

// a matrix S with sigma(S) = U0 S (columns solve the Frobenius-linear system;
// identity when U0 is the identity); ranks 1 and 2 and the identity shortcut
PxMat sigma_fixed_matrix(const PxMat& U0, const Work& w);

}  // namespace tmot
