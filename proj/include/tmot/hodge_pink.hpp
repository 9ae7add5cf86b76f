#pragma once

#include "tmot/motives.hpp"

namespace tmot {

struct LatticeRankMismatch : PxError {
    LatticeRankMismatch() : PxError("lattice basis does not have full rank") {}
};
struct NotSaturated : PxError {
    NotSaturated() : PxError("subspace basis is not saturated at the working truncation") {}
};

// polygon from a multiset of rational slopes
struct Polygon {
    std::vector<std::pair<Rat, int>> slopes;  // ascending

    int total_mult() const;
    Rat endpoint() const;
    // partial sum of the k smallest slopes
    Rat partial(int k) const;
    std::string str() const;
};
// A lies above B (same rank), pointwise on partial sums
bool polygon_above(const Polygon& A, const Polygon& B);

// A mixed Hodge-Pink structure presented in a weight-adapted basis: basis
// vector i carries weight wt[i], and the Hodge-Pink lattice is q = U p.
struct HPStructure {
    std::vector<Rat> wt;
    LSMat U;

    int rank() const { return (int)wt.size(); }
    const FieldCtx& ctx() const { return U.a[0].ctx(); }
};

// from a motive with a coordinate-flag weight filtration (mu per flag step)
HPStructure hp_of_motive(const AMotive& M, const Trivialization& t, const std::vector<FlagStep>& flag, const Work& w);
// dual-basis convention: U = expansion of sigma-check* PsiCheck = Psi^{-1}
HPStructure hp_of_dual_motive(const DualAMotive& Md, const Trivialization& t, const std::vector<FlagStep>& flag,
                              const Work& w);
// from an Anderson module with a full-rank lattice basis (d x r)
HPStructure hp_of_anderson(const AndersonModule& E, const PxMat& lattice, const Work& w);
// the companion-convention dual of an Anderson module (used by the
// compatibility checks): U = expansion(Psi^{-1}) * sigma-check(X^{-1})
HPStructure hp_of_anderson_dual(const AndersonModule& E, const Trivialization& t, const PxMat& X,
                                const std::vector<Rat>& wt, const Work& w);

HPStructure hp_unit(const FieldCtx& k, const Work& w);  // pure weight 0, q = p
HPStructure hp_tensor(const HPStructure& A, const HPStructure& B, const Work& w);
HPStructure hp_dual(const HPStructure& A, const Work& w);
HPStructure hp_hom(const HPStructure& A, const HPStructure& B, const Work& w);

// Hodge-Pink weights: the elementary divisors of q relative to p, ascending
std::vector<long long> hp_weights(const HPStructure& H, const Work& w);
// dimensions of the induced Hodge-Pink filtration F^i for i in [lo, hi]
std::vector<std::pair<long long, int>> hp_filtration_dims(const HPStructure& H, const Work& w);

Polygon hodge_polygon(const HPStructure& H, const Work& w);
Polygon weight_polygon(const HPStructure& H);

struct PolygonReport {
    Polygon HP, WP;
    bool wp_above_hp = false;
    bool endpoints_equal = false;
};
PolygonReport polygons_compare(const HPStructure& H, const Work& w);

// degree functionals and the falsifier-search semistability report.
// Subspaces of H tensored up to the Laurent field at infinity are given by
// z-side bases with F_q coefficients (matrices over the z-Laurent ring).
struct SubspaceCheck {
    std::string label;
    long long deg_q = 0;
    Rat deg_w = Rat(0);
    bool ok = false;        // deg_q <= deg_w
    bool equality = false;  // deg_q == deg_w (required on the weight filtration)
};
struct SemistabilityReport {
    std::vector<SubspaceCheck> checks;
    bool consistent = true;        // no falsifier found
    bool filtration_equalities = true;
};
SemistabilityReport degrees_and_semistability(const HPStructure& H, const std::vector<LSMat>& user_subspaces,
                                              const Work& w);

// total deg_q of the structure (= dim of the motive for motive-derived H)
long long hp_total_degree(const HPStructure& H, const Work& w);

// compatibility checks between the three structures attached to one Drinfeld
// module: the lattice-kernel structure, the dual-motive structure and the
// twisted dual of the motive structure
struct CompatReport {
    bool h1e_vs_dual = false;    // kernel lattice vs dual-motive lattice (delta_0 base change)
    bool h1e_vs_motive = false;  // kernel lattice vs twisted dual of the motive structure
    bool square_commutes = false;
    std::vector<long long> weights_h1e, weights_h1m;
};
CompatReport compatibility_checks(const AndersonModule& E, const Work& w);

// unit-equivalence of two lattices presented in the same basis
bool lattices_unit_equivalent(const LSMat& U1, const LSMat& U2, const Work& w);

// the induced lattice of the graded piece of weight mu, as a square basis
// matrix in the weight-mu coordinates of the adapted basis
LSMat hp_graded_U(const HPStructure& H, const Rat& mu, const Work& w);

}  // namespace tmot
