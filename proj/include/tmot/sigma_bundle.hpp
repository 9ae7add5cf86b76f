#pragma once

#include "tmot/hodge_pink.hpp"

namespace tmot {

struct NotCoprime : PxError {
    NotCoprime() : PxError("standard bundle parameters must be coprime with positive rank") {}
};
struct TypeUnknown : PxError {
    TypeUnknown() : PxError("bundle type not computable in this regime") {}
};

// complete isomorphism invariant: a multiset of coprime pairs (d, r)
struct SigmaBundleType {
    std::vector<std::pair<long long, long long>> pieces;  // sorted by slope, then d

    long long rank() const;
    long long degree() const;
    Polygon polygon() const;  // slopes d_i/r_i with multiplicity r_i
    std::string str() const;
    bool operator==(const SigmaBundleType& o) const { return pieces == o.pieces; }
};
SigmaBundleType bundle_type(std::vector<std::pair<long long, long long>> pieces);

// the invariant function of the standard rank-1 degree-1 bundle at alpha:
// ell = ell_plus * ell_minus with z^{-1} sigma*(ell) = ell
struct EllAlpha {
    Px alpha;
    std::vector<Px> bplus;  // coefficients of ell_plus, capped precision
    LS ell_minus;           // z-side Laurent polynomial, truncated product
    LS ell;                 // the product, truncated
    LS residual;            // z^{-1} sigma*(ell) - ell
};
EllAlpha ell_alpha(const Px& alpha, int zN, const Work& w);

// companion matrix of the standard bundle (z-side)
LSMat standard_bundle_matrix(const FieldCtx& k, long long d, long long r, long long zN, const Work& w);

// degrees of the associated pair: deg E = 0 and deg F = dim M, with the full
// type for pure motives
struct PairDegrees {
    long long deg_e = 0;
    long long deg_f = 0;
    std::optional<SigmaBundleType> type;
    bool type_paper_backed = false;  // pure case: the isomorphism type follows
                                     // from purity, the degree is verified here
};
PairDegrees pair_degrees(const AMotive& M, const Work& w);

// splitting of the bundle attached to a 2x2 upper-triangular mixed motive with
// rank-1 graded pieces of weights (a, a+2): the two possible outcomes are
// F_{a+1,1}^{(+)2} and F_{a,1}(+)F_{a+2,1}; decided through the vanishing
// order of the trivialization entry at theta (the unique possible splitting
// morphism has poles exactly when that order is below a+2)
struct SplitResult {
    enum class Verdict { Split, NonSplit, Undecided } verdict = Verdict::Undecided;
    SigmaBundleType type;
    int ord_f = 0;             // certified vanishing order (capped at a+2)
    bool b_divisible = false;  // the (t-theta) | b diagnostic
    Rat certificate_prec = Rat(0);
};
SplitResult rank2_split(const AMotive& M, const Trivialization& t, const Work& w);

struct PolygonChain {
    Polygon SP, WP, HP;
    bool sp_above_wp = false;
    bool wp_above_hp = false;
    bool endpoints_equal = false;
};
// requires the bundle type (pure case or rank-2 mixed family)
PolygonChain sp_polygon_chain(const AMotive& M, const Trivialization& t, const HPStructure& H, const Work& w);

// image criterion: per weight, the graded piece must carry the pure bundle
// type; rank-1 pieces and exactly-standard lattices are decided, the rest is
// reported as unknown
struct GradedCheck {
    Rat mu;
    int rank = 0;
    enum class Verdict { Holds, Fails, Unknown } verdict = Verdict::Unknown;
    std::string note;
};
struct ImageCriterionReport {
    std::vector<GradedCheck> graded;
    bool holds = true;    // no failing piece
    bool complete = true; // no unknown piece
};
ImageCriterionReport image_criterion(const HPStructure& H, const Work& w);

// the rank-2 dichotomy label; decided at the completion with the rationality
// caveat recorded in the note
struct GaloisLabel {
    std::string label;  // "G_m", "G_a x| G_m" or "undecided"
    std::string note;
};
GaloisLabel galois_label(const AMotive& M, const Trivialization& t, const Work& w);

}  // namespace tmot
