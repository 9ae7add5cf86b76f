#pragma once

#include "tmot/puiseux.hpp"

namespace tmot {

// Sparse polynomial in one unknown y over the Puiseux field, sorted by degree.
struct SpTerm {
    long long d;
    Px c;
};
using SPoly = std::vector<SpTerm>;

Px sp_eval(const SPoly& f, const Px& x, const FieldCtx& k);
SPoly sp_derivative(const SPoly& f, const FieldCtx& k);
SPoly sp_normalize(SPoly f);  // drop exact-zero coefficients, sort, merge

// All roots of f in the Puiseux field, computed modulo O(zeta^target), in a
// canonical deterministic order (valuation ascending, then leading coefficient
// by (field degree, code)).  Inexact coefficients simply limit the achievable
// precision of the roots.  A constant coefficient with no stored term is
// treated as zero and contributes a root indistinguishable from 0.
std::vector<Px> np_roots(const SPoly& f, const FieldCtx& k, const Rat& target);

// Canonical single solution: the root of maximal valuation, ties broken by the
// canonical order of the leading coefficient.
Px np_root_canonical(const SPoly& f, const FieldCtx& k, const Rat& target);

// Additive (F_q-linear) polynomial sum_i c[i] y^{q^i}.
struct Additive {
    std::vector<Px> c;
};

Px additive_apply(const Additive& a, const Px& x, const FieldCtx& k);
SPoly additive_to_spoly(const Additive& a, const FieldCtx& k);

// F_q-basis of the root space (dimension = top q-degree when c[0] is a unit),
// via one Newton-Puiseux root per level and twisted right division.
std::vector<Px> additive_kernel_basis(const Additive& a, const FieldCtx& k, const Rat& target);

// Canonical solution of a(y) = rhs.
Px additive_solve_canonical(const Additive& a, const Px& rhs, const FieldCtx& k, const Rat& target);

// Canonical solution of x = b * sigma(x) + c (an F_q-linear equation of
// q-degree q); the "Lang torsor at desk scale".
Px sigma_affine_solve(const Px& b, const Px& c, const Rat& target);

}  // namespace tmot
