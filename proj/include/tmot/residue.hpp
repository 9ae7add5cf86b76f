#pragma once

#include "tmot/local.hpp"

namespace tmot {

// A differential (num/den) dt with polynomial numerator and denominator.
struct RatDiff {
    TPoly num;
    TPoly den;
};

struct InsufficientPrecision : PxError {
    using PxError::PxError;
    InsufficientPrecision() : PxError("insufficient precision to read the residue") {}
};

// Residue at infinity in the uniformizer z = 1/t (dt = -z^{-2} dz).
Px residue_at_infinity(const RatDiff& w, const Work& wk);
// Residue at the distinguished place t = theta in the uniformizer t - theta.
Px residue_at_theta(const RatDiff& w, const Work& wk);
// Residue at a finite point t = c.
Px residue_at_point(const RatDiff& w, const Px& c, const Work& wk);

}  // namespace tmot
