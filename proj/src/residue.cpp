#include "tmot/residue.hpp"

namespace tmot {

namespace {

// Laurent coefficient of var^e of num/den expanded from Taylor jets
Px laurent_coeff(const std::vector<Px>& num, const std::vector<Px>& den, long long e, const FieldCtx& k,
                 const Work& wk) {
    // den = u^v * unit
    size_t v = 0;
    while (v < den.size() && !den[v].has_terms()) {
        if (!den[v].is_exact_zero())
            throw InsufficientPrecision("denominator jet not certified nonzero");
        ++v;
    }
    if (v == den.size()) throw DivisionByPrecisionZero();
    long long want = e + (long long)v;  // coefficient of u^want in num/unit
    if (want < 0) return Px::zero(k);
    // series division: (num) * (unit)^{-1} modulo u^{want+1}
    std::vector<Px> unit(den.begin() + v, den.end());
    std::vector<Px> inv(want + 1, Px::zero(k));
    Px lead_inv = Px::from_int(k, 1).div(unit[0], Prec(wk.zeta_prec));
    inv[0] = lead_inv;
    for (long long i = 1; i <= want; ++i) {
        Px acc = Px::zero(k);
        for (long long j = 1; j <= i && j < (long long)unit.size(); ++j) acc = acc + unit[j] * inv[i - j];
        inv[i] = -(lead_inv * acc);
    }
    Px out = Px::zero(k);
    for (long long j = 0; j <= want && j < (long long)num.size(); ++j) out = out + num[j] * inv[want - j];
    return out;
}

}  // namespace

Px residue_at_infinity(const RatDiff& w, const Work& wk) {
    const FieldCtx& k = w.num.ctx().p ? w.num.ctx() : w.den.ctx();
    // a dt = -a(1/z) z^{-2} dz; Res = coefficient of z^{-1}
    LS nz = LS::from_tpoly(w.num, LVar::z, wk.u_order + 4);
    LS dz = LS::from_tpoly(w.den, LVar::z, wk.u_order + 4);
    LS a = nz * dz.inv(wk);
    return -a.coeff(1);
}

Px residue_at_theta(const RatDiff& w, const Work& wk) { return residue_at_point(w, Px::theta(w.num.ctx().p ? w.num.ctx() : w.den.ctx()), wk); }

Px residue_at_point(const RatDiff& w, const Px& c, const Work& wk) {
    const FieldCtx& k = w.num.ctx().p ? w.num.ctx() : w.den.ctx();
    int order = std::max(w.den.deg() + 2, wk.u_order);
    auto num = w.num.taylor_at(c, order);
    auto den = w.den.taylor_at(c, order);
    return laurent_coeff(num, den, -1, k, wk);
}

}  // namespace tmot
