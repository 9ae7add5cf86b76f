#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tmot/fq.hpp"
#include "tmot/rat.hpp"

namespace tmot {

// Ambient coefficient data: q = p^f is the Frobenius power, zeta the chosen
// uniformizer with 0 < |zeta| < 1 and theta = 1/zeta.
struct FieldCtx {
    uint32_t p = 2;
    uint32_t f = 1;
    uint32_t q = 2;

    static FieldCtx make(uint32_t p, uint32_t f) {
        FieldCtx c;
        c.p = p;
        c.f = f;
        c.q = 1;
        for (uint32_t i = 0; i < f; ++i) c.q *= p;
        return c;
    }
};

// Truncated Puiseux series over the algebraic closure of F_q in the variable
// zeta: the desk-scale stand-in for the complete algebraically closed field.
// The element is known modulo O(zeta^s); s = nullopt means exactly known.
// All stored exponents are < s, strictly increasing, with nonzero coefficients.
class Px {
  public:
    struct Term {
        Rat e;
        Fq c;
    };

    Px() = default;

    static Px zero(const FieldCtx& k);             // exact zero
    static Px zero_mod(const FieldCtx& k, Rat s);  // zero known modulo O(zeta^s)
    static Px from_fq(const FieldCtx& k, Fq c);
    static Px from_int(const FieldCtx& k, long long n);
    static Px monomial(const FieldCtx& k, Fq c, Rat e);
    static Px zeta(const FieldCtx& k) { return monomial(k, Fq::one(k.p), Rat(1)); }
    static Px theta(const FieldCtx& k) { return monomial(k, Fq::one(k.p), Rat(-1)); }

    const FieldCtx& ctx() const { return k_; }
    const std::vector<Term>& terms() const { return t_; }
    const Prec& prec() const { return s_; }
    bool is_exact() const { return !s_.has_value(); }
    bool has_terms() const { return !t_.empty(); }
    // no stored term: indistinguishable from 0 at this precision
    bool is_known_zero() const { return t_.empty(); }
    bool is_exact_zero() const { return t_.empty() && is_exact(); }
    std::optional<Rat> val() const;  // least exponent; nullopt when no terms
    Rat val_lower_bound() const;     // val() or the precision for known zeros (throws for exact zero)
    Fq leading_coeff() const;
    long long ramification() const;  // lcm of exponent denominators (>= 1)

    Px truncated(Rat s) const;        // forget terms at exponent >= s, cap precision
    Px with_prec(Prec s) const;       // cap precision only
    Px shift(const Rat& e) const;     // multiply by zeta^e
    Px scaled(const Fq& c) const;     // multiply by a field constant
    Fq coeff_at(const Rat& e) const;  // stored coefficient (zero if absent)

    Px operator-() const;
    Px frob_sigma() const;                      // c zeta^a -> c^q zeta^{qa}, O(s) -> O(qs)
    Px frob_sigma_check() const;                // inverse map, precision s -> s/q
    Px frob_pow(long long k) const;             // sigma^k (negative = sigma-check)
    Px pow(long long n, Prec at_least = {}) const;
    Px inv(Prec at_least = {}) const;           // needs target precision when exact non-monomial
    Px nth_root(uint64_t n, Prec at_least = {}) const;

    std::string str() const;
    static std::optional<Px> parse(const FieldCtx& k, std::string_view s);

    friend Px operator+(const Px&, const Px&);
    friend Px operator-(const Px&, const Px&);
    friend Px operator*(const Px&, const Px&);
    friend Px operator/(const Px&, const Px&);
    Px div(const Px& y, Prec at_least = {}) const;

    // identical stored data (terms and precision)
    bool identical(const Px& o) const;

  private:
    FieldCtx k_;
    std::vector<Term> t_;
    Prec s_;

    void normalize();
};

// residual-style check: x - y has no stored term (equal at the shared precision)
bool agree_at_precision(const Px& x, const Px& y);

struct PxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivisionByPrecisionZero : PxError {
    DivisionByPrecisionZero() : PxError("division by an element with no known nonzero term") {}
};
struct PrecisionExhausted : PxError {
    using PxError::PxError;
    PrecisionExhausted() : PxError("precision exhausted") {}
};

}  // namespace tmot
