#pragma once

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmot {

// An element of the algebraic closure of F_p, stored in its minimal subfield
// F_{p^m}.  All subfields are presented by a fixed compatible tower of defining
// polynomials: for each degree m the lexicographically least monic polynomial
// that is primitive and norm-compatible with the polynomials chosen for all
// proper divisors of m (the usual Conway-style selection rule).  The residue
// class of x is then a canonical generator g_m of F_{p^m}^x, and
// g_m^{(p^m-1)/(p^d-1)} = g_d for d | m.
class Fq {
  public:
    Fq() = default;  // invalid until assigned

    static Fq zero(uint32_t p);
    static Fq one(uint32_t p);
    static Fq from_int(uint32_t p, long long n);
    static Fq generator(uint32_t p, uint32_t m);
    static Fq gen_pow(uint32_t p, uint32_t m, uint64_t k);
    using CoeffVec = boost::container::small_vector<uint8_t, 8>;
    // element of F_{p^m} with the given coordinate vector in powers of g_m
    static Fq from_coeffs(uint32_t p, uint32_t m, CoeffVec c);

    uint32_t p() const { return p_; }
    uint32_t deg() const { return m_; }  // degree of the minimal subfield
    const CoeffVec& coeffs() const { return c_; }
    bool is_zero() const;
    bool is_one() const;

    Fq operator-() const;
    Fq pow(long long e) const;
    Fq inv() const;
    Fq frob(long long k = 1) const;  // x -> x^{p^k}, k < 0 takes p-th roots
    Fq qth_root(uint32_t q) const;   // unique q-th root for q a power of p
    Fq qth_power(uint32_t q) const;

    // discrete log w.r.t. the canonical generator of the minimal subfield
    uint64_t dlog() const;
    uint64_t code() const;  // integer encoding, used for canonical ordering

    std::string str() const;
    static std::optional<Fq> parse(uint32_t p, std::string_view s);

    bool operator==(const Fq& o) const { return p_ == o.p_ && m_ == o.m_ && c_ == o.c_; }
    bool operator!=(const Fq& o) const { return !(*this == o); }
    // canonical total order: by (deg, code)
    bool operator<(const Fq& o) const;

    friend Fq operator+(const Fq&, const Fq&);
    friend Fq operator-(const Fq&, const Fq&);
    friend Fq operator*(const Fq&, const Fq&);
    friend Fq operator/(const Fq&, const Fq&);

  private:
    uint32_t p_ = 0;
    uint32_t m_ = 1;
    CoeffVec c_;  // coordinates, size m_, minimal field

    void normalize();  // shrink to the minimal subfield
    friend struct FqOps;
};

// All n-th roots of x in the closure, in canonical order (ties by (deg, code)
// of the root itself).  Empty only for x = 0, n arbitrary (then the root is 0).
std::vector<Fq> nth_roots_fq(const Fq& x, uint64_t n);
// The canonical n-th root: the one of minimal discrete log in the minimal
// field containing all candidates (deterministic across runs).
Fq nth_root_canonical_fq(const Fq& x, uint64_t n);

// Roots in the algebraic closure of a polynomial with Fq coefficients
// (coeffs[i] multiplies X^i), with multiplicities, in canonical order.
std::vector<std::pair<Fq, int>> poly_roots_fq(uint32_t p, const std::vector<Fq>& coeffs);

// Canonical defining polynomial of F_{p^m} (monic, degree m; coefficient i of
// the returned vector multiplies x^i, the leading 1 included).
std::vector<uint8_t> canonical_poly(uint32_t p, uint32_t m);

}  // namespace tmot
