#include "tmot/newton_puiseux.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace tmot {

SPoly sp_normalize(SPoly f) {
    std::map<long long, Px> acc;
    for (auto& t : f) {
        if (t.c.is_exact_zero()) continue;
        auto it = acc.find(t.d);
        if (it == acc.end())
            acc.emplace(t.d, t.c);
        else
            it->second = it->second + t.c;
    }
    SPoly out;
    for (auto& [d, c] : acc)
        if (!c.is_exact_zero()) out.push_back({d, c});
    return out;
}

Px sp_eval(const SPoly& f, const Px& x, const FieldCtx& k) {
    // sparse Horner over gaps
    Px acc = Px::zero(k);
    long long last = -1;
    for (size_t i = f.size(); i-- > 0;) {
        if (last < 0) {
            acc = f[i].c;
            last = f[i].d;
            continue;
        }
        acc = acc * x.pow(last - f[i].d) + f[i].c;
        last = f[i].d;
    }
    if (last > 0) acc = acc * x.pow(last);
    return last < 0 ? Px::zero(k) : acc;
}

SPoly sp_derivative(const SPoly& f, const FieldCtx& k) {
    SPoly r;
    for (auto& t : f) {
        if (t.d == 0) continue;
        Fq c = Fq::from_int(k.p, t.d % (long long)k.p);
        if (c.is_zero()) continue;
        r.push_back({t.d - 1, t.c.scaled(c)});
    }
    return sp_normalize(std::move(r));
}

namespace {

// binomial expansion of (y0 + y)^d in characteristic p, via the base-p digits
// of d (Lucas); returns the coefficient of y^j for each j
std::map<long long, Px> shift_pow(const Px& y0, long long d, const FieldCtx& k) {
    std::map<long long, Px> cur;
    cur.emplace(0, Px::from_int(k, 1));
    Px y0p = y0;
    long long block = 1;
    long long dd = d;
    while (dd > 0) {
        long long digit = dd % k.p;
        if (digit > 0) {
            // (y0^{block} + y^{block})^{digit} with ordinary small binomials
            std::map<long long, Px> factor;
            // precompute powers of y0^{block}
            std::vector<Px> pw(digit + 1, Px::from_int(k, 1));
            for (long long i = 1; i <= digit; ++i) pw[i] = pw[i - 1] * y0p;
            long long binom = 1;
            for (long long j = 0; j <= digit; ++j) {
                if (j > 0) binom = binom * (digit - j + 1) / j;
                Fq bc = Fq::from_int(k.p, binom % (long long)k.p);
                if (!bc.is_zero()) factor.emplace(j * block, pw[digit - j].scaled(bc));
            }
            std::map<long long, Px> next;
            for (auto& [da, ca] : cur)
                for (auto& [db, cb] : factor) {
                    Px prod = ca * cb;
                    auto it = next.find(da + db);
                    if (it == next.end())
                        next.emplace(da + db, prod);
                    else
                        it->second = it->second + prod;
                }
            cur = std::move(next);
        }
        dd /= k.p;
        block *= k.p;
        if (dd > 0) {
            // y0^{p^k} for the next digit
            Px nxt = y0p;
            for (uint32_t i = 1; i < k.p; ++i) nxt = nxt * y0p;
            y0p = nxt;
        }
    }
    return cur;
}

SPoly sp_shift(const SPoly& f, const Px& y0, const FieldCtx& k) {
    std::map<long long, Px> acc;
    for (auto& t : f) {
        if (t.d == 0) {
            auto it = acc.find(0);
            if (it == acc.end())
                acc.emplace(0, t.c);
            else
                it->second = it->second + t.c;
            continue;
        }
        auto expanded = shift_pow(y0, t.d, k);
        for (auto& [j, c] : expanded) {
            Px prod = t.c * c;
            auto it = acc.find(j);
            if (it == acc.end())
                acc.emplace(j, prod);
            else
                it->second = it->second + prod;
        }
    }
    SPoly out;
    for (auto& [d, c] : acc)
        if (!c.is_exact_zero()) out.push_back({d, c});
    return out;
}

// attempt a Hensel/Newton refinement from y; returns refined root when the
// quadratic-convergence guard holds
std::optional<Px> hensel(const SPoly& f, const SPoly& fp, Px y, const FieldCtx& k, const Rat& target) {
    for (int it = 0; it < 80; ++it) {
        Px fy = sp_eval(f, y, k);
        Px fpy = sp_eval(fp, y, k);
        if (!fpy.has_terms()) return std::nullopt;
        if (!fy.has_terms()) {
            // residual below its own precision: certified to stored precision
            Prec rp = fy.prec();
            Prec yp = y.prec();
            if (rp) yp = min_prec(yp, Prec(*rp - *fpy.val()));
            return y.with_prec(min_prec(yp, Prec(target)));
        }
        Px corr = fy.div(fpy, Prec(target));
        if (!corr.has_terms()) {
            return y.with_prec(min_prec(y.prec(), corr.prec()));
        }
        // progress requires the correction to be smaller than y's scale
        if (y.has_terms() && *corr.val() <= *y.val()) return std::nullopt;
        y = (y - corr).truncated(target);
        if (*corr.val() >= target) return y.with_prec(Prec(target));
    }
    return std::nullopt;
}

void np_collect(const SPoly& fin, const SPoly& forig, const FieldCtx& k, const Rat& target, const Px& base,
                const std::optional<Rat>& mu_min, int depth, std::vector<Px>& out) {
    SPoly f = sp_normalize(fin);
    if (f.empty()) return;
    // Roots whose digit exponents accumulate (they live in the perfection of
    // the Puiseux field, not at finite ramification) cannot be refined past
    // their accumulation valuation; the depth and ramification budgets cap
    // such roots at an honestly reduced precision.
    const bool budget_exhausted = depth > 60 || base.ramification() > 1 << 14;

    // zero root (composite with the accumulated base point)
    const bool has_const = !f.empty() && f[0].d == 0 && f[0].c.has_terms();
    if (!has_const) {
        // constant term is (or is indistinguishable from) zero
        Rat prec_bound = target;
        if (!f.empty() && f[0].d == 0 && f[0].c.prec()) {
            // bound v(root) >= s_c0 - v(c1) using the lowest positive-degree term
            Rat vlow(0);
            for (auto& t : f)
                if (t.d > 0 && t.c.has_terms()) {
                    vlow = *t.c.val();
                    break;
                }
            prec_bound = std::min(target, *f[0].c.prec() - vlow);
        }
        out.push_back(base.with_prec(Prec(prec_bound)));
        // strip the zero root(s): divide by the smallest power of y present
        SPoly g;
        long long dmin = 0;
        for (auto& t : f)
            if (t.d > 0) {
                dmin = t.d;
                break;
            }
        // multiplicities of the zero root beyond the first are reported once
        for (auto& t : f)
            if (t.d > 0) g.push_back({t.d - dmin, t.c});
        if (dmin == 0) return;
        np_collect(g, forig, k, target, base, mu_min, depth + 1, out);
        return;
    }

    // Newton polygon: lower convex hull of (d, v(c_d)) for definitely nonzero c_d
    std::vector<std::pair<long long, Rat>> pts;
    for (auto& t : f)
        if (t.c.has_terms()) pts.push_back({t.d, *t.c.val()});
    if (pts.size() < 2) return;
    std::vector<size_t> hull;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (hull.size() >= 2) {
            auto& a = pts[hull[hull.size() - 2]];
            auto& b = pts[hull[hull.size() - 1]];
            auto& c = pts[i];
            // drop b if it is above segment a-c
            Rat lhs = (b.second - a.second) * (c.first - a.first);
            Rat rhs = (c.second - a.second) * (b.first - a.first);
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }

    SPoly fp = sp_derivative(f, k);
    (void)fp;
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        auto& A = pts[hull[s]];
        auto& B = pts[hull[s + 1]];
        Rat mu = (A.second - B.second) / Rat(B.first - A.first);  // root valuation
        // digits must strictly increase along a branch; shallower slopes
        // belong to sibling branches already handled higher up
        if (mu_min && mu <= *mu_min) continue;
        if (mu >= target) {
            // roots indistinguishable from 0 at the target precision
            out.push_back(base.with_prec(Prec(target)));
            continue;
        }
        if (budget_exhausted) {
            // remaining digits unresolved: the root is known modulo O(zeta^mu)
            for (long long i = 0; i < B.first - A.first; ++i) out.push_back(base.with_prec(Prec(mu)));
            continue;
        }
        // residual polynomial over the residue field
        std::vector<Fq> res;
        long long width = B.first - A.first;
        res.assign(width + 1, Fq::zero(k.p));
        for (auto& t : f) {
            if (!t.c.has_terms()) continue;
            if (t.d < A.first || t.d > B.first) continue;
            Rat expect = A.second + mu * Rat(A.first - t.d);
            if (*t.c.val() == expect) res[t.d - A.first] = t.c.leading_coeff();
        }
        auto rroots = poly_roots_fq(k.p, res);
        for (auto& [c0, mult] : rroots) {
            if (c0.is_zero()) continue;
            Px y0 = base + Px::monomial(k, c0, mu);
            SPoly fshift = sp_shift(f, Px::monomial(k, c0, mu), k);
            if (mult == 1) {
                // refine against the original polynomial, fall back to one
                // more polygon step when the Newton guard fails
                auto r = hensel(forig, sp_derivative(forig, k), y0, k, target);
                if (r) {
                    out.push_back(*r);
                } else {
                    np_collect(fshift, forig, k, target, y0, std::optional<Rat>(mu), depth + 1, out);
                }
            } else {
                np_collect(fshift, forig, k, target, y0, std::optional<Rat>(mu), depth + 1, out);
            }
        }
    }
}

}  // namespace

std::vector<Px> np_roots(const SPoly& fin, const FieldCtx& k, const Rat& target) {
    std::vector<Px> out;
    SPoly f = sp_normalize(fin);
    np_collect(f, f, k, target, Px::zero(k), std::nullopt, 0, out);
    std::sort(out.begin(), out.end(), [](const Px& a, const Px& b) {
        bool at = a.has_terms(), bt = b.has_terms();
        if (at != bt) return !at;  // known-zero roots first
        if (!at) return false;
        if (*a.val() != *b.val()) return *a.val() < *b.val();
        return a.leading_coeff() < b.leading_coeff();
    });
    return out;
}

Px np_root_canonical(const SPoly& f, const FieldCtx& k, const Rat& target) {
    auto roots = np_roots(f, k, target);
    if (roots.empty()) throw PxError("no root found");
    // maximal valuation = smallest element; known-zero roots count as maximal
    for (auto& r : roots)
        if (!r.has_terms()) return r;
    Px best = roots[0];
    for (auto& r : roots) {
        if (*r.val() > *best.val()) best = r;
    }
    // ties: first in canonical order among max valuation
    for (auto& r : roots)
        if (*r.val() == *best.val()) return r;
    return best;
}

Px additive_apply(const Additive& a, const Px& x, const FieldCtx& k) {
    Px acc = Px::zero(k);
    Px xp = x;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (i > 0) xp = xp.pow((long long)k.q);
        if (!a.c[i].is_exact_zero()) acc = acc + a.c[i] * xp;
    }
    return acc;
}

SPoly additive_to_spoly(const Additive& a, const FieldCtx& k) {
    SPoly f;
    long long d = 1;
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i].is_exact_zero()) f.push_back({d, a.c[i]});
        d *= (long long)k.q;
    }
    return f;
}

std::vector<Px> additive_kernel_basis(const Additive& ain, const FieldCtx& k, const Rat& target) {
    // reduce so that the lowest coefficient is definitely nonzero
    Additive a = ain;
    while (!a.c.empty() && a.c.front().is_exact_zero()) {
        // sum_{i>=1} c_i y^{q^i} = (sum_i c_i^{1/q} y^{q^{i-1}})^q: same kernel
        a.c.erase(a.c.begin());
        for (auto& c : a.c) c = c.frob_sigma_check();
    }
    if (!a.c.empty() && a.c.front().is_known_zero())
        throw PrecisionExhausted("additive kernel: lowest coefficient not certified nonzero");
    size_t r = a.c.empty() ? 0 : a.c.size() - 1;
    std::vector<Px> basis;
    if (r == 0) return basis;
    Additive cur = a;
    std::vector<Px> lifts;  // composition chain of the rho maps
    for (size_t level = 0; level < r; ++level) {
        // one nonzero root of cur
        auto roots = np_roots(additive_to_spoly(cur, k), k, target);
        Px x1;
        bool found = false;
        for (auto& rr : roots)
            if (rr.has_terms()) {
                x1 = rr;
                found = true;
                break;
            }
        if (!found) throw PxError("additive kernel: no nonzero root at working precision");
        // pull x1 back through the recorded rho maps
        Px x = x1;
        for (size_t j = lifts.size(); j-- > 0;) {
            // solve y^q - u y = x, u = lifts[j]
            SPoly g = {{1, -lifts[j]}, {(long long)k.q, Px::from_int(k, 1)}, {0, -x}};
            auto rs = np_roots(g, k, target);
            bool ok = false;
            for (auto& rr : rs)
                if (rr.has_terms()) {
                    x = rr;
                    ok = true;
                    break;
                }
            if (!ok) throw PxError("additive kernel: lift failed");
        }
        basis.push_back(x);
        if (level + 1 == r) break;
        // divide cur on the right by rho = tau - x1^{q-1}
        Px u = x1.pow((long long)k.q - 1);
        std::vector<Px> q(cur.c.size() - 1, Px::zero(k));
        // c_i = q_{i-1} - q_i * sigma^i(u)
        for (size_t i = cur.c.size() - 1; i >= 1; --i) {
            Px qi = (i == cur.c.size() - 1) ? cur.c[i] : cur.c[i] + q[i] * u.frob_pow((long long)i);
            q[i - 1] = qi;
        }
        // remainder check: c_0 + q_0 * u must vanish on stored terms
        Px rem = cur.c[0] + q[0] * u;
        if (rem.has_terms()) throw PxError("additive kernel: twisted division has nonzero remainder");
        cur.c = std::move(q);
        lifts.push_back(u);
    }
    return basis;
}

Px additive_solve_canonical(const Additive& a, const Px& rhs, const FieldCtx& k, const Rat& target) {
    SPoly f = additive_to_spoly(a, k);
    // Fast path: when v(rhs/c_0) exceeds every kernel valuation the maximal
    // valuation root is unique and Newton converges from rhs/c_0 directly.
    if (!a.c.empty() && a.c[0].has_terms() && rhs.has_terms()) {
        Rat v0 = *rhs.val() - *a.c[0].val();
        // maximal kernel valuation from the Newton polygon of the homogeneous part
        std::optional<Rat> mu_max;
        long long d = 1;
        std::vector<std::pair<long long, Rat>> pts;
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i].has_terms()) pts.push_back({d, *a.c[i].val()});
            d *= (long long)k.q;
        }
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            Rat mu = (pts[i].second - pts[i + 1].second) / Rat(pts[i + 1].first - pts[i].first);
            if (!mu_max || mu > *mu_max) mu_max = mu;
        }
        if (mu_max && v0 > *mu_max) {
            SPoly feq = f;
            feq.push_back({0, -rhs});
            feq = sp_normalize(std::move(feq));
            SPoly fp = sp_derivative(feq, k);
            Px y0 = rhs.div(a.c[0], Prec(target));
            Px y = y0;
            for (int it = 0; it < 60; ++it) {
                Px fy = sp_eval(feq, y, k);
                if (!fy.has_terms()) {
                    Prec yp = y.prec();
                    if (fy.prec()) yp = min_prec(yp, Prec(*fy.prec() - *a.c[0].val()));
                    return y.with_prec(min_prec(yp, Prec(target)));
                }
                Px fpy = sp_eval(fp, y, k);
                Px corr = fy.div(fpy, Prec(target));
                if (!corr.has_terms()) return y.with_prec(min_prec(y.prec(), corr.prec()));
                y = (y - corr).truncated(target);
                if (*corr.val() >= target) return y.with_prec(Prec(target));
            }
        }
    }
    f.push_back({0, -rhs});
    return np_root_canonical(sp_normalize(std::move(f)), k, target);
}

Px sigma_affine_solve(const Px& b, const Px& c, const Rat& target) {
    const FieldCtx& k = b.ctx().p ? b.ctx() : c.ctx();
    Additive a;
    a.c = {Px::from_int(k, 1), -b};
    return additive_solve_canonical(a, c, k, target);
}

}  // namespace tmot
