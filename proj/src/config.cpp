#include <cctype>
#include <map>
#include <sstream>

#include "tmot/cli.hpp"

namespace tmot {

namespace {

struct Cursor {
    const std::string& s;
    size_t i = 0;
    int line = 1, col = 1;

    bool eof() const { return i >= s.size(); }
    char peek() const { return i < s.size() ? s[i] : '\0'; }
    char get() {
        char c = s[i++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    void skip_ws_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (isspace((unsigned char)c)) {
                get();
            } else {
                break;
            }
        }
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line, col); }
};

std::string read_token(Cursor& c) {
    c.skip_ws_and_comments();
    std::string t;
    while (!c.eof()) {
        char ch = c.peek();
        if (isalnum((unsigned char)ch) || ch == '-' || ch == '_' || ch == '^' || ch == '=' || ch == '.') {
            t.push_back(c.get());
            if (t.back() == '=') break;
        } else {
            break;
        }
    }
    if (t.empty() && !c.eof()) t.push_back(c.get());
    return t;
}

// tiny expression grammar over the atoms used in the configs:
//   expr  := term (('+'|'-') term)*
//   term  := factor ('*' factor)*
//   factor:= atom ('^' int)?
//   atom  := int | zeta | theta | t | tau | u | g<m>^<k> | '(' expr ')' | '-' atom
// evaluated in the polynomial ring over the Puiseux field in one of the
// variables {t, tau, u}
struct Expr {
    // generic dense representation: coefficients of var^i
    std::vector<Px> c;
    FieldCtx k;

    static Expr constant(const FieldCtx& k, Px v) {
        Expr e;
        e.k = k;
        e.c = {std::move(v)};
        e.trim();
        return e;
    }
    static Expr variable(const FieldCtx& k) {
        Expr e;
        e.k = k;
        e.c = {Px::zero(k), Px::from_int(k, 1)};
        return e;
    }
    void trim() {
        while (!c.empty() && c.back().is_exact_zero()) c.pop_back();
    }
    Expr operator+(const Expr& o) const {
        Expr r;
        r.k = k;
        r.c.resize(std::max(c.size(), o.c.size()), Px::zero(k));
        for (size_t i = 0; i < r.c.size(); ++i) {
            Px s = Px::zero(k);
            if (i < c.size()) s = s + c[i];
            if (i < o.c.size()) s = s + o.c[i];
            r.c[i] = s;
        }
        r.trim();
        return r;
    }
    Expr operator-() const {
        Expr r = *this;
        for (auto& x : r.c) x = -x;
        return r;
    }
    Expr operator*(const Expr& o) const {
        Expr r;
        r.k = k;
        if (c.empty() || o.c.empty()) return r;
        r.c.assign(c.size() + o.c.size() - 1, Px::zero(k));
        for (size_t i = 0; i < c.size(); ++i)
            for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] = r.c[i + j] + c[i] * o.c[j];
        r.trim();
        return r;
    }
};

struct ExprParser {
    Cursor& cur;
    FieldCtx k;
    std::string var;  // "t", "tau" or "u"
    Rat zeta_prec;

    Expr parse() {
        Expr e = term();
        while (true) {
            cur.skip_ws_and_comments();
            char c = cur.peek();
            if (c == '+') {
                cur.get();
                e = e + term();
            } else if (c == '-') {
                cur.get();
                e = e + (-term());
            } else {
                break;
            }
        }
        return e;
    }

    Expr term() {
        Expr e = factor();
        while (true) {
            cur.skip_ws_and_comments();
            if (cur.peek() == '*') {
                cur.get();
                e = e * factor();
            } else {
                break;
            }
        }
        return e;
    }

    Expr factor() {
        Expr a = atom();
        cur.skip_ws_and_comments();
        if (cur.peek() == '^') {
            cur.get();
            long long n = read_int();
            if (n < 0) {
                // negative powers only for u (Laurent data) and zeta/theta atoms
                if (a.c.size() == 1) {
                    Px base = a.c[0];
                    Px r = Px::from_int(k, 1);
                    Px binv = base.inv(Prec(zeta_prec));
                    for (long long i = 0; i < -n; ++i) r = r * binv;
                    return Expr::constant(k, r);
                }
                cur.fail("negative powers are only allowed on invertible scalars");
            }
            Expr r = Expr::constant(k, Px::from_int(k, 1));
            for (long long i = 0; i < n; ++i) r = r * a;
            return r;
        }
        return a;
    }

    long long read_int() {
        cur.skip_ws_and_comments();
        bool neg = false;
        if (cur.peek() == '-') {
            cur.get();
            neg = true;
        }
        if (!isdigit((unsigned char)cur.peek())) cur.fail("expected an integer");
        long long v = 0;
        while (isdigit((unsigned char)cur.peek())) v = v * 10 + (cur.get() - '0');
        return neg ? -v : v;
    }

    Expr atom() {
        cur.skip_ws_and_comments();
        char c = cur.peek();
        if (c == '(') {
            cur.get();
            Expr e = parse();
            cur.skip_ws_and_comments();
            if (cur.peek() != ')') cur.fail("expected ')'");
            cur.get();
            return e;
        }
        if (c == '-') {
            cur.get();
            return -atom();
        }
        if (isdigit((unsigned char)c)) {
            long long v = 0;
            while (isdigit((unsigned char)cur.peek())) v = v * 10 + (cur.get() - '0');
            return Expr::constant(k, Px::from_int(k, v));
        }
        // identifiers
        std::string id;
        while (isalnum((unsigned char)cur.peek()) || cur.peek() == '_') id.push_back(cur.get());
        if (id == "zeta") return Expr::constant(k, Px::zeta(k));
        if (id == "theta") return Expr::constant(k, Px::theta(k));
        if (id == var) return Expr::variable(k);
        if (!id.empty() && id[0] == 'g') {
            // g<m>^<k>
            size_t pos = 1;
            uint32_t m = 0;
            while (pos < id.size() && isdigit((unsigned char)id[pos])) m = m * 10 + (id[pos++] - '0');
            uint64_t kk = 0;
            if (pos == id.size() && cur.peek() == '^') {
                cur.get();
                long long e = read_int();
                kk = (uint64_t)e;
            } else {
                cur.fail("malformed generator literal (use g<m>^<k>)");
            }
            if (m == 0) cur.fail("generator field degree must be positive");
            return Expr::constant(k, Px::from_fq(k, Fq::gen_pow(k.p, m, kk)));
        }
        cur.fail(id.empty() ? "unexpected character" : "unknown identifier '" + id + "'");
    }
};

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
    ProblemConfig cfg;
    cfg.source_hash = fnv1a(text);
    Cursor cur{text};
    bool field_seen = false, object_seen = false;
    std::vector<std::string> raw_module_rows, raw_motive_rows, raw_u_rows;

    auto expect = [&](char c) {
        cur.skip_ws_and_comments();
        if (cur.peek() != c) cur.fail(std::string("expected '") + c + "'");
        cur.get();
    };

    while (true) {
        cur.skip_ws_and_comments();
        if (cur.eof()) break;
        std::string block = read_token(cur);
        expect('{');
        if (block == "field") {
            uint32_t p = 0, f = 1;
            while (true) {
                cur.skip_ws_and_comments();
                if (cur.peek() == '}') {
                    cur.get();
                    break;
                }
                std::string key = read_token(cur);
                expect('=');
                if (key == "p")
                    p = (uint32_t)ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                else if (key == "f")
                    f = (uint32_t)ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                else
                    cur.fail("unknown field key '" + key + "'");
            }
            if (p < 2) throw ValidationError("field block needs a prime p >= 2");
            cfg.field = FieldCtx::make(p, f);
            field_seen = true;
        } else if (block == "precision") {
            while (true) {
                cur.skip_ws_and_comments();
                if (cur.peek() == '}') {
                    cur.get();
                    break;
                }
                std::string key = read_token(cur);
                expect('=');
                long long v = ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                if (key == "zeta")
                    cfg.work.zeta_prec = Rat(v);
                else if (key == "t_order")
                    cfg.work.t_order = (int)v;
                else if (key == "u_order")
                    cfg.work.u_order = (int)v;
                else
                    cur.fail("unknown precision key '" + key + "'");
            }
        } else if (block == "anderson-module" || block == "a-motive" || block == "dual-a-motive" ||
                   block == "hodge-pink") {
            if (object_seen) throw ValidationError("exactly one object block is allowed");
            object_seen = true;
            if (!field_seen) throw ValidationError("the field block must precede the object block");
            cfg.kind = block == "anderson-module"  ? ObjectKind::AndersonModuleBlock
                       : block == "a-motive"       ? ObjectKind::AMotiveBlock
                       : block == "dual-a-motive"  ? ObjectKind::DualAMotiveBlock
                                                   : ObjectKind::HodgePinkBlock;
            while (true) {
                cur.skip_ws_and_comments();
                if (cur.peek() == '}') {
                    cur.get();
                    break;
                }
                std::string key = read_token(cur);
                expect('=');
                if (key == "d") {
                    cfg.dim = (int)ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                } else if (key == "jshift") {
                    cfg.jshift = (int)ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                } else if (key == "weights") {
                    // 1:1, 3:2  -> flag steps (mu : cols)
                    cfg.flag_given = true;
                    while (true) {
                        cur.skip_ws_and_comments();
                        long long mu_num = ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                        long long mu_den = 1;
                        if (cur.peek() == '/') {
                            cur.get();
                            mu_den = ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                        }
                        cur.skip_ws_and_comments();
                        if (cur.peek() != ':') cur.fail("expected ':' in weights");
                        cur.get();
                        long long cols = ExprParser{cur, cfg.field, "", Rat(4)}.read_int();
                        cfg.flag.push_back({Rat(mu_num, mu_den), (int)cols});
                        cfg.hp_weights_decl.push_back(Rat(mu_num, mu_den));
                        cur.skip_ws_and_comments();
                        if (cur.peek() == ',') {
                            cur.get();
                            continue;
                        }
                        break;
                    }
                } else if (key == "row" || key == "urow") {
                    cur.skip_ws_and_comments();
                    std::string var = cfg.kind == ObjectKind::AndersonModuleBlock ? "tau"
                                      : cfg.kind == ObjectKind::HodgePinkBlock   ? "u"
                                                                                 : "t";
                    if (cfg.kind == ObjectKind::AndersonModuleBlock && cfg.dim == 1) {
                        // single skew polynomial
                        ExprParser ep{cur, cfg.field, var, cfg.work.zeta_prec};
                        Expr e = ep.parse();
                        cfg.module_rows.push_back({SkewPoly(cfg.field, Side::tau, e.c)});
                    } else {
                        // bracketed entry list: [e, e, ...]
                        expect('[');
                        std::vector<Expr> entries;
                        while (true) {
                            ExprParser ep{cur, cfg.field, var, cfg.work.zeta_prec};
                            entries.push_back(ep.parse());
                            cur.skip_ws_and_comments();
                            if (cur.peek() == ',') {
                                cur.get();
                                continue;
                            }
                            break;
                        }
                        expect(']');
                        if (cfg.kind == ObjectKind::AndersonModuleBlock) {
                            std::vector<SkewPoly> row;
                            for (auto& e : entries) row.push_back(SkewPoly(cfg.field, Side::tau, e.c));
                            cfg.module_rows.push_back(std::move(row));
                        } else if (cfg.kind == ObjectKind::HodgePinkBlock) {
                            std::vector<LS> row;
                            for (auto& e : entries) {
                                LS x(cfg.field, LVar::u, cfg.work.u_order);
                                for (size_t i = 0; i < e.c.size(); ++i) x.set_coeff((long long)i, e.c[i]);
                                row.push_back(x);
                            }
                            cfg.u_rows.push_back(std::move(row));
                        } else {
                            std::vector<TPoly> row;
                            for (auto& e : entries) row.push_back(TPoly(cfg.field, e.c));
                            cfg.motive_rows.push_back(std::move(row));
                        }
                    }
                } else {
                    cur.fail("unknown object key '" + key + "'");
                }
            }
        } else if (block == "tasks") {
            while (true) {
                cur.skip_ws_and_comments();
                if (cur.peek() == '}') {
                    cur.get();
                    break;
                }
                // a task is a word, optionally followed by key=value arguments
                std::string t = read_token(cur);
                cur.skip_ws_and_comments();
                if (cur.peek() == 'a' && t == "torsion") {
                    std::string arg = read_token(cur);  // "a="
                    if (arg != "a=") cur.fail("torsion takes 'a=<polynomial in t>'");
                    // read until whitespace
                    std::string poly;
                    while (!cur.eof() && !isspace((unsigned char)cur.peek()) && cur.peek() != '}')
                        poly.push_back(cur.get());
                    t += " a=" + poly;
                }
                cfg.tasks.push_back(t);
            }
        } else {
            cur.fail("unknown block '" + block + "'");
        }
    }
    if (!field_seen) throw ValidationError("missing field block");
    if (!object_seen) throw ValidationError("missing object block");
    if (cfg.tasks.empty()) throw ValidationError("missing tasks block");
    if (cfg.work.zeta_prec <= Rat(0) || cfg.work.t_order <= 0 || cfg.work.u_order <= 0)
        throw ValidationError("precision parameters must be positive");
    return cfg;
}

}  // namespace tmot
