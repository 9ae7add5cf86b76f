#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tmot/cli.hpp"

namespace tmot {

namespace {

constexpr const char* kVersion = "tmot 0.1.0";

std::string yn(bool b) { return b ? "yes" : "no"; }

std::string residual_summary(const TSMat& R) {
    bool zero = ts_mat_known_zero(R);
    // smallest coefficient precision among the residual entries
    std::optional<Rat> worst;
    for (auto& f : R.a)
        for (int n = 0; n <= f.order(); ++n) {
            const Px c = f.coeff(n);
            if (c.prec() && (!worst || *c.prec() < *worst)) worst = *c.prec();
        }
    std::string s = zero ? "zero" : "NONZERO";
    if (worst) s += " (certified modulo O(zeta^" + to_string(*worst) + "))";
    return s;
}

struct Objects {
    std::optional<AndersonModule> E;
    std::optional<AMotive> M;
    std::optional<DualAMotive> Md;
    std::optional<HPStructure> H_direct;
    std::vector<FlagStep> flag;
    bool flag_given = false;
};

Objects build_objects(const ProblemConfig& cfg) {
    Objects o;
    o.flag = cfg.flag;
    o.flag_given = cfg.flag_given;
    const FieldCtx& k = cfg.field;
    switch (cfg.kind) {
        case ObjectKind::AndersonModuleBlock: {
            if ((int)cfg.module_rows.size() != cfg.dim) throw ValidationError("anderson-module needs d rows");
            int maxdeg = 0;
            for (auto& row : cfg.module_rows)
                for (auto& f : row) maxdeg = std::max(maxdeg, f.deg());
            std::vector<PxMat> delta(maxdeg + 1, PxMat(cfg.dim, cfg.dim, Px::zero(k)));
            for (int i = 0; i < cfg.dim; ++i)
                for (int j = 0; j < cfg.dim; ++j)
                    for (int l = 0; l <= maxdeg; ++l) delta[l].at(i, j) = cfg.module_rows[i][j].coeff(l);
            o.E = AndersonModule::make(k, cfg.dim, std::move(delta));
            o.M = motive_of(*o.E, cfg.work);
            o.Md = dual_motive_of(*o.E, cfg.work);
            break;
        }
        case ObjectKind::AMotiveBlock: {
            size_t r = cfg.motive_rows.size();
            TPolyMat phi(r, r, TPoly::zero(k));
            for (size_t i = 0; i < r; ++i) {
                if (cfg.motive_rows[i].size() != r) throw ValidationError("a-motive rows must be square");
                for (size_t j = 0; j < r; ++j) phi.at(i, j) = cfg.motive_rows[i][j];
            }
            o.M = make_amotive(std::move(phi), cfg.jshift, cfg.work);
            break;
        }
        case ObjectKind::DualAMotiveBlock: {
            size_t r = cfg.motive_rows.size();
            TPolyMat phi(r, r, TPoly::zero(k));
            for (size_t i = 0; i < r; ++i)
                for (size_t j = 0; j < r; ++j) phi.at(i, j) = cfg.motive_rows[i][j];
            o.Md = make_dual_amotive(std::move(phi), cfg.jshift, cfg.work);
            break;
        }
        case ObjectKind::HodgePinkBlock: {
            size_t r = cfg.u_rows.size();
            HPStructure H;
            H.U = LSMat(r, r, LS::zero(k, LVar::u, cfg.work.u_order));
            for (size_t i = 0; i < r; ++i)
                for (size_t j = 0; j < r; ++j) H.U.at(i, j) = cfg.u_rows[i][j];
            if (cfg.hp_weights_decl.size() == r)
                H.wt = cfg.hp_weights_decl;
            else if (cfg.flag_given) {
                H.wt.assign(r, Rat(0));
                int prev = 0;
                for (auto& st : cfg.flag) {
                    for (int i = prev; i < st.cols; ++i) H.wt[i] = st.mu;
                    prev = st.cols;
                }
            } else {
                H.wt.assign(r, Rat(0));
            }
            o.H_direct = std::move(H);
            break;
        }
    }
    return o;
}

std::vector<FlagStep> default_flag(const AMotive& M, const Objects& o, const Work& w) {
    if (o.flag_given) return o.flag;
    SlopeResult sl = isocrystal_slopes(M, w);
    if (sl.pure) return {{sl.weight, M.rank()}};
    throw ValidationError("a weight filtration (weights = mu:cols, ...) is required for mixed input");
}

std::vector<Fq> parse_a_polynomial(const FieldCtx& k, const std::string& s) {
    // accepts sums of t^i terms with F_q coefficients, e.g. "t^2+t" or "t^2+g1^1*t+1"
    std::vector<Fq> out;
    size_t i = 0;
    auto fail = [&]() { throw ValidationError("cannot parse torsion polynomial '" + s + "'"); };
    int sign_mult = 1;
    while (i < s.size()) {
        if (s[i] == '+') {
            ++i;
            continue;
        }
        if (s[i] == '-') {
            sign_mult = -1;
            ++i;
            continue;
        }
        Fq coeff = Fq::one(k.p);
        if (s[i] == 'g') {
            size_t caret = s.find('^', i);
            if (caret == std::string::npos) fail();
            size_t end = caret + 1;
            while (end < s.size() && isdigit((unsigned char)s[end])) ++end;
            auto c = Fq::parse(k.p, s.substr(i, end - i));
            if (!c) fail();
            coeff = *c;
            i = end;
            if (i < s.size() && s[i] == '*') ++i;
        } else if (isdigit((unsigned char)s[i])) {
            long long v = 0;
            while (i < s.size() && isdigit((unsigned char)s[i])) v = v * 10 + (s[i++] - '0');
            coeff = Fq::from_int(k.p, v);
            if (i < s.size() && s[i] == '*') ++i;
        }
        int deg = 0;
        if (i < s.size() && s[i] == 't') {
            ++i;
            deg = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                deg = 0;
                while (i < s.size() && isdigit((unsigned char)s[i])) deg = deg * 10 + (s[i++] - '0');
            }
        }
        if (sign_mult < 0) coeff = -coeff;
        sign_mult = 1;
        if ((int)out.size() <= deg) out.resize(deg + 1, Fq::zero(k.p));
        out[deg] = out[deg] + coeff;
    }
    if (out.empty()) fail();
    return out;
}

bool is_carlitz(const AndersonModule& E) {
    if (!E.is_drinfeld() || E.tau_deg() != 1) return false;
    return agree_at_precision(E.delta(1).at(0, 0), Px::from_int(E.ctx(), 1)) &&
           agree_at_precision(E.delta(0).at(0, 0), Px::theta(E.ctx()));
}

void task_analyze(const Objects& o, const Work& w, Report& rep) {
    ReportSection sec{"analyze", {}};
    if (o.M) {
        sec.kv.push_back({"rank", std::to_string(o.M->rank())});
        sec.kv.push_back({"dim", std::to_string(o.M->dim())});
        SlopeResult sl = isocrystal_slopes(*o.M, w);
        Polygon P;
        for (auto& [s, m] : sl.slopes) P.slopes.push_back({s, m});
        sec.kv.push_back({"slopes", P.str()});
        sec.kv.push_back({"pure", yn(sl.pure)});
        if (sl.pure) sec.kv.push_back({"weight", to_string(sl.weight)});
        sec.kv.push_back({"slope_iterations", std::to_string(sl.iterations)});
        sec.kv.push_back({"slope_stabilized", yn(sl.stabilized)});
    } else if (o.H_direct) {
        sec.kv.push_back({"rank", std::to_string(o.H_direct->rank())});
    } else if (o.Md) {
        sec.kv.push_back({"rank", std::to_string(o.Md->rank())});
        sec.kv.push_back({"dim", std::to_string(o.Md->dim())});
    }
    rep.sections.push_back(std::move(sec));
}

void task_trivialize(const Objects& o, const Work& w, Report& rep) {
    if (!o.M) throw ValidationError("trivialize needs a motive or module input");
    ReportSection sec{"trivialize", {}};
    Trivialization t = rigid_trivialization(*o.M, w);
    sec.kv.push_back({"residual", residual_summary(t.residual)});
    sec.kv.push_back({"tate_witness_s", to_string(t.s_witness)});
    if (o.E && o.E->is_drinfeld()) {
        PxMat X = xi_matrix(*o.E, w);
        DualAMotive Md = *o.Md;
        DualTrivialization dt = dual_trivialization_companion(Md, t, X, w);
        sec.kv.push_back({"dual_residual", residual_summary(dt.residual)});
        // dual-basis convention identity
        DualAMotive Mdb;
        Mdb.phi = o.M->phi.transposed();
        Mdb.jshift = o.M->jshift;
        Mdb.dj = o.M->dj;
        DualTrivialization db = dual_trivialization(Mdb, t, w);
        TSMat prod = ts_mat_mul(t.psi, ts_sigma_check(db.psi_check));
        TSMat idm = ts_identity(o.M->ctx(), prod.a[0].order(), o.M->rank());
        sec.kv.push_back({"psi_psicheck_identity", residual_summary(mat_sub(prod, idm))});
    } else if (o.Md || o.M) {
        DualAMotive Mdb;
        Mdb.phi = o.M->phi.transposed();
        Mdb.jshift = o.M->jshift;
        Mdb.dj = o.M->dj;
        DualTrivialization db = dual_trivialization(Mdb, t, w);
        sec.kv.push_back({"dual_residual", residual_summary(db.residual)});
        TSMat prod = ts_mat_mul(t.psi, ts_sigma_check(db.psi_check));
        TSMat idm = ts_identity(o.M->ctx(), prod.a[0].order(), o.M->rank());
        sec.kv.push_back({"psi_psicheck_identity", residual_summary(mat_sub(prod, idm))});
    }
    rep.sections.push_back(std::move(sec));
}

void task_period(const Objects& o, const Work& w, Report& rep) {
    if (!o.E) throw ValidationError("period needs an anderson-module input");
    ReportSection sec{"period", {}};
    const FieldCtx& k = o.E->ctx();
    if (is_carlitz(*o.E)) {
        CarlitzPeriod cp = carlitz_period(k, w);
        sec.kv.push_back({"eta", cp.eta.str()});
        sec.kv.push_back({"product_truncation_K", std::to_string(cp.K)});
        sec.kv.push_back({"value", cp.value.str()});
        sec.kv.push_back({"lattice_generator", cp.generator.str()});
        ExpCoeffs ec = exp_coefficients(*o.E, 10, w);
        PxMat img = eval_exp(*o.E, ec, PxMat(1, 1, cp.generator), w);
        sec.kv.push_back({"exp_of_period", img.at(0, 0).str()});
        sec.kv.push_back({"exp_of_period_zero", yn(!img.at(0, 0).has_terms())});
        Px bdr = carlitz_betti_de_rham_value(k, w);
        sec.kv.push_back({"betti_de_rham_value", bdr.str()});
        Px prod = bdr * cp.value;
        sec.kv.push_back({"value_times_betti_de_rham_is_one", yn(agree_at_precision(prod, Px::from_int(k, 1)))});
    }
    AMotive M = *o.M;
    Trivialization t = rigid_trivialization(M, w);
    LatticeResult lat = drinfeld_lattice(*o.E, t, w);
    for (size_t j = 0; j < lat.basis.cols; ++j) {
        sec.kv.push_back({"lattice_basis_" + std::to_string(j + 1), lat.basis.at(0, j).str()});
        sec.kv.push_back({"exp_zero_certificate_" + std::to_string(j + 1), yn(lat.exp_zero_certificate[j])});
    }
    sec.kv.push_back({"discreteness_certificate", yn(lat.discreteness_certificate)});
    rep.sections.push_back(std::move(sec));
}

void task_hodge_pink(const Objects& o, const Work& w, Report& rep) {
    ReportSection sec{"hodge-pink", {}};
    HPStructure H;
    if (o.H_direct) {
        H = *o.H_direct;
    } else if (o.M) {
        Trivialization t = rigid_trivialization(*o.M, w);
        H = hp_of_motive(*o.M, t, default_flag(*o.M, o, w), w);
    } else {
        throw ValidationError("hodge-pink needs a motive, module or hodge-pink input");
    }
    auto wts = hp_weights(H, w);
    std::ostringstream os;
    for (size_t i = 0; i < wts.size(); ++i) os << (i ? "," : "") << wts[i];
    sec.kv.push_back({"hp_weights", "(" + os.str() + ")"});
    auto dims = hp_filtration_dims(H, w);
    std::ostringstream fd;
    for (auto& [i, d] : dims) fd << "F^" << i << ":" << d << " ";
    sec.kv.push_back({"filtration_dims", fd.str()});
    sec.kv.push_back({"deg_q", std::to_string(hp_total_degree(H, w))});
    SemistabilityReport ss = degrees_and_semistability(H, {}, w);
    for (auto& c : ss.checks)
        sec.kv.push_back({"subspace_" + c.label,
                          "deg_q=" + std::to_string(c.deg_q) + " deg_w=" + to_string(c.deg_w) +
                              (c.equality ? " equal" : (c.ok ? " strict" : " VIOLATION"))});
    sec.kv.push_back({"consistent_with_semistability", yn(ss.consistent && ss.filtration_equalities)});
    rep.sections.push_back(std::move(sec));
}

void task_polygons(const Objects& o, const Work& w, Report& rep) {
    ReportSection sec{"polygons", {}};
    if (o.H_direct) {
        PolygonReport pr = polygons_compare(*o.H_direct, w);
        sec.kv.push_back({"HP", pr.HP.str()});
        sec.kv.push_back({"WP", pr.WP.str()});
        sec.kv.push_back({"wp_above_hp", yn(pr.wp_above_hp)});
        sec.kv.push_back({"endpoints_equal", yn(pr.endpoints_equal)});
    } else if (o.M) {
        Trivialization t = rigid_trivialization(*o.M, w);
        HPStructure H = hp_of_motive(*o.M, t, default_flag(*o.M, o, w), w);
        try {
            PolygonChain pc = sp_polygon_chain(*o.M, t, H, w);
            sec.kv.push_back({"SP", pc.SP.str()});
            sec.kv.push_back({"WP", pc.WP.str()});
            sec.kv.push_back({"HP", pc.HP.str()});
            sec.kv.push_back({"sp_above_wp", yn(pc.sp_above_wp)});
            sec.kv.push_back({"wp_above_hp", yn(pc.wp_above_hp)});
            sec.kv.push_back({"endpoints_equal", yn(pc.endpoints_equal)});
        } catch (const TypeUnknown&) {
            PolygonReport pr = polygons_compare(H, w);
            sec.kv.push_back({"SP", "unknown"});
            sec.kv.push_back({"HP", pr.HP.str()});
            sec.kv.push_back({"WP", pr.WP.str()});
            sec.kv.push_back({"wp_above_hp", yn(pr.wp_above_hp)});
            sec.kv.push_back({"endpoints_equal", yn(pr.endpoints_equal)});
        }
    } else {
        throw ValidationError("polygons needs a motive, module or hodge-pink input");
    }
    rep.sections.push_back(std::move(sec));
}

void task_torsion(const Objects& o, const Work& w, Report& rep, const std::string& arg) {
    if (!o.E) throw ValidationError("torsion needs an anderson-module input");
    ReportSection sec{"torsion", {}};
    auto a = parse_a_polynomial(o.E->ctx(), arg);
    TorsionResult tr = torsion_points(*o.E, a, w);
    sec.kv.push_back({"a", arg});
    sec.kv.push_back({"points", std::to_string(tr.points.size())});
    sec.kv.push_back({"structure_free_of_rank_r", yn(tr.structure_verified)});
    for (size_t i = 0; i < tr.module_basis.size(); ++i)
        sec.kv.push_back({"module_basis_" + std::to_string(i + 1), tr.module_basis[i].str()});
    rep.sections.push_back(std::move(sec));
}

void task_sigma(const Objects& o, const Work& w, Report& rep) {
    if (!o.M) throw ValidationError("sigma needs a motive or module input");
    ReportSection sec{"sigma", {}};
    PairDegrees pd = pair_degrees(*o.M, w);
    sec.kv.push_back({"deg_E", std::to_string(pd.deg_e)});
    sec.kv.push_back({"deg_F", std::to_string(pd.deg_f)});
    Trivialization t = rigid_trivialization(*o.M, w);
    if (pd.type) {
        sec.kv.push_back({"type", pd.type->str()});
        sec.kv.push_back({"type_source", "pure isocrystal classification; degree verified"});
    } else {
        SplitResult sr = rank2_split(*o.M, t, w);
        sec.kv.push_back({"split",
                          sr.verdict == SplitResult::Verdict::Split      ? "split"
                          : sr.verdict == SplitResult::Verdict::NonSplit ? "non-split"
                                                                         : "undecided"});
        if (sr.verdict != SplitResult::Verdict::Undecided) sec.kv.push_back({"type", sr.type.str()});
        sec.kv.push_back({"vanishing_order", std::to_string(sr.ord_f)});
        sec.kv.push_back({"b_divisible_by_t_minus_theta", yn(sr.b_divisible)});
        sec.kv.push_back({"certificate_precision", to_string(sr.certificate_prec)});
        GaloisLabel gl = galois_label(*o.M, t, w);
        sec.kv.push_back({"galois_label", gl.label});
        sec.kv.push_back({"galois_note", gl.note});
    }
    HPStructure H = hp_of_motive(*o.M, t, default_flag(*o.M, o, w), w);
    ImageCriterionReport ic = image_criterion(H, w);
    sec.kv.push_back({"image_criterion", ic.holds ? (ic.complete ? "holds" : "holds-where-computable") : "fails"});
    rep.sections.push_back(std::move(sec));
}

void task_xi(const Objects& o, const Work& w, Report& rep) {
    if (!o.E) throw ValidationError("xi needs an anderson-module input");
    ReportSection sec{"xi", {}};
    PxMat X = xi_matrix(*o.E, w);
    for (size_t i = 0; i < X.rows; ++i) {
        std::ostringstream os;
        os << "[";
        for (size_t j = 0; j < X.cols; ++j) os << (j ? ", " : "") << X.at(i, j).str();
        os << "]";
        sec.kv.push_back({"X_row_" + std::to_string(i + 1), os.str()});
    }
    bool ok = xi_relation_holds(*o.E, *o.M, *o.Md, X);
    sec.kv.push_back({"relation_exact", yn(ok)});
    rep.sections.push_back(std::move(sec));
}

void task_compat(const Objects& o, const Work& w, Report& rep) {
    if (!o.E) throw ValidationError("compat needs an anderson-module input");
    ReportSection sec{"compat", {}};
    CompatReport cr = compatibility_checks(*o.E, w);
    sec.kv.push_back({"lattice_vs_dual_motive", yn(cr.h1e_vs_dual)});
    sec.kv.push_back({"lattice_vs_twisted_motive", yn(cr.h1e_vs_motive)});
    sec.kv.push_back({"square_commutes", yn(cr.square_commutes)});
    rep.sections.push_back(std::move(sec));
}

}  // namespace

Report run_config(const ProblemConfig& cfg, const std::string& only_task) {
    Report rep;
    rep.version = kVersion;
    rep.config_hash = cfg.source_hash;
    {
        std::ostringstream os;
        os << "zeta=" << to_string(cfg.work.zeta_prec) << " t_order=" << cfg.work.t_order
           << " u_order=" << cfg.work.u_order;
        rep.precision_summary = os.str();
    }
    Objects o = build_objects(cfg);
    for (auto& task : cfg.tasks) {
        std::string name = task.substr(0, task.find(' '));
        if (!only_task.empty() && name != only_task) continue;
        if (name == "analyze")
            task_analyze(o, cfg.work, rep);
        else if (name == "trivialize")
            task_trivialize(o, cfg.work, rep);
        else if (name == "period")
            task_period(o, cfg.work, rep);
        else if (name == "hodge-pink")
            task_hodge_pink(o, cfg.work, rep);
        else if (name == "polygons")
            task_polygons(o, cfg.work, rep);
        else if (name == "torsion")
            task_torsion(o, cfg.work, rep, task.substr(task.find("a=") + 2));
        else if (name == "sigma")
            task_sigma(o, cfg.work, rep);
        else if (name == "xi")
            task_xi(o, cfg.work, rep);
        else if (name == "compat")
            task_compat(o, cfg.work, rep);
        else
            throw ValidationError("unknown task '" + name + "'");
    }
    return rep;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        std::cout << "usage: tmot run <config-file> [--task <name>] [--format text|machine]\n"
                     "            [--precision-override k=v]...\n"
                     "tasks: analyze trivialize period hodge-pink polygons torsion sigma xi compat\n";
        return args.empty() ? 2 : 0;
    }
    if (args[0] != "run" || args.size() < 2) {
        std::cerr << "error: expected 'run <config-file>'\n";
        return 2;
    }
    std::string path = args[1];
    std::string only_task, format = "text";
    std::vector<std::pair<std::string, std::string>> overrides;
    for (size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--task" && i + 1 < args.size())
            only_task = args[++i];
        else if (args[i] == "--format" && i + 1 < args.size())
            format = args[++i];
        else if (args[i] == "--precision-override" && i + 1 < args.size()) {
            std::string kv = args[++i];
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::cerr << "error: --precision-override expects k=v\n";
                return 2;
            }
            overrides.push_back({kv.substr(0, eq), kv.substr(eq + 1)});
        } else {
            std::cerr << "error: unknown option '" << args[i] << "'\n";
            return 2;
        }
    }
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        ProblemConfig cfg = parse_config(buf.str());
        for (auto& [k, v] : overrides) {
            if (k == "zeta")
                cfg.work.zeta_prec = Rat(std::stoll(v));
            else if (k == "t_order")
                cfg.work.t_order = std::stoi(v);
            else if (k == "u_order")
                cfg.work.u_order = std::stoi(v);
            else {
                std::cerr << "error: unknown precision key '" << k << "'\n";
                return 2;
            }
        }
        Report rep = run_config(cfg, only_task);
        if (format == "machine")
            rep.emit_machine(std::cout);
        else
            rep.emit_text(std::cout);
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tmot
