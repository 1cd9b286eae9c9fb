#include "gravistate/certify.hpp"

#include <chrono>
#include <limits>
#include <random>

#include "gravistate/parallel.hpp"

namespace grav {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double rel(const Mat& a, const Mat& b) { return max_abs(a - b) / std::max({1.0, max_abs(a), max_abs(b)}); }

Mat random_mat(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> N;
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cd(N(rng), N(rng));
    return m;
}

double max_of(const std::vector<double>& v) {
    double r = 0;
    for (double x : v) r = std::max(r, x);
    return r;
}

// p^4 with p = (t - ta)(tb - t), scaled to max 1
struct Bump {
    double ta, tb, norm;
    Bump(double a, double b) : ta(a), tb(b), norm(std::pow(0.25 * (b - a) * (b - a), 4)) {}
    double operator()(double t) const {
        if (t <= ta || t >= tb) return 0;
        return std::pow((t - ta) * (tb - t), 4) / norm;
    }
    double dd(double t) const {
        if (t <= ta || t >= tb) return 0;
        const double p = (t - ta) * (tb - t), dp = ta + tb - 2 * t;
        return (12 * p * p * dp * dp - 8 * p * p * p) / norm;
    }
};

double wrong_frequency(const Mat& T, const ModeProjectors& p2, const Eigen::Vector3d& kv) {
    return std::max(weighted_norm0(p2.cp * T * p2.cm, kv, 2), weighted_norm0(p2.cm * T * p2.cp, kv, 2));
}

}  // namespace

// ---------------------------------------------------------------- Pipeline

Pipeline::Pipeline(RunConfig cfg)
    : cfg_(std::move(cfg)), metric_((cfg_.validate(), cfg_.make_metric())), modes_(cfg_.kmax) {}

Pipeline::~Pipeline() = default;

const ReducedModel& Pipeline::model() {
    if (!model_) {
        const auto t0 = Clock::now();
        model_ = std::make_unique<ReducedModel>(metric_);
        add_timing("model", seconds_since(t0));
    }
    return *model_;
}

const HadamardFamily& Pipeline::hadamard() {
    if (!H_) {
        const ReducedModel& M = model();
        const auto t0 = Clock::now();
        HadamardOptions o;
        o.R = cfg_.R;
        o.adiabatic_order = cfg_.adiabatic_order;
        o.jobs = cfg_.jobs;
        H_ = std::make_unique<HadamardFamily>(M, modes_, o);
        add_timing("hadamard", seconds_since(t0));
    }
    return *H_;
}

const GaugeFamily& Pipeline::gauge() {
    if (!G_) {
        const HadamardFamily& H = hadamard();
        const auto t0 = Clock::now();
        G_ = std::make_unique<GaugeFamily>(H, GaugeOptions{cfg_.sing_tol, cfg_.jobs});
        add_timing("gauge", seconds_since(t0));
    }
    return *G_;
}

const CovariancePair& Pipeline::covariances() {
    if (!C_) {
        const GaugeFamily& G = gauge();
        const auto t0 = Clock::now();
        C_ = std::make_unique<CovariancePair>(G, cfg_.jobs, cfg_.nu_drop_tol);
        add_timing("covariances", seconds_since(t0));
    }
    return *C_;
}

nlohmann::ordered_json Pipeline::geometry_echo() {
    nlohmann::ordered_json g;
    g["kind"] = cfg_.geometry;
    g["name"] = metric_.name();
    g["lambda"] = metric_.lambda();
    if (metric_.kind() == MetricKind::Kasner) {
        g["p"] = metric_.kasner_exponents();
        g["t0"] = metric_.t0();
    }
    g["interval"] = {metric_.interval().lo, metric_.interval().hi};
    g["modes"] = modes_.size();
    if (H_) {
        g["R_requested"] = H_->R_requested();
        g["R"] = H_->R();
    }
    return g;
}

// ---------------------------------------------------------------- mode samples

std::vector<std::size_t> sample_modes(const ModeBasis& B) {
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < B.size(); ++i) {
        const auto& n = B[i];
        if (std::max({std::abs(n[0]), std::abs(n[1]), std::abs(n[2])}) <= 1) r.push_back(i);
    }
    const int K = B.kmax();
    for (const IVec3& n : {IVec3{K, 0, 0}, IVec3{0, -K, 1}, IVec3{1, 2 % (K + 1), -K}, IVec3{K, K, -K}}) {
        const std::size_t i = B.index_of(n);
        if (std::find(r.begin(), r.end(), i) == r.end()) r.push_back(i);
    }
    return r;
}

// ---------------------------------------------------------------- geometry and field operators

Condition einstein_condition(const SpacetimeMetric& metric) {
    const auto e = check_einstein(metric);
    return Condition::check("einstein", "Ric = Lambda g on the sampled interval", e.max_residual, "le", 1e-12);
}

std::vector<Condition> identity_conditions(const SpacetimeMetric& metric, const ModeBasis& B, int jobs,
                                           bool with_control) {
    struct R {
        double KstarK = 0, PKK = 0, PK = 0, D2d = 0, dD2 = 0, I2 = 0, Rg = 0, Rsa = 0;
    };
    const auto idx = sample_modes(B);
    const auto& I = metric.interval();
    const std::array<double, 3> times = {0.6 * I.lo, 0.0, 0.8 * I.hi};
    const auto res = parallel_map<R>(idx.size() * times.size(), jobs, [&](std::size_t j) {
        const double s = times[j % times.size()];
        const FieldOps ops(metric, s, B.wavevector(idx[j / times.size()]));
        R r;
        const DiffOp K = ops.K(), Ks = ops.Kstar(), P = ops.P(), D1 = ops.D(1), D2 = ops.D(2);
        r.KstarK = op_residual(Ks * K, D1);
        r.PKK = op_residual(P + K * Ks, D2);
        r.PK = op_residual(P * K, DiffOp(10, 4, 1));
        r.D2d = op_residual(D2 * ops.d(1), ops.d(1) * D1);
        r.dD2 = op_residual(ops.delta(2) * D2, D1 * ops.delta(2));
        const Mat Iop = ops.I().coef(0)[0];
        r.I2 = rel(Iop * Iop, Mat::Identity(10, 10));
        const auto cp = build_curvature(metric, s, 3);
        const Mat Rm = riem_op_jet(cp)[0];
        r.Rg = rel(Rm * metric_fiber(cp.g[0]), -metric_fiber(cp.ricci[0]));
        const Mat G = gram_raw(2, cp.ginv[0]);
        r.Rsa = rel(G * Rm, Rm.adjoint() * G);
        return r;
    });
    R w;
    for (const auto& r : res) {
        w.KstarK = std::max(w.KstarK, r.KstarK);
        w.PKK = std::max(w.PKK, r.PKK);
        w.PK = std::max(w.PK, r.PK);
        w.D2d = std::max(w.D2d, r.D2d);
        w.dD2 = std::max(w.dD2, r.dD2);
        w.I2 = std::max(w.I2, r.I2);
        w.Rg = std::max(w.Rg, r.Rg);
        w.Rsa = std::max(w.Rsa, r.Rsa);
    }
    std::vector<Condition> c = {
        Condition::check("identity_KstarK", "K* K = D1", w.KstarK, "lt", 1e-9),
        Condition::check("identity_P_KKstar", "P + K K* = D2", w.PKK, "lt", 1e-9),
        Condition::check("identity_PK", "P K = 0", w.PK, "lt", 1e-9),
        Condition::check("identity_D2_d", "D2 d = d D1", w.D2d, "lt", 1e-9),
        Condition::check("identity_delta_D2", "delta D2 = D1 delta", w.dD2, "lt", 1e-9),
        Condition::check("identity_I2", "I^2 = 1", w.I2, "lt", 1e-9),
        Condition::check("identity_Riem_g", "Riem g = -Ric", w.Rg, "lt", 1e-9),
        Condition::check("identity_Riem_selfadjoint", "Riem = Riem*", w.Rsa, "lt", 1e-9),
    };
    if (with_control) {
        const FieldOps ops(SpacetimeMetric::custom_sin(), 0.0, {1, 2, 0});
        const DiffOp K = ops.K(), D1 = ops.D(1), D2 = ops.D(2);
        const double v = std::min({op_residual(ops.P() * K, DiffOp(10, 4, 1)),
                                   op_residual(D2 * ops.d(1), ops.d(1) * D1),
                                   op_residual(ops.delta(2) * D2, D1 * ops.delta(2))});
        c.push_back(Condition::check("identity_non_einstein_control",
                                     "non-Einstein control violates P K = 0, D2 d = d D1, delta D2 = D1 delta", v,
                                     "gt", 1e-3));
    }
    return c;
}

// ---------------------------------------------------------------- Cauchy layer

double green_identity_defect(const ReducedModel& M, const Eigen::Vector3d& kv, unsigned seed) {
    std::mt19937_64 rng(seed);
    const ModeDynamics dyn(M, 2, kv);
    const auto& I = M.metric().interval();
    const double ta = 0.6 * I.lo, tb = 0.7 * I.hi;
    const Bump w(ta, tb);
    const Mat A = random_mat(rng, 10, 1), Bv = random_mat(rng, 10, 1);
    auto phi = [&](double t) -> Mat { return w(t) * (A + t * Bv); };
    const Mat f = dyn.causal_data(phi, ta, tb);
    const Mat tau2 = tau(2);
    cd acc = 0;
    const int N = 64;
    Mat u0 = dyn.evolve(f, 0.0, ta);
    for (int i = 0; i < N; ++i) {
        const double x0 = ta + (tb - ta) * i / N, x1 = ta + (tb - ta) * (i + 1) / N, xm = 0.5 * (x0 + x1);
        const Mat um = dyn.evolve(u0, x0, xm), u1 = dyn.evolve(um, xm, x1);
        acc += (x1 - x0) / 6 *
               ((phi(x0).adjoint() * tau2 * u0.topRows(10))(0) + 4.0 * (phi(xm).adjoint() * tau2 * um.topRows(10))(0) +
                (phi(x1).adjoint() * tau2 * u1.topRows(10))(0));
        u0 = u1;
    }
    const cd lhs = cd(0, 1) * acc;
    const cd rhs = (f.adjoint() * ReducedModel::q(2) * f)(0);
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

std::vector<Condition> cauchy_conditions(const ReducedModel& M, const ModeBasis& B, int jobs) {
    const auto idx = sample_modes(B);
    const auto& I = M.metric().interval();
    const auto charge = parallel_map<double>(idx.size(), jobs, [&](std::size_t j) {
        std::mt19937_64 rng(1000 + idx[j]);
        double worst = 0;
        for (int k = 1; k <= 2; ++k) {
            const ModeDynamics dyn(M, k, B.wavevector(idx[j]));
            const int n = fiber_dim(k);
            const Mat q = ReducedModel::q(k), f = random_mat(rng, 2 * n, 2);
            const Mat Q0 = f.adjoint() * q * f;
            for (double s : {I.lo, I.hi}) {
                const Mat g = dyn.evolve(f, 0.0, s);
                worst = std::max(worst, max_abs(g.adjoint() * q * g - Q0) / max_abs(Q0));
            }
        }
        return worst;
    });
    struct KR {
        double kk = 0, adj = 0;
    };
    const Mat qI = M.q_I2(), q1 = ReducedModel::q(1);
    const auto kres = parallel_map<KR>(B.size(), jobs, [&](std::size_t m) {
        std::mt19937_64 rng(2000 + m);
        const Eigen::Vector3d kv = B.wavevector(m);
        const Mat Ks = M.K_sigma(kv), Kd = M.K_sigma_dagger(kv);
        KR r;
        r.kk = max_abs(Kd * Ks) / std::max(1.0, Kd.norm() * Ks.norm());
        const Mat f1 = random_mat(rng, 8, 2), f2 = random_mat(rng, 20, 2);
        const Mat lhs = (Kd * f2).adjoint() * q1 * f1, rhs = f2.adjoint() * qI * Ks * f1;
        r.adj = rel(lhs, rhs);
        return r;
    });
    double kk = 0, adj = 0;
    for (const auto& r : kres) {
        kk = std::max(kk, r.kk);
        adj = std::max(adj, r.adj);
    }
    const Eigen::Vector3d kg = B.wavevector(B.index_of({1, 1, -1}));
    return {
        Condition::check("charge_conservation", "|Q(f(s)) - Q(f(0))| / |Q| over the interval", max_of(charge), "lt", 1e-9),
        Condition::check("KdaggerK", "K_Sigma^dagger K_Sigma = 0", kk, "lt", 1e-9),
        Condition::check("Kdagger_adjoint", "(K^dagger f2) q1 f1 = f2 q_I2 K f1", adj, "lt", 1e-9),
        Condition::check("green_identity", "i (phi | G phi) = (rho G phi) q (rho G phi)",
                         green_identity_defect(M, kg, 3000), "lt", 1e-8),
    };
}

// ---------------------------------------------------------------- Hadamard projectors

std::vector<Condition> projector_conditions(const HadamardFamily& H, int jobs) {
    struct PR {
        double sum = 0, idem = 0, qsa = 0, pos = 0, e05 = 0, Icomm = 0, qI = 0;
    };
    const ReducedModel& M = H.model();
    const Mat Is = M.I_sigma(), qI = M.q_I2();
    const auto res = parallel_map<PR>(H.modes().size(), jobs, [&](std::size_t i) {
        PR r;
        for (int k = 1; k <= 2; ++k) {
            const auto p = H.projectors(k, i);
            const int n = fiber_dim(k);
            const Mat q = ReducedModel::q(k), qt = ReducedModel::q_tilde(n);
            r.sum = std::max(r.sum, rel(p.cp + p.cm, Mat::Identity(2 * n, 2 * n)));
            for (const auto& [c, sg] : {std::pair{&p.cp, 1.0}, std::pair{&p.cm, -1.0}}) {
                r.idem = std::max(r.idem, rel(*c * *c, *c));
                r.qsa = std::max(r.qsa, rel(q * *c, c->adjoint() * q));
                const Mat E = sg * c->adjoint() * qt * *c;
                const Mat Eh = 0.5 * (E + E.adjoint());
                r.pos = std::min(r.pos, Eigen::SelfAdjointEigenSolver<Mat>(Eh, Eigen::EigenvaluesOnly).eigenvalues()(0) /
                                            std::max(1.0, Eh.norm()));
            }
            r.e05 = std::max(r.e05, rel(p.cp.bottomRows(n), p.bp * p.cp.topRows(n)));
            r.e05 = std::max(r.e05, rel(p.cm.bottomRows(n), p.bm * p.cm.topRows(n)));
            if (k == 2) {
                r.Icomm = std::max({r.Icomm, rel(Is * p.cp, p.cp * Is), rel(Is * p.cm, p.cm * Is)});
                r.qI = std::max(r.qI, rel(qI * p.cp, p.cp.adjoint() * qI));
            }
        }
        return r;
    });
    PR w;
    for (const auto& r : res) {
        w.sum = std::max(w.sum, r.sum);
        w.idem = std::max(w.idem, r.idem);
        w.qsa = std::max(w.qsa, r.qsa);
        w.pos = std::min(w.pos, r.pos);
        w.e05 = std::max(w.e05, r.e05);
        w.Icomm = std::max(w.Icomm, r.Icomm);
        w.qI = std::max(w.qI, r.qI);
    }
    return {
        Condition::info("cutoff_R", "cutoff R after auto-raise", H.R()),
        Condition::check("b_margin", "min eigenvalue of Re b over modes |k| > R", H.re_margin(), "gt", 0.0),
        Condition::check("projector_sum", "c+ + c- = 1", w.sum, "lt", 1e-14),
        Condition::check("projector_idempotent", "c+-^2 = c+-", w.idem, "lt", 1e-11),
        Condition::check("projector_q_selfadjoint", "q c+- = c+-* q", w.qsa, "lt", 1e-11),
        Condition::check("projector_positivity", "min eigenvalue of +-c+-* q~ c+-", w.pos, "ge", -1e-11),
        Condition::check("projector_graph", "pi1 c+- = b+- pi0 c+-", w.e05, "lt", 1e-12),
        Condition::check("projector_I_commute", "[I_Sigma, c2+-] = 0", w.Icomm, "lt", 1e-12),
        Condition::check("projector_qI_selfadjoint", "q_I2 c2+- = c2+-* q_I2", w.qI, "lt", 1e-10),
    };
}

// ---------------------------------------------------------------- gauge layer

std::vector<Condition> gauge_conditions(const GaugeFamily& G, int jobs) {
    const HadamardFamily& H = G.hadamard();
    const Mat qI = H.model().q_I2();
    struct GR {
        double T2 = 0, TK = 0, RT = 0, KdT = 0, pi2T = 0, gram = 0, condF = 1, lower = 0;
        bool filler = false;
    };
    const auto res = parallel_map<GR>(G.size(), jobs, [&](std::size_t m) {
        std::mt19937_64 rng(4000 + m);
        const auto& g = G.mode(m);
        const auto& pr = G.projection(m);
        const Mat& T = pr.T;
        const double sc = std::max(1.0, max_abs(T));
        GR r;
        r.filler = H.modes().wavevector(m).norm() <= H.R();
        r.lower = g.lower_bound;
        r.T2 = max_abs(T * T - T) / sc;
        r.TK = max_abs(T * g.Ks * random_mat(rng, 8, 3)) / sc;
        r.RT = max_abs(g.Rs * T) / (std::max(1.0, max_abs(g.Rs)) * sc);
        const Mat N = null_space(g.Kd);
        r.KdT = max_abs(g.Kd * T * N) / (std::max(1.0, max_abs(g.Kd)) * sc);
        if (pr.singular) {
            r.pi2T = max_abs(pr.pi2 * T) / sc;
            const auto& F = pr.frame;
            if (F.n > 0) r.gram = max_abs(F.W.adjoint() * qI * F.V - Mat::Identity(F.n, F.n));
            r.condF = std::max(F.cond_A, F.cond_C);
        }
        return r;
    });
    GR w;
    w.lower = std::numeric_limits<double>::infinity();
    for (const auto& r : res) {
        w.T2 = std::max(w.T2, r.T2);
        w.TK = std::max(w.TK, r.TK);
        w.RT = std::max(w.RT, r.RT);
        w.KdT = std::max(w.KdT, r.KdT);
        w.pi2T = std::max(w.pi2T, r.pi2T);
        w.gram = std::max(w.gram, r.gram);
        w.condF = std::max(w.condF, r.condF);
        if (!r.filler) w.lower = std::min(w.lower, r.lower);
    }
    std::vector<Condition> c = {
        Condition::check("fredholm_index", "dim Ker RK - dim Coker RK", G.kernel_dim() - G.cokernel_dim(), "eq", 0.0),
        Condition::info("kernel_dim", "dim Ker R_Sigma K_Sigma", G.kernel_dim()),
        Condition::info("cokernel_dim", "n = dim Coker R_Sigma K_Sigma", G.n()),
        Condition::info("p", "p = number of v_j transverse to Ran K_Sigma", G.p()),
        Condition::info("singular_modes", "number of singular modes", static_cast<double>(G.singular_modes().size())),
        Condition::info("rk_lower_bound", "min over |k| > R of sigma_min(Bdiag) - |RK - Bdiag|",
                        std::isfinite(w.lower) ? w.lower : 0.0),
        Condition::check("dual_frame_gram", "w_i q_I2 v_j = delta_ij", w.gram, "lt", 1e-10),
        Condition::info("dual_frame_cond", "max condition number of the frame normalization blocks", w.condF),
        Condition::check("T_idempotent", "T^2 = T", w.T2, "lt", 1e-8),
        Condition::check("T_kills_gauge", "T K_Sigma = 0", w.TK, "lt", 1e-8),
        Condition::check("T_gauge_fixed", "R_Sigma T = 0", w.RT, "lt", 1e-8),
        Condition::check("T_preserves_constraints", "T Ker K^dagger in Ker K^dagger", w.KdT, "lt", 1e-8),
        Condition::check("T_pi2", "pi2 T = 0 on singular modes", w.pi2T, "lt", 1e-8),
    };
    if (H.model().metric().kind() == MetricKind::StaticFlat) {
        // the singular sector must be exactly the zero mode
        const auto sing = G.singular_modes();
        const std::size_t z = H.modes().index_of({0, 0, 0});
        double off = 0;
        for (auto m : sing) off += m != z;
        off += std::find(sing.begin(), sing.end(), z) == sing.end();
        c.push_back(Condition::check("flat_singular_sector", "singular modes other than k = 0, plus 1 if k = 0 is regular",
                                     off, "eq", 0.0));
    }
    return c;
}

// ---------------------------------------------------------------- smoothing surrogates

std::vector<double> remainder_norms(const HadamardFamily& H, int jobs) {
    return parallel_map<double>(H.modes().size(), jobs, [&](std::size_t m) {
        return weighted_norm(smoothing_remainder(H, m), H.modes().wavevector(m), 1, 2);
    });
}

std::vector<double> gauge_leakage_norms(const GaugeFamily& G, int jobs) {
    const HadamardFamily& H = G.hadamard();
    return parallel_map<double>(G.size(), jobs, [&](std::size_t m) {
        return wrong_frequency(G.projection(m).T, H.projectors(2, m), H.modes().wavevector(m));
    });
}

std::vector<double> covariance_leakage_norms(const CovariancePair& C, int jobs) {
    return parallel_map<double>(C.size(), jobs, [&](std::size_t m) { return covariance_leakage(C, m); });
}

std::vector<double> classical_leakage_norms(const HadamardFamily& H, int jobs) {
    return parallel_map<double>(H.modes().size(), jobs, [&](std::size_t m) {
        const Eigen::Vector3d kv = H.modes().wavevector(m);
        return wrong_frequency(classical_gauge(H.model(), kv).T, H.projectors(2, m), kv);
    });
}

std::vector<double> decay_norms(Pipeline& P, const std::string& quantity) {
    const int jobs = P.config().jobs;
    if (quantity == "remainder") return remainder_norms(P.hadamard(), jobs);
    if (quantity == "gauge") return gauge_leakage_norms(P.gauge(), jobs);
    if (quantity == "covariance") return covariance_leakage_norms(P.covariances(), jobs);
    if (quantity == "classical") return classical_leakage_norms(P.hadamard(), jobs);
    throw ConfigError("unknown decay quantity '" + quantity + "'");
}

std::vector<Condition> smoothing_conditions(Pipeline& P) {
    const auto& cfg = P.config();
    const HadamardFamily& H = P.hadamard();
    const auto include = split_modes(H);
    const bool flat = P.metric().kind() == MetricKind::StaticFlat;
    std::vector<Condition> c;
    struct Q {
        const char* key;
        const char* what;
    };
    for (const Q q : {Q{"remainder", "c2-+ K_Sigma c1+-"}, Q{"gauge", "c2+- T c2-+"}, Q{"covariance", "lambda+ c2-, lambda- c2+"}}) {
        const auto norms = decay_norms(P, q.key);
        const std::string name = std::string("smoothing_") + q.key;
        if (flat) {
            double worst = 0;
            for (std::size_t m = 0; m < norms.size(); ++m)
                if (include[m]) worst = std::max(worst, norms[m]);
            c.push_back(Condition::check(name + "_zero", std::string(q.what) + " vanishes for |k| > R", worst, "le", 1e-10));
        } else {
            const auto fit = decay_fit(P.modes(), norms, cfg.decay_from, cfg.kmax, include);
            const std::string prop = std::string("fitted decay exponent of ") + q.what + " over shells " +
                                     std::to_string(cfg.decay_from) + ".." + std::to_string(cfg.kmax);
            if (std::isnan(fit.exponent))
                c.push_back(Condition::info(name + "_exponent", prop + " (fewer than two shells)", fit.exponent));
            else
                c.push_back(Condition::check(name + "_exponent", prop, fit.exponent, "gt", cfg.decay_threshold));
        }
    }
    const auto cl = decay_fit(P.modes(), decay_norms(P, "classical"), cfg.decay_from, cfg.kmax, include);
    c.push_back(Condition::info("classical_control_exponent",
                                "decay exponent of c2+- T_cl c2-+ for the classical TT-synchronous gauge (expected <= 1)",
                                cl.exponent));
    return c;
}

// ---------------------------------------------------------------- covariances

double weak_field_defect(const CovariancePair& C, std::size_t m, unsigned seed) {
    std::mt19937_64 rng(seed);
    const HadamardFamily& H = C.gauge().hadamard();
    const ModeDynamics dyn(H.model(), 2, H.modes().wavevector(m));
    const auto& I = H.model().metric().interval();
    const double ta = 0.7 * I.lo, tb = 0.6 * I.hi;
    const Bump w(ta, tb);
    Mat c = random_mat(rng, 10, 1), e = random_mat(rng, 10, 1);
    c /= c.norm();
    e /= e.norm();
    auto Dw = [&](double t) -> Mat { return w.dd(t) * c + dyn.a(t) * (w(t) * c); };
    auto v = [&](double t) -> Mat { return w(t) * e; };
    double worst = 0;
    for (int sg : {+1, -1}) {
        worst = std::max(worst, std::abs(spacetime_two_point(C, m, sg, Dw, v, ta, tb)));
        worst = std::max(worst, std::abs(spacetime_two_point(C, m, sg, v, Dw, ta, tb)));
    }
    return worst;
}

std::vector<Condition> state_conditions(const CovariancePair& C, int jobs) {
    const GaugeFamily& G = C.gauge();
    const HadamardFamily& H = G.hadamard();
    const auto checks = parallel_map<ModeChecks>(C.size(), jobs, [&](std::size_t m) { return check_mode(C, m); });
    const double drop = 1e-12;
    const auto mismatch = parallel_map<int>(C.size(), jobs, [&](std::size_t m) {
        if (G.mode(m).singular) return 0;
        const auto a = build_mode_covariance(G, m, G.build_projection(m, false), drop);
        const auto b = build_mode_covariance(G, m, G.build_projection(m, true), drop);
        return (a.lp == b.lp && a.lm == b.lm) ? 0 : 1;
    });
    ModeChecks w;
    w.positivity = 0;
    int ker_min = 20, rank_excess = -20, bad_paths = 0;
    for (std::size_t m = 0; m < C.size(); ++m) {
        const auto& r = checks[m];
        w.ccr = std::max(w.ccr, r.ccr);
        w.gauge = std::max(w.gauge, r.gauge);
        w.positivity = std::min(w.positivity, r.positivity);
        w.hermiticity = std::max(w.hermiticity, r.hermiticity);
        w.consistency = std::max(w.consistency, r.consistency);
        w.nu_ran_k = std::max(w.nu_ran_k, r.nu_ran_k);
        ker_min = std::min(ker_min, r.ker_dim);
        if (C.mode(m).singular) rank_excess = std::max(rank_excess, r.nu_rank - 2 * G.projection(m).frame.p);
        bad_paths += mismatch[m];
    }
    // weak field equation on the zero mode and on the lowest non-filler mode
    std::vector<std::size_t> wf = {H.modes().index_of({0, 0, 0})};
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = H.modes().size();
    for (std::size_t m = 0; m < H.modes().size(); ++m) {
        const double k = H.modes().wavevector(m).norm();
        if (k > H.R() && k < best) best = k, pick = m;
    }
    if (pick < H.modes().size()) wf.push_back(pick);
    const auto wdef = parallel_map<double>(wf.size(), jobs, [&](std::size_t j) {
        return weak_field_defect(C, wf[j], 5000 + static_cast<unsigned>(wf[j]));
    });
    const std::size_t z = wf[0];
    auto zero = [](double) -> Mat { return Mat::Zero(10, 1); };
    auto bump = [](double t) -> Mat { return Mat::Constant(10, 1, std::max(0.0, 0.01 - t * t)); };
    const double zero_pair = std::abs(spacetime_two_point(C, z, 1, bump, zero, -0.1, 0.1));

    std::vector<Condition> c = {
        Condition::info("ker_kdagger_min_dim", "min per-mode dim Ker K_Sigma^dagger", ker_min),
        Condition::check("ccr", "lambda+ - lambda- = q_I2 on Ker K^dagger", w.ccr, "lt", 1e-9),
        Condition::check("gauge_invariance", "lambda+- (f, K_Sigma g) = 0 for f in Ker K^dagger", w.gauge, "lt", 1e-9),
        Condition::check("positivity", "min eigenvalue of lambda+- on Ker K^dagger", w.positivity, "ge", -1e-9),
        Condition::check("hermiticity", "lambda+- = lambda+-*", w.hermiticity, "lt", 1e-12),
        Condition::check("consistency", "T* q_I2 T = (1 - pi~)* q_I2 (1 - pi~) on Ker K^dagger", w.consistency, "lt", 1e-9),
        Condition::check("nu_on_ran_k", "nu = 0 on Ran K_Sigma", w.nu_ran_k, "lt", 1e-10),
        Condition::check("nu_rank", "rank nu - 2p (per singular mode, max)", rank_excess > -20 ? rank_excess : 0, "le", 0.0),
        Condition::check("weak_field", "|Lambda+-(D2 w, v)| and |Lambda+-(v, D2 w)|", max_of(wdef), "lt", 1e-8),
        Condition::check("two_point_zero", "Lambda+(u, 0) = 0", zero_pair, "eq", 0.0),
        Condition::check("path_agreement", "modes where the n = 0 singular path differs bitwise from the regular path",
                         bad_paths, "eq", 0.0),
    };
    return c;
}

// ---------------------------------------------------------------- report

StateReport certify(Pipeline& P) {
    const auto t0 = Clock::now();
    const auto& cfg = P.config();
    StateReport r;
    r.config = cfg.echo();
    r.add(einstein_condition(P.metric()));
    if (!r.conditions.back().pass) {
        r.geometry = P.geometry_echo();
        r.notes.push_back("einstein check failed: state construction skipped");
        return r;
    }
    r.add(identity_conditions(P.metric(), P.modes(), cfg.jobs));
    r.add(cauchy_conditions(P.model(), P.modes(), cfg.jobs));
    r.add(projector_conditions(P.hadamard(), cfg.jobs));
    r.add(gauge_conditions(P.gauge(), cfg.jobs));
    r.add(state_conditions(P.covariances(), cfg.jobs));
    r.add(smoothing_conditions(P));
    r.case_tag = P.gauge().singular_modes().empty() ? "regular" : "singular";
    r.geometry = P.geometry_echo();
    r.notes = {
        "Hadamard condition: surrogate-verified only. Checked: exact vanishing (static flat) or power-law decay "
        "(other geometries) of the wrong-frequency blocks c2-+ K_Sigma c1+-, c2+- T c2-+ and lambda+- c2-+ on modes "
        "|k| > R. The wavefront set inclusion itself is not verified.",
        "Residuals are relative to max(1, entry size) of the objects compared; see each condition's property.",
    };
    if (cfg.timings) {
        P.add_timing("total", seconds_since(t0));
        r.timings = P.timings();
    }
    return r;
}

}  // namespace grav
