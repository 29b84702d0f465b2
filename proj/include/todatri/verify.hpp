#pragma once

// Seeded property-verification suite.  Each criterion draws its own
// deterministic instance stream, records the worst deviation observed, and
// compares it against a fixed tolerance (scaled by config.tolScale).  The
// final criterion regenerates the whole report and requires the two byte
// streams to be identical.

#include <Eigen/Eigenvalues>

#include <functional>
#include <string>
#include <vector>

#include "todatri/io.hpp"
#include "todatri/symplectic.hpp"

namespace todatri {

struct VerifyConfig {
    std::uint64_t seed = 42;
    int trials = 1;        // multiplies the per-criterion instance counts
    double tolScale = 1.0; // multiplies all tolerances
};

struct CriterionResult {
    std::string name;
    bool passed = false;
    double maxDeviation = 0.0;
    double tolerance = 0.0;
    int instances = 0;
    std::string note;
};

namespace verify_detail {

struct Combo {
    int n, k;
};
inline const std::vector<Combo>& combos_all() {
    static const std::vector<Combo> c{{3, 1}, {5, 1}, {7, 1}, {5, 2}, {7, 2}};
    return c;
}
inline const std::vector<Combo>& combos_k1() {
    static const std::vector<Combo> c{{3, 1}, {5, 1}, {7, 1}};
    return c;
}
inline const std::vector<Combo>& combos_k2() {
    static const std::vector<Combo> c{{5, 2}, {7, 2}};
    return c;
}

inline TriangularOperatord instance(const VerifyConfig& cfg, int criterion, int t,
                                    const std::vector<Combo>& combos) {
    const Combo c = combos[t % combos.size()];
    return random_operator(c.n, c.k, derive_seed(cfg.seed, criterion, t));
}

// residual of the p- expansion, by truncated-series convolution
inline double minus_residual(const TriangularOperatord& L, const MinusSeries& ms) {
    const int n = L.n, k = L.k, S = ms.S;
    auto ehat = [&](int p) { return p == 0 ? 1.0 : ms.e(p - 1); };
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
        for (int s = 0; s <= S; ++s) {
            double lhs = 0.0, scale = 1.0;
            for (int p = 0; p <= s; ++p) {
                lhs += ehat(p) * ms.xiAt(s - p, i);
                scale += std::abs(ehat(p) * ms.xiAt(s - p, i));
            }
            double rhs = 0.0;
            for (int j = 1; j <= k + 1; ++j) {
                const int q = s - (k + 1) + j;
                if (q < 0) continue;
                rhs += L.coeff(i, j) * ms.xiAt(q, i - j);
                scale += std::abs(L.coeff(i, j) * ms.xiAt(q, i - j));
            }
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
    }
    return worst;
}

// residual of the p+ expansion
inline double plus_residual(const TriangularOperatord& L, const PlusSeries& ps) {
    const int n = L.n, k = L.k, S = ps.S;
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
        for (int s = 0; s <= S; ++s) {
            double lhs = std::exp(ps.phiAt(i)) * ps.xiAt(s, i), scale = 1.0 + std::abs(lhs);
            double rhs = 0.0;
            for (int j = 1; j <= k + 1; ++j) {
                const int q = s + 1 - j;
                if (q < 0) continue;
                const double c = L.coeff(i, j) * std::exp(ps.phiAt(i - j)) * ps.xiAt(q, i - j);
                rhs += c;
                scale += std::abs(c);
            }
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
    }
    return worst;
}

inline Eigen::VectorXd series_pow(const Eigen::VectorXd& a, int m) {
    const int S = static_cast<int>(a.size()) - 1;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(S + 1);
    r(0) = 1.0;
    for (int q = 0; q < m; ++q) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(S + 1);
        for (int p = 0; p <= S; ++p)
            for (int u = 0; u + p <= S; ++u) c(p + u) += r(p) * a(u);
        r = c;
    }
    return r;
}

// worst relative coefficient of R(z^{-n}, E(z)) through order S
inline double substitution_z(const SpectralCurve& R, const MinusSeries& ms) {
    const int n = R.n, k = R.k, S = ms.S;
    Eigen::VectorXd eser = Eigen::VectorXd::Zero(S + 1);
    eser(0) = 1.0;
    for (int s = 1; s <= S; ++s) eser(s) = ms.e(s - 1);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(S + 1), mag = Eigen::VectorXd::Ones(S + 1);
    for (const auto& [ij, r] : R.terms) {
        const int shift = n * (k + 1) - n * ij.first - (k + 1) * ij.second;
        if (shift > S) continue;
        const Eigen::VectorXd p = series_pow(eser, ij.second);
        for (int s = shift; s <= S; ++s) {
            out(s) += r * p(s - shift);
            mag(s) += std::abs(r * p(s - shift));
        }
    }
    return (out.cwiseAbs().array() / mag.array()).maxCoeff();
}

// worst relative coefficient of R(w(E), E) through order S
inline double substitution_w(const SpectralCurve& R, const PlusSeries& ps) {
    const int n = R.n, S = ps.S;
    const double r10 = R.coeff(1, 0);
    Eigen::VectorXd wser = Eigen::VectorXd::Zero(S + 1);
    wser(0) = 1.0;
    for (int s = 1; s <= S; ++s) wser(s) = ps.w(s - 1);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(S + 1), mag = Eigen::VectorXd::Ones(S + 1);
    for (const auto& [ij, r] : R.terms) {
        const int shift = n * ij.first + ij.second - n;
        if (shift > S) continue;
        const double c = r * std::pow(r10, -ij.first);
        const Eigen::VectorXd p = series_pow(wser, ij.first);
        for (int s = shift; s <= S; ++s) {
            out(s) += c * p(s - shift);
            mag(s) += std::abs(c * p(s - shift));
        }
    }
    return (out.cwiseAbs().array() / mag.array()).maxCoeff();
}

inline std::vector<CurvePoint> sample_points(const TriangularOperatord& L,
                                             const SpectralCurve& R, SplitMix64& rng, int want) {
    std::vector<CurvePoint> pts;
    int attempts = 0;
    while (static_cast<int>(pts.size()) < want && attempts < 50 * want) {
        ++attempts;
        const Complex w0 = std::polar(rng.uniform(0.7, 1.4), rng.uniform(0.0, 2.0 * M_PI));
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(quasi_periodic_matrix<Complex>(L, w0),
                                                       false);
        for (int m = 0; m < L.n && static_cast<int>(pts.size()) < want; ++m) {
            try {
                pts.push_back(point_eigenvectors(L, R, w0, es.eigenvalues()(m)));
            } catch (const Error&) {
            }
        }
    }
    return pts;
}

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

using Runner = std::function<void(const VerifyConfig&, CriterionResult&)>;

inline CriterionResult run_criterion(const VerifyConfig& cfg, const std::string& name,
                                     double tolerance, const Runner& body) {
    CriterionResult r;
    r.name = name;
    r.tolerance = tolerance;
    try {
        body(cfg, r);
        r.passed = r.maxDeviation <= r.tolerance;
    } catch (const std::exception& e) {
        r.passed = false;
        r.note = e.what();
        r.maxDeviation = std::numeric_limits<double>::infinity();
    }
    return r;
}

}  // namespace verify_detail

// Criteria 1..10; the determinism criterion is added by run_verification.
inline std::vector<CriterionResult> run_criteria(const VerifyConfig& cfg) {
    namespace vd = verify_detail;
    std::vector<CriterionResult> out;

    out.push_back(vd::run_criterion(cfg, "1-curve-shape", 1e-9 * cfg.tolScale, [](const VerifyConfig& c,
                                                                   CriterionResult& r) {
        r.instances = 200 * c.trials;
        for (int t = 0; t < r.instances; ++t) {
            const auto L = vd::instance(c, 1, t, vd::combos_all());
            const SpectralCurve R = characteristic_curve(L);  // throws on support violation
            const double prod = leading_product(L);
            r.maxDeviation = std::max(
                r.maxDeviation, std::abs(R.coeff(1, 0) - prod) / (1.0 + std::abs(prod)));
        }
    }));

    out.push_back(vd::run_criterion(cfg, "2-worked-instance", 1e-10 * cfg.tolScale, [](const VerifyConfig&,
                                                                        CriterionResult& r) {
        r.instances = 1;
        const TriangularOperatord L{3, 1, Eigen::MatrixXd::Ones(3, 1)};
        double dev = 0.0;
        const SpectralCurve R = characteristic_curve(L);
        dev = std::max(dev, std::abs(R.coeff(2, 0) - 1.0));
        dev = std::max(dev, std::abs(R.coeff(0, 3) + 1.0));
        dev = std::max(dev, std::abs(R.coeff(1, 1) - 3.0));
        dev = std::max(dev, std::abs(R.coeff(1, 0) - 1.0));
        for (const auto& [ij, v] : R.terms)
            if (R.terms.count(ij) && !((ij == std::pair{2, 0}) || (ij == std::pair{0, 3}) ||
                                       (ij == std::pair{1, 1}) || (ij == std::pair{1, 0})))
                dev = std::max(dev, std::abs(v));
        const auto roots = floquet_roots(R);
        dev = std::max(dev, std::abs(roots[0] - Complex(-1.0)));
        const auto F = operator_to_frame(L);
        Eigen::VectorXcd expected(3);
        expected << 1.0, -1.0, 1.0;
        expected /= expected.norm();
        dev = std::max(dev, (F.Phi.row(0).transpose() - expected).cwiseAbs().maxCoeff());
        const auto ms = minus_series(L, 3);
        dev = std::max(dev, std::abs(ms.e(0) - 1.0));
        dev = std::max(dev, std::abs(ms.e(1)));
        dev = std::max(dev, std::abs(ms.e(2)));
        const auto ps = plus_series(L, 1);
        dev = std::max(dev, std::abs(ps.w(0) + 3.0));
        r.maxDeviation = dev;
    }));

    out.push_back(vd::run_criterion(cfg, "3-lemma-residuals", 1.0, [](const VerifyConfig& c,
                                                                      CriterionResult& r) {
        r.instances = 100 * c.trials;
        for (int t = 0; t < r.instances; ++t) {
            const auto L = vd::instance(c, 3, t, vd::combos_all());
            const auto ms = minus_series(L, 6);
            const auto ps = plus_series(L, 6);
            r.maxDeviation =
                std::max(r.maxDeviation, vd::minus_residual(L, ms) / (1e-9 * c.tolScale));
            r.maxDeviation =
                std::max(r.maxDeviation, vd::plus_residual(L, ps) / (1e-9 * c.tolScale));
            r.maxDeviation =
                std::max(r.maxDeviation, std::abs(ms.e(L.k)) / (1e-10 * c.tolScale));
        }
        r.note = "residuals relative to 1e-9, e_{k+1} relative to 1e-10";
    }));

    out.push_back(vd::run_criterion(cfg, "4-curve-substitution", 1e-8 * cfg.tolScale, [](const VerifyConfig& c,
                                                                          CriterionResult& r) {
        r.instances = 50 * c.trials;
        for (int t = 0; t < r.instances; ++t) {
            const auto L = vd::instance(c, 4, t, vd::combos_all());
            const SpectralCurve R = characteristic_curve(L);
            r.maxDeviation = std::max(r.maxDeviation, vd::substitution_z(R, minus_series(L, 6)));
            r.maxDeviation = std::max(r.maxDeviation, vd::substitution_w(R, plus_series(L, 6)));
        }
    }));

    out.push_back(vd::run_criterion(cfg, "5-conservation", 1e-8 * cfg.tolScale, [](const VerifyConfig& c,
                                                                    CriterionResult& r) {
        r.instances = 40 * c.trials;
        for (int t = 0; t < r.instances; ++t) {
            const auto L = vd::instance(c, 5, t, vd::combos_all());
            const FlowTag flow = t % 2 == 0 ? FlowTag::Xi : FlowTag::Eta;
            const auto traj = integrate(L, flow, 1.0, 1e-3);
            r.maxDeviation = std::max(r.maxDeviation, invariant_drift(traj).maxDrift);
        }
    }));

    out.push_back(vd::run_criterion(cfg, "6-hamiltonian-match", 1.0, [](const VerifyConfig& c,
                                                                        CriterionResult& r) {
        // per-pairing tolerances; deviations are reported relative to them
        struct Row {
            Chart chart;
            Hamiltonian which;
            FlowTag flow;
            bool k2;
            double tol;
        };
        const Row rows[] = {
            {Chart::PhiK1, Hamiltonian::Hminus, FlowTag::Xi, false, 1e-9},
            {Chart::PhiK1, Hamiltonian::Hplus, FlowTag::Eta, false, 1e-9},
            {Chart::XK1, Hamiltonian::Xcubic, FlowTag::Xi, false, 1e-9},
            {Chart::XYK2, Hamiltonian::E4, FlowTag::Xi, true, 1e-8},
        };
        const int per = 100 * c.trials;
        r.instances = 5 * per;
        int stream = 60;
        for (const auto& row : rows) {
            ++stream;
            for (int t = 0; t < per; ++t) {
                const auto L =
                    vd::instance(c, stream, t, row.k2 ? vd::combos_k2() : vd::combos_k1());
                const double dev = match_lax(row.chart, L, row.which, row.flow);
                r.maxDeviation = std::max(r.maxDeviation, dev / (row.tol * c.tolScale));
            }
        }
        // E3 chart value versus the invariant e_3
        for (int t = 0; t < per; ++t) {
            const auto L = vd::instance(c, 66, t, vd::combos_k1());
            const double dev =
                std::abs(hamiltonian_value(x_chart_from_operator(L), Hamiltonian::E3) -
                         hamiltonian_e(L, 1));
            r.maxDeviation = std::max(r.maxDeviation, dev / (1e-10 * c.tolScale));
        }
        r.note = "deviations relative to per-pairing tolerances";
    }));

    out.push_back(vd::run_criterion(cfg, "7-curve-differential-ratio", 1e-7 * cfg.tolScale,
                                    [](const VerifyConfig& c, CriterionResult& r) {
        const int ops = 20 * c.trials, ptsPer = 20;
        r.instances = ops;
        for (int t = 0; t < ops; ++t) {
            const auto L = vd::instance(c, 7, t, vd::combos_all());
            const SpectralCurve R = characteristic_curve(L);
            SplitMix64 rng(derive_seed(c.seed, 700, t));
            for (const auto& pt : vd::sample_points(L, R, rng, ptsPer)) {
                const Complex rho = domega_identity_ratio(L, R, pt);
                r.maxDeviation = std::max(r.maxDeviation, std::abs(rho - kRhoStar));
                r.maxDeviation =
                    std::max(r.maxDeviation, std::abs(std::abs(rho) - 1.0));
            }
        }
    }));

    out.push_back(vd::run_criterion(cfg, "8-frame-duality", 1.0, [](const VerifyConfig& c,
                                                                    CriterionResult& r) {
        r.instances = 50 * c.trials;
        for (int t = 0; t < r.instances; ++t) {
            const auto L = vd::instance(c, 8, t, vd::combos_all());
            const auto F = operator_to_frame(L);
            const auto back = frame_to_operator(F);
            double dev = (back.a.real() - L.a).cwiseAbs().maxCoeff();
            dev = std::max(dev, back.a.imag().cwiseAbs().maxCoeff());
            r.maxDeviation = std::max(r.maxDeviation, dev / (1e-8 * c.tolScale));

            double pairing = 0.0;
            for (int i = 1; i <= L.n; ++i) {
                const auto u = dual_minors(F, i);
                for (int j = 2; j <= L.k + 1; ++j) {
                    Complex sum = 0.0;
                    const Eigen::VectorXcd col = extend_frame(F, i - j);
                    for (int l = 0; l < L.k; ++l) sum += u(l) * col(l);
                    const Complex expect = j == L.k + 1 ? Complex(1.0) : Complex(0.0);
                    pairing = std::max(pairing, std::abs(sum - expect));
                }
            }
            r.maxDeviation = std::max(r.maxDeviation, pairing / (1e-9 * c.tolScale));

            SplitMix64 rng(derive_seed(c.seed, 800, t));
            FramePair G = F;
            for (int l = 0; l < L.k; ++l)
                G.Phi.row(l) *= Complex(rng.uniform(0.4, 2.0), rng.uniform(-1.0, 1.0));
            double invdev = (frame_to_operator(G).a - back.a).cwiseAbs().maxCoeff();
            if (L.k == 2) {
                FramePair P;
                P.Phi = G.Phi.colwise().reverse();
                P.W = G.W.reverse();
                invdev = std::max(invdev,
                                  (frame_to_operator(P).a - back.a).cwiseAbs().maxCoeff());
            }
            r.maxDeviation = std::max(r.maxDeviation, invdev / (1e-10 * c.tolScale));
        }
        r.note = "deviations relative to per-relation tolerances";
    }));

    out.push_back(vd::run_criterion(cfg, "9-w1-identity", 1e-9 * cfg.tolScale, [](const VerifyConfig& c,
                                                                   CriterionResult& r) {
        r.instances = 50 * c.trials;
        for (int t = 0; t < r.instances; ++t) {
            const auto L = vd::instance(c, 9, t, vd::combos_all());
            const auto ps = plus_series(L, 1);
            double sum = 0.0, scale = 1.0;
            for (int i = 1; i <= L.n; ++i) {
                const double term = L.coeff(i, 2) * std::exp(ps.phiAt(i - 2) - ps.phiAt(i));
                sum += term;
                scale += std::abs(term);
            }
            r.maxDeviation = std::max(r.maxDeviation, std::abs(ps.w(0) + sum) / scale);
        }
    }));

    out.push_back(vd::run_criterion(cfg, "10-gradient-check", 1e-7 * cfg.tolScale, [](const VerifyConfig& c,
                                                                       CriterionResult& r) {
        const int per = 100 * c.trials;
        r.instances = 5 * per;
        int stream = 100;
        for (auto which : {Hamiltonian::Hminus, Hamiltonian::Hplus, Hamiltonian::Xcubic,
                           Hamiltonian::E3, Hamiltonian::E4}) {
            ++stream;
            for (int t = 0; t < per; ++t) {
                SplitMix64 rng(derive_seed(c.seed, stream, t));
                const int n = 3 + 2 * (rng.next() % 3);  // 3, 5, 7
                ChartPoint pt;
                pt.n = n;
                pt.x.resize(n);
                for (int i = 0; i < n; ++i) pt.x(i) = rng.uniform(-0.5, 0.5);
                switch (which) {
                    case Hamiltonian::Hminus:
                    case Hamiltonian::Hplus:
                        pt.chart = Chart::PhiK1;
                        pt.lnr = rng.uniform(-0.3, 0.3);
                        break;
                    case Hamiltonian::Xcubic:
                    case Hamiltonian::E3:
                        pt.chart = Chart::XK1;
                        pt.e1 = rng.uniform(0.8, 1.3);
                        break;
                    case Hamiltonian::E4:
                        pt.chart = Chart::XYK2;
                        pt.y.resize(n);
                        for (int i = 0; i < n; ++i) pt.y(i) = rng.uniform(-0.5, 0.5);
                        pt.e1 = rng.uniform(0.8, 1.3);
                        pt.e2 = rng.uniform(-0.2, 0.2);
                        break;
                }
                const Eigen::VectorXd g = gradient(pt, which);
                Eigen::VectorXd coords;
                if (pt.chart == Chart::XYK2) {
                    coords.resize(2 * n);
                    coords << pt.x, pt.y;
                } else {
                    coords = pt.x;
                }
                const Eigen::VectorXd fd = vd::fd_gradient(
                    [&](const Eigen::VectorXd& cvec) {
                        ChartPoint q = pt;
                        q.x = cvec.head(n);
                        if (q.chart == Chart::XYK2) q.y = cvec.tail(n);
                        return hamiltonian_value(q, which);
                    },
                    coords);
                const double rel =
                    (g - fd).cwiseAbs().maxCoeff() / (1.0 + fd.cwiseAbs().maxCoeff());
                r.maxDeviation = std::max(r.maxDeviation, rel);
            }
        }
    }));

    return out;
}

inline json report_json(const VerifyConfig& cfg, const std::vector<CriterionResult>& results) {
    json criteria = json::array();
    bool all = true;
    for (const auto& r : results) {
        json row{{"name", r.name},
                 {"passed", r.passed},
                 {"maxDeviation", r.maxDeviation},
                 {"tolerance", r.tolerance},
                 {"instances", r.instances}};
        if (!r.note.empty()) row["note"] = r.note;
        criteria.push_back(row);
        all = all && r.passed;
    }
    return json{{"config", json{{"seed", cfg.seed}, {"trials", cfg.trials},
                                {"tolScale", cfg.tolScale}}},
                {"criteria", criteria},
                {"passed", all}};
}

// Full suite including the determinism criterion: the first ten criteria are
// regenerated from scratch and the two serialized reports must match byte for
// byte.
inline std::pair<json, bool> run_verification(const VerifyConfig& cfg) {
    auto results = run_criteria(cfg);
    const std::string first = dump_json(report_json(cfg, results));
    const std::string second = dump_json(report_json(cfg, run_criteria(cfg)));
    CriterionResult det;
    det.name = "11-determinism";
    det.tolerance = 0.0;
    det.instances = 2;
    det.passed = first == second;
    det.maxDeviation = det.passed ? 0.0 : 1.0;
    if (!det.passed) det.note = "two runs produced different reports";
    results.push_back(det);
    const json rep = report_json(cfg, results);
    return {rep, rep.at("passed").get<bool>()};
}

// Fresh calibration search; reports the discovered constants and whether they
// agree with the frozen table.
inline json run_calibration(std::uint64_t seed) {
    struct Row {
        Chart chart;
        Hamiltonian which;
        FlowTag flow;
        int n, k;
    };
    const Row rows[] = {
        {Chart::PhiK1, Hamiltonian::Hminus, FlowTag::Xi, 5, 1},
        {Chart::PhiK1, Hamiltonian::Hplus, FlowTag::Eta, 5, 1},
        {Chart::XK1, Hamiltonian::Xcubic, FlowTag::Xi, 5, 1},
        {Chart::XK1, Hamiltonian::E3, FlowTag::Xi, 5, 1},
        {Chart::XYK2, Hamiltonian::E4, FlowTag::Xi, 5, 2},
    };
    json pairs = json::array();
    bool allAgree = true;
    for (const auto& row : rows) {
        const auto L = random_operator(row.n, row.k, derive_seed(seed, 12000, row.k));
        const auto found = discover_calibration(row.chart, L, row.which, row.flow);
        const auto frozen = calibration(row.chart, row.which);
        const bool agree = found.sigma == frozen.sigma && found.scale == frozen.scale;
        allAgree = allAgree && agree;
        pairs.push_back(json{{"chart", chart_name(row.chart)},
                             {"hamiltonian", hamiltonian_name(row.which)},
                             {"flow", row.flow == FlowTag::Xi ? "xi" : "eta"},
                             {"sigma", found.sigma},
                             {"scale", scale_name(found.scale)},
                             {"deviation", found.deviation},
                             {"agreesWithFrozen", agree}});
    }

    // rho*: the curve-differential ratio on the seeded worked instance
    const TriangularOperatord L3{3, 1, Eigen::MatrixXd::Ones(3, 1)};
    const SpectralCurve R3 = characteristic_curve(L3);
    const auto pt3 = point_eigenvectors(L3, R3, Complex(-1.0), Complex(0.0));
    const Complex rho = domega_identity_ratio(L3, R3, pt3);

    // kappa: w_1 against the residue Hamiltonian, over both orders k
    json kap = json::array();
    bool kappaOk = true;
    for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
        const auto L = random_operator(n, k, derive_seed(seed, 12001, k));
        const double w1 = plus_series(L, 1).w(0);
        const double h = hamiltonian_log_plus(L, 1, 1);
        const double ratio = w1 / h;
        kappaOk = kappaOk && std::abs(ratio - kKappa.sigma * scale_value(kKappa.scale, n)) <
                                 1e-6 * (1.0 + std::abs(ratio));
        kap.push_back(json{{"n", n}, {"k", k}, {"w1", w1}, {"residueValue", h},
                           {"ratio", ratio}});
    }

    return json{{"pairings", pairs},
                {"rhoStar", json{{"re", rho.real()}, {"im", rho.imag()},
                                 {"frozen", kRhoStar},
                                 {"agreesWithFrozen", std::abs(rho - kRhoStar) < 1e-9}}},
                {"kappa", json{{"sigma", kKappa.sigma}, {"scale", scale_name(kKappa.scale)},
                               {"checks", kap}, {"agreesWithFrozen", kappaOk}}},
                {"allAgree", allAgree && kappaOk && std::abs(rho - kRhoStar) < 1e-9}};
}

}  // namespace todatri
