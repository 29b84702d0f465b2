#pragma once

// Explicit symplectic structures in the coordinate charts, the corresponding
// Hamiltonians with closed-form gradients, kernel-aware Hamiltonian vector
// fields, and the comparison of their pushforwards with the Lax flows.
//
// The chart two-forms, written on tangents (u, v):
//   PhiK1:  sum_i  u_i v_{i+1} - u_{i+1} v_i                    (phi_i cyclic)
//   XK1:    sum_i  u_i v_{i-1} - u_{i-1} v_i
//   XYK2:   < dy_i ^ (dx_{i-1} - dx_{i+2}) + d(x_{i-1} x_{i-2}) ^ dx_i >
//           + e_1 < dx_i ^ dx_{i-1} >,   with < > the 1/n average.
// All of them annihilate the chart gauge directions, so fields are solved by
// a least-norm pseudo-inverse and compared in operator coordinates.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <utility>
#include <vector>

#include "todatri/calibration.hpp"
#include "todatri/chart.hpp"
#include "todatri/flows.hpp"
#include "todatri/frame.hpp"
#include "todatri/series.hpp"

namespace todatri {

struct SymplecticMatrix {
    Eigen::MatrixXd omega;                    // skew, omega(i,j) = w(e_i, e_j)
    std::vector<Eigen::VectorXd> kernelBasis;
};

inline SymplecticMatrix symplectic_matrix(const ChartPoint& pt) {
    const int n = pt.n;
    SymplecticMatrix S;
    if (pt.chart == Chart::PhiK1 || pt.chart == Chart::XK1) {
        S.omega = Eigen::MatrixXd::Zero(n, n);
        const int step = pt.chart == Chart::PhiK1 ? 1 : -1;  // dphi_i^dphi_{i+1} vs dx_i^dx_{i-1}
        for (int i = 1; i <= n; ++i) {
            const int a = site_row(i, n), b = site_row(i + step, n);
            S.omega(a, b) += 1.0;
            S.omega(b, a) -= 1.0;
        }
    } else {
        S.omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        auto X = [&](int i) { return site_row(i, n); };
        auto Y = [&](int i) { return n + site_row(i, n); };
        auto cx = [&](int i) { return pt.x(site_row(i, n)); };
        const double inv = 1.0 / n;
        auto add = [&](int r, int c, double v) {
            S.omega(r, c) += v;
            S.omega(c, r) -= v;
        };
        for (int i = 1; i <= n; ++i) {
            add(Y(i), X(i - 1), inv);
            add(Y(i), X(i + 2), -inv);
            add(X(i - 1), X(i), cx(i - 2) * inv);
            add(X(i - 2), X(i), cx(i - 1) * inv);
            add(X(i), X(i - 1), pt.e1 * inv);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S.omega, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(sv(0), 1e-300);
    for (int c = 0; c < sv.size(); ++c)
        if (sv(c) <= cutoff) S.kernelBasis.push_back(svd.matrixV().col(c));
    return S;
}

namespace detail {

inline void require_chart(const ChartPoint& pt, Chart expected) {
    if (pt.chart != expected)
        throw ChartMismatch(std::string("expected chart ") + chart_name(expected) + ", got " +
                            chart_name(pt.chart));
}

inline Chart chart_of(Hamiltonian which) {
    switch (which) {
        case Hamiltonian::Hminus:
        case Hamiltonian::Hplus: return Chart::PhiK1;
        case Hamiltonian::E3:
        case Hamiltonian::Xcubic: return Chart::XK1;
        case Hamiltonian::E4: return Chart::XYK2;
    }
    return Chart::XK1;
}

}  // namespace detail

inline double hamiltonian_value(const ChartPoint& pt, Hamiltonian which) {
    const int n = pt.n;
    switch (which) {
        case Hamiltonian::Hminus: {  // sum e^{phi_i - phi_{i-1}}
            detail::require_chart(pt, Chart::PhiK1);
            return phi_chart_leading(pt).sum();
        }
        case Hamiltonian::Hplus: {  // sum e^{phi_{i-2} - phi_i}
            detail::require_chart(pt, Chart::PhiK1);
            const Eigen::VectorXd a = phi_chart_leading(pt);
            double h = 0.0;
            for (int i = 1; i <= n; ++i) h += 1.0 / (cyc(a, i) * cyc(a, i - 1));
            return h;
        }
        case Hamiltonian::Xcubic:
        case Hamiltonian::E3: {
            // Full leaf density: sum x_i^2 (x_{i-1} - x_{i+1}) + e_1 sum (x_i x_{i+1} - x_i^2).
            // The e_1 piece is forced by the order-2 and order-3 relations of
            // the p- expansion; E3 (the 1/n average) then equals the
            // invariant e_3 identically.  Both reduce to the cubic sum on the
            // e_1 = 0 leaf.
            detail::require_chart(pt, Chart::XK1);
            auto x = [&](int i) { return cyc(pt.x, i); };
            double h = 0.0;
            for (int i = 1; i <= n; ++i)
                h += x(i) * x(i) * (x(i - 1) - x(i + 1)) +
                     pt.e1 * (x(i) * x(i + 1) - x(i) * x(i));
            return which == Hamiltonian::E3 ? h / n : h;
        }
        case Hamiltonian::E4: {
            detail::require_chart(pt, Chart::XYK2);
            auto x = [&](int i) { return cyc(pt.x, i); };
            auto y = [&](int i) { return cyc(pt.y, i); };
            double t1 = 0, t2 = 0, t3 = 0, t4 = 0, t5 = 0;
            for (int i = 1; i <= n; ++i) {
                t1 += y(i - 1) * (y(i) - y(i - 3));
                t2 += x(i) * x(i - 1) * x(i - 2) * (x(i - 1) - x(i));
                t3 += x(i) * x(i) * (x(i - 1) - x(i + 1));
                t4 += x(i - 1) * (x(i) - x(i - 1));
                t5 += y(i) * (x(i + 2) * x(i + 2) - x(i - 1) * x(i - 1) - x(i + 2) * x(i + 1) +
                              x(i - 2) * x(i - 1));
            }
            return (t1 + t2 + pt.e1 * t3 + pt.e2 * t4 + t5) / n;
        }
    }
    throw ChartMismatch("unknown Hamiltonian");
}

inline Eigen::VectorXd gradient(const ChartPoint& pt, Hamiltonian which) {
    const int n = pt.n;
    switch (which) {
        case Hamiltonian::Hminus: {
            detail::require_chart(pt, Chart::PhiK1);
            const Eigen::VectorXd a = phi_chart_leading(pt);
            Eigen::VectorXd g(n);
            for (int i = 1; i <= n; ++i) g(i - 1) = cyc(a, i) - cyc(a, i + 1);
            return g;
        }
        case Hamiltonian::Hplus: {
            detail::require_chart(pt, Chart::PhiK1);
            const Eigen::VectorXd a = phi_chart_leading(pt);
            Eigen::VectorXd q(n);  // q_i = e^{phi_{i-2} - phi_i}
            for (int i = 1; i <= n; ++i) q(i - 1) = 1.0 / (cyc(a, i) * cyc(a, i - 1));
            Eigen::VectorXd g(n);
            for (int i = 1; i <= n; ++i) g(i - 1) = cyc(q, i + 2) - cyc(q, i);
            return g;
        }
        case Hamiltonian::Xcubic:
        case Hamiltonian::E3: {
            detail::require_chart(pt, Chart::XK1);
            auto x = [&](int i) { return cyc(pt.x, i); };
            Eigen::VectorXd g(n);
            for (int i = 1; i <= n; ++i)
                g(i - 1) = 2.0 * x(i) * (x(i - 1) - x(i + 1)) + x(i + 1) * x(i + 1) -
                           x(i - 1) * x(i - 1) +
                           pt.e1 * (x(i + 1) + x(i - 1) - 2.0 * x(i));
            return which == Hamiltonian::E3 ? (g / n).eval() : g;
        }
        case Hamiltonian::E4: {
            detail::require_chart(pt, Chart::XYK2);
            auto x = [&](int i) { return cyc(pt.x, i); };
            auto y = [&](int i) { return cyc(pt.y, i); };
            Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
            for (int i = 1; i <= n; ++i) {
                const double dt2 = x(i - 1) * x(i - 1) * x(i - 2) -
                                   2.0 * x(i) * x(i - 1) * x(i - 2) +
                                   2.0 * x(i + 1) * x(i) * x(i - 1) -
                                   x(i + 1) * x(i + 1) * x(i - 1) +
                                   x(i + 2) * x(i + 1) * x(i + 1) -
                                   x(i + 2) * x(i + 2) * x(i + 1);
                const double dt3 = 2.0 * x(i) * (x(i - 1) - x(i + 1)) + x(i + 1) * x(i + 1) -
                                   x(i - 1) * x(i - 1);
                const double dt4 = x(i + 1) - 2.0 * x(i) + x(i - 1);
                const double dt5 = y(i - 2) * (2.0 * x(i) - x(i - 1)) +
                                   y(i + 1) * (x(i - 1) - 2.0 * x(i)) - y(i - 1) * x(i + 1) +
                                   y(i + 2) * x(i + 1);
                g(site_row(i, n)) = (dt2 + pt.e1 * dt3 + pt.e2 * dt4 + dt5) / n;
                const double dy1 = y(i + 1) - y(i - 2) + y(i - 1) - y(i + 2);
                const double dy5 = x(i + 2) * x(i + 2) - x(i - 1) * x(i - 1) -
                                   x(i + 2) * x(i + 1) + x(i - 2) * x(i - 1);
                g(n + site_row(i, n)) = (dy1 + dy5) / n;
            }
            return g;
        }
    }
    throw ChartMismatch("unknown Hamiltonian");
}

struct HamiltonianField {
    Eigen::VectorXd v;
    double residual;
};

// Least-norm solution of Omega v = grad H; used by the calibration search.
inline HamiltonianField hamiltonian_vector_field_raw(const ChartPoint& pt, Hamiltonian which) {
    const SymplecticMatrix S = symplectic_matrix(pt);
    const Eigen::VectorXd rhs = gradient(pt, which);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S.omega, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    HamiltonianField f;
    f.v = svd.solve(rhs);
    f.residual = (S.omega * f.v - rhs).norm();
    return f;
}

// Hamiltonian vector field with the frozen calibration applied:
// Omega v = sigma * scale * grad H.
inline HamiltonianField hamiltonian_vector_field(const ChartPoint& pt, Hamiltonian which,
                                                 double tol = 1e-9) {
    const CalibrationEntry cal = calibration(pt.chart, which);
    HamiltonianField f = hamiltonian_vector_field_raw(pt, which);
    const double factor = cal.sigma * scale_value(cal.scale, pt.n);
    f.v *= factor;
    f.residual *= std::abs(factor);
    if (f.residual > tol * std::max(1.0, gradient(pt, which).norm()))
        throw InconsistentSystem(f.residual);
    return f;
}

// Pushforward of a chart tangent to coefficient velocities, by the chain rule
// through the chart map; invariant under the chart gauge directions.
inline Eigen::MatrixXd push_velocity(const ChartPoint& pt, const Eigen::VectorXd& v) {
    const int n = pt.n;
    if (pt.chart == Chart::PhiK1) {
        const Eigen::VectorXd a = phi_chart_leading(pt);
        Eigen::MatrixXd d(n, 1);
        for (int i = 1; i <= n; ++i) d(i - 1, 0) = cyc(a, i) * (cyc(v, i) - cyc(v, i - 1));
        return d;
    }
    if (pt.chart == Chart::XK1) {
        Eigen::MatrixXd d(n, 1);
        for (int i = 1; i <= n; ++i) d(i - 1, 0) = cyc(v, i) - cyc(v, i - 2);
        return d;
    }
    // XYK2: a^{(2)}_i = x_i - x_{i-3} + e1,
    //       a^{(1)}_i = y_i - y_{i-3} - (x_i - x_{i-3}) x_{i-2} + e1 (x_i - x_{i-2}) + e2
    const Eigen::VectorXd vx = v.head(n), vy = v.tail(n);
    auto x = [&](int i) { return cyc(pt.x, i); };
    Eigen::MatrixXd d(n, 2);
    for (int i = 1; i <= n; ++i) {
        const double dx3 = cyc(vx, i) - cyc(vx, i - 3);
        d(i - 1, 1) = dx3;
        d(i - 1, 0) = cyc(vy, i) - cyc(vy, i - 3) - dx3 * x(i - 2) -
                      (x(i) - x(i - 3)) * cyc(vx, i - 2) + pt.e1 * (cyc(vx, i) - cyc(vx, i - 2));
    }
    return d;
}

inline ChartPoint chart_from_operator(Chart chart, const TriangularOperatord& L) {
    if (chart == Chart::PhiK1) return phi_chart_from_operator(L);
    ChartPoint pt = x_chart_from_operator(L);
    if (pt.chart != chart)
        throw ChartMismatch(std::string("operator order does not match chart ") +
                            chart_name(chart));
    return pt;
}

// Max deviation between the pushforward of the Hamiltonian field and the Lax
// flow, over all coefficients.
inline double match_lax(Chart chart, const TriangularOperatord& L, Hamiltonian which,
                        FlowTag flow) {
    const ChartPoint pt = chart_from_operator(chart, L);
    const HamiltonianField f = hamiltonian_vector_field(pt, which);
    return (push_velocity(pt, f.v) - flow_rhs(L, flow)).cwiseAbs().maxCoeff();
}

struct DiscoveredCalibration {
    int sigma;
    ScaleTag scale;
    double deviation;
};

// Brute search over sigma and scale on one instance; the verification suite
// asserts the discovered pair equals the frozen one and is universal.
inline DiscoveredCalibration discover_calibration(Chart chart, const TriangularOperatord& L,
                                                  Hamiltonian which, FlowTag flow) {
    const ChartPoint pt = chart_from_operator(chart, L);
    const HamiltonianField base = hamiltonian_vector_field_raw(pt, which);
    const Eigen::MatrixXd push = push_velocity(pt, base.v);
    const Eigen::MatrixXd target = flow_rhs(L, flow);
    DiscoveredCalibration bestFound{0, ScaleTag::One, std::numeric_limits<double>::infinity()};
    for (int sigma : {-1, +1}) {
        for (ScaleTag s : {ScaleTag::InvN, ScaleTag::One, ScaleTag::N}) {
            const double dev =
                (sigma * scale_value(s, pt.n) * push - target).cwiseAbs().maxCoeff();
            if (dev < bestFound.deviation) bestFound = {sigma, s, dev};
        }
    }
    return bestFound;
}

// ---- two-form on frame leaves ----------------------------------------------

namespace detail {

inline Eigen::VectorXcd extend_tangent(const FramePair& F, const Eigen::MatrixXcd& dPhi, int i) {
    const int n = F.n();
    int q = (i - 1) / n;
    if (i - 1 < 0 && (i - 1) % n != 0) --q;
    const int i0 = i - q * n;
    Eigen::VectorXcd col = dPhi.col(i0 - 1);
    for (int l = 0; l < F.k(); ++l) {
        Complex w = F.W(l);
        if (q >= 0)
            for (int t = 0; t < q; ++t) col(l) /= w;
        else
            for (int t = 0; t < -q; ++t) col(l) *= w;
    }
    return col;
}

inline Complex det_cols(const std::vector<Eigen::VectorXcd>& cols) {
    return det_of_columns(cols);
}

}  // namespace detail

// The restriction of the second two-form onto a leaf with fixed Floquet
// multipliers, evaluated on two frame tangents:
//   (1/2) < dphi_{i-1} ^ dphi_i
//          - (-1)^{(i-1)k} e^{phi_{i-1}} sum_j da_i^{(j)} ^ |phi_{i-2},..,phi_{i-k}, dphi_{i-j}| >
// with e^{-phi_i} = (-1)^{ik} |phi_{i-1},..,phi_{i-k}| and the differentials
// of the potentials and coefficients induced through those determinants.
inline Complex omega1_evaluate(const FramePair& F, const Eigen::MatrixXcd& d1,
                               const Eigen::MatrixXcd& d2, double minorTol = 1e-10) {
    validate_frame(F);
    const int k = F.k(), n = F.n();

    auto colsAt = [&](int i) {  // phi_{i-1} .. phi_{i-k}
        std::vector<Eigen::VectorXcd> cols(k);
        for (int m = 1; m <= k; ++m) cols[m - 1] = extend_frame(F, i - m);
        return cols;
    };
    auto dcolsAt = [&](const Eigen::MatrixXcd& d, int i) {
        std::vector<Eigen::VectorXcd> cols(k);
        for (int m = 1; m <= k; ++m) cols[m - 1] = detail::extend_tangent(F, d, i - m);
        return cols;
    };
    auto leibniz = [&](const std::vector<Eigen::VectorXcd>& cols,
                       const std::vector<Eigen::VectorXcd>& dcols) {
        Complex acc = 0.0;
        for (int m = 0; m < k; ++m) {
            auto tmp = cols;
            tmp[m] = dcols[m];
            acc += detail::det_cols(tmp);
        }
        return acc;
    };

    // potentials: P_i = e^{-phi_i}, dphipot_i = -dD_i / D_i
    auto potAt = [&](int i, Complex& P, Complex& dphi1, Complex& dphi2) {
        const auto cols = colsAt(i);
        const Complex D = detail::det_cols(cols);
        double scale = 1.0;
        for (const auto& c : cols) scale *= c.norm();
        if (std::abs(D) <= minorTol * std::max(scale, 1e-300)) throw SingularMinor(i);
        P = (((i * k) % 2 == 0) ? 1.0 : -1.0) * D;
        dphi1 = -leibniz(cols, dcolsAt(d1, i)) / D;
        dphi2 = -leibniz(cols, dcolsAt(d2, i)) / D;
    };

    Complex total = 0.0;
    Complex Pprev, dphi1prev, dphi2prev;
    potAt(0, Pprev, dphi1prev, dphi2prev);
    for (int i = 1; i <= n; ++i) {
        Complex P, dphi1, dphi2;
        potAt(i, P, dphi1, dphi2);

        Complex term = dphi1prev * dphi2 - dphi2prev * dphi1;

        const auto cols = colsAt(i);
        const auto dc1 = dcolsAt(d1, i);
        const auto dc2 = dcolsAt(d2, i);
        const Complex D = detail::det_cols(cols);
        const Eigen::VectorXcd tail = extend_frame(F, i - k - 1);
        const Eigen::VectorXcd dtail1 = detail::extend_tangent(F, d1, i - k - 1);
        const Eigen::VectorXcd dtail2 = detail::extend_tangent(F, d2, i - k - 1);
        const Complex dD1 = leibniz(cols, dc1);
        const Complex dD2 = leibniz(cols, dc2);

        Complex wedge = 0.0;
        for (int j = 1; j <= k; ++j) {
            // N_ij: column j replaced by phi_{i-k-1}; a_i^{(j)} = -N_ij / D_i
            auto ncols = cols;
            ncols[j - 1] = tail;
            const Complex N = detail::det_cols(ncols);
            auto dN = [&](const std::vector<Eigen::VectorXcd>& dcols,
                          const Eigen::VectorXcd& dtail) {
                Complex acc = 0.0;
                for (int m = 0; m < k; ++m) {
                    auto tmp = ncols;
                    tmp[m] = (m == j - 1) ? dtail : dcols[m];
                    acc += detail::det_cols(tmp);
                }
                return acc;
            };
            const Complex da1 = -dN(dc1, dtail1) / D + N * dD1 / (D * D);
            const Complex da2 = -dN(dc2, dtail2) / D + N * dD2 / (D * D);

            // B_ij(d) = |phi_{i-2},..,phi_{i-k}, dphi_{i-j}|
            std::vector<Eigen::VectorXcd> bcols(k);
            for (int m = 2; m <= k; ++m) bcols[m - 2] = cols[m - 1];
            bcols[k - 1] = detail::extend_tangent(F, d1, i - j);
            const Complex B1 = detail::det_cols(bcols);
            bcols[k - 1] = detail::extend_tangent(F, d2, i - j);
            const Complex B2 = detail::det_cols(bcols);

            wedge += da1 * B2 - da2 * B1;
        }
        const double signPrev = (((i - 1) * k) % 2 == 0) ? 1.0 : -1.0;
        term -= signPrev * (1.0 / Pprev) * wedge;

        total += term;
        Pprev = P;
        dphi1prev = dphi1;
        dphi2prev = dphi2;
    }
    return total / (2.0 * n);
}

}  // namespace todatri
