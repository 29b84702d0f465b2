#pragma once

// Reduced Lax vector fields on the space of operators and their fixed-step
// integration.  The xi flow is
//   da_i^{(j)} = a_{i-1}^{(j-1)} - a_i^{(j-1)} + a_i^{(j)} (v_i - v_{i-j}),  a^{(0)} := 0,
// with v the periodic solution of v_i - v_{i-k-1} = a_i^{(k)} - a_{i-1}^{(k)};
// the eta flow is
//   da_i^{(j)} = c_i a_{i+1}^{(j+1)} - c_{i-j-1} a_i^{(j+1)},  c_i = 1/a_{i+1}^{(1)},  a^{(k+1)} := 1.
// Both are commutators with banded auxiliary operators, so every spectral
// curve coefficient and every e_s is a first integral; integration monitors
// them.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "todatri/operator.hpp"
#include "todatri/series.hpp"
#include "todatri/spectral.hpp"

namespace todatri {

// Periodic solution of v_i - v_{i-k-1} = a_i^{(k)} - a_{i-1}^{(k)} with the
// gauge <v> = 0; the right side averages to zero, so the (k+1)-cycle closes.
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> solve_v(const TriangularOperator<Scalar>& L) {
    const int n = L.n, k = L.k;
    Eigen::Vector<Scalar, Eigen::Dynamic> rhs(n), v = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(n);
    double scale = 1.0;
    for (int i = 1; i <= n; ++i) {
        rhs(site_row(i, n)) = L.coeff(i, k) - L.coeff(i - 1, k);
        scale = std::max(scale, std::abs(rhs(site_row(i, n))));
    }
    Scalar acc(0);
    int site = n;
    for (int t = 1; t < n; ++t) {
        site = 1 + site_row(site + k + 1, n);
        acc += rhs(site_row(site, n));
        v(site_row(site, n)) = acc;
    }
    const Scalar closure = acc + rhs(site_row(n, n));
    if (std::abs(closure) > 1e-12 * scale) throw Error("cycle closure failed in solve_v");
    v.array() -= v.sum() / double(n);
    return v;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> xi_flow_rhs_with_v(
    const TriangularOperator<Scalar>& L, const Eigen::Vector<Scalar, Eigen::Dynamic>& v) {
    const int n = L.n, k = L.k;
    auto vAt = [&](int i) { return v(site_row(i, n)); };
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(n, k);
    for (int i = 1; i <= n; ++i) {
        d(i - 1, 0) = L.coeff(i, 1) * (vAt(i) - vAt(i - 1));
        for (int j = 2; j <= k; ++j)
            d(i - 1, j - 1) = L.coeff(i - 1, j - 1) - L.coeff(i, j - 1) +
                              L.coeff(i, j) * (vAt(i) - vAt(i - j));
    }
    return d;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> xi_flow_rhs(
    const TriangularOperator<Scalar>& L) {
    return xi_flow_rhs_with_v(L, solve_v(L));
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eta_flow_rhs(
    const TriangularOperator<Scalar>& L) {
    const int n = L.n, k = L.k;
    auto c = [&](int i) { return Scalar(1) / L.coeff(i + 1, 1); };
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(n, k);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= k; ++j)
            d(i - 1, j - 1) = c(i) * L.coeff(i + 1, j + 1) - c(i - j - 1) * L.coeff(i, j + 1);
    return d;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> flow_rhs(
    const TriangularOperator<Scalar>& L, FlowTag flow) {
    return flow == FlowTag::Xi ? xi_flow_rhs(L) : eta_flow_rhs(L);
}

enum class Scheme { RK4, Euler };

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> states;       // coefficient tables
    std::vector<std::string> monitorNames;     // r_i_j terms and e_1..e_S
    std::vector<Eigen::VectorXd> monitors;     // one vector per time
};

struct DriftReport {
    std::vector<std::string> names;
    Eigen::VectorXd drift;  // max_t |q(t) - q(0)| / (1 + |q(0)|) per quantity
    double maxDrift = 0.0;
};

namespace detail {

inline Eigen::VectorXd monitor_values(const TriangularOperatord& L,
                                      const std::vector<std::pair<int, int>>& curveKeys,
                                      int seriesOrder) {
    const SpectralCurve R = characteristic_curve(L);
    const MinusSeries ms = minus_series(L, seriesOrder);
    Eigen::VectorXd out(curveKeys.size() + seriesOrder);
    int idx = 0;
    for (const auto& ij : curveKeys) out(idx++) = R.coeff(ij.first, ij.second);
    for (int s = 0; s < seriesOrder; ++s) out(idx++) = ms.e(s);
    return out;
}

}  // namespace detail

// Classical fixed-step integration of the chosen flow; deterministic.  The
// step count is round(T/dt).  A step that drives any a^{(1)} below epsMin or
// out of the finite range is rejected and reported with the last good time.
inline Trajectory integrate(const TriangularOperatord& L0, FlowTag flow, double T, double dt,
                            Scheme scheme = Scheme::RK4, int seriesOrder = 6,
                            double epsMin = kLeadingEps) {
    validate(L0);
    if (!(dt > 0.0) || T < dt) throw std::invalid_argument("need dt > 0 and T >= dt");
    const long steps = std::lround(T / dt);
    const int n = L0.n, k = L0.k;

    std::vector<std::pair<int, int>> curveKeys;
    for (const auto& [ij, v] : characteristic_curve(L0).terms) curveKeys.push_back(ij);

    Trajectory traj;
    traj.monitorNames.reserve(curveKeys.size() + seriesOrder);
    for (const auto& ij : curveKeys)
        traj.monitorNames.push_back("r_" + std::to_string(ij.first) + "_" +
                                    std::to_string(ij.second));
    for (int s = 1; s <= seriesOrder; ++s) traj.monitorNames.push_back("e_" + std::to_string(s));

    auto rhsOf = [&](const Eigen::MatrixXd& a) {
        TriangularOperatord L{n, k, a};
        return flow_rhs(L, flow);
    };
    auto record = [&](double t, const Eigen::MatrixXd& a) {
        traj.times.push_back(t);
        traj.states.push_back(a);
        traj.monitors.push_back(detail::monitor_values({n, k, a}, curveKeys, seriesOrder));
    };

    Eigen::MatrixXd a = L0.a;
    // a^{(1)} must keep its initial sign and magnitude above epsMin
    const Eigen::VectorXd lead0 = L0.a.col(0).cwiseSign();
    record(0.0, a);
    for (long step = 1; step <= steps; ++step) {
        Eigen::MatrixXd next;
        if (scheme == Scheme::Euler) {
            next = a + dt * rhsOf(a);
        } else {
            const Eigen::MatrixXd k1 = rhsOf(a);
            const Eigen::MatrixXd k2 = rhsOf(a + 0.5 * dt * k1);
            const Eigen::MatrixXd k3 = rhsOf(a + 0.5 * dt * k2);
            const Eigen::MatrixXd k4 = rhsOf(a + dt * k3);
            next = a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!next.allFinite() || next.col(0).cwiseProduct(lead0).minCoeff() < epsMin)
            throw StateInvalid(traj.times.back());
        a = next;
        record(step * dt, a);
    }
    return traj;
}

inline DriftReport invariant_drift(const Trajectory& traj) {
    if (traj.times.empty()) throw std::invalid_argument("empty trajectory");
    DriftReport rep;
    rep.names = traj.monitorNames;
    const Eigen::VectorXd& q0 = traj.monitors.front();
    rep.drift = Eigen::VectorXd::Zero(q0.size());
    for (const auto& q : traj.monitors)
        rep.drift = rep.drift.cwiseMax(
            ((q - q0).cwiseAbs().array() / (1.0 + q0.cwiseAbs().array())).matrix());
    rep.maxDrift = rep.drift.size() ? rep.drift.maxCoeff() : 0.0;
    return rep;
}

}  // namespace todatri
