#pragma once

// Formal Bloch expansions at the two marked points of the spectral curve.
//
// At p- (local coordinate z, w = z^{-n}):
//   psi_i = z^i (1 + sum_s xi_s^-(i) z^s),  E = z^{-k-1}(1 + sum_s e_s z^s),
// with n-periodic xi_s^- normalized by xi_s^-(0) = 0.  Solving L psi = E psi
// order by order determines the invariants e_s and the coefficients xi_s^-.
//
// At p+ (local coordinate E):
//   psi_i = e^{phi_i} E^{-i} (1 + sum_s xi_s^+(i) E^s),  a_i^{(1)} = e^{phi_i - phi_{i-1}},
// normalized by xi_s^+(0) = 0; the Floquet expansion w(E) = r^{-1} E^n (1 + sum_s w_s E^s)
// is read off through w_s = xi_s^+(-n).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <type_traits>

#include "todatri/chart.hpp"
#include "todatri/operator.hpp"

namespace todatri {

template <typename Scalar>
struct MinusSeriesT {
    int S = 0, n = 0, k = 0;
    Eigen::Vector<Scalar, Eigen::Dynamic> e;                    // e_1..e_S
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> xi;   // xi(s-1, site_row(i,n))

    Scalar xiAt(int s, int i) const {
        if (s == 0) return Scalar(1);
        if (s < 0) return Scalar(0);
        return xi(s - 1, site_row(i, n));
    }
};
using MinusSeries = MinusSeriesT<double>;

template <typename Scalar>
struct PlusSeriesT {
    int S = 0, n = 0, k = 0;
    Eigen::Vector<Scalar, Eigen::Dynamic> phi;                     // window [-n, n], phi(i + n)
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> xiPlus;  // S x (2n+1), same window
    Eigen::Vector<Scalar, Eigen::Dynamic> w;                       // w_s = xi_s^+(-n)

    Scalar phiAt(int i) const { return phi(i + n); }
    Scalar xiAt(int s, int i) const {
        if (s == 0) return Scalar(1);
        if (s < 0) return Scalar(0);
        return xiPlus(s - 1, i + n);
    }
};
using PlusSeries = PlusSeriesT<double>;

namespace detail {

template <typename Scalar>
Scalar log_leading(Scalar a, int site) {
    if constexpr (std::is_floating_point_v<Scalar>) {
        if (!(a > 0.0)) throw NonPositiveLeading(site);
        return std::log(a);
    } else {
        return std::log(a);  // principal branch
    }
}

}  // namespace detail

// Order-by-order solve of L psi = E psi at p-.  At order s the lower orders
// determine a residual rho_s(i); averaging fixes e_s and the periodic part
// solves xi_s(i) - xi_s(i-k-1) = rho_s(i) - e_s along the single (k+1)-step
// cycle (gcd(n, k+1) = 1), anchored at xi_s(0) = 0.
template <typename Scalar>
MinusSeriesT<Scalar> minus_series(const TriangularOperator<Scalar>& L, int S) {
    validate(L);
    if (S < 1) throw std::invalid_argument("series order must be >= 1");
    const int n = L.n, k = L.k;
    MinusSeriesT<Scalar> ms;
    ms.S = S;
    ms.n = n;
    ms.k = k;
    ms.e.setZero(S);
    ms.xi.setZero(S, n);

    for (int s = 1; s <= S; ++s) {
        Eigen::Vector<Scalar, Eigen::Dynamic> rho(n);
        double scale = 1.0;
        for (int i = 1; i <= n; ++i) {
            Scalar r(0);
            for (int j = 1; j <= k; ++j) r += L.coeff(i, j) * ms.xiAt(s - k - 1 + j, i - j);
            for (int sp = 1; sp < s; ++sp) r -= ms.e(sp - 1) * ms.xiAt(s - sp, i);
            rho(site_row(i, n)) = r;
            scale = std::max(scale, std::abs(r));
        }
        const Scalar es = rho.sum() / double(n);
        ms.e(s - 1) = es;

        Scalar acc(0);
        int site = n;
        for (int t = 1; t < n; ++t) {
            site = 1 + site_row(site + k + 1, n);
            acc += rho(site_row(site, n)) - es;
            ms.xi(s - 1, site_row(site, n)) = acc;
        }
        const Scalar closure = acc + rho(site_row(n, n)) - es;
        if (std::abs(closure) > 1e-10 * scale)
            throw Error("cycle closure failed in the p- expansion");
    }
    return ms;
}

// Order-by-order solve of L psi = E psi at p+.  phi is anchored at phi_0 = 0
// and built from a_i^{(1)} = e^{phi_i - phi_{i-1}}; each order reduces to a
// first order recursion xi_s(i) - xi_s(i-1) = rhs_s(i) run in both directions
// from xi_s(0) = 0.  Orders are computed on widening windows so that the
// reported window [-n, n] is fully determined.
template <typename Scalar>
PlusSeriesT<Scalar> plus_series(const TriangularOperator<Scalar>& L, int S) {
    validate(L);
    if (S < 1) throw std::invalid_argument("series order must be >= 1");
    const int n = L.n, k = L.k;
    const int lo = -n - (k + 1) * S;  // lowest site any order ever reads

    Eigen::Vector<Scalar, Eigen::Dynamic> phi(n - lo + 1);  // sites lo..n at slot i - lo
    phi(-lo) = Scalar(0);
    for (int i = 1; i <= n; ++i)
        phi(i - lo) = phi(i - 1 - lo) + detail::log_leading(L.coeff(i, 1), 1 + site_row(i, n));
    for (int i = 0; i > lo; --i)
        phi(i - 1 - lo) = phi(i - lo) - detail::log_leading(L.coeff(i, 1), 1 + site_row(i, n));

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> xi =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(S, n - lo + 1);
    auto xiAt = [&](int s, int i) -> Scalar {
        if (s == 0) return Scalar(1);
        if (s < 0) return Scalar(0);
        return xi(s - 1, i - lo);
    };
    auto rhs = [&](int s, int i) -> Scalar {
        Scalar r(0);
        for (int j = 2; j <= k + 1; ++j)
            r += L.coeff(i, j) * std::exp(phi(i - j - lo) - phi(i - lo)) * xiAt(s - j + 1, i - j);
        return r;
    };

    for (int s = 1; s <= S; ++s) {
        const int As = -n - (k + 1) * (S - s);
        for (int i = 1; i <= n; ++i) xi(s - 1, i - lo) = xi(s - 1, i - 1 - lo) + rhs(s, i);
        for (int i = 0; i > As; --i) xi(s - 1, i - 1 - lo) = xi(s - 1, i - lo) - rhs(s, i);
    }

    PlusSeriesT<Scalar> ps;
    ps.S = S;
    ps.n = n;
    ps.k = k;
    ps.phi = phi.segment(-n - lo, 2 * n + 1);
    ps.xiPlus = xi.middleCols(-n - lo, 2 * n + 1);
    ps.w.resize(S);
    for (int s = 1; s <= S; ++s) ps.w(s - 1) = xi(s - 1, -n - lo);
    return ps;
}

// log(1 + sum_{s>=1} a_s z^s) truncated to the same order:
//   c_m = a_m - (1/m) sum_{r=1}^{m-1} r c_r a_{m-r}.
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> log_series(const Eigen::Vector<Scalar, Eigen::Dynamic>& a) {
    const int S = static_cast<int>(a.size());
    Eigen::Vector<Scalar, Eigen::Dynamic> c(S);
    for (int m = 1; m <= S; ++m) {
        Scalar acc = a(m - 1);
        for (int r = 1; r < m; ++r) acc -= double(r) / double(m) * c(r - 1) * a(m - r - 1);
        c(m - 1) = acc;
    }
    return c;
}

// Residue-form invariants: res_{p-} z^{-m} E(z) dln z = e_{m+k+1}.
template <typename Scalar>
Scalar hamiltonian_e(const TriangularOperator<Scalar>& L, int m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    return minus_series(L, m + L.k + 1).e(m + L.k);
}

// res_{p-} z^{-m} ln E(z) dln z, i.e. the z^m coefficient of ln(E(z) z^{k+1});
// the formal residue of z^{a} ln z dz is taken to vanish for a != -1.
template <typename Scalar>
Scalar hamiltonian_log_minus(const TriangularOperator<Scalar>& L, int m) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const auto ms = minus_series(L, m);
    return log_series<Scalar>(ms.e)(m - 1);
}

// (1/n) res_{p+} E^{-m-i} ln w(E) dE for i in {0,1}, i.e. the E^{m+i-1}
// coefficient of ln(w(E) r E^{-n}) / n.  The case m + i = 1 would need the
// excluded res E^{-1} ln E dE and is reported as unavailable.
template <typename Scalar>
Scalar hamiltonian_log_plus(const TriangularOperator<Scalar>& L, int m, int i) {
    if (m < 1 || i < 0 || i > 1) throw std::invalid_argument("need m >= 1 and i in {0,1}");
    if (m + i < 2) throw OrderUnavailable("res E^{-1} ln E dE has no formal value");
    const int ord = m + i - 1;
    const auto ps = plus_series(L, ord);
    return log_series<Scalar>(ps.w)(ord - 1) / double(L.n);
}

// ---- Explicit charts -------------------------------------------------------

inline double cyc(const Eigen::VectorXd& v, int i) {
    return v(site_row(i, static_cast<int>(v.size())));
}

// Chart coordinates from the p- expansion: (x, e1) for k = 1 and
// (x, y, e1, e2) for k = 2.
inline ChartPoint x_chart_from_operator(const TriangularOperatord& L) {
    if (L.k != 1 && L.k != 2) throw UnsupportedK(L.k);
    const auto ms = minus_series(L, L.k);
    ChartPoint pt;
    pt.n = L.n;
    pt.x = ms.xi.row(0).transpose();
    pt.e1 = ms.e(0);
    if (L.k == 1) {
        pt.chart = Chart::XK1;
    } else {
        pt.chart = Chart::XYK2;
        pt.y = ms.xi.row(1).transpose();
        pt.e2 = ms.e(1);
    }
    return pt;
}

inline TriangularOperatord operator_from_x_chart(const ChartPoint& pt) {
    const int n = pt.n;
    TriangularOperatord L;
    L.n = n;
    if (pt.chart == Chart::XK1) {
        L.k = 1;
        L.a.resize(n, 1);
        for (int i = 1; i <= n; ++i) L.a(i - 1, 0) = cyc(pt.x, i) - cyc(pt.x, i - 2) + pt.e1;
    } else if (pt.chart == Chart::XYK2) {
        L.k = 2;
        L.a.resize(n, 2);
        for (int i = 1; i <= n; ++i) {
            const double dx = cyc(pt.x, i) - cyc(pt.x, i - 3);
            L.a(i - 1, 1) = dx + pt.e1;
            L.a(i - 1, 0) = cyc(pt.y, i) - cyc(pt.y, i - 3) - dx * cyc(pt.x, i - 2) +
                            pt.e1 * (cyc(pt.x, i) - cyc(pt.x, i - 2)) + pt.e2;
        }
    } else {
        throw ChartMismatch("operator_from_x_chart expects an x chart");
    }
    for (int i = 1; i <= n; ++i)
        if (std::abs(L.a(i - 1, 0)) < kLeadingEps) throw LeadingCoefficientZero(i);
    return L;
}

// Potential chart for k = 1: phi_i = sum_{m<=i} ln a_m with phi_0 = 0, plus
// the leaf offset lnr = ln prod a^{(1)}.
inline ChartPoint phi_chart_from_operator(const TriangularOperatord& L) {
    if (L.k != 1) throw UnsupportedK(L.k);
    ChartPoint pt;
    pt.chart = Chart::PhiK1;
    pt.n = L.n;
    pt.x.resize(L.n);
    double acc = 0.0;
    for (int i = 1; i <= L.n; ++i) {
        acc += detail::log_leading(L.a(i - 1, 0), i);
        pt.x(i - 1) = acc;
    }
    pt.lnr = acc;
    return pt;
}

// Leading coefficients a_i^{(1)} = e^{phi_i - phi_{i-1}} from a PhiK1 chart
// point, the wrapped difference using the leaf offset.
inline Eigen::VectorXd phi_chart_leading(const ChartPoint& pt) {
    if (pt.chart != Chart::PhiK1) throw ChartMismatch("expected a phi chart");
    const int n = pt.n;
    Eigen::VectorXd a(n);
    a(0) = std::exp(pt.x(0) - pt.x(n - 1) + pt.lnr);
    for (int i = 2; i <= n; ++i) a(i - 1) = std::exp(pt.x(i - 1) - pt.x(i - 2));
    return a;
}

inline TriangularOperatord operator_from_phi_chart(const ChartPoint& pt) {
    TriangularOperatord L;
    L.n = pt.n;
    L.k = 1;
    L.a = phi_chart_leading(pt);
    return L;
}

}  // namespace todatri
