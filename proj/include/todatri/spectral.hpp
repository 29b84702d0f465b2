#pragma once

// Spectral data of a periodic triangular operator: the quasi-periodic
// restriction L(w), the bivariate characteristic polynomial
//
//   R(w, E) = w^{k+1} - E^n + sum_{i>0, j>=0, ni+(k+1)j < n(k+1)} r_ij w^i E^j,
//
// its Floquet polynomial det L(w) = R(w, 0) at E = 0, Bloch eigenvectors at
// points of the curve, and the band-weighted descendent operator.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "todatri/operator.hpp"

namespace todatri {

// Matrix of L restricted to the quasi-periodic space { psi : psi_{i-n} = w psi_i }.
// Row i collects (L psi)_i = sum_j a_i^{(j)} psi_{i-j} with one wrap at most,
// a wrapped target contributing the factor w.
template <typename WScalar>
Eigen::Matrix<WScalar, Eigen::Dynamic, Eigen::Dynamic> quasi_periodic_matrix(
    const TriangularOperatord& L, WScalar w) {
    const int n = L.n;
    Eigen::Matrix<WScalar, Eigen::Dynamic, Eigen::Dynamic> M =
        Eigen::Matrix<WScalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= L.k + 1; ++j) {
            const double c = L.coeff(i, j);
            const int t = i - j;
            if (t >= 1)
                M(i - 1, t - 1) += WScalar(c);
            else
                M(i - 1, t + n - 1) += WScalar(c) * w;
        }
    }
    return M;
}

// Characteristic polynomial det(lambda I - A) by the Faddeev-LeVerrier
// recursion; returns coefficients c_0..c_n ascending, c_n = 1.
inline Eigen::VectorXd characteristic_polynomial(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    c(n) = 1.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    c(n - 1) = -A.trace();
    for (int m = 2; m <= n; ++m) {
        M = A * M + c(n - m + 1) * Eigen::MatrixXd::Identity(n, n);
        c(n - m) = -(A * M).trace() / m;
    }
    return c;
}

struct SpectralCurve {
    int n = 0, k = 0;
    std::map<std::pair<int, int>, double> terms;  // (w-degree, E-degree) -> r_ij

    double coeff(int i, int j) const {
        auto it = terms.find({i, j});
        return it == terms.end() ? 0.0 : it->second;
    }
    Complex eval(Complex w, Complex E) const {
        Complex r = 0.0;
        for (const auto& [ij, v] : terms) r += v * ipow(w, ij.first) * ipow(E, ij.second);
        return r;
    }
    Complex dw(Complex w, Complex E) const {
        Complex r = 0.0;
        for (const auto& [ij, v] : terms)
            if (ij.first > 0) r += v * double(ij.first) * ipow(w, ij.first - 1) * ipow(E, ij.second);
        return r;
    }
    Complex dE(Complex w, Complex E) const {
        Complex r = 0.0;
        for (const auto& [ij, v] : terms)
            if (ij.second > 0) r += v * double(ij.second) * ipow(w, ij.first) * ipow(E, ij.second - 1);
        return r;
    }
    // Term-wise absolute evaluation; the natural residual scale at (w, E).
    double scale_at(Complex w, Complex E) const {
        double s = 0.0;
        for (const auto& [ij, v] : terms)
            s += std::abs(v) * std::pow(std::abs(w), ij.first) * std::pow(std::abs(E), ij.second);
        return s;
    }

    static Complex ipow(Complex z, int p) {
        Complex r = 1.0;
        for (int q = 0; q < p; ++q) r *= z;
        return r;
    }
};

inline bool curve_support_allowed(int n, int k, int i, int j) {
    if (i == k + 1 && j == 0) return true;
    if (i == 0 && j == n) return true;
    return i > 0 && j >= 0 && n * i + (k + 1) * j < n * (k + 1);
}

// det(E I - L(w)) computed at k+2 Chebyshev nodes in w and interpolated per
// E-degree, then rescaled so the E^n coefficient is -1.  The w^{k+1}
// coefficient is then +1 for either parity of n (the signs of the two
// n-cycles cancel) and is snapped exactly.  Terms outside the allowed
// support beyond tolerance raise ShapeViolation.
inline SpectralCurve characteristic_curve(const TriangularOperatord& L,
                                          double shapeTol = 1e-9) {
    validate(L);
    const int n = L.n, k = L.k, d = k + 2;

    Eigen::VectorXd nodes(d);
    for (int q = 0; q < d; ++q)
        nodes(q) = 1.5 + 0.5 * std::cos(M_PI * (2.0 * q + 1.0) / (2.0 * d));

    Eigen::MatrixXd values(d, n + 1);  // row: node, col: E-degree
    for (int q = 0; q < d; ++q) {
        Eigen::MatrixXd M = quasi_periodic_matrix<double>(L, nodes(q));
        values.row(q) = characteristic_polynomial(M).transpose();
    }

    Eigen::MatrixXd V(d, d);
    for (int q = 0; q < d; ++q)
        for (int p = 0; p < d; ++p) V(q, p) = std::pow(nodes(q), p);
    const auto lu = V.fullPivLu();

    // raw[p][j]: coefficient of w^p E^j in det(E I - L(w))
    Eigen::MatrixXd raw(d, n + 1);
    for (int j = 0; j <= n; ++j) raw.col(j) = lu.solve(values.col(j));

    SpectralCurve R{n, k, {}};
    double maxAbs = raw.cwiseAbs().maxCoeff();
    const double eps = shapeTol * maxAbs;

    for (int p = 0; p <= k + 1; ++p) {
        for (int j = 0; j <= n; ++j) {
            double r = -raw(p, j);  // normalize: E^n coefficient becomes -1
            if (p == 0 && j == n) {
                R.terms[{0, n}] = -1.0;
                continue;
            }
            if (p == k + 1 && j == 0) {
                if (std::abs(std::abs(r) - 1.0) > shapeTol) throw ShapeViolation(p, j, r);
                R.terms[{p, j}] = r > 0 ? 1.0 : -1.0;
                continue;
            }
            if (std::abs(r) <= eps) continue;
            if (!curve_support_allowed(n, k, p, j)) throw ShapeViolation(p, j, r);
            R.terms[{p, j}] = r;
        }
    }
    return R;
}

// det L(w) = w^{k+1} + sum_{i=1..k} r_{i,0} w^i, ascending coefficients,
// leading coefficient normalized to +1.  The constant term is always zero.
inline Eigen::VectorXd floquet_polynomial(const SpectralCurve& R) {
    const double s = R.coeff(R.k + 1, 0);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(R.k + 2);
    c(R.k + 1) = 1.0;
    for (int i = 1; i <= R.k; ++i) c(i) = s * R.coeff(i, 0);
    return c;
}

inline Eigen::VectorXd floquet_polynomial(const TriangularOperatord& L) {
    return floquet_polynomial(characteristic_curve(L));
}

// The k nonzero roots of det L(w), i.e. the roots of det L(w) / w, computed
// from the companion matrix and sorted by (real, imaginary) part.
inline std::vector<Complex> floquet_roots(const SpectralCurve& R, double sepTol = 1e-8) {
    const int k = R.k;
    Eigen::VectorXd p = floquet_polynomial(R);  // p(1..k+1) are the reduced coefficients
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, k);
    for (int r = 1; r < k; ++r) C(r, r - 1) = 1.0;
    for (int r = 0; r < k; ++r) C(r, k - 1) = -p(r + 1);
    Eigen::VectorXcd ev = C.eigenvalues();
    std::vector<Complex> roots(ev.data(), ev.data() + k);
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    double maxAbs = 0.0;
    for (auto r : roots) maxAbs = std::max(maxAbs, std::abs(r));
    for (std::size_t a = 0; a < roots.size(); ++a)
        for (std::size_t b = a + 1; b < roots.size(); ++b)
            if (std::abs(roots[a] - roots[b]) < sepTol * maxAbs)
                throw DegenerateRoots("Floquet multipliers closer than tolerance");
    return roots;
}

inline std::vector<Complex> floquet_roots(const TriangularOperatord& L, double sepTol = 1e-8) {
    return floquet_roots(characteristic_curve(L), sepTol);
}

struct CurvePoint {
    Complex w, E;
    Eigen::VectorXcd psi;      // right null vector of L(w) - E
    Eigen::VectorXcd psiDual;  // left null vector; psiDual^T (L(w) - E) = 0
};

// Deterministic phase: the largest-magnitude entry is made real positive.
inline void fix_phase(Eigen::VectorXcd& v) {
    int idx = 0;
    double best = -1.0;
    for (int i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > best + 1e-15) { best = std::abs(v(i)); idx = i; }
    Complex ph = v(idx) / std::abs(v(idx));
    v /= ph;
}

// Unit right/left null vectors of L(w) - E at a simple point of the curve,
// taken from the smallest singular pair.
inline CurvePoint point_eigenvectors(const TriangularOperatord& L, const SpectralCurve& R,
                                     Complex w, Complex E, double onCurveTol = 1e-8,
                                     double simpleTol = 1e-8) {
    const int n = L.n;
    if (std::abs(R.eval(w, E)) > onCurveTol * std::max(1.0, R.scale_at(w, E)))
        throw NotOnCurve("R(w,E) does not vanish within tolerance");
    Eigen::MatrixXcd A = quasi_periodic_matrix<Complex>(L, w);
    A -= E * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (n >= 2 && sv(n - 2) - sv(n - 1) <= simpleTol * std::max(sv(0), 1.0))
        throw NonSimpleEigenvalue("two smallest singular values coincide");
    CurvePoint pt;
    pt.w = w;
    pt.E = E;
    pt.psi = svd.matrixV().col(n - 1);
    pt.psiDual = svd.matrixU().col(n - 1).conjugate();
    fix_phase(pt.psi);
    fix_phase(pt.psiDual);
    return pt;
}

inline CurvePoint point_eigenvectors(const TriangularOperatord& L, Complex w, Complex E,
                                     double onCurveTol = 1e-8, double simpleTol = 1e-8) {
    return point_eigenvectors(L, characteristic_curve(L), w, E, onCurveTol, simpleTol);
}

// Band-weighted descendent L^{(1)} = sum_{j=1..k+1} j a_i^{(j)} T^{-j};
// column j-1 holds the weighted band, the last column the weight k+1.
inline Eigen::MatrixXd descendent(const TriangularOperatord& L) {
    Eigen::MatrixXd d(L.n, L.k + 1);
    for (int i = 1; i <= L.n; ++i)
        for (int j = 1; j <= L.k + 1; ++j) d(i - 1, j - 1) = j * L.coeff(i, j);
    return d;
}

// Apply a banded table (columns = bands T^{-1}..T^{-k-1}) to a vector on the
// quasi-periodic space, wrapped targets picking up the factor w.
inline Eigen::VectorXcd apply_banded(const Eigen::MatrixXd& bands, Complex w,
                                     const Eigen::VectorXcd& psi) {
    const int n = static_cast<int>(bands.rows());
    const int nb = static_cast<int>(bands.cols());
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    for (int i = 1; i <= n; ++i) {
        Complex acc = 0.0;
        for (int j = 1; j <= nb; ++j) {
            const int t = i - j;
            acc += bands(i - 1, j - 1) * (t >= 1 ? psi(t - 1) : w * psi(t + n - 1));
        }
        out(i - 1) = acc;
    }
    return out;
}

// Ratio of the two expressions for the same differential on the curve:
//   [-(dR/dw)/(dR/dE) <psi+ psi>] / [ <psi+ L^{(1)} psi> / (n w) ].
// It is 1 for every simple point of every valid operator; evaluating it is a
// machine check of that identity.
inline Complex domega_identity_ratio(const TriangularOperatord& L, const SpectralCurve& R,
                                     const CurvePoint& pt) {
    const int n = L.n;
    const Complex dE = R.dE(pt.w, pt.E);
    const Complex dw = R.dw(pt.w, pt.E);
    if (std::abs(dE) < 1e-12 * std::max(1.0, R.scale_at(pt.w, pt.E)))
        throw DerivativeVanishes("dR/dE vanishes at the point");
    Complex pairing = 0.0;  // <psi+ psi>
    for (int i = 0; i < n; ++i) pairing += pt.psiDual(i) * pt.psi(i);
    pairing /= double(n);
    Eigen::VectorXcd desc = apply_banded(descendent(L), pt.w, pt.psi);
    Complex descPairing = 0.0;  // <psi+ (L^{(1)} psi)>
    for (int i = 0; i < n; ++i) descPairing += pt.psiDual(i) * desc(i);
    descPairing /= double(n);
    const Complex num = -(dw / dE) * pairing;
    const Complex den = descPairing / (double(n) * pt.w);
    return num / den;
}

}  // namespace todatri
