#pragma once

// Frame parametrization of operators: a pair (Phi, W) of a k x n matrix of
// rank k and k distinct nonzero Floquet multipliers determines L through
// Cramer's rule applied to L phi^l = 0, and conversely Phi collects the
// kernel vectors of L(w_l) at E = 0.  Everything here is complex: real
// operators generically have complex Floquet multipliers.

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "todatri/operator.hpp"
#include "todatri/spectral.hpp"

namespace todatri {

struct FramePair {
    Eigen::MatrixXcd Phi;  // row l = phi^l, column i = site i (1..n)
    Eigen::VectorXcd W;    // Floquet multipliers w_l

    int k() const { return static_cast<int>(Phi.rows()); }
    int n() const { return static_cast<int>(Phi.cols()); }
};

inline void validate_frame(const FramePair& F, double sepTol = 1e-8) {
    const int k = F.k(), n = F.n();
    if (k < 1 || n < k + 2 || F.W.size() != k)
        throw std::invalid_argument("frame dimensions are inconsistent");
    double maxW = F.W.cwiseAbs().maxCoeff();
    for (int a = 0; a < k; ++a) {
        if (std::abs(F.W(a)) < sepTol * std::max(1.0, maxW))
            throw DegenerateRoots("Floquet multiplier too close to zero");
        for (int b = a + 1; b < k; ++b)
            if (std::abs(F.W(a) - F.W(b)) < sepTol * maxW)
                throw DegenerateRoots("Floquet multipliers not separated");
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(F.Phi);
    if (svd.singularValues()(k - 1) < 1e-10 * svd.singularValues()(0))
        throw std::invalid_argument("frame matrix is rank deficient");
}

// Column of the unique quasi-periodic extension, phi^l_{i-n} = w_l phi^l_i.
inline Eigen::VectorXcd extend_frame(const FramePair& F, int i) {
    const int n = F.n();
    int q = (i - 1) / n;
    if (i - 1 < 0 && (i - 1) % n != 0) --q;  // floor division
    const int i0 = i - q * n;                // in 1..n
    Eigen::VectorXcd col = F.Phi.col(i0 - 1);
    for (int l = 0; l < F.k(); ++l) {
        Complex w = F.W(l);
        if (q >= 0)
            for (int t = 0; t < q; ++t) col(l) /= w;
        else
            for (int t = 0; t < -q; ++t) col(l) *= w;
    }
    return col;
}

namespace detail {

inline Complex det_of_columns(const std::vector<Eigen::VectorXcd>& cols) {
    const int k = static_cast<int>(cols.size());
    if (k == 0) return Complex(1.0);
    Eigen::MatrixXcd M(k, k);
    for (int c = 0; c < k; ++c) M.col(c) = cols[c];
    return M.determinant();
}

}  // namespace detail

// Cramer reconstruction: a_i^{(j)} = -|phi_{i-1},..,phi_{i-k}; column j
// replaced by phi_{i-k-1}| / |phi_{i-1},..,phi_{i-k}|.  The result solves
// sum_j a_i^{(j)} phi_{i-j} = -phi_{i-k-1}.
inline TriangularOperatorcd frame_to_operator(const FramePair& F, double minorTol = 1e-10) {
    validate_frame(F);
    const int k = F.k(), n = F.n();
    TriangularOperatorcd L{n, k, Eigen::MatrixXcd::Zero(n, k)};
    for (int i = 1; i <= n; ++i) {
        std::vector<Eigen::VectorXcd> cols(k + 1);
        double scale = 1.0;
        for (int j = 1; j <= k + 1; ++j) {
            cols[j - 1] = extend_frame(F, i - j);
            if (j <= k) scale *= cols[j - 1].norm();
        }
        std::vector<Eigen::VectorXcd> denomCols(cols.begin(), cols.begin() + k);
        const Complex D = detail::det_of_columns(denomCols);
        if (std::abs(D) <= minorTol * std::max(scale, 1e-300)) throw SingularMinor(i);
        for (int j = 1; j <= k; ++j) {
            std::vector<Eigen::VectorXcd> numCols = denomCols;
            numCols[j - 1] = cols[k];
            L.a(i - 1, j - 1) = -detail::det_of_columns(numCols) / D;
        }
    }
    return L;
}

inline std::optional<TriangularOperatord> to_real_operator(const TriangularOperatorcd& L,
                                                           double tol = 1e-9) {
    if (L.a.imag().cwiseAbs().maxCoeff() > tol * (1.0 + L.a.real().cwiseAbs().maxCoeff()))
        return std::nullopt;
    return TriangularOperatord{L.n, L.k, L.a.real()};
}

// Kernel vectors of L(w_l) at E = 0, one per Floquet multiplier, with the
// deterministic phase fix of point_eigenvectors.
inline FramePair operator_to_frame(const TriangularOperatord& L) {
    const SpectralCurve R = characteristic_curve(L);
    const auto roots = floquet_roots(R);
    FramePair F;
    F.W.resize(L.k);
    F.Phi.resize(L.k, L.n);
    for (int l = 0; l < L.k; ++l) {
        F.W(l) = roots[l];
        try {
            F.Phi.row(l) = point_eigenvectors(L, R, roots[l], Complex(0.0)).psi.transpose();
        } catch (const NonSimpleEigenvalue&) {
            throw NonSimpleKernel("kernel of L(w_l) is not one-dimensional");
        }
    }
    return F;
}

// Values r_l psi_i^+(p_l) of the dual kernel vectors, from the linear system
//   sum_l u_l phi^l_{i-j} = 0 (j = 2..k),   sum_l u_l phi^l_{i-k-1} = 1,
// solved in closed form: u_l = (-1)^{k+l} |rows != l of phi_{i-2},..,phi_{i-k}|
// / |phi_{i-2},..,phi_{i-k-1}|.
inline Eigen::VectorXcd dual_minors(const FramePair& F, int i, double minorTol = 1e-10) {
    const int k = F.k();
    std::vector<Eigen::VectorXcd> cols(k);  // sites i-2 .. i-k-1
    double scale = 1.0;
    for (int m = 0; m < k; ++m) {
        cols[m] = extend_frame(F, i - 2 - m);
        scale *= cols[m].norm();
    }
    const Complex denom = detail::det_of_columns(cols);
    if (std::abs(denom) <= minorTol * std::max(scale, 1e-300)) throw SingularMinor(i);
    Eigen::VectorXcd u(k);
    for (int l = 1; l <= k; ++l) {
        Eigen::MatrixXcd B(k - 1, k - 1);
        for (int c = 0; c < k - 1; ++c) {
            int rr = 0;
            for (int r = 0; r < k; ++r) {
                if (r == l - 1) continue;
                B(rr++, c) = cols[c](r);
            }
        }
        const Complex minor = (k == 1) ? Complex(1.0) : B.determinant();
        u(l - 1) = (((k + l) % 2 == 0) ? 1.0 : -1.0) * minor / denom;
    }
    return u;
}

}  // namespace todatri
