#pragma once

// n-periodic strictly lower triangular difference operators
//
//   L = T^{-k-1} + sum_{j=1..k} a_i^{(j)} T^{-j},   a_i^{(j)} = a_{i+n}^{(j)},
//
// where T is the shift operator, (T psi)_i = psi_{i+1}.  Sites are indexed
// 1..n and index 0 denotes the residue class of n.  The coefficient of
// T^{-k-1} is fixed to 1 and a_i^{(1)} must not vanish.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <type_traits>

#include "todatri/errors.hpp"

namespace todatri {

using Complex = std::complex<double>;

inline constexpr double kLeadingEps = 1e-12;

// Storage row (0-based) of an arbitrary integer site index.
inline int site_row(int i, int n) {
    int m = (i - 1) % n;
    if (m < 0) m += n;
    return m;
}

template <typename Scalar>
struct TriangularOperator {
    int n = 0;  // period
    int k = 0;  // L has bands T^{-1}..T^{-k} plus the unit T^{-k-1} band
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a;  // a(i-1, j-1) = a_i^{(j)}

    // a_i^{(j)} for any integer site i and j in 1..k+1 (j = k+1 yields 1).
    Scalar coeff(int i, int j) const {
        if (j == k + 1) return Scalar(1);
        return a(site_row(i, n), j - 1);
    }
};

using TriangularOperatord = TriangularOperator<double>;
using TriangularOperatorcd = TriangularOperator<Complex>;

enum class FlowTag { Xi, Eta };

template <typename Scalar>
void validate(const TriangularOperator<Scalar>& L, double epsMin = kLeadingEps) {
    if (L.n < 1 || L.k < 1 || L.a.rows() != L.n || L.a.cols() != L.k)
        throw std::invalid_argument("operator table has inconsistent dimensions");
    if (L.k + 1 > L.n) throw OrderExceedsPeriod(L.n, L.k);
    if (std::gcd(L.n, L.k + 1) != 1) throw NotCoprime(L.n, L.k + 1);
    for (int i = 1; i <= L.n; ++i)
        if (std::abs(L.a(i - 1, 0)) < epsMin) throw LeadingCoefficientZero(i);
}

// Coefficients of the formal adjoint L* = T^{k+1} + sum_j b_i^{(j)} T^{j},
// an upper triangular operator.  Kept as a distinct type so that taking the
// adjoint again recovers the original lower triangular table exactly.
template <typename Scalar>
struct AdjointCoefficients {
    int n = 0;
    int k = 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> b;  // b(i-1, j-1) = b_i^{(j)}
};

template <typename Scalar>
AdjointCoefficients<Scalar> adjoint_coefficients(const TriangularOperator<Scalar>& L) {
    validate(L);
    AdjointCoefficients<Scalar> B{L.n, L.k, {}};
    B.b.resize(L.n, L.k);
    for (int i = 1; i <= L.n; ++i)
        for (int j = 1; j <= L.k; ++j) B.b(i - 1, j - 1) = L.coeff(i + j, j);
    return B;
}

template <typename Scalar>
TriangularOperator<Scalar> adjoint_coefficients(const AdjointCoefficients<Scalar>& B) {
    TriangularOperator<Scalar> L{B.n, B.k, {}};
    L.a.resize(B.n, B.k);
    for (int i = 1; i <= B.n; ++i)
        for (int j = 1; j <= B.k; ++j) L.a(i - 1, j - 1) = B.b(site_row(i - j, B.n), j - 1);
    return L;
}

// Deterministic 64-bit stream; used instead of <random> engines so that
// sampled instances are identical across platforms.
struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x632BE59BD9B4E019ULL * (stream + 1)));
    g.s ^= 0x9E6C63D0876A9F4BULL * (index + 1);
    g.next();
    return g.next();
}

struct SampleRange {
    double leadLo = 0.75;   // a^{(1)} is drawn from [leadLo, leadHi], strictly positive
    double leadHi = 1.35;
    double band = 0.25;     // a^{(j)}, j >= 2, is drawn from [-band, band]
};

inline TriangularOperatord random_operator(int n, int k, std::uint64_t seed,
                                           SampleRange range = {}) {
    if (k + 1 > n) throw OrderExceedsPeriod(n, k);
    if (std::gcd(n, k + 1) != 1) throw NotCoprime(n, k + 1);
    if (!(0.0 < range.leadLo && range.leadLo < range.leadHi) || range.band < 0.0)
        throw InvalidRange("a^(1) range must satisfy 0 < lo < hi and band >= 0");
    SplitMix64 g(derive_seed(seed, static_cast<std::uint64_t>(n) << 8 | static_cast<std::uint64_t>(k), 0));
    TriangularOperatord L{n, k, {}};
    L.a.resize(n, k);
    for (int i = 0; i < n; ++i) L.a(i, 0) = g.uniform(range.leadLo, range.leadHi);
    for (int j = 1; j < k; ++j)
        for (int i = 0; i < n; ++i) L.a(i, j) = g.uniform(-range.band, range.band);
    validate(L);
    return L;
}

// Product of the leading coefficients, prod_i a_i^{(1)}.
template <typename Scalar>
Scalar leading_product(const TriangularOperator<Scalar>& L) {
    Scalar p(1);
    for (int i = 0; i < L.n; ++i) p *= L.a(i, 0);
    return p;
}

template <typename Scalar>
bool approx_equal(const TriangularOperator<Scalar>& A, const TriangularOperator<Scalar>& B,
                  double tol) {
    if (A.n != B.n || A.k != B.k) return false;
    return (A.a - B.a).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace todatri
