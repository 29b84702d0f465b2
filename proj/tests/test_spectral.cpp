#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "todatri/series.hpp"
#include "todatri/spectral.hpp"

using namespace todatri;

namespace {

TriangularOperatord trivial3() {
    return TriangularOperatord{3, 1, Eigen::MatrixXd::Ones(3, 1)};
}

// simple eigenvalues of L(w0) at a fixed w0, paired with w0
std::vector<CurvePoint> sample_points(const TriangularOperatord& L, const SpectralCurve& R,
                                      SplitMix64& rng, int want) {
    std::vector<CurvePoint> pts;
    while (static_cast<int>(pts.size()) < want) {
        const double radius = rng.uniform(0.7, 1.4);
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        const Complex w0 = std::polar(radius, angle);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(quasi_periodic_matrix<Complex>(L, w0),
                                                       false);
        for (int m = 0; m < L.n && static_cast<int>(pts.size()) < want; ++m) {
            const Complex E = es.eigenvalues()(m);
            try {
                pts.push_back(point_eigenvectors(L, R, w0, E));
            } catch (const NonSimpleEigenvalue&) {
            }
        }
    }
    return pts;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("quasi-periodic matrix of the constant n=3 operator") {
    const Complex w(0.3, -1.1);
    Eigen::MatrixXcd M = quasi_periodic_matrix<Complex>(trivial3(), w);
    Eigen::MatrixXcd expected(3, 3);
    expected << 0.0, w, w, 1.0, 0.0, w, 1.0, 1.0, 0.0;
    CHECK((M - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quasi-periodic matrix at w=0 is strictly lower triangular") {
    auto L = random_operator(7, 2, 3);
    Eigen::MatrixXd M = quasi_periodic_matrix<double>(L, 0.0);
    for (int r = 0; r < 7; ++r)
        for (int c = r; c < 7; ++c) CHECK(M(r, c) == 0.0);
}

TEST_CASE("matrix action agrees with the operator on quasi-periodic sequences") {
    for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
        auto L = random_operator(n, k, 17);
        SplitMix64 rng(99);
        const Complex w(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        Eigen::VectorXcd base(n);
        for (int i = 0; i < n; ++i) base(i) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
        auto psi = [&](int i) -> Complex {  // psi_{i-n} = w psi_i
            int q = 0, m = i;
            while (m < 1) { m += n; ++q; }
            Complex v = base(m - 1);
            for (int t = 0; t < q; ++t) v *= w;
            return v;
        };
        Eigen::VectorXcd viaMatrix = quasi_periodic_matrix<Complex>(L, w) * base;
        for (int i = 1; i <= n; ++i)
            CHECK(std::abs(viaMatrix(i - 1) - oracles::apply_window(L, psi, i)) < 1e-13);
    }
}

TEST_CASE("characteristic curve of the worked instance") {
    // det(E - L(w)) for the constant n=3, k=1 operator gives
    // R = w^2 - E^3 + 3 w E + w after normalization.
    auto R = characteristic_curve(trivial3());
    CHECK(R.coeff(2, 0) == 1.0);
    CHECK(R.coeff(0, 3) == -1.0);
    CHECK(R.coeff(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(R.coeff(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(R.terms.size() == 4);
}

TEST_CASE("curve support and r_{1,0} over random operators") {
    for (auto [n, k] : {std::pair{3, 1}, {5, 1}, {7, 1}, {5, 2}, {7, 2}}) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            auto L = random_operator(n, k, seed);
            SpectralCurve R;
            CHECK_NOTHROW(R = characteristic_curve(L));
            for (const auto& [ij, v] : R.terms)
                CHECK(curve_support_allowed(n, k, ij.first, ij.second));
            const double prod = leading_product(L);
            CHECK(std::abs(R.coeff(1, 0) - prod) <= 1e-9 * (1.0 + std::abs(prod)));
        }
    }
}

TEST_CASE("even periods: corner terms and r_{1,0} are parity independent") {
    auto L = random_operator(4, 2, 6);  // gcd(4, 3) = 1
    auto R = characteristic_curve(L);
    CHECK(R.coeff(3, 0) == 1.0);
    CHECK(R.coeff(0, 4) == -1.0);
    const double prod = leading_product(L);
    CHECK(std::abs(R.coeff(1, 0) - prod) <= 1e-9 * (1.0 + std::abs(prod)));
    CHECK(std::abs(minus_series(L, 3).e(2)) < 1e-12);  // e_{k+1}
}

TEST_CASE("curve coefficients vanish on pure powers of E below n") {
    auto R = characteristic_curve(random_operator(7, 2, 5));
    for (int j = 0; j < 7; ++j) CHECK(R.coeff(0, j) == 0.0);
}

TEST_CASE("eigen-consistency: roots of det(E - L(w0)) lie on the curve") {
    for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
        auto L = random_operator(n, k, 23);
        auto R = characteristic_curve(L);
        SplitMix64 rng(5);
        for (int trial = 0; trial < 5; ++trial) {
            const Complex w0 = std::polar(rng.uniform(0.5, 1.5), rng.uniform(0.0, 2 * M_PI));
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(quasi_periodic_matrix<Complex>(L, w0),
                                                           false);
            for (int m = 0; m < n; ++m) {
                const Complex E = es.eigenvalues()(m);
                CHECK(std::abs(R.eval(w0, E)) <= 1e-8 * std::max(1.0, R.scale_at(w0, E)));
            }
        }
    }
}

TEST_CASE("Floquet polynomial of the worked instance is w^2 + w") {
    Eigen::VectorXd p = floquet_polynomial(trivial3());
    CHECK(p(0) == 0.0);
    CHECK(p(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p(2) == 1.0);
}

TEST_CASE("Floquet roots: worked instance and Vieta") {
    auto roots = floquet_roots(trivial3());
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0] - Complex(-1.0, 0.0)) < 1e-12);

    for (auto [n, k] : {std::pair{5, 2}, {7, 2}}) {
        auto L = random_operator(n, k, 2);
        auto R = characteristic_curve(L);
        // for odd n the linear coefficient is the product of the leading band
        CHECK(floquet_polynomial(R)(1) ==
              doctest::Approx(leading_product(L)).epsilon(1e-11));
        auto W = floquet_roots(R);
        Complex prod = 1.0;
        for (auto w : W) prod *= w;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const double r10 = floquet_polynomial(R)(1);
        CHECK(std::abs(prod - sign * r10) < 1e-9 * (1.0 + std::abs(r10)));
    }
}

TEST_CASE("Floquet roots move O(eps) under O(eps) coefficient perturbations") {
    auto L = random_operator(5, 2, 31);
    auto W0 = floquet_roots(L);
    auto L2 = L;
    SplitMix64 rng(77);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 2; ++j) L2.a(i, j) += rng.uniform(-1e-6, 1e-6);
    auto W1 = floquet_roots(L2);
    for (std::size_t m = 0; m < W0.size(); ++m) CHECK(std::abs(W1[m] - W0[m]) < 1e-3);
}

TEST_CASE("point eigenvectors at the worked instance kernel point") {
    auto L = trivial3();
    auto pt = point_eigenvectors(L, Complex(-1.0, 0.0), Complex(0.0, 0.0));
    // psi is proportional to (1, -1, 1); the phase fix makes it exact
    Eigen::VectorXcd expected(3);
    expected << 1.0, -1.0, 1.0;
    expected /= expected.norm();
    CHECK((pt.psi - expected).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pt.psiDual - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("point eigenvectors: residuals and nondegenerate pairing at random points") {
    for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
        auto L = random_operator(n, k, 41);
        auto R = characteristic_curve(L);
        SplitMix64 rng(13);
        for (const auto& pt : sample_points(L, R, rng, 10)) {
            Eigen::MatrixXcd A = quasi_periodic_matrix<Complex>(L, pt.w) -
                                 pt.E * Eigen::MatrixXcd::Identity(n, n);
            const double scale = quasi_periodic_matrix<Complex>(L, pt.w).norm();
            CHECK((A * pt.psi).norm() <= 1e-9 * scale);
            CHECK((pt.psiDual.transpose() * A).norm() <= 1e-9 * scale);
            CHECK(std::abs(pt.psi.norm() - 1.0) < 1e-12);
            CHECK(std::abs(pt.psiDual.norm() - 1.0) < 1e-12);
            Complex pairing = 0.0;
            for (int i = 0; i < n; ++i) pairing += pt.psiDual(i) * pt.psi(i);
            CHECK(std::abs(pairing) > 1e-6);
        }
    }
}

TEST_CASE("point eigenvectors reject points off the curve") {
    auto L = trivial3();
    CHECK_THROWS_AS(point_eigenvectors(L, Complex(-1.0, 0.0), Complex(0.5, 0.0)), NotOnCurve);
}

TEST_CASE("point eigenvectors reject non-simple points") {
    // (w, E) = (1, -1) is a double point of the worked-instance curve and
    // L(1) is symmetric there, so the eigenspace is two-dimensional.
    auto L = trivial3();
    CHECK_THROWS_AS(point_eigenvectors(L, Complex(1.0, 0.0), Complex(-1.0, 0.0)),
                    NonSimpleEigenvalue);
}

TEST_CASE("descendent weights the bands by their order") {
    auto L3 = trivial3();
    Eigen::MatrixXd d = descendent(L3);
    CHECK(d.col(0).isApprox(Eigen::VectorXd::Ones(3)));
    CHECK(d.col(1).isApprox(2.0 * Eigen::VectorXd::Ones(3)));

    auto L = random_operator(7, 2, 9);
    Eigen::MatrixXd d2 = descendent(L);
    for (int i = 0; i < 7; ++i) {
        CHECK(d2(i, 0) == L.a(i, 0));
        CHECK(d2(i, 1) == 2.0 * L.a(i, 1));
        CHECK(d2(i, 2) == 3.0);
    }
}

TEST_CASE("descendent of descendent squares the band weights") {
    auto L = random_operator(5, 2, 10);
    Eigen::MatrixXd d = descendent(L);
    // applying the band multiplier twice
    Eigen::MatrixXd dd(5, 3);
    for (int j = 1; j <= 3; ++j) dd.col(j - 1) = double(j) * d.col(j - 1);
    for (int i = 0; i < 5; ++i)
        for (int j = 1; j <= 2; ++j) CHECK(dd(i, j - 1) == double(j) * double(j) * L.a(i, j - 1));
}

TEST_CASE("the two expressions for the curve differential agree: ratio is 1") {
    // calibration point first
    auto L3 = trivial3();
    auto R3 = characteristic_curve(L3);
    auto pt3 = point_eigenvectors(L3, R3, Complex(-1.0), Complex(0.0));
    const Complex rhoStar = domega_identity_ratio(L3, R3, pt3);
    CHECK(std::abs(rhoStar - Complex(1.0)) < 1e-10);

    for (auto [n, k] : {std::pair{3, 1}, {5, 1}, {5, 2}, {7, 2}}) {
        auto L = random_operator(n, k, 51 + n + k);
        auto R = characteristic_curve(L);
        SplitMix64 rng(7 * n + k);
        for (const auto& pt : sample_points(L, R, rng, 6)) {
            const Complex rho = domega_identity_ratio(L, R, pt);
            CHECK(std::abs(rho - rhoStar) < 1e-8);
        }
    }
}

}  // TEST_SUITE
