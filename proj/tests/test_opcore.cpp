#include <doctest.h>

#include "todatri/io.hpp"
#include "todatri/operator.hpp"

using namespace todatri;

namespace {

TriangularOperatord make_op(int n, int k, std::initializer_list<double> firstBand) {
    TriangularOperatord L{n, k, Eigen::MatrixXd::Zero(n, k)};
    int i = 0;
    for (double v : firstBand) L.a(i++, 0) = v;
    return L;
}

}  // namespace

TEST_SUITE("opcore") {

TEST_CASE("validate accepts the constant operator") {
    auto L = make_op(3, 1, {1.0, 1.0, 1.0});
    CHECK_NOTHROW(validate(L));
}

TEST_CASE("validate rejects a vanishing leading coefficient with its site") {
    auto L = make_op(3, 1, {1.0, 0.0, 1.0});
    try {
        validate(L);
        FAIL("expected LeadingCoefficientZero");
    } catch (const LeadingCoefficientZero& e) {
        CHECK(e.site == 2);
    }
}

TEST_CASE("validate rejects non-coprime (n, k+1)") {
    auto L = make_op(4, 1, {1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(validate(L), NotCoprime);
}

TEST_CASE("validate rejects k+1 > n") {
    TriangularOperatord L{2, 2, Eigen::MatrixXd::Ones(2, 2)};
    CHECK_THROWS_AS(validate(L), OrderExceedsPeriod);
}

TEST_CASE("adjoint of constant coefficients is constant") {
    auto L = make_op(3, 1, {1.0, 1.0, 1.0});
    auto B = adjoint_coefficients(L);
    CHECK(B.b(0, 0) == 1.0);
    CHECK(B.b(1, 0) == 1.0);
    CHECK(B.b(2, 0) == 1.0);
}

TEST_CASE("adjoint shifts each band by its own order") {
    auto L = make_op(3, 1, {2.0, 3.0, 5.0});
    auto B = adjoint_coefficients(L);
    // b_i^{(1)} = a_{i+1}^{(1)}
    CHECK(B.b(0, 0) == 3.0);
    CHECK(B.b(1, 0) == 5.0);
    CHECK(B.b(2, 0) == 2.0);
}

TEST_CASE("double adjoint restores the table bit-exactly") {
    for (auto [n, k] : {std::pair{3, 1}, {5, 2}, {7, 2}}) {
        auto L = random_operator(n, k, 11);
        auto back = adjoint_coefficients(adjoint_coefficients(L));
        CHECK(back.a == L.a);
    }
}

TEST_CASE("random_operator is a deterministic function of its arguments") {
    auto A = random_operator(5, 1, 7);
    auto B = random_operator(5, 1, 7);
    CHECK(A.a == B.a);
    auto C = random_operator(5, 1, 8);
    CHECK(A.a != C.a);
}

TEST_CASE("random_operator output passes validate") {
    for (auto [n, k] : {std::pair{3, 1}, {5, 1}, {7, 1}, {5, 2}, {7, 2}, {9, 1}})
        for (std::uint64_t seed = 0; seed < 25; ++seed) CHECK_NOTHROW(validate(random_operator(n, k, seed)));
}

TEST_CASE("random_operator rejects non-coprime and bad ranges") {
    CHECK_THROWS_AS(random_operator(4, 1, 0), NotCoprime);
    CHECK_THROWS_AS(random_operator(5, 1, 0, SampleRange{-1.0, 1.0, 0.5}), InvalidRange);
    CHECK_THROWS_AS(random_operator(5, 1, 0, SampleRange{1.0, 0.5, 0.5}), InvalidRange);
}

TEST_CASE("coefficient lookup is periodic and the top band is one") {
    auto L = make_op(3, 1, {2.0, 3.0, 5.0});
    CHECK(L.coeff(0, 1) == 5.0);   // site 0 is the class of n
    CHECK(L.coeff(4, 1) == 2.0);
    CHECK(L.coeff(-2, 1) == 2.0);
    CHECK(L.coeff(1, 2) == 1.0);   // T^{-k-1} band
}

TEST_CASE("JSON round-trips are bit-exact") {
    for (auto [n, k] : {std::pair{5, 1}, {7, 2}}) {
        auto L = random_operator(n, k, 55);
        auto back = operator_from_json(json::parse(dump_json(operator_to_json(L))));
        CHECK(back.n == L.n);
        CHECK(back.k == L.k);
        CHECK(back.a == L.a);
    }
}

TEST_CASE("operator templates instantiate with complex scalars") {
    TriangularOperatorcd L{3, 1, Eigen::MatrixXcd::Ones(3, 1)};
    L.a(1, 0) = Complex(0.0, 2.0);
    CHECK_NOTHROW(validate(L));
    auto back = adjoint_coefficients(adjoint_coefficients(L));
    CHECK(back.a == L.a);
}

}  // TEST_SUITE
