#pragma once

#include <stdexcept>
#include <string>

namespace todatri {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LeadingCoefficientZero : Error {
    int site;
    explicit LeadingCoefficientZero(int i)
        : Error("leading coefficient a^(1) vanishes at site " + std::to_string(i)), site(i) {}
};

struct NotCoprime : Error {
    int n, order;
    NotCoprime(int n_, int order_)
        : Error("period " + std::to_string(n_) + " and order " + std::to_string(order_) +
                " are not coprime"),
          n(n_), order(order_) {}
};

struct OrderExceedsPeriod : Error {
    OrderExceedsPeriod(int n, int k)
        : Error("operator order k+1=" + std::to_string(k + 1) + " exceeds period n=" +
                std::to_string(n)) {}
};

struct InvalidRange : Error {
    using Error::Error;
};

struct ShapeViolation : Error {
    int i, j;
    double value;
    ShapeViolation(int i_, int j_, double v)
        : Error("curve term w^" + std::to_string(i_) + " E^" + std::to_string(j_) +
                " = " + std::to_string(v) + " violates the support constraint"),
          i(i_), j(j_), value(v) {}
};

struct DegenerateRoots : Error {
    using Error::Error;
};

struct NotOnCurve : Error {
    using Error::Error;
};

struct NonSimpleEigenvalue : Error {
    using Error::Error;
};

struct DerivativeVanishes : Error {
    using Error::Error;
};

struct NonPositiveLeading : Error {
    int site;
    explicit NonPositiveLeading(int i)
        : Error("a^(1) must be positive in real mode; site " + std::to_string(i)), site(i) {}
};

struct OrderUnavailable : Error {
    using Error::Error;
};

struct UnsupportedK : Error {
    explicit UnsupportedK(int k) : Error("no explicit chart for k=" + std::to_string(k)) {}
};

struct ChartMismatch : Error {
    using Error::Error;
};

struct InconsistentSystem : Error {
    double residual;
    explicit InconsistentSystem(double r)
        : Error("gradient is not in the range of the symplectic matrix; residual " +
                std::to_string(r)),
          residual(r) {}
};

struct StateInvalid : Error {
    double lastGoodTime;
    explicit StateInvalid(double t)
        : Error("trajectory left the valid domain after t=" + std::to_string(t)),
          lastGoodTime(t) {}
};

struct SingularMinor : Error {
    int site;
    explicit SingularMinor(int i)
        : Error("singular frame minor at site " + std::to_string(i)), site(i) {}
};

struct NonSimpleKernel : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

}  // namespace todatri
