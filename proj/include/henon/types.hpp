#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace henon {

using Complex = std::complex<double>;

/// A point of C^2. Coordinates are always finite when stored in containers;
/// transient overflow shows up as infinite floats that callers guard against.
struct PhasePoint {
    Complex x;
    Complex y;
};

inline bool finite(const PhasePoint& p) {
    return std::isfinite(p.x.real()) && std::isfinite(p.x.imag()) &&
           std::isfinite(p.y.real()) && std::isfinite(p.y.imag());
}

/// Euclidean distance in C^2 viewed as R^4.
inline double distance(const PhasePoint& p, const PhasePoint& q) {
    return std::sqrt(std::norm(p.x - q.x) + std::norm(p.y - q.y));
}

struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The map parameter pair (a, c). `a` is the Jacobian determinant of Df.
/// `perturbative` is set when the quadratic z^2+c has disconnected Julia set
/// (critical orbit escapes) and |a| is below `delta`; the model-check
/// operations require it.
struct HenonParameter {
    Complex a;
    Complex c;
    bool perturbative = false;

    HenonParameter(Complex a_, Complex c_) : a(a_), c(c_) {
        if (a == Complex(0.0, 0.0))
            throw std::invalid_argument("HenonParameter: a must be nonzero");
    }
};

/// Builds a parameter and decides the perturbative flag.
/// Defined in potentials.cpp (needs the 1D escape-rate function).
HenonParameter make_parameter(Complex a, Complex c, double delta = 1e-2);

}  // namespace henon
