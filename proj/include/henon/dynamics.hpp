#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "henon/types.hpp"

namespace henon {

enum class Direction { Forward, Backward };

/// Coordinates above this are treated as overflow; orbits stop there.
/// Large enough that the escape-rate tail sums are converged well before.
inline constexpr double kCoordinateCap = 1e150;

/// One forward step: (x, y) -> (x^2 + c - a y, x).
PhasePoint apply(const HenonParameter& lambda, const PhasePoint& p);

/// One backward step: (x, y) -> (y, (y^2 + c - x)/a). Requires a != 0.
PhasePoint apply_inverse(const HenonParameter& lambda, const PhasePoint& p);

/// x^2 + c - a y evaluated with compensated products/sums so the result is
/// accurate to ~1 ulp of its own magnitude even under heavy cancellation
/// (the orbit of f^{-1}-images passes through such a step).
Complex forward_x_accurate(const HenonParameter& lambda, Complex x, Complex y);

/// y^2 + c - x with the same compensation; divide by a for the backward step.
Complex u_c_accurate(Complex c, Complex x, Complex y);

/// Accurate single steps built on the compensated polynomials.
PhasePoint step_forward(const HenonParameter& lambda, const PhasePoint& p);
PhasePoint step_backward(const HenonParameter& lambda, const PhasePoint& p);

/// Derivative cocycle Df^n (or Df^{-n}) with the exponential growth factored
/// into logScale: the true matrix is exp(logScale) * [m11 m12; m21 m22].
/// det(true matrix) = a^n for n forward steps, a^{-n} backward.
struct JacobianMatrix {
    Complex m11, m12, m21, m22;
    double logScale = 0.0;

    Complex det_scaled() const { return m11 * m22 - m12 * m21; }
};

struct OrbitOverflow : std::runtime_error {
    int index;
    explicit OrbitOverflow(int idx)
        : std::runtime_error("orbit overflow at iterate " + std::to_string(idx)),
          index(idx) {}
};

/// Df at a point: [[2x, -a], [1, 0]].
JacobianMatrix single_step_jacobian(const HenonParameter& lambda, const PhasePoint& p);

/// Df^n(p) by the chain rule, renormalized each step. Throws OrbitOverflow
/// (with the failing index) if the orbit leaves |x| <= kCoordinateCap first.
JacobianMatrix forward_cocycle(const HenonParameter& lambda, PhasePoint p, int n);

/// Apply the (rescaled) matrix to a tangent vector; caller handles logScale.
PhasePoint apply_scaled(const JacobianMatrix& m, const PhasePoint& v);

struct OrbitResult {
    std::vector<PhasePoint> points;     // includes the starting point
    std::optional<int> escapedAt;       // first index passing the escape test
    Direction direction = Direction::Forward;
};

/// Forward escape: |x| > R and |x| >= |y| (the orbit then grows monotonically).
bool escaped_forward(const PhasePoint& p, double escape_radius);
/// Backward escape: |y| > R and |y| >= |x|.
bool escaped_backward(const PhasePoint& p, double escape_radius);

/// Iterate until escape, overflow, or maxIter. maxIter >= 1.
OrbitResult orbit(const HenonParameter& lambda, const PhasePoint& p, int maxIter,
                  double escape_radius, Direction direction);

}  // namespace henon
