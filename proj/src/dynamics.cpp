#include "henon/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace henon {

namespace {

// Error-free transforms. TwoProd needs a fused multiply-add.
struct Dd {
    double hi = 0.0, lo = 0.0;
};

inline Dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline Dd two_prod(double a, double b) {
    double p = a * b;
    double err = std::fma(a, b, -p);
    return {p, err};
}

// Compensated sum of products: sum_i x_i*y_i, accurate to ~1 ulp of the
// result even when the partial sums cancel.
inline double dot_compensated(const double* xs, const double* ys, int n) {
    double s = 0.0, comp = 0.0;
    for (int i = 0; i < n; ++i) {
        Dd p = two_prod(xs[i], ys[i]);
        Dd t = two_sum(s, p.hi);
        s = t.hi;
        comp += t.lo + p.lo;
    }
    return s + comp;
}

}  // namespace

PhasePoint apply(const HenonParameter& lambda, const PhasePoint& p) {
    return {p.x * p.x + lambda.c - lambda.a * p.y, p.x};
}

PhasePoint apply_inverse(const HenonParameter& lambda, const PhasePoint& p) {
    if (lambda.a == Complex(0.0, 0.0))
        throw std::invalid_argument("apply_inverse: a must be nonzero");
    return {p.y, (p.y * p.y + lambda.c - p.x) / lambda.a};
}

Complex forward_x_accurate(const HenonParameter& lambda, Complex x, Complex y) {
    const double xr = x.real(), xi = x.imag();
    const double ar = lambda.a.real(), ai = lambda.a.imag();
    const double yr = y.real(), yi = y.imag();
    // real: xr^2 - xi^2 + Re c - (ar yr - ai yi)
    const double rxs[5] = {xr, xi, 1.0, ar, ai};
    const double rys[5] = {xr, -xi, lambda.c.real(), -yr, yi};
    // imag: 2 xr xi + Im c - (ar yi + ai yr)
    const double ixs[5] = {2.0 * xr, 1.0, ar, ai, 0.0};
    const double iys[5] = {xi, lambda.c.imag(), -yi, -yr, 0.0};
    return {dot_compensated(rxs, rys, 5), dot_compensated(ixs, iys, 5)};
}

Complex u_c_accurate(Complex c, Complex x, Complex y) {
    const double yr = y.real(), yi = y.imag();
    const double rxs[4] = {yr, yi, 1.0, 1.0};
    const double rys[4] = {yr, -yi, c.real(), -x.real()};
    const double ixs[3] = {2.0 * yr, 1.0, 1.0};
    const double iys[3] = {yi, c.imag(), -x.imag()};
    return {dot_compensated(rxs, rys, 4), dot_compensated(ixs, iys, 3)};
}

PhasePoint step_forward(const HenonParameter& lambda, const PhasePoint& p) {
    return {forward_x_accurate(lambda, p.x, p.y), p.x};
}

PhasePoint step_backward(const HenonParameter& lambda, const PhasePoint& p) {
    return {p.y, u_c_accurate(lambda.c, p.x, p.y) / lambda.a};
}

JacobianMatrix single_step_jacobian(const HenonParameter& lambda, const PhasePoint& p) {
    return {2.0 * p.x, -lambda.a, Complex(1.0, 0.0), Complex(0.0, 0.0), 0.0};
}

JacobianMatrix forward_cocycle(const HenonParameter& lambda, PhasePoint p, int n) {
    if (n < 0) throw std::invalid_argument("forward_cocycle: n must be >= 0");
    JacobianMatrix acc{Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0),
                       Complex(1.0, 0.0), 0.0};
    for (int k = 0; k < n; ++k) {
        if (std::abs(p.x) > kCoordinateCap || std::abs(p.y) > kCoordinateCap ||
            !finite(p))
            throw OrbitOverflow(k);
        const Complex tx = 2.0 * p.x;
        // [[2x, -a],[1,0]] * acc
        JacobianMatrix next;
        next.m11 = tx * acc.m11 - lambda.a * acc.m21;
        next.m12 = tx * acc.m12 - lambda.a * acc.m22;
        next.m21 = acc.m11;
        next.m22 = acc.m12;
        next.logScale = acc.logScale;
        double mx = std::max(std::max(std::abs(next.m11), std::abs(next.m12)),
                             std::max(std::abs(next.m21), std::abs(next.m22)));
        if (mx > 1e100) {
            next.m11 /= mx;
            next.m12 /= mx;
            next.m21 /= mx;
            next.m22 /= mx;
            next.logScale += std::log(mx);
        }
        acc = next;
        p = step_forward(lambda, p);
    }
    if (!finite(p) && n > 0) throw OrbitOverflow(n);
    return acc;
}

PhasePoint apply_scaled(const JacobianMatrix& m, const PhasePoint& v) {
    return {m.m11 * v.x + m.m12 * v.y, m.m21 * v.x + m.m22 * v.y};
}

bool escaped_forward(const PhasePoint& p, double escape_radius) {
    const double nx = std::norm(p.x);
    return nx > escape_radius * escape_radius && nx >= std::norm(p.y);
}

bool escaped_backward(const PhasePoint& p, double escape_radius) {
    const double ny = std::norm(p.y);
    return ny > escape_radius * escape_radius && ny >= std::norm(p.x);
}

OrbitResult orbit(const HenonParameter& lambda, const PhasePoint& p, int maxIter,
                  double escape_radius, Direction direction) {
    if (maxIter < 1) throw std::invalid_argument("orbit: maxIter must be >= 1");
    OrbitResult res;
    res.direction = direction;
    PhasePoint q = p;
    res.points.push_back(q);
    for (int k = 0; k <= maxIter; ++k) {
        const bool esc = direction == Direction::Forward
                             ? escaped_forward(q, escape_radius)
                             : escaped_backward(q, escape_radius);
        if (esc) {
            res.escapedAt = k;
            break;
        }
        if (k == maxIter) break;
        q = direction == Direction::Forward ? step_forward(lambda, q)
                                            : step_backward(lambda, q);
        if (!finite(q) || std::abs(q.x) > kCoordinateCap ||
            std::abs(q.y) > kCoordinateCap)
            break;
        res.points.push_back(q);
    }
    return res;
}

}  // namespace henon
