#include "henon/potentials.hpp"

#include <cmath>
#include <limits>

namespace henon {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// log|1+d| through log1p on |1+d|^2 = 1 + 2 Re d + |d|^2.
inline double log_abs_1p(Complex d) {
    return 0.5 * std::log1p(2.0 * d.real() + std::norm(d));
}

struct TailResult {
    double limit;       // lim 2^{-n} log|coord_n|, anchored at the escape index
    double errorBound;
    int steps;
};

}  // namespace

PotentialValue green_plus(const HenonParameter& lambda, const PhasePoint& p,
                          double tol, const GreenOptions& opts) {
    if (!(tol > 0)) throw std::invalid_argument("green_plus: tol must be > 0");
    PotentialValue out;
    Complex x = p.x, y = p.y;
    bool in_box = true;
    int k = 0;
    bool escaped = false;
    const double R2 = opts.escape_radius * opts.escape_radius;
    while (k <= opts.maxIter) {
        const double nx = std::norm(x), ny = std::norm(y);
        if (nx > R2 && nx >= ny) {
            escaped = true;
            break;
        }
        if (nx > R2 || ny > R2) in_box = false;
        if (k == opts.maxIter) break;
        const Complex xn = forward_x_accurate(lambda, x, y);
        y = x;
        x = xn;
        k++;
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
            out.status = PotentialStatus::Undecided;
            out.iterationsUsed = k;
            return out;
        }
    }
    if (!escaped) {
        out.iterationsUsed = k;
        if (in_box) {
            out.status = PotentialStatus::Bounded;
            out.value = 0.0;
            out.errorBound = 0.0;
        } else {
            out.status = PotentialStatus::Undecided;
        }
        return out;
    }

    // G = 2^{-k} log|x_k| + sum_{j>=k} 2^{-(j+1)} log|1 + (c - a y_j)/x_j^2|
    double g = std::log(std::abs(x)) * std::exp2(-static_cast<double>(k));
    double w = std::exp2(-static_cast<double>(k));
    double bound = std::numeric_limits<double>::infinity();
    int j = k;
    while (j < k + 400) {
        const Complex d = ((lambda.c - lambda.a * y) / x) / x;
        g += 0.5 * w * log_abs_1p(d);
        w *= 0.5;
        const Complex xn = forward_x_accurate(lambda, x, y);
        y = x;
        x = xn;
        j++;
        if (std::abs(x) > kCoordinateCap || !std::isfinite(std::abs(x))) {
            bound = 0.0;
            break;
        }
        const Complex dn = ((lambda.c - lambda.a * y) / x) / x;
        bound = 4.0 * w * std::abs(dn);
        if (bound < tol) break;
    }
    out.value = std::max(g, 0.0);
    out.errorBound = std::max(bound, 8.0 * std::numeric_limits<double>::epsilon() *
                                         (1.0 + std::abs(g)));
    out.iterationsUsed = j;
    out.status = PotentialStatus::Escaping;
    return out;
}

PotentialValue green_minus(const HenonParameter& lambda, const PhasePoint& p,
                           double tol, const GreenOptions& opts) {
    if (!(tol > 0)) throw std::invalid_argument("green_minus: tol must be > 0");
    if (lambda.a == Complex(0.0, 0.0))
        throw std::invalid_argument("green_minus: a must be nonzero");
    const double logAbsA = std::log(std::abs(lambda.a));
    PotentialValue out;
    Complex x = p.x, y = p.y;
    bool in_box = true;
    int k = 0;
    bool escaped = false;
    const double R2 = opts.escape_radius * opts.escape_radius;
    while (k <= opts.maxIter) {
        const double nx = std::norm(x), ny = std::norm(y);
        if (ny > R2 && ny >= nx) {
            escaped = true;
            break;
        }
        if (nx > R2 || ny > R2) in_box = false;
        if (k == opts.maxIter) break;
        const Complex u = u_c_accurate(lambda.c, x, y);
        x = y;
        y = u / lambda.a;
        k++;
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
            out.status = PotentialStatus::Undecided;
            out.iterationsUsed = k;
            return out;
        }
    }
    if (!escaped) {
        out.iterationsUsed = k;
        if (in_box) {
            out.status = PotentialStatus::Bounded;
            out.value = logAbsA;  // limit term is 0
            out.errorBound = 0.0;
        } else {
            out.status = PotentialStatus::Undecided;
        }
        return out;
    }

    // lim 2^{-n} log|y_n| = 2^{-k} log|y_k| - 2^{-k} log|a|
    //                       + sum_{j>=k} 2^{-(j+1)} log|1 + (c - x_j)/y_j^2|
    double g = (std::log(std::abs(y)) - logAbsA) *
               std::exp2(-static_cast<double>(k));
    double w = std::exp2(-static_cast<double>(k));
    double bound = std::numeric_limits<double>::infinity();
    int j = k;
    while (j < k + 400) {
        const Complex d = ((lambda.c - x) / y) / y;
        g += 0.5 * w * log_abs_1p(d);
        w *= 0.5;
        const Complex u = u_c_accurate(lambda.c, x, y);
        x = y;
        y = u / lambda.a;
        j++;
        if (std::abs(y) > kCoordinateCap || !std::isfinite(std::abs(y))) {
            bound = 0.0;
            break;
        }
        const Complex dn = ((lambda.c - x) / y) / y;
        bound = 4.0 * w * std::abs(dn);
        if (bound < tol) break;
    }
    out.value = std::max(g, 0.0) + logAbsA;
    out.errorBound = std::max(bound, 8.0 * std::numeric_limits<double>::epsilon() *
                                         (1.0 + std::abs(g)));
    out.iterationsUsed = j;
    out.status = PotentialStatus::Escaping;
    return out;
}

PotentialValue green_1d(Complex z, Complex c, double tol, const GreenOptions& opts) {
    if (!(tol > 0)) throw std::invalid_argument("green_1d: tol must be > 0");
    PotentialValue out;
    int k = 0;
    bool escaped = false;
    const double R2 = opts.escape_radius * opts.escape_radius;
    while (k <= opts.maxIter) {
        if (std::norm(z) > R2) {
            escaped = true;
            break;
        }
        if (k == opts.maxIter) break;
        z = z * z + c;
        k++;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            out.status = PotentialStatus::Undecided;
            out.iterationsUsed = k;
            return out;
        }
    }
    if (!escaped) {
        out.iterationsUsed = k;
        out.status = PotentialStatus::Bounded;
        return out;
    }
    double g = std::log(std::abs(z)) * std::exp2(-static_cast<double>(k));
    double w = std::exp2(-static_cast<double>(k));
    double bound = std::numeric_limits<double>::infinity();
    int j = k;
    while (j < k + 400) {
        const Complex d = (c / z) / z;
        g += 0.5 * w * log_abs_1p(d);
        w *= 0.5;
        z = z * z + c;
        j++;
        if (std::abs(z) > kCoordinateCap || !std::isfinite(std::abs(z))) {
            bound = 0.0;
            break;
        }
        bound = 4.0 * w * std::abs((c / z) / z);
        if (bound < tol) break;
    }
    out.value = std::max(g, 0.0);
    out.errorBound = std::max(bound, 8.0 * std::numeric_limits<double>::epsilon() *
                                         (1.0 + std::abs(g)));
    out.iterationsUsed = j;
    out.status = PotentialStatus::Escaping;
    return out;
}

namespace {

// Shared machinery for both gradient directions. The rows carry their own
// log-scale so the recurrence never overflows.
struct Row {
    Complex v1, v2;
    double ls = 0.0;
};

std::optional<ComplexGradient> gradient_limit(const HenonParameter& lambda,
                                              const PhasePoint& p, bool forward,
                                              const GradientOptions& opts) {
    Complex x = p.x, y = p.y;
    // forward: r0 = (1,0) row of identity with r_{-1} = (0,1)
    // backward: u0 = (0,1) with u_{-1} = (1,0)
    Row prev = forward ? Row{Complex(0, 0), Complex(1, 0), 0.0}
                       : Row{Complex(1, 0), Complex(0, 0), 0.0};
    Row cur = forward ? Row{Complex(1, 0), Complex(0, 0), 0.0}
                      : Row{Complex(0, 0), Complex(1, 0), 0.0};
    const double R2 = opts.escape_radius * opts.escape_radius;
    bool escaped = false;
    bool have_old = false;
    ComplexGradient g_old{};
    int n = 0;
    while (n < opts.maxIter) {
        // advance row using the current point, then advance the point
        Row next;
        const double damp = std::exp(prev.ls - cur.ls);
        if (forward) {
            // r_{n+1} = 2 x_n r_n - a r_{n-1}
            next.v1 = 2.0 * x * cur.v1 - lambda.a * prev.v1 * damp;
            next.v2 = 2.0 * x * cur.v2 - lambda.a * prev.v2 * damp;
        } else {
            // u_{n+1} = (2 y_n / a) u_n - (1/a) u_{n-1}
            next.v1 = (2.0 * y / lambda.a) * cur.v1 - prev.v1 * damp / lambda.a;
            next.v2 = (2.0 * y / lambda.a) * cur.v2 - prev.v2 * damp / lambda.a;
        }
        const double m = std::max(std::abs(next.v1), std::abs(next.v2));
        if (!(m > 0.0) || !std::isfinite(m)) return std::nullopt;
        next.v1 /= m;
        next.v2 /= m;
        next.ls = cur.ls + std::log(m);

        if (forward) {
            const Complex xn = forward_x_accurate(lambda, x, y);
            y = x;
            x = xn;
        } else {
            const Complex u = u_c_accurate(lambda.c, x, y);
            x = y;
            y = u / lambda.a;
        }
        n++;
        prev = cur;
        cur = next;

        const Complex lead = forward ? x : y;
        const double nl = std::norm(lead), no = std::norm(forward ? y : x);
        if (!std::isfinite(nl)) return have_old ? std::optional(g_old) : std::nullopt;
        if (nl > R2 && nl >= no) escaped = true;
        if (escaped && lead != Complex(0.0, 0.0)) {
            // g_n = 2^{-n} r_n / lead_n
            const Complex scale =
                std::exp(Complex(cur.ls - n * kLn2, 0.0) - std::log(lead));
            ComplexGradient g{cur.v1 * scale, cur.v2 * scale};
            if (have_old) {
                const double den =
                    std::max(std::sqrt(std::norm(g.gx) + std::norm(g.gy)),
                             std::numeric_limits<double>::min());
                const double diff = std::sqrt(std::norm(g.gx - g_old.gx) +
                                              std::norm(g.gy - g_old.gy));
                if (diff <= opts.tol * den) return g;
            }
            g_old = g;
            have_old = true;
        }
        if (std::abs(lead) > kCoordinateCap)
            return have_old ? std::optional(g_old) : std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

std::optional<ComplexGradient> try_grad_log_phi_plus(const HenonParameter& lambda,
                                                     const PhasePoint& p,
                                                     const GradientOptions& opts) {
    return gradient_limit(lambda, p, true, opts);
}

std::optional<ComplexGradient> try_grad_log_phi_minus(const HenonParameter& lambda,
                                                      const PhasePoint& p,
                                                      const GradientOptions& opts) {
    if (lambda.a == Complex(0.0, 0.0))
        throw std::invalid_argument("grad_log_phi_minus: a must be nonzero");
    return gradient_limit(lambda, p, false, opts);
}

ComplexGradient grad_log_phi_plus(const HenonParameter& lambda, const PhasePoint& p,
                                  const GradientOptions& opts) {
    auto g = try_grad_log_phi_plus(lambda, p, opts);
    if (!g) throw NotEscaping("grad_log_phi_plus: point does not escape forward");
    return *g;
}

ComplexGradient grad_log_phi_minus(const HenonParameter& lambda, const PhasePoint& p,
                                   const GradientOptions& opts) {
    auto g = try_grad_log_phi_minus(lambda, p, opts);
    if (!g) throw NotEscaping("grad_log_phi_minus: point does not escape backward");
    return *g;
}

BottcherPower phi_plus_power(const HenonParameter& lambda, const PhasePoint& p,
                             int n, const GreenOptions& opts) {
    if (n < 0) throw std::invalid_argument("phi_plus_power: n must be >= 0");
    Complex x = p.x, y = p.y;
    for (int k = 0; k < n; ++k) {
        const Complex xn = forward_x_accurate(lambda, x, y);
        y = x;
        x = xn;
        if (!std::isfinite(std::abs(x)))
            throw NotEscaping("phi_plus_power: orbit overflow before index n");
    }
    if (x == Complex(0.0, 0.0))
        throw NotEscaping("phi_plus_power: x vanishes at index n");

    // value = x_n * exp( sum_{k>=n} 2^{-(k+1-n)} Log(1 + (c - a y_k)/x_k^2) )
    Complex s(0.0, 0.0);
    double w = 0.5;
    const double R2 = opts.escape_radius * opts.escape_radius;
    bool escaped = false;
    int budget = opts.maxIter + 400;
    for (int k = 0; k < budget; ++k) {
        if (x == Complex(0.0, 0.0))
            throw NotEscaping("phi_plus_power: orbit hits x = 0");
        const Complex d = ((lambda.c - lambda.a * y) / x) / x;
        const Complex term = std::log(Complex(1.0, 0.0) + d);
        s += w * term;
        const double nx = std::norm(x);
        if (nx > R2 && nx >= std::norm(y)) escaped = true;
        if (escaped && w * std::abs(term) < 1e-18) break;
        const Complex xn = forward_x_accurate(lambda, x, y);
        y = x;
        x = xn;
        w *= 0.5;
        if (std::abs(x) > kCoordinateCap) break;
        if (!std::isfinite(std::abs(x)))
            throw NotEscaping("phi_plus_power: orbit overflow");
        if (!escaped && k + 1 >= opts.maxIter)
            throw NotEscaping("phi_plus_power: point not decided escaping");
    }
    if (!escaped) throw NotEscaping("phi_plus_power: point not decided escaping");

    // recover x_n: it was consumed by the loop, so recompute
    Complex xs = p.x, ys = p.y;
    for (int k = 0; k < n; ++k) {
        const Complex xn = forward_x_accurate(lambda, xs, ys);
        ys = xs;
        xs = xn;
    }
    BottcherPower out;
    out.n = n;
    out.value = xs * std::exp(s);
    return out;
}

std::vector<DyadicString> all_strings(int n) {
    std::vector<DyadicString> out;
    if (n < 0) return out;
    out.reserve(std::size_t{1} << n);
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
        std::string bits(n, '0');
        for (int b = 0; b < n; ++b)
            if (i & (std::uint64_t{1} << (n - 1 - b))) bits[b] = '1';
        out.push_back(DyadicString(bits));
    }
    return out;
}

PreimageTable::PreimageTable(Complex c, int maxDepth) : c_(c) {
    if (maxDepth < 0) throw std::invalid_argument("PreimageTable: maxDepth >= 0");
    levels_.resize(maxDepth + 1);
    levels_[0] = {Complex(0.0, 0.0)};
    for (int n = 1; n <= maxDepth; ++n) {
        const auto& up = levels_[n - 1];
        auto& lv = levels_[n];
        lv.resize(up.size() * 2);
        for (std::size_t i = 0; i < up.size(); ++i) {
            const Complex rad = up[i] - c;
            if (rad == Complex(0.0, 0.0))
                throw RegimeError("preimage_table: xi_alpha = c (critical value hit)");
            const Complex root = std::sqrt(rad);
            lv[2 * i] = root;       // appended bit 0: principal root
            lv[2 * i + 1] = -root;  // appended bit 1
        }
    }
}

Complex PreimageTable::xi(const DyadicString& alpha) const {
    const int n = alpha.length();
    if (n >= static_cast<int>(levels_.size()))
        throw std::out_of_range("PreimageTable: string deeper than table");
    std::size_t idx = 0;
    for (char b : alpha.bits) idx = idx * 2 + (b == '1' ? 1 : 0);
    return levels_[n][idx];
}

std::vector<std::pair<DyadicString, Complex>> PreimageTable::level(int n) const {
    if (n < 0 || n >= static_cast<int>(levels_.size()))
        throw std::out_of_range("PreimageTable: level out of range");
    std::vector<std::pair<DyadicString, Complex>> out;
    auto strs = all_strings(n);
    out.reserve(strs.size());
    for (std::size_t i = 0; i < strs.size(); ++i)
        out.emplace_back(strs[i], levels_[n][i]);
    return out;
}

double PreimageTable::neighbor_separation(const DyadicString& alpha) const {
    const Complex xi0 = xi(alpha);
    const int depthCap = std::min<int>(maxDepth(), alpha.length() + 1);
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= depthCap; ++n)
        for (const Complex& z : levels_[n]) {
            const double d = std::abs(z - xi0);
            if (d > 0 && d < best) best = d;
        }
    return best;
}

double PreimageTable::min_node_separation() const {
    double best = std::numeric_limits<double>::infinity();
    std::vector<Complex> all;
    for (const auto& lv : levels_) all.insert(all.end(), lv.begin(), lv.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const double d = std::abs(all[i] - all[j]);
            if (d > 0 && d < best) best = d;
        }
    return best;
}

HenonParameter make_parameter(Complex a, Complex c, double delta) {
    HenonParameter lam(a, c);
    const PotentialValue g0 = green_1d(Complex(0.0, 0.0), c, 1e-10);
    lam.perturbative =
        g0.escaping() && g0.value > 0.0 && std::abs(a) < delta;
    return lam;
}

}  // namespace henon
