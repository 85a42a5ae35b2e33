#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "henon/dynamics.hpp"
#include "henon/types.hpp"

namespace henon {

enum class PotentialStatus { Escaping, Bounded, Undecided };

/// Escape-rate value with a guaranteed tail bound. `Bounded` means the orbit
/// stayed inside the escape box through maxIter and the point is treated as a
/// non-escaping one (value 0 for G+, log|a| for G-). `Undecided` is a
/// first-class outcome, not an exception: the orbit left the box without
/// settling into the escaping cone within the iteration budget.
struct PotentialValue {
    double value = 0.0;
    double errorBound = 0.0;
    int iterationsUsed = 0;
    PotentialStatus status = PotentialStatus::Undecided;

    bool decided() const { return status != PotentialStatus::Undecided; }
    bool escaping() const { return status == PotentialStatus::Escaping; }
};

struct GreenOptions {
    double escape_radius = 100.0;
    int maxIter = 1000;
};

/// G+(x,y) = lim 2^{-n} log^+ |f^n(x,y)|, refined past escape by the
/// telescoping tail  log|x_{k+1}| - 2 log|x_k| = log|1 + (c - a y_k)/x_k^2|
/// summed with weights 2^{-(k+1)}.
PotentialValue green_plus(const HenonParameter& lambda, const PhasePoint& p,
                          double tol, const GreenOptions& opts = {});

/// G-(x,y) = lim 2^{-n} log^+ |f^{-n}(x,y)| + log|a|, same scheme on the
/// backward orbit with the y-coordinate driving escape.
PotentialValue green_minus(const HenonParameter& lambda, const PhasePoint& p,
                           double tol, const GreenOptions& opts = {});

inline Complex p_c(Complex z, Complex c) { return z * z + c; }
inline Complex u_c(const PhasePoint& p, Complex c) { return p.y * p.y + c - p.x; }

/// 1D escape rate of z -> z^2 + c with the same tail refinement.
PotentialValue green_1d(Complex z, Complex c, double tol,
                        const GreenOptions& opts = {});

struct NotEscaping : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The (1,0)-derivative pair of log phi at p: Re( gx dx + gy dy )
/// differentiates G along (dx, dy).
struct ComplexGradient {
    Complex gx;
    Complex gy;
    double norm() const { return std::sqrt(std::norm(gx) + std::norm(gy)); }
};

struct GradientOptions {
    double escape_radius = 100.0;
    int maxIter = 2000;
    double tol = 1e-12;  // relative agreement of successive estimates
};

/// d log phi+ = lim 2^{-n} dx_n / x_n, evaluated by the renormalized row
/// recurrence r_{n+1} = 2 x_n r_n - a r_{n-1}. Empty when p does not escape
/// forward within the budget.
std::optional<ComplexGradient> try_grad_log_phi_plus(
    const HenonParameter& lambda, const PhasePoint& p,
    const GradientOptions& opts = {});

/// Backward analog on d log phi- = lim 2^{-n} dy_{-n} / y_{-n}
/// (phi- is normalized ~ y along backward escape).
std::optional<ComplexGradient> try_grad_log_phi_minus(
    const HenonParameter& lambda, const PhasePoint& p,
    const GradientOptions& opts = {});

/// Throwing wrappers for callers that have already decided escape.
ComplexGradient grad_log_phi_plus(const HenonParameter& lambda, const PhasePoint& p,
                                  const GradientOptions& opts = {});
ComplexGradient grad_log_phi_minus(const HenonParameter& lambda, const PhasePoint& p,
                                   const GradientOptions& opts = {});

/// phi+(f^n p): the canonical single-valued determination of phi+^{2^n}(p).
/// Evaluated as x_n * prod_{k>=n} (x_{k+1}/x_k^2)^{2^{-(k+1-n)}} with
/// principal-branch powers; log|value| = 2^n G+(p).
struct BottcherPower {
    int n = 0;
    Complex value;
};

BottcherPower phi_plus_power(const HenonParameter& lambda, const PhasePoint& p,
                             int n, const GreenOptions& opts = {});

/// Finite word over {0,1}; the empty word labels the critical point itself.
struct DyadicString {
    std::string bits;

    DyadicString() = default;
    explicit DyadicString(std::string b) : bits(std::move(b)) {
        for (char ch : bits)
            if (ch != '0' && ch != '1')
                throw std::invalid_argument("DyadicString: bits must be 0/1");
    }
    int length() const { return static_cast<int>(bits.size()); }
    DyadicString child(int bit) const {
        return DyadicString(bits + (bit ? '1' : '0'));
    }
    bool operator==(const DyadicString& o) const = default;
    bool operator<(const DyadicString& o) const {
        if (bits.size() != o.bits.size()) return bits.size() < o.bits.size();
        return bits < o.bits;
    }
};

/// All words of a given length, in lexicographic order.
std::vector<DyadicString> all_strings(int n);

/// The tree xi_alpha of iterated preimages of 0 under z -> z^2 + c:
/// xi_empty = 0, xi_{alpha 0} = principal sqrt(xi_alpha - c),
/// xi_{alpha 1} = -xi_{alpha 0}.
class PreimageTable {
  public:
    PreimageTable(Complex c, int maxDepth);

    Complex xi(const DyadicString& alpha) const;
    int maxDepth() const { return static_cast<int>(levels_.size()) - 1; }
    Complex c() const { return c_; }

    /// All (string, value) pairs at depth n.
    std::vector<std::pair<DyadicString, Complex>> level(int n) const;

    /// Smallest nonzero distance between any two tree nodes across all depths;
    /// sets the natural window for component classification.
    double min_node_separation() const;

    /// Distance from xi(alpha) to the nearest distinct node of depth at most
    /// length(alpha)+1; the natural x-window for the alpha slice.
    double neighbor_separation(const DyadicString& alpha) const;

  private:
    Complex c_;
    std::vector<std::vector<Complex>> levels_;  // levels_[n][index], MSB-first
};

}  // namespace henon
