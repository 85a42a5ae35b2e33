#pragma once

#include <optional>
#include <string>
#include <vector>

#include "henon/domains.hpp"
#include "henon/potentials.hpp"

namespace henon {

/// D(p) = gx+ gy- - gy+ gx-  (determinant of the two (1,0)-gradients).
/// D vanishes exactly where d log phi+ and d log phi- are proportional,
/// i.e. on the zero set of the tangency 2-form.
struct TangencyValue {
    Complex d;
    double normalized;  // |d| / (|g+| |g-|), scale-free residual
};

struct TangencyOptions {
    GradientOptions grad{};
};

std::optional<TangencyValue> try_tangency(const HenonParameter& lambda,
                                          const PhasePoint& p,
                                          const TangencyOptions& opts = {});

/// Throws NotEscaping when p is not decided escaping in both directions.
TangencyValue tangency(const HenonParameter& lambda, const PhasePoint& p,
                       const TangencyOptions& opts = {});

enum class WallTag { Y_BOUND, U_WALL, G_OUTER, G_INNER, P_WALL };

const char* wall_tag_name(WallTag tag);
std::optional<WallTag> wall_tag_from_name(const std::string& name);

/// A wall equation {lhs = level}: |y| for Y_BOUND, |u_c| for U_WALL/P_WALL,
/// G+ for the two Green walls. bandIndex records n for {G+ = r/2^n} walls
/// (it selects the conserved Boettcher power and the render angle).
struct WallSpec {
    WallTag tag;
    double level;
    int bandIndex = 0;
};

/// Signed wall residual lhs(p) - level.
double wall_value(const HenonParameter& lambda, const PhasePoint& p,
                  const WallSpec& wall, const GreenOptions& opts);

struct LocusSample {
    PhasePoint point;
    double residual = 0.0;  // normalized |D|
    std::optional<DyadicString> componentLabel;
    std::optional<WallTag> wallTag;
};

struct LocusCurve {
    std::vector<LocusSample> samples;
    bool closed = false;
    WallTag wallTag = WallTag::Y_BOUND;
    std::string diagnostic;  // empty on clean closed traces
};

struct RefineOptions {
    double tol_res = 1e-9;
    int maxSteps = 25;
    double fd_step = 1e-6;
    GradientOptions grad{};
};

struct RefineResult {
    LocusSample sample;
    double moved = 0.0;
    bool converged = false;
    std::string message;
};

/// Gauss-Newton on {Re D = Im D = 0} in the 4 real unknowns, minimal-norm
/// step through the pseudo-inverse of the finite-difference 2x4 Jacobian.
RefineResult refine_zero(const HenonParameter& lambda, const PhasePoint& p0,
                         const RefineOptions& opts = {});

struct TraceOptions {
    double tol_res = 1e-9;
    double wall_tol = 1e-9;
    double fd_step = 1e-6;
    double minStep = 1e-8;
    int maxPoints = 40000;
    GreenOptions green{};
    GradientOptions grad{};
};

/// Projects a nearby guess onto {D = 0, wall = level} (3 equations in R^4,
/// minimal-norm Gauss-Newton). Empty on divergence.
std::optional<PhasePoint> solve_on_wall(const HenonParameter& lambda,
                                        const PhasePoint& guess,
                                        const WallSpec& wall,
                                        const TraceOptions& opts = {});

/// Predictor-corrector tracing of the 1-real-dimensional set
/// {Re D = 0, Im D = 0, wall = level} in R^4. Adaptive step, closure
/// detection; step collapse below minStep yields a partial curve with a
/// diagnostic.
LocusCurve trace_wall_curve(const HenonParameter& lambda, const PhasePoint& seed,
                            const WallSpec& wall, const TraceOptions& opts = {});

/// Complex Newton in one coordinate (D is holomorphic in x and y separately).
std::optional<Complex> solve_tangency_in_x(const HenonParameter& lambda, Complex y,
                                           Complex x0, const TangencyOptions& opts = {});
std::optional<Complex> solve_tangency_in_y(const HenonParameter& lambda, Complex x,
                                           Complex y0, const TangencyOptions& opts = {});

struct GridSpec {
    double pitch = 0.0;    // 0 -> y_bound / 12
    double xWindow = 0.0;  // 0 -> 0.4 * min tree-node separation
    double yWindow = 0.0;  // 0 -> 0.1 (horizontal-sheet acceptance)
};

/// Scans a y-disk grid on the x-slice near xi_alpha, Newton-solves D = 0 in
/// x for each y, and keeps samples that pass in_omega, the band test and the
/// nearest-preimage label. Samples cluster near the line x = xi_alpha.
std::vector<LocusSample> sample_component(const HenonParameter& lambda,
                                          const DyadicString& alpha,
                                          const DomainConfig& cfg,
                                          const GridSpec& grid,
                                          const PreimageTable& table);

}  // namespace henon
