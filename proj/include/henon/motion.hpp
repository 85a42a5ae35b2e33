#pragma once

#include <string>
#include <vector>

#include "henon/locus.hpp"

namespace henon {

enum class InvariantKind { PhiPlusPower, YValue, UcValue };

const char* invariant_kind_name(InvariantKind k);

/// The conserved quantity pinning a boundary point during continuation:
/// phi+^{2^n} on {G+ = r/2^n} walls, y on {|y| = y_bound}, u_c on
/// {|u_c| = |a| y_bound} (rescaled by a/a0 so the point follows the moving
/// wall family).
struct MotionInvariant {
    InvariantKind kind = InvariantKind::YValue;
    int n = 0;       // Boettcher power index, PhiPlusPower only
    Complex value;   // reference value at the path start
};

/// Infers the invariant kind from the wall a sample lives on.
MotionInvariant invariant_for_wall(const HenonParameter& lambda,
                                   const PhasePoint& p, const WallSpec& wall,
                                   const GreenOptions& opts);

struct Waypoint {
    Complex a;
    Complex c;
    PhasePoint p;
    double residual = 0.0;  // normalized tangency residual
};

struct MotionTrack {
    MotionInvariant invariant;
    std::vector<Waypoint> waypoints;
    bool complete = false;
    std::string diagnostic;
};

struct TrackOptions {
    double tol_res = 1e-9;
    double inv_tol = 1e-10;
    double fd_step = 1e-7;
    int maxNewton = 40;
    int maxBisect = 12;       // parameter-step bisections on Newton failure
    double maxParamStep = 5e-5;
    GreenOptions green{};
    GradientOptions grad{};
};

/// Path in (a, c); consecutive steps larger than maxParamStep are subdivided,
/// and every (possibly inserted) node becomes a waypoint shared by all tracks
/// over the same path.
std::vector<std::pair<Complex, Complex>> subdivide_path(
    const std::vector<std::pair<Complex, Complex>>& nodes, double maxParamStep);

/// Damped-Newton continuation of {D(p) = 0, invariant(p) = value} (4 real
/// equations in 4 unknowns) along the path. Newton failures bisect the
/// parameter step; persistent failure truncates the track.
MotionTrack track_point(const MotionInvariant& inv,
                        const std::vector<std::pair<Complex, Complex>>& path,
                        const LocusSample& seed, const TrackOptions& opts = {});

/// max over grid-interior nodes of |dp/dlambda-bar| / |dp/dlambda| by centered
/// differences; grid[i][j] is the tracked point at
/// lambda0 + ((j-h) + i(i-h)) * step in the varying parameter.
double holomorphy_residual(const std::vector<std::vector<PhasePoint>>& grid,
                           double step);

struct HolomorphyScan {
    double ratio = std::numeric_limits<double>::infinity();
    int tracked = 0;
    int failures = 0;
};

/// Tracks each seed over a (2h+1)x(2h+1) grid in one complex parameter
/// direction (a when vary_a, else c) and reports the worst centered-difference
/// holomorphy ratio at the grid center.
HolomorphyScan holomorphy_scan(const HenonParameter& lambda0, bool vary_a,
                               double step, int halfWidth,
                               const std::vector<LocusSample>& seeds,
                               const std::vector<MotionInvariant>& invariants,
                               const TrackOptions& opts = {});

struct InjectivityReport {
    double minDistance = std::numeric_limits<double>::infinity();
    int waypoint = -1;
    int trackA = -1;
    int trackB = -1;
    std::vector<double> perWaypoint;
};

/// Minimum pairwise distance between tracked points at each shared waypoint
/// index; reports the minimizing pair.
InjectivityReport injectivity_check(const std::vector<MotionTrack>& tracks);

struct CorrespondenceReport {
    bool allComplete = false;
    bool simple = false;                // image polyline has no self-intersections
    bool cyclicOrderPreserved = false;  // wall angle winds monotonically once
    double maxWallResidual = 0.0;       // |wall equation| at the endpoint
    int tracked = 0;
    std::string diagnostic;
};

/// Tracks every sample of a closed wall curve from the path start to its end
/// and checks that the image polyline is simple and cyclically ordered.
CorrespondenceReport boundary_correspondence(
    const HenonParameter& lambda0,
    const std::vector<std::pair<Complex, Complex>>& path, const LocusCurve& curve,
    const WallSpec& wall, const DomainConfig& cfgAtEnd,
    const TrackOptions& opts = {});

}  // namespace henon
