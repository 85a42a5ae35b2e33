#pragma once

#include <map>
#include <string>
#include <vector>

#include "henon/locus.hpp"

namespace henon {

struct ModelCheckOptions {
    GridSpec grid{};
    int wallSeeds = 12;      // angular seeds per expected curve region
    TraceOptions trace{};
    bool retryFinerPitch = true;  // halve the pitch once before failing connectivity
    bool estimateEuler = true;
};

/// Desk-scale verification record for one fundamental-domain piece.
struct ComponentReport {
    ComponentId componentId;
    bool isUpsilon = false;
    std::map<WallTag, int> wallCurveCounts;
    bool connected = false;
    std::optional<int> eulerCharacteristic;
    bool matchesModel = false;
    bool endBehavior = false;  // Upsilon only: locus approaches (x=inf, y=0)
    std::string diagnostics;
    std::vector<LocusCurve> curves;
    std::vector<LocusSample> interior;
};

/// Seeds all four walls of Omega^alpha, traces the closed boundary curves,
/// counts them (expected Y:1, U:2, G_OUTER:1, G_INNER:2), and tests
/// connectivity of the sampled interior by graph adjacency at 3x the grid
/// pitch.
ComponentReport check_omega_piece(const HenonParameter& lambda,
                                  const DyadicString& alpha,
                                  const DomainConfig& cfg,
                                  const ModelCheckOptions& opts = {});

/// The piece in Upsilon: exactly one closed curve on {|p_c(y)-x| = |a| y_bound}
/// and an unbounded end approaching (x=inf, y=0).
ComponentReport check_upsilon_piece(const HenonParameter& lambda,
                                    const DomainConfig& cfg,
                                    const ModelCheckOptions& opts = {});

/// Combinatorial gluing graph of the truncated-sphere model: for every depth
/// n <= maxDepth and word alpha of length n, sphere k glues a handle to
/// sphere n+k+1.
struct ModelGraph {
    int mMin = 0;
    int mMax = 0;
    int maxDepth = 0;
    struct Edge {
        int from;
        int to;
        DyadicString alpha;
    };
    std::vector<Edge> edges;
};

ModelGraph build_model_graph(int m_min, int m_max, int maxDepth);

/// Number of handles between spheres m and m+k; equals 2^{k-1} whenever both
/// endpoints are modeled. Throws std::out_of_range outside the modeled range.
int handles_between(const ModelGraph& g, int m, int k);

struct TranslationReport {
    bool ok = false;
    std::string diagnostics;
};

/// Forward images of the Omega^alpha samples land in band n-1, stay on the
/// locus (normalized residual < 10 tol_res) and classify into a single
/// component label. The label's prefix relation to alpha is recorded, not
/// asserted.
TranslationReport check_translation(const HenonParameter& lambda,
                                    const DyadicString& alpha,
                                    const DomainConfig& cfg,
                                    const ModelCheckOptions& opts = {});

/// Horizontal-sheet samples of the banded annulus (used for the interior
/// connectivity cloud and exposed for tests/plots).
std::vector<LocusSample> sample_horizontal_sheet(const HenonParameter& lambda,
                                                 const DyadicString& alpha,
                                                 const DomainConfig& cfg,
                                                 double pitch, double yWindow,
                                                 const PreimageTable& table);

}  // namespace henon
