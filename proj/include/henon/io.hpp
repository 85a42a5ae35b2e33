#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "henon/model_check.hpp"
#include "henon/motion.hpp"

namespace henon {

struct RunConfig {
    Complex a{1e-4, 0.0};
    Complex c{-6.0, 0.0};
    double perturbativeDelta = 1e-2;
    DomainOverrides overrides;
    DomainConfig domain;  // resolved from c + overrides
    GridSpec grid;
    std::uint64_t seed = 20250809;
    int schemaVersion = 1;

    HenonParameter parameter() const { return make_parameter(a, c, perturbativeDelta); }
};

/// Fills `domain` from c and the overrides. Throws RegimeError for c with
/// connected Julia set.
RunConfig resolve_config(RunConfig raw);

RunConfig default_run_config();
RunConfig load_run_config(const std::string& path);

/// 17 significant digits, locale-free; identical input bits give identical text.
std::string format_double(double v);

/// One JSONL line per object; field order is fixed so artifacts are
/// byte-reproducible.
std::string sample_jsonl_line(const HenonParameter& lambda, const DomainConfig& cfg,
                              const LocusSample& s);
std::string curve_point_jsonl_line(const HenonParameter& lambda,
                                   const DomainConfig& cfg, const LocusCurve& curve,
                                   int curveIndex, int pointIndex,
                                   const WallSpec& wall);
std::string track_waypoint_jsonl_line(int trackIndex, int waypointIndex,
                                      const Waypoint& w);

/// Whole-artifact writers.
void write_trace_jsonl(const std::string& path, const HenonParameter& lambda,
                       const DomainConfig& cfg,
                       const std::vector<LocusSample>& samples,
                       const std::vector<LocusCurve>& curves,
                       const std::vector<WallSpec>& walls);
void write_tracks_jsonl(const std::string& path,
                        const std::vector<MotionTrack>& tracks);
std::string component_report_json(const ComponentReport& rep);
void write_component_report(const std::string& path, const ComponentReport& rep);

/// Parameter paths: either an explicit "path" array of (a_re, a_im, c_re, c_im)
/// nodes or a {"from": .., "to": .., "steps": n} segment description.
std::vector<std::pair<Complex, Complex>> load_parameter_path(const std::string& path);

struct SeedRecord {
    LocusSample sample;
    std::optional<WallSpec> wall;  // present when the seed carries wall info
};
std::vector<SeedRecord> load_seeds_jsonl(const std::string& path,
                                         const DomainConfig& cfg);

enum class RenderProjection { YPlane, PotentialAngle };

/// 2D projection of a JSONL sample/curve stream: y-plane plots (Re y, Im y),
/// potential-angle plots (G+, arg phi+^{2^n}). Empty input yields a valid
/// empty SVG.
std::string render_svg(const std::string& jsonlPath, RenderProjection proj);

/// Handle-count table for the model graph (one row per distance k).
std::string model_graph_table(const ModelGraph& g, int from, int to);

}  // namespace henon
