#pragma once

#include <optional>

#include "henon/potentials.hpp"

namespace henon {

/// Thresholds defining the fundamental domains:
///   Omega   = { G+ <= r, |y| <= y_bound, |p_c(y) - x| > |a| y_bound }
///   Upsilon = { G+ >= r, |y| <= eps }
struct DomainConfig {
    double r = 0.0;
    double y_bound = 0.0;
    double eps = 0.0;
    double escape_radius = 100.0;
    int maxIter = 1000;
    double tol_res = 1e-9;
    int maxDepth = 8;

    GreenOptions green() const { return {escape_radius, maxIter}; }
};

/// Optional per-field replacements applied on top of the defaults.
struct DomainOverrides {
    std::optional<double> r, y_bound, eps, escape_radius, tol_res;
    std::optional<int> maxIter, maxDepth;
};

/// Defaults: r = 1.5 G_{p_c}(0) (every xi_alpha sits strictly inside its
/// band), y_bound = (1 + sqrt(1+4|c|))/2 + 1, eps = y_bound. Rejects c with
/// connected Julia set (critical orbit of p_c bounded).
DomainConfig choose_domain_config(Complex c, const DomainOverrides& overrides = {});

enum class Tristate { False, True, Undecided };

inline bool is_true(Tristate t) { return t == Tristate::True; }

/// Literal evaluation of the displayed inequalities. An undecided potential
/// yields Undecided unless one of the decidable inequalities already fails.
Tristate in_omega(const HenonParameter& lambda, const PhasePoint& p,
                  const DomainConfig& cfg);
Tristate in_upsilon(const HenonParameter& lambda, const PhasePoint& p,
                    const DomainConfig& cfg);

/// Per-direction escape classification.
enum class EscapeClass { Escaping, BoundedLikely, Undecided };

struct RegionClass {
    EscapeClass forward = EscapeClass::Undecided;   // U+ / K+-likely
    EscapeClass backward = EscapeClass::Undecided;  // U- / K--likely
};

RegionClass classify_region(const HenonParameter& lambda, const PhasePoint& p,
                            const DomainConfig& cfg);

struct ComponentId {
    int bandIndex = 0;
    DyadicString label;
    bool operator==(const ComponentId&) const = default;
};

/// classify_component output; `alternate` is set (and ambiguous = true) when
/// the two nearest tree nodes are within 10% of each other in distance.
struct ClassifyResult {
    ComponentId id;
    std::optional<ComponentId> alternate;
    bool ambiguous = false;
};

/// Band index from G+(p) (G in [r/2^{n+1}, r/2^n] -> n, outer wall included),
/// label by the nearest n-th preimage xi_alpha to x(p).
ClassifyResult classify_component(const HenonParameter& lambda, const PhasePoint& p,
                                  const DomainConfig& cfg, const PreimageTable& table);

/// Band index alone, from an already computed potential value.
int band_index(double gplus, double r);

}  // namespace henon
