#include "henon/domains.hpp"

#include <cmath>

namespace henon {

DomainConfig choose_domain_config(Complex c, const DomainOverrides& o) {
    DomainConfig cfg;
    cfg.escape_radius = o.escape_radius.value_or(100.0);
    cfg.maxIter = o.maxIter.value_or(1000);
    cfg.tol_res = o.tol_res.value_or(1e-9);
    cfg.maxDepth = o.maxDepth.value_or(8);

    const PotentialValue g0 =
        green_1d(Complex(0.0, 0.0), c, 1e-12, {cfg.escape_radius, cfg.maxIter});
    if (!g0.escaping() || !(g0.value > 0.0))
        throw RegimeError(
            "choose_domain_config: critical orbit of p_c does not escape "
            "(connected Julia set)");

    cfg.r = o.r.value_or(1.5 * g0.value);
    cfg.y_bound = o.y_bound.value_or((1.0 + std::sqrt(1.0 + 4.0 * std::abs(c))) / 2.0 + 1.0);
    cfg.eps = o.eps.value_or(cfg.y_bound);

    if (!(cfg.eps > 0) || cfg.eps > cfg.y_bound || !(cfg.r > 0) || cfg.maxDepth < 1)
        throw std::invalid_argument("choose_domain_config: invalid thresholds");
    return cfg;
}

Tristate in_omega(const HenonParameter& lambda, const PhasePoint& p,
                  const DomainConfig& cfg) {
    if (std::abs(p.y) > cfg.y_bound) return Tristate::False;
    // strict inequality on the u-wall, per the domain definition
    if (!(std::abs(u_c(p, lambda.c)) > std::abs(lambda.a) * cfg.y_bound))
        return Tristate::False;
    const PotentialValue g = green_plus(lambda, p, 1e-10, cfg.green());
    if (!g.decided()) return Tristate::Undecided;
    return g.value <= cfg.r ? Tristate::True : Tristate::False;
}

Tristate in_upsilon(const HenonParameter& lambda, const PhasePoint& p,
                    const DomainConfig& cfg) {
    if (std::abs(p.y) > cfg.eps) return Tristate::False;
    const PotentialValue g = green_plus(lambda, p, 1e-10, cfg.green());
    if (!g.decided()) return Tristate::Undecided;
    return g.value >= cfg.r ? Tristate::True : Tristate::False;
}

RegionClass classify_region(const HenonParameter& lambda, const PhasePoint& p,
                            const DomainConfig& cfg) {
    RegionClass rc;
    const PotentialValue gp = green_plus(lambda, p, 1e-10, cfg.green());
    const PotentialValue gm = green_minus(lambda, p, 1e-10, cfg.green());
    auto cls = [](const PotentialValue& v) {
        switch (v.status) {
            case PotentialStatus::Escaping: return EscapeClass::Escaping;
            case PotentialStatus::Bounded: return EscapeClass::BoundedLikely;
            default: return EscapeClass::Undecided;
        }
    };
    rc.forward = cls(gp);
    rc.backward = cls(gm);
    return rc;
}

int band_index(double gplus, double r) {
    if (!(gplus > 0) || !(r > 0)) return -1;
    const double nf = std::log2(r / gplus);
    return static_cast<int>(std::floor(nf + 1e-12));
}

ClassifyResult classify_component(const HenonParameter& lambda, const PhasePoint& p,
                                  const DomainConfig& cfg,
                                  const PreimageTable& table) {
    const PotentialValue g = green_plus(lambda, p, 1e-11, cfg.green());
    if (!g.escaping())
        throw NotEscaping("classify_component: G+ undecided or zero at p");
    int n = band_index(g.value, cfg.r);
    if (n < 0) n = 0;
    if (n > cfg.maxDepth)
        throw std::out_of_range("classify_component: band deeper than maxDepth");
    if (n > table.maxDepth())
        throw std::out_of_range("classify_component: band deeper than table");

    auto nodes = table.level(n);
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    std::size_t bi = 0, si = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d = std::abs(p.x - nodes[i].second);
        if (d < best) {
            second = best;
            si = bi;
            best = d;
            bi = i;
        } else if (d < second) {
            second = d;
            si = i;
        }
    }
    ClassifyResult res;
    res.id = ComponentId{n, nodes[bi].first};
    if (nodes.size() > 1 && second <= 1.1 * best) {
        res.ambiguous = true;
        res.alternate = ComponentId{n, nodes[si].first};
    }
    return res;
}

}  // namespace henon
