#include "henon/model_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace henon {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool cloud_connected(const std::vector<PhasePoint>& pts, double eps) {
    if (pts.empty()) return false;
    UnionFind uf(static_cast<int>(pts.size()));
    const double e2 = eps * eps;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d2 = std::norm(pts[i].x - pts[j].x) +
                              std::norm(pts[i].y - pts[j].y);
            if (d2 <= e2) uf.unite(static_cast<int>(i), static_cast<int>(j));
        }
    const int root = uf.find(0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (uf.find(static_cast<int>(i)) != root) return false;
    return true;
}

double point_segment_dist2(const PhasePoint& p, const PhasePoint& a,
                           const PhasePoint& b) {
    const double ax[4] = {a.x.real(), a.x.imag(), a.y.real(), a.y.imag()};
    const double bx[4] = {b.x.real(), b.x.imag(), b.y.real(), b.y.imag()};
    const double px[4] = {p.x.real(), p.x.imag(), p.y.real(), p.y.imag()};
    double ab2 = 0, apab = 0;
    for (int i = 0; i < 4; ++i) {
        const double d = bx[i] - ax[i];
        ab2 += d * d;
        apab += (px[i] - ax[i]) * d;
    }
    const double t = ab2 > 0 ? std::clamp(apab / ab2, 0.0, 1.0) : 0.0;
    double d2 = 0;
    for (int i = 0; i < 4; ++i) {
        const double q = ax[i] + t * (bx[i] - ax[i]) - px[i];
        d2 += q * q;
    }
    return d2;
}

double dist_to_curve(const PhasePoint& p, const LocusCurve& c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i)
        best = std::min(best, point_segment_dist2(p, c.samples[i].point,
                                                  c.samples[i + 1].point));
    if (c.closed && c.samples.size() > 1)
        best = std::min(best, point_segment_dist2(p, c.samples.back().point,
                                                  c.samples.front().point));
    return std::sqrt(best);
}

double max_adjacent_gap(const LocusCurve& c) {
    double g = 0;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i)
        g = std::max(g, distance(c.samples[i].point, c.samples[i + 1].point));
    return g;
}

struct WallTraceOutcome {
    std::vector<LocusCurve> curves;
    bool allClosed = true;
    std::string diag;
};

WallTraceOutcome trace_wall(const HenonParameter& lambda, const WallSpec& wall,
                            const std::vector<PhasePoint>& guesses,
                            const TraceOptions& topts) {
    WallTraceOutcome out;
    for (const auto& g : guesses) {
        auto onwall = solve_on_wall(lambda, g, wall, topts);
        if (!onwall) continue;
        bool known = false;
        for (const auto& c : out.curves) {
            const double tolDist = 2.0 * max_adjacent_gap(c) + 1e-9;
            if (dist_to_curve(*onwall, c) < tolDist) {
                known = true;
                break;
            }
        }
        if (known) continue;
        LocusCurve c = trace_wall_curve(lambda, *onwall, wall, topts);
        if (!c.closed) {
            out.allClosed = false;
            if (!out.diag.empty()) out.diag += "; ";
            out.diag += std::string(wall_tag_name(wall.tag)) + ": " +
                        (c.diagnostic.empty() ? "not closed" : c.diagnostic);
        }
        if (c.samples.size() > 2) out.curves.push_back(std::move(c));
    }
    return out;
}

// First upward crossing of G_{p_c} = level along the ray center + rho e^{i theta}.
std::optional<Complex> first_level_crossing_1d(Complex center, double theta,
                                               double level, Complex c,
                                               double rmax) {
    const Complex dir = std::polar(1.0, theta);
    auto gval = [&](double rho) {
        return green_1d(center + rho * dir, c, 1e-12).value - level;
    };
    double rho_prev = 0.0, g_prev = gval(0.0);
    for (double rho = 0.02; rho < rmax; rho += 0.02) {
        const double g = gval(rho);
        if (g_prev < 0 && g >= 0) {
            double lo = rho_prev, hi = rho;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (gval(mid) >= 0 ? hi : lo) = mid;
            }
            return center + 0.5 * (lo + hi) * dir;
        }
        rho_prev = rho;
        g_prev = g;
    }
    return std::nullopt;
}

}  // namespace

std::vector<LocusSample> sample_horizontal_sheet(const HenonParameter& lambda,
                                                 const DyadicString& alpha,
                                                 const DomainConfig& cfg,
                                                 double pitch, double yWindow,
                                                 const PreimageTable& table) {
    const Complex xi = table.xi(alpha);
    const int n = alpha.length();
    const double levelOuter = cfg.r / std::exp2(n);
    const double w = 1.5 + std::exp(levelOuter);
    const int m = static_cast<int>(std::floor(w / pitch));
    std::vector<LocusSample> out;
    TangencyOptions topts;
    for (int iy = -m; iy <= m; ++iy) {
        for (int ix = -m; ix <= m; ++ix) {
            const Complex x = xi + Complex(ix * pitch, iy * pitch);
            auto y = solve_tangency_in_y(lambda, x, Complex(0, 0), topts);
            if (!y || std::abs(*y) > yWindow) continue;
            const PhasePoint p{x, *y};
            if (in_omega(lambda, p, cfg) != Tristate::True) continue;
            const PotentialValue g = green_plus(lambda, p, 1e-11, cfg.green());
            if (!g.escaping() || band_index(g.value, cfg.r) != n) continue;
            const auto cls = classify_component(lambda, p, cfg, table);
            if (!(cls.id.label == alpha)) continue;
            const auto t = try_tangency(lambda, p, topts);
            if (!t || t->normalized > cfg.tol_res) continue;
            out.push_back({p, t->normalized, alpha, std::nullopt});
        }
    }
    return out;
}

ComponentReport check_omega_piece(const HenonParameter& lambda,
                                  const DyadicString& alpha,
                                  const DomainConfig& cfg,
                                  const ModelCheckOptions& opts) {
    if (!lambda.perturbative)
        throw RegimeError("check_omega_piece: parameter not in perturbative regime");
    ComponentReport rep;
    const int n = alpha.length();
    rep.componentId = ComponentId{n, alpha};
    PreimageTable table(lambda.c, std::max(cfg.maxDepth, n + 1));
    const Complex xi = table.xi(alpha);

    TraceOptions topts = opts.trace;
    topts.tol_res = cfg.tol_res;
    topts.green = cfg.green();
    std::ostringstream diag;

    // Y_BOUND {|y| = y_bound}: boundary of the y-disk sheet.
    {
        WallSpec wall{WallTag::Y_BOUND, cfg.y_bound, n};
        std::vector<PhasePoint> guesses;
        for (int k = 0; k < opts.wallSeeds; ++k) {
            const double th = 2 * M_PI * k / opts.wallSeeds;
            guesses.push_back({xi, std::polar(cfg.y_bound, th)});
        }
        auto res = trace_wall(lambda, wall, guesses, topts);
        rep.wallCurveCounts[WallTag::Y_BOUND] = static_cast<int>(res.curves.size());
        if (!res.allClosed) diag << res.diag << "; ";
        for (auto& c : res.curves) rep.curves.push_back(std::move(c));
    }

    // U_WALL {|u_c| = |a| y_bound}: the two holes at y = +-sqrt(xi - c).
    {
        const double level = std::abs(lambda.a) * cfg.y_bound;
        WallSpec wall{WallTag::U_WALL, level, n};
        std::vector<PhasePoint> guesses;
        const Complex ystar = std::sqrt(xi - lambda.c);
        for (int sgn = 0; sgn < 2; ++sgn) {
            for (int k = 0; k < opts.wallSeeds; ++k) {
                const double ph = 2 * M_PI * k / opts.wallSeeds;
                const Complex u = std::polar(level, ph);
                Complex y = std::sqrt(xi - lambda.c + u);
                if (sgn) y = -y;
                guesses.push_back({xi, y});
            }
        }
        (void)ystar;
        auto res = trace_wall(lambda, wall, guesses, topts);
        rep.wallCurveCounts[WallTag::U_WALL] = static_cast<int>(res.curves.size());
        if (!res.allClosed) diag << res.diag << "; ";
        for (auto& c : res.curves) rep.curves.push_back(std::move(c));
    }

    // G walls: seed from 1D equipotential crossings, then lift to the locus.
    auto g_wall = [&](WallTag tag, double level, int bi,
                      const std::vector<Complex>& centers) {
        WallSpec wall{tag, level, bi};
        std::vector<PhasePoint> guesses;
        for (const Complex& ctr : centers) {
            for (int k = 0; k < opts.wallSeeds; ++k) {
                const double th = 2 * M_PI * k / opts.wallSeeds;
                auto x = first_level_crossing_1d(ctr, th, level, lambda.c, 12.0);
                if (x) guesses.push_back({*x, Complex(0, 0)});
            }
        }
        auto res = trace_wall(lambda, wall, guesses, topts);
        rep.wallCurveCounts[tag] = static_cast<int>(res.curves.size());
        if (!res.allClosed) diag << res.diag << "; ";
        for (auto& c : res.curves) rep.curves.push_back(std::move(c));
    };

    g_wall(WallTag::G_OUTER, cfg.r / std::exp2(n), n, {xi});

    {
        // centers for the two inner curves: the two nearest (n+1)-preimages
        auto lv = table.level(n + 1);
        std::sort(lv.begin(), lv.end(), [&](const auto& A, const auto& B) {
            return std::abs(A.second - xi) < std::abs(B.second - xi);
        });
        std::vector<Complex> centers;
        for (std::size_t i = 0; i < lv.size() && centers.size() < 2; ++i)
            centers.push_back(lv[i].second);
        g_wall(WallTag::G_INNER, cfg.r / std::exp2(n + 1), n + 1, centers);
    }

    // Interior cloud: vertical sheet scan plus horizontal sheet scan.
    GridSpec grid = opts.grid;
    const double pitchV = grid.pitch > 0 ? grid.pitch : cfg.y_bound / 12.0;
    const double pitchH = pitchV;
    auto build_cloud = [&](double pv, double ph) {
        GridSpec gs = grid;
        gs.pitch = pv;
        auto cloudV = sample_component(lambda, alpha, cfg, gs, table);
        auto cloudH = sample_horizontal_sheet(lambda, alpha, cfg, ph, 0.15, table);
        std::vector<LocusSample> all = cloudV;
        all.insert(all.end(), cloudH.begin(), cloudH.end());
        return all;
    };
    rep.interior = build_cloud(pitchV, pitchH);
    std::vector<PhasePoint> pts;
    pts.reserve(rep.interior.size());
    for (const auto& s : rep.interior) pts.push_back(s.point);
    rep.connected = cloud_connected(pts, 3.0 * std::max(pitchV, pitchH));
    if (!rep.connected && opts.retryFinerPitch) {
        rep.interior = build_cloud(pitchV / 2, pitchH / 2);
        pts.clear();
        for (const auto& s : rep.interior) pts.push_back(s.point);
        rep.connected = cloud_connected(pts, 1.5 * std::max(pitchV, pitchH));
        diag << "connectivity re-run at half pitch; ";
    }

    const int cY = rep.wallCurveCounts[WallTag::Y_BOUND];
    const int cU = rep.wallCurveCounts[WallTag::U_WALL];
    const int cGO = rep.wallCurveCounts[WallTag::G_OUTER];
    const int cGI = rep.wallCurveCounts[WallTag::G_INNER];
    bool allClosed = true;
    for (const auto& c : rep.curves) allClosed = allClosed && c.closed;

    rep.matchesModel = (cY == 1 && cU == 2 && cGO == 1 && cGI == 2 &&
                        rep.connected && allClosed);
    if (!rep.matchesModel) {
        diag << "counts (Y,U,GO,GI)=(" << cY << "," << cU << "," << cGO << ","
             << cGI << ") expected (1,2,1,2), connected=" << rep.connected
             << ", allClosed=" << allClosed << "; ";
    }
    // Euler characteristic of the glued piece: each sheet is a disk with the
    // traced holes, joined by one neck: chi = (1-cU) + (1-cGI) - 2.
    if (opts.estimateEuler && rep.connected && allClosed && !rep.interior.empty())
        rep.eulerCharacteristic = (1 - cU) + (1 - cGI) - 2;
    rep.diagnostics = diag.str();
    return rep;
}

ComponentReport check_upsilon_piece(const HenonParameter& lambda,
                                    const DomainConfig& cfg,
                                    const ModelCheckOptions& opts) {
    if (!lambda.perturbative)
        throw RegimeError("check_upsilon_piece: parameter not in perturbative regime");
    ComponentReport rep;
    rep.isUpsilon = true;
    std::ostringstream diag;
    TraceOptions topts = opts.trace;
    topts.tol_res = cfg.tol_res;
    topts.green = cfg.green();
    TangencyOptions tangOpts;

    // The hole: {|p_c(y) - x| = |a| y_bound}, sitting near x = c, y = 0.
    {
        const double level = std::abs(lambda.a) * cfg.y_bound;
        WallSpec wall{WallTag::P_WALL, level, 0};
        std::vector<PhasePoint> guesses;
        for (int k = 0; k < opts.wallSeeds; ++k) {
            const double ph = 2 * M_PI * k / opts.wallSeeds;
            guesses.push_back({lambda.c - std::polar(level, ph), Complex(0, 0)});
        }
        auto res = trace_wall(lambda, wall, guesses, topts);
        rep.wallCurveCounts[WallTag::P_WALL] = static_cast<int>(res.curves.size());
        if (!res.allClosed) diag << res.diag << "; ";
        for (auto& c : res.curves) rep.curves.push_back(std::move(c));
    }

    // Unbounded end: samples at |x| large sit at y -> 0.
    {
        double maxAbsY = 0.0;
        int found = 0;
        for (double R : {1e6, 3e7}) {
            for (int k = 0; k < 8; ++k) {
                const double th = 2 * M_PI * k / 8 + 0.1;
                const Complex x = std::polar(R, th);
                auto y = solve_tangency_in_y(lambda, x, Complex(0, 0), tangOpts);
                if (!y) continue;
                found++;
                maxAbsY = std::max(maxAbsY, std::abs(*y));
            }
        }
        rep.endBehavior = found >= 8 && maxAbsY < 1e-3;
        if (!rep.endBehavior)
            diag << "end behavior: found=" << found << " max|y|=" << maxAbsY << "; ";
    }

    // Interior cloud of the fundamental piece ({G >= r} cut along the hole).
    {
        const double w = std::exp(2.0 * cfg.r) + 2.0;
        const double pitch = w / 18.0;
        const int m = static_cast<int>(std::floor(w / pitch));
        const double uLevel = std::abs(lambda.a) * cfg.y_bound;
        for (int iy = -m; iy <= m; ++iy) {
            for (int ix = -m; ix <= m; ++ix) {
                const Complex x(ix * pitch, iy * pitch);
                auto y = solve_tangency_in_y(lambda, x, Complex(0, 0), tangOpts);
                if (!y || std::abs(*y) > 0.15) continue;
                const PhasePoint p{x, *y};
                if (in_upsilon(lambda, p, cfg) != Tristate::True) continue;
                if (std::abs(u_c(p, lambda.c)) <= uLevel) continue;
                auto t = try_tangency(lambda, p, tangOpts);
                if (!t || t->normalized > cfg.tol_res) continue;
                rep.interior.push_back({p, t->normalized, std::nullopt, std::nullopt});
            }
        }
        std::vector<PhasePoint> pts;
        for (const auto& s : rep.interior) pts.push_back(s.point);
        rep.connected = cloud_connected(pts, 3.0 * pitch);
    }

    const int cP = rep.wallCurveCounts[WallTag::P_WALL];
    bool allClosed = true;
    for (const auto& c : rep.curves) allClosed = allClosed && c.closed;
    rep.matchesModel = (cP == 1 && rep.endBehavior && rep.connected && allClosed);
    if (!rep.matchesModel)
        diag << "P_WALL count=" << cP << " expected 1, end=" << rep.endBehavior
             << ", connected=" << rep.connected << ", allClosed=" << allClosed
             << "; ";
    // punctured disk (chi 0) with one hole removed
    if (opts.estimateEuler && rep.endBehavior && allClosed && rep.connected)
        rep.eulerCharacteristic = 1 - 1 - cP;
    rep.diagnostics = diag.str();
    return rep;
}

ModelGraph build_model_graph(int m_min, int m_max, int maxDepth) {
    if (m_min > m_max) throw std::invalid_argument("build_model_graph: m_min > m_max");
    if (maxDepth < 0 || maxDepth > 24)
        throw std::invalid_argument("build_model_graph: maxDepth out of range");
    ModelGraph g;
    g.mMin = m_min;
    g.mMax = m_max;
    g.maxDepth = maxDepth;
    for (int k = m_min; k <= m_max; ++k) {
        for (int n = 0; n <= maxDepth; ++n) {
            const int to = n + k + 1;
            if (to > m_max) break;
            for (const auto& alpha : all_strings(n))
                g.edges.push_back({k, to, alpha});
        }
    }
    return g;
}

int handles_between(const ModelGraph& g, int m, int k) {
    if (k < 1 || k > g.maxDepth + 1)
        throw std::out_of_range("handles_between: k outside modeled depth");
    if (m < g.mMin || m + k > g.mMax)
        throw std::out_of_range("handles_between: sphere index outside model");
    int count = 0;
    for (const auto& e : g.edges)
        if (e.from == m && e.to == m + k) ++count;
    return count;
}

TranslationReport check_translation(const HenonParameter& lambda,
                                    const DyadicString& alpha,
                                    const DomainConfig& cfg,
                                    const ModelCheckOptions& opts) {
    TranslationReport rep;
    const int n = alpha.length();
    if (n < 1) {
        rep.diagnostics = "check_translation: band index must be >= 1";
        return rep;
    }
    PreimageTable table(lambda.c, std::max(cfg.maxDepth, n));
    auto samples = sample_component(lambda, alpha, cfg, opts.grid, table);
    if (samples.empty()) {
        rep.diagnostics = "check_translation: empty sample set (out of regime?)";
        return rep;
    }
    TangencyOptions topts;
    std::map<std::string, int> labels;
    double worstRes = 0;
    bool bandsOk = true;
    for (const auto& s : samples) {
        const PhasePoint q = step_forward(lambda, s.point);
        auto t = try_tangency(lambda, q, topts);
        if (!t) {
            rep.diagnostics = "image left the escape regions";
            return rep;
        }
        worstRes = std::max(worstRes, t->normalized);
        const PotentialValue g = green_plus(lambda, q, 1e-11, cfg.green());
        if (!g.escaping() || band_index(g.value, cfg.r) != n - 1) bandsOk = false;
        const auto cls = classify_component(lambda, q, cfg, table);
        labels[cls.id.label.bits]++;
    }
    std::ostringstream d;
    d << "max pushed residual " << worstRes << "; labels:";
    for (auto& [k, v] : labels) d << " '" << k << "'x" << v;
    const std::string parent = alpha.bits.substr(0, alpha.bits.size() - 1);
    d << "; parent prefix '" << parent << "'";
    rep.diagnostics = d.str();
    rep.ok = bandsOk && labels.size() == 1 && worstRes < 10.0 * cfg.tol_res;
    return rep;
}

}  // namespace henon
