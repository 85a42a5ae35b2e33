#include "henon/motion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace henon {

namespace {

using Vec4 = Eigen::Vector4d;

Vec4 to_vec(const PhasePoint& p) {
    return Vec4(p.x.real(), p.x.imag(), p.y.real(), p.y.imag());
}
PhasePoint to_point(const Vec4& v) {
    return {Complex(v[0], v[1]), Complex(v[2], v[3])};
}

struct SystemEval {
    Eigen::Vector4d F;  // (Re D, Im D, Re(inv - target), Im(inv - target))
    double norm_d = 0;
    bool ok = false;
};

Complex invariant_value(const HenonParameter& lam, const PhasePoint& p,
                        const MotionInvariant& inv, const GreenOptions& gopts) {
    switch (inv.kind) {
        case InvariantKind::YValue: return p.y;
        case InvariantKind::UcValue: return u_c(p, lam.c);
        case InvariantKind::PhiPlusPower:
            return phi_plus_power(lam, p, inv.n, gopts).value;
    }
    return {};
}

SystemEval eval_system(const HenonParameter& lam, const Vec4& v,
                       const MotionInvariant& inv, Complex target,
                       const TrackOptions& opts) {
    SystemEval out;
    const PhasePoint p = to_point(v);
    auto gp = try_grad_log_phi_plus(lam, p, opts.grad);
    if (!gp) return out;
    auto gm = try_grad_log_phi_minus(lam, p, opts.grad);
    if (!gm) return out;
    const Complex d = gp->gx * gm->gy - gp->gy * gm->gx;
    Complex iv;
    try {
        iv = invariant_value(lam, p, inv, opts.green);
    } catch (const NotEscaping&) {
        return out;
    }
    const double scale = std::max(1.0, std::abs(target));
    out.F = Eigen::Vector4d(d.real(), d.imag(), (iv - target).real() / scale,
                            (iv - target).imag() / scale);
    out.norm_d = std::abs(d) / std::max(gp->norm() * gm->norm(),
                                        std::numeric_limits<double>::min());
    out.ok = true;
    return out;
}

// Damped Newton on the square system; returns the solved vector.
std::optional<Vec4> newton_solve(const HenonParameter& lam, Vec4 v,
                                 const MotionInvariant& inv, Complex target,
                                 const TrackOptions& opts, double* res_out) {
    SystemEval e = eval_system(lam, v, inv, target, opts);
    if (!e.ok) return std::nullopt;
    const double invScale = std::max(1.0, std::abs(target));
    for (int it = 0; it < opts.maxNewton; ++it) {
        const bool conv =
            e.norm_d < opts.tol_res &&
            std::hypot(e.F[2], e.F[3]) * invScale <= opts.inv_tol * invScale;
        if (conv) {
            if (res_out) *res_out = e.norm_d;
            return v;
        }
        Eigen::Matrix4d J;
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i) {
            Vec4 vp = v, vm = v;
            vp[i] += opts.fd_step;
            vm[i] -= opts.fd_step;
            const SystemEval ep = eval_system(lam, vp, inv, target, opts);
            const SystemEval em = eval_system(lam, vm, inv, target, opts);
            if (!ep.ok || !em.ok) {
                ok = false;
                break;
            }
            J.col(i) = (ep.F - em.F) / (2 * opts.fd_step);
        }
        if (!ok) return std::nullopt;
        const Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
        if (!lu.isInvertible()) return std::nullopt;
        Vec4 step = lu.solve(e.F);
        bool improved = false;
        for (int halve = 0; halve <= 8; ++halve) {
            const Vec4 vn = v - step;
            const SystemEval en = eval_system(lam, vn, inv, target, opts);
            if (en.ok && en.F.norm() < e.F.norm()) {
                v = vn;
                e = en;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) return std::nullopt;
    }
    const bool conv = e.norm_d < opts.tol_res &&
                      std::hypot(e.F[2], e.F[3]) <= opts.inv_tol;
    if (conv) {
        if (res_out) *res_out = e.norm_d;
        return v;
    }
    return std::nullopt;
}

}  // namespace

const char* invariant_kind_name(InvariantKind k) {
    switch (k) {
        case InvariantKind::PhiPlusPower: return "PHI_PLUS_POWER";
        case InvariantKind::YValue: return "Y_VALUE";
        case InvariantKind::UcValue: return "U_C_VALUE";
    }
    return "?";
}

MotionInvariant invariant_for_wall(const HenonParameter& lambda,
                                   const PhasePoint& p, const WallSpec& wall,
                                   const GreenOptions& opts) {
    MotionInvariant inv;
    switch (wall.tag) {
        case WallTag::Y_BOUND:
            inv.kind = InvariantKind::YValue;
            inv.value = p.y;
            break;
        case WallTag::U_WALL:
        case WallTag::P_WALL:
            inv.kind = InvariantKind::UcValue;
            inv.value = u_c(p, lambda.c);
            break;
        case WallTag::G_OUTER:
        case WallTag::G_INNER:
            inv.kind = InvariantKind::PhiPlusPower;
            inv.n = wall.bandIndex;
            inv.value = phi_plus_power(lambda, p, wall.bandIndex, opts).value;
            break;
    }
    return inv;
}

std::vector<std::pair<Complex, Complex>> subdivide_path(
    const std::vector<std::pair<Complex, Complex>>& nodes, double maxParamStep) {
    std::vector<std::pair<Complex, Complex>> out;
    if (nodes.empty()) return out;
    out.push_back(nodes[0]);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const Complex da = nodes[i].first - nodes[i - 1].first;
        const Complex dc = nodes[i].second - nodes[i - 1].second;
        const double len = std::hypot(std::abs(da), std::abs(dc));
        const int parts = std::max(1, static_cast<int>(std::ceil(len / maxParamStep)));
        for (int s = 1; s <= parts; ++s) {
            const double t = static_cast<double>(s) / parts;
            out.emplace_back(nodes[i - 1].first + t * da, nodes[i - 1].second + t * dc);
        }
    }
    return out;
}

MotionTrack track_point(const MotionInvariant& inv,
                        const std::vector<std::pair<Complex, Complex>>& path,
                        const LocusSample& seed, const TrackOptions& opts) {
    MotionTrack track;
    track.invariant = inv;
    if (path.empty()) {
        track.diagnostic = "empty path";
        return track;
    }
    const Complex a0 = path[0].first;
    Vec4 v = to_vec(seed.point);

    // solve (or verify) at the start
    {
        HenonParameter lam(path[0].first, path[0].second);
        double res = 0;
        auto sv = newton_solve(lam, v, inv, inv.value, opts, &res);
        if (!sv) {
            track.diagnostic = "seed does not satisfy the system at the path start";
            return track;
        }
        v = *sv;
        track.waypoints.push_back({lam.a, lam.c, to_point(v), res});
    }

    for (std::size_t i = 1; i < path.size(); ++i) {
        const Complex aPrev = track.waypoints.back().a;
        const Complex cPrev = track.waypoints.back().c;
        // bisection stack of pending targets within this leg
        std::vector<std::pair<Complex, Complex>> pending{path[i]};
        Complex aCur = aPrev, cCur = cPrev;
        int bisections = 0;
        while (!pending.empty()) {
            const auto [aT, cT] = pending.back();
            HenonParameter lam(aT, cT);
            const Complex target = inv.kind == InvariantKind::UcValue
                                       ? inv.value * (aT / a0)
                                       : inv.value;
            double res = 0;
            auto sv = newton_solve(lam, v, inv, target, opts, &res);
            if (sv) {
                v = *sv;
                aCur = aT;
                cCur = cT;
                pending.pop_back();
                if (pending.empty())
                    track.waypoints.push_back({aT, cT, to_point(v), res});
            } else {
                if (++bisections > opts.maxBisect) {
                    std::ostringstream d;
                    d << "Newton failed near a=(" << aT.real() << "," << aT.imag()
                      << ") c=(" << cT.real() << "," << cT.imag() << ")";
                    track.diagnostic = d.str();
                    return track;
                }
                pending.emplace_back(0.5 * (aCur + aT), 0.5 * (cCur + cT));
            }
        }
    }
    track.complete = true;
    return track;
}

double holomorphy_residual(const std::vector<std::vector<PhasePoint>>& grid,
                           double step) {
    const int rows = static_cast<int>(grid.size());
    if (rows < 3 || !(step > 0))
        throw std::invalid_argument("holomorphy_residual: need a (2h+1) grid, h>=1");
    for (const auto& r : grid)
        if (static_cast<int>(r.size()) != rows)
            throw std::invalid_argument("holomorphy_residual: grid must be square");
    double worst = 0.0;
    for (int i = 1; i + 1 < rows; ++i) {
        for (int j = 1; j + 1 < rows; ++j) {
            // column index = real direction, row index = imaginary direction
            const Complex dsx = (grid[i][j + 1].x - grid[i][j - 1].x) / (2 * step);
            const Complex dsy = (grid[i][j + 1].y - grid[i][j - 1].y) / (2 * step);
            const Complex dtx = (grid[i + 1][j].x - grid[i - 1][j].x) / (2 * step);
            const Complex dty = (grid[i + 1][j].y - grid[i - 1][j].y) / (2 * step);
            const Complex I(0, 1);
            const Complex dl_x = 0.5 * (dsx - I * dtx), dl_y = 0.5 * (dsy - I * dty);
            const Complex db_x = 0.5 * (dsx + I * dtx), db_y = 0.5 * (dsy + I * dty);
            const double num = std::sqrt(std::norm(db_x) + std::norm(db_y));
            const double den = std::sqrt(std::norm(dl_x) + std::norm(dl_y));
            if (den > 0) worst = std::max(worst, num / den);
        }
    }
    return worst;
}

HolomorphyScan holomorphy_scan(const HenonParameter& lambda0, bool vary_a,
                               double step, int halfWidth,
                               const std::vector<LocusSample>& seeds,
                               const std::vector<MotionInvariant>& invariants,
                               const TrackOptions& opts) {
    if (seeds.size() != invariants.size())
        throw std::invalid_argument("holomorphy_scan: seeds/invariants mismatch");
    HolomorphyScan out;
    out.ratio = 0.0;
    const int W = 2 * halfWidth + 1;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        std::vector<std::vector<PhasePoint>> grid(
            W, std::vector<PhasePoint>(W, PhasePoint{}));
        std::vector<std::vector<bool>> done(W, std::vector<bool>(W, false));
        // center first, then Chebyshev rings outward, each node seeded from a
        // solved neighbor closer to the center
        bool failed = false;
        for (int ring = 0; ring <= halfWidth && !failed; ++ring) {
            for (int i = 0; i < W && !failed; ++i) {
                for (int j = 0; j < W && !failed; ++j) {
                    const int di = i - halfWidth, dj = j - halfWidth;
                    if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
                    const Complex offset(dj * step, di * step);
                    const Complex a = vary_a ? lambda0.a + offset : lambda0.a;
                    const Complex c = vary_a ? lambda0.c : lambda0.c + offset;
                    PhasePoint init = seeds[s].point;
                    if (ring > 0) {
                        const int ni = i - ((di > 0) - (di < 0));
                        const int nj = j - ((dj > 0) - (dj < 0));
                        // prefer the neighbor already solved on this grid
                        if (done[i][nj]) init = grid[i][nj];
                        else if (done[ni][j]) init = grid[ni][j];
                        else if (done[ni][nj]) init = grid[ni][nj];
                    }
                    HenonParameter lam(a, c);
                    const Complex target =
                        invariants[s].kind == InvariantKind::UcValue
                            ? invariants[s].value * (a / lambda0.a)
                            : invariants[s].value;
                    auto sv = newton_solve(lam, to_vec(init), invariants[s], target,
                                           opts, nullptr);
                    if (!sv) {
                        failed = true;
                        break;
                    }
                    grid[i][j] = to_point(*sv);
                    done[i][j] = true;
                }
            }
        }
        if (failed) {
            out.failures++;
            continue;
        }
        out.tracked++;
        out.ratio = std::max(out.ratio, holomorphy_residual(grid, step));
    }
    if (out.tracked == 0) out.ratio = std::numeric_limits<double>::infinity();
    return out;
}

InjectivityReport injectivity_check(const std::vector<MotionTrack>& tracks) {
    InjectivityReport rep;
    if (tracks.size() < 2) return rep;
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto& t : tracks) len = std::min(len, t.waypoints.size());
    rep.perWaypoint.resize(len, std::numeric_limits<double>::infinity());
    for (std::size_t w = 0; w < len; ++w) {
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            for (std::size_t j = i + 1; j < tracks.size(); ++j) {
                const double d = distance(tracks[i].waypoints[w].p,
                                          tracks[j].waypoints[w].p);
                if (d < rep.perWaypoint[w]) rep.perWaypoint[w] = d;
                if (d < rep.minDistance) {
                    rep.minDistance = d;
                    rep.waypoint = static_cast<int>(w);
                    rep.trackA = static_cast<int>(i);
                    rep.trackB = static_cast<int>(j);
                }
            }
        }
    }
    return rep;
}

namespace {

double seg_seg_dist(const PhasePoint& a0, const PhasePoint& a1,
                    const PhasePoint& b0, const PhasePoint& b1) {
    // sample-based bound is enough at curve resolution: check endpoints and
    // midpoints against the other segment
    auto pseg = [](const PhasePoint& p, const PhasePoint& a, const PhasePoint& b) {
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
        return std::sqrt(d2);
    };
    const PhasePoint am{0.5 * (a0.x + a1.x), 0.5 * (a0.y + a1.y)};
    const PhasePoint bm{0.5 * (b0.x + b1.x), 0.5 * (b0.y + b1.y)};
    double d = pseg(a0, b0, b1);
    d = std::min(d, pseg(a1, b0, b1));
    d = std::min(d, pseg(am, b0, b1));
    d = std::min(d, pseg(b0, a0, a1));
    d = std::min(d, pseg(b1, a0, a1));
    d = std::min(d, pseg(bm, a0, a1));
    return d;
}

double wall_angle(const HenonParameter& lam, const PhasePoint& p,
                  const WallSpec& wall, const GreenOptions& gopts) {
    switch (wall.tag) {
        case WallTag::Y_BOUND: return std::arg(p.y);
        case WallTag::U_WALL:
        case WallTag::P_WALL: return std::arg(u_c(p, lam.c));
        case WallTag::G_OUTER:
        case WallTag::G_INNER:
            return std::arg(phi_plus_power(lam, p, wall.bandIndex, gopts).value);
    }
    return 0.0;
}

}  // namespace

CorrespondenceReport boundary_correspondence(
    const HenonParameter& lambda0,
    const std::vector<std::pair<Complex, Complex>>& path, const LocusCurve& curve,
    const WallSpec& wall, const DomainConfig& cfgAtEnd, const TrackOptions& opts) {
    CorrespondenceReport rep;
    if (!curve.closed || curve.samples.size() < 8) {
        rep.diagnostic = "input curve is not a closed wall curve";
        return rep;
    }
    const auto subPath = subdivide_path(path, opts.maxParamStep);
    std::vector<PhasePoint> image;
    image.reserve(curve.samples.size());
    rep.allComplete = true;
    for (const auto& s : curve.samples) {
        MotionInvariant inv = invariant_for_wall(lambda0, s.point, wall, opts.green);
        MotionTrack t = track_point(inv, subPath, s, opts);
        rep.tracked++;
        if (!t.complete) {
            rep.allComplete = false;
            rep.diagnostic = "a sample track failed: " + t.diagnostic;
            return rep;
        }
        image.push_back(t.waypoints.back().p);
    }

    HenonParameter lamEnd(subPath.back().first, subPath.back().second);
    WallSpec wallEnd = wall;
    if (wall.tag == WallTag::U_WALL || wall.tag == WallTag::P_WALL)
        wallEnd.level = std::abs(lamEnd.a) * cfgAtEnd.y_bound;
    for (const auto& q : image)
        rep.maxWallResidual =
            std::max(rep.maxWallResidual,
                     std::abs(wall_value(lamEnd, q, wallEnd, opts.green)));

    // simplicity: non-adjacent segments of the closed image polyline stay apart
    const std::size_t N = image.size();
    rep.simple = true;
    for (std::size_t i = 0; i < N && rep.simple; ++i) {
        for (std::size_t j = i + 2; j < N; ++j) {
            if (i == 0 && j == N - 1) continue;  // adjacent around the wrap
            const double d = seg_seg_dist(image[i], image[(i + 1) % N],
                                          image[j], image[(j + 1) % N]);
            if (!(d > 0)) {
                rep.simple = false;
                break;
            }
        }
    }

    // cyclic order: the wall angle unwraps monotonically to a single turn
    std::vector<double> angles(N);
    for (std::size_t i = 0; i < N; ++i)
        angles[i] = wall_angle(lamEnd, image[i], wallEnd, opts.green);
    double total = 0.0;
    bool monotone = true;
    int dir = 0;
    for (std::size_t i = 1; i <= N; ++i) {
        double d = angles[i % N] - angles[i - 1];
        while (d > M_PI) d -= 2 * M_PI;
        while (d < -M_PI) d += 2 * M_PI;
        if (d != 0) {
            const int sgn = d > 0 ? 1 : -1;
            if (dir == 0) dir = sgn;
            else if (sgn != dir) monotone = false;
        }
        total += d;
    }
    rep.cyclicOrderPreserved =
        monotone && std::abs(std::abs(total) - 2 * M_PI) < 1e-6;
    return rep;
}

}  // namespace henon
