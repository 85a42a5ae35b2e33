#include "henon/locus.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>

namespace henon {

namespace {

using Vec4 = Eigen::Vector4d;

Vec4 to_vec(const PhasePoint& p) {
    return Vec4(p.x.real(), p.x.imag(), p.y.real(), p.y.imag());
}

PhasePoint to_point(const Vec4& v) {
    return {Complex(v[0], v[1]), Complex(v[2], v[3])};
}

struct DEval {
    Complex d;
    double gplus_norm = 0.0;
    double gminus_norm = 0.0;
    bool ok = false;

    double normalized() const {
        const double s = gplus_norm * gminus_norm;
        return s > 0 ? std::abs(d) / s : std::numeric_limits<double>::infinity();
    }
};

DEval eval_d(const HenonParameter& lambda, const PhasePoint& p,
             const GradientOptions& opts) {
    DEval e;
    auto gp = try_grad_log_phi_plus(lambda, p, opts);
    if (!gp) return e;
    auto gm = try_grad_log_phi_minus(lambda, p, opts);
    if (!gm) return e;
    e.d = gp->gx * gm->gy - gp->gy * gm->gx;
    e.gplus_norm = gp->norm();
    e.gminus_norm = gm->norm();
    e.ok = true;
    return e;
}

}  // namespace

std::optional<TangencyValue> try_tangency(const HenonParameter& lambda,
                                          const PhasePoint& p,
                                          const TangencyOptions& opts) {
    const DEval e = eval_d(lambda, p, opts.grad);
    if (!e.ok) return std::nullopt;
    return TangencyValue{e.d, e.normalized()};
}

TangencyValue tangency(const HenonParameter& lambda, const PhasePoint& p,
                       const TangencyOptions& opts) {
    auto t = try_tangency(lambda, p, opts);
    if (!t)
        throw NotEscaping("tangency: point not decided escaping in both directions");
    return *t;
}

const char* wall_tag_name(WallTag tag) {
    switch (tag) {
        case WallTag::Y_BOUND: return "Y_BOUND";
        case WallTag::U_WALL: return "U_WALL";
        case WallTag::G_OUTER: return "G_OUTER";
        case WallTag::G_INNER: return "G_INNER";
        case WallTag::P_WALL: return "P_WALL";
    }
    return "?";
}

std::optional<WallTag> wall_tag_from_name(const std::string& name) {
    if (name == "Y_BOUND") return WallTag::Y_BOUND;
    if (name == "U_WALL") return WallTag::U_WALL;
    if (name == "G_OUTER") return WallTag::G_OUTER;
    if (name == "G_INNER") return WallTag::G_INNER;
    if (name == "P_WALL") return WallTag::P_WALL;
    return std::nullopt;
}

double wall_value(const HenonParameter& lambda, const PhasePoint& p,
                  const WallSpec& wall, const GreenOptions& opts) {
    switch (wall.tag) {
        case WallTag::Y_BOUND:
            return std::abs(p.y) - wall.level;
        case WallTag::U_WALL:
        case WallTag::P_WALL:
            return std::abs(u_c(p, lambda.c)) - wall.level;
        case WallTag::G_OUTER:
        case WallTag::G_INNER: {
            const PotentialValue g = green_plus(lambda, p, 1e-13, opts);
            if (!g.escaping()) return std::numeric_limits<double>::quiet_NaN();
            return g.value - wall.level;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

RefineResult refine_zero(const HenonParameter& lambda, const PhasePoint& p0,
                         const RefineOptions& opts) {
    RefineResult out;
    Vec4 v = to_vec(p0);
    DEval e = eval_d(lambda, to_point(v), opts.grad);
    if (!e.ok) {
        out.message = "refine_zero: seed outside both escape regions";
        return out;
    }
    double res = e.normalized();
    const Vec4 v0 = v;
    auto finish = [&](bool conv, const std::string& msg) {
        out.sample = LocusSample{to_point(v), res, std::nullopt, std::nullopt};
        out.moved = (v - v0).norm();
        out.converged = conv;
        out.message = msg;
        return out;
    };
    if (res < opts.tol_res) return finish(true, "");

    for (int it = 0; it < opts.maxSteps; ++it) {
        // 2x4 Jacobian of (Re D, Im D) by central differences
        Eigen::Matrix<double, 2, 4> J;
        bool jac_ok = true;
        for (int i = 0; i < 4 && jac_ok; ++i) {
            Vec4 vp = v, vm = v;
            vp[i] += opts.fd_step;
            vm[i] -= opts.fd_step;
            const DEval ep = eval_d(lambda, to_point(vp), opts.grad);
            const DEval em = eval_d(lambda, to_point(vm), opts.grad);
            if (!ep.ok || !em.ok) {
                jac_ok = false;
                break;
            }
            J(0, i) = (ep.d.real() - em.d.real()) / (2 * opts.fd_step);
            J(1, i) = (ep.d.imag() - em.d.imag()) / (2 * opts.fd_step);
        }
        if (!jac_ok) return finish(false, "refine_zero: Jacobian evaluation failed");

        Eigen::Vector2d F(e.d.real(), e.d.imag());
        const Eigen::Matrix2d JJt = J * J.transpose();
        const Eigen::FullPivLU<Eigen::Matrix2d> lu(JJt);
        if (!lu.isInvertible())
            return finish(false, "refine_zero: singular normal matrix");
        Vec4 step = J.transpose() * lu.solve(F);

        // The Gauss-Newton step estimates the distance to the zero set. When
        // it drops below coordinate representability the point cannot be
        // placed closer to the locus in doubles.
        if (step.norm() <= 32.0 * std::numeric_limits<double>::epsilon() *
                               (1.0 + v.norm()))
            return finish(true, "converged at representable floor");

        bool improved = false;
        for (int halve = 0; halve <= 8; ++halve) {
            const Vec4 vn = v - step;
            const DEval en = eval_d(lambda, to_point(vn), opts.grad);
            if (en.ok && std::abs(en.d) < std::abs(e.d)) {
                v = vn;
                e = en;
                res = e.normalized();
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) return finish(false, "refine_zero: residual not reduced");
        if (res < opts.tol_res) return finish(true, "");
    }
    return finish(res < opts.tol_res, "refine_zero: divergence (max steps)");
}

namespace {

// Combined residual vector for {D = 0, wall = level}.
struct WallSystem {
    const HenonParameter& lambda;
    WallSpec wall;
    GreenOptions green;
    GradientOptions grad;

    struct Eval {
        Eigen::Vector3d F;   // (Re D, Im D, wall)
        double norm_d = 0;   // normalized tangency residual
        bool ok = false;
    };

    Eval operator()(const Vec4& v) const {
        Eval out;
        const PhasePoint p = to_point(v);
        const DEval e = eval_d(lambda, p, grad);
        if (!e.ok) return out;
        const double w = wall_value(lambda, p, wall, green);
        if (!std::isfinite(w)) return out;
        out.F = Eigen::Vector3d(e.d.real(), e.d.imag(), w);
        out.norm_d = e.normalized();
        out.ok = true;
        return out;
    }

    bool jacobian(const Vec4& v, double h, Eigen::Matrix<double, 3, 4>& J) const {
        for (int i = 0; i < 4; ++i) {
            Vec4 vp = v, vm = v;
            vp[i] += h;
            vm[i] -= h;
            const Eval ep = (*this)(vp);
            const Eval em = (*this)(vm);
            if (!ep.ok || !em.ok) return false;
            J.col(i) = (ep.F - em.F) / (2 * h);
        }
        return true;
    }

    bool converged(const Eval& e, double tol_res, double wall_tol) const {
        return e.norm_d < tol_res &&
               std::abs(e.F[2]) < wall_tol * std::max(1.0, std::abs(wall.level));
    }
};

// Minimal-norm Gauss-Newton onto the 3-constraint set. Returns the corrected
// vector, or nullopt. `budget` limits iterations.
std::optional<Vec4> correct_onto_wall(const WallSystem& sys, Vec4 v, double fd_step,
                                      double tol_res, double wall_tol, int budget,
                                      double* out_res = nullptr) {
    WallSystem::Eval e = sys(v);
    if (!e.ok) return std::nullopt;
    for (int it = 0; it < budget; ++it) {
        if (sys.converged(e, tol_res, wall_tol)) {
            if (out_res) *out_res = e.norm_d;
            return v;
        }
        Eigen::Matrix<double, 3, 4> J;
        if (!sys.jacobian(v, fd_step, J)) return std::nullopt;
        const Eigen::Matrix3d JJt = J * J.transpose();
        const Eigen::FullPivLU<Eigen::Matrix3d> lu(JJt);
        if (!lu.isInvertible()) return std::nullopt;
        Vec4 step = J.transpose() * lu.solve(e.F);
        if (step.norm() <= 8.0 * std::numeric_limits<double>::epsilon() *
                               (1.0 + v.norm()))
            break;  // representability floor; the final check decides
        bool improved = false;
        for (int halve = 0; halve <= 6; ++halve) {
            const Vec4 vn = v - step;
            const WallSystem::Eval en = sys(vn);
            if (en.ok && en.F.norm() < e.F.norm()) {
                v = vn;
                e = en;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;  // cannot reduce further; the final check decides
    }
    if (sys.converged(e, tol_res, wall_tol)) {
        if (out_res) *out_res = e.norm_d;
        return v;
    }
    return std::nullopt;
}

}  // namespace

std::optional<PhasePoint> solve_on_wall(const HenonParameter& lambda,
                                        const PhasePoint& guess,
                                        const WallSpec& wall,
                                        const TraceOptions& opts) {
    WallSystem sys{lambda, wall, opts.green, opts.grad};
    auto v = correct_onto_wall(sys, to_vec(guess), opts.fd_step, opts.tol_res,
                               opts.wall_tol, 40);
    if (!v) return std::nullopt;
    return to_point(*v);
}

LocusCurve trace_wall_curve(const HenonParameter& lambda, const PhasePoint& seed,
                            const WallSpec& wall, const TraceOptions& opts) {
    LocusCurve curve;
    curve.wallTag = wall.tag;
    WallSystem sys{lambda, wall, opts.green, opts.grad};

    double res = 0.0;
    auto v0 = correct_onto_wall(sys, to_vec(seed), opts.fd_step, opts.tol_res,
                                opts.wall_tol, 40, &res);
    if (!v0) {
        curve.diagnostic = "seed failed to converge onto the wall system";
        return curve;
    }
    Vec4 v = *v0;
    const Vec4 start = v;
    curve.samples.push_back({to_point(v), res, std::nullopt, wall.tag});

    auto tangent_at = [&](const Vec4& at) -> std::optional<Vec4> {
        Eigen::Matrix<double, 3, 4> J;
        if (!sys.jacobian(at, opts.fd_step, J)) return std::nullopt;
        Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(
            J, Eigen::ComputeFullV);
        Vec4 t = svd.matrixV().col(3);
        const double n = t.norm();
        if (!(n > 0)) return std::nullopt;
        return Vec4(t / n);
    };

    auto t0 = tangent_at(v);
    if (!t0) {
        curve.diagnostic = "tangent computation failed at seed";
        return curve;
    }
    Vec4 tprev = *t0;
    double h = 1e-4 * (1.0 + v.norm());
    const double hmax = 0.25 * (1.0 + v.norm());
    double traveled = 0.0;

    for (int stepCount = 0; stepCount < opts.maxPoints; ++stepCount) {
        auto t = tangent_at(v);
        if (!t) {
            curve.diagnostic = "tangent computation failed";
            return curve;
        }
        if (t->dot(tprev) < 0) *t = -*t;
        // curvature-limited step: aim at 1e-2 of the local turning scale
        const double angle = std::acos(std::clamp(t->dot(tprev), -1.0, 1.0));
        if (angle > 1e-12 && curve.samples.size() > 1) {
            const double target = 0.02 * h / angle;
            h = std::min(h * 1.5, std::max(target, opts.minStep));
        } else {
            h = std::min(h * 1.5, hmax);
        }
        h = std::min(h, hmax);
        tprev = *t;

        bool accepted = false;
        while (!accepted) {
            const Vec4 predicted = v + h * (*t);
            double res_corr = 0.0;
            auto corrected = correct_onto_wall(sys, predicted, opts.fd_step,
                                               opts.tol_res, opts.wall_tol, 12,
                                               &res_corr);
            if (corrected &&
                (*corrected - predicted).norm() <= 0.6 * h + 1e-12 * (1 + v.norm())) {
                v = *corrected;
                traveled += h;
                curve.samples.push_back({to_point(v), res_corr, std::nullopt, wall.tag});
                accepted = true;
            } else {
                h *= 0.5;
                if (h < opts.minStep) {
                    curve.diagnostic = "step collapse below minStep";
                    return curve;
                }
            }
        }

        if (curve.samples.size() > 8 && traveled > 4 * h &&
            (v - start).norm() < 2 * h) {
            curve.closed = true;
            return curve;
        }
        if (v.norm() > 1e3 * (1 + start.norm())) {
            curve.diagnostic = "trace left the working region";
            return curve;
        }
    }
    curve.diagnostic = "maxPoints reached without closure";
    return curve;
}

namespace {

std::optional<Complex> complex_newton(const std::function<std::optional<Complex>(Complex)>& F,
                                      Complex z0, double tol, int itmax) {
    Complex z = z0;
    Complex best = z0;
    double bestAbs = std::numeric_limits<double>::infinity();
    bool smallStepSeen = false;
    for (int it = 0; it < itmax; ++it) {
        auto f = F(z);
        if (!f) return smallStepSeen ? std::optional(best) : std::nullopt;
        if (std::abs(*f) < bestAbs) {
            bestAbs = std::abs(*f);
            best = z;
        } else if (smallStepSeen) {
            return best;  // residual floor reached
        }
        const double h = 1e-7 * (1.0 + std::abs(z));
        auto fp = F(z + h);
        auto fm = F(z - h);
        if (!fp || !fm) return smallStepSeen ? std::optional(best) : std::nullopt;
        const Complex der = (*fp - *fm) / (2.0 * h);
        if (der == Complex(0.0, 0.0)) return std::nullopt;
        const Complex step = *f / der;
        z -= step;
        if (std::abs(step) < tol * (1.0 + std::abs(z))) smallStepSeen = true;
        if (std::abs(step) <
            4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(z)))
            return std::abs(*F(z)) < bestAbs ? z : best;
    }
    return smallStepSeen ? std::optional(best) : std::nullopt;
}

}  // namespace

std::optional<Complex> solve_tangency_in_x(const HenonParameter& lambda, Complex y,
                                           Complex x0, const TangencyOptions& opts) {
    auto F = [&](Complex x) -> std::optional<Complex> {
        const DEval e = eval_d(lambda, {x, y}, opts.grad);
        if (!e.ok) return std::nullopt;
        return e.d;
    };
    return complex_newton(F, x0, 1e-13, 40);
}

std::optional<Complex> solve_tangency_in_y(const HenonParameter& lambda, Complex x,
                                           Complex y0, const TangencyOptions& opts) {
    auto F = [&](Complex y) -> std::optional<Complex> {
        const DEval e = eval_d(lambda, {x, y}, opts.grad);
        if (!e.ok) return std::nullopt;
        return e.d;
    };
    return complex_newton(F, y0, 1e-13, 40);
}

std::vector<LocusSample> sample_component(const HenonParameter& lambda,
                                          const DyadicString& alpha,
                                          const DomainConfig& cfg,
                                          const GridSpec& grid,
                                          const PreimageTable& table) {
    if (!lambda.perturbative)
        throw RegimeError("sample_component: parameter not in perturbative regime");
    const Complex xi = table.xi(alpha);
    const int n = alpha.length();
    const double pitch = grid.pitch > 0 ? grid.pitch : cfg.y_bound / 12.0;
    const double xwin =
        grid.xWindow > 0 ? grid.xWindow : 0.4 * table.neighbor_separation(alpha);

    std::vector<LocusSample> out;
    const int m = static_cast<int>(std::floor(cfg.y_bound / pitch));
    TangencyOptions topts;
    for (int iy = -m; iy <= m; ++iy) {
        for (int ix = -m; ix <= m; ++ix) {
            const Complex y(ix * pitch, iy * pitch);
            if (std::abs(y) > cfg.y_bound) continue;
            auto x = solve_tangency_in_x(lambda, y, xi, topts);
            if (!x) continue;
            if (std::abs(*x - xi) > xwin) continue;
            const PhasePoint p{*x, y};
            if (in_omega(lambda, p, cfg) != Tristate::True) continue;
            const PotentialValue g = green_plus(lambda, p, 1e-11, cfg.green());
            if (!g.escaping()) continue;
            if (band_index(g.value, cfg.r) != n) continue;
            const auto cls = classify_component(lambda, p, cfg, table);
            if (!(cls.id.label == alpha)) continue;
            const auto t = try_tangency(lambda, p, topts);
            if (!t || t->normalized > cfg.tol_res) continue;
            out.push_back({p, t->normalized, alpha, std::nullopt});
        }
    }
    return out;
}

}  // namespace henon
