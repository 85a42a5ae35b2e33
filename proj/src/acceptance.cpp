#include "henon/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "henon/parallel.hpp"

namespace henon {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Deterministic RNG (SplitMix64): identical streams on every platform.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    Complex box(double half) { return {uniform(-half, half), uniform(-half, half)}; }
};

std::string read_file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Products {
    ComponentReport repEmpty, rep0, rep1, repUps;
    std::vector<MotionTrack> tracks;
    double tOmega = 0, tOmega0 = 0, tOmega1 = 0, tUps = 0, tTracks = 0;
};

std::vector<std::pair<Complex, Complex>> injectivity_path(const RunConfig& cfg) {
    return subdivide_path({{cfg.a, cfg.c}, {2.0 * cfg.a, cfg.c}}, 2e-5);
}

const LocusCurve* find_curve(const ComponentReport& rep, WallTag tag) {
    for (const auto& c : rep.curves)
        if (c.wallTag == tag && c.closed) return &c;
    return nullptr;
}

Products compute_products(const RunConfig& cfg) {
    Products pr;
    const HenonParameter lam = cfg.parameter();
    ModelCheckOptions mopts;
    mopts.grid = cfg.grid;

    auto t0 = Clock::now();
    pr.repEmpty = check_omega_piece(lam, DyadicString(""), cfg.domain, mopts);
    pr.tOmega = seconds_since(t0);

    t0 = Clock::now();
    pr.rep0 = check_omega_piece(lam, DyadicString("0"), cfg.domain, mopts);
    pr.tOmega0 = seconds_since(t0);

    t0 = Clock::now();
    pr.rep1 = check_omega_piece(lam, DyadicString("1"), cfg.domain, mopts);
    pr.tOmega1 = seconds_since(t0);

    t0 = Clock::now();
    pr.repUps = check_upsilon_piece(lam, cfg.domain, mopts);
    pr.tUps = seconds_since(t0);

    // 100 boundary tracks on {G+ = r} along a -> 2a.
    t0 = Clock::now();
    const LocusCurve* gouter = find_curve(pr.repEmpty, WallTag::G_OUTER);
    if (gouter) {
        const auto path = injectivity_path(cfg);
        const WallSpec wall{WallTag::G_OUTER, cfg.domain.r, 0};
        TrackOptions topts;
        topts.tol_res = cfg.domain.tol_res;
        topts.green = cfg.domain.green();
        const std::size_t N = gouter->samples.size();
        const int count = 100;
        pr.tracks.resize(count);
        std::vector<int> picks(count);
        for (int i = 0; i < count; ++i)
            picks[i] = static_cast<int>((i * N) / count);
        parallel_for(count, [&](int i) {
            const LocusSample& s = gouter->samples[picks[i]];
            const MotionInvariant inv =
                invariant_for_wall(lam, s.point, wall, cfg.domain.green());
            pr.tracks[i] = track_point(inv, path, s, topts);
        });
    }
    pr.tTracks = seconds_since(t0);
    return pr;
}

void write_products(const fs::path& dir, const RunConfig& cfg, const Products& pr) {
    fs::create_directories(dir);
    const HenonParameter lam = cfg.parameter();
    const double aAbs = std::abs(cfg.a);
    const std::vector<WallSpec> walls{
        {WallTag::Y_BOUND, cfg.domain.y_bound, 0},
        {WallTag::U_WALL, aAbs * cfg.domain.y_bound, 0},
        {WallTag::G_OUTER, cfg.domain.r, 0},
        {WallTag::G_INNER, cfg.domain.r / 2, 1},
        {WallTag::P_WALL, aAbs * cfg.domain.y_bound, 0}};
    write_trace_jsonl((dir / "omega_empty.jsonl").string(), lam, cfg.domain,
                      pr.repEmpty.interior, pr.repEmpty.curves, walls);
    write_component_report((dir / "check_empty.json").string(), pr.repEmpty);
    write_component_report((dir / "check_0.json").string(), pr.rep0);
    write_component_report((dir / "check_1.json").string(), pr.rep1);
    write_component_report((dir / "check_upsilon.json").string(), pr.repUps);
    write_tracks_jsonl((dir / "tracks.jsonl").string(), pr.tracks);
}

std::string count_signature(const ComponentReport& r) {
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (const auto& [tag, n] : r.wallCurveCounts) {
        if (!first) os << ",";
        first = false;
        os << wall_tag_name(tag) << ":" << n;
    }
    os << ")" << (r.connected ? " connected" : " disconnected");
    return os.str();
}

}  // namespace

AcceptanceOutcome run_acceptance(const RunConfig& cfg, const std::string& outDir) {
    AcceptanceOutcome out;
    const HenonParameter lam = cfg.parameter();
    const GreenOptions gopts = cfg.domain.green();
    const fs::path base(outDir);
    fs::create_directories(base);

    auto add = [&](int id, const std::string& name, bool passed,
                   const std::string& detail, double secs) {
        out.criteria.push_back({id, name, passed, detail, secs});
    };

    // ---- 1: functional equations -------------------------------------------
    {
        const auto t0 = Clock::now();
        Rng rng(cfg.seed);
        int doneP = 0, doneM = 0, attempts = 0;
        double worstP = 0, worstM = 0;
        const double la = std::log(std::abs(lam.a));
        while ((doneP < 10000 || doneM < 10000) && attempts < 200000) {
            attempts++;
            const PhasePoint p{rng.box(3.0), rng.box(3.0)};
            if (doneP < 10000) {
                const PotentialValue g = green_plus(lam, p, 1e-10, gopts);
                if (g.decided()) {
                    const PotentialValue gf =
                        green_plus(lam, step_forward(lam, p), 1e-10, gopts);
                    if (gf.decided()) {
                        doneP++;
                        const double err = std::abs(gf.value - 2 * g.value) /
                                           std::max(1.0, g.value);
                        worstP = std::max(worstP, err);
                    }
                }
            }
            if (doneM < 10000) {
                const PotentialValue g = green_minus(lam, p, 1e-10, gopts);
                if (g.decided()) {
                    const PotentialValue gb =
                        green_minus(lam, step_backward(lam, p), 1e-10, gopts);
                    if (gb.decided()) {
                        doneM++;
                        const double err = std::abs(gb.value - 2 * g.value + la) /
                                           std::max(1.0, std::abs(g.value));
                        worstM = std::max(worstM, err);
                    }
                }
            }
        }
        const double secs = seconds_since(t0);
        const bool ok = doneP >= 10000 && doneM >= 10000 && worstP < 1e-8 &&
                        worstM < 1e-8 && secs < 10.0;
        add(1, "functional equations G+ / G-", ok,
            "max fwd err " + format_double(worstP) + ", max bwd err " +
                format_double(worstM) + ", points " + std::to_string(doneP) + "/" +
                std::to_string(doneM),
            secs);
    }

    // ---- 2: Boettcher semiconjugacy ----------------------------------------
    {
        const auto t0 = Clock::now();
        Rng rng(cfg.seed + 1);
        int done = 0, attempts = 0;
        double worstSemi = 0, worstMod = 0;
        while (done < 1000 && attempts < 20000) {
            attempts++;
            const PhasePoint p{rng.box(3.0), rng.box(3.0)};
            const PotentialValue g = green_plus(lam, p, 1e-12, gopts);
            if (!g.escaping() || g.value < 0.02) continue;
            const int n = done % 4;
            if (std::exp2(n) * g.value > 300.0) continue;
            try {
                const BottcherPower b0 = phi_plus_power(lam, p, n, gopts);
                const BottcherPower b1 =
                    phi_plus_power(lam, step_forward(lam, p), n, gopts);
                const Complex sq = b0.value * b0.value;
                worstSemi = std::max(worstSemi, std::abs(b1.value - sq) / std::abs(sq));
                const double mod = std::abs(b0.value) /
                                   std::exp(std::exp2(n) * g.value);
                worstMod = std::max(worstMod, std::abs(mod - 1.0));
                done++;
            } catch (const NotEscaping&) {
            }
        }
        const bool ok = done >= 1000 && worstSemi < 1e-8 && worstMod < 1e-8;
        add(2, "Boettcher semiconjugacy and modulus", ok,
            "max semiconjugacy err " + format_double(worstSemi) +
                ", max modulus err " + format_double(worstMod) + ", points " +
                std::to_string(done),
            seconds_since(t0));
    }

    // ---- 3: gradient vs finite differences ---------------------------------
    {
        const auto t0 = Clock::now();
        Rng rng(cfg.seed + 2);
        const double h = 1e-5;
        int doneP = 0, doneM = 0, attempts = 0;
        double worst = 0;
        GradientOptions gr;
        gr.escape_radius = cfg.domain.escape_radius;
        auto fd_check_plus = [&](const PhasePoint& p, const ComplexGradient& g) {
            auto G = [&](const PhasePoint& q) {
                return green_plus(lam, q, 1e-13, gopts).value;
            };
            const double dxr = (G({p.x + h, p.y}) - G({p.x - h, p.y})) / (2 * h);
            const double dxi = (G({p.x + Complex(0, h), p.y}) -
                                G({p.x - Complex(0, h), p.y})) / (2 * h);
            const double dyr = (G({p.x, p.y + h}) - G({p.x, p.y - h})) / (2 * h);
            const double dyi = (G({p.x, p.y + Complex(0, h)}) -
                                G({p.x, p.y - Complex(0, h)})) / (2 * h);
            const double an[4] = {g.gx.real(), -g.gx.imag(), g.gy.real(),
                                  -g.gy.imag()};
            const double fd[4] = {dxr, dxi, dyr, dyi};
            double num = 0, den = 0;
            for (int i = 0; i < 4; ++i) {
                num += (fd[i] - an[i]) * (fd[i] - an[i]);
                den += an[i] * an[i];
            }
            return std::sqrt(num / den);
        };
        auto fd_check_minus = [&](const PhasePoint& p, const ComplexGradient& g) {
            auto G = [&](const PhasePoint& q) {
                return green_minus(lam, q, 1e-13, gopts).value;
            };
            const double dxr = (G({p.x + h, p.y}) - G({p.x - h, p.y})) / (2 * h);
            const double dxi = (G({p.x + Complex(0, h), p.y}) -
                                G({p.x - Complex(0, h), p.y})) / (2 * h);
            const double dyr = (G({p.x, p.y + h}) - G({p.x, p.y - h})) / (2 * h);
            const double dyi = (G({p.x, p.y + Complex(0, h)}) -
                                G({p.x, p.y - Complex(0, h)})) / (2 * h);
            const double an[4] = {g.gx.real(), -g.gx.imag(), g.gy.real(),
                                  -g.gy.imag()};
            const double fd[4] = {dxr, dxi, dyr, dyi};
            double num = 0, den = 0;
            for (int i = 0; i < 4; ++i) {
                num += (fd[i] - an[i]) * (fd[i] - an[i]);
                den += an[i] * an[i];
            }
            return std::sqrt(num / den);
        };
        int attemptsCap = 40000;
        while ((doneP < 1000 || doneM < 1000) && attempts < attemptsCap) {
            attempts++;
            const PhasePoint p{rng.box(3.0), rng.box(3.0)};
            if (doneP < 1000) {
                const PotentialValue g = green_plus(lam, p, 1e-12, gopts);
                if (g.escaping() && g.value > 0.02) {
                    auto gr1 = try_grad_log_phi_plus(lam, p, gr);
                    if (gr1) {
                        worst = std::max(worst, fd_check_plus(p, *gr1));
                        doneP++;
                    }
                }
            }
            if (doneM < 1000) {
                const PotentialValue g = green_minus(lam, p, 1e-12, gopts);
                if (g.escaping() && g.value - std::log(std::abs(lam.a)) > 0.02) {
                    auto gr2 = try_grad_log_phi_minus(lam, p, gr);
                    if (gr2) {
                        worst = std::max(worst, fd_check_minus(p, *gr2));
                        doneM++;
                    }
                }
            }
        }
        const bool ok = doneP >= 1000 && doneM >= 1000 && worst < 1e-5;
        add(3, "gradients match centered finite differences", ok,
            "max rel err " + format_double(worst) + ", points " +
                std::to_string(doneP) + "/" + std::to_string(doneM),
            seconds_since(t0));
    }

    // ---- products for 4, 5, 6, 8, 11 ---------------------------------------
    Products pr = compute_products(cfg);
    write_products(base / "run1", cfg, pr);

    // ---- 4: locus invariance under f and f^{-1} ----------------------------
    {
        const auto t0 = Clock::now();
        std::vector<LocusSample> pool;
        for (const auto& c : pr.repEmpty.curves)
            for (const auto& s : c.samples)
                if (s.residual < 1e-9) pool.push_back(s);
        const int want = 500;
        int used = 0, okCount = 0;
        double worstMove = 0;
        RefineOptions ropts;
        ropts.tol_res = cfg.domain.tol_res;
        const std::size_t stride = std::max<std::size_t>(1, pool.size() / want);
        for (std::size_t i = 0; i < pool.size() && used < want; i += stride) {
            used++;
            const PhasePoint fwd = step_forward(lam, pool[i].point);
            const PhasePoint bwd = step_backward(lam, pool[i].point);
            const RefineResult rf = refine_zero(lam, fwd, ropts);
            const RefineResult rb = refine_zero(lam, bwd, ropts);
            if (rf.converged && rb.converged && rf.moved < 1e-6 && rb.moved < 1e-6)
                okCount++;
            worstMove = std::max({worstMove, rf.moved, rb.moved});
        }
        const bool ok = used >= want && okCount == used;
        add(4, "locus invariance under f and f^{-1}", ok,
            std::to_string(okCount) + "/" + std::to_string(used) +
                " re-converged, max move " + format_double(worstMove),
            seconds_since(t0));
    }

    // ---- 5: wall counts for Omega pieces -----------------------------------
    {
        auto judge = [&](const ComponentReport& r) {
            auto at = [&](WallTag t) {
                auto it = r.wallCurveCounts.find(t);
                return it == r.wallCurveCounts.end() ? -1 : it->second;
            };
            return at(WallTag::Y_BOUND) == 1 && at(WallTag::U_WALL) == 2 &&
                   at(WallTag::G_OUTER) == 1 && at(WallTag::G_INNER) == 2 &&
                   r.connected;
        };
        const bool ok = judge(pr.repEmpty) && judge(pr.rep0) && judge(pr.rep1) &&
                        pr.tOmega < 300 && pr.tOmega0 < 300 && pr.tOmega1 < 300;
        add(5, "Omega wall counts (1,2,1,2) + connectivity", ok,
            "empty " + count_signature(pr.repEmpty) + "; '0' " +
                count_signature(pr.rep0) + "; '1' " + count_signature(pr.rep1),
            pr.tOmega + pr.tOmega0 + pr.tOmega1);
    }

    // ---- 6: Upsilon piece ----------------------------------------------------
    {
        auto at = [&](WallTag t) {
            auto it = pr.repUps.wallCurveCounts.find(t);
            return it == pr.repUps.wallCurveCounts.end() ? -1 : it->second;
        };
        const bool ok = at(WallTag::P_WALL) == 1 && pr.repUps.endBehavior &&
                        pr.repUps.connected && pr.tUps < 120;
        add(6, "Upsilon piece: one P_WALL curve + end behavior", ok,
            count_signature(pr.repUps) +
                (pr.repUps.endBehavior ? ", end ok" : ", end FAILED"),
            pr.tUps);
    }

    // ---- 7: handle combinatorics --------------------------------------------
    {
        const auto t0 = Clock::now();
        const ModelGraph g = build_model_graph(0, 12, 8);
        bool ok = true;
        std::ostringstream detail;
        for (int m = 0; m <= 4 && ok; ++m) {
            for (int k = 1; k <= 8 && ok; ++k) {
                const int got = handles_between(g, m, k);
                // independent oracle: brute enumeration of words of length k-1
                int expect = 0;
                for (const auto& s : all_strings(k - 1)) {
                    (void)s;
                    expect++;
                }
                if (got != expect || got != (1 << (k - 1))) {
                    ok = false;
                    detail << "mismatch at m=" << m << " k=" << k << ": " << got;
                }
            }
        }
        const double secs = seconds_since(t0);
        if (ok) detail << "all (m,k) match 2^{k-1}, m<=4, k<=8";
        add(7, "handle counts 2^{k-1}", ok && secs < 1.0, detail.str(), secs);
    }

    // ---- 8: motion hypotheses ------------------------------------------------
    {
        const auto t0 = Clock::now();
        bool ok = false;
        std::ostringstream detail;
        const LocusCurve* gouter = find_curve(pr.repEmpty, WallTag::G_OUTER);
        if (!gouter) {
            detail << "no closed G_OUTER curve available";
        } else {
            const WallSpec wall{WallTag::G_OUTER, cfg.domain.r, 0};
            std::vector<LocusSample> seeds;
            std::vector<MotionInvariant> invs;
            const std::size_t N = gouter->samples.size();
            for (int i = 0; i < 16; ++i) {
                const LocusSample& s = gouter->samples[(i * N) / 16];
                seeds.push_back(s);
                invs.push_back(invariant_for_wall(lam, s.point, wall, gopts));
            }
            TrackOptions topts;
            topts.tol_res = cfg.domain.tol_res;
            topts.green = gopts;
            const HolomorphyScan h1 =
                holomorphy_scan(lam, true, 1e-6, 2, seeds, invs, topts);
            const HolomorphyScan h2 =
                holomorphy_scan(lam, true, 5e-7, 2, seeds, invs, topts);
            int complete = 0;
            for (const auto& t : pr.tracks)
                if (t.complete) complete++;
            const InjectivityReport inj = injectivity_check(pr.tracks);
            bool injOk = !pr.tracks.empty() && complete == (int)pr.tracks.size();
            for (double d : inj.perWaypoint)
                if (!(d > 0)) injOk = false;
            const bool halves = h2.ratio <= 0.55 * h1.ratio || h2.ratio < 1e-6;
            ok = h1.ratio < 1e-3 && halves && injOk && h1.failures == 0 &&
                 h2.failures == 0;
            detail << "holomorphy ratio " << format_double(h1.ratio) << " -> "
                   << format_double(h2.ratio) << " at half step; tracks "
                   << complete << "/" << pr.tracks.size()
                   << " complete, min pairwise distance "
                   << format_double(inj.minDistance);
        }
        const double secs = seconds_since(t0) + pr.tTracks;
        add(8, "holomorphy + injectivity of the boundary motion", ok && secs < 600,
            detail.str(), secs);
    }

    // ---- 9: structural invariance across parameters --------------------------
    {
        const auto t0 = Clock::now();
        bool ok = true;
        std::ostringstream detail;
        for (double scale : {1.5, 2.0}) {
            RunConfig c2 = cfg;
            c2.a = cfg.a * scale;
            c2 = resolve_config(c2);
            const HenonParameter lam2 = c2.parameter();
            ModelCheckOptions mopts;
            mopts.grid = c2.grid;
            auto judge = [&](const ComponentReport& r) {
                auto at = [&](WallTag t) {
                    auto it = r.wallCurveCounts.find(t);
                    return it == r.wallCurveCounts.end() ? -1 : it->second;
                };
                return at(WallTag::Y_BOUND) == 1 && at(WallTag::U_WALL) == 2 &&
                       at(WallTag::G_OUTER) == 1 && at(WallTag::G_INNER) == 2 &&
                       r.connected;
            };
            const ComponentReport rE =
                check_omega_piece(lam2, DyadicString(""), c2.domain, mopts);
            const ComponentReport r0 =
                check_omega_piece(lam2, DyadicString("0"), c2.domain, mopts);
            const ComponentReport r1 =
                check_omega_piece(lam2, DyadicString("1"), c2.domain, mopts);
            const ComponentReport rU = check_upsilon_piece(lam2, c2.domain, mopts);
            auto atU = [&](WallTag t) {
                auto it = rU.wallCurveCounts.find(t);
                return it == rU.wallCurveCounts.end() ? -1 : it->second;
            };
            const bool thisOk = judge(rE) && judge(r0) && judge(r1) &&
                                atU(WallTag::P_WALL) == 1 && rU.endBehavior &&
                                rU.connected;
            detail << "a*" << format_double(scale) << ": "
                   << (thisOk ? "ok" : "FAILED") << "; ";
            ok = ok && thisOk;
        }
        add(9, "wall counts invariant along a in {1,1.5,2}e-4", ok, detail.str(),
            seconds_since(t0));
    }

    // ---- 10: 1D degeneration --------------------------------------------------
    {
        const auto t0 = Clock::now();
        Rng rng(cfg.seed + 3);
        HenonParameter lam8(Complex(1e-8, 0.0), cfg.c);
        int done = 0, attempts = 0;
        double worst = 0;
        while (done < 1000 && attempts < 20000) {
            attempts++;
            const Complex x = rng.box(3.0);
            const Complex y = rng.box(3.0);
            const PotentialValue g1 = green_1d(x, cfg.c, 1e-10, gopts);
            if (!g1.escaping()) continue;
            const PotentialValue g2 = green_plus(lam8, {x, y}, 1e-10, gopts);
            if (!g2.escaping()) continue;
            worst = std::max(worst, std::abs(g2.value - g1.value));
            done++;
        }
        const bool ok = done >= 1000 && worst < 1e-4;
        add(10, "1D degeneration |G+ - G_{p_c}| at |a|=1e-8", ok,
            "max abs err " + format_double(worst) + ", points " +
                std::to_string(done),
            seconds_since(t0));
    }

    // ---- 11: determinism -------------------------------------------------------
    {
        const auto t0 = Clock::now();
        const Products pr2 = compute_products(cfg);
        write_products(base / "run2", cfg, pr2);
        bool ok = true;
        std::ostringstream detail;
        for (const char* name :
             {"omega_empty.jsonl", "check_empty.json", "check_0.json",
              "check_1.json", "check_upsilon.json", "tracks.jsonl"}) {
            const std::string b1 = read_file_bytes(base / "run1" / name);
            const std::string b2 = read_file_bytes(base / "run2" / name);
            if (b1.empty() || b1 != b2) {
                ok = false;
                detail << name << " differs; ";
            }
        }
        if (ok) detail << "all artifacts byte-identical across reruns";
        add(11, "deterministic artifacts", ok, detail.str(), seconds_since(t0));
    }

    // report artifact (deterministic: no timings)
    {
        std::ofstream rep(base / "verify_report.json", std::ios::binary);
        rep << results_report_json(out);
    }
    return out;
}

std::string format_results_table(const AcceptanceOutcome& outcome) {
    std::ostringstream os;
    for (const auto& c : outcome.criteria) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%7.2fs", c.seconds);
        os << (c.passed ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name
           << "  (" << buf << ")  " << c.detail << "\n";
    }
    os << (outcome.allPassed() ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED")
       << "\n";
    return os.str();
}

std::string results_report_json(const AcceptanceOutcome& outcome) {
    std::ostringstream os;
    os << "{\n  \"schemaVersion\": 1,\n  \"criteria\": [\n";
    for (std::size_t i = 0; i < outcome.criteria.size(); ++i) {
        const auto& c = outcome.criteria[i];
        os << "    {\"id\": " << c.id << ", \"name\": \"" << c.name
           << "\", \"passed\": " << (c.passed ? "true" : "false")
           << ", \"detail\": \"";
        for (char ch : c.detail) {
            if (ch == '"' || ch == '\\') os << '\\';
            os << ch;
        }
        os << "\"}";
        os << (i + 1 < outcome.criteria.size() ? ",\n" : "\n");
    }
    os << "  ],\n  \"allPassed\": " << (outcome.allPassed() ? "true" : "false")
       << "\n}\n";
    return os.str();
}

}  // namespace henon
