#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "henon/acceptance.hpp"

namespace {

using namespace henon;

PhasePoint parse_point(const std::string& text) {
    std::vector<double> vals;
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() == 2) return {Complex(vals[0], 0.0), Complex(vals[1], 0.0)};
    if (vals.size() == 4)
        return {Complex(vals[0], vals[1]), Complex(vals[2], vals[3])};
    throw std::runtime_error("--point expects x,y or x_re,x_im,y_re,y_im");
}

void emit_error(const std::string& type, const std::string& message) {
    std::cerr << "{\"error\":{\"type\":\"" << type << "\",\"message\":\"";
    for (char ch : message) {
        if (ch == '"' || ch == '\\') std::cerr << '\\';
        if (ch == '\n') {
            std::cerr << ' ';
            continue;
        }
        std::cerr << ch;
    }
    std::cerr << "\"}}" << std::endl;
}

const char* status_name(PotentialStatus s) {
    switch (s) {
        case PotentialStatus::Escaping: return "escaping";
        case PotentialStatus::Bounded: return "bounded";
        default: return "undecided";
    }
}

int run(int argc, char** argv) {
    CLI::App app{"critical locus toolkit for complex Henon maps"};
    app.require_subcommand(1);

    std::string configPath, pointText, outPath, inPath, component, pathFile,
        seedsFile, projText;
    bool minus = false, upsilon = false;
    double tol = 1e-10;
    int depth = 8, fromM = 0, toM = 10;

    auto* green = app.add_subcommand("green", "evaluate a Green's function");
    green->add_option("--config", configPath)->required();
    green->add_option("--point", pointText)->required();
    green->add_flag("--minus", minus);
    green->add_option("--tol", tol);

    auto* trace = app.add_subcommand("trace", "sample and trace one Omega component");
    trace->add_option("--config", configPath)->required();
    trace->add_option("--component", component)->required();
    trace->add_option("--out", outPath)->required();

    auto* check = app.add_subcommand("check-model", "verify a fundamental piece");
    check->add_option("--config", configPath)->required();
    check->add_option("--component", component);
    check->add_flag("--upsilon", upsilon);
    check->add_option("--out", outPath)->required();

    auto* graph = app.add_subcommand("model-graph", "handle-count table");
    graph->add_option("--depth", depth);
    graph->add_option("--from", fromM);
    graph->add_option("--to", toM);

    auto* cont = app.add_subcommand("continue", "track boundary seeds along a path");
    cont->add_option("--config", configPath)->required();
    cont->add_option("--path", pathFile)->required();
    cont->add_option("--seeds", seedsFile)->required();
    cont->add_option("--out", outPath)->required();

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--config", configPath)->required();
    std::string verifyOut = "verify-out";
    verify->add_option("--out", verifyOut);

    auto* render = app.add_subcommand("render", "project samples to SVG");
    render->add_option("--in", inPath)->required();
    render->add_option("--proj", projText)->required();
    render->add_option("--out", outPath)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what());
        return 64;
    }

    if (green->parsed()) {
        const RunConfig cfg = load_run_config(configPath);
        const HenonParameter lam = cfg.parameter();
        const PhasePoint p = parse_point(pointText);
        const PotentialValue v = minus
                                     ? green_minus(lam, p, tol, cfg.domain.green())
                                     : green_plus(lam, p, tol, cfg.domain.green());
        std::cout << "value=" << format_double(v.value)
                  << " errorBound=" << format_double(v.errorBound)
                  << " iterations=" << v.iterationsUsed
                  << " status=" << status_name(v.status) << "\n";
        return v.decided() ? 0 : 2;
    }

    if (trace->parsed()) {
        const RunConfig cfg = load_run_config(configPath);
        const HenonParameter lam = cfg.parameter();
        if (!lam.perturbative)
            throw RegimeError("trace: parameter not in perturbative regime");
        const DyadicString alpha(component == "empty" ? "" : component);
        ModelCheckOptions mopts;
        mopts.grid = cfg.grid;
        const ComponentReport rep =
            check_omega_piece(lam, alpha, cfg.domain, mopts);
        const double aAbs = std::abs(lam.a);
        const int n = alpha.length();
        const std::vector<WallSpec> walls{
            {WallTag::Y_BOUND, cfg.domain.y_bound, n},
            {WallTag::U_WALL, aAbs * cfg.domain.y_bound, n},
            {WallTag::G_OUTER, cfg.domain.r / std::exp2(n), n},
            {WallTag::G_INNER, cfg.domain.r / std::exp2(n + 1), n + 1}};
        write_trace_jsonl(outPath, lam, cfg.domain, rep.interior, rep.curves, walls);
        std::cout << "samples=" << rep.interior.size()
                  << " curves=" << rep.curves.size() << " out=" << outPath << "\n";
        return rep.interior.empty() ? 2 : 0;
    }

    if (check->parsed()) {
        const RunConfig cfg = load_run_config(configPath);
        const HenonParameter lam = cfg.parameter();
        ModelCheckOptions mopts;
        mopts.grid = cfg.grid;
        ComponentReport rep;
        if (upsilon) {
            rep = check_upsilon_piece(lam, cfg.domain, mopts);
        } else {
            const DyadicString alpha(component == "empty" ? "" : component);
            rep = check_omega_piece(lam, alpha, cfg.domain, mopts);
        }
        write_component_report(outPath, rep);
        std::cout << component_report_json(rep);
        return rep.matchesModel ? 0 : 1;
    }

    if (graph->parsed()) {
        const ModelGraph g = build_model_graph(fromM, toM, depth);
        std::cout << model_graph_table(g, fromM, toM);
        return 0;
    }

    if (cont->parsed()) {
        const RunConfig cfg = load_run_config(configPath);
        const HenonParameter lam = cfg.parameter();
        const auto nodes = load_parameter_path(pathFile);
        const auto seeds = load_seeds_jsonl(seedsFile, cfg.domain);
        TrackOptions topts;
        topts.tol_res = cfg.domain.tol_res;
        topts.green = cfg.domain.green();
        const auto path = subdivide_path(nodes, topts.maxParamStep);
        std::vector<MotionTrack> tracks;
        bool allComplete = true;
        for (const auto& rec : seeds) {
            MotionInvariant inv;
            if (rec.wall) {
                inv = invariant_for_wall(lam, rec.sample.point, *rec.wall,
                                         cfg.domain.green());
            } else {
                inv.kind = InvariantKind::YValue;
                inv.value = rec.sample.point.y;
            }
            tracks.push_back(track_point(inv, path, rec.sample, topts));
            allComplete = allComplete && tracks.back().complete;
        }
        write_tracks_jsonl(outPath, tracks);
        std::cout << "tracks=" << tracks.size()
                  << (allComplete ? " all complete" : " incomplete tracks present")
                  << " out=" << outPath << "\n";
        return allComplete ? 0 : 1;
    }

    if (verify->parsed()) {
        const RunConfig cfg = load_run_config(configPath);
        const AcceptanceOutcome outcome = run_acceptance(cfg, verifyOut);
        std::cout << format_results_table(outcome);
        return outcome.allPassed() ? 0 : 1;
    }

    if (render->parsed()) {
        RenderProjection proj;
        if (projText == "y-plane") proj = RenderProjection::YPlane;
        else if (projText == "potential-angle") proj = RenderProjection::PotentialAngle;
        else throw std::runtime_error("--proj must be y-plane or potential-angle");
        const std::string svg = render_svg(inPath, proj);
        std::ofstream out(outPath, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + outPath);
        out << svg;
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const henon::RegimeError& e) {
        emit_error("regime", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 1;
    }
}
