#include "henon/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace henon {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunConfig resolve_config(RunConfig raw) {
    raw.domain = choose_domain_config(raw.c, raw.overrides);
    return raw;
}

RunConfig default_run_config() { return resolve_config(RunConfig{}); }

RunConfig load_run_config(const std::string& path) {
    const json j = read_json_file(path);
    RunConfig cfg;
    if (j.contains("schemaVersion")) cfg.schemaVersion = j["schemaVersion"].get<int>();
    if (cfg.schemaVersion != 1)
        throw std::runtime_error("unsupported schemaVersion");
    cfg.a = Complex(j.value("a_re", 1e-4), j.value("a_im", 0.0));
    cfg.c = Complex(j.value("c_re", -6.0), j.value("c_im", 0.0));
    cfg.perturbativeDelta = j.value("perturbativeDelta", 1e-2);
    cfg.seed = j.value("seed", std::uint64_t{20250809});
    if (j.contains("domain")) {
        const json& d = j["domain"];
        if (d.contains("r")) cfg.overrides.r = d["r"].get<double>();
        if (d.contains("y_bound")) cfg.overrides.y_bound = d["y_bound"].get<double>();
        if (d.contains("eps")) cfg.overrides.eps = d["eps"].get<double>();
        if (d.contains("escape_radius"))
            cfg.overrides.escape_radius = d["escape_radius"].get<double>();
        if (d.contains("maxIter")) cfg.overrides.maxIter = d["maxIter"].get<int>();
        if (d.contains("tol_res")) cfg.overrides.tol_res = d["tol_res"].get<double>();
        if (d.contains("maxDepth")) cfg.overrides.maxDepth = d["maxDepth"].get<int>();
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        cfg.grid.pitch = g.value("pitch", 0.0);
        cfg.grid.xWindow = g.value("xWindow", 0.0);
        cfg.grid.yWindow = g.value("yWindow", 0.0);
    }
    return resolve_config(cfg);
}

namespace {

// Extra per-sample render fields: the forward potential and the angle of the
// band's Boettcher power. Omitted (nan) when the point is not decided.
std::pair<double, double> render_fields(const HenonParameter& lambda,
                                        const DomainConfig& cfg,
                                        const PhasePoint& p) {
    const PotentialValue g = green_plus(lambda, p, 1e-11, cfg.green());
    if (!g.escaping()) return {std::nan(""), std::nan("")};
    int n = band_index(g.value, cfg.r);
    if (n < 0) n = 0;
    if (n > cfg.maxDepth) n = cfg.maxDepth;
    double ang = std::nan("");
    try {
        ang = std::arg(phi_plus_power(lambda, p, n, cfg.green()).value);
    } catch (const NotEscaping&) {
    }
    return {g.value, ang};
}

void append_point_fields(std::ostringstream& os, const PhasePoint& p) {
    os << "\"x_re\":" << format_double(p.x.real())
       << ",\"x_im\":" << format_double(p.x.imag())
       << ",\"y_re\":" << format_double(p.y.real())
       << ",\"y_im\":" << format_double(p.y.imag());
}

}  // namespace

std::string sample_jsonl_line(const HenonParameter& lambda, const DomainConfig& cfg,
                              const LocusSample& s) {
    std::ostringstream os;
    os << "{\"type\":\"sample\",";
    append_point_fields(os, s.point);
    os << ",\"residual\":" << format_double(s.residual);
    if (s.componentLabel)
        os << ",\"label\":\"" << s.componentLabel->bits << "\",\"band\":"
           << s.componentLabel->length();
    const auto [g, ang] = render_fields(lambda, cfg, s.point);
    if (std::isfinite(g))
        os << ",\"gplus\":" << format_double(g)
           << ",\"phiArg\":" << format_double(ang);
    os << "}";
    return os.str();
}

std::string curve_point_jsonl_line(const HenonParameter& lambda,
                                   const DomainConfig& cfg, const LocusCurve& curve,
                                   int curveIndex, int pointIndex,
                                   const WallSpec& wall) {
    const LocusSample& s = curve.samples[pointIndex];
    std::ostringstream os;
    os << "{\"type\":\"curve\",\"wall\":\"" << wall_tag_name(curve.wallTag)
       << "\",\"curve\":" << curveIndex << ",\"index\":" << pointIndex
       << ",\"closed\":" << (curve.closed ? "true" : "false")
       << ",\"level\":" << format_double(wall.level)
       << ",\"band\":" << wall.bandIndex << ",";
    append_point_fields(os, s.point);
    os << ",\"residual\":" << format_double(s.residual);
    const auto [g, ang] = render_fields(lambda, cfg, s.point);
    if (std::isfinite(g))
        os << ",\"gplus\":" << format_double(g)
           << ",\"phiArg\":" << format_double(ang);
    os << "}";
    return os.str();
}

std::string track_waypoint_jsonl_line(int trackIndex, int waypointIndex,
                                      const Waypoint& w) {
    std::ostringstream os;
    os << "{\"type\":\"waypoint\",\"track\":" << trackIndex
       << ",\"index\":" << waypointIndex
       << ",\"a_re\":" << format_double(w.a.real())
       << ",\"a_im\":" << format_double(w.a.imag())
       << ",\"c_re\":" << format_double(w.c.real())
       << ",\"c_im\":" << format_double(w.c.imag()) << ",";
    append_point_fields(os, w.p);
    os << ",\"residual\":" << format_double(w.residual) << "}";
    return os.str();
}

void write_trace_jsonl(const std::string& path, const HenonParameter& lambda,
                       const DomainConfig& cfg,
                       const std::vector<LocusSample>& samples,
                       const std::vector<LocusCurve>& curves,
                       const std::vector<WallSpec>& walls) {
    std::ostringstream os;
    for (const auto& s : samples) os << sample_jsonl_line(lambda, cfg, s) << "\n";
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        WallSpec wall{curves[ci].wallTag, 0.0, 0};
        for (const auto& w : walls)
            if (w.tag == curves[ci].wallTag) wall = w;
        for (std::size_t pi = 0; pi < curves[ci].samples.size(); ++pi)
            os << curve_point_jsonl_line(lambda, cfg, curves[ci],
                                         static_cast<int>(ci),
                                         static_cast<int>(pi), wall)
               << "\n";
    }
    write_text_file(path, os.str());
}

void write_tracks_jsonl(const std::string& path,
                        const std::vector<MotionTrack>& tracks) {
    std::ostringstream os;
    for (std::size_t t = 0; t < tracks.size(); ++t)
        for (std::size_t w = 0; w < tracks[t].waypoints.size(); ++w)
            os << track_waypoint_jsonl_line(static_cast<int>(t),
                                            static_cast<int>(w),
                                            tracks[t].waypoints[w])
               << "\n";
    write_text_file(path, os.str());
}

std::string component_report_json(const ComponentReport& rep) {
    std::ostringstream os;
    os << "{\n  \"schemaVersion\": 1,\n";
    if (rep.isUpsilon) {
        os << "  \"piece\": \"upsilon\",\n";
    } else {
        os << "  \"piece\": \"omega\",\n  \"component\": \""
           << rep.componentId.label.bits << "\",\n  \"band\": "
           << rep.componentId.bandIndex << ",\n";
    }
    os << "  \"wallCurveCounts\": {";
    bool first = true;
    for (const auto& [tag, count] : rep.wallCurveCounts) {
        if (!first) os << ", ";
        first = false;
        os << "\"" << wall_tag_name(tag) << "\": " << count;
    }
    os << "},\n  \"connected\": " << (rep.connected ? "true" : "false") << ",\n";
    if (rep.eulerCharacteristic)
        os << "  \"eulerCharacteristic\": " << *rep.eulerCharacteristic << ",\n";
    if (rep.isUpsilon)
        os << "  \"endBehavior\": " << (rep.endBehavior ? "true" : "false") << ",\n";
    os << "  \"interiorSamples\": " << rep.interior.size() << ",\n";
    os << "  \"matchesModel\": " << (rep.matchesModel ? "true" : "false") << ",\n";
    os << "  \"diagnostics\": \"";
    for (char ch : rep.diagnostics) {
        if (ch == '"' || ch == '\\') os << '\\';
        os << ch;
    }
    os << "\"\n}\n";
    return os.str();
}

void write_component_report(const std::string& path, const ComponentReport& rep) {
    write_text_file(path, component_report_json(rep));
}

std::vector<std::pair<Complex, Complex>> load_parameter_path(const std::string& path) {
    const json j = read_json_file(path);
    std::vector<std::pair<Complex, Complex>> nodes;
    if (j.contains("path")) {
        for (const auto& n : j["path"])
            nodes.emplace_back(Complex(n.value("a_re", 0.0), n.value("a_im", 0.0)),
                               Complex(n.value("c_re", 0.0), n.value("c_im", 0.0)));
    } else if (j.contains("from") && j.contains("to")) {
        const auto& f = j["from"];
        const auto& t = j["to"];
        const int steps = std::max(1, j.value("steps", 10));
        const Complex a0(f.value("a_re", 0.0), f.value("a_im", 0.0));
        const Complex c0(f.value("c_re", 0.0), f.value("c_im", 0.0));
        const Complex a1(t.value("a_re", 0.0), t.value("a_im", 0.0));
        const Complex c1(t.value("c_re", 0.0), t.value("c_im", 0.0));
        for (int s = 0; s <= steps; ++s) {
            const double u = static_cast<double>(s) / steps;
            nodes.emplace_back(a0 + u * (a1 - a0), c0 + u * (c1 - c0));
        }
    } else {
        throw std::runtime_error("path file needs either \"path\" or \"from\"/\"to\"");
    }
    if (nodes.empty()) throw std::runtime_error("empty parameter path");
    return nodes;
}

std::vector<SeedRecord> load_seeds_jsonl(const std::string& path,
                                         const DomainConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<SeedRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        SeedRecord rec;
        rec.sample.point = {Complex(j.value("x_re", 0.0), j.value("x_im", 0.0)),
                            Complex(j.value("y_re", 0.0), j.value("y_im", 0.0))};
        rec.sample.residual = j.value("residual", 0.0);
        if (j.contains("wall")) {
            const auto tag = wall_tag_from_name(j["wall"].get<std::string>());
            if (tag) {
                WallSpec w{*tag, j.value("level", 0.0), j.value("band", 0)};
                rec.sample.wallTag = *tag;
                rec.wall = w;
            }
        }
        (void)cfg;
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

struct ProjectedPoint {
    double u = 0, v = 0;
    bool isCurve = false;
    int group = 0;  // (wall, curve) group for polylines
    int index = 0;
};

}  // namespace

std::string render_svg(const std::string& jsonlPath, RenderProjection proj) {
    std::ifstream in(jsonlPath);
    if (!in) throw std::runtime_error("cannot open " + jsonlPath);
    std::vector<ProjectedPoint> pts;
    std::map<std::string, int> groups;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        ProjectedPoint p;
        if (proj == RenderProjection::YPlane) {
            if (!j.contains("y_re")) continue;
            p.u = j["y_re"].get<double>();
            p.v = j["y_im"].get<double>();
        } else {
            if (!j.contains("gplus") || !j.contains("phiArg"))
                throw std::runtime_error(
                    "potential-angle projection needs gplus/phiArg fields");
            p.u = j["gplus"].get<double>();
            p.v = j["phiArg"].get<double>();
        }
        if (j.value("type", "") == "curve") {
            p.isCurve = true;
            const std::string key =
                j.value("wall", "") + "#" + std::to_string(j.value("curve", 0));
            auto [it, inserted] = groups.emplace(key, static_cast<int>(groups.size()));
            p.group = it->second;
            p.index = j.value("index", 0);
        }
        pts.push_back(p);
    }

    const double W = 640, H = 640, margin = 24;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    if (!pts.empty()) {
        double umin = pts[0].u, umax = pts[0].u, vmin = pts[0].v, vmax = pts[0].v;
        for (const auto& p : pts) {
            umin = std::min(umin, p.u);
            umax = std::max(umax, p.u);
            vmin = std::min(vmin, p.v);
            vmax = std::max(vmax, p.v);
        }
        const double du = std::max(umax - umin, 1e-12);
        const double dv = std::max(vmax - vmin, 1e-12);
        auto X = [&](double u) { return margin + (u - umin) / du * (W - 2 * margin); };
        auto Y = [&](double v) { return H - margin - (v - vmin) / dv * (H - 2 * margin); };
        char buf[64];
        auto fmt = [&](double x) {
            std::snprintf(buf, sizeof buf, "%.2f", x);
            return std::string(buf);
        };
        // polylines per curve group, ordered by stored index
        std::map<int, std::vector<ProjectedPoint>> byGroup;
        for (const auto& p : pts)
            if (p.isCurve) byGroup[p.group].push_back(p);
        for (auto& [g, v] : byGroup) {
            std::sort(v.begin(), v.end(),
                      [](const auto& A, const auto& B) { return A.index < B.index; });
            os << "<polyline fill=\"none\" stroke=\"#205080\" stroke-width=\"1\" "
                  "points=\"";
            for (const auto& p : v) os << fmt(X(p.u)) << "," << fmt(Y(p.v)) << " ";
            os << "\"/>\n";
        }
        for (const auto& p : pts)
            if (!p.isCurve)
                os << "<circle cx=\"" << fmt(X(p.u)) << "\" cy=\"" << fmt(Y(p.v))
                   << "\" r=\"1.5\" fill=\"#c04020\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string model_graph_table(const ModelGraph& g, int from, int to) {
    std::ostringstream os;
    os << "k  handles(m, m+k)  2^{k-1}\n";
    for (int k = 1; k <= g.maxDepth + 1; ++k) {
        if (from + k > to) break;
        os << k << "  " << handles_between(g, from, k) << "  " << (1LL << (k - 1))
           << "\n";
    }
    return os.str();
}

}  // namespace henon
