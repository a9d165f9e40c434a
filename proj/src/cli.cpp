#include "pv/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pv/pipeline.hpp"

namespace pv {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Args {
    std::string surface, tets, out;
    std::string labels, format, weights_path, stats_path, exclude;
    bool exact = false, no_weld = false, no_fallback = false;
    double epsilon = 1e-9;
    int threads = 0;
    std::string variant = "vd";
    double offset_distance = 0.0;
    double organic_dihedral = 170.0;
    double organic_min_area = -1.0;
};

struct Cmd {
    CLI::App* app = nullptr;
    CLI::Option* organic_dihedral = nullptr;
    CLI::Option* organic_area = nullptr;
};

Cmd add_common(CLI::App* cmd, Args& a, bool is_offset) {
    Cmd c;
    c.app = cmd;
    cmd->add_option("--surface", a.surface, "generator surface, OBJ with g/o patch groups")
        ->required();
    cmd->add_option("--labels", a.labels, "sidecar file with one patch id per triangle");
    cmd->add_option("--tets", a.tets, "tet mesh, Gmsh MSH v2 or legacy VTK ASCII")->required();
    cmd->add_option("--out", a.out, "output mesh path")->required();
    cmd->add_option("--format", a.format, "output format (default: from --out extension)")
        ->check(CLI::IsMember({"obj", "ply"}));
    CLI::Option* exact = cmd->add_flag("--exact", a.exact, "rational cutting everywhere");
    cmd->add_flag("--no-exact-fallback", a.no_fallback,
                  "abort on float inconsistency instead of redoing the tet exactly")
        ->excludes(exact);
    cmd->add_option("--epsilon", a.epsilon, "float-mode classification tolerance")
        ->capture_default_str();
    cmd->add_option("--threads", a.threads,
                    "worker count (default: PATCHVORONOI_THREADS, then hardware)");
    cmd->add_flag("--no-weld", a.no_weld, "keep per-tet vertices separate");
    cmd->add_option("--stats", a.stats_path, "write the machine-readable stats line here");
    c.organic_dihedral =
        cmd->add_option("--organic-dihedral", a.organic_dihedral,
                        "enable noise filter: drop facets of patch pairs folding flatter "
                        "than this many degrees")
            ->capture_default_str();
    c.organic_area =
        cmd->add_option("--organic-min-area", a.organic_min_area,
                        "enable noise filter: drop components below this area "
                        "(default 1e-4 * diag^2)");
    if (is_offset) {
        cmd->add_option("--offset-distance", a.offset_distance, "offset distance, > 0")
            ->required();
    } else {
        cmd->add_option("--variant", a.variant, "vd|pd|awvd|mwvd")
            ->check(CLI::IsMember({"vd", "pd", "awvd", "mwvd"}))
            ->capture_default_str();
        cmd->add_option("--weights", a.weights_path,
                        "per-patch weights file (required for pd/awvd/mwvd)");
    }
    return c;
}

MeshFormat resolve_format(const std::string& flag, const std::string& out) {
    if (flag == "ply") return MeshFormat::Ply;
    if (flag == "obj") return MeshFormat::Obj;
    size_t dot = out.find_last_of('.');
    if (dot != std::string::npos && out.substr(dot) == ".ply") return MeshFormat::Ply;
    return MeshFormat::Obj;
}

std::string with_suffix(const std::string& out, const std::string& suffix) {
    size_t dot = out.find_last_of('.');
    size_t slash = out.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + suffix;
    return out.substr(0, dot) + suffix + out.substr(dot);
}

std::vector<int> parse_id_list(const std::string& text) {
    std::vector<int> ids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        int v = std::stoi(item, &pos);
        if (pos != item.size()) throw ValidationError("bad patch id list: " + text);
        ids.push_back(v);
    }
    return ids;
}

std::string stats_line(const RunStats& st, double sec_load, double sec_write, double sec_total) {
    std::ostringstream os;
    os << "tets=" << st.tet_count << " facets=" << st.facet_count
       << " fallback_tets=" << st.fallback_tets << " gamma_hist=";
    if (st.gamma_hist.empty()) {
        os << "-";
    } else {
        bool first = true;
        for (const auto& [size, count] : st.gamma_hist) {
            if (!first) os << ",";
            os << size << ":" << count;
            first = false;
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  " seconds_load=%.6f seconds_build=%.6f seconds_propagate=%.6f"
                  " seconds_assemble=%.6f seconds_write=%.6f seconds_total=%.6f",
                  sec_load, st.seconds_build, st.seconds_propagate, st.seconds_assemble,
                  sec_write, sec_total);
    os << buf;
    return os.str();
}

void log(const std::string& line) { std::cerr << "[patchvoronoi] " << line << "\n"; }

int execute(const std::string& product, const Args& a, bool organic_engaged) {
    Clock::time_point t_total = Clock::now();

    Clock::time_point t_load = Clock::now();
    std::optional<std::string> labels;
    if (!a.labels.empty()) labels = a.labels;
    PatchedSurface surface = load_patched_surface(a.surface, labels);
    if (!a.exclude.empty()) {
        for (int id : parse_id_list(a.exclude)) {
            if (id < 0 || id >= surface.patch_count())
                throw ValidationError("--exclude-patches: patch " + std::to_string(id) +
                                      " out of range");
            surface.excluded_patches.insert(id);
        }
        if (static_cast<int>(surface.excluded_patches.size()) >= surface.patch_count())
            throw ValidationError("--exclude-patches: at least one patch must generate");
    }
    TetMesh tets = load_tet_mesh(a.tets);
    double sec_load = elapsed(t_load);
    log("surface: " + std::to_string(surface.vertices.size()) + " vertices, " +
        std::to_string(surface.triangles.size()) + " triangles, " +
        std::to_string(surface.patch_count()) + " patches");
    log("tets: " + std::to_string(tets.tets.size()));

    PipelineConfig cfg;
    cfg.variant = parse_variant(a.variant);
    if (cfg.variant != MetricVariant::Vd) {
        if (a.weights_path.empty())
            throw ValidationError("--weights is required for variant " + a.variant);
        cfg.weights = load_weights(a.weights_path, surface.patch_count());
    } else if (!a.weights_path.empty()) {
        log("note: --weights ignored for the unweighted variant");
    }
    cfg.epsilon = a.epsilon;
    cfg.threads = a.threads;
    cfg.weld = !a.no_weld;
    cfg.offset_distance = a.offset_distance;
    cfg.mode = a.exact ? RobustMode::Exact
                       : (a.no_fallback ? RobustMode::FloatStrict : RobustMode::FloatFallback);
    if (organic_engaged) cfg.organic = OrganicFilter{a.organic_dihedral, a.organic_min_area};

    MeshFormat fmt = resolve_format(a.format, a.out);
    RunStats stats;
    Clock::time_point t_write;
    double sec_write = 0.0;

    if (product == "offset") {
        OffsetResult res = compute_offset(surface, tets, cfg, &stats);
        log("propagate: " + std::to_string(stats.fallback_tets) + " exact fallbacks");
        t_write = Clock::now();
        std::string in_path = with_suffix(a.out, "_inward");
        std::string out_path = with_suffix(a.out, "_outward");
        write_cell_complex(res.inward, in_path, fmt);
        write_cell_complex(res.outward, out_path, fmt);
        sec_write = elapsed(t_write);
        log("wrote " + in_path + " (" + std::to_string(res.inward.polygons.size()) + " facets)");
        log("wrote " + out_path + " (" + std::to_string(res.outward.polygons.size()) +
            " facets)");
    } else {
        CellComplex cc = product == "voronoi" ? compute_voronoi(surface, tets, cfg, &stats)
                                              : compute_medial_axis(surface, tets, cfg, &stats);
        log("propagate: " + std::to_string(stats.fallback_tets) + " exact fallbacks");
        t_write = Clock::now();
        write_cell_complex(cc, a.out, fmt);
        sec_write = elapsed(t_write);
        log("wrote " + a.out + " (" + std::to_string(cc.polygons.size()) + " facets)");
    }

    std::string line = stats_line(stats, sec_load, sec_write, elapsed(t_total));
    log(line);
    if (!a.stats_path.empty()) {
        std::ofstream f(a.stats_path, std::ios::binary);
        if (!f) throw IoError("cannot write " + a.stats_path);
        f << line << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Voronoi diagrams, medial axes and offsets of surface patches on tet meshes"};
    app.require_subcommand(1);
    Args a;

    Cmd vor = add_common(app.add_subcommand("voronoi", "patch Voronoi facets"), a, false);
    Cmd med = add_common(
        app.add_subcommand("medial-axis", "interior medial-axis facets"), a, false);
    med.app->add_option("--exclude-patches", a.exclude,
                        "comma-separated patch ids that do not generate");
    Cmd off = add_common(app.add_subcommand("offset", "inward/outward offset shells"), a, true);

    try {
        app.parse(argc, argv);
        const Cmd& cmd = app.got_subcommand(vor.app) ? vor
                         : app.got_subcommand(med.app) ? med
                                                       : off;
        bool organic = cmd.organic_dihedral->count() > 0 || cmd.organic_area->count() > 0;
        return execute(cmd.app->get_name(), a, organic);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const CutInconsistency& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: float cutting hit a degenerate configuration; rerun with --exact\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace pv
