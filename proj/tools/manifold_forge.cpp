// manifold-forge: multicube structures and C1 reference metrics from the command line.

#include "mcube/biharmonic.hpp"
#include "mcube/catalog.hpp"
#include "mcube/compatibility.hpp"
#include "mcube/diagnostics.hpp"
#include "mcube/errors.hpp"
#include "mcube/metric_file.hpp"
#include "mcube/pipeline.hpp"
#include "mcube/triangulation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace mcube;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

struct Source {
    std::string catalog;
    std::string file;
};

struct Common {
    int jobs = 1;
    std::string cache_dir;
    bool allow_huge = false;
    int k = 2;
    int l = 3;
    std::string stages = "full";
    bool simple_gauge = false;
};

MulticubeStructure load_source(const Source& src)
{
    if (src.catalog.empty() == src.file.empty())
        throw UsageError("give exactly one of --catalog NAME or a structure file");
    if (!src.catalog.empty()) return catalog_get(src.catalog).structure;
    return load_structure(src.file);
}

PipelineOptions pipeline_options(const Common& c, int N)
{
    if (N < 6) throw UsageError("N must be at least 6");
    if (c.k < 1 || c.l < 1) throw UsageError("--k and --l must be at least 1");
    if (c.jobs < 1) throw UsageError("--jobs must be at least 1");
    PipelineOptions o;
    o.N = N;
    o.partition = {c.k, c.l};
    o.stop = parse_stage(c.stages);
    o.simple_gauge = c.simple_gauge;
    o.allow_huge = c.allow_huge;
    o.cache_dir = resolve_cache_dir(c.cache_dir);
    o.jobs = c.jobs;
    return o;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw UsageError("cannot write " + path);
    return os;
}

std::vector<int> parse_n_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(n);
        } catch (const std::exception&) {
            throw UsageError("bad resolution '" + item + "' in -N list");
        }
    }
    if (out.empty()) throw UsageError("-N list is empty");
    return out;
}

nlohmann::json checks_json(const PipelineChecks& c)
{
    return {{"phi_partner_mismatch", c.phi_partner_mismatch},
            {"phi_edge_max", c.phi_edge_max},
            {"phi_vertex_gradient", c.phi_vertex_gradient},
            {"geodesic_residual", c.geodesic_residual},
            {"edge_identity_residual", c.edge_identity_residual},
            {"gauge_intrinsic_change", c.gauge_intrinsic_change},
            {"gauge_edge_K", c.gauge_edge_K},
            {"intrinsic_neumann_edge", c.intrinsic_neumann_edge},
            {"face_change", c.face_change},
            {"k_annihilation", c.k_annihilation}};
}

int cmd_convert(const std::string& in, const std::string& out, const std::string& name, bool force)
{
    const auto tri = load_triangulation(in);
    std::string n = name;
    if (n.empty()) {
        std::ifstream is(in);
        n = nlohmann::json::parse(is).value("name", std::string("converted"));
    }
    auto s = subdivide_to_multicube(tri, n);
    const auto structural = validate_structure(s);
    nlohmann::json rep{{"name", s.name}, {"tetrahedra", tri.size()}, {"regions", s.region_count()},
                       {"structure", structural.to_json()}};
    bool ok = structural.ok();
    if (ok) {
        const auto compat = check_compatibility(s);
        rep["compatibility"] = compat.to_json(s);
        ok = compat.ok();
    }
    rep["ok"] = ok;
    std::cout << rep.dump(1) << "\n";
    if (ok || force) save_structure(s, out);
    if (!ok) {
        std::cerr << "error: " << in << " fails the compatibility checks"
                  << (force ? " (structure written because of --force)" : "") << "\n";
        return kValidation;
    }
    return kOk;
}

int cmd_validate(const Source& src)
{
    const auto s = load_source(src);
    const auto structural = validate_structure(s);
    nlohmann::json rep{{"name", s.name}, {"regions", s.region_count()}, {"structure", structural.to_json()}};
    bool ok = structural.ok();
    if (ok) {
        const auto compat = check_compatibility(s);
        rep["compatibility"] = compat.to_json(s);
        ok = compat.ok();
    }
    rep["ok"] = ok;
    std::cout << rep.dump(1) << "\n";
    return ok ? kOk : kValidation;
}

int cmd_build(const Source& src, const Common& c, int N, const std::string& out)
{
    const auto s = load_source(src);
    const auto opt = pipeline_options(c, N);
    std::ofstream probe = open_output(out);
    probe.close();
    const auto r = build_c1_metric(s, opt);
    write_metric_file(out, r, s, opt.partition);
    nlohmann::json facts = nlohmann::json::array();
    for (const auto& f : r.factorizations)
        facts.push_back({{"dim", f.dim}, {"N", f.N}, {"cache_hit", f.cache_hit}, {"seconds", f.seconds},
                         {"condition_estimate", f.condition_estimate}});
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& st : r.stages) stages.push_back(stage_name(st.stage));
    nlohmann::json rep{{"manifold", s.name},     {"N", N},
                       {"stages", stages},       {"output", out},
                       {"cache_hit", r.cache_hit()}, {"factor_seconds", r.factor_seconds()},
                       {"wall_seconds", r.wall_seconds}, {"factorizations", facts},
                       {"checks", checks_json(r.checks)}};
    std::cout << rep.dump(1) << "\n";
    return kOk;
}

int cmd_diagnose(const std::string& in, const std::string& out)
{
    const auto m = read_metric_file(in);
    const Grid grid(m.N, m.structure.L);
    auto os = open_output(out);
    os << "manifold,N,stage,interface,metric_jump_l2,extrinsic_l2\n";
    for (const auto& st : m.stages) {
        const auto rep = diagnose(m.structure, grid, st.g, stage_name(st.stage));
        os << m.structure.name << ',' << m.N << ',' << rep.stage << ",all," << format_double(rep.metric_jump_l2)
           << ',' << format_double(rep.extrinsic_l2) << '\n';
        for (const auto& i : rep.interfaces) {
            os << m.structure.name << ',' << m.N << ',' << rep.stage << ','
               << m.structure.regions[i.a.region].id << '{' << i.a.face.str() << "}|"
               << m.structure.regions[i.b.region].id << '{' << i.b.face.str() << "}," << format_double(i.metric_jump_l2)
               << ',' << format_double(i.extrinsic_l2) << '\n';
        }
        std::cerr << rep.stage << ": metric_jump_l2 " << format_double(rep.metric_jump_l2) << ", extrinsic_l2 "
                  << format_double(rep.extrinsic_l2) << "\n";
    }
    return kOk;
}

int cmd_converge(const Source& src, const Common& c, const std::string& n_list, const std::string& out)
{
    const auto s = load_source(src);
    const auto Ns = parse_n_list(n_list);
    for (int n : Ns) pipeline_options(c, n);
    auto opt = pipeline_options(c, Ns.front());
    if (opt.stop == Stage::Full && !opt.allow_huge)
        for (int n : Ns)
            if (n > kMax3DResolution)
                throw UsageError("N = " + std::to_string(n) + " exceeds the 3D resolution cap of " +
                                 std::to_string(kMax3DResolution) + " (use --allow-huge)");
    auto os = open_output(out);
    const auto rows = convergence_report(s, Ns, opt, [](const ConvergenceRow& r) {
        if (r.error.empty())
            std::cerr << r.manifold << " N=" << r.N << " " << r.stage << ": metric_jump_l2 "
                      << format_double(r.metric_jump_l2) << ", extrinsic_l2 " << format_double(r.extrinsic_l2)
                      << " (" << std::fixed << std::setprecision(2) << r.wall_seconds << std::defaultfloat
                      << " s, cache_hit=" << (r.cache_hit ? "true" : "false") << ")\n";
        else
            std::cerr << r.manifold << " N=" << r.N << ": error: " << r.error << "\n";
    });
    write_csv(os, rows);
    std::vector<double> x, gj, ke;
    bool failed = false;
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            failed = true;
            continue;
        }
        x.push_back(r.N);
        gj.push_back(r.metric_jump_l2);
        ke.push_back(r.extrinsic_l2);
    }
    auto positive = [](const std::vector<double>& v) {
        for (double d : v)
            if (!(d > 0)) return false;
        return true;
    };
    if (x.size() >= 2) {
        if (positive(gj)) std::cerr << "metric_jump slope " << format_double(log_log_slope(x, gj)) << "\n";
        if (positive(ke)) std::cerr << "extrinsic slope " << format_double(log_log_slope(x, ke)) << "\n";
    }
    return failed ? kNumerical : kOk;
}

int cmd_catalog_list()
{
    for (const auto& n : catalog_names()) {
        const auto e = catalog_get(n);
        std::cout << std::left << std::setw(16) << n << std::setw(5) << e.structure.region_count() << std::setw(8)
                  << e.geometry << e.title << "\n";
    }
    return kOk;
}

int cmd_catalog_export(const std::string& name, const std::string& out)
{
    const auto j = catalog_export(name);
    if (out.empty() || out == "-") {
        std::cout << j.dump(1) << "\n";
    } else {
        auto os = open_output(out);
        os << j.dump(1) << "\n";
    }
    return kOk;
}

std::string require_cache_dir(const Common& c)
{
    const auto dir = resolve_cache_dir(c.cache_dir);
    if (dir.empty()) throw UsageError("no cache directory (use --cache-dir or MCUBE_CACHE_DIR)");
    return dir;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multicube structures and C1 reference metrics"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--cache-dir", c.cache_dir, "Factorization cache directory (default: $MCUBE_CACHE_DIR)");

    auto add_source = [](CLI::App* sub, Source& src) {
        sub->add_option("structure", src.file, "Structure JSON file");
        sub->add_option("--catalog", src.catalog, "Built-in structure name");
    };
    auto add_build_flags = [&c](CLI::App* sub) {
        sub->add_option("--k", c.k, "Partition-of-unity exponent k");
        sub->add_option("--l", c.l, "Partition-of-unity exponent l");
        sub->add_option("--stages", c.stages, "Last stage: c0|conformal|gauge|full");
        sub->add_flag("--simple-gauge", c.simple_gauge, "Zero gauge Neumann data in the face step");
        sub->add_flag("--allow-huge", c.allow_huge, "Lift the 3D resolution cap");
    };

    std::string in, out, name, n_text;
    bool force = false;
    int N = 0;
    Source src;

    auto* convert = app.add_subcommand("convert", "Triangulation JSON to multicube structure");
    convert->add_option("triangulation", in, "Triangulation JSON")->required();
    convert->add_option("-o,--output", out, "Structure JSON to write")->required();
    convert->add_option("--name", name, "Structure name");
    convert->add_flag("--force", force, "Write the structure even if it fails the checks");

    auto* validate = app.add_subcommand("validate", "Structural and compatibility report");
    add_source(validate, src);

    auto* build = app.add_subcommand("build", "Build a C1 reference metric");
    add_source(build, src);
    build->add_option("-N", N, "Collocation points per dimension")->required();
    build->add_option("-o,--output", out, "Metric file (.mcm)")->required();
    add_build_flags(build);

    auto* diag = app.add_subcommand("diagnose", "Junction residuals of a metric file");
    diag->add_option("metric", in, "Metric file (.mcm)")->required();
    diag->add_option("-o,--output", out, "CSV report")->required();

    auto* converge = app.add_subcommand("converge", "Build and diagnose over several resolutions");
    add_source(converge, src);
    converge->add_option("-N", n_text, "Comma-separated resolutions")->required();
    converge->add_option("-o,--output", out, "CSV report")->required();
    add_build_flags(converge);

    auto* catalog = app.add_subcommand("catalog", "Built-in structures");
    catalog->require_subcommand(1);
    auto* cat_list = catalog->add_subcommand("list", "List entries");
    auto* cat_export = catalog->add_subcommand("export", "Write an entry as structure JSON");
    cat_export->add_option("name", name, "Entry name")->required();
    cat_export->add_option("-o,--output", out, "Output file (default stdout)");

    auto* cache = app.add_subcommand("cache", "Factorization cache");
    cache->require_subcommand(1);
    auto* cache_ls = cache->add_subcommand("ls", "List cache files");
    auto* cache_clear = cache->add_subcommand("clear", "Remove cache files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*convert) return cmd_convert(in, out, name, force);
        if (*validate) return cmd_validate(src);
        if (*build) return cmd_build(src, c, N, out);
        if (*diag) return cmd_diagnose(in, out);
        if (*converge) return cmd_converge(src, c, n_text, out);
        if (*cat_list) return cmd_catalog_list();
        if (*cat_export) return cmd_catalog_export(name, out);
        if (*cache_ls) {
            for (const auto& e : list_cache(require_cache_dir(c))) std::cout << e.bytes << "\t" << e.path << "\n";
            return kOk;
        }
        if (*cache_clear) {
            std::cout << "removed " << clear_cache(require_cache_dir(c)) << " files\n";
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical failure in stage " << e.stage() << ": " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
