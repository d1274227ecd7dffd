// Acceptance criteria 1-9: one PASS/FAIL line each. Usage: acceptance <work-dir>

#include "mcube/biharmonic.hpp"
#include "mcube/c0_metric.hpp"
#include "mcube/catalog.hpp"
#include "mcube/compatibility.hpp"
#include "mcube/diagnostics.hpp"
#include "mcube/orbits.hpp"
#include "mcube/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace mcube;
namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kCatalogChecksum = 2223422183u;

fs::path work;
fs::path cache;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

double now()
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct Run {
    int code = -1;
    std::string out;
};

Run forge(const std::string& args)
{
    const std::string cmd = std::string(MCUBE_FORGE) + " " + args + " 2>>" + (work / "forge-stderr.log").string();
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int st = ::pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

struct Row {
    int N = 0;
    double jump = NAN;
    double ext = NAN;
};

std::vector<Row> read_rows(const fs::path& csv)
{
    std::ifstream is(csv);
    std::string line;
    std::vector<Row> rows;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() < 7) continue;
        rows.push_back({std::stoi(f[1]), std::stod(f[3]), std::stod(f[4])});
    }
    return rows;
}

std::vector<Row> converge(const std::string& name, const std::string& Ns, double* seconds = nullptr)
{
    const auto csv = work / ("converge-" + name + ".csv");
    const double t0 = now();
    const auto r = forge("--cache-dir " + cache.string() + " converge --catalog " + name + " -N " + Ns + " -o " +
                         csv.string());
    if (seconds) *seconds = now() - t0;
    if (r.code != 0) return {};
    return read_rows(csv);
}

std::string fmt(double v)
{
    return format_double(v);
}

bool strictly_decreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return !v.empty();
}

void criterion1(Outcome& o)
{
    double total = 0;
    for (const char* name : {"e4", "e5", "e6", "three-torus"}) {
        double sec = 0;
        const auto rows = converge(name, "8,12,16", &sec);
        total += sec;
        double worst = rows.size() == 3 ? 0 : INFINITY;
        for (const auto& r : rows) worst = std::max({worst, r.jump, r.ext});
        if (!(worst <= 1e-10)) o.pass = false;
        o.detail << name << " max " << fmt(worst) << "; ";
    }
    if (!(total < 300)) o.pass = false;
    o.detail << "runtime " << std::lround(total) << " s";
}

void criterion2(Outcome& o)
{
    for (const char* name : {"poincare", "seifert-weber"}) {
        const auto rows = converge(name, "8,12,16,20");
        if (rows.size() != 4) {
            o.pass = false;
            o.detail << name << " failed to run; ";
            continue;
        }
        std::vector<double> j, k;
        for (const auto& r : rows) j.push_back(r.jump), k.push_back(r.ext);
        const bool jok = strictly_decreasing(j) && j.front() >= 10 * j.back();
        const bool kok = strictly_decreasing(k) && k.front() >= 10 * k.back();
        o.pass = o.pass && jok && kok;
        o.detail << name << " jump " << fmt(j.front()) << "->" << fmt(j.back()) << (jok ? " ok" : " NOT decreasing 10x")
                 << ", extrinsic " << fmt(k.front()) << "->" << fmt(k.back()) << (kok ? " ok" : " NOT decreasing 10x")
                 << "; ";
    }
}

void criterion3(Outcome& o)
{
    const auto rows = converge("kb-n2xs1", "12,16,20");
    if (rows.size() != 3) {
        o.pass = false;
        o.detail << "run failed";
        return;
    }
    std::vector<double> x, j, k;
    for (const auto& r : rows) x.push_back(r.N), j.push_back(r.jump), k.push_back(r.ext);
    const double sj = log_log_slope(x, j), sk = log_log_slope(x, k);
    o.pass = sj >= -7 && sj <= -2.5 && sk >= -5 && sk <= -1.5;
    o.detail << "metric-jump slope " << fmt(sj) << " (want [-7,-2.5]), extrinsic slope " << fmt(sk)
             << " (want [-5,-1.5])";
}

using Fn = std::function<double(const std::array<double, 3>&)>;
using Grad = std::function<double(const std::array<double, 3>&, int)>;

double oracle_error(int dim, int N, const Fn& u, const Grad& du, BoundaryResiduals* res = nullptr)
{
    const auto f = factor(dim, N, {cache.string()});
    const auto& op = f->op();
    const auto m = build_mesh(N, 1.0);
    auto d = BiharmonicData::zeros(dim, N, 1.0);
    auto at = [&](int r) {
        const auto c = op.coords(r);
        return std::array<double, 3>{m.nodes[c[0]], m.nodes[c[1]], dim == 3 ? m.nodes[c[2]] : 0.0};
    };
    for (int r = 0; r < op.size(); ++r) {
        const auto x = at(r);
        d.dirichlet[r] = u(x);
        for (const auto fl : op.faces_of(r)) d.neumann[fl.index()][op.face_local(fl, r)] = fl.sign * du(x, fl.axis);
    }
    const auto U = f->solve(d);
    if (res) *res = f->residuals(d, U);
    double e = 0;
    for (int r = 0; r < op.size(); ++r) e = std::max(e, std::abs(U[r] - u(at(r))));
    return e;
}

void criterion4(Outcome& o)
{
    const Fn u2 = [](const auto& x) { return x[0] * x[0] * x[0] * x[1]; };
    const Grad d2 = [](const auto& x, int a) { return a == 0 ? 3 * x[0] * x[0] * x[1] : x[0] * x[0] * x[0]; };
    const Fn u3 = [](const auto& x) { return x[0] * x[0] * x[0] * x[1] * x[2]; };
    const Grad d3 = [](const auto& x, int a) {
        return a == 0 ? 3 * x[0] * x[0] * x[1] * x[2] : (a == 1 ? x[0] * x[0] * x[0] * x[2] : x[0] * x[0] * x[0] * x[1]);
    };
    const Fn c = [](const auto&) { return 1.75; };
    const Grad dc = [](const auto&, int) { return 0.0; };

    double e2 = 0, e3 = 0, ec = 0, rd = 0;
    for (int N : {8, 12, 16, 20}) {
        BoundaryResiduals r;
        e2 = std::max(e2, oracle_error(2, N, u2, d2, &r));
        rd = std::max({rd, r.dirichlet, r.neumann});
        ec = std::max(ec, oracle_error(2, N, c, dc));
    }
    for (int N : {8, 12}) {
        e3 = std::max(e3, oracle_error(3, N, u3, d3));
        ec = std::max(ec, oracle_error(3, N, c, dc));
    }
    o.pass = e2 < 1e-9 && e3 < 1e-8 && ec < 1e-12 && rd < 1e-12;
    o.detail << "2D x^3y " << fmt(e2) << ", 3D x^3yz " << fmt(e3) << ", constant " << fmt(ec) << ", 2D boundary "
             << fmt(rd);
}

void criterion5(Outcome& o)
{
    std::vector<double> x, k;
    for (int N = 8; N <= 20; ++N) {
        x.push_back(N);
        k.push_back(factor(2, N, {cache.string()})->condition_estimate());
    }
    const double s = log_log_slope(x, k);
    o.pass = s >= 3.5 && s <= 5;
    o.detail << "exponent " << fmt(s) << " (kappa " << fmt(k.front()) << " at N=8, " << fmt(k.back()) << " at N=20)";
}

void criterion6(Outcome& o)
{
    const auto s = catalog_get("poincare").structure;
    PipelineOptions opt;
    opt.stop = Stage::Conformal;
    opt.cache_dir = cache.string();
    opt.N = 8;
    const double r8 = build_c1_metric(s, opt).checks.edge_identity_residual;
    opt.N = 16;
    const double r16 = build_c1_metric(s, opt).checks.edge_identity_residual;
    o.pass = r8 >= 3 * r16;
    o.detail << "N=8 " << fmt(r8) << ", N=16 " << fmt(r16) << ", ratio " << fmt(r8 / r16);
}

void criterion7(Outcome& o)
{
    const std::string data = MCUBE_TEST_DATA;
    const auto out = work / "l52-converted.json";
    const auto r = forge("convert " + data + "/l52-1tet.json -o " + out.string());
    if (r.code != 0) {
        o.pass = false;
        o.detail << "L(5,2) conversion exit " << r.code << "; ";
    } else {
        const auto s = load_structure(out.string());
        const bool compat = validate_structure(s).ok() && check_compatibility(s).ok();
        const bool same_k =
            enumerate_edge_orbits(s).K_multiset() == enumerate_edge_orbits(catalog_get("l52").structure).K_multiset();
        o.pass = s.region_count() == 4 && compat && same_k;
        o.detail << "L(5,2): " << s.region_count() << " regions, compatibility " << (compat ? "ok" : "FAILED")
                 << ", K multiset " << (same_k ? "matches" : "DIFFERS") << "; ";
    }
    const auto bad = forge("convert " + data + "/two-tet-theta-mismatch.json -o " + (work / "bad.json").string());
    o.pass = o.pass && bad.code == 2;
    o.detail << "theta-mismatch census triangulation exit " << bad.code;
}

void criterion8(Outcome& o)
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    const PartitionParams p;
    double pu = 0;
    for (int i = 0; i < 1000; ++i) {
        double sum = 0;
        for (double w : partition_of_unity({U(rng), U(rng), U(rng)}, 1.0, p)) sum += w;
        pu = std::max(pu, std::abs(sum - 1));
    }
    double hs = 0;
    for (int i = 0; i <= 1000; ++i) hs = std::max(hs, std::abs(h(i / 1000.0, p) + h(1 - i / 1000.0, p) - 1));

    double spec = 0;
    for (int N : {6, 10, 16, 20}) {
        const auto m = build_mesh(N, 1.0);
        for (int deg = 1; deg < N; ++deg) {
            Eigen::VectorXd f(N), df(N);
            for (int j = 0; j < N; ++j) f[j] = std::pow(m.nodes[j], deg), df[j] = deg * std::pow(m.nodes[j], deg - 1);
            spec = std::max(spec, (m.D * f - df).cwiseAbs().maxCoeff() / std::max(1.0, df.cwiseAbs().maxCoeff()));
        }
    }

    double inv = 0;
    for (const auto& name : catalog_names()) {
        const auto s = catalog_get(name).structure;
        for (const auto& m : s.faces) {
            const auto& c = s.regions[m.from.region].center;
            Vec3 x{};
            for (int a = 0; a < 3; ++a) x[a] = (c[a] + U(rng)) * s.L;
            x[m.from.face.axis] = (c[m.from.face.axis] + 0.5 * m.from.face.sign) * s.L;
            const Vec3 y = apply_face_map(s, s.face_map(m.to.region, m.to.face), apply_face_map(s, m, x));
            for (int a = 0; a < 3; ++a) inv = std::max(inv, std::abs(y[a] - x[a]) / s.L);
        }
    }

    const auto& all = SignedPermutation::all();
    std::set<SignedPermutation> group(all.begin(), all.end());
    bool closed = group.size() == 48;
    for (const auto& a : all)
        for (const auto& b : all) closed = closed && group.count(a * b);

    const std::uint32_t crc = catalog_checksum();
    o.pass = pu < 1e-14 && hs < 1e-14 && spec < 1e-11 && inv < 1e-13 && closed && crc == kCatalogChecksum;
    o.detail << "sum u " << fmt(pu) << ", h symmetry " << fmt(hs) << ", derivative " << fmt(spec) << ", involution "
             << fmt(inv) << "*L, group " << group.size() << (closed ? " closed" : " NOT closed") << ", checksum "
             << crc << (crc == kCatalogChecksum ? " pinned" : " CHANGED");
}

double json_number(const std::string& text, const std::string& key)
{
    return nlohmann::json::parse(text).at(key).get<double>();
}

void criterion9(Outcome& o)
{
    const auto dir = work / "cache-criterion9";
    fs::remove_all(dir);
    const std::string args =
        "--cache-dir " + dir.string() + " build --catalog three-torus -N 16 -o " + (work / "t3.mcm").string();
    const auto a = forge(args);
    const auto b = forge(args);
    if (a.code != 0 || b.code != 0) {
        o.pass = false;
        o.detail << "build exit " << a.code << "/" << b.code;
        return;
    }
    const bool hit1 = nlohmann::json::parse(a.out).at("cache_hit").get<bool>();
    const bool hit2 = nlohmann::json::parse(b.out).at("cache_hit").get<bool>();
    const double t1 = json_number(a.out, "factor_seconds"), t2 = json_number(b.out, "factor_seconds");
    const double speedup = t1 / t2;
    o.pass = !hit1 && hit2 && speedup >= 5;
    o.detail << "first cache_hit=" << (hit1 ? "true" : "false") << " " << fmt(t1) << " s, second cache_hit="
             << (hit2 ? "true" : "false") << " " << fmt(t2) << " s, speedup " << fmt(speedup) << "x";
}

}  // namespace

int main(int argc, char** argv)
{
    work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "mcube-acceptance";
    fs::create_directories(work);
    cache = work / "cache";
    fs::create_directories(cache);

    const std::vector<std::pair<int, void (*)(Outcome&)>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
    int failed = 0;
    for (const auto& [id, fn] : criteria) {
        Outcome o;
        const double t0 = now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        failed += !o.pass;
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail.str() << " ["
                  << std::lround(now() - t0) << " s]" << std::endl;
    }
    std::cout << (9 - failed) << "/9 criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
