#include "mcube/diagnostics.hpp"

#include "mcube/curvature.hpp"
#include "mcube/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace mcube {

namespace {

Eigen::Matrix3d rot_matrix(const SignedPermutation& p)
{
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = p(r, c);
    return m;
}

double tangential_sq(const Eigen::Matrix3d& t, int normal_axis)
{
    const auto ax = in_face_axes(normal_axis);
    double s = 0;
    for (int i : ax)
        for (int j : ax) s += t(i, j) * t(i, j);
    return s;
}

}  // namespace

nlohmann::json DiagnosticsReport::to_json(const MulticubeStructure& s) const
{
    nlohmann::json j;
    j["manifold"] = manifold;
    j["N"] = N;
    j["stage"] = stage;
    j["metric_jump_l2"] = metric_jump_l2;
    j["extrinsic_l2"] = extrinsic_l2;
    auto& arr = j["interfaces"] = nlohmann::json::array();
    for (const auto& i : interfaces) {
        arr.push_back({{"a", s.regions[i.a.region].id + "{" + i.a.face.str() + "}"},
                       {"b", s.regions[i.b.region].id + "{" + i.b.face.str() + "}"},
                       {"metric_jump_l2", i.metric_jump_l2},
                       {"extrinsic_l2", i.extrinsic_l2}});
    }
    return j;
}

DiagnosticsReport diagnose(const MulticubeStructure& s, const Grid& grid, const std::vector<MetricField>& g,
                           const std::string& stage, bool reverse)
{
    const int N = grid.N();
    if (static_cast<int>(g.size()) != s.region_count()) throw NumericalError("diagnostics", "one metric field per region expected");
    for (const auto& f : g)
        if (f.N != N) throw NumericalError("diagnostics", "metric field resolution does not match the grid");

    DiagnosticsReport rep;
    rep.manifold = s.name;
    rep.N = N;
    rep.stage = stage;

    std::vector<FieldDerivatives> d(g.size());
    for (std::size_t r = 0; r < g.size(); ++r) d[r] = differentiate(grid, g[r]);

    double jump_sum = 0, ext_sum = 0;
    long count = 0;
    for (const FaceMap* mp : unique_interfaces(s)) {
        FaceMap m = *mp;
        if (reverse) m = s.face_map(mp->to.region, mp->to.face);
        const Eigen::Matrix3d C = rot_matrix(m.rot);
        double js = 0, es = 0;
        for (int q = 0; q < N; ++q) {
            for (int p = 0; p < N; ++p) {
                const int na = grid.face_node(m.from.face, p, q);
                const int nb = map_grid_node(grid, m, na);
                const int ra = m.from.region, rb = m.to.region;
                const Eigen::Matrix3d ga = g[ra].at(na), gb = g[rb].at(nb);
                js += tangential_sq(gb - C * ga * C.transpose(), m.to.face.axis);
                std::array<Eigen::Matrix3d, 3> da{d[ra].at(0, na), d[ra].at(1, na), d[ra].at(2, na)};
                std::array<Eigen::Matrix3d, 3> db{d[rb].at(0, nb), d[rb].at(1, nb), d[rb].at(2, nb)};
                const Eigen::Matrix3d Ka = extrinsic_curvature_at(ga, da, m.from.face);
                const Eigen::Matrix3d Kb = extrinsic_curvature_at(gb, db, m.to.face);
                es += 0.5 * (tangential_sq(Ka, m.from.face.axis) + tangential_sq(Kb, m.to.face.axis));
            }
        }
        const double n = 4.0 * N * N;
        InterfaceNorms in;
        in.a = mp->from;
        in.b = mp->to;
        in.metric_jump_l2 = std::sqrt(js / n);
        in.extrinsic_l2 = std::sqrt(es / n);
        rep.interfaces.push_back(in);
        jump_sum += js;
        ext_sum += es;
        count += 4L * N * N;
    }
    if (count > 0) {
        rep.metric_jump_l2 = std::sqrt(jump_sum / count);
        rep.extrinsic_l2 = std::sqrt(ext_sum / count);
    }
    return rep;
}

std::vector<ConvergenceRow> convergence_report(const MulticubeStructure& s, const std::vector<int>& Ns,
                                               const PipelineOptions& options,
                                               const std::function<void(const ConvergenceRow&)>& progress)
{
    std::vector<ConvergenceRow> rows;
    for (int N : Ns) {
        ConvergenceRow row;
        row.manifold = s.name;
        row.N = N;
        row.stage = stage_name(options.stop);
        try {
            PipelineOptions o = options;
            o.N = N;
            const C1Result res = build_c1_metric(s, o);
            const Grid grid(N, s.L);
            const auto rep = diagnose(s, grid, res.final_stage().g, row.stage);
            row.metric_jump_l2 = rep.metric_jump_l2;
            row.extrinsic_l2 = rep.extrinsic_l2;
            row.wall_seconds = res.wall_seconds;
            row.cache_hit = res.cache_hit();
        } catch (const std::exception& e) {
            row.error = e.what();
            row.metric_jump_l2 = row.extrinsic_l2 = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
        if (progress) progress(row);
    }
    return rows;
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    os << "manifold,N,stage,metric_jump_l2,extrinsic_l2,wall_seconds,cache_hit\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows) {
        const bool ok = r.error.empty();
        os << r.manifold << ',' << r.N << ',' << (ok ? r.stage : "error") << ','
           << format_double(ok ? r.metric_jump_l2 : nan) << ',' << format_double(ok ? r.extrinsic_l2 : nan) << ','
           << format_double(r.wall_seconds) << ',' << (r.cache_hit ? "true" : "false") << '\n';
    }
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mcube
