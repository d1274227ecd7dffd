#include "mcube/pipeline.hpp"

#include "mcube/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace mcube {

std::string stage_name(Stage s)
{
    switch (s) {
    case Stage::C0: return "c0";
    case Stage::Conformal: return "conformal";
    case Stage::Gauge: return "gauge";
    case Stage::Full: return "full";
    }
    return "?";
}

Stage parse_stage(const std::string& s)
{
    if (s == "c0") return Stage::C0;
    if (s == "conformal") return Stage::Conformal;
    if (s == "gauge") return Stage::Gauge;
    if (s == "full") return Stage::Full;
    throw UsageError("unknown stage '" + s + "' (expected c0, conformal, gauge or full)");
}

const StageFields* C1Result::find(Stage s) const
{
    for (const auto& st : stages)
        if (st.stage == s) return &st;
    return nullptr;
}

bool C1Result::cache_hit() const
{
    if (factorizations.empty()) return false;
    return std::all_of(factorizations.begin(), factorizations.end(), [](const FactorStats& f) { return f.cache_hit; });
}

double C1Result::factor_seconds() const
{
    double t = 0;
    for (const auto& f : factorizations) t += f.seconds;
    return t;
}

PipelineContext::PipelineContext(const MulticubeStructure& s, const PipelineOptions& opt)
    : s_(&s), opt_(opt), grid_(opt.N, s.L), c0_(s, opt.partition)
{
    if (opt.stop == Stage::Full && opt.N > kMax3DResolution && !opt.allow_huge)
        throw UsageError("3D resolution N=" + std::to_string(opt.N) + " exceeds the resolution cap of " +
                         std::to_string(kMax3DResolution) + " (use --allow-huge)");
    if (opt_.jobs < 1) opt_.jobs = 1;
}

namespace {

FactorStats stats_of(const FactoredBiharmonic& f)
{
    return {f.op().dim(), f.op().N(), f.cache_hit(), f.factor_seconds(), f.condition_estimate()};
}

}  // namespace

const FactoredBiharmonic& PipelineContext::factor2d()
{
    if (!f2_) {
        f2_ = factor(2, opt_.N, {opt_.cache_dir});
        stats_.push_back(stats_of(*f2_));
    }
    return *f2_;
}

const FactoredBiharmonic& PipelineContext::factor3d()
{
    if (!f3_) {
        f3_ = factor(3, opt_.N, {opt_.cache_dir});
        stats_.push_back(stats_of(*f3_));
    }
    return *f3_;
}

int PipelineContext::map_node(const FaceMap& m, int node) const
{
    return map_grid_node(grid_, m, node);
}

void PipelineContext::parallel_for(int n, const std::function<void(int)>& fn) const
{
    const int threads = std::min(opt_.jobs, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

const std::array<FaceLabel, 6> kFaces{FaceLabel{0, -1}, FaceLabel{0, 1}, FaceLabel{1, -1},
                                      FaceLabel{1, 1},  FaceLabel{2, -1}, FaceLabel{2, 1}};

/// Position of a face node in the N x N face arrays.
int face_pos(const Grid& g, FaceLabel f, int node)
{
    const IVec3 p = g.ijk(node);
    const auto t = in_face_axes(f.axis);
    return p[t[0]] + g.N() * p[t[1]];
}

/// Face-array positions of the edge of face f shared with face b, ordered along the tangent.
std::vector<int> edge_positions(int N, FaceLabel f, FaceLabel b)
{
    const auto t = in_face_axes(f.axis);
    const int fixed = b.sign > 0 ? N - 1 : 0;
    std::vector<int> out(N);
    for (int m = 0; m < N; ++m) out[m] = b.axis == t[0] ? fixed + N * m : m + N * fixed;
    return out;
}

/// Label of the 2D operator face corresponding to neighbour face b of face f.
FaceLabel label2d(FaceLabel f, FaceLabel b)
{
    const auto t = in_face_axes(f.axis);
    return {b.axis == t[0] ? 0 : 1, b.sign};
}

int other_axis(int a, int b) { return 3 - a - b; }

void zero_edges(int N, std::vector<double>& v)
{
    for (int q = 0; q < N; ++q)
        for (int p = 0; p < N; ++p)
            if (p == 0 || q == 0 || p == N - 1 || q == N - 1) v[p + N * q] = 0.0;
}

double max_edge_abs(int N, const std::vector<double>& v)
{
    double m = 0;
    for (int q = 0; q < N; ++q)
        for (int p = 0; p < N; ++p)
            if (p == 0 || q == 0 || p == N - 1 || q == N - 1) m = std::max(m, std::abs(v[p + N * q]));
    return m;
}

/// Solves a batch split across the context's jobs.
std::vector<std::vector<double>> solve_all(const PipelineContext& ctx, const FactoredBiharmonic& f,
                                           const std::vector<BiharmonicData>& d)
{
    const int n = static_cast<int>(d.size());
    const int chunks = std::max(1, std::min(ctx.options().jobs, n));
    std::vector<std::vector<double>> out(n);
    ctx.parallel_for(chunks, [&](int c) {
        const int lo = n * c / chunks, hi = n * (c + 1) / chunks;
        if (lo == hi) return;
        auto part = f.solve(std::vector<BiharmonicData>(d.begin() + lo, d.begin() + hi));
        for (int i = lo; i < hi; ++i) out[i] = std::move(part[i - lo]);
    });
    return out;
}

/// h(s^f) per index along the face normal, s^f = |x^a/L - sign/2|.
std::array<std::vector<double>, 6> face_weights(const Grid& g, const PartitionParams& p)
{
    std::array<std::vector<double>, 6> w;
    for (const FaceLabel f : kFaces) {
        auto& v = w[f.index()];
        v.resize(g.N());
        for (int i = 0; i < g.N(); ++i) v[i] = h(std::abs(g.mesh.unit[i] - f.sign) / 2.0, p);
    }
    return w;
}

/// Sum over faces of h(s^f) times the face values projected along the face normal.
double extend(const Grid& g, const std::array<std::vector<double>, 6>& w, const IVec3& p,
              const std::array<const std::vector<double>*, 6>& face_vals)
{
    double s = 0;
    for (const FaceLabel f : kFaces) {
        const auto* v = face_vals[f.index()];
        if (!v) continue;
        const double wt = w[f.index()][p[f.axis]];
        if (wt == 0) continue;
        const auto t = in_face_axes(f.axis);
        s += wt * (*v)[p[t[0]] + g.N() * p[t[1]]];
    }
    return s;
}

std::vector<FieldDerivatives> derivatives(PipelineContext& ctx, const std::vector<MetricField>& g)
{
    std::vector<FieldDerivatives> d(g.size());
    ctx.parallel_for(static_cast<int>(g.size()), [&](int r) { d[r] = differentiate(ctx.grid(), g[r]); });
    return d;
}

/// Curvature of all six faces of every region: [region][face index].
std::vector<std::array<ExtrinsicCurvatureField, 6>> curvatures(PipelineContext& ctx, const std::vector<MetricField>& g,
                                                               const std::vector<FieldDerivatives>& d)
{
    std::vector<std::array<ExtrinsicCurvatureField, 6>> K(g.size());
    ctx.parallel_for(static_cast<int>(g.size()), [&](int r) {
        for (const FaceLabel f : kFaces) K[r][f.index()] = extrinsic_curvature(ctx.grid(), g[r], d[r], f);
    });
    double worst = 0;
    for (const auto& reg : K)
        for (const auto& k : reg) worst = std::max(worst, k.annihilation_residual());
    ctx.checks().k_annihilation = std::max(ctx.checks().k_annihilation, worst);
    return K;
}

void edge_geometry_checks(PipelineContext& ctx, const std::vector<MetricField>& g, const std::vector<FieldDerivatives>& d,
                          const std::vector<std::array<ExtrinsicCurvatureField, 6>>& K)
{
    const Grid& grid = ctx.grid();
    const int N = grid.N();
    double geo = 0, ident = 0;
    for (std::size_t r = 0; r < g.size(); ++r) {
        for (int e = 0; e < 12; ++e) {
            const CubeEdge ce = cube_edge(e);
            const int a = ce.f1.axis, b = ce.f2.axis, c = ce.tangent;
            const auto pa = edge_positions(N, ce.f1, ce.f2);
            const auto pb = edge_positions(N, ce.f2, ce.f1);
            for (int m = 0; m < N; ++m) {
                IVec3 p{};
                p[a] = ce.f1.sign > 0 ? N - 1 : 0;
                p[b] = ce.f2.sign > 0 ? N - 1 : 0;
                p[c] = m;
                const int node = grid.index(p);
                const Eigen::Matrix3d gm = g[r].at(node);
                const Eigen::Matrix3d dc = d[r].at(c, node), da = d[r].at(a, node), db = d[r].at(b, node);
                const double A = 0.5 * dc(c, c) / gm(c, c);
                geo = std::max(geo, std::abs(dc(a, c) - 0.5 * da(c, c) - A * gm(a, c)));
                geo = std::max(geo, std::abs(dc(b, c) - 0.5 * db(c, c) - A * gm(b, c)));
                const auto& Ka = K[r][ce.f1.index()];
                const auto& Kb = K[r][ce.f2.index()];
                const int ia = pa[m], ib = pb[m];
                ident = std::max(ident, std::abs(Kb.lapse[ib] * Kb.K[ib](a, c) + Ka.lapse[ia] * Ka.K[ia](b, c)));
            }
        }
    }
    ctx.checks().geodesic_residual = geo;
    ctx.checks().edge_identity_residual = ident;
}

}  // namespace

std::vector<MetricField> conformal_step(PipelineContext& ctx, const std::vector<MetricField>& ghat)
{
    const Grid& grid = ctx.grid();
    const MulticubeStructure& s = ctx.structure();
    const int N = grid.N(), R = s.region_count();
    const FactoredBiharmonic& f2 = ctx.factor2d();

    // Edge Neumann data from the intrinsic metric of each face.
    std::vector<BiharmonicData> data(static_cast<std::size_t>(R) * 6);
    ctx.parallel_for(R, [&](int r) {
        for (const FaceLabel f : kFaces) {
            BiharmonicData d = BiharmonicData::zeros(2, N, s.L);
            const auto t = in_face_axes(f.axis);
            // intrinsic components and their in-face derivatives
            std::array<std::array<std::vector<double>, 3>, 3> gf{};  // [a][b] for a,b in {0,1,2}, only in-face used
            std::array<std::array<std::array<std::vector<double>, 3>, 3>, 3> dgf{};  // [dir axis][a][b]
            for (int i = 0; i < 2; ++i) {
                for (int j = i; j < 2; ++j) {
                    const int a = t[i], b = t[j];
                    std::vector<double> v(N * N);
                    for (int q = 0; q < N; ++q)
                        for (int p = 0; p < N; ++p) v[p + N * q] = ghat[r].c[sym(a, b)][grid.face_node(f, p, q)];
                    for (int dir = 0; dir < 2; ++dir) {
                        differentiate_face(grid, v, dir, dgf[t[dir]][a][b]);
                        dgf[t[dir]][b][a] = dgf[t[dir]][a][b];
                    }
                    gf[a][b] = v;
                    gf[b][a] = std::move(v);
                }
            }
            for (const FaceLabel nb : kFaces) {
                if (nb.axis == f.axis) continue;
                const int b = nb.axis, c = other_axis(f.axis, nb.axis);
                const auto pos = edge_positions(N, f, nb);
                auto& out = d.neumann[label2d(f, nb).index()];
                for (int m = 0; m < N; ++m) {
                    const int i = pos[m];
                    const double gcc = gf[c][c][i];
                    if (!(gcc > 0)) throw NumericalError("conformal", "non-positive tangential metric component on an edge");
                    const double dphi = (2.0 * dgf[c][b][c][i] - dgf[b][c][c][i]) / gcc -
                                        gf[b][c][i] * dgf[c][c][c][i] / (gcc * gcc);
                    out[m] = nb.sign * dphi;
                }
            }
            data[static_cast<std::size_t>(r) * 6 + f.index()] = std::move(d);
        }
    });
    auto phi = solve_all(ctx, f2, data);

    double edge_max = 0;
    for (auto& v : phi) {
        edge_max = std::max(edge_max, max_edge_abs(N, v));
        zero_edges(N, v);
    }
    ctx.checks().phi_edge_max = edge_max;

    // Partner faces carry the same boundary data; compare, then average.
    double mismatch = 0, scale = 1;
    for (const auto& v : phi)
        for (double x : v) scale = std::max(scale, std::abs(x));
    for (const FaceMap* m : unique_interfaces(s)) {
        auto& va = phi[static_cast<std::size_t>(m->from.region) * 6 + m->from.face.index()];
        auto& vb = phi[static_cast<std::size_t>(m->to.region) * 6 + m->to.face.index()];
        for (int q = 0; q < N; ++q) {
            for (int p = 0; p < N; ++p) {
                const int na = grid.face_node(m->from.face, p, q);
                const int ib = face_pos(grid, m->to.face, ctx.map_node(*m, na));
                const int ia = p + N * q;
                mismatch = std::max(mismatch, std::abs(va[ia] - vb[ib]));
                const double avg = 0.5 * (va[ia] + vb[ib]);
                va[ia] = avg;
                vb[ib] = avg;
            }
        }
    }
    ctx.checks().phi_partner_mismatch = mismatch;
    if (mismatch > 1e-10 * scale)
        throw NumericalError("conformal", "conformal factor differs across an interface by " + std::to_string(mismatch));

    const auto w = face_weights(grid, ctx.c0().params());
    std::vector<MetricField> gbar(R);
    std::vector<std::vector<double>> phi3(R);
    ctx.parallel_for(R, [&](int r) {
        std::array<const std::vector<double>*, 6> fv{};
        for (const FaceLabel f : kFaces) fv[f.index()] = &phi[static_cast<std::size_t>(r) * 6 + f.index()];
        MetricField out(r, N);
        phi3[r].resize(grid.size());
        for (int node = 0; node < grid.size(); ++node) {
            const double ph = extend(grid, w, grid.ijk(node), fv);
            phi3[r][node] = ph;
            const double e = std::exp(ph);
            for (int c = 0; c < 6; ++c) out.c[c][node] = e * ghat[r].c[c][node];
        }
        gbar[r] = std::move(out);
    });

    double vgrad = 0;
    std::vector<double> dphi;
    for (int r = 0; r < R; ++r) {
        for (int axis = 0; axis < 3; ++axis) {
            differentiate(grid, phi3[r], axis, dphi);
            for (int c = 0; c < 8; ++c) {
                const IVec3 sg = corner_signs(c);
                const int node = grid.index(sg[0] > 0 ? N - 1 : 0, sg[1] > 0 ? N - 1 : 0, sg[2] > 0 ? N - 1 : 0);
                vgrad = std::max(vgrad, std::abs(dphi[node]));
            }
        }
    }
    ctx.checks().phi_vertex_gradient = vgrad;

    const auto d = derivatives(ctx, gbar);
    const auto K = curvatures(ctx, gbar, d);
    edge_geometry_checks(ctx, gbar, d, K);
    return gbar;
}

std::vector<MetricField> gauge_step(PipelineContext& ctx, const std::vector<MetricField>& gbar)
{
    const Grid& grid = ctx.grid();
    const MulticubeStructure& s = ctx.structure();
    const int N = grid.N(), R = s.region_count();
    const FactoredBiharmonic& f2 = ctx.factor2d();

    const auto d = derivatives(ctx, gbar);
    const auto K = curvatures(ctx, gbar, d);

    // One solve per (region, face, component (a, c)), c = 0..2, a the face axis.
    auto slot = [](int r, FaceLabel f, int c) { return (static_cast<std::size_t>(r) * 6 + f.index()) * 3 + c; };
    std::vector<BiharmonicData> data(static_cast<std::size_t>(R) * 18);
    ctx.parallel_for(R, [&](int r) {
        for (const FaceLabel f : kFaces) {
            const int a = f.axis;
            for (int c = 0; c < 3; ++c) {
                BiharmonicData dd = BiharmonicData::zeros(2, N, s.L);
                for (const FaceLabel nb : kFaces) {
                    if (nb.axis == a) continue;
                    if (c == nb.axis) continue;  // d_b dg_ab = 0
                    const auto& Kb = K[r][nb.index()];
                    const auto pos = edge_positions(N, nb, f);
                    auto& out = dd.neumann[label2d(f, nb).index()];
                    const double factor = c == a ? -2.0 : -1.0;
                    for (int m = 0; m < N; ++m) out[m] = nb.sign * factor * Kb.lapse[pos[m]] * Kb.K[pos[m]](a, c);
                }
                data[slot(r, f, c)] = std::move(dd);
            }
        }
    });
    auto sol = solve_all(ctx, f2, data);
    for (auto& v : sol) zero_edges(N, v);

    const auto w = face_weights(grid, ctx.c0().params());
    std::vector<MetricField> out(R);
    ctx.parallel_for(R, [&](int r) {
        MetricField g = gbar[r];
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                std::array<const std::vector<double>*, 6> fv{};
                for (const FaceLabel f : kFaces) {
                    if (f.axis == a) fv[f.index()] = &sol[slot(r, f, b)];
                    else if (f.axis == b) fv[f.index()] = &sol[slot(r, f, a)];
                }
                auto& comp = g.c[sym(a, b)];
                for (int node = 0; node < grid.size(); ++node) comp[node] += extend(grid, w, grid.ijk(node), fv);
            }
        }
        out[r] = std::move(g);
    });

    double intrinsic = 0;
    for (int r = 0; r < R; ++r) {
        for (const FaceLabel f : kFaces) {
            const auto t = in_face_axes(f.axis);
            for (int q = 0; q < N; ++q) {
                for (int p = 0; p < N; ++p) {
                    const int node = grid.face_node(f, p, q);
                    for (int i = 0; i < 2; ++i)
                        for (int j = i; j < 2; ++j) {
                            const int c = sym(t[i], t[j]);
                            intrinsic = std::max(intrinsic, std::abs(out[r].c[c][node] - gbar[r].c[c][node]));
                        }
                }
            }
        }
    }
    ctx.checks().gauge_intrinsic_change = intrinsic;

    const auto d2 = derivatives(ctx, out);
    const auto K2 = curvatures(ctx, out, d2);
    double edgeK = 0;
    for (int r = 0; r < R; ++r) {
        for (const FaceLabel f : kFaces) {
            const auto t = in_face_axes(f.axis);
            const auto& k = K2[r][f.index()];
            for (int q = 0; q < N; ++q)
                for (int p = 0; p < N; ++p) {
                    if (!(p == 0 || q == 0 || p == N - 1 || q == N - 1)) continue;
                    const int i = p + N * q;
                    for (int x = 0; x < 2; ++x)
                        for (int y = 0; y < 2; ++y) edgeK = std::max(edgeK, std::abs(k.K[i](t[x], t[y])));
                }
        }
    }
    ctx.checks().gauge_edge_K = edgeK;
    return out;
}

std::vector<MetricField> face_flatten_step(PipelineContext& ctx, const std::vector<MetricField>& gbarbar)
{
    const Grid& grid = ctx.grid();
    const MulticubeStructure& s = ctx.structure();
    const int N = grid.N(), R = s.region_count();

    const auto d = derivatives(ctx, gbarbar);
    const auto K = curvatures(ctx, gbarbar, d);

    // Gauge Neumann data N_{a c} on face (a, .), c = 0..2, as face arrays.
    auto slot = [](int r, FaceLabel f, int c) { return (static_cast<std::size_t>(r) * 6 + f.index()) * 3 + c; };
    std::vector<std::vector<double>> gauge(static_cast<std::size_t>(R) * 18, std::vector<double>(N * N, 0.0));
    if (!ctx.options().simple_gauge) {
        const FactoredBiharmonic& f2 = ctx.factor2d();
        std::vector<BiharmonicData> data(static_cast<std::size_t>(R) * 18);
        ctx.parallel_for(R, [&](int r) {
            for (const FaceLabel f : kFaces) {
                const int a = f.axis;
                for (int c = 0; c < 3; ++c) {
                    BiharmonicData dd = BiharmonicData::zeros(2, N, s.L);
                    for (const FaceLabel nb : kFaces) {
                        if (nb.axis == a || c == nb.axis) continue;
                        // Q = N^b K^b_{ac} on the neighbour face, differentiated along x^a within it.
                        const auto& Kb = K[r][nb.index()];
                        std::vector<double> Q(N * N), dQ;
                        for (int i = 0; i < N * N; ++i) Q[i] = Kb.lapse[i] * Kb.K[i](a, c);
                        const auto tb = in_face_axes(nb.axis);
                        differentiate_face(grid, Q, a == tb[0] ? 0 : 1, dQ);
                        const auto pos = edge_positions(N, nb, f);
                        auto& out = dd.neumann[label2d(f, nb).index()];
                        for (int m = 0; m < N; ++m) out[m] = nb.sign * -2.0 * dQ[pos[m]];
                    }
                    data[slot(r, f, c)] = std::move(dd);
                }
            }
        });
        gauge = solve_all(ctx, f2, data);
        for (auto& v : gauge) zero_edges(N, v);
    }

    const FactoredBiharmonic& f3 = ctx.factor3d();
    double edge_neumann = 0;
    std::vector<BiharmonicData> data(static_cast<std::size_t>(R) * 6);
    for (int r = 0; r < R; ++r) {
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                BiharmonicData dd = BiharmonicData::zeros(3, N, s.L);
                for (const FaceLabel f : kFaces) {
                    auto& out = dd.neumann[f.index()];
                    const auto& k = K[r][f.index()];
                    if (f.axis != a && f.axis != b) {
                        for (int i = 0; i < N * N; ++i) out[i] = f.sign * -2.0 * k.lapse[i] * k.K[i](a, b);
                        edge_neumann = std::max(edge_neumann, max_edge_abs(N, out));
                    } else {
                        const int c = f.axis == a ? b : a;
                        const auto& v = gauge[slot(r, f, c)];
                        for (int i = 0; i < N * N; ++i) out[i] = f.sign * v[i];
                    }
                }
                data[static_cast<std::size_t>(r) * 6 + sym(a, b)] = std::move(dd);
            }
        }
    }
    ctx.checks().intrinsic_neumann_edge = edge_neumann;
    auto sol = solve_all(ctx, f3, data);

    std::vector<MetricField> out(R);
    double face_change = 0;
    for (int r = 0; r < R; ++r) {
        MetricField g = gbarbar[r];
        for (int c = 0; c < 6; ++c) {
            const auto& dg = sol[static_cast<std::size_t>(r) * 6 + c];
            for (int node = 0; node < grid.size(); ++node) g.c[c][node] += dg[node];
            for (const FaceLabel f : kFaces)
                for (int q = 0; q < N; ++q)
                    for (int p = 0; p < N; ++p) face_change = std::max(face_change, std::abs(dg[grid.face_node(f, p, q)]));
        }
        out[r] = std::move(g);
    }
    ctx.checks().face_change = face_change;
    return out;
}

C1Result build_c1_metric(const MulticubeStructure& s, const PipelineOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    C1Result res;
    res.manifold = s.name;
    res.N = opt.N;
    res.L = s.L;
    PipelineContext ctx(s, opt);

    auto run = [&](Stage st, auto&& fn) {
        try {
            res.stages.push_back({st, fn()});
        } catch (const NumericalError&) {
            throw;
        } catch (const UsageError&) {
            throw;
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw NumericalError(stage_name(st), e.what());
        }
    };
    run(Stage::C0, [&] { return ctx.c0().sample(ctx.grid()); });
    if (opt.stop != Stage::C0) run(Stage::Conformal, [&] { return conformal_step(ctx, res.stages.back().g); });
    if (opt.stop == Stage::Gauge || opt.stop == Stage::Full)
        run(Stage::Gauge, [&] { return gauge_step(ctx, res.stages.back().g); });
    if (opt.stop == Stage::Full) run(Stage::Full, [&] { return face_flatten_step(ctx, res.stages.back().g); });

    res.checks = ctx.checks();
    res.factorizations = ctx.factor_stats();
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace mcube
