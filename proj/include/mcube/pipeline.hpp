#pragma once

#include "mcube/biharmonic.hpp"
#include "mcube/c0_metric.hpp"
#include "mcube/curvature.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mcube {

enum class Stage { C0, Conformal, Gauge, Full };

std::string stage_name(Stage s);
/// "c0" | "conformal" | "gauge" | "full"; throws UsageError otherwise.
Stage parse_stage(const std::string& s);

struct PipelineOptions {
    int N = 12;
    PartitionParams partition;
    Stage stop = Stage::Full;   // last stage to compute
    bool simple_gauge = false;  // Step 3 gauge Neumann data set to 0 instead of 2D solves
    bool allow_huge = false;    // lift the 3D resolution cap
    std::string cache_dir;      // resolved directory; empty disables the disk cache
    int jobs = 1;
};

struct StageFields {
    Stage stage = Stage::C0;
    std::vector<MetricField> g;  // one per region
};

/// Internal self-checks recorded while the pipeline runs.
struct PipelineChecks {
    double phi_partner_mismatch = 0;    // max |phi_A - phi_B| across interfaces before averaging
    double phi_edge_max = 0;            // max |phi| on cube edges (imposed zero)
    double phi_vertex_gradient = 0;     // max |d phi| at cube vertices
    double geodesic_residual = 0;       // edge geodesic equations for gbar, A(s) eliminated
    double edge_identity_residual = 0;  // max |N^b K^b_ac + N^a K^a_bc| on edges for gbar
    double gauge_intrinsic_change = 0;  // max |intrinsic (gbarbar - gbar)| on faces
    double gauge_edge_K = 0;            // max tangential |Kbarbar| on edges
    double intrinsic_neumann_edge = 0;  // max |intrinsic Neumann data| on edges in Step 3
    double face_change = 0;             // max |gtilde - gbarbar| on faces
    double k_annihilation = 0;          // max |K n| over all computed curvature fields
};

struct FactorStats {
    int dim = 0;
    int N = 0;
    bool cache_hit = false;
    double seconds = 0;
    double condition_estimate = 0;
};

struct C1Result {
    std::string manifold;
    int N = 0;
    double L = 1.0;
    std::vector<StageFields> stages;  // in pipeline order, up to the requested stop
    PipelineChecks checks;
    std::vector<FactorStats> factorizations;
    double wall_seconds = 0;

    const StageFields& final_stage() const { return stages.back(); }
    const StageFields* find(Stage s) const;
    /// True when every factorization came from the disk cache.
    bool cache_hit() const;
    double factor_seconds() const;
};

/// Shared state of one pipeline run on a fixed structure and resolution.
class PipelineContext {
public:
    PipelineContext(const MulticubeStructure& s, const PipelineOptions& opt);

    const MulticubeStructure& structure() const { return *s_; }
    const PipelineOptions& options() const { return opt_; }
    const Grid& grid() const { return grid_; }
    const C0Metric& c0() const { return c0_; }
    const FactoredBiharmonic& factor2d();
    const FactoredBiharmonic& factor3d();
    const std::vector<FactorStats>& factor_stats() const { return stats_; }
    PipelineChecks& checks() { return checks_; }

    /// Node of region `to` reached from `node` (on face m.from) through the face map.
    int map_node(const FaceMap& m, int node) const;
    /// Runs fn(i) for i in [0, n) on up to options().jobs threads.
    void parallel_for(int n, const std::function<void(int)>& fn) const;

private:
    const MulticubeStructure* s_;
    PipelineOptions opt_;
    Grid grid_;
    C0Metric c0_;
    std::shared_ptr<const FactoredBiharmonic> f2_, f3_;
    std::vector<FactorStats> stats_;
    PipelineChecks checks_;
};

/// Step 1: gbar = e^phi ghat with phi from per-face 2D solves.
std::vector<MetricField> conformal_step(PipelineContext& ctx, const std::vector<MetricField>& ghat);
/// Step 2: gbarbar = gbar + delta gbar, extrinsic curvature removed along edges.
std::vector<MetricField> gauge_step(PipelineContext& ctx, const std::vector<MetricField>& gbar);
/// Step 3: gtilde = gbarbar + delta gbarbar from 3D solves, extrinsic curvature removed on faces.
std::vector<MetricField> face_flatten_step(PipelineContext& ctx, const std::vector<MetricField>& gbarbar);

/// Runs C0 sampling and the requested steps. Errors carry the failing stage.
C1Result build_c1_metric(const MulticubeStructure& s, const PipelineOptions& opt);

}  // namespace mcube
