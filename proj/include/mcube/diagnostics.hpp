#pragma once

#include "mcube/field.hpp"
#include "mcube/pipeline.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace mcube {

struct InterfaceNorms {
    FaceRef a;
    FaceRef b;
    double metric_jump_l2 = 0;
    double extrinsic_l2 = 0;
};

/// Junction-condition residuals of one metric over all interfaces. Norms are
/// root-mean-square values over interface nodes and over the four entries of
/// the tangential 2x2 block; each interface is counted once.
struct DiagnosticsReport {
    std::string manifold;
    int N = 0;
    std::string stage;
    std::vector<InterfaceNorms> interfaces;
    double metric_jump_l2 = 0;
    double extrinsic_l2 = 0;

    nlohmann::json to_json(const MulticubeStructure& s) const;
};

/// `reverse` evaluates each interface from its target side (same norms up to roundoff).
DiagnosticsReport diagnose(const MulticubeStructure& s, const Grid& grid, const std::vector<MetricField>& g,
                           const std::string& stage, bool reverse = false);

struct ConvergenceRow {
    std::string manifold;
    int N = 0;
    std::string stage;
    double metric_jump_l2 = 0;
    double extrinsic_l2 = 0;
    double wall_seconds = 0;
    bool cache_hit = false;
    std::string error;  // non-empty when this resolution failed
};

/// Builds the metric for each N (options.N ignored) and reports the final
/// stage. Failures become rows with `error` set; the run continues. `progress`
/// (optional) sees each row as it completes.
std::vector<ConvergenceRow> convergence_report(const MulticubeStructure& s, const std::vector<int>& Ns,
                                               const PipelineOptions& options,
                                               const std::function<void(const ConvergenceRow&)>& progress = {});

/// Header `manifold,N,stage,metric_jump_l2,extrinsic_l2,wall_seconds,cache_hit`;
/// numbers in shortest round-trip form, failed rows carry nan and stage "error".
void write_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);
std::string format_double(double v);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mcube
