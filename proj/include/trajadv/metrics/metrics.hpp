#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trajadv/core/types.hpp"
#include "trajadv/pred/predictor.hpp"

namespace trajadv::metrics {

using core::LaneSegment;
using core::Vec2;

// Mean per-step Euclidean distance.
double ade(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth);

// Euclidean distance at the final step.
double fde(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth);

// fde > threshold, strictly.
bool miss(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth, double threshold = 2.0);

// A point is off-road when its distance to every lane centerline exceeds
// that lane's width/2 (the drivable region is the union of lane corridors).
bool point_offroad(const Vec2& point, const std::vector<LaneSegment>& lanes);

// Fraction of off-road points.
double offroad_rate(const std::vector<Vec2>& traj, const std::vector<LaneSegment>& lanes);

// Any-point rule, used for the aggregate off-road trajectory rate.
bool is_offroad(const std::vector<Vec2>& traj, const std::vector<LaneSegment>& lanes);

struct MetricReport {
    double ade{0.0};
    double fde{0.0};
    bool miss{false};
    double offroad_rate{0.0};  // per-point fraction over the predicted future
    bool offroad_any{false};
    double max_accel{0.0};  // of the history the prediction consumed
};

struct ReportPair {
    MetricReport normal;
    MetricReport attacked;
};

// Predicts once on the clean window and once with the adversary's window
// replaced by attacked_history; every metric is computed against the true
// future. max_accel describes the respective input window itself.
ReportPair evaluate_attack(const pred::Predictor& model, const core::Scenario& scenario,
                           const core::Trajectory& attacked_history, double miss_threshold = 2.0);

struct AccelHistogram {
    std::vector<double> edges;  // bucket i covers [edges[i], edges[i+1])
    std::vector<int> counts;    // size = edges.size() - 1
};

// Paper-style feasibility buckets; the final bucket is open-ended.
std::vector<double> default_accel_edges();

struct SuiteAggregate {
    int count{0};
    double mean_ade{0.0};
    double mean_fde{0.0};
    double miss_rate{0.0};
    double offroad_traj_rate{0.0};        // any-point rule
    double mean_offroad_point_rate{0.0};  // diagnostic
};

struct SuiteSummary {
    SuiteAggregate normal;
    SuiteAggregate attacked;
    AccelHistogram attacked_accel;  // over attacked max_accel values
};

SuiteSummary aggregate(const std::vector<ReportPair>& reports,
                       const std::vector<double>& accel_edges = default_accel_edges());

// Serialization used by the CLI: one JSON report per scenario, a CSV suite
// table, and a CSV histogram.
std::string report_to_json(const ReportPair& pair);
ReportPair report_from_json(const std::string& text);
void write_suite_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, ReportPair>>& rows);
void write_accel_histogram_csv(const std::filesystem::path& path, const AccelHistogram& hist);

}  // namespace trajadv::metrics
