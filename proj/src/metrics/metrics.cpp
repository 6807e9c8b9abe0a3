#include "trajadv/metrics/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>

#include "trajadv/core/geometry.hpp"
#include "trajadv/core/kinematics.hpp"

namespace trajadv::metrics {

double ade(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth) {
    if (pred.size() != truth.size() || pred.empty())
        throw core::ValidationError("ade: horizon mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) sum += (pred[k] - truth[k]).norm();
    return sum / static_cast<double>(pred.size());
}

double fde(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth) {
    if (pred.size() != truth.size() || pred.empty())
        throw core::ValidationError("fde: horizon mismatch");
    return (pred.back() - truth.back()).norm();
}

bool miss(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth, double threshold) {
    return fde(pred, truth) > threshold;
}

bool point_offroad(const Vec2& point, const std::vector<LaneSegment>& lanes) {
    if (lanes.empty()) throw core::ValidationError("off-road test needs at least one lane");
    for (const auto& lane : lanes) {
        if (core::point_polyline_distance(point, lane.centerline) <= lane.width * 0.5)
            return false;
    }
    return true;
}

double offroad_rate(const std::vector<Vec2>& traj, const std::vector<LaneSegment>& lanes) {
    if (traj.empty()) throw core::ValidationError("off-road rate of an empty trajectory");
    int off = 0;
    for (const auto& p : traj) off += point_offroad(p, lanes) ? 1 : 0;
    return static_cast<double>(off) / static_cast<double>(traj.size());
}

bool is_offroad(const std::vector<Vec2>& traj, const std::vector<LaneSegment>& lanes) {
    for (const auto& p : traj) {
        if (point_offroad(p, lanes)) return true;
    }
    return false;
}

namespace {

MetricReport report_for(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth,
                        const core::Trajectory& history, const std::vector<LaneSegment>& lanes,
                        double miss_threshold) {
    MetricReport r;
    r.ade = ade(pred, truth);
    r.fde = fde(pred, truth);
    r.miss = r.fde > miss_threshold;
    r.offroad_rate = offroad_rate(pred, lanes);
    r.offroad_any = is_offroad(pred, lanes);
    r.max_accel = core::derive_kinematics(history).max_abs_accel();
    return r;
}

}  // namespace

ReportPair evaluate_attack(const pred::Predictor& model, const core::Scenario& scenario,
                           const core::Trajectory& attacked_history, double miss_threshold) {
    core::validate(scenario);
    const int adv = scenario.adversary_index();
    if (static_cast<int>(attacked_history.size()) != scenario.history_len)
        throw core::ValidationError("attacked history must have exactly history_len states");

    std::vector<Vec2> truth;
    for (const auto& st : scenario.future_of(adv)) truth.push_back(st.position());

    const pred::PredictionRequest clean = pred::make_request(scenario);

    core::Trajectory clean_history;
    clean_history.dt = scenario.dt;
    clean_history.states = scenario.history_of(adv);

    ReportPair pair;
    pair.normal = report_for(model.predict(clean).futures[clean.adversary], truth, clean_history,
                             scenario.lanes, miss_threshold);

    pred::PredictionRequest attacked = clean;
    attacked.histories[attacked.adversary] = attacked_history.points();
    pair.attacked = report_for(model.predict(attacked).futures[attacked.adversary], truth,
                               attacked_history, scenario.lanes, miss_threshold);
    return pair;
}

std::vector<double> default_accel_edges() {
    return {0.0, 0.02, 0.37, 1.8, 2.15, 4.17, 6.0,
            std::numeric_limits<double>::infinity()};
}

SuiteSummary aggregate(const std::vector<ReportPair>& reports,
                       const std::vector<double>& accel_edges) {
    if (reports.empty()) throw core::ValidationError("aggregate over an empty report list");
    if (accel_edges.size() < 2) throw core::ValidationError("histogram needs >= 2 edges");

    SuiteSummary s;
    s.attacked_accel.edges = accel_edges;
    s.attacked_accel.counts.assign(accel_edges.size() - 1, 0);

    auto add = [](SuiteAggregate& agg, const MetricReport& r) {
        agg.count += 1;
        agg.mean_ade += r.ade;
        agg.mean_fde += r.fde;
        agg.miss_rate += r.miss ? 1.0 : 0.0;
        agg.offroad_traj_rate += r.offroad_any ? 1.0 : 0.0;
        agg.mean_offroad_point_rate += r.offroad_rate;
    };
    auto finish = [](SuiteAggregate& agg) {
        const double n = static_cast<double>(agg.count);
        agg.mean_ade /= n;
        agg.mean_fde /= n;
        agg.miss_rate /= n;
        agg.offroad_traj_rate /= n;
        agg.mean_offroad_point_rate /= n;
    };

    for (const auto& pair : reports) {
        add(s.normal, pair.normal);
        add(s.attacked, pair.attacked);
        const double a = pair.attacked.max_accel;
        for (std::size_t b = 0; b + 1 < accel_edges.size(); ++b) {
            if (a >= accel_edges[b] && a < accel_edges[b + 1]) {
                s.attacked_accel.counts[b] += 1;
                break;
            }
        }
    }
    finish(s.normal);
    finish(s.attacked);
    return s;
}

namespace {

nlohmann::ordered_json report_json(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["ade"] = r.ade;
    j["fde"] = r.fde;
    j["miss"] = r.miss;
    j["offroad_rate"] = r.offroad_rate;
    j["offroad_any"] = r.offroad_any;
    j["max_accel"] = r.max_accel;
    return j;
}

MetricReport report_parse(const nlohmann::json& j) {
    MetricReport r;
    r.ade = j.at("ade").get<double>();
    r.fde = j.at("fde").get<double>();
    r.miss = j.at("miss").get<bool>();
    r.offroad_rate = j.at("offroad_rate").get<double>();
    r.offroad_any = j.at("offroad_any").get<bool>();
    r.max_accel = j.at("max_accel").get<double>();
    return r;
}

}  // namespace

std::string report_to_json(const ReportPair& pair) {
    nlohmann::ordered_json j;
    j["normal"] = report_json(pair.normal);
    j["attacked"] = report_json(pair.attacked);
    return j.dump(2) + "\n";
}

ReportPair report_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        return {report_parse(j.at("normal")), report_parse(j.at("attacked"))};
    } catch (const nlohmann::json::exception& e) {
        throw core::ParseError(std::string("metric report malformed: ") + e.what());
    }
}

void write_suite_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, ReportPair>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw core::ParseError("cannot open file for writing: " + path.string());
    out << "scenario_id,ade_normal,ade_attack,fde_normal,fde_attack,miss_normal,miss_attack,"
           "offroad_normal,offroad_attack,max_accel\n";
    out.precision(17);
    for (const auto& [id, pair] : rows) {
        out << id << ',' << pair.normal.ade << ',' << pair.attacked.ade << ',' << pair.normal.fde
            << ',' << pair.attacked.fde << ',' << (pair.normal.miss ? 1 : 0) << ','
            << (pair.attacked.miss ? 1 : 0) << ',' << (pair.normal.offroad_any ? 1 : 0) << ','
            << (pair.attacked.offroad_any ? 1 : 0) << ',' << pair.attacked.max_accel << '\n';
    }
}

void write_accel_histogram_csv(const std::filesystem::path& path, const AccelHistogram& hist) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw core::ParseError("cannot open file for writing: " + path.string());
    out << "bucket_low,bucket_high,count\n";
    out.precision(17);
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        out << hist.edges[b] << ',' << hist.edges[b + 1] << ',' << hist.counts[b] << '\n';
    }
}

}  // namespace trajadv::metrics
