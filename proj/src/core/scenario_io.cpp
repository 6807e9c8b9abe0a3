#include "trajadv/core/scenario_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace trajadv::core {

using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json point_to_json(const Vec2& p) { return json::array({p.x, p.y}); }

Vec2 point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("expected [x, y] coordinate pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario JSON malformed: ") + e.what());
    }

    Scenario s;
    try {
        s.dt = doc.at("dt").get<double>();
        s.history_len = doc.at("history_len").get<int>();
        s.future_len = doc.at("future_len").get<int>();
        s.adversary_id = doc.at("adversary_id").get<std::string>();
        for (const auto& ja : doc.at("agents")) {
            Agent agent;
            agent.id = ja.at("id").get<std::string>();
            agent.semantic_class = ja.at("class").get<std::string>();
            agent.trajectory.dt = s.dt;
            int t = 0;
            for (const auto& row : ja.at("states")) {
                const Vec2 p = point_from_json(row);
                agent.trajectory.states.push_back({p.x, p.y, t++});
            }
            s.agents.push_back(std::move(agent));
        }
        for (const auto& jl : doc.at("lanes")) {
            LaneSegment lane;
            lane.width = jl.at("width").get<double>();
            for (const auto& row : jl.at("centerline")) lane.centerline.push_back(point_from_json(row));
            s.lanes.push_back(std::move(lane));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario JSON missing or mistyped field: ") + e.what());
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path)); }

std::string serialize_scenario(const Scenario& scenario) {
    validate(scenario);
    json doc;
    doc["dt"] = scenario.dt;
    doc["history_len"] = scenario.history_len;
    doc["future_len"] = scenario.future_len;
    doc["adversary_id"] = scenario.adversary_id;
    doc["agents"] = json::array();
    for (const auto& agent : scenario.agents) {
        json ja;
        ja["id"] = agent.id;
        ja["class"] = agent.semantic_class;
        ja["states"] = json::array();
        for (const auto& st : agent.trajectory.states) ja["states"].push_back(point_to_json(st.position()));
        doc["agents"].push_back(std::move(ja));
    }
    doc["lanes"] = json::array();
    for (const auto& lane : scenario.lanes) {
        json jl;
        jl["centerline"] = json::array();
        for (const auto& p : lane.centerline) jl["centerline"].push_back(point_to_json(p));
        jl["width"] = lane.width;
        doc["lanes"].push_back(std::move(jl));
    }
    return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path.string());
    out << serialize_scenario(scenario);
}

Scenario load_scenario_csv(const std::filesystem::path& csv_path,
                           const std::filesystem::path& sidecar_path) {
    json side;
    try {
        side = json::parse(read_file(sidecar_path));
    } catch (const json::exception& e) {
        throw ParseError(std::string("sidecar JSON malformed: ") + e.what());
    }

    Scenario s;
    try {
        s.dt = side.at("dt").get<double>();
        s.history_len = side.at("history_len").get<int>();
        s.future_len = side.at("future_len").get<int>();
        s.adversary_id = side.at("adversary_id").get<std::string>();
        for (const auto& jl : side.at("lanes")) {
            LaneSegment lane;
            lane.width = jl.at("width").get<double>();
            for (const auto& row : jl.at("centerline")) lane.centerline.push_back(point_from_json(row));
            s.lanes.push_back(std::move(lane));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("sidecar JSON missing or mistyped field: ") + e.what());
    }

    std::map<std::string, std::string> classes;
    if (side.contains("classes")) {
        for (const auto& [id, cls] : side.at("classes").items()) classes[id] = cls.get<std::string>();
    }

    std::ifstream in(csv_path);
    if (!in) throw ParseError("cannot open file: " + csv_path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV: " + csv_path.string());
    if (line.ends_with('\r')) line.pop_back();
    if (line != "agent_id,t_index,x,y") {
        throw ParseError("CSV header must be agent_id,t_index,x,y, got: " + line);
    }

    // preserves first-appearance order of agent ids
    std::vector<std::string> order;
    std::map<std::string, std::vector<AgentState>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.ends_with('\r')) line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id, t_str, x_str, y_str;
        if (!std::getline(ls, id, ',') || !std::getline(ls, t_str, ',') ||
            !std::getline(ls, x_str, ',') || !std::getline(ls, y_str)) {
            throw ParseError("CSV row " + std::to_string(lineno) + " malformed");
        }
        AgentState st;
        try {
            st.t_index = std::stoi(t_str);
            st.x = std::stod(x_str);
            st.y = std::stod(y_str);
        } catch (const std::exception&) {
            throw ParseError("CSV row " + std::to_string(lineno) + " has non-numeric field");
        }
        if (rows.find(id) == rows.end()) order.push_back(id);
        rows[id].push_back(st);
    }

    for (const auto& id : order) {
        auto& states = rows[id];
        std::sort(states.begin(), states.end(),
                  [](const AgentState& a, const AgentState& b) { return a.t_index < b.t_index; });
        for (std::size_t i = 0; i + 1 < states.size(); ++i) {
            if (states[i + 1].t_index != states[i].t_index + 1) {
                throw ValidationError("agent '" + id + "' has non-contiguous t_index values");
            }
        }
        Agent agent;
        agent.id = id;
        auto it = classes.find(id);
        agent.semantic_class = it != classes.end() ? it->second : "car";
        agent.trajectory.dt = s.dt;
        agent.trajectory.states = std::move(states);
        s.agents.push_back(std::move(agent));
    }

    validate(s);
    return s;
}

}  // namespace trajadv::core
