#include "recert/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace recert {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

using nlohmann::json;

// fault_clearing is optional (default 0: the waiting stage starts at the
// pre-fault equilibrium); every other key is required.
constexpr const char* kRequiredKeys[] = {
    "inertia",       "damping",          "internal_voltage",
    "transient_reactance", "mechanical_power", "line_reactance_pre",
    "line_reactance_fault", "line_reactance_post", "load_active",
    "load_reactive", "delta_max_deg",    "omega_max",
    "v_min",         "v_max",            "synchronous_speed",
};

ScenarioParameters from_json(const json& doc) {
    for (const char* key : kRequiredKeys) {
        if (!doc.contains(key)) {
            throw scenario_error(std::string("scenario missing required key: ") + key);
        }
        if (!doc.at(key).is_number()) {
            throw scenario_error(std::string("scenario key is not a number: ") + key);
        }
    }
    ScenarioParameters p;
    p.inertia = doc.at("inertia").get<double>();
    p.damping = doc.at("damping").get<double>();
    p.internal_voltage = doc.at("internal_voltage").get<double>();
    p.transient_reactance = doc.at("transient_reactance").get<double>();
    p.mechanical_power = doc.at("mechanical_power").get<double>();
    p.line_reactance_pre = doc.at("line_reactance_pre").get<double>();
    p.line_reactance_fault = doc.at("line_reactance_fault").get<double>();
    p.line_reactance_post = doc.at("line_reactance_post").get<double>();
    p.load_active = doc.at("load_active").get<double>();
    p.load_reactive = doc.at("load_reactive").get<double>();
    p.delta_max = doc.at("delta_max_deg").get<double>() / kDegPerRad;
    p.omega_max = doc.at("omega_max").get<double>();
    p.v_min = doc.at("v_min").get<double>();
    p.v_max = doc.at("v_max").get<double>();
    p.synchronous_speed = doc.at("synchronous_speed").get<double>();
    p.fault_clearing = doc.value("fault_clearing", 0.0);
    validate_scenario(p);
    return p;
}

json to_json(const ScenarioParameters& p) {
    json doc;
    doc["inertia"] = p.inertia;
    doc["damping"] = p.damping;
    doc["internal_voltage"] = p.internal_voltage;
    doc["transient_reactance"] = p.transient_reactance;
    doc["mechanical_power"] = p.mechanical_power;
    doc["line_reactance_pre"] = p.line_reactance_pre;
    doc["line_reactance_fault"] = p.line_reactance_fault;
    doc["line_reactance_post"] = p.line_reactance_post;
    doc["load_active"] = p.load_active;
    doc["load_reactive"] = p.load_reactive;
    doc["delta_max_deg"] = p.delta_max * kDegPerRad;
    doc["omega_max"] = p.omega_max;
    doc["v_min"] = p.v_min;
    doc["v_max"] = p.v_max;
    doc["synchronous_speed"] = p.synchronous_speed;
    doc["fault_clearing"] = p.fault_clearing;
    return doc;
}

void require(bool condition, const char* field, const char* rule) {
    if (!condition) {
        throw scenario_error(std::string("scenario field ") + field + " " + rule);
    }
}

} // namespace

void validate_scenario(const ScenarioParameters& p) {
    require(std::isfinite(p.inertia) && p.inertia > 0.0, "inertia", "must be positive");
    require(std::isfinite(p.damping) && p.damping >= 0.0, "damping", "must be nonnegative");
    require(std::isfinite(p.internal_voltage) && p.internal_voltage > 0.0, "internal_voltage",
            "must be positive");
    require(std::isfinite(p.transient_reactance) && p.transient_reactance > 0.0,
            "transient_reactance", "must be positive");
    require(std::isfinite(p.mechanical_power), "mechanical_power", "must be finite");
    require(std::isfinite(p.line_reactance_pre) && p.line_reactance_pre > 0.0,
            "line_reactance_pre", "must be positive");
    require(std::isfinite(p.line_reactance_fault) && p.line_reactance_fault > 0.0,
            "line_reactance_fault", "must be positive");
    require(std::isfinite(p.line_reactance_post) && p.line_reactance_post > 0.0,
            "line_reactance_post", "must be positive");
    require(std::isfinite(p.load_active), "load_active", "must be finite");
    require(std::isfinite(p.load_reactive), "load_reactive", "must be finite");
    require(std::isfinite(p.delta_max) && p.delta_max > 0.0, "delta_max_deg", "must be positive");
    require(std::isfinite(p.omega_max) && p.omega_max > 0.0, "omega_max", "must be positive");
    require(std::isfinite(p.v_min) && std::isfinite(p.v_max) && p.v_min < p.v_max, "v_min",
            "must be below v_max");
    require(std::isfinite(p.synchronous_speed) && p.synchronous_speed > 0.0, "synchronous_speed",
            "must be positive");
    require(std::isfinite(p.fault_clearing) && p.fault_clearing >= 0.0, "fault_clearing",
            "must be nonnegative");
}

ScenarioParameters load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw scenario_error("cannot open scenario file: " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw scenario_error("scenario parse failure in " + path.string() + ": " + e.what());
    }
    return from_json(doc);
}

void save_scenario(const ScenarioParameters& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw scenario_error("cannot write scenario file: " + path.string());
    }
    out << to_json(params).dump(2) << "\n";
}

std::string scenario_to_json_text(const ScenarioParameters& params) {
    return to_json(params).dump();
}

ScenarioParameters scenario_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw scenario_error(std::string("scenario parse failure: ") + e.what());
    }
    return from_json(doc);
}

} // namespace recert
