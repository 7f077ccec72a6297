#pragma once

// JSON files for instances and schedules. Weights are exact rational
// strings ("1/3"); times are integers.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "jrpd/core.hpp"

namespace jrpd {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Weight weight_from_json(const Json& j, const std::string& where) {
    try {
        if (j.is_string()) return Weight::parse(j.get<std::string>());
        if (j.is_number_integer()) return Weight(j.get<std::int64_t>());
    } catch (const std::exception& e) {
        throw FormatError(where + ": " + e.what());
    }
    throw FormatError(where + ": weight must be a \"p/q\" string or an integer");
}

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw FormatError(where + ": bad \"" + key + "\": " + e.what());
    }
}

inline const Json& array_field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
        throw FormatError(where + ": \"" + key + "\" must be an array");
    }
    return j.at(key);
}

}  // namespace detail

inline Json to_json(const Instance& inst) {
    Json j;
    j["joint_cost"] = inst.joint_cost.str();
    j["tie_permutation"] = inst.tie_permutation;
    Json items = Json::array();
    for (const auto& item : inst.items) items.push_back({{"id", item.id}, {"weight", item.weight.str()}});
    j["items"] = std::move(items);
    Json reqs = Json::array();
    for (const auto& q : inst.requests) {
        reqs.push_back({{"id", q.id},
                        {"item", q.item},
                        {"arrival", q.arrival},
                        {"deadline", q.deadline},
                        {"predicted", q.predicted}});
    }
    j["requests"] = std::move(reqs);
    return j;
}

/// Parses an instance and checks it is well formed.
inline Instance instance_from_json(const Json& j) {
    if (!j.is_object()) throw FormatError("instance must be a JSON object");
    Instance inst;
    if (!j.contains("joint_cost")) throw FormatError("instance: missing \"joint_cost\"");
    inst.joint_cost = detail::weight_from_json(j.at("joint_cost"), "joint_cost");
    for (const auto& it : detail::array_field(j, "items", "instance")) {
        const std::string where = "item " + std::to_string(inst.items.size());
        const ItemId id = detail::field<ItemId>(it, "id", where);
        if (!it.contains("weight")) throw FormatError(where + ": missing \"weight\"");
        inst.items.push_back({id, detail::weight_from_json(it.at("weight"), where)});
    }
    for (const auto& r : detail::array_field(j, "requests", "instance")) {
        const std::string where = "request " + std::to_string(inst.requests.size());
        Request q;
        q.id = detail::field<RequestId>(r, "id", where);
        q.item = detail::field<ItemId>(r, "item", where);
        q.arrival = detail::field<Tick>(r, "arrival", where);
        q.deadline = detail::field<Tick>(r, "deadline", where);
        q.predicted = r.contains("predicted") ? detail::field<Tick>(r, "predicted", where) : q.deadline;
        inst.requests.push_back(q);
    }
    if (j.contains("tie_permutation")) {
        inst.tie_permutation = detail::field<std::vector<std::size_t>>(j, "tie_permutation", "instance");
    } else {
        inst.tie_permutation = identity_permutation(inst.items.size());
    }
    auto report = validate_instance(inst);
    if (!report.ok()) throw FormatError("invalid instance: " + report.violations.front());
    return inst;
}

inline Json to_json(const Schedule& schedule) {
    Json services = Json::array();
    for (const auto& s : schedule.services) {
        services.push_back({{"time", s.time}, {"items", s.items}, {"served", s.served}});
    }
    return Json{{"services", std::move(services)}};
}

inline Schedule schedule_from_json(const Json& j) {
    Schedule out;
    for (const auto& s : detail::array_field(j, "services", "schedule")) {
        const std::string where = "service " + std::to_string(out.services.size());
        Service service;
        service.time = detail::field<Tick>(s, "time", where);
        service.items = detail::field<std::vector<ItemId>>(s, "items", where);
        service.served = detail::field<std::vector<RequestId>>(s, "served", where);
        std::sort(service.items.begin(), service.items.end());
        std::sort(service.served.begin(), service.served.end());
        out.services.push_back(std::move(service));
    }
    return out;
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(origin + ": " + e.what());
    }
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline std::string dump(const Json& j) { return j.dump(1) + "\n"; }

inline Instance read_instance(const std::string& path) {
    try {
        return instance_from_json(parse_json_text(read_text(path), path));
    } catch (const FormatError& e) {
        std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        throw FormatError(path + ": " + what);
    }
}

inline Schedule read_schedule(const std::string& path) {
    return schedule_from_json(parse_json_text(read_text(path), path));
}

inline void write_instance(const std::string& path, const Instance& inst) { write_text(path, dump(to_json(inst))); }
inline void write_schedule(const std::string& path, const Schedule& s) { write_text(path, dump(to_json(s))); }

}  // namespace jrpd
