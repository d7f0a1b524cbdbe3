#include "sv/event.hpp"

#include <nlohmann/json.hpp>

namespace sv {

size_t event::hash() const {
    size_t h = name.hash();
    if (payload) h = h * 1099511628211ULL ^ payload->hash();
    return h;
}

std::string event::str() const {
    if (!payload) return name.str();
    return name.str() + "[" + payload->str() + "]";
}

value event::to_value() const {
    value::list xs{value(name)};
    if (payload) xs.push_back(*payload);
    return value::tup(std::move(xs));
}

event event::from_value(const value& v) {
    if (!v.is(value::kind::tuple))
        throw type_error("not an event value: " + v.str());
    const auto& xs = v.items();
    if (xs.empty() || xs.size() > 2 || !xs[0].is(value::kind::symbol_))
        throw type_error("not an event value: " + v.str());
    event e(xs[0].as_symbol());
    if (xs.size() == 2) e.payload = xs[1];
    return e;
}

json event::to_json() const {
    json j{{"ev", name.str()}};
    if (payload) j["arg"] = payload->to_json();
    return j;
}

event event::from_json(const json& j) {
    if (!j.is_object() || !j.contains("ev"))
        throw parse_error("malformed event: " + j.dump());
    event e(symbol(j.at("ev").get<std::string>()));
    if (j.contains("arg")) e.payload = value::from_json(j.at("arg"));
    return e;
}

trace append(trace t, event e) {
    t.push_back(std::move(e));
    return t;
}

trace concat(trace t, const trace& s) {
    t.insert(t.end(), s.begin(), s.end());
    return t;
}

value trace_to_value(const trace& t) {
    value::list xs;
    xs.reserve(t.size());
    for (const auto& e : t) xs.push_back(e.to_value());
    return value::seq(std::move(xs));
}

trace trace_from_value(const value& v) {
    if (!v.is(value::kind::sequence))
        throw type_error("not a trace value: " + v.str());
    trace t;
    t.reserve(v.items().size());
    for (const auto& x : v.items()) t.push_back(event::from_value(x));
    return t;
}

json trace_to_json(const trace& t) {
    json arr = json::array();
    for (const auto& e : t) arr.push_back(e.to_json());
    return arr;
}

trace trace_from_json(const json& j) {
    trace t;
    for (const auto& e : j) t.push_back(event::from_json(e));
    return t;
}

std::string trace_str(const trace& t) {
    std::string s = "[";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += " ";
        s += t[i].str();
    }
    return s + "]";
}

} // namespace sv
