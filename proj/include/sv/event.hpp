#pragma once

#include "sv/value.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sv {

// Symbolic event with an optional payload. Parametric events like enq[v] or
// rx[m] are (name, payload) pairs; two events are equal when name and payload
// agree.
struct event {
    symbol name;
    std::optional<value> payload;

    event() = default;
    explicit event(symbol n) : name(n) {}
    explicit event(std::string_view n) : name(n) {}
    event(symbol n, value p) : name(n), payload(std::move(p)) {}
    event(std::string_view n, value p) : name(n), payload(std::move(p)) {}

    friend bool operator==(const event& a, const event& b) {
        return a.name == b.name && a.payload == b.payload;
    }
    friend bool operator!=(const event& a, const event& b) { return !(a == b); }
    friend bool operator<(const event& a, const event& b) {
        if (a.name != b.name) return a.name < b.name;
        if (a.payload.has_value() != b.payload.has_value())
            return !a.payload.has_value();
        return a.payload && *a.payload < *b.payload;
    }

    size_t hash() const;
    std::string str() const;

    // encode as a value (for trace-valued state variables): tup(sym) or
    // tup(sym, payload)
    value to_value() const;
    static event from_value(const value& v); // throws type_error on bad shape

    json to_json() const;
    static event from_json(const json& j);
};

// Finite event sequence over E. nulls is the empty trace.
using trace = std::vector<event>;

inline trace nulls() { return {}; }

trace append(trace t, event e);
trace concat(trace t, const trace& s);

value trace_to_value(const trace& t);
trace trace_from_value(const value& v); // throws type_error if not a trace

json trace_to_json(const trace& t);
trace trace_from_json(const json& j);

std::string trace_str(const trace& t);

} // namespace sv

template <> struct std::hash<sv::event> {
    size_t operator()(const sv::event& e) const { return e.hash(); }
};
template <> struct std::hash<sv::trace> {
    size_t operator()(const sv::trace& t) const {
        size_t h = 0x51ed270b;
        for (const auto& e : t) h = h * 1099511628211ULL ^ e.hash();
        return h;
    }
};
