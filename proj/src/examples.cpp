#include "sv/examples.hpp"

namespace sv {

namespace {

const symbol enq_sym{"enq"};
const symbol deq_sym{"deq"};
const symbol tick_sym{"tick"};

} // namespace

state_variable mod_counter(int64_t c) {
    if (c < 1) throw domain_error("mod counter needs c >= 1");
    return define(alphabet_spec::open(), value(int64_t{0}),
                  [c](const value& v, const event&) { return value((v.as_int() + 1) % c); });
}

state_variable unbounded_counter() {
    return define(alphabet_spec::open(), value(int64_t{0}),
                  [](const value& v, const event&) { return value(v.as_int() + 1); });
}

state_variable connected_counters(int64_t c) {
    if (c < 1) throw domain_error("connected counters need c >= 1");
    auto outer = mod_counter(c);
    auto inner = mod_counter(c);
    std::vector<feedback_fn> fbs;
    // outer counter ticks on every event
    fbs.push_back([](const event&, std::span<const value>) -> feedback_action {
        return event(tick_sym);
    });
    // inner counter ticks when the outer is about to wrap
    fbs.push_back([c](const event&, std::span<const value> outs) -> feedback_action {
        if (outs[0].as_int() == c - 1) return event(tick_sym);
        return hold;
    });
    auto pair = general_product({outer, inner}, std::move(fbs));
    return combine(
        [c](std::span<const value> vs) {
            const auto& t = vs[0].items();
            return value(t[0].as_int() + c * t[1].as_int());
        },
        {pair});
}

state_variable connected_counters_direct(int64_t c) {
    if (c < 1) throw domain_error("connected counters need c >= 1");
    // u is defined by reference to C's value at the same trace, so the two
    // are folded jointly: state (C, u)
    auto joint = define(
        alphabet_spec::open(), value::tup({value(int64_t{0}), value::seq({})}),
        [c](const value& s, const event& e) {
            int64_t cur = s.items()[0].as_int();
            value tr = s.items()[1];
            if (cur == c - 1) {
                auto xs = tr.items();
                xs.push_back(event(tick_sym).to_value());
                (void)e;
                tr = value::seq(std::move(xs));
            }
            return value::tup({value((cur + 1) % c), tr});
        });
    auto u = combine([](std::span<const value> vs) { return vs[0].items()[1]; }, {joint});
    auto d_outer = mod_counter(c);
    auto d_inner = substitute(u, mod_counter(c));
    return combine(
        [c](std::span<const value> vs) { return value(vs[0].as_int() + c * vs[1].as_int()); },
        {d_outer, d_inner});
}

event enq(value v) { return event(enq_sym, std::move(v)); }
event deq() { return event(deq_sym); }

namespace {

value queue_step(const value& q, const event& e) {
    if (e.name == enq_sym) {
        if (!e.payload) throw type_error("enq needs a payload");
        if (e.payload->is_marker(marker::nullv))
            throw type_error("enq payload must not be nullv");
        value::pair_list out;
        out.emplace_back(value(int64_t{1}), *e.payload);
        for (const auto& [k, v] : q.entries())
            out.emplace_back(value(k.as_int() + 1), v);
        return value::map_of(std::move(out));
    }
    if (e.name == deq_sym) {
        value::pair_list out;
        for (const auto& [k, v] : q.entries())
            if (k.as_int() > 1) out.emplace_back(value(k.as_int() - 1), v);
        return value::map_of(std::move(out));
    }
    return q; // other events are ignored
}

int64_t queue_top(const value& q) {
    // contiguous support, so the largest key is the occupancy
    const auto& es = q.entries();
    return es.empty() ? 0 : es.back().first.as_int();
}

} // namespace

state_variable queue_variable() {
    return define(alphabet_spec::open(), value::map_of({}), queue_step);
}

bounded_queue_vars bounded_queue(int64_t c) {
    if (c < 1) throw domain_error("bounded queue needs c >= 1");
    // joint state (Q, HighWater); the high-water mark tracks the occupancy
    // just after each event, max over the empty support being 0
    auto joint = define(
        alphabet_spec::open(),
        value::tup({value::map_of({}), value(int64_t{0})}),
        [](const value& s, const event& e) {
            value q = queue_step(s.items()[0], e);
            int64_t hw = std::max(s.items()[1].as_int(), queue_top(q));
            return value::tup({std::move(q), value(hw)});
        });
    auto is_defined = [c](const value& s) {
        const value& q = s.items()[0];
        int64_t hw = s.items()[1].as_int();
        return q.map_get(value(int64_t{1})).has_value() && hw < c;
    };
    bounded_queue_vars vars;
    vars.cq = combine(
        [is_defined](std::span<const value> vs) {
            if (!is_defined(vs[0])) return unspecified;
            return *vs[0].items()[0].map_get(value(int64_t{1}));
        },
        {joint});
    vars.high_water =
        combine([](std::span<const value> vs) { return vs[0].items()[1]; }, {joint});
    vars.defined = combine(
        [is_defined](std::span<const value> vs) { return value(is_defined(vs[0])); },
        {joint});
    return vars;
}

} // namespace sv
