#include "sv/product.hpp"

namespace sv {

state_variable general_product(std::vector<state_variable> components,
                               std::vector<feedback_fn> feedbacks,
                               std::vector<trace> initial_driver_traces) {
    return state_variable::product(std::move(components), std::move(feedbacks),
                                   std::move(initial_driver_traces));
}

state_variable multi_step_product(std::vector<state_variable> components,
                                  std::vector<feedback_fn> feedbacks,
                                  std::vector<trace> initial_driver_traces) {
    return general_product(std::move(components), std::move(feedbacks),
                           std::move(initial_driver_traces));
}

state_variable cascade_product(std::vector<state_variable> components,
                               std::vector<cascade_feedback_fn> feedbacks,
                               std::vector<trace> initial_driver_traces) {
    if (components.size() != feedbacks.size())
        throw domain_error("cascade needs one feedback map per component");
    std::vector<feedback_fn> wrapped;
    wrapped.reserve(feedbacks.size());
    for (size_t i = 0; i < feedbacks.size(); ++i) {
        // component i sees only outputs i..n; lower-indexed outputs are
        // unreachable by construction
        wrapped.push_back([i, fn = std::move(feedbacks[i])](
                              const event& e, std::span<const value> outs) {
            return fn(e, outs.subspan(i));
        });
    }
    return general_product(std::move(components), std::move(wrapped),
                           std::move(initial_driver_traces));
}

namespace {

const symbol load_sym{"load"};

state_variable storage_cell() {
    // a cell's value becomes whatever the event carries
    return state_variable::base(alphabet_spec::open(), nullv,
                                [](const value&, const event& e) {
                                    if (!e.payload)
                                        throw type_error("cell event needs a payload");
                                    return *e.payload;
                                });
}

value shift_payload(const event& e) {
    if (!e.payload) throw type_error("shift register event needs a payload");
    return *e.payload;
}

} // namespace

event shift_event(int64_t r, value v) {
    return event("shift", value::tup({value(r), std::move(v)}));
}

state_variable shift_register(size_t n) {
    if (n < 1) throw domain_error("shift register needs at least one cell");
    std::vector<state_variable> cells(n, storage_cell());
    std::vector<feedback_fn> fbs;
    fbs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        fbs.push_back([i](const event& e, std::span<const value> outs) -> feedback_action {
            if (i == 0) return event(load_sym, shift_payload(e));
            return event(load_sym, outs[i - 1]);
        });
    }
    return general_product(std::move(cells), std::move(fbs));
}

state_variable bidirectional_register(size_t n) {
    if (n < 1) throw domain_error("register needs at least one cell");
    std::vector<state_variable> cells(n, storage_cell());
    std::vector<feedback_fn> fbs;
    fbs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        fbs.push_back([i, n](const event& e, std::span<const value> outs) -> feedback_action {
            const value p = shift_payload(e);
            if (!p.is(value::kind::tuple) || p.items().size() != 2)
                throw type_error("shift event payload must be (r, v): " + e.str());
            int64_t r = p.items()[0].as_int();
            if (r != 1 && r != -1)
                throw type_error("shift direction must be +1 or -1, got " +
                                 std::to_string(r));
            // cell i takes the old value of cell i-r when that cell exists,
            // otherwise the shifted-in value
            int64_t src = static_cast<int64_t>(i) - r;
            if (src >= 0 && src < static_cast<int64_t>(n))
                return event(load_sym, outs[static_cast<size_t>(src)]);
            return event(load_sym, p.items()[1]);
        });
    }
    return general_product(std::move(cells), std::move(fbs));
}

finite_state_report is_finite_state(const state_variable& p,
                                    const std::vector<event>& event_basis,
                                    size_t bound) {
    machine m = to_machine(p);
    auto r = reachable(m, event_basis, bound);
    return {r.complete, r.states.size()};
}

} // namespace sv
