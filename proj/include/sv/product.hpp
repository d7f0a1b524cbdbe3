#pragma once

#include "sv/variable.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sv {

// phi_i for a cascade: sees only the outputs of components i..n (its own
// suffix of the output tuple), so information flows one way.
using cascade_feedback_fn =
    std::function<feedback_action(const event&, std::span<const value>)>;

// General product of state variables with output feedback: every feedback
// map reads the pre-event outputs of all components, then each driver
// extends by the chosen action. The resulting variable's value is the tuple
// of component outputs.
state_variable general_product(std::vector<state_variable> components,
                               std::vector<feedback_fn> feedbacks,
                               std::vector<trace> initial_driver_traces = {});

// Multi-step variant: actions may be finite event sequences; drivers extend
// by concatenation. (general_product already accepts sequence actions; this
// name documents intent at call sites.)
state_variable multi_step_product(std::vector<state_variable> components,
                                  std::vector<feedback_fn> feedbacks,
                                  std::vector<trace> initial_driver_traces = {});

// Loop-free product: feedback map i is handed only the output slice i..n.
state_variable cascade_product(std::vector<state_variable> components,
                               std::vector<cascade_feedback_fn> feedbacks,
                               std::vector<trace> initial_driver_traces = {});

// n storage cells; every input event must carry a payload, which shifts in
// at cell 1 while each later cell takes its left neighbour's old value.
// Unfilled cells hold nullv.
state_variable shift_register(size_t n);

// Cells shift right on (+1, v) events and left on (-1, v): cell i takes the
// old value of cell i-r when that index exists, else loads v.
state_variable bidirectional_register(size_t n);

// Event carrying (r, v) for the bidirectional register.
event shift_event(int64_t r, value v);

struct finite_state_report {
    bool finite = false; // reachable closure completed within the bound
    size_t state_count = 0;
};

// Lowers the variable and runs the bounded reachable closure.
finite_state_report is_finite_state(const state_variable& p,
                                    const std::vector<event>& event_basis,
                                    size_t bound);

} // namespace sv
