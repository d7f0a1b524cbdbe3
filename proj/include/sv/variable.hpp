#pragma once

#include "sv/event.hpp"
#include "sv/machine.hpp"
#include "sv/value.hpp"

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace sv {

using transition_fn = std::function<value(const value&, const event&)>;
using combine_fn = std::function<value(std::span<const value>)>;

// Per-component reaction of a product to one outer event: do nothing, feed
// one event, or feed a finite sequence (the multi-step variant).
struct hold_t {
    friend bool operator==(hold_t, hold_t) { return true; }
};
inline constexpr hold_t hold{};
using feedback_action = std::variant<hold_t, event, std::vector<event>>;

// phi_i: (outer event, pre-event outputs of all components) -> action.
using feedback_fn = std::function<feedback_action(const event&, std::span<const value>)>;

// Live evaluation state of a variable: holds the current value and consumes
// events one at a time, so eval over a trace is a single O(|w|) fold.
class var_state {
public:
    virtual ~var_state() = default;
    virtual value current() const = 0;
    virtual void advance(const event& e) = 0;
    virtual std::unique_ptr<var_state> clone() const = 0;

    // Machine-state encoding of this runtime state. Product states encode as
    // the tuple of component states (drivers carry no extra information for
    // the outputs), which is what keeps products of finite-state components
    // finite-state when lowered.
    virtual value encode() const = 0;

    // Product states expose their driver traces for inspection.
    virtual const std::vector<trace>* driver_traces() const { return nullptr; }
};

struct var_node;

// A value-valued function of traces, represented by (initial value,
// after-event rule) or by one of the derived forms: pointwise combination,
// substitution of a trace-valued driver, the after shift, or a product with
// output feedback. Immutable and cheaply copyable.
class state_variable {
public:
    state_variable() = default;
    bool valid() const { return node_ != nullptr; }

    const alphabet_spec& alphabet() const;
    value initial() const;

    std::unique_ptr<var_state> instantiate() const;
    std::unique_ptr<var_state> state_from_value(const value& s) const;

    static state_variable base(alphabet_spec a, value initial_value, transition_fn rule);
    static state_variable combined(combine_fn op, std::vector<state_variable> children);
    static state_variable substituted(state_variable driver, state_variable inner);
    static state_variable shifted(state_variable inner, event e);
    static state_variable product(std::vector<state_variable> components,
                                  std::vector<feedback_fn> feedbacks,
                                  std::vector<trace> initial_drivers,
                                  alphabet_spec outer = alphabet_spec::open());

    const var_node& node() const { return *node_; }

private:
    explicit state_variable(std::shared_ptr<const var_node> n) : node_(std::move(n)) {}
    std::shared_ptr<const var_node> node_;
};

// initial y = F(nulls), AFTER{e} y = F(x.e): a variable defined by its
// initial value and after-event equation.
state_variable define(alphabet_spec alphabet, value initial_value, transition_fn rule);

// F(w): fold the variable's recursion over w. Errors raised by transition
// rules or combine ops are rethrown tagged with the trace position.
value eval(const state_variable& y, const trace& w);

// AFTER{e} as a variable former: eval(after(y,e), w) = eval(y, w.e).
state_variable after(const state_variable& y, const event& e);

// SUB{u} y: eval(substitute(u,y), w) = eval(y, eval(u,w)); u must be
// trace-valued over y's alphabet and may only extend its value.
state_variable substitute(const state_variable& u, const state_variable& y);

// Pointwise combination: eval = op(eval(y1,w), ..., eval(yn,w)).
state_variable combine(combine_fn op, std::vector<state_variable> children);

// Lower a variable to a generalized Moore machine with value-encoded states:
// run(to_machine(y), w) = eval(y, w).
machine to_machine(const state_variable& y);

} // namespace sv
