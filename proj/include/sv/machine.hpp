#pragma once

#include "sv/event.hpp"
#include "sv/value.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace sv {

// Event alphabet of a machine or variable: either open (every event is
// accepted; the step rule decides what to do with it) or a closed finite
// event set. Alphabets may be infinite, so exploration operations always
// take an explicit finite event basis on top of this.
class alphabet_spec {
public:
    alphabet_spec() : events_(nullptr) {}
    static alphabet_spec open() { return {}; }
    static alphabet_spec closed(std::vector<event> events);

    bool is_open() const { return events_ == nullptr; }
    bool accepts(const event& e) const;
    const std::vector<event>& events() const; // closed alphabets only

private:
    std::shared_ptr<const std::vector<event>> events_;
};

// Generalized Moore machine (E, X, S, iota, delta, lambda). States and
// outputs are values; step and out must be pure and deterministic.
struct machine {
    alphabet_spec alphabet;
    value initial;
    std::function<value(const value&, const event&)> step;
    std::function<value(const value&)> out;
};

// M*(w): fold step over w from the initial state, then apply out.
value run(const machine& m, const trace& w);

// One application of the transition map; validates the alphabet.
value step_state(const machine& m, const value& s, const event& e);

struct reachable_result {
    std::vector<value> states; // BFS discovery order
    bool complete;             // false when max_states stopped the closure
};

// Breadth-first closure of the initial state under the basis events.
reachable_result reachable(const machine& m, const std::vector<event>& event_basis,
                           size_t max_states);

struct partition {
    std::vector<std::vector<value>> classes; // disjoint, cover explored states
    std::unordered_map<value, size_t> class_of;

    json to_json() const;
};

// Explicit finite machine: the serializable form produced by minimize and
// loadable back as an ordinary machine.
struct machine_table {
    std::vector<value> states;
    size_t initial = 0;
    std::vector<event> events;
    std::vector<std::vector<size_t>> step; // [state][event] -> state
    std::vector<value> out;

    machine to_machine() const;
    json to_json() const;
    static machine_table from_json(const json& j);
};

struct minimize_result {
    machine quotient;
    partition classes;
    machine_table table;
};

// Moore partition refinement on the reachable space: split by output, refine
// by successor class until stable. Throws bound_error when the reachable set
// does not close within max_states.
minimize_result minimize(const machine& m, const std::vector<event>& event_basis,
                         size_t max_states);

struct equivalence_result {
    bool equivalent;
    std::optional<trace> witness; // shortest distinguishing trace when false
};

// Decides M1* = M2* on all traces over the basis by breadth-first
// bisimulation on reachable state pairs. Throws bound_error if more than
// max_states pairs get explored.
equivalence_result equivalent(const machine& m1, const machine& m2,
                              const std::vector<event>& event_basis, size_t max_states);

struct word_partition {
    std::vector<std::vector<trace>> classes; // words grouped by bounded ~f
    std::unordered_map<trace, size_t> class_of;
};

// Bounded approximation of the Nerode relation for a black-box f: words up
// to word_len are grouped by equality of f on every continuation up to
// distinguisher_len. Growing distinguisher_len can only split classes.
word_partition nerode_classes_bounded(const std::function<value(const trace&)>& f,
                                      const std::vector<event>& event_basis,
                                      size_t word_len, size_t distinguisher_len);

} // namespace sv
