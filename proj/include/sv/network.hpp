#pragma once

#include "sv/rng.hpp"
#include "sv/variable.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sv {

// ---- messages --------------------------------------------------------------

// Data or acknowledgment message. The id is opaque here: protocols put a
// plain value in it for data, a (data id, node) pair for per-message acks,
// or a sequence number for cyclic acks. nullm is a marker value, never a
// message.
struct message {
    enum class kind_t : uint8_t { data, ack };
    kind_t kind = kind_t::data;
    value id;

    friend bool operator==(const message& a, const message& b) {
        return a.kind == b.kind && a.id == b.id;
    }
    friend bool operator<(const message& a, const message& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.id < b.id;
    }

    value to_value() const;
    static std::optional<message> from_value(const value& v);
    std::string str() const;
};

// Message set that remembers arrival order; the canonical value form is the
// sorted set.
class msg_set {
public:
    bool insert(const message& m);
    bool contains(const message& m) const { return sorted_.contains(m); }
    size_t size() const { return sorted_.size(); }
    const std::vector<message>& in_order() const { return order_; }
    value to_value() const;

private:
    std::set<message> sorted_;
    std::vector<message> order_;
};

// ---- node events and node state variables ----------------------------------

event rx_event(const message& m);
event tx_event();
event set_t_event(const value& message_or_nullm);

extern const symbol rx_sym;
extern const symbol tx_sym;
extern const symbol set_t_sym;

// The per-node variables of the model as honest state variables over the
// node trace: value is the tuple (Id, T, R, S). Id is the first event's
// name; T follows set_t events; R collects rx'd messages; S collects the
// pre-event T on each tx with T a message. The network runtime maintains the
// same data incrementally and tests hold the two equal.
state_variable node_joint_variable();
state_variable node_id_variable();
state_variable node_t_variable();
state_variable node_r_variable();
state_variable node_s_variable();

// ---- behaviors --------------------------------------------------------------

struct node_runtime;

struct node_view {
    const node_runtime& node;
    size_t step; // network step count
};

// Protocol logic. Behaviors only influence the node through the one local
// event they may append when the schedule gives the node a local-action
// slot; the runtime derives everything else from the trace.
//
// desired_t reports which message (or nullm) the node wants to transmit
// given its current knowledge; the runtime appends set_t when that differs
// from the current T. override_local lets fault injectors append an
// arbitrary local event instead.
class node_behavior {
public:
    virtual ~node_behavior() = default;
    virtual value desired_t(const node_view& v) const = 0;
    virtual std::optional<event> override_local(const node_view&) const { return std::nullopt; }

    // true when desired_t only depends on (R, S, crossed step thresholds,
    // step/4 rotation bucket), which lets the runtime memoize it
    virtual bool cacheable() const { return true; }
    // step thresholds at which desired_t may change (sorted); used for the
    // memoization key
    virtual const std::vector<size_t>& step_thresholds() const;
};

// ---- network state -----------------------------------------------------------

struct node_runtime {
    symbol id;
    trace u; // the local trace u_n
    msg_set received;
    msg_set sent;
    value want = nullm; // current T
    std::shared_ptr<const node_behavior> behavior;

    // memoization of desired_t (soundness guaranteed by node_behavior
    // contract); not part of the observable state
    size_t cache_r = SIZE_MAX;
    size_t cache_s = SIZE_MAX;
    size_t cache_thresholds = SIZE_MAX;
    size_t cache_rotation = SIZE_MAX;
    value cache_desired = nullm;
};

struct network_state {
    std::vector<node_runtime> nodes; // declared order
    size_t step_count = 0;

    size_t index_of(symbol name) const; // throws domain_error when unknown
    const node_runtime* find(symbol name) const;
    const node_runtime& node(symbol name) const { return nodes[index_of(name)]; }
};

// Each node starts with the one-event trace holding its own name.
network_state init_network(const std::vector<symbol>& names,
                           const std::vector<std::shared_ptr<const node_behavior>>& behaviors);

// Rebuild a state from explicit local traces (negative fixtures, replay).
network_state network_from_traces(const std::vector<symbol>& names,
                                  const std::vector<std::shared_ptr<const node_behavior>>& behaviors,
                                  const std::vector<trace>& traces);

// ---- schedule and stepping ---------------------------------------------------

struct schedule_entry {
    std::optional<symbol> transmitter;
    std::vector<symbol> receivers;
    std::vector<symbol> local_actors;

    json to_json() const;
    static schedule_entry from_json(const json& j);
};

// What one network step appended, for monitors and logs.
struct step_delta {
    std::optional<symbol> transmitter;
    std::optional<message> transmitted;
    std::vector<std::pair<symbol, event>> appended; // declared node order
};

// One network step: the designated transmitter appends tx, every designated
// receiver appends rx of the transmitter's pre-step T, every scheduled local
// actor appends the one event its behavior picks, everyone else holds.
// Validates the entry against the axioms (transmitter must want to send;
// receivers need a transmitter; nobody acts twice).
network_state network_step(network_state st, const schedule_entry& entry,
                           step_delta* delta = nullptr);

// Unreliable-broadcast adversary: picks a transmitter uniformly among nodes
// with T in Messages (or none when there is none), delivers to every other
// node independently with the given probability, and gives every uninvolved
// node a local-action slot.
schedule_entry random_schedule(const network_state& st, rng& gen, double delivery_probability);

// ---- derived sets and monitors -----------------------------------------------

struct derived_sets {
    std::vector<symbol> names;
    std::vector<msg_set> received; // parallel to names
    std::vector<msg_set> sent;
};

// Pure fold of the R/S recursions over each local trace.
derived_sets derive_sets(const network_state& st);

struct net_violation {
    std::string monitor;
    std::string detail;
    json witness;
};

// No spurious messages: every received message was sent by someone.
std::optional<net_violation> check_no_spurious(const network_state& st);

// Incremental per-step monitor; equivalent to running its full check after
// every step for monotone state (which R and S are).
class step_monitor {
public:
    virtual ~step_monitor() = default;
    virtual std::string_view name() const = 0;
    virtual std::optional<net_violation> after_step(const network_state& st,
                                                    const step_delta& d) = 0;
};

std::unique_ptr<step_monitor> make_no_spurious_monitor();
std::unique_ptr<step_monitor> make_rx_tx_pairing_monitor();

} // namespace sv
