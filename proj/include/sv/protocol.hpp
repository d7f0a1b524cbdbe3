#pragma once

#include "sv/network.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace sv {

// Receiver group with its turn order: pi(i) = order[i mod k]. The order is a
// bijection from {0..k-1} onto the group.
class group_config {
public:
    static group_config of(std::vector<symbol> order); // validates nonempty, distinct

    size_t k() const { return order_.size(); }
    symbol pi(size_t i) const { return order_[i % order_.size()]; }
    bool contains(symbol n) const;
    const std::vector<symbol>& members() const { return order_; }

private:
    std::vector<symbol> order_;
};

// ---- message constructors ----------------------------------------------------

message data_message(value id);
// per-message ack a_{d,n}: id = (data id, node)
message simple_ack(const value& data_id, symbol node);
std::optional<std::pair<value, symbol>> simple_ack_parts(const message& m);
// sequence-numbered messages d_i / a_i of the cyclic protocol
message seq_data(int64_t i);
message seq_ack(int64_t i);
std::optional<int64_t> seq_data_number(const message& m);
std::optional<int64_t> seq_ack_number(const message& m);

// ---- plans and behaviors -------------------------------------------------------

// Who originates which data message, and from which step on.
struct plan_item {
    symbol origin;
    value id; // plain value for simple/none, integer sequence number for cyclic
    size_t earliest = 0;
};

enum class send_policy { eager, single_shot };

// Protocol "none": nodes rotate through their assigned data and never ack.
std::shared_ptr<const node_behavior> make_none_behavior(symbol self,
                                                        const std::vector<plan_item>& plan,
                                                        send_policy policy);

// Per-message acks: a node may transmit a_{d,n} only when it has received d
// and is n itself or is relaying an ack it received.
std::shared_ptr<const node_behavior> make_simple_ack_behavior(
    symbol self, group_config group, std::vector<symbol> all_nodes,
    const std::vector<plan_item>& plan, send_policy policy);

// Cyclic acks: a_i needs the turn (pi(i mod k) = Id) or a relay, d_i
// received, and every earlier d_j and a_j received. Sequence numbers must be
// contiguous from 0 in the plan (the scenario-level allocator).
std::shared_ptr<const node_behavior> make_cyclic_ack_behavior(
    symbol self, group_config group, const std::vector<plan_item>& plan, send_policy policy);

// Constraint predicates, exposed for tests: may this node set T to the ack
// right now?
bool simple_ack_permitted(const node_runtime& node, const value& data_id, symbol acker);
bool cyclic_ack_permitted(const node_runtime& node, const group_config& group, int64_t i);

// ---- faults -------------------------------------------------------------------

enum class fault_kind { ack_without_data, out_of_turn_ack, spurious_rx };

// Wraps a behavior: force-transmits a forbidden message (or injects a ghost
// receive) once, then defers to the base behavior.
std::shared_ptr<const node_behavior> make_faulty(std::shared_ptr<const node_behavior> base,
                                                 fault_kind kind, message payload);

// ---- commit predicates ----------------------------------------------------------

// Commit(G, m) of the simple protocol: every group member's ack is in R.
bool commit_simple(const group_config& group, const value& data_id, const msg_set& received);

// Cyclic commit evidence for d_i: a_{i+k} in R.
bool commit_cyclic(const group_config& group, int64_t i, const msg_set& received);

// ---- full-state checkers and per-step monitors -----------------------------------

// a_{d,n'} in R(n) implies d in R(n').
std::optional<net_violation> check_ack_lemma(const network_state& st);

// commit_simple at any node implies group-wide receipt of the data message.
std::optional<net_violation> check_commit_simple_soundness(const network_state& st,
                                                           const group_config& group);

// a_{i+k} in R(n) implies every group member received d_i.
std::optional<net_violation> check_cyclic_soundness(const network_state& st,
                                                    const group_config& group);

std::unique_ptr<step_monitor> make_ack_lemma_monitor();
std::unique_ptr<step_monitor> make_simple_commit_monitor(group_config group);
std::unique_ptr<step_monitor> make_cyclic_soundness_monitor(group_config group);
// first network-wide tx of a_i must come from pi(i mod k)
std::unique_ptr<step_monitor> make_turn_discipline_monitor(group_config group);

} // namespace sv
