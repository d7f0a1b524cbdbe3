#include "sv/protocol.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace sv {

group_config group_config::of(std::vector<symbol> order) {
    if (order.empty()) throw domain_error("group must be nonempty");
    std::set<symbol> seen;
    for (auto n : order)
        if (!seen.insert(n).second)
            throw domain_error("duplicate group member: " + n.str());
    group_config g;
    g.order_ = std::move(order);
    return g;
}

bool group_config::contains(symbol n) const {
    return std::find(order_.begin(), order_.end(), n) != order_.end();
}

// ---- message constructors ----------------------------------------------------

message data_message(value id) { return {message::kind_t::data, std::move(id)}; }

message simple_ack(const value& data_id, symbol node) {
    return {message::kind_t::ack, value::tup({data_id, value(node)})};
}

std::optional<std::pair<value, symbol>> simple_ack_parts(const message& m) {
    if (m.kind != message::kind_t::ack || !m.id.is(value::kind::tuple)) return std::nullopt;
    const auto& xs = m.id.items();
    if (xs.size() != 2 || !xs[1].is(value::kind::symbol_)) return std::nullopt;
    return std::make_pair(xs[0], xs[1].as_symbol());
}

message seq_data(int64_t i) { return {message::kind_t::data, value(i)}; }
message seq_ack(int64_t i) { return {message::kind_t::ack, value(i)}; }

std::optional<int64_t> seq_data_number(const message& m) {
    if (m.kind != message::kind_t::data || !m.id.is(value::kind::integer)) return std::nullopt;
    return m.id.as_int();
}

std::optional<int64_t> seq_ack_number(const message& m) {
    if (m.kind != message::kind_t::ack || !m.id.is(value::kind::integer)) return std::nullopt;
    return m.id.as_int();
}

// ---- commit predicates ----------------------------------------------------------

bool commit_simple(const group_config& group, const value& data_id, const msg_set& received) {
    for (auto n : group.members())
        if (!received.contains(simple_ack(data_id, n))) return false;
    return true;
}

bool commit_cyclic(const group_config& group, int64_t i, const msg_set& received) {
    return received.contains(seq_ack(i + static_cast<int64_t>(group.k())));
}

// ---- constraint predicates -------------------------------------------------------

bool simple_ack_permitted(const node_runtime& node, const value& data_id, symbol acker) {
    if (!node.received.contains(data_message(data_id))) return false;
    return node.id == acker || node.received.contains(simple_ack(data_id, acker));
}

bool cyclic_ack_permitted(const node_runtime& node, const group_config& group, int64_t i) {
    if (i < 0) return false;
    bool turn = group.pi(static_cast<size_t>(i) % group.k()) == node.id ||
                node.received.contains(seq_ack(i));
    if (!turn) return false;
    for (int64_t j = 0; j <= i; ++j)
        if (!node.received.contains(seq_data(j))) return false;
    for (int64_t j = 0; j < i; ++j)
        if (!node.received.contains(seq_ack(j))) return false;
    return true;
}

// ---- behaviors --------------------------------------------------------------------

namespace {

std::vector<size_t> own_thresholds(symbol self, const std::vector<plan_item>& plan) {
    std::vector<size_t> t;
    for (const auto& it : plan)
        if (it.origin == self) t.push_back(it.earliest);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

// picks the rotation-bucket element; empty pool means nothing to say
value pick(const std::vector<message>& pool, size_t step) {
    if (pool.empty()) return nullm;
    return pool[(step / 4) % pool.size()].to_value();
}

// Protocol "none": rotate through the assigned data so the network stays
// busy; nothing is ever acknowledged.
class none_behavior_t final : public node_behavior {
public:
    none_behavior_t(symbol self, const std::vector<plan_item>& plan, send_policy policy)
        : policy_(policy) {
        for (const auto& it : plan)
            if (it.origin == self) own_.push_back(it);
        thresholds_ = own_thresholds(self, plan);
    }
    const std::vector<size_t>& step_thresholds() const override { return thresholds_; }

    value desired_t(const node_view& v) const override {
        std::vector<message> pool;
        for (const auto& it : own_) {
            if (it.earliest > v.step) continue;
            message d = data_message(it.id);
            if (policy_ == send_policy::single_shot && v.node.sent.contains(d)) continue;
            pool.push_back(d);
        }
        return pick(pool, v.step);
    }

private:
    std::vector<plan_item> own_;
    std::vector<size_t> thresholds_;
    send_policy policy_;
};

class simple_behavior_t final : public node_behavior {
public:
    simple_behavior_t(symbol self, group_config group, std::vector<symbol> all_nodes,
                      const std::vector<plan_item>& plan, send_policy policy)
        : self_(self), group_(std::move(group)), all_nodes_(std::move(all_nodes)),
          plan_(plan), policy_(policy), thresholds_(own_thresholds(self, plan)) {}

    const std::vector<size_t>& step_thresholds() const override { return thresholds_; }

    value desired_t(const node_view& v) const override {
        const node_runtime& nr = v.node;
        // fresh items win outright: unsent own data, then unsent own acks,
        // then unsent relays
        for (const auto& it : plan_) {
            if (it.origin != self_ || it.earliest > v.step) continue;
            if (commit_simple(group_, it.id, nr.received)) continue;
            message d = data_message(it.id);
            if (!nr.sent.contains(d)) return d.to_value();
        }
        for (const auto& it : plan_) {
            if (!nr.received.contains(data_message(it.id))) continue;
            if (commit_simple(group_, it.id, nr.received)) continue;
            message a = simple_ack(it.id, self_);
            if (!nr.sent.contains(a)) return a.to_value();
        }
        for (const auto& it : plan_) {
            if (!nr.received.contains(data_message(it.id))) continue;
            for (auto n : all_nodes_) {
                if (n == self_) continue;
                message a = simple_ack(it.id, n);
                if (nr.received.contains(a) && !nr.sent.contains(a)) return a.to_value();
            }
        }
        if (policy_ == send_policy::single_shot) return nullm;
        // nothing fresh: rotate over every useful retransmission so a lossy
        // network cannot starve any one peer forever (data retransmission is
        // unconstrained, so relaying received data is allowed too)
        std::vector<message> pool;
        for (const auto& it : plan_) {
            if (it.origin != self_ || it.earliest > v.step) continue;
            if (!commit_simple(group_, it.id, nr.received))
                pool.push_back(data_message(it.id));
        }
        for (const auto& it : plan_) {
            if (!nr.received.contains(data_message(it.id))) continue;
            if (commit_simple(group_, it.id, nr.received)) continue;
            pool.push_back(simple_ack(it.id, self_));
            for (auto n : all_nodes_) {
                if (n == self_) continue;
                message a = simple_ack(it.id, n);
                if (nr.received.contains(a)) pool.push_back(a);
            }
        }
        for (const auto& it : plan_) {
            message d = data_message(it.id);
            if (it.origin != self_ && nr.received.contains(d) &&
                !commit_simple(group_, it.id, nr.received))
                pool.push_back(d);
        }
        return pick(pool, v.step);
    }

private:
    symbol self_;
    group_config group_;
    std::vector<symbol> all_nodes_;
    std::vector<plan_item> plan_;
    send_policy policy_;
    std::vector<size_t> thresholds_;
};

class cyclic_behavior_t final : public node_behavior {
public:
    cyclic_behavior_t(symbol self, group_config group, const std::vector<plan_item>& plan,
                      send_policy policy)
        : self_(self), group_(std::move(group)), policy_(policy),
          thresholds_(own_thresholds(self, plan)) {
        // the scenario-level allocator: contiguous unique sequence numbers
        std::set<int64_t> seqs;
        for (const auto& it : plan) {
            if (!it.id.is(value::kind::integer))
                throw domain_error("cyclic plan ids must be sequence numbers");
            if (!seqs.insert(it.id.as_int()).second)
                throw domain_error("reused sequence number " + it.id.str());
        }
        for (const auto& it : plan) {
            int64_t i = it.id.as_int();
            if (i < 0 || static_cast<size_t>(i) >= plan.size())
                throw domain_error("cyclic sequence numbers must be contiguous from 0");
        }
        max_seq_ = plan.empty() ? -1 : static_cast<int64_t>(plan.size()) - 1;
        for (const auto& it : plan)
            if (it.origin == self) own_.push_back(it);
        std::sort(own_.begin(), own_.end(), [](const plan_item& a, const plan_item& b) {
            return a.id.as_int() < b.id.as_int();
        });
    }

    const std::vector<size_t>& step_thresholds() const override { return thresholds_; }

    value desired_t(const node_view& v) const override {
        const node_runtime& nr = v.node;
        int64_t frontier = 0;
        while (frontier <= max_seq_ && nr.received.contains(seq_ack(frontier))) ++frontier;

        // fresh items first: pass a just-received ack on, take the turn,
        // originate new data
        if (frontier >= 1 && cyclic_ack_permitted(nr, group_, frontier - 1)) {
            message a = seq_ack(frontier - 1);
            if (!nr.sent.contains(a)) return a.to_value();
        }
        if (frontier <= max_seq_ && cyclic_ack_permitted(nr, group_, frontier)) {
            message a = seq_ack(frontier);
            if (!nr.sent.contains(a)) return a.to_value();
        }
        for (const auto& it : own_) {
            if (it.earliest > v.step) continue;
            int64_t i = it.id.as_int();
            if (nr.received.contains(seq_ack(i))) continue; // the cycle took it
            message d = seq_data(i);
            if (!nr.sent.contains(d)) return d.to_value();
        }
        if (policy_ == send_policy::single_shot) return nullm;
        // recovery rotation: the frontier ack, every relayable older ack,
        // own uncommitted data, and every known data message. Stuck peers
        // may be missing any of these; rotating re-offers each forever.
        std::vector<message> pool;
        if (frontier <= max_seq_ && cyclic_ack_permitted(nr, group_, frontier))
            pool.push_back(seq_ack(frontier));
        for (int64_t j = 0; j < frontier; ++j)
            if (cyclic_ack_permitted(nr, group_, j)) pool.push_back(seq_ack(j));
        for (const auto& it : own_) {
            if (it.earliest > v.step) continue;
            int64_t i = it.id.as_int();
            if (!nr.received.contains(seq_ack(i))) pool.push_back(seq_data(i));
        }
        for (int64_t j = 0; j <= max_seq_; ++j)
            if (nr.received.contains(seq_data(j))) pool.push_back(seq_data(j));
        return pick(pool, v.step);
    }

private:
    symbol self_;
    group_config group_;
    std::vector<plan_item> own_;
    int64_t max_seq_ = -1;
    send_policy policy_;
    std::vector<size_t> thresholds_;
};

class faulty_behavior_t final : public node_behavior {
public:
    faulty_behavior_t(std::shared_ptr<const node_behavior> base, fault_kind kind, message payload)
        : base_(std::move(base)), kind_(kind), payload_(std::move(payload)) {}

    value desired_t(const node_view& v) const override {
        if (kind_ != fault_kind::spurious_rx && !v.node.sent.contains(payload_))
            return payload_.to_value();
        return base_->desired_t(v);
    }
    std::optional<event> override_local(const node_view& v) const override {
        if (kind_ == fault_kind::spurious_rx && !v.node.received.contains(payload_))
            return rx_event(payload_);
        return base_->override_local(v);
    }
    bool cacheable() const override { return base_->cacheable(); }
    const std::vector<size_t>& step_thresholds() const override {
        return base_->step_thresholds();
    }

private:
    std::shared_ptr<const node_behavior> base_;
    fault_kind kind_;
    message payload_;
};

} // namespace

std::shared_ptr<const node_behavior> make_none_behavior(symbol self,
                                                        const std::vector<plan_item>& plan,
                                                        send_policy policy) {
    return std::make_shared<none_behavior_t>(self, plan, policy);
}

std::shared_ptr<const node_behavior> make_simple_ack_behavior(
    symbol self, group_config group, std::vector<symbol> all_nodes,
    const std::vector<plan_item>& plan, send_policy policy) {
    return std::make_shared<simple_behavior_t>(self, std::move(group), std::move(all_nodes),
                                               plan, policy);
}

std::shared_ptr<const node_behavior> make_cyclic_ack_behavior(
    symbol self, group_config group, const std::vector<plan_item>& plan, send_policy policy) {
    return std::make_shared<cyclic_behavior_t>(self, std::move(group), plan, policy);
}

std::shared_ptr<const node_behavior> make_faulty(std::shared_ptr<const node_behavior> base,
                                                 fault_kind kind, message payload) {
    return std::make_shared<faulty_behavior_t>(std::move(base), kind, std::move(payload));
}

// ---- full checkers -------------------------------------------------------------------

std::optional<net_violation> check_ack_lemma(const network_state& st) {
    auto ds = derive_sets(st);
    for (size_t n = 0; n < ds.names.size(); ++n) {
        for (const auto& m : ds.received[n].in_order()) {
            auto parts = simple_ack_parts(m);
            if (!parts) continue;
            const auto& [data_id, acker] = *parts;
            const node_runtime* other = st.find(acker);
            if (!other)
                return net_violation{"ack-lemma",
                                     "ack " + m.str() + " names unknown node " + acker.str(),
                                     json{{"node", ds.names[n].str()},
                                          {"ack", m.to_value().to_json()}}};
            size_t oi = st.index_of(acker);
            if (!ds.received[oi].contains(data_message(data_id)))
                return net_violation{
                    "ack-lemma",
                    "a_{" + data_id.str() + "," + acker.str() + "} in R(" +
                        ds.names[n].str() + ") but " + acker.str() + " never received the data",
                    json{{"node", ds.names[n].str()},
                         {"data", data_id.to_json()},
                         {"acker", acker.str()}}};
        }
    }
    return std::nullopt;
}

std::optional<net_violation> check_commit_simple_soundness(const network_state& st,
                                                           const group_config& group) {
    auto ds = derive_sets(st);
    for (size_t n = 0; n < ds.names.size(); ++n) {
        std::set<value> data_ids;
        for (const auto& m : ds.received[n].in_order()) {
            if (m.kind == message::kind_t::data) data_ids.insert(m.id);
            if (auto parts = simple_ack_parts(m)) data_ids.insert(parts->first);
        }
        for (const auto& d : data_ids) {
            if (!commit_simple(group, d, ds.received[n])) continue;
            for (auto member : group.members()) {
                if (!ds.received[st.index_of(member)].contains(data_message(d)))
                    return net_violation{
                        "commit-simple-soundness",
                        "commit(" + d.str() + ") holds at " + ds.names[n].str() + " but " +
                            member.str() + " never received the data",
                        json{{"node", ds.names[n].str()},
                             {"data", d.to_json()},
                             {"missing", member.str()}}};
            }
        }
    }
    return std::nullopt;
}

std::optional<net_violation> check_cyclic_soundness(const network_state& st,
                                                    const group_config& group) {
    auto ds = derive_sets(st);
    int64_t k = static_cast<int64_t>(group.k());
    for (size_t n = 0; n < ds.names.size(); ++n) {
        for (const auto& m : ds.received[n].in_order()) {
            auto j = seq_ack_number(m);
            if (!j || *j < k) continue;
            int64_t i = *j - k;
            for (auto member : group.members()) {
                if (!ds.received[st.index_of(member)].contains(seq_data(i)))
                    return net_violation{
                        "cyclic-soundness",
                        "a_" + std::to_string(*j) + " in R(" + ds.names[n].str() +
                            ") but " + member.str() + " never received d_" + std::to_string(i),
                        json{{"node", ds.names[n].str()},
                             {"i", i},
                             {"missing", member.str()}}};
            }
        }
    }
    return std::nullopt;
}

// ---- step monitors --------------------------------------------------------------------

namespace {

class ack_lemma_monitor final : public step_monitor {
public:
    std::string_view name() const override { return "ack-lemma"; }
    std::optional<net_violation> after_step(const network_state& st,
                                            const step_delta& d) override {
        for (const auto& [node, e] : d.appended) {
            if (e.name != rx_sym || !e.payload) continue;
            auto m = message::from_value(*e.payload);
            if (!m) continue;
            auto parts = simple_ack_parts(*m);
            if (!parts) continue;
            const node_runtime* other = st.find(parts->second);
            if (!other || !other->received.contains(data_message(parts->first)))
                return net_violation{
                    std::string(name()),
                    "a_{" + parts->first.str() + "," + parts->second.str() + "} in R(" +
                        node.str() + ") but " + parts->second.str() +
                        " never received the data",
                    json{{"node", node.str()},
                         {"data", parts->first.to_json()},
                         {"acker", parts->second.str()}}};
        }
        return std::nullopt;
    }
};

class simple_commit_monitor final : public step_monitor {
public:
    explicit simple_commit_monitor(group_config g) : group_(std::move(g)) {}
    std::string_view name() const override { return "commit-simple-soundness"; }
    std::optional<net_violation> after_step(const network_state& st,
                                            const step_delta& d) override {
        // commit only flips to true when an ack arrives, so checking the
        // affected data message on each ack receipt covers every step
        for (const auto& [node, e] : d.appended) {
            if (e.name != rx_sym || !e.payload) continue;
            auto m = message::from_value(*e.payload);
            if (!m) continue;
            auto parts = simple_ack_parts(*m);
            if (!parts) continue;
            const node_runtime& nr = st.node(node);
            if (!commit_simple(group_, parts->first, nr.received)) continue;
            for (auto member : group_.members()) {
                const node_runtime* other = st.find(member);
                if (!other || !other->received.contains(data_message(parts->first)))
                    return net_violation{
                        std::string(name()),
                        "commit(" + parts->first.str() + ") holds at " + node.str() +
                            " but " + member.str() + " never received the data",
                        json{{"node", node.str()},
                             {"data", parts->first.to_json()},
                             {"missing", member.str()}}};
            }
        }
        return std::nullopt;
    }

private:
    group_config group_;
};

class cyclic_soundness_monitor final : public step_monitor {
public:
    explicit cyclic_soundness_monitor(group_config g) : group_(std::move(g)) {}
    std::string_view name() const override { return "cyclic-soundness"; }
    std::optional<net_violation> after_step(const network_state& st,
                                            const step_delta& d) override {
        int64_t k = static_cast<int64_t>(group_.k());
        for (const auto& [node, e] : d.appended) {
            if (e.name != rx_sym || !e.payload) continue;
            auto m = message::from_value(*e.payload);
            if (!m) continue;
            auto j = seq_ack_number(*m);
            if (!j || *j < k) continue;
            int64_t i = *j - k;
            for (auto member : group_.members()) {
                const node_runtime* other = st.find(member);
                if (!other || !other->received.contains(seq_data(i)))
                    return net_violation{
                        std::string(name()),
                        "a_" + std::to_string(*j) + " in R(" + node.str() + ") but " +
                            member.str() + " never received d_" + std::to_string(i),
                        json{{"node", node.str()}, {"i", i}, {"missing", member.str()}}};
            }
        }
        return std::nullopt;
    }

private:
    group_config group_;
};

class turn_discipline_monitor final : public step_monitor {
public:
    explicit turn_discipline_monitor(group_config g) : group_(std::move(g)) {}
    std::string_view name() const override { return "turn-discipline"; }
    std::optional<net_violation> after_step(const network_state&,
                                            const step_delta& d) override {
        if (!d.transmitted || !d.transmitter) return std::nullopt;
        auto j = seq_ack_number(*d.transmitted);
        if (!j || *j < 0) return std::nullopt;
        if (!first_tx_seen_.insert(*j).second) return std::nullopt;
        symbol expected = group_.pi(static_cast<size_t>(*j) % group_.k());
        if (*d.transmitter != expected)
            return net_violation{
                std::string(name()),
                "first tx of a_" + std::to_string(*j) + " was by " + d.transmitter->str() +
                    ", expected " + expected.str(),
                json{{"i", *j},
                     {"transmitter", d.transmitter->str()},
                     {"expected", expected.str()}}};
        return std::nullopt;
    }

private:
    group_config group_;
    std::set<int64_t> first_tx_seen_;
};

} // namespace

std::unique_ptr<step_monitor> make_ack_lemma_monitor() {
    return std::make_unique<ack_lemma_monitor>();
}

std::unique_ptr<step_monitor> make_simple_commit_monitor(group_config group) {
    return std::make_unique<simple_commit_monitor>(std::move(group));
}

std::unique_ptr<step_monitor> make_cyclic_soundness_monitor(group_config group) {
    return std::make_unique<cyclic_soundness_monitor>(std::move(group));
}

std::unique_ptr<step_monitor> make_turn_discipline_monitor(group_config group) {
    return std::make_unique<turn_discipline_monitor>(std::move(group));
}

} // namespace sv
