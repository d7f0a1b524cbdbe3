#include "sv/network.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace sv {

const symbol rx_sym{"rx"};
const symbol tx_sym{"tx"};
const symbol set_t_sym{"set_t"};

namespace {
const symbol data_sym{"data"};
const symbol ack_sym{"ack"};
} // namespace

value message::to_value() const {
    return value::tup({value(kind == kind_t::data ? data_sym : ack_sym), id});
}

std::optional<message> message::from_value(const value& v) {
    if (!v.is(value::kind::tuple) || v.items().size() != 2) return std::nullopt;
    const auto& xs = v.items();
    if (!xs[0].is(value::kind::symbol_)) return std::nullopt;
    message m;
    if (xs[0].as_symbol() == data_sym)
        m.kind = kind_t::data;
    else if (xs[0].as_symbol() == ack_sym)
        m.kind = kind_t::ack;
    else
        return std::nullopt;
    m.id = xs[1];
    return m;
}

std::string message::str() const {
    return (kind == kind_t::data ? "data:" : "ack:") + id.str();
}

bool msg_set::insert(const message& m) {
    if (!sorted_.insert(m).second) return false;
    order_.push_back(m);
    return true;
}

value msg_set::to_value() const {
    value::list xs;
    xs.reserve(sorted_.size());
    for (const auto& m : sorted_) xs.push_back(m.to_value());
    return value::set_of(std::move(xs));
}

event rx_event(const message& m) { return event(rx_sym, m.to_value()); }
event tx_event() { return event(tx_sym); }
event set_t_event(const value& message_or_nullm) { return event(set_t_sym, message_or_nullm); }

// ---- node state variables ----------------------------------------------------

state_variable node_joint_variable() {
    // state tuple (Id, T, R, S), folded exactly by the written recursions;
    // S picks up the pre-event T
    return define(
        alphabet_spec::open(),
        value::tup({nullv, nullm, value::set_of({}), value::set_of({})}),
        [](const value& s, const event& e) {
            const auto& xs = s.items();
            value id = xs[0], t = xs[1], r = xs[2], snt = xs[3];
            if (id.is_marker(marker::nullv)) {
                // first event carries the node's name
                return value::tup({value(e.name), t, r, snt});
            }
            if (e.name == rx_sym && e.payload && message::from_value(*e.payload))
                r = r.set_insert(*e.payload);
            else if (e.name == tx_sym && message::from_value(t))
                snt = snt.set_insert(t);
            else if (e.name == set_t_sym && e.payload)
                t = *e.payload;
            return value::tup({id, t, r, snt});
        });
}

namespace {
state_variable joint_projection(size_t i) {
    return combine([i](std::span<const value> vs) { return vs[0].items()[i]; },
                   {node_joint_variable()});
}
} // namespace

state_variable node_id_variable() { return joint_projection(0); }
state_variable node_t_variable() { return joint_projection(1); }
state_variable node_r_variable() { return joint_projection(2); }
state_variable node_s_variable() { return joint_projection(3); }

const std::vector<size_t>& node_behavior::step_thresholds() const {
    static const std::vector<size_t> none;
    return none;
}

// ---- state construction -------------------------------------------------------

size_t network_state::index_of(symbol name) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == name) return i;
    throw domain_error("unknown node: " + name.str());
}

const node_runtime* network_state::find(symbol name) const {
    for (const auto& nr : nodes)
        if (nr.id == name) return &nr;
    return nullptr;
}

namespace {

// one incremental step of the trace fold shared by stepping and rebuilds
void fold_event(node_runtime& nr, const event& e) {
    nr.u.push_back(e);
    if (nr.u.size() == 1) return; // the name event
    if (e.name == rx_sym && e.payload) {
        if (auto m = message::from_value(*e.payload)) nr.received.insert(*m);
    } else if (e.name == tx_sym) {
        if (auto m = message::from_value(nr.want)) nr.sent.insert(*m);
    } else if (e.name == set_t_sym && e.payload) {
        nr.want = *e.payload;
    }
}

void check_names(const std::vector<symbol>& names) {
    if (names.empty()) throw domain_error("network needs at least one node");
    std::set<symbol> seen;
    for (auto n : names) {
        if (!seen.insert(n).second) throw domain_error("duplicate node name: " + n.str());
        if (n == rx_sym || n == tx_sym || n == set_t_sym)
            throw domain_error("node name collides with a reserved event: " + n.str());
    }
}

} // namespace

network_state init_network(const std::vector<symbol>& names,
                           const std::vector<std::shared_ptr<const node_behavior>>& behaviors) {
    check_names(names);
    if (behaviors.size() != names.size())
        throw domain_error("need one behavior per node");
    network_state st;
    st.nodes.reserve(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
        node_runtime nr;
        nr.id = names[i];
        nr.behavior = behaviors[i];
        fold_event(nr, event(names[i])); // u_n = nulls.n
        st.nodes.push_back(std::move(nr));
    }
    return st;
}

network_state network_from_traces(const std::vector<symbol>& names,
                                  const std::vector<std::shared_ptr<const node_behavior>>& behaviors,
                                  const std::vector<trace>& traces) {
    check_names(names);
    if (behaviors.size() != names.size() || traces.size() != names.size())
        throw domain_error("need one behavior and one trace per node");
    network_state st;
    st.nodes.reserve(names.size());
    for (size_t i = 0; i < names.size(); ++i) {
        node_runtime nr;
        nr.id = names[i];
        nr.behavior = behaviors[i];
        for (const auto& e : traces[i]) fold_event(nr, e);
        st.nodes.push_back(std::move(nr));
    }
    return st;
}

// ---- stepping -----------------------------------------------------------------

namespace {

value memoized_desired(node_runtime& nr, size_t step) {
    const auto& thresholds = nr.behavior->step_thresholds();
    size_t crossed = static_cast<size_t>(
        std::upper_bound(thresholds.begin(), thresholds.end(), step) - thresholds.begin());
    size_t rotation = step / 4;
    if (nr.behavior->cacheable() && nr.cache_r == nr.received.size() &&
        nr.cache_s == nr.sent.size() && nr.cache_thresholds == crossed &&
        nr.cache_rotation == rotation)
        return nr.cache_desired;
    value desired = nr.behavior->desired_t(node_view{nr, step});
    nr.cache_r = nr.received.size();
    nr.cache_s = nr.sent.size();
    nr.cache_thresholds = crossed;
    nr.cache_rotation = rotation;
    nr.cache_desired = desired;
    return desired;
}

} // namespace

network_state network_step(network_state st, const schedule_entry& entry, step_delta* delta) {
    // validate the entry before touching anything
    std::vector<size_t> receivers;
    std::vector<size_t> locals;
    std::optional<size_t> tx_idx;
    std::set<size_t> busy;

    if (entry.transmitter) {
        tx_idx = st.index_of(*entry.transmitter);
        busy.insert(*tx_idx);
    }
    if (!entry.receivers.empty() && !tx_idx)
        throw schedule_error("receivers designated with no transmitter");
    for (auto r : entry.receivers) {
        size_t i = st.index_of(r);
        if (i == tx_idx)
            throw schedule_error("transmitter cannot receive its own message: " + r.str());
        if (!busy.insert(i).second)
            throw schedule_error("node scheduled twice: " + r.str());
        receivers.push_back(i);
    }
    for (auto l : entry.local_actors) {
        size_t i = st.index_of(l);
        if (!busy.insert(i).second)
            throw schedule_error("node scheduled twice: " + l.str());
        locals.push_back(i);
    }

    std::optional<message> m;
    if (tx_idx) {
        m = message::from_value(st.nodes[*tx_idx].want);
        if (!m)
            throw schedule_error("designated transmitter " +
                                 st.nodes[*tx_idx].id.str() + " has T = nullm");
    }

    step_delta local_delta;
    auto note = [&](size_t i, const event& e) {
        local_delta.appended.emplace_back(st.nodes[i].id, e);
    };

    // apply in a fixed order: tx, then rx in declared node order, then locals
    if (tx_idx) {
        event e = tx_event();
        fold_event(st.nodes[*tx_idx], e);
        note(*tx_idx, e);
        local_delta.transmitter = st.nodes[*tx_idx].id;
        local_delta.transmitted = m;
    }
    std::sort(receivers.begin(), receivers.end());
    for (size_t i : receivers) {
        event e = rx_event(*m);
        fold_event(st.nodes[i], e);
        note(i, e);
    }
    std::sort(locals.begin(), locals.end());
    for (size_t i : locals) {
        auto& nr = st.nodes[i];
        std::optional<event> e = nr.behavior->override_local(node_view{nr, st.step_count});
        if (!e) {
            value desired = memoized_desired(nr, st.step_count);
            if (!(desired == nr.want)) e = set_t_event(desired);
        }
        if (e) {
            fold_event(nr, *e);
            note(i, *e);
        }
    }
    st.step_count += 1;

    if (delta) {
        std::sort(local_delta.appended.begin(), local_delta.appended.end(),
                  [&](const auto& a, const auto& b) {
                      return st.index_of(a.first) < st.index_of(b.first);
                  });
        *delta = std::move(local_delta);
    }
    return st;
}

schedule_entry random_schedule(const network_state& st, rng& gen, double delivery_probability) {
    if (delivery_probability < 0.0 || delivery_probability > 1.0)
        throw domain_error("delivery probability must be in [0,1]");
    schedule_entry entry;
    std::vector<size_t> candidates;
    for (size_t i = 0; i < st.nodes.size(); ++i)
        if (message::from_value(st.nodes[i].want)) candidates.push_back(i);
    std::optional<size_t> tx_idx;
    if (!candidates.empty()) {
        // one lottery slot abstains so the rest of the network still gets
        // local-action rounds even under full delivery
        size_t pick = gen.below(candidates.size() + 1);
        if (pick < candidates.size()) tx_idx = candidates[pick];
    }
    if (tx_idx) {
        entry.transmitter = st.nodes[*tx_idx].id;
        for (size_t i = 0; i < st.nodes.size(); ++i) {
            if (i == *tx_idx) continue;
            if (gen.bernoulli(delivery_probability))
                entry.receivers.push_back(st.nodes[i].id);
        }
    }
    std::set<symbol> involved(entry.receivers.begin(), entry.receivers.end());
    if (entry.transmitter) involved.insert(*entry.transmitter);
    for (const auto& nr : st.nodes)
        if (!involved.contains(nr.id)) entry.local_actors.push_back(nr.id);
    return entry;
}

json schedule_entry::to_json() const {
    json j;
    j["tx"] = transmitter ? json(transmitter->str()) : json(nullptr);
    json rx = json::array();
    for (auto r : receivers) rx.push_back(r.str());
    j["rx"] = std::move(rx);
    json lo = json::array();
    for (auto l : local_actors) lo.push_back(l.str());
    j["local"] = std::move(lo);
    return j;
}

schedule_entry schedule_entry::from_json(const json& j) {
    schedule_entry e;
    if (j.contains("tx") && !j.at("tx").is_null())
        e.transmitter = symbol(j.at("tx").get<std::string>());
    if (j.contains("rx"))
        for (const auto& r : j.at("rx")) e.receivers.emplace_back(r.get<std::string>());
    if (j.contains("local"))
        for (const auto& l : j.at("local")) e.local_actors.emplace_back(l.get<std::string>());
    return e;
}

// ---- derived sets and monitors --------------------------------------------------

derived_sets derive_sets(const network_state& st) {
    derived_sets out;
    for (const auto& nr : st.nodes) {
        out.names.push_back(nr.id);
        // fold the written recursions from scratch; want tracks T
        msg_set r, s;
        value want = nullm;
        for (size_t i = 0; i < nr.u.size(); ++i) {
            const event& e = nr.u[i];
            if (i == 0) continue; // name event
            if (e.name == rx_sym && e.payload) {
                if (auto m = message::from_value(*e.payload)) r.insert(*m);
            } else if (e.name == tx_sym) {
                if (auto m = message::from_value(want)) s.insert(*m);
            } else if (e.name == set_t_sym && e.payload) {
                want = *e.payload;
            }
        }
        out.received.push_back(std::move(r));
        out.sent.push_back(std::move(s));
    }
    return out;
}

std::optional<net_violation> check_no_spurious(const network_state& st) {
    auto ds = derive_sets(st);
    for (size_t n = 0; n < ds.names.size(); ++n) {
        for (const auto& m : ds.received[n].in_order()) {
            bool sent = false;
            for (const auto& s : ds.sent)
                if (s.contains(m)) { sent = true; break; }
            if (!sent)
                return net_violation{
                    "no-spurious",
                    "message " + m.str() + " in R(" + ds.names[n].str() +
                        ") was never sent",
                    json{{"node", ds.names[n].str()}, {"message", m.to_value().to_json()}}};
        }
    }
    return std::nullopt;
}

namespace {

class no_spurious_monitor final : public step_monitor {
public:
    std::string_view name() const override { return "no-spurious"; }
    std::optional<net_violation> after_step(const network_state& st,
                                            const step_delta& d) override {
        // R and S only grow, so checking each newly received message against
        // the post-step S sets is the full check evaluated incrementally
        for (const auto& [node, e] : d.appended) {
            if (e.name != rx_sym || !e.payload) continue;
            auto m = message::from_value(*e.payload);
            if (!m) continue;
            bool sent = false;
            for (const auto& nr : st.nodes)
                if (nr.sent.contains(*m)) { sent = true; break; }
            if (!sent)
                return net_violation{
                    std::string(name()),
                    "message " + m->str() + " received by " + node.str() + " was never sent",
                    json{{"node", node.str()}, {"message", m->to_value().to_json()}}};
        }
        return std::nullopt;
    }
};

class rx_tx_pairing_monitor final : public step_monitor {
public:
    std::string_view name() const override { return "rx-tx-pairing"; }
    std::optional<net_violation> after_step(const network_state&,
                                            const step_delta& d) override {
        for (const auto& [node, e] : d.appended) {
            if (e.name != rx_sym || !e.payload) continue;
            auto m = message::from_value(*e.payload);
            bool paired = m && d.transmitted && *d.transmitted == *m;
            if (!paired)
                return net_violation{
                    std::string(name()),
                    "rx at " + node.str() + " has no matching tx in this step",
                    json{{"node", node.str()}, {"event", e.to_json()}}};
        }
        return std::nullopt;
    }
};

} // namespace

std::unique_ptr<step_monitor> make_no_spurious_monitor() {
    return std::make_unique<no_spurious_monitor>();
}

std::unique_ptr<step_monitor> make_rx_tx_pairing_monitor() {
    return std::make_unique<rx_tx_pairing_monitor>();
}

} // namespace sv
