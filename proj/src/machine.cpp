#include "sv/machine.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include <nlohmann/json.hpp>

namespace sv {

alphabet_spec alphabet_spec::closed(std::vector<event> events) {
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    alphabet_spec a;
    a.events_ = std::make_shared<const std::vector<event>>(std::move(events));
    return a;
}

bool alphabet_spec::accepts(const event& e) const {
    if (is_open()) return true;
    return std::binary_search(events_->begin(), events_->end(), e);
}

const std::vector<event>& alphabet_spec::events() const {
    if (is_open()) throw domain_error("open alphabet has no event list");
    return *events_;
}

value run(const machine& m, const trace& w) {
    value s = m.initial;
    for (size_t i = 0; i < w.size(); ++i) {
        if (!m.alphabet.accepts(w[i]))
            throw alphabet_error("event '" + w[i].str() + "' at position " +
                                 std::to_string(i) + " outside the machine alphabet");
        s = m.step(s, w[i]);
    }
    return m.out(s);
}

value step_state(const machine& m, const value& s, const event& e) {
    if (!m.alphabet.accepts(e))
        throw alphabet_error("event '" + e.str() + "' outside the machine alphabet");
    return m.step(s, e);
}

reachable_result reachable(const machine& m, const std::vector<event>& event_basis,
                           size_t max_states) {
    if (max_states < 1) throw domain_error("max_states must be >= 1");
    for (const auto& e : event_basis)
        if (!m.alphabet.accepts(e))
            throw alphabet_error("basis event '" + e.str() + "' outside the machine alphabet");

    reachable_result r;
    r.complete = true;
    std::unordered_map<value, size_t> seen;
    std::deque<value> frontier;
    seen.emplace(m.initial, 0);
    r.states.push_back(m.initial);
    frontier.push_back(m.initial);
    while (!frontier.empty()) {
        value s = std::move(frontier.front());
        frontier.pop_front();
        for (const auto& e : event_basis) {
            value t = m.step(s, e);
            if (seen.contains(t)) continue;
            if (r.states.size() >= max_states) {
                r.complete = false;
                return r;
            }
            seen.emplace(t, r.states.size());
            r.states.push_back(t);
            frontier.push_back(t);
        }
    }
    return r;
}

machine machine_table::to_machine() const {
    auto self = std::make_shared<machine_table>(*this);
    auto index = std::make_shared<std::unordered_map<value, size_t>>();
    for (size_t i = 0; i < states.size(); ++i) index->emplace(states[i], i);
    auto event_index = std::make_shared<std::map<event, size_t>>();
    for (size_t j = 0; j < events.size(); ++j) event_index->emplace(events[j], j);

    machine m;
    m.alphabet = alphabet_spec::closed(events);
    m.initial = states.at(initial);
    m.step = [self, index, event_index](const value& s, const event& e) {
        auto si = index->find(s);
        if (si == index->end()) throw domain_error("state not in machine table: " + s.str());
        auto ei = event_index->find(e);
        if (ei == event_index->end())
            throw alphabet_error("event '" + e.str() + "' outside the machine alphabet");
        return self->states[self->step[si->second][ei->second]];
    };
    m.out = [self, index](const value& s) {
        auto si = index->find(s);
        if (si == index->end()) throw domain_error("state not in machine table: " + s.str());
        return self->out[si->second];
    };
    return m;
}

json machine_table::to_json() const {
    json j;
    j["states"] = json::array();
    for (const auto& s : states) j["states"].push_back(s.to_json());
    j["initial"] = initial;
    j["events"] = json::array();
    for (const auto& e : events) j["events"].push_back(e.to_json());
    j["step"] = step;
    j["out"] = json::array();
    for (const auto& v : out) j["out"].push_back(v.to_json());
    return j;
}

machine_table machine_table::from_json(const json& j) {
    machine_table t;
    for (const auto& s : j.at("states")) t.states.push_back(value::from_json(s));
    t.initial = j.at("initial").get<size_t>();
    for (const auto& e : j.at("events")) t.events.push_back(event::from_json(e));
    t.step = j.at("step").get<std::vector<std::vector<size_t>>>();
    for (const auto& v : j.at("out")) t.out.push_back(value::from_json(v));
    if (t.initial >= t.states.size() || t.step.size() != t.states.size() ||
        t.out.size() != t.states.size())
        throw parse_error("inconsistent machine table");
    for (const auto& row : t.step) {
        if (row.size() != t.events.size()) throw parse_error("inconsistent machine table");
        for (size_t x : row)
            if (x >= t.states.size()) throw parse_error("inconsistent machine table");
    }
    return t;
}

json partition::to_json() const {
    json arr = json::array();
    for (const auto& cls : classes) {
        json c = json::array();
        for (const auto& s : cls) c.push_back(s.to_json());
        arr.push_back(std::move(c));
    }
    return json{{"classes", std::move(arr)}};
}

minimize_result minimize(const machine& m, const std::vector<event>& event_basis,
                         size_t max_states) {
    auto reach = reachable(m, event_basis, max_states);
    if (!reach.complete)
        throw bound_error("reachable state set did not close within " +
                          std::to_string(max_states) + " states");
    const auto& states = reach.states;
    const size_t n = states.size();
    const size_t k = event_basis.size();

    std::unordered_map<value, size_t> index;
    for (size_t i = 0; i < n; ++i) index.emplace(states[i], i);

    std::vector<std::vector<size_t>> succ(n, std::vector<size_t>(k));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < k; ++j)
            succ[i][j] = index.at(m.step(states[i], event_basis[j]));

    std::vector<value> outs;
    outs.reserve(n);
    for (const auto& s : states) outs.push_back(m.out(s));

    // initial split by output value; class ids in state discovery order
    std::vector<size_t> cls(n);
    {
        std::map<value, size_t> by_out;
        for (size_t i = 0; i < n; ++i)
            cls[i] = by_out.emplace(outs[i], by_out.size()).first->second;
    }

    // refine by successor classes until the assignment stops changing
    for (;;) {
        std::map<std::vector<size_t>, size_t> by_sig;
        std::vector<size_t> next(n);
        for (size_t i = 0; i < n; ++i) {
            std::vector<size_t> sig;
            sig.reserve(k + 1);
            sig.push_back(cls[i]);
            for (size_t j = 0; j < k; ++j) sig.push_back(cls[succ[i][j]]);
            next[i] = by_sig.emplace(std::move(sig), by_sig.size()).first->second;
        }
        // renumber classes by first occurrence so ids stay deterministic
        std::vector<size_t> rename(by_sig.size(), SIZE_MAX);
        size_t fresh_id = 0;
        for (size_t i = 0; i < n; ++i) {
            if (rename[next[i]] == SIZE_MAX) rename[next[i]] = fresh_id++;
            next[i] = rename[next[i]];
        }
        if (next == cls) break;
        cls = std::move(next);
    }

    size_t class_count = *std::max_element(cls.begin(), cls.end()) + 1;

    minimize_result res;
    res.classes.classes.resize(class_count);
    for (size_t i = 0; i < n; ++i) {
        res.classes.classes[cls[i]].push_back(states[i]);
        res.classes.class_of.emplace(states[i], cls[i]);
    }

    std::vector<size_t> rep(class_count, SIZE_MAX);
    for (size_t i = 0; i < n; ++i)
        if (rep[cls[i]] == SIZE_MAX) rep[cls[i]] = i;

    machine_table tab;
    tab.events = event_basis;
    tab.initial = cls[0]; // state 0 is the initial state in BFS order
    for (size_t c = 0; c < class_count; ++c) {
        tab.states.push_back(states[rep[c]]);
        tab.out.push_back(outs[rep[c]]);
        std::vector<size_t> row(k);
        for (size_t j = 0; j < k; ++j) row[j] = cls[succ[rep[c]][j]];
        tab.step.push_back(std::move(row));
    }
    res.table = tab;
    res.quotient = tab.to_machine();
    return res;
}

equivalence_result equivalent(const machine& m1, const machine& m2,
                              const std::vector<event>& event_basis, size_t max_states) {
    struct node {
        value pair;
        size_t parent; // SIZE_MAX for the root
        size_t via;    // basis event index used to get here
    };
    std::vector<node> nodes;
    std::unordered_map<value, size_t> seen;
    std::deque<size_t> queue;

    auto make_pair = [](const value& a, const value& b) {
        return value::tup({a, b});
    };
    auto witness_for = [&](size_t id) {
        trace w;
        for (size_t cur = id; nodes[cur].parent != SIZE_MAX; cur = nodes[cur].parent)
            w.push_back(event_basis[nodes[cur].via]);
        std::reverse(w.begin(), w.end());
        return w;
    };

    nodes.push_back({make_pair(m1.initial, m2.initial), SIZE_MAX, 0});
    seen.emplace(nodes[0].pair, 0);
    queue.push_back(0);

    while (!queue.empty()) {
        size_t id = queue.front();
        queue.pop_front();
        const value& s1 = nodes[id].pair.items()[0];
        const value& s2 = nodes[id].pair.items()[1];
        if (!(m1.out(s1) == m2.out(s2)))
            return {false, witness_for(id)};
        for (size_t j = 0; j < event_basis.size(); ++j) {
            value t1 = m1.step(s1, event_basis[j]);
            value t2 = m2.step(s2, event_basis[j]);
            value p = make_pair(std::move(t1), std::move(t2));
            if (seen.contains(p)) continue;
            if (nodes.size() >= max_states)
                throw bound_error("equivalence search exceeded " +
                                  std::to_string(max_states) + " state pairs");
            seen.emplace(p, nodes.size());
            nodes.push_back({std::move(p), id, j});
            queue.push_back(nodes.size() - 1);
        }
    }
    return {true, std::nullopt};
}

namespace {

void enumerate_words(const std::vector<event>& basis, size_t max_len,
                     const std::function<void(const trace&)>& visit) {
    trace w;
    visit(w);
    std::vector<trace> layer{w};
    for (size_t len = 1; len <= max_len; ++len) {
        std::vector<trace> next;
        next.reserve(layer.size() * basis.size());
        for (const auto& prefix : layer) {
            for (const auto& e : basis) {
                trace t = append(prefix, e);
                visit(t);
                next.push_back(std::move(t));
            }
        }
        layer = std::move(next);
    }
}

} // namespace

word_partition nerode_classes_bounded(const std::function<value(const trace&)>& f,
                                      const std::vector<event>& event_basis,
                                      size_t word_len, size_t distinguisher_len) {
    std::vector<trace> continuations;
    enumerate_words(event_basis, distinguisher_len,
                    [&](const trace& u) { continuations.push_back(u); });

    word_partition part;
    std::map<std::vector<value>, size_t> by_sig;
    enumerate_words(event_basis, word_len, [&](const trace& w) {
        std::vector<value> sig;
        sig.reserve(continuations.size());
        for (const auto& u : continuations) sig.push_back(f(concat(w, u)));
        auto [it, fresh] = by_sig.emplace(std::move(sig), by_sig.size());
        if (fresh) part.classes.emplace_back();
        part.classes[it->second].push_back(w);
        part.class_of.emplace(w, it->second);
    });
    return part;
}

} // namespace sv
