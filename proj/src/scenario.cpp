#include "sv/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sv {

std::string protocol_name(protocol_kind p) {
    switch (p) {
    case protocol_kind::none: return "none";
    case protocol_kind::simple_ack: return "simple-ack";
    case protocol_kind::cyclic_ack: return "cyclic-ack";
    }
    return "?";
}

protocol_kind protocol_from_name(const std::string& name) {
    if (name == "none") return protocol_kind::none;
    if (name == "simple-ack") return protocol_kind::simple_ack;
    if (name == "cyclic-ack") return protocol_kind::cyclic_ack;
    throw parse_error("unknown protocol: " + name);
}

std::string fault_name(fault_kind k) {
    switch (k) {
    case fault_kind::ack_without_data: return "ack-without-data";
    case fault_kind::out_of_turn_ack: return "out-of-turn-ack";
    case fault_kind::spurious_rx: return "spurious-rx";
    }
    return "?";
}

fault_kind fault_from_name(const std::string& name) {
    if (name == "ack-without-data") return fault_kind::ack_without_data;
    if (name == "out-of-turn-ack") return fault_kind::out_of_turn_ack;
    if (name == "spurious-rx") return fault_kind::spurious_rx;
    throw parse_error("unknown fault kind: " + name);
}

std::string policy_name(send_policy p) {
    return p == send_policy::eager ? "eager" : "single-shot";
}

send_policy policy_from_name(const std::string& name) {
    if (name == "eager") return send_policy::eager;
    if (name == "single-shot") return send_policy::single_shot;
    throw parse_error("unknown policy: " + name);
}

// ---- scenario parsing -------------------------------------------------------

namespace {

value plan_id_from_json(const json& j) {
    if (j.is_string()) return value(symbol(j.get<std::string>()));
    if (j.is_number_integer()) return value(j.get<int64_t>());
    return value::from_json(j);
}

} // namespace

void scenario::validate() const {
    if (nodes.empty()) throw parse_error("scenario needs at least one node");
    std::set<symbol> node_set;
    for (auto n : nodes) {
        if (!node_set.insert(n).second)
            throw parse_error("duplicate node: " + n.str());
        if (n == rx_sym || n == tx_sym || n == set_t_sym)
            throw parse_error("node name collides with a reserved event: " + n.str());
    }
    for (auto g : group)
        if (!node_set.contains(g)) throw parse_error("group member not a node: " + g.str());
    if (!pi_order.empty()) {
        if (pi_order.size() != group.size())
            throw parse_error("pi order must be a permutation of the group");
        std::set<symbol> gs(group.begin(), group.end());
        std::set<symbol> ps(pi_order.begin(), pi_order.end());
        if (gs != ps) throw parse_error("pi order must be a permutation of the group");
    }
    if (delivery_p < 0.0 || delivery_p > 1.0)
        throw parse_error("delivery probability must be in [0,1]");
    if (scripted) {
        for (const auto& e : entries) {
            if (e.transmitter && !node_set.contains(*e.transmitter))
                throw parse_error("scripted entry references unknown node: " +
                                  e.transmitter->str());
            for (auto r : e.receivers)
                if (!node_set.contains(r))
                    throw parse_error("scripted entry references unknown node: " + r.str());
            for (auto l : e.local_actors)
                if (!node_set.contains(l))
                    throw parse_error("scripted entry references unknown node: " + l.str());
        }
    }
    std::set<value> plan_ids;
    for (const auto& it : data_plan) {
        if (!node_set.contains(it.origin))
            throw parse_error("data plan origin not a node: " + it.origin.str());
        if (!plan_ids.insert(it.id).second)
            throw parse_error("duplicate data plan id: " + it.id.str());
    }
    if (protocol == protocol_kind::cyclic_ack) {
        for (const auto& it : data_plan) {
            if (!it.id.is(value::kind::integer))
                throw parse_error("cyclic plan ids must be integers: " + it.id.str());
            int64_t i = it.id.as_int();
            if (i < 0 || static_cast<size_t>(i) >= data_plan.size())
                throw parse_error("cyclic sequence numbers must be contiguous from 0");
        }
    }
    for (const auto& f : faults)
        if (!node_set.contains(f.node))
            throw parse_error("fault references unknown node: " + f.node.str());
    if (protocol != protocol_kind::none && group.empty() && nodes.empty())
        throw parse_error("protocol needs a group");
    if (protocol == protocol_kind::simple_ack || protocol == protocol_kind::cyclic_ack) {
        for (const auto& f : faults) {
            if (f.kind == fault_kind::ack_without_data && data_plan.empty())
                throw parse_error("ack-without-data fault needs a data plan");
        }
    }
}

json scenario::to_json() const {
    json j;
    j["protocol"] = protocol_name(protocol);
    json ns = json::array();
    for (auto n : nodes) ns.push_back(n.str());
    j["nodes"] = std::move(ns);
    json gs = json::array();
    for (auto g : group) gs.push_back(g.str());
    j["group"] = std::move(gs);
    if (!pi_order.empty()) {
        json ps = json::array();
        for (auto p : pi_order) ps.push_back(p.str());
        j["pi"] = std::move(ps);
    }
    j["steps"] = steps;
    j["seed"] = seed;
    if (scripted) {
        json es = json::array();
        for (const auto& e : entries) es.push_back(e.to_json());
        j["delivery"] = json{{"mode", "scripted"}, {"entries", std::move(es)}};
    } else {
        j["delivery"] = json{{"mode", "random"}, {"p", delivery_p}};
    }
    if (!faults.empty()) {
        json fs = json::array();
        for (const auto& f : faults)
            fs.push_back(json{{"node", f.node.str()}, {"kind", fault_name(f.kind)}});
        j["faults"] = std::move(fs);
    }
    json plan = json::array();
    for (const auto& it : data_plan)
        plan.push_back(json{{"origin", it.origin.str()},
                            {"id", it.id.to_json()},
                            {"step", it.earliest}});
    j["data_plan"] = std::move(plan);
    j["policy"] = policy_name(policy);
    return j;
}

scenario scenario::from_json(const json& j) {
    scenario sc;
    try {
        if (j.contains("protocol"))
            sc.protocol = protocol_from_name(j.at("protocol").get<std::string>());
        for (const auto& n : j.at("nodes"))
            sc.nodes.emplace_back(n.get<std::string>());
        if (j.contains("group"))
            for (const auto& g : j.at("group")) sc.group.emplace_back(g.get<std::string>());
        if (sc.group.empty()) sc.group = sc.nodes;
        if (j.contains("pi"))
            for (const auto& p : j.at("pi")) sc.pi_order.emplace_back(p.get<std::string>());
        if (j.contains("steps")) sc.steps = j.at("steps").get<size_t>();
        if (j.contains("seed")) sc.seed = j.at("seed").get<uint64_t>();
        if (j.contains("delivery")) {
            const auto& d = j.at("delivery");
            auto mode = d.at("mode").get<std::string>();
            if (mode == "scripted") {
                sc.scripted = true;
                for (const auto& e : d.at("entries"))
                    sc.entries.push_back(schedule_entry::from_json(e));
                sc.steps = sc.entries.size();
            } else if (mode == "random") {
                sc.delivery_p = d.at("p").get<double>();
            } else {
                throw parse_error("unknown delivery mode: " + mode);
            }
        }
        if (j.contains("faults"))
            for (const auto& f : j.at("faults"))
                sc.faults.push_back(fault_spec{symbol(f.at("node").get<std::string>()),
                                               fault_from_name(f.at("kind").get<std::string>())});
        if (j.contains("data_plan")) {
            for (const auto& it : j.at("data_plan")) {
                plan_item pi;
                pi.origin = symbol(it.at("origin").get<std::string>());
                pi.id = plan_id_from_json(it.at("id"));
                if (it.contains("step")) pi.earliest = it.at("step").get<size_t>();
                sc.data_plan.push_back(std::move(pi));
            }
        }
        if (j.contains("policy"))
            sc.policy = policy_from_name(j.at("policy").get<std::string>());
    } catch (const json::exception& ex) {
        throw parse_error(std::string("malformed scenario: ") + ex.what());
    }
    sc.validate();
    return sc;
}

scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw parse_error("scenario " + path + ": " + ex.what());
    }
    return scenario::from_json(j);
}

group_config scenario::make_group() const {
    return group_config::of(pi_order.empty() ? group : pi_order);
}

std::vector<std::shared_ptr<const node_behavior>> scenario::make_behaviors() const {
    group_config g = make_group();
    std::vector<std::shared_ptr<const node_behavior>> bs;
    bs.reserve(nodes.size());
    for (auto n : nodes) {
        std::shared_ptr<const node_behavior> b;
        switch (protocol) {
        case protocol_kind::none:
            b = make_none_behavior(n, data_plan, policy);
            break;
        case protocol_kind::simple_ack:
            b = make_simple_ack_behavior(n, g, nodes, data_plan, policy);
            break;
        case protocol_kind::cyclic_ack:
            b = make_cyclic_ack_behavior(n, g, data_plan, policy);
            break;
        }
        for (const auto& f : faults) {
            if (f.node != n) continue;
            message payload;
            switch (f.kind) {
            case fault_kind::ack_without_data:
                payload = simple_ack(data_plan.at(0).id, n);
                break;
            case fault_kind::out_of_turn_ack:
                payload = seq_ack(static_cast<int64_t>(g.k()));
                break;
            case fault_kind::spurious_rx:
                payload = data_message(value(symbol("ghost")));
                break;
            }
            b = make_faulty(std::move(b), f.kind, std::move(payload));
        }
        bs.push_back(std::move(b));
    }
    return bs;
}

std::vector<std::unique_ptr<step_monitor>> scenario::make_monitors() const {
    std::vector<std::unique_ptr<step_monitor>> ms;
    ms.push_back(make_no_spurious_monitor());
    ms.push_back(make_rx_tx_pairing_monitor());
    if (protocol == protocol_kind::simple_ack) {
        ms.push_back(make_ack_lemma_monitor());
        ms.push_back(make_simple_commit_monitor(make_group()));
    } else if (protocol == protocol_kind::cyclic_ack) {
        ms.push_back(make_cyclic_soundness_monitor(make_group()));
        ms.push_back(make_turn_discipline_monitor(make_group()));
    }
    return ms;
}

size_t count_commits(const scenario& sc, const network_state& st) {
    if (sc.protocol == protocol_kind::none) return 0;
    group_config g = sc.make_group();
    size_t commits = 0;
    for (const auto& nr : st.nodes) {
        for (const auto& it : sc.data_plan) {
            if (sc.protocol == protocol_kind::simple_ack) {
                if (commit_simple(g, it.id, nr.received)) ++commits;
            } else {
                if (commit_cyclic(g, it.id.as_int(), nr.received)) ++commits;
            }
        }
    }
    return commits;
}

// ---- run + log ---------------------------------------------------------------

namespace {

json violation_json(const net_violation& v) {
    return json{{"monitor", v.monitor}, {"detail", v.detail}, {"witness", v.witness}};
}

json header_json(const scenario& sc) {
    json h;
    h["log"] = "svsim-trace";
    h["version"] = tool_version;
    h["rng"] = rng::algorithm;
    h["seed"] = sc.seed;
    h["scenario"] = sc.to_json();
    return h;
}

json step_record(size_t step, const schedule_entry& entry, const step_delta& delta,
                 const std::optional<net_violation>& violation) {
    json rec;
    rec["step"] = step;
    rec["entry"] = entry.to_json();
    json appended = json::object();
    for (const auto& [node, e] : delta.appended) appended[node.str()] = e.to_json();
    rec["appended"] = std::move(appended);
    if (violation) {
        rec["ok"] = false;
        rec["violation"] = violation_json(*violation);
    } else {
        rec["ok"] = true;
    }
    return rec;
}

json footer_json(const scenario& sc, const network_state& st,
                 const std::optional<net_violation>& violation, size_t steps_executed) {
    json f;
    f["steps"] = steps_executed;
    f["result"] = violation ? "violation" : "ok";
    auto ds = derive_sets(st);
    json derived = json::object();
    for (size_t i = 0; i < ds.names.size(); ++i) {
        derived[ds.names[i].str()] = json{{"R", ds.received[i].to_value().to_json()},
                                          {"S", ds.sent[i].to_value().to_json()}};
    }
    f["derived"] = std::move(derived);
    f["commits"] = count_commits(sc, st);
    if (sc.protocol != protocol_kind::none) {
        group_config g = sc.make_group();
        json by_node = json::object();
        for (const auto& nr : st.nodes) {
            json ids = json::array();
            for (const auto& it : sc.data_plan) {
                bool committed = sc.protocol == protocol_kind::simple_ack
                                     ? commit_simple(g, it.id, nr.received)
                                     : commit_cyclic(g, it.id.as_int(), nr.received);
                if (committed) ids.push_back(it.id.to_json());
            }
            by_node[nr.id.str()] = std::move(ids);
        }
        f["committed"] = std::move(by_node);
    }
    // full-state checkers corroborate the per-step monitors
    json checks = json::object();
    checks["no-spurious"] = !check_no_spurious(st).has_value();
    if (sc.protocol == protocol_kind::simple_ack) {
        checks["ack-lemma"] = !check_ack_lemma(st).has_value();
        checks["commit-simple-soundness"] =
            !check_commit_simple_soundness(st, sc.make_group()).has_value();
    } else if (sc.protocol == protocol_kind::cyclic_ack) {
        checks["cyclic-soundness"] = !check_cyclic_soundness(st, sc.make_group()).has_value();
    }
    f["final_checks"] = std::move(checks);
    return json{{"final", std::move(f)}};
}

struct exec_result {
    std::vector<std::string> lines;
    std::optional<net_violation> violation;
    size_t steps_executed = 0;
    size_t commits = 0;
};

// shared by run and replay: execute with a schedule source, emit the exact
// log lines
template <typename NextEntry>
exec_result execute(const scenario& sc, NextEntry&& next_entry) {
    exec_result res;
    auto st = init_network(sc.nodes, sc.make_behaviors());
    auto monitors = sc.make_monitors();
    res.lines.push_back(header_json(sc).dump());
    for (size_t step = 0; step < sc.steps; ++step) {
        schedule_entry entry = next_entry(st, step);
        step_delta delta;
        st = network_step(std::move(st), entry, &delta);
        std::optional<net_violation> violation;
        for (auto& m : monitors) {
            violation = m->after_step(st, delta);
            if (violation) break;
        }
        res.lines.push_back(step_record(step, entry, delta, violation).dump());
        res.steps_executed = step + 1;
        if (violation) {
            res.violation = violation;
            break;
        }
    }
    res.lines.push_back(footer_json(sc, st, res.violation, res.steps_executed).dump());
    res.commits = count_commits(sc, st);
    // a footer check failing where the per-step monitors stayed quiet would
    // be a bug in the incremental evaluation; surface it as a violation
    if (!res.violation) {
        if (auto v = check_no_spurious(st)) res.violation = v;
        if (!res.violation && sc.protocol == protocol_kind::simple_ack) {
            if (auto v = check_ack_lemma(st)) res.violation = v;
            if (!res.violation)
                if (auto v = check_commit_simple_soundness(st, sc.make_group()))
                    res.violation = v;
        }
        if (!res.violation && sc.protocol == protocol_kind::cyclic_ack)
            if (auto v = check_cyclic_soundness(st, sc.make_group())) res.violation = v;
    }
    return res;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

} // namespace

run_outcome run_scenario(const scenario& sc) {
    sc.validate();
    rng gen(sc.seed);
    auto res = execute(sc, [&](const network_state& st, size_t step) {
        if (sc.scripted) return sc.entries[step];
        (void)step;
        return random_schedule(st, gen, sc.delivery_p);
    });
    run_outcome out;
    out.log_text = join_lines(res.lines);
    out.violation = res.violation;
    out.steps_executed = res.steps_executed;
    out.commits = res.commits;
    out.exit_code = res.violation ? 2 : 0;
    return out;
}

replay_result replay_log(const std::string& log_text) {
    std::vector<std::string> lines;
    std::istringstream in(log_text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    if (lines.size() < 2) return {false, "log too short"};

    scenario sc;
    std::vector<schedule_entry> entries;
    try {
        json header = json::parse(lines.front());
        if (header.at("log") != "svsim-trace") return {false, "not a trace log"};
        sc = scenario::from_json(header.at("scenario"));
        for (size_t i = 1; i + 1 < lines.size(); ++i) {
            json rec = json::parse(lines[i]);
            entries.push_back(schedule_entry::from_json(rec.at("entry")));
        }
    } catch (const std::exception& ex) {
        return {false, std::string("cannot parse log: ") + ex.what()};
    }

    // re-execute from the recorded entries; the log may be shorter than the
    // scenario's step count when a violation stopped the run
    scenario replay_sc = sc;
    replay_sc.scripted = true;
    replay_sc.entries = entries;
    replay_sc.steps = entries.size();
    exec_result res;
    try {
        res = execute(replay_sc, [&](const network_state&, size_t step) {
            return entries[step];
        });
    } catch (const std::exception& ex) {
        return {false, std::string("replay failed: ") + ex.what()};
    }

    // compare step records and footer byte-for-byte (the header differs: the
    // replay scenario carries the scripted entries)
    if (res.lines.size() != lines.size())
        return {false, "replay produced " + std::to_string(res.lines.size()) +
                           " lines, log has " + std::to_string(lines.size())};
    for (size_t i = 1; i < lines.size(); ++i) {
        if (res.lines[i] != lines[i])
            return {false, "line " + std::to_string(i + 1) + " differs:\n  log:    " +
                               lines[i] + "\n  replay: " + res.lines[i]};
    }
    return {true, ""};
}

// ---- fuzzing --------------------------------------------------------------------

scenario make_fuzz_scenario(const fuzz_params& fp, uint64_t seed) {
    if (fp.nodes < 1) throw domain_error("fuzz needs at least one node");
    scenario sc;
    sc.protocol = fp.protocol;
    sc.steps = fp.steps;
    sc.seed = seed;
    sc.delivery_p = fp.p;
    sc.policy = fp.policy;
    for (size_t i = 0; i < fp.nodes; ++i)
        sc.nodes.emplace_back("n" + std::to_string(i));
    // keep one node out of the group when possible: outsiders observe
    // commits and, for the cyclic protocol, originate the data
    size_t group_size = fp.nodes > 1 ? fp.nodes - 1 : fp.nodes;
    sc.group.assign(sc.nodes.begin(), sc.nodes.begin() + static_cast<long>(group_size));

    size_t count = fp.messages;
    if (count == 0)
        count = std::max<size_t>(8, std::min<size_t>(40, fp.steps / 50));
    std::vector<symbol> origins;
    if (fp.protocol == protocol_kind::cyclic_ack) {
        // cyclic turns require the turn node to have *received* every prior
        // data message, so origins come from outside the group when possible
        for (size_t i = group_size; i < fp.nodes; ++i) origins.push_back(sc.nodes[i]);
        if (origins.empty())
            for (auto n : sc.nodes) origins.push_back(n);
    } else {
        origins = sc.nodes;
    }
    for (size_t i = 0; i < count; ++i) {
        plan_item it;
        it.origin = origins[i % origins.size()];
        if (fp.protocol == protocol_kind::cyclic_ack)
            it.id = value(static_cast<int64_t>(i));
        else
            it.id = value(symbol("m" + std::to_string(i)));
        it.earliest = count <= 1 ? 0 : i * (fp.steps / 2) / count;
        sc.data_plan.push_back(std::move(it));
    }
    sc.validate();
    return sc;
}

std::string fuzz_report::render() const {
    std::ostringstream os;
    for (const auto& r : per_seed) {
        os << "seed " << r.seed << ": " << (r.ok ? "ok" : ("VIOLATION " + r.monitor))
           << " steps=" << r.steps << " commits=" << r.commits << "\n";
    }
    for (const auto& [monitor, count] : violations_by_monitor)
        os << "monitor " << monitor << ": " << count << " violating seeds\n";
    os << "seeds=" << per_seed.size() << " violations=" << violations
       << " total_commits=" << total_commits << "\n";
    return os.str();
}

fuzz_report run_fuzz(const fuzz_params& fp) {
    if (fp.seed_to < fp.seed_from) throw domain_error("empty seed range");
    size_t n = static_cast<size_t>(fp.seed_to - fp.seed_from + 1);
    std::vector<fuzz_seed_result> results(n);

    auto run_one = [&](size_t idx) {
        uint64_t seed = fp.seed_from + idx;
        scenario sc = make_fuzz_scenario(fp, seed);
        run_outcome out = run_scenario(sc);
        fuzz_seed_result r;
        r.seed = seed;
        r.ok = !out.violation.has_value();
        if (out.violation) r.monitor = out.violation->monitor;
        r.commits = out.commits;
        r.steps = out.steps_executed;
        results[idx] = std::move(r);
    };

#ifdef _OPENMP
    if (fp.jobs != 1) {
        int threads = fp.jobs <= 0 ? omp_get_max_threads() : fp.jobs;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (size_t i = 0; i < n; ++i) run_one(i);
    } else {
        for (size_t i = 0; i < n; ++i) run_one(i);
    }
#else
    for (size_t i = 0; i < n; ++i) run_one(i);
#endif

    fuzz_report rep;
    rep.per_seed = std::move(results); // already in ascending seed order
    for (const auto& r : rep.per_seed) {
        if (!r.ok) {
            ++rep.violations;
            ++rep.violations_by_monitor[r.monitor];
        }
        rep.total_commits += r.commits;
    }
    return rep;
}

} // namespace sv
