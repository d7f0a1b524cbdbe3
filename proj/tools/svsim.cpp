// svsim: build the example variables, run and fuzz broadcast-commit
// scenarios with runtime monitors, minimize and compare machines, and emit
// replayable trace logs.

#include "sv/examples.hpp"
#include "sv/machine.hpp"
#include "sv/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace sv;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_violation = 2;
constexpr int exit_bound = 3;

value parse_value_token(const std::string& s) {
    if (s == "true") return value(true);
    if (s == "false") return value(false);
    if (!s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) ||
                       ((s[0] == '-' || s[0] == '+') && s.size() > 1 &&
                        std::isdigit(static_cast<unsigned char>(s[1])))))
        return value(static_cast<int64_t>(std::stoll(s)));
    return value(symbol(s));
}

event parse_event_token(const std::string& tok) {
    auto colon = tok.find(':');
    std::string name = colon == std::string::npos ? tok : tok.substr(0, colon);
    std::optional<std::string> payload;
    if (colon != std::string::npos) payload = tok.substr(colon + 1);
    if ((name == "+1" || name == "-1") && payload)
        return shift_event(name == "+1" ? 1 : -1, parse_value_token(*payload));
    if (!payload) return event(symbol(name));
    return event(symbol(name), parse_value_token(*payload));
}

trace parse_trace(const std::vector<std::string>& tokens) {
    trace t;
    for (const auto& tok : tokens) t.push_back(parse_event_token(tok));
    return t;
}

struct example_params {
    int64_t c = 3;
    size_t cells = 3;
};

// the single-output examples; bounded-queue is handled separately
state_variable build_example(const std::string& name, const example_params& p) {
    if (name == "mod-counter") return mod_counter(p.c);
    if (name == "unbounded-counter") return unbounded_counter();
    if (name == "connected-counters") return connected_counters(p.c);
    if (name == "queue") return queue_variable();
    if (name == "shift-register") return shift_register(p.cells);
    if (name == "bidir-register") return bidirectional_register(p.cells);
    if (name == "bounded-queue") return bounded_queue(p.c).cq;
    throw domain_error("unknown example: " + name);
}

// "name" or "name:param" compact example spec for the equivalent verb
state_variable build_example_spec(const std::string& spec) {
    example_params p;
    auto colon = spec.find(':');
    std::string name = colon == std::string::npos ? spec : spec.substr(0, colon);
    if (colon != std::string::npos) {
        int64_t arg = std::stoll(spec.substr(colon + 1));
        p.c = arg;
        p.cells = static_cast<size_t>(arg);
    }
    return build_example(name, p);
}

int cmd_example(const std::string& name, const example_params& p,
                const std::vector<std::string>& tokens) {
    trace w = parse_trace(tokens);
    if (name == "bounded-queue") {
        auto vars = bounded_queue(p.c);
        auto cq = vars.cq.instantiate();
        auto hw = vars.high_water.instantiate();
        auto df = vars.defined.instantiate();
        auto record = [&](size_t step, const json& ev) {
            json rec{{"step", step}};
            if (!ev.is_null()) rec["event"] = ev;
            rec["cq"] = cq->current().to_json();
            rec["high_water"] = hw->current().to_json();
            rec["defined"] = df->current().to_json();
            std::cout << rec.dump() << "\n";
        };
        record(0, json(nullptr));
        for (size_t i = 0; i < w.size(); ++i) {
            cq->advance(w[i]);
            hw->advance(w[i]);
            df->advance(w[i]);
            record(i + 1, w[i].to_json());
        }
        return exit_ok;
    }
    auto y = build_example(name, p);
    auto st = y.instantiate();
    json rec0{{"step", 0}, {"value", st->current().to_json()}};
    std::cout << rec0.dump() << "\n";
    for (size_t i = 0; i < w.size(); ++i) {
        st->advance(w[i]);
        json rec{{"step", i + 1}, {"event", w[i].to_json()}, {"value", st->current().to_json()}};
        std::cout << rec.dump() << "\n";
    }
    return exit_ok;
}

int cmd_minimize(const std::string& name, const example_params& p,
                 const std::vector<std::string>& basis_tokens, size_t bound) {
    auto y = build_example(name, p);
    auto m = to_machine(y);
    std::vector<event> basis = parse_trace(basis_tokens);
    if (basis.empty()) basis.push_back(event(symbol("tick")));
    auto reach = reachable(m, basis, bound);
    if (!reach.complete) {
        json out{{"complete", false}, {"explored", reach.states.size()}, {"bound", bound}};
        std::cout << out.dump(2) << "\n";
        return exit_bound;
    }
    auto res = minimize(m, basis, bound);
    json out;
    out["complete"] = true;
    out["state_count"] = res.table.states.size();
    out["machine"] = res.table.to_json();
    out["partition"] = res.classes.to_json();
    std::cout << out.dump(2) << "\n";
    return exit_ok;
}

int cmd_equivalent(const std::string& left, const std::string& right,
                   const std::vector<std::string>& basis_tokens, size_t bound) {
    auto m1 = to_machine(build_example_spec(left));
    auto m2 = to_machine(build_example_spec(right));
    std::vector<event> basis = parse_trace(basis_tokens);
    if (basis.empty()) basis.push_back(event(symbol("tick")));
    auto res = equivalent(m1, m2, basis, bound);
    json out;
    out["equivalent"] = res.equivalent;
    if (res.witness) out["witness"] = trace_to_json(*res.witness);
    std::cout << out.dump() << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"state-variable calculus and broadcast-commit simulator"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "execute a scenario with runtime monitors");
    std::string scenario_path;
    std::string out_path;
    std::optional<uint64_t> seed_override;
    std::optional<size_t> steps_override;
    std::optional<std::string> policy_override;
    std::vector<std::string> fault_overrides;
    run_cmd->add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
    run_cmd->add_option("--out", out_path, "trace log output path");
    run_cmd->add_option("--seed", seed_override, "override the scenario seed");
    run_cmd->add_option("--steps", steps_override, "override the step count");
    run_cmd->add_option("--policy", policy_override, "override the send policy");
    run_cmd->add_option("--fault", fault_overrides, "add a fault, node:kind");

    // fuzz
    auto* fuzz_cmd = app.add_subcommand("fuzz", "run one scenario per seed and summarize");
    sv::fuzz_params fp;
    std::string seeds_range = "0..9";
    std::string fuzz_protocol = "simple-ack";
    std::string fuzz_policy = "eager";
    fuzz_cmd->add_option("--protocol", fuzz_protocol, "none | simple-ack | cyclic-ack");
    fuzz_cmd->add_option("--nodes", fp.nodes, "node count");
    fuzz_cmd->add_option("--steps", fp.steps, "steps per seed");
    fuzz_cmd->add_option("--seeds", seeds_range, "seed range a..b (inclusive)");
    fuzz_cmd->add_option("--p", fp.p, "delivery probability");
    fuzz_cmd->add_option("--policy", fuzz_policy, "send policy");
    fuzz_cmd->add_option("--messages", fp.messages, "data plan size (0 = auto)");
    fuzz_cmd->add_option("--jobs", fp.jobs, "parallel seed jobs (1 = serial, 0 = all cores)");

    // example
    auto* ex_cmd = app.add_subcommand("example", "evaluate a catalog example on a trace");
    std::string ex_name;
    example_params ep;
    std::vector<std::string> ex_events;
    ex_cmd->add_option("name", ex_name,
                       "mod-counter | unbounded-counter | connected-counters | queue | "
                       "bounded-queue | shift-register | bidir-register")
        ->required();
    ex_cmd->add_option("--c", ep.c, "modulus / capacity parameter");
    ex_cmd->add_option("--cells", ep.cells, "register cell count");
    ex_cmd->add_option("events", ex_events, "event tokens, e.g. tick enq:a deq +1:x");

    // minimize
    auto* min_cmd = app.add_subcommand("minimize", "minimize an example over an event basis");
    std::string min_name;
    example_params mp;
    std::vector<std::string> min_basis;
    size_t min_bound = 10000;
    min_cmd->add_option("--example", min_name, "example name")->required();
    min_cmd->add_option("--c", mp.c, "modulus / capacity parameter");
    min_cmd->add_option("--cells", mp.cells, "register cell count");
    min_cmd->add_option("--basis", min_basis, "event basis tokens");
    min_cmd->add_option("--bound", min_bound, "state bound");

    // equivalent
    auto* eq_cmd = app.add_subcommand("equivalent", "decide equivalence of two examples");
    std::string eq_left, eq_right;
    std::vector<std::string> eq_basis;
    size_t eq_bound = 10000;
    eq_cmd->add_option("--left", eq_left, "example spec, e.g. mod-counter:3")->required();
    eq_cmd->add_option("--right", eq_right, "example spec")->required();
    eq_cmd->add_option("--basis", eq_basis, "event basis tokens");
    eq_cmd->add_option("--bound", eq_bound, "state-pair bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*run_cmd) {
            sv::scenario sc = sv::load_scenario_file(scenario_path);
            if (seed_override) sc.seed = *seed_override;
            if (steps_override && !sc.scripted) sc.steps = *steps_override;
            if (policy_override) sc.policy = sv::policy_from_name(*policy_override);
            for (const auto& f : fault_overrides) {
                auto colon = f.find(':');
                if (colon == std::string::npos)
                    throw sv::parse_error("--fault wants node:kind, got " + f);
                sc.faults.push_back(sv::fault_spec{sv::symbol(f.substr(0, colon)),
                                                   sv::fault_from_name(f.substr(colon + 1))});
            }
            sc.validate();
            auto out = sv::run_scenario(sc);
            if (!out_path.empty()) {
                std::ofstream os(out_path, std::ios::binary);
                if (!os) throw sv::parse_error("cannot write log: " + out_path);
                os << out.log_text;
            } else {
                std::cout << out.log_text;
            }
            if (out.violation)
                std::cerr << "violation: " << out.violation->monitor << ": "
                          << out.violation->detail << "\n";
            else
                std::cerr << "ok: " << out.steps_executed << " steps, " << out.commits
                          << " commits\n";
            return out.exit_code;
        }
        if (*fuzz_cmd) {
            fp.protocol = sv::protocol_from_name(fuzz_protocol);
            fp.policy = sv::policy_from_name(fuzz_policy);
            auto dots = seeds_range.find("..");
            if (dots == std::string::npos) {
                fp.seed_from = fp.seed_to = std::stoull(seeds_range);
            } else {
                fp.seed_from = std::stoull(seeds_range.substr(0, dots));
                fp.seed_to = std::stoull(seeds_range.substr(dots + 2));
            }
            auto report = sv::run_fuzz(fp);
            std::cout << report.render();
            return report.violations == 0 ? exit_ok : exit_violation;
        }
        if (*ex_cmd) return cmd_example(ex_name, ep, ex_events);
        if (*min_cmd) return cmd_minimize(min_name, mp, min_basis, min_bound);
        if (*eq_cmd) return cmd_equivalent(eq_left, eq_right, eq_basis, eq_bound);
    } catch (const sv::bound_error& e) {
        std::cerr << "bound exhausted: " << e.what() << "\n";
        return exit_bound;
    } catch (const sv::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
