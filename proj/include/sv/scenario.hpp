#pragma once

#include "sv/network.hpp"
#include "sv/protocol.hpp"

#include <map>
#include <string>
#include <vector>

namespace sv {

inline constexpr const char* tool_version = "0.1.0";

enum class protocol_kind { none, simple_ack, cyclic_ack };

std::string protocol_name(protocol_kind p);
protocol_kind protocol_from_name(const std::string& name); // throws parse_error

std::string fault_name(fault_kind k);
fault_kind fault_from_name(const std::string& name);

std::string policy_name(send_policy p);
send_policy policy_from_name(const std::string& name);

struct fault_spec {
    symbol node;
    fault_kind kind;
};

// Parsed scenario file. Field names are part of the format contract; see the
// README for the schema.
struct scenario {
    protocol_kind protocol = protocol_kind::none;
    std::vector<symbol> nodes;
    std::vector<symbol> group;    // defaults to all nodes
    std::vector<symbol> pi_order; // defaults to group order
    size_t steps = 0;
    uint64_t seed = 0;
    bool scripted = false;
    double delivery_p = 0.5;
    std::vector<schedule_entry> entries; // scripted delivery only
    std::vector<fault_spec> faults;
    std::vector<plan_item> data_plan;
    send_policy policy = send_policy::eager;

    void validate() const; // throws parse_error
    json to_json() const;
    static scenario from_json(const json& j);

    group_config make_group() const;
    std::vector<std::shared_ptr<const node_behavior>> make_behaviors() const;
    std::vector<std::unique_ptr<step_monitor>> make_monitors() const;
};

scenario load_scenario_file(const std::string& path);

// Count of (node, message) commit facts in a final state.
size_t count_commits(const scenario& sc, const network_state& st);

struct run_outcome {
    int exit_code = 0; // 0 ok, 2 first monitor violation
    std::string log_text;
    std::optional<net_violation> violation;
    size_t steps_executed = 0;
    size_t commits = 0;
};

// Execute a scenario, evaluating every applicable monitor after each step,
// and produce the replayable trace log. Stops at the first violation.
run_outcome run_scenario(const scenario& sc);

struct replay_result {
    bool ok = false;
    std::string detail;
};

// Re-execute the log's schedule entries through network_step and check that
// every recorded step line and the footer reproduce byte-for-byte.
replay_result replay_log(const std::string& log_text);

// ---- fuzzing -------------------------------------------------------------------

struct fuzz_params {
    protocol_kind protocol = protocol_kind::simple_ack;
    size_t nodes = 4;
    size_t steps = 1000;
    uint64_t seed_from = 0;
    uint64_t seed_to = 9; // inclusive
    double p = 0.5;
    send_policy policy = send_policy::eager;
    size_t messages = 0; // 0: derived from steps
    int jobs = 1;        // 1 serial, 0 all hardware threads, n explicit
};

struct fuzz_seed_result {
    uint64_t seed = 0;
    bool ok = true;
    std::string monitor; // first violated monitor, when not ok
    size_t commits = 0;
    size_t steps = 0;
};

struct fuzz_report {
    std::vector<fuzz_seed_result> per_seed; // ascending seed order
    size_t violations = 0;
    size_t total_commits = 0;
    std::map<std::string, size_t> violations_by_monitor;
    std::string render() const;
};

// The scenario a fuzz run executes for one seed (deterministic in params).
scenario make_fuzz_scenario(const fuzz_params& fp, uint64_t seed);

// Runs one scenario per seed; seeds run independently (in parallel when jobs
// != 1 and OpenMP is available) and the report is merged in seed order.
fuzz_report run_fuzz(const fuzz_params& fp);

} // namespace sv
