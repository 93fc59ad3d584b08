#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gridsim::feeder {

struct NodeSpec {
    std::string id;
    double v_ref = 1.0;  // pu; only the source entry acts as the slack reference
};

struct Branch {
    std::string from;
    std::string to;
    double resistance = 0.0;  // pu on the system power base
    double reactance = 0.0;   // pu
};

// Per-phase radial feeder equivalent. Branches are oriented away from the
// source and must form a tree. Loads are weights of the system base load;
// the monitored service transformer hangs at one node (its branch impedance
// lumps line plus transformer) and an optional step regulator boosts the
// receiving node of one branch.
struct FeederModel {
    std::vector<NodeSpec> nodes;
    std::vector<Branch> branches;
    std::string source;
    std::vector<std::pair<std::string, double>> load_weights;  // (node id, fraction), sums to 1
    std::string transformer_node;
    double transformer_s_r_kva = 500.0;
    int regulator_branch = -1;  // index into branches; -1 when absent
    std::string regulated_node;
    double power_base_kva = 3000.0;
    double peak_base_load_kw = 3000.0;

    // Throws InvalidTopology if the id is unknown.
    std::size_t node_index(const std::string& id) const;
    // Load weight of a node, 0 for non-load nodes.
    double weight_of(const std::string& id) const;
};

// Checks every structural invariant (tree rooted at the source, known ids,
// nonnegative impedances, weights summing to 1, valid attachments). Throws
// InvalidTopology for structural faults and DomainError for bad values,
// listing everything found.
void validate(const FeederModel& model);

struct SolverOptions {
    double tolerance = 1e-8;  // max successive voltage change [pu]
    int max_iterations = 50;
    bool record_history = false;  // keep per-iteration mismatch for diagnostics
};

struct PowerFlowSolution {
    std::vector<std::complex<double>> voltage;       // per node, model order [pu]
    std::vector<std::complex<double>> branch_flow;   // sending-end complex power per branch [pu]
    std::vector<std::complex<double>> branch_delivered;  // receiving-end power per branch [pu]
    std::complex<double> total_loss;                 // summed series losses [pu]
    int iterations = 0;
    double max_mismatch = 0.0;       // final successive voltage change [pu]
    double balance_residual = 0.0;   // |injection - loads - losses| [pu]
    std::vector<double> mismatch_history;  // filled when record_history

    double magnitude(std::size_t node) const { return std::abs(voltage[node]); }
    double angle(std::size_t node) const { return std::arg(voltage[node]); }
};

// Forward-backward sweep for the radial model under the given per-node
// complex load (pu, model node order). regulator_ratio multiplies the
// regulated branch's receiving-end voltage (1 + tap * step from the
// regulator state machine). Throws InvalidTopology if the model is not a
// tree and NonConvergence if the sweep fails to settle within the cap.
PowerFlowSolution solve_power_flow(const FeederModel& model,
                                   std::span<const std::complex<double>> nodal_load_pu,
                                   double regulator_ratio = 1.0,
                                   const SolverOptions& options = {});

// Transformer load factor: apparent power delivered through the branch into
// the transformer node, as a fraction of the transformer rating.
double loading_factor(const PowerFlowSolution& solution, const FeederModel& model);

// Embedded 13-node per-phase radial model, 3000 kVA system base, 3000 kW
// peak base load, regulator on the first branch out of the source, 500 kVA
// monitored transformer.
FeederModel build_builtin_feeder();

// JSON round-trip (schema: nodes[], branches[], source, loads[],
// transformer, regulator, bases). Parsing throws ConfigError naming the
// offending field; the parsed model is validated before being returned.
std::string to_json_string(const FeederModel& model, int indent = 2);
FeederModel from_json_string(const std::string& text);

bool operator==(const NodeSpec& a, const NodeSpec& b);
bool operator==(const Branch& a, const Branch& b);
bool operator==(const FeederModel& a, const FeederModel& b);

}  // namespace gridsim::feeder
