#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace causalflow {

// One node of a linear Langevin network: dv_i/dt = -decay_i v_i + (incoming
// gain terms) + sqrt(noise_i) * white noise.
struct NodeSpec {
    std::string name;
    double decay = 0.0;  // 1/time; for a root node this is 1/relaxation_time
    double noise = 0.0;  // diffusion coefficient, variance/time
};

// Directed influence source -> target entering the target's drift with the
// given gain (1/time). Self loops live in NodeSpec::decay, never here.
struct EdgeSpec {
    std::string source;
    std::string target;
    double gain = 0.0;
};

struct LinearNetwork {
    std::vector<NodeSpec> nodes;
    std::vector<EdgeSpec> edges;
};

// Ancestor set used to condition pairwise measures; excludes the query nodes.
struct ParentSet {
    std::vector<std::string> members;  // in declared node order

    bool contains(std::string_view name) const;
    bool empty() const { return members.empty(); }
};

// A LinearNetwork that passed validation: unique node names, acyclic
// influence graph, strictly positive decays, positive noise on root nodes.
// Immutable afterwards; cheap to copy and safe to share across threads.
class ValidatedNetwork {
  public:
    // Throws CycleDetected, NonPositiveDecay, RootWithoutNoise,
    // DuplicateNode, DuplicateEdge or UnknownNode.
    explicit ValidatedNetwork(LinearNetwork net);

    const LinearNetwork& definition() const { return net_; }
    int size() const { return static_cast<int>(net_.nodes.size()); }

    int index(std::string_view name) const;  // throws UnknownNode
    const std::string& name(int i) const { return net_.nodes[i].name; }

    // Node indices in an order where every edge source precedes its target.
    std::span<const int> topological_order() const { return topo_; }

    // Edges with gain exactly zero are structurally present but flagged;
    // parent computation prunes them.
    const std::vector<std::string>& warnings() const { return warnings_; }

    // Drift matrix in declared node order: -decay on the diagonal,
    // gain(source->target) at (target, source). Its spectrum is exactly the
    // negated decays; permuting to topological order makes it lower
    // triangular.
    Eigen::MatrixXd drift_matrix() const;
    Eigen::VectorXd noise_diagonal() const;

    // Ancestor closure of the targets in the influence graph (zero-gain
    // edges pruned), minus the targets themselves.
    ParentSet parents(std::span<const std::string> targets) const;
    ParentSet parents(std::initializer_list<std::string> targets) const;

    double min_decay() const;
    // Longest time constant 1/decay; the natural scale for lag grids.
    double characteristic_time() const { return 1.0 / min_decay(); }

  private:
    LinearNetwork net_;
    std::vector<int> topo_;
    std::vector<std::string> warnings_;
    std::vector<std::vector<int>> parents_of_;  // direct, zero-gain pruned
};

// Validation as a free function; applying it to an already validated
// network's definition returns an equivalent object (idempotent).
ValidatedNetwork validate(LinearNetwork net);

// Plain-text network format, line oriented, '#' starts a comment:
//   node <name> decay=<float> noise=<float>
//   edge <source> <target> gain=<float>
// Floats are parsed locale-independently and accept scientific notation.
LinearNetwork parse_network(std::istream& in);
LinearNetwork parse_network_text(const std::string& text);
LinearNetwork load_network(const std::string& path);
std::string format_network(const LinearNetwork& net);

}  // namespace causalflow
