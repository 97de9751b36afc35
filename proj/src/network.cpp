#include "causalflow/network.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "causalflow/errors.hpp"

namespace causalflow {

bool ParentSet::contains(std::string_view name) const {
    return std::find(members.begin(), members.end(), name) != members.end();
}

ValidatedNetwork::ValidatedNetwork(LinearNetwork net) : net_(std::move(net)) {
    const int n = static_cast<int>(net_.nodes.size());
    if (n == 0) {
        throw UsageError("network needs at least one node");
    }

    std::unordered_map<std::string_view, int> by_name;
    for (int i = 0; i < n; ++i) {
        const NodeSpec& node = net_.nodes[static_cast<std::size_t>(i)];
        if (node.name.empty()) {
            throw DuplicateNode("node with empty name");
        }
        if (!by_name.emplace(node.name, i).second) {
            throw DuplicateNode("duplicate node '" + node.name + "'");
        }
        if (!(node.decay > 0.0)) {
            throw NonPositiveDecay("node '" + node.name +
                                   "' needs decay > 0, got " +
                                   std::to_string(node.decay));
        }
        if (node.noise < 0.0) {
            throw NonPositiveDecay("node '" + node.name +
                                   "' has negative noise");
        }
    }

    parents_of_.assign(static_cast<std::size_t>(n), {});
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    std::vector<int> in_degree(static_cast<std::size_t>(n), 0);
    std::set<std::pair<int, int>> seen_edges;
    std::vector<bool> has_incoming(static_cast<std::size_t>(n), false);

    for (const EdgeSpec& e : net_.edges) {
        auto src_it = by_name.find(e.source);
        auto dst_it = by_name.find(e.target);
        if (src_it == by_name.end()) {
            throw UnknownNode("edge source '" + e.source + "' is not a node");
        }
        if (dst_it == by_name.end()) {
            throw UnknownNode("edge target '" + e.target + "' is not a node");
        }
        const int s = src_it->second, t = dst_it->second;
        if (s == t) {
            throw DuplicateEdge("self edge on '" + e.source +
                                "'; self relaxation belongs in decay");
        }
        if (!seen_edges.emplace(s, t).second) {
            throw DuplicateEdge("duplicate edge " + e.source + " -> " +
                                e.target);
        }
        has_incoming[static_cast<std::size_t>(t)] = true;
        children[static_cast<std::size_t>(s)].push_back(t);
        ++in_degree[static_cast<std::size_t>(t)];
        if (e.gain == 0.0) {
            warnings_.push_back("edge " + e.source + " -> " + e.target +
                                " has zero gain; ignored for parent sets");
        } else {
            parents_of_[static_cast<std::size_t>(t)].push_back(s);
        }
    }

    for (int i = 0; i < n; ++i) {
        const NodeSpec& node = net_.nodes[static_cast<std::size_t>(i)];
        if (!has_incoming[static_cast<std::size_t>(i)] && !(node.noise > 0.0)) {
            throw RootWithoutNoise("root node '" + node.name +
                                   "' needs noise > 0");
        }
    }

    // Kahn's algorithm; leftover nodes mean a feedback cycle.
    std::deque<int> ready;
    for (int i = 0; i < n; ++i) {
        if (in_degree[static_cast<std::size_t>(i)] == 0) {
            ready.push_back(i);
        }
    }
    topo_.reserve(static_cast<std::size_t>(n));
    while (!ready.empty()) {
        int i = ready.front();
        ready.pop_front();
        topo_.push_back(i);
        for (int c : children[static_cast<std::size_t>(i)]) {
            if (--in_degree[static_cast<std::size_t>(c)] == 0) {
                ready.push_back(c);
            }
        }
    }
    if (static_cast<int>(topo_.size()) != n) {
        throw CycleDetected("influence graph has a feedback loop");
    }
}

int ValidatedNetwork::index(std::string_view name) const {
    for (std::size_t i = 0; i < net_.nodes.size(); ++i) {
        if (net_.nodes[i].name == name) {
            return static_cast<int>(i);
        }
    }
    throw UnknownNode("unknown node '" + std::string(name) + "'");
}

Eigen::MatrixXd ValidatedNetwork::drift_matrix() const {
    const int n = size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = -net_.nodes[static_cast<std::size_t>(i)].decay;
    }
    for (const EdgeSpec& e : net_.edges) {
        a(index(e.target), index(e.source)) = e.gain;
    }
    return a;
}

Eigen::VectorXd ValidatedNetwork::noise_diagonal() const {
    const int n = size();
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) {
        q[i] = net_.nodes[static_cast<std::size_t>(i)].noise;
    }
    return q;
}

ParentSet ValidatedNetwork::parents(
    std::span<const std::string> targets) const {
    std::vector<bool> target_mask(static_cast<std::size_t>(size()), false);
    std::vector<bool> reached(static_cast<std::size_t>(size()), false);
    std::deque<int> frontier;
    for (const std::string& t : targets) {
        int i = index(t);
        target_mask[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
    }
    while (!frontier.empty()) {
        int i = frontier.front();
        frontier.pop_front();
        for (int p : parents_of_[static_cast<std::size_t>(i)]) {
            if (!reached[static_cast<std::size_t>(p)]) {
                reached[static_cast<std::size_t>(p)] = true;
                frontier.push_back(p);
            }
        }
    }
    ParentSet result;
    for (int i = 0; i < size(); ++i) {
        if (reached[static_cast<std::size_t>(i)] &&
            !target_mask[static_cast<std::size_t>(i)]) {
            result.members.push_back(name(i));
        }
    }
    return result;
}

ParentSet ValidatedNetwork::parents(
    std::initializer_list<std::string> targets) const {
    std::vector<std::string> v(targets);
    return parents(std::span<const std::string>(v));
}

double ValidatedNetwork::min_decay() const {
    double m = net_.nodes.front().decay;
    for (const NodeSpec& node : net_.nodes) {
        m = std::min(m, node.decay);
    }
    return m;
}

ValidatedNetwork validate(LinearNetwork net) {
    return ValidatedNetwork(std::move(net));
}

namespace {

double parse_float_token(std::string_view token, const std::string& line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(),
                                     value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw UsageError("bad float '" + std::string(token) + "' in line: " +
                         line);
    }
    return value;
}

double parse_keyed_float(std::string_view token, std::string_view key,
                         const std::string& line) {
    if (token.substr(0, key.size()) != key || token.size() <= key.size() ||
        token[key.size()] != '=') {
        throw UsageError("expected " + std::string(key) + "=<float> in line: " +
                         line);
    }
    return parse_float_token(token.substr(key.size() + 1), line);
}

}  // namespace

LinearNetwork parse_network(std::istream& in) {
    LinearNetwork net;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        std::vector<std::string> tok;
        std::string t;
        while (fields >> t) {
            tok.push_back(t);
        }
        if (tok.empty()) {
            continue;
        }
        if (tok[0] == "node") {
            if (tok.size() != 4) {
                throw UsageError("node line needs: node <name> decay=<f> "
                                 "noise=<f>; got: " + line);
            }
            net.nodes.push_back({tok[1], parse_keyed_float(tok[2], "decay", line),
                                 parse_keyed_float(tok[3], "noise", line)});
        } else if (tok[0] == "edge") {
            if (tok.size() != 4) {
                throw UsageError("edge line needs: edge <source> <target> "
                                 "gain=<f>; got: " + line);
            }
            net.edges.push_back({tok[1], tok[2],
                                 parse_keyed_float(tok[3], "gain", line)});
        } else {
            throw UsageError("unknown directive '" + tok[0] + "' in line: " +
                             line);
        }
    }
    return net;
}

LinearNetwork parse_network_text(const std::string& text) {
    std::istringstream in(text);
    return parse_network(in);
}

LinearNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open network file '" + path + "'");
    }
    return parse_network(in);
}

std::string format_network(const LinearNetwork& net) {
    std::ostringstream out;
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const NodeSpec& n : net.nodes) {
        out << "node " << n.name << " decay=" << fmt(n.decay)
            << " noise=" << fmt(n.noise) << "\n";
    }
    for (const EdgeSpec& e : net.edges) {
        out << "edge " << e.source << " " << e.target << " gain=" << fmt(e.gain)
            << "\n";
    }
    return out.str();
}

}  // namespace causalflow
