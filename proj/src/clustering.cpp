#include "colluscan/clustering.hpp"

#include "colluscan/error.hpp"
#include "colluscan/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace colluscan {

std::string to_string(Linkage linkage) {
    switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    }
    throw InternalError("unhandled linkage value");
}

Linkage linkage_from_string(const std::string& name) {
    if (name == "single") return Linkage::Single;
    if (name == "complete") return Linkage::Complete;
    if (name == "average") return Linkage::Average;
    throw Error("unknown linkage: " + name);
}

Dendrogram::Dendrogram(std::vector<std::string> leaves, std::vector<DendrogramNode> nodes)
    : leaves_(std::move(leaves)), nodes_(std::move(nodes)) {
    validate();
}

const DendrogramNode& Dendrogram::node(int node_id) const {
    const int n = static_cast<int>(leaves_.size());
    if (node_id < n || node_id >= n + static_cast<int>(nodes_.size())) {
        throw InternalError("node id out of range: " + std::to_string(node_id));
    }
    return nodes_[static_cast<std::size_t>(node_id - n)];
}

int Dendrogram::root_id() const {
    return static_cast<int>(leaves_.size() + nodes_.size()) - 1;
}

double Dendrogram::height_of(int node_id) const {
    if (node_id < static_cast<int>(leaves_.size())) {
        return 0.0;
    }
    return node(node_id).height;
}

void Dendrogram::validate() const {
    const std::size_t n = leaves_.size();
    if (n < 2) {
        throw Error("dendrogram needs at least 2 leaves");
    }
    if (nodes_.size() != n - 1) {
        throw InternalError("dendrogram has " + std::to_string(nodes_.size()) +
                            " internal nodes for " + std::to_string(n) + " leaves");
    }
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const DendrogramNode& nd = nodes_[k];
        const int id = static_cast<int>(n + k);
        if (nd.left < 0 || nd.right < 0 || nd.left >= id || nd.right >= id) {
            throw InternalError("node " + std::to_string(id) + " has invalid children");
        }
        if (!std::isfinite(nd.height) || nd.height < 0.0) {
            throw InternalError("node " + std::to_string(id) + " has invalid height");
        }
        if (nd.height + 1e-12 < height_of(nd.left) || nd.height + 1e-12 < height_of(nd.right)) {
            throw InternalError("height inversion at node " + std::to_string(id));
        }
        auto member_set = [&](int child) {
            if (child < static_cast<int>(n)) {
                return std::vector<int>{child};
            }
            return node(child).members;
        };
        std::vector<int> expected;
        const auto left_members = member_set(nd.left);
        const auto right_members = member_set(nd.right);
        std::merge(left_members.begin(), left_members.end(), right_members.begin(),
                   right_members.end(), std::back_inserter(expected));
        if (expected != nd.members) {
            throw InternalError("member set mismatch at node " + std::to_string(id));
        }
    }
    if (nodes_.back().members.size() != n) {
        throw InternalError("root does not cover all leaves");
    }
}

namespace {

struct ActiveCluster {
    int node_id;           // leaf index or internal node id
    int rep;               // smallest leaf index, the tie-break identity
    std::size_t size;
    std::vector<int> members;
};

} // namespace

Dendrogram agglomerate(const DissimilarityMatrix& matrix, Linkage linkage) {
    matrix.validate();
    const std::size_t n = matrix.size();
    if (n < 2) {
        throw Error("clustering needs at least 2 students");
    }

    // Active clusters stay sorted by representative leaf index, so scanning
    // pairs in list order visits tie-break keys in lexicographic order and a
    // strict < comparison lands on the smallest key among equal distances.
    std::vector<ActiveCluster> active;
    active.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        active.push_back({static_cast<int>(i), static_cast<int>(i), 1, {static_cast<int>(i)}});
    }
    // dist[a][b]: current inter-cluster distances, indexed by active position.
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dist[i][j] = matrix.at(i, j);
        }
    }

    std::vector<DendrogramNode> nodes;
    nodes.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        const std::size_t m = active.size();
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < m; ++a) {
            for (std::size_t b = a + 1; b < m; ++b) {
                if (dist[a][b] < best_d) {
                    best_d = dist[a][b];
                    best_a = a;
                    best_b = b;
                }
            }
        }

        DendrogramNode merged;
        merged.left = active[best_a].node_id;
        merged.right = active[best_b].node_id;
        merged.height = best_d;
        std::merge(active[best_a].members.begin(), active[best_a].members.end(),
                   active[best_b].members.begin(), active[best_b].members.end(),
                   std::back_inserter(merged.members));

        const std::size_t size_a = active[best_a].size;
        const std::size_t size_b = active[best_b].size;

        // Lance-Williams update into slot best_a, then drop slot best_b.
        for (std::size_t c = 0; c < m; ++c) {
            if (c == best_a || c == best_b) {
                continue;
            }
            double updated = 0.0;
            switch (linkage) {
            case Linkage::Single:
                updated = std::min(dist[best_a][c], dist[best_b][c]);
                break;
            case Linkage::Complete:
                updated = std::max(dist[best_a][c], dist[best_b][c]);
                break;
            case Linkage::Average:
                updated = (static_cast<double>(size_a) * dist[best_a][c] +
                           static_cast<double>(size_b) * dist[best_b][c]) /
                          static_cast<double>(size_a + size_b);
                break;
            }
            dist[best_a][c] = updated;
            dist[c][best_a] = updated;
        }
        // Compact row/column best_b out of the active distance table; the
        // table stays indexed by active position.
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = best_b; c + 1 < m; ++c) {
                dist[r][c] = dist[r][c + 1];
            }
        }
        for (std::size_t r = best_b; r + 1 < m; ++r) {
            dist[r] = std::move(dist[r + 1]);
        }

        active[best_a].node_id = static_cast<int>(n + nodes.size());
        active[best_a].size = size_a + size_b;
        active[best_a].members = merged.members;
        // rep stays: best_a precedes best_b, so its rep is already the minimum.
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));

        nodes.push_back(std::move(merged));
    }

    std::vector<std::string> leaves = matrix.ids();
    return Dendrogram(std::move(leaves), std::move(nodes));
}

CopheneticMatrix cophenetic_matrix(const Dendrogram& tree) {
    const std::size_t n = tree.leaf_count();
    CopheneticMatrix result(tree.leaves());
    auto members_of = [&](int child) -> std::vector<int> {
        if (child < static_cast<int>(n)) {
            return {child};
        }
        return tree.node(child).members;
    };
    for (const DendrogramNode& node : tree.nodes()) {
        const auto left = members_of(node.left);
        const auto right = members_of(node.right);
        for (int x : left) {
            for (int y : right) {
                result.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y), node.height);
            }
        }
    }
    return result;
}

double cophenetic_correlation(const SymmetricMatrix& dissimilarity,
                              const CopheneticMatrix& cophenetic) {
    if (dissimilarity.ids() != cophenetic.ids()) {
        throw Error("cophenetic correlation inputs have mismatched ids");
    }
    if (dissimilarity.size() < 3) {
        throw Error("cophenetic correlation needs at least 3 students");
    }
    const auto d = dissimilarity.upper_triangle();
    const auto t = cophenetic.upper_triangle();
    const double n = static_cast<double>(d.size());
    const double d_mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
    const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / n;
    double cross = 0.0;
    double d_ss = 0.0;
    double t_ss = 0.0;
    for (std::size_t p = 0; p < d.size(); ++p) {
        const double dd = d[p] - d_mean;
        const double tt = t[p] - t_mean;
        cross += dd * tt;
        d_ss += dd * dd;
        t_ss += tt * tt;
    }
    if (d_ss == 0.0 || t_ss == 0.0) {
        throw Error("degenerate correlation input: zero variance");
    }
    return cross / std::sqrt(d_ss * t_ss);
}

LinkageSelection select_linkage(const DissimilarityMatrix& matrix) {
    if (matrix.size() < 3) {
        throw Error("linkage selection needs at least 3 students");
    }
    LinkageSelection selection;
    for (Linkage linkage : {Linkage::Single, Linkage::Complete, Linkage::Average}) {
        const Dendrogram tree = agglomerate(matrix, linkage);
        selection.c_values[static_cast<int>(linkage)] =
            cophenetic_correlation(matrix, cophenetic_matrix(tree));
    }
    // Tie precedence: average > single > complete.
    selection.chosen = Linkage::Average;
    if (selection.c_of(Linkage::Single) > selection.c_of(selection.chosen)) {
        selection.chosen = Linkage::Single;
    }
    if (selection.c_of(Linkage::Complete) > selection.c_of(selection.chosen)) {
        selection.chosen = Linkage::Complete;
    }
    return selection;
}

std::vector<LowCluster> lowest_clusters(const Dendrogram& tree, int k) {
    const int n_nodes = static_cast<int>(tree.nodes().size());
    if (k < 1 || k > n_nodes) {
        throw Error("k must lie in [1, " + std::to_string(n_nodes) + "], got " +
                    std::to_string(k));
    }
    std::vector<int> order(static_cast<std::size_t>(n_nodes));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return tree.nodes()[static_cast<std::size_t>(a)].height <
               tree.nodes()[static_cast<std::size_t>(b)].height;
    });
    std::vector<LowCluster> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
        const int idx = order[static_cast<std::size_t>(r)];
        const DendrogramNode& node = tree.nodes()[static_cast<std::size_t>(idx)];
        LowCluster cluster;
        cluster.node_id = static_cast<int>(tree.leaf_count()) + idx;
        cluster.height = node.height;
        for (int leaf : node.members) {
            cluster.member_ids.push_back(tree.leaves()[static_cast<std::size_t>(leaf)]);
        }
        out.push_back(std::move(cluster));
    }
    return out;
}

bool is_ultrametric(const SymmetricMatrix& matrix, double tolerance) {
    const std::size_t n = matrix.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                if (matrix.at(i, k) > std::max(matrix.at(i, j), matrix.at(j, k)) + tolerance) {
                    return false;
                }
            }
        }
    }
    return true;
}

namespace {

// Newick reserves these; such labels get single-quoted with '' escapes.
bool newick_needs_quoting(const std::string& label) {
    return label.find_first_of(" \t(),:;'[]") != std::string::npos || label.empty();
}

std::string newick_label(const std::string& label) {
    if (!newick_needs_quoting(label)) {
        return label;
    }
    std::string quoted = "'";
    for (char c : label) {
        quoted += c;
        if (c == '\'') {
            quoted += '\'';
        }
    }
    quoted += "'";
    return quoted;
}

void newick_recurse(const Dendrogram& tree, int node_id, double parent_height,
                    std::string& out) {
    const int n = static_cast<int>(tree.leaf_count());
    if (node_id < n) {
        out += newick_label(tree.leaves()[static_cast<std::size_t>(node_id)]);
    } else {
        const DendrogramNode& node = tree.node(node_id);
        out += "(";
        newick_recurse(tree, node.left, node.height, out);
        out += ",";
        newick_recurse(tree, node.right, node.height, out);
        out += ")";
    }
    if (parent_height >= 0.0) {
        out += ":" + format_g17(parent_height - tree.height_of(node_id));
    }
}

} // namespace

std::string dendrogram_to_newick(const Dendrogram& tree) {
    std::string out;
    newick_recurse(tree, tree.root_id(), -1.0, out);
    out += ";\n";
    return out;
}

std::string dendrogram_to_json(const Dendrogram& tree) {
    nlohmann::ordered_json doc;
    doc["leaves"] = tree.leaves();
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < tree.nodes().size(); ++k) {
        const DendrogramNode& node = tree.nodes()[k];
        nlohmann::ordered_json entry;
        entry["id"] = tree.leaf_count() + k;
        entry["left"] = node.left;
        entry["right"] = node.right;
        entry["height"] = node.height;
        entry["members"] = node.members;
        nodes.push_back(std::move(entry));
    }
    doc["nodes"] = std::move(nodes);
    return doc.dump(2) + "\n";
}

Dendrogram dendrogram_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("dendrogram JSON: ") + e.what());
    }
    try {
        std::vector<std::string> leaves = doc.at("leaves").get<std::vector<std::string>>();
        std::vector<DendrogramNode> nodes;
        for (const auto& entry : doc.at("nodes")) {
            DendrogramNode node;
            node.left = entry.at("left").get<int>();
            node.right = entry.at("right").get<int>();
            node.height = entry.at("height").get<double>();
            node.members = entry.at("members").get<std::vector<int>>();
            nodes.push_back(std::move(node));
        }
        return Dendrogram(std::move(leaves), std::move(nodes));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("dendrogram JSON: ") + e.what());
    }
}

} // namespace colluscan
