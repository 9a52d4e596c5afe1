#pragma once

#include "colluscan/matrix.hpp"

#include <array>
#include <string>
#include <vector>

namespace colluscan {

enum class Linkage { Single, Complete, Average };

std::string to_string(Linkage linkage);
Linkage linkage_from_string(const std::string& name);

// Internal merge node. Node ids: leaves occupy 0..N-1 in matrix order,
// internal nodes N..2N-2 in merge order.
struct DendrogramNode {
    int left = -1;
    int right = -1;
    double height = 0.0;
    std::vector<int> members; // sorted leaf indices
};

class Dendrogram {
public:
    Dendrogram(std::vector<std::string> leaves, std::vector<DendrogramNode> nodes);

    std::size_t leaf_count() const { return leaves_.size(); }
    const std::vector<std::string>& leaves() const { return leaves_; }
    const std::vector<DendrogramNode>& nodes() const { return nodes_; }
    const DendrogramNode& node(int node_id) const; // internal ids only
    int root_id() const;
    double height_of(int node_id) const; // 0 for leaves

    // N-1 internal nodes, member sets = union of children, heights
    // non-decreasing from child to parent.
    void validate() const;

private:
    std::vector<std::string> leaves_;
    std::vector<DendrogramNode> nodes_;
};

// Stored-matrix agglomeration with Lance-Williams updates. Average linkage is
// UPGMA: d(A+B, C) = (|A| d(A,C) + |B| d(B,C)) / (|A|+|B|) -- the
// "unweighted" refers to objects, so cluster sizes do enter the update.
// Equal minimum distances are broken toward the pair whose clusters have the
// lexicographically smallest (smallest leaf index, other smallest leaf index)
// key.
Dendrogram agglomerate(const DissimilarityMatrix& matrix, Linkage linkage);

// t(i,i') = height of the lowest node containing both leaves.
CopheneticMatrix cophenetic_matrix(const Dendrogram& tree);

// Pearson correlation between matrix and cophenetic values over the strict
// upper triangle. Throws on mismatched ids, fewer than 3 leaves, or zero
// variance on either side.
double cophenetic_correlation(const SymmetricMatrix& dissimilarity,
                              const CopheneticMatrix& cophenetic);

struct LinkageSelection {
    Linkage chosen = Linkage::Average;
    // Indexed by Linkage enum order: single, complete, average.
    std::array<double, 3> c_values{};
    double c_of(Linkage linkage) const { return c_values[static_cast<int>(linkage)]; }
};

// Runs all three linkages and picks the one with the highest cophenetic
// correlation; exact ties resolve average > single > complete.
LinkageSelection select_linkage(const DissimilarityMatrix& matrix);

struct LowCluster {
    int node_id = -1;
    double height = 0.0;
    std::vector<std::string> member_ids;
};

// The k internal nodes of smallest height, ascending, ties by merge order.
std::vector<LowCluster> lowest_clusters(const Dendrogram& tree, int k);

// Exhaustive triple check, O(N^3).
bool is_ultrametric(const SymmetricMatrix& matrix, double tolerance);

// Newick with branch lengths = parent height minus child height.
std::string dendrogram_to_newick(const Dendrogram& tree);

std::string dendrogram_to_json(const Dendrogram& tree);
Dendrogram dendrogram_from_json(const std::string& text);

} // namespace colluscan
