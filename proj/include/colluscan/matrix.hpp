#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace colluscan {

// Dense symmetric matrix keyed by student ids. Writes mirror across the
// diagonal; the diagonal itself stays zero.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::vector<std::string> ids);

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    std::size_t index_of(const std::string& id) const;

    double at(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);

    // Strict upper triangle, row-major: (0,1), (0,2), ..., (N-2,N-1).
    std::vector<double> upper_triangle() const;
    // Strict lower triangle, row-major: (1,0), (2,0), (2,1), ...
    std::vector<double> lower_triangle() const;

    // Finite, non-negative entries and a zero diagonal. Symmetry holds by
    // construction; external data fed through set() cannot break it.
    void validate() const;

private:
    std::vector<std::string> ids_;
    std::vector<double> values_;
};

struct AttributeNormalization {
    std::string attribute; // "points:<subtask_id>" or "events:<subtask_id>"
    double constant = 0.0; // divisor applied; meaningless when degenerate
    bool degenerate = false;
};

struct DissimilarityMatrix : SymmetricMatrix {
    DissimilarityMatrix() = default;
    explicit DissimilarityMatrix(std::vector<std::string> ids)
        : SymmetricMatrix(std::move(ids)) {}

    std::string scheme_hash;
    std::vector<AttributeNormalization> normalization_constants;
};

using CopheneticMatrix = SymmetricMatrix;

} // namespace colluscan
