#include "colluscan/matrix.hpp"

#include "colluscan/error.hpp"

#include <cmath>

namespace colluscan {

SymmetricMatrix::SymmetricMatrix(std::vector<std::string> ids)
    : ids_(std::move(ids)), values_(ids_.size() * ids_.size(), 0.0) {}

std::size_t SymmetricMatrix::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i] == id) {
            return i;
        }
    }
    throw Error("unknown student id in matrix: " + id);
}

double SymmetricMatrix::at(std::size_t i, std::size_t j) const {
    return values_[i * ids_.size() + j];
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
    if (i == j) {
        if (value != 0.0) {
            throw InternalError("attempt to set a non-zero diagonal entry");
        }
        return;
    }
    values_[i * ids_.size() + j] = value;
    values_[j * ids_.size() + i] = value;
}

std::vector<double> SymmetricMatrix::upper_triangle() const {
    std::vector<double> out;
    const std::size_t n = size();
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out.push_back(at(i, j));
        }
    }
    return out;
}

std::vector<double> SymmetricMatrix::lower_triangle() const {
    std::vector<double> out;
    const std::size_t n = size();
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            out.push_back(at(i, j));
        }
    }
    return out;
}

void SymmetricMatrix::validate() const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        if (at(i, i) != 0.0) {
            throw Error("matrix diagonal must be zero");
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double v = at(i, j);
            if (!std::isfinite(v)) {
                throw Error("matrix contains a non-finite entry");
            }
            if (v < 0.0) {
                throw Error("matrix contains a negative entry");
            }
            if (at(j, i) != v) {
                throw Error("matrix is not symmetric");
            }
        }
    }
}

} // namespace colluscan
