#pragma once
#include <iosfwd>
#include <string>
#include <vector>
#include <structnet/linalg.hpp>

namespace structnet {

/// n x p observations, one sample per row.
struct Dataset
{
    Matrix<double> values;
    std::vector<std::string> variable_names;

    Dataset() = default;
    explicit Dataset(Matrix<double> v, std::vector<std::string> names = {});

    Index n() const noexcept { return values.rows(); }
    Index p() const noexcept { return values.cols(); }

    /// Throws DataError unless n >= 2, p >= 2, all entries finite and names match p.
    void validate() const;
};

SymmetricMatrix<double> empirical_covariance(const Dataset& data);

/**
 * Reads a dataset CSV: optional header row of variable names, one sample per
 * row, '.' as decimal separator. Empty and NaN cells are rejected.
 */
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);

} // namespace structnet
