#include <structnet/dataset.hpp>
#include <structnet/io.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace structnet {

static bool looks_numeric(const std::string& cell)
{
    const char* b = cell.data();
    const char* e = b + cell.size();
    if (b != e && *b == '+') ++b;
    double v = 0;
    const auto res = std::from_chars(b, e, v);
    return res.ptr == e && res.ec != std::errc::invalid_argument;
}

Dataset::Dataset(Matrix<double> v, std::vector<std::string> names)
    : values(std::move(v)), variable_names(std::move(names))
{
    validate();
}

void Dataset::validate() const
{
    if (n() < 2) throw DataError("dataset needs at least 2 samples, got " + std::to_string(n()));
    if (p() < 2) throw DataError("dataset needs at least 2 variables, got " + std::to_string(p()));
    if (!values.allFinite()) throw DataError("dataset contains non-finite entries");
    if (!variable_names.empty() && Index(variable_names.size()) != p()) {
        throw DataError("dataset has " + std::to_string(p()) + " columns but "
                        + std::to_string(variable_names.size()) + " names");
    }
}

SymmetricMatrix<double> empirical_covariance(const Dataset& data)
{
    data.validate();
    return empirical_covariance(data.values);
}

Dataset read_dataset_csv(std::istream& in)
{
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = io::split_csv_line(line);
        if (rows.empty() && names.empty()) {
            // Header iff the first cell is not a number (nan/inf count as numbers).
            if (!cells.front().empty() && !looks_numeric(cells.front())) {
                names = cells;
                continue;
            }
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            try {
                row.push_back(io::parse_double(c));
            } catch (const DataError& e) {
                throw DataError("line " + std::to_string(lineno) + ": " + e.what());
            }
        }
        const std::size_t width = rows.empty() ? (names.empty() ? row.size() : names.size()) : rows.front().size();
        if (row.size() != width) {
            throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(width)
                            + " columns, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("dataset CSV has no samples");
    Matrix<double> v(Index(rows.size()), Index(rows.front().size()));
    for (Index i = 0; i < v.rows(); ++i)
        for (Index j = 0; j < v.cols(); ++j) v(i, j) = rows[std::size_t(i)][std::size_t(j)];
    return Dataset(std::move(v), std::move(names));
}

Dataset read_dataset_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data)
{
    if (!data.variable_names.empty()) {
        for (std::size_t j = 0; j < data.variable_names.size(); ++j) {
            if (j) out << ',';
            out << data.variable_names[j];
        }
        out << '\n';
    }
    io::write_matrix_csv(out, data.values);
}

void write_dataset_csv(const std::string& path, const Dataset& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_dataset_csv(out, data);
}

} // namespace structnet
