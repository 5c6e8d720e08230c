#include <structnet/io.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace structnet::io {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

static std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view cell)
{
    cell = trim(cell);
    if (cell.empty()) throw DataError("empty cell");
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw DataError("cannot parse number '" + std::string(cell) + "'");
    }
    if (!std::isfinite(v)) throw DataError("non-finite value '" + std::string(cell) + "'");
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        const auto piece = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        out.emplace_back(trim(piece));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

static std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

static std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

void write_matrix_csv(std::ostream& out, const Matrix<double>& m)
{
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::string& path, const Matrix<double>& m)
{
    auto out = open_out(path);
    write_matrix_csv(out, m);
}

Matrix<double> read_matrix_csv(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split_csv_line(line)) row.push_back(parse_double(cell));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError("ragged matrix CSV at row " + std::to_string(rows.size() + 1));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("empty matrix CSV");
    Matrix<double> m(Index(rows.size()), Index(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
    return m;
}

Matrix<double> read_matrix_csv(const std::string& path)
{
    auto in = open_in(path);
    return read_matrix_csv(in);
}

SymmetricMatrix<double> read_symmetric_csv(const std::string& path)
{
    return SymmetricMatrix<double>(read_matrix_csv(path));
}

std::vector<int> read_labels_csv(const std::string& path)
{
    auto in = open_in(path);
    std::vector<int> labels;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        double v = 0;
        try {
            v = parse_double(cells.back());
        } catch (const DataError&) {
            if (first) {
                first = false;
                continue;
            }
            throw;
        }
        first = false;
        if (v != std::floor(v) || v < 0) throw DataError("label must be a nonnegative integer");
        if (cells.size() >= 2 && parse_double(cells.front()) != double(labels.size())) {
            throw DataError("labels file rows must be ordered by node index");
        }
        labels.push_back(int(v));
    }
    if (labels.empty()) throw DataError("labels file '" + path + "' is empty");
    return labels;
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels)
{
    auto out = open_out(path);
    out << "node,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

void write_text(const std::string& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
}

} // namespace structnet::io
