#include "varxl/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace varxl {

MultivariateSeries::MultivariateSeries(Matrix v, std::vector<std::string> names,
                                       std::vector<std::string> stamps)
    : values(std::move(v)), labels(std::move(names)), times(std::move(stamps))
{
}

void MultivariateSeries::validate() const
{
    if (values.rows() < 1 || values.cols() < 1) {
        throw ValidationError("series must have at least one observation and one column");
    }
    if (!values.allFinite()) {
        throw ValidationError("series contains missing or non-finite values");
    }
    if (!labels.empty() && static_cast<Index>(labels.size()) != values.cols()) {
        throw ValidationError("number of series labels does not match number of columns");
    }
    if (!times.empty() && static_cast<Index>(times.size()) != values.rows()) {
        throw ValidationError("number of time stamps does not match number of rows");
    }
}

Vector StandardizedSeries::restore(const Vector& standardized) const
{
    return standardized.cwiseProduct(sds) + means;
}

StandardizedSeries standardize(const MultivariateSeries& series)
{
    series.validate();
    const Index T = series.length();
    if (T < 2) throw ValidationError("standardization needs at least two observations");

    StandardizedSeries out;
    out.means = series.values.colwise().mean().transpose();
    out.sds.resize(series.width());
    out.series = series;
    for (Index j = 0; j < series.width(); ++j) {
        const auto centered = series.values.col(j).array() - out.means(j);
        const double sd = std::sqrt(centered.square().sum() / static_cast<double>(T - 1));
        if (!(sd > 0.0)) {
            const std::string name = series.labels.empty() ? "column " + std::to_string(j)
                                                           : "'" + series.labels[j] + "'";
            throw ValidationError("cannot standardize constant series " + name);
        }
        out.sds(j) = sd;
        out.series.values.col(j) = centered / sd;
    }
    return out;
}

namespace {

std::vector<std::string> split_line(std::string_view line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
            field.remove_suffix(1);
        }
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
            field = field.substr(1, field.size() - 2);
        }
        fields.emplace_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool parse_number(const std::string& text, double& value)
{
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last;
}

} // namespace

MultivariateSeries parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = split_line(line);
        break;
    }
    if (header.empty()) throw ValidationError("CSV input is empty");

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_line(line);
        if (fields.size() != header.size()) {
            throw ValidationError("CSV row " + std::to_string(rows.size() + 2) + " has " +
                                  std::to_string(fields.size()) + " fields, header has " +
                                  std::to_string(header.size()));
        }
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw ValidationError("CSV input has a header but no data rows");

    // time column: first column with any non-numeric entry
    bool has_time = false;
    double scratch = 0.0;
    for (const auto& r : rows) {
        if (!parse_number(r[0], scratch)) {
            has_time = true;
            break;
        }
    }
    const std::size_t first_col = has_time ? 1 : 0;
    if (header.size() <= first_col) throw ValidationError("CSV input has no data columns");

    const Index T = static_cast<Index>(rows.size());
    const Index n = static_cast<Index>(header.size() - first_col);
    MultivariateSeries out;
    out.values.resize(T, n);
    out.labels.assign(header.begin() + static_cast<std::ptrdiff_t>(first_col), header.end());
    for (Index t = 0; t < T; ++t) {
        const auto& r = rows[static_cast<std::size_t>(t)];
        if (has_time) out.times.push_back(r[0]);
        for (Index j = 0; j < n; ++j) {
            const auto& field = r[first_col + static_cast<std::size_t>(j)];
            double value = 0.0;
            if (!parse_number(field, value)) {
                throw ValidationError("CSV row " + std::to_string(t + 2) + ", column '" +
                                      out.labels[static_cast<std::size_t>(j)] +
                                      "': not a number: '" + field + "'");
            }
            out.values(t, j) = value;
        }
    }
    out.validate();
    return out;
}

MultivariateSeries read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

std::string to_csv(const MultivariateSeries& series)
{
    std::ostringstream out;
    out.precision(17);
    const bool has_time = !series.times.empty();
    if (has_time) out << "time,";
    for (Index j = 0; j < series.width(); ++j) {
        if (j > 0) out << ',';
        out << (series.labels.empty() ? "y" + std::to_string(j + 1)
                                      : series.labels[static_cast<std::size_t>(j)]);
    }
    out << '\n';
    for (Index t = 0; t < series.length(); ++t) {
        if (has_time) out << series.times[static_cast<std::size_t>(t)] << ',';
        for (Index j = 0; j < series.width(); ++j) {
            if (j > 0) out << ',';
            out << series.values(t, j);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace varxl
