#include <smoothrisk/dataset.hpp>
#include <smoothrisk/errors.hpp>
#include <smoothrisk/format.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace smoothrisk {

namespace {

struct LineError {
    std::string message;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view next_token(std::string_view& rest)
{
    std::size_t b = 0;
    while (b < rest.size() && is_space(rest[b])) {
        ++b;
    }
    std::size_t e = b;
    while (e < rest.size() && !is_space(rest[e])) {
        ++e;
    }
    std::string_view tok = rest.substr(b, e - b);
    rest.remove_prefix(e);
    return tok;
}

double parse_double(std::string_view tok, const char* what)
{
    if (!tok.empty() && tok.front() == '+') {
        tok.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
        throw LineError{std::string("malformed ") + what + " '" + std::string(tok) + "'"};
    }
    if (!std::isfinite(value)) {
        throw LineError{std::string("non-finite ") + what + " '" + std::string(tok) + "'"};
    }
    return value;
}

int parse_label(std::string_view tok)
{
    double v = parse_double(tok, "label");
    if (v == 1.0) {
        return 1;
    }
    if (v == -1.0 || v == 0.0) {
        return -1;
    }
    throw LineError{"unrecognized label '" + std::string(tok) + "' (expected +1/-1 or 1/0)"};
}

} // namespace

Dataset parse_libsvm(std::istream& in, std::optional<Index> dim)
{
    using Triplet = Eigen::Triplet<double, Index>;
    std::vector<Triplet> entries;
    std::vector<int> labels;
    std::vector<std::pair<Index, double>> row;
    Index max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest(line);
        if (auto hash = rest.find('#'); hash != std::string_view::npos) {
            rest = rest.substr(0, hash);
        }
        try {
            std::string_view label_tok = next_token(rest);
            if (label_tok.empty()) {
                continue;
            }
            int label = parse_label(label_tok);
            row.clear();
            for (std::string_view tok = next_token(rest); !tok.empty(); tok = next_token(rest)) {
                std::size_t colon = tok.find(':');
                if (colon == std::string_view::npos) {
                    throw LineError{"feature token '" + std::string(tok) + "' lacks ':'"};
                }
                std::string_view idx_tok = tok.substr(0, colon);
                long long idx = 0;
                auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
                if (ec != std::errc{} || ptr != idx_tok.data() + idx_tok.size() || idx_tok.empty()) {
                    throw LineError{"malformed index '" + std::string(idx_tok) + "'"};
                }
                if (idx < 1) {
                    throw LineError{"index " + std::to_string(idx) + " is below 1"};
                }
                row.emplace_back(static_cast<Index>(idx - 1), parse_double(tok.substr(colon + 1), "value"));
            }
            std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t k = 1; k < row.size(); ++k) {
                if (row[k].first == row[k - 1].first) {
                    throw LineError{"duplicate index " + std::to_string(row[k].first + 1)};
                }
            }
            auto r = static_cast<Index>(labels.size());
            for (const auto& [col, value] : row) {
                entries.emplace_back(r, col, value);
                max_index = std::max(max_index, col + 1);
            }
            labels.push_back(label);
        } catch (const LineError& e) {
            throw DataError("libsvm line " + std::to_string(line_no) + ": " + e.message);
        }
    }
    Index d = max_index;
    if (dim) {
        if (*dim < max_index) {
            throw DataError("libsvm data uses index " + std::to_string(max_index) + " beyond dimension "
                            + std::to_string(*dim));
        }
        d = *dim;
    }
    SparseRows x(static_cast<Index>(labels.size()), d);
    x.setFromTriplets(entries.begin(), entries.end());
    return Dataset(std::move(x), std::move(labels));
}

Dataset parse_libsvm(std::string_view text, std::optional<Index> dim)
{
    std::istringstream in{std::string(text)};
    return parse_libsvm(in, dim);
}

Dataset load_libsvm(const std::string& path, std::optional<Index> dim)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    try {
        return parse_libsvm(in, dim);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_libsvm(std::ostream& out, const Dataset& ds)
{
    const SparseRows& x = ds.features();
    for (Index i = 0; i < ds.size(); ++i) {
        out << (ds.label(i) > 0 ? "+1" : "-1");
        for (SparseRows::InnerIterator it(x, i); it; ++it) {
            out << ' ' << (it.col() + 1) << ':' << format_double(it.value());
        }
        out << '\n';
    }
}

} // namespace smoothrisk
