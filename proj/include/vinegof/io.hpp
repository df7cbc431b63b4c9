#pragma once

// File formats: model JSON (lower-triangular matrices, row-major, upper
// cells null), data CSV (d columns of decimal floats in (0,1), optional
// single header row, LF line endings), and test-report JSON.

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vinegof/errors.hpp"
#include "vinegof/rvine.hpp"

namespace vinegof {

using json = nlohmann::json;

// ---- CSV --------------------------------------------------------------------

namespace io_detail {

inline std::optional<double> parse_double(std::string_view tok) {
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
    if (tok.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
    return value;
}

inline std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

} // namespace io_detail

inline SampleMatrix read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open data file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t ncols = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto toks = io_detail::split_csv(line);
        std::vector<double> row;
        row.reserve(toks.size());
        bool numeric = true;
        for (const auto& t : toks) {
            const auto v = io_detail::parse_double(t);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (lineno == 1) continue;  // single optional header row
            throw FormatError(path + ": non-numeric value on line " + std::to_string(lineno));
        }
        if (ncols == 0) ncols = row.size();
        if (row.size() != ncols)
            throw FormatError(path + ": inconsistent column count on line " + std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError(path + ": no data rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < ncols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    try {
        return SampleMatrix::from_matrix(std::move(m));
    } catch (const DomainError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline void write_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw FormatError("cannot write data file: " + path);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << io_detail::format_double(m(r, c));
        }
        out << '\n';
    }
}

// ---- model JSON ---------------------------------------------------------------

inline json model_to_json(const RVineSpec& spec) {
    const int d = spec.dim();
    json matrix = json::array(), families = json::array(), params = json::array(), params2 = json::array();
    for (int k = 0; k < d; ++k) {
        json mrow = json::array(), frow = json::array(), prow = json::array(), qrow = json::array();
        for (int i = 0; i < d; ++i) {
            if (i > k) {
                mrow.push_back(nullptr);
                frow.push_back(nullptr);
                prow.push_back(nullptr);
                qrow.push_back(nullptr);
                continue;
            }
            mrow.push_back(spec.matrix(k, i));
            if (i == k) {
                frow.push_back(nullptr);
                prow.push_back(nullptr);
                qrow.push_back(nullptr);
            } else {
                const auto& pc = spec.pair(k, i);
                frow.push_back(family_code(pc));
                prow.push_back(pc.params.empty() ? json(nullptr) : json(pc.params[0]));
                qrow.push_back(pc.params.size() > 1 ? json(pc.params[1]) : json(nullptr));
            }
        }
        matrix.push_back(std::move(mrow));
        families.push_back(std::move(frow));
        params.push_back(std::move(prow));
        params2.push_back(std::move(qrow));
    }
    return json{{"d", d}, {"matrix", matrix}, {"families", families}, {"params", params}, {"params2", params2}};
}

inline RVineSpec model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("d") || !j.contains("matrix"))
        throw FormatError("model JSON: missing required fields");
    const int d = j.at("d").get<int>();
    if (d < 1 || d > 64) throw FormatError("model JSON: unreasonable dimension");
    auto cell = [&](const json& mat, int k, int i) -> const json& {
        if (!mat.is_array() || static_cast<int>(mat.size()) != d) throw FormatError("model JSON: matrix shape");
        const json& row = mat.at(static_cast<std::size_t>(k));
        if (!row.is_array() || static_cast<int>(row.size()) != d) throw FormatError("model JSON: matrix row shape");
        return row.at(static_cast<std::size_t>(i));
    };
    RVineMatrix m(d, std::vector<int>(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0));
    for (int k = 0; k < d; ++k)
        for (int i = 0; i <= k; ++i) {
            const json& c = cell(j.at("matrix"), k, i);
            if (!c.is_number_integer()) throw FormatError("model JSON: structure cell not an integer");
            m(k, i) = c.get<int>();
        }
    auto spec = RVineSpec::make(std::move(m));
    const bool has_fam = j.contains("families");
    for (int k = 1; k < d; ++k)
        for (int i = 0; i < k; ++i) {
            int code = 0;
            if (has_fam) {
                const json& c = cell(j.at("families"), k, i);
                if (!c.is_null()) code = c.get<int>();
            }
            const auto [fam, rot] = decode_family(code);
            std::vector<double> ps;
            const int np = param_count(fam);
            if (np >= 1) {
                const json& c = cell(j.at("params"), k, i);
                if (c.is_null()) throw FormatError("model JSON: missing parameter for a parametric cell");
                ps.push_back(c.get<double>());
            }
            if (np >= 2) {
                const json& c = cell(j.at("params2"), k, i);
                if (c.is_null()) throw FormatError("model JSON: missing second parameter");
                ps.push_back(c.get<double>());
            }
            try {
                spec.pair(k, i) = PairCopulaSpec::make(fam, std::move(ps), rot);
            } catch (const DomainError& e) {
                throw FormatError("model JSON: cell (" + std::to_string(k + 1) + "," + std::to_string(i + 1) +
                                  "): " + e.what());
            }
        }
    return spec;
}

inline RVineSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return j;
}

} // namespace vinegof
