#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jweyl/errors.hpp"
#include "jweyl/model_io.hpp"
#include "jweyl/spectra.hpp"

namespace jweyl {

// {"atoms": [{"lambda": ..., "weight": ...}], "normalization": "..."}
// nlohmann writes the shortest decimal form that reads back to the same double.

inline nlohmann::json measure_to_json(const SpectralMeasure& rho) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : rho.atoms) atoms.push_back({{"lambda", a.lambda}, {"weight", a.weight}});
    return {{"atoms", atoms}, {"normalization", rho.normalization}};
}

inline SpectralMeasure measure_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
        throw ConfigError("measure JSON: expected an object with an 'atoms' array");
    for (const auto& [key, _] : j.items())
        if (key != "atoms" && key != "normalization") throw ConfigError("measure JSON: unknown key '" + key + "'");
    SpectralMeasure rho;
    if (j.contains("normalization")) {
        if (!j["normalization"].is_string()) throw ConfigError("measure JSON: 'normalization' must be a string");
        rho.normalization = j["normalization"].get<std::string>();
    }
    std::size_t k = 0;
    for (const auto& a : j["atoms"]) {
        if (!a.is_object() || !a.contains("lambda") || !a.contains("weight") || !a["lambda"].is_number() ||
            !a["weight"].is_number() || a.size() != 2)
            throw ConfigError("measure JSON: atom " + std::to_string(k) + " must be {\"lambda\": x, \"weight\": w}");
        rho.atoms.push_back({a["lambda"].get<double>(), a["weight"].get<double>()});
        ++k;
    }
    for (std::size_t i = 0; i < rho.atoms.size(); ++i) {
        if (!(rho.atoms[i].weight > 0.0)) throw ConfigError("measure JSON: atom " + std::to_string(i) + " has weight <= 0");
        if (i > 0 && !(rho.atoms[i].lambda > rho.atoms[i - 1].lambda))
            throw ConfigError("measure JSON: atoms must be strictly increasing in lambda");
    }
    return rho;
}

/// CSV with header "lambda,weight", 17 significant digits.
inline std::string measure_to_csv(const SpectralMeasure& rho) {
    std::ostringstream os;
    os << "lambda,weight\n";
    for (const auto& a : rho.atoms) os << format_double(a.lambda) << ',' << format_double(a.weight) << '\n';
    return os.str();
}

namespace detail {

inline double parse_number(const std::string& cell, int line) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size()) throw ConfigError("CSV: '" + cell + "' is not a number", line);
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r' && ch != ' ') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace detail

/// Reads "lambda,weight" CSV; lines starting with '#' are metadata and skipped.
inline SpectralMeasure measure_from_csv(std::istream& in) {
    std::string line;
    int lineno = 0;
    bool header = false;
    SpectralMeasure rho;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = detail::split_csv_line(line);
        if (!header) {
            if (cells.size() != 2 || cells[0] != "lambda" || cells[1] != "weight")
                throw ConfigError("measure CSV: header must be 'lambda,weight'", lineno);
            header = true;
            continue;
        }
        if (cells.size() != 2) throw ConfigError("measure CSV: expected two columns", lineno);
        rho.atoms.push_back({detail::parse_number(cells[0], lineno), detail::parse_number(cells[1], lineno)});
        if (!(rho.atoms.back().weight > 0.0)) throw ConfigError("measure CSV: weight must be positive", lineno);
        if (rho.atoms.size() > 1 && !(rho.atoms.back().lambda > rho.atoms[rho.atoms.size() - 2].lambda))
            throw ConfigError("measure CSV: lambda must be strictly increasing", lineno);
    }
    if (!header) throw ConfigError("measure CSV: missing header");
    return rho;
}

/// Column table from CSV with a header row; empty cells are allowed at the end of shorter columns.
struct CsvColumns {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return columns[i];
        throw ConfigError("CSV: missing column '" + name + "'");
    }
};

inline CsvColumns read_csv_columns(std::istream& in) {
    CsvColumns t;
    std::string line;
    int lineno = 0;
    std::vector<bool> ended;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = detail::split_csv_line(line);
        if (t.names.empty()) {
            t.names = cells;
            t.columns.resize(cells.size());
            ended.assign(cells.size(), false);
            continue;
        }
        if (cells.size() != t.names.size()) throw ConfigError("CSV: wrong number of columns", lineno);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].empty()) {
                ended[i] = true;
                continue;
            }
            if (ended[i]) throw ConfigError("CSV: column '" + t.names[i] + "' has a gap", lineno);
            t.columns[i].push_back(detail::parse_number(cells[i], lineno));
        }
    }
    if (t.names.empty()) throw ConfigError("CSV: missing header");
    return t;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline SpectralMeasure load_measure(const std::string& path) {
    const std::string text = read_text_file(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        std::istringstream in(text);
        return measure_from_csv(in);
    }
    try {
        auto j = nlohmann::json::parse(text);
        if (j.is_object() && j.contains("result") && j.contains("metadata")) j = j["result"];
        return measure_from_json(j);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": JSON syntax: " + e.what());
    }
}

} // namespace jweyl
