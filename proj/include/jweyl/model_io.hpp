#pragma once

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"

namespace jweyl {

/*
 * YAML model syntax:
 *
 *   family: free
 *   family: linear-potential   c: 1.0
 *   family: geometric-a        q: 0.5
 *   family: table              first: 0   a: [...]   b: [...]
 *   family: shifted            offset: 3  base: { <model> }
 *
 * Windows are written as a two-element sequence [left, right].
 */

inline int yaml_line(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

/// Rejects keys of a mapping that are not in `allowed`.
inline void require_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    if (!node.IsMap()) throw ConfigError(where + ": expected a mapping", yaml_line(node));
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'", yaml_line(kv.first));
    }
}

template <typename T>
T yaml_get(const YAML::Node& parent, const std::string& key, const std::string& where) {
    const YAML::Node n = parent[key];
    if (!n) throw ConfigError(where + ": missing key '" + key + "'", yaml_line(parent));
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type", yaml_line(n));
    }
}

inline CoefficientModel model_from_yaml(const YAML::Node& node) {
    const std::string where = "model";
    if (!node || !node.IsMap()) throw ConfigError("model: expected a mapping", node ? yaml_line(node) : 0);
    const auto family = yaml_get<std::string>(node, "family", where);
    try {
        if (family == "free") {
            require_keys(node, {"family"}, where);
            return CoefficientModel::free();
        }
        if (family == "linear-potential") {
            require_keys(node, {"family", "c"}, where);
            return CoefficientModel::linear_potential(yaml_get<double>(node, "c", where));
        }
        if (family == "geometric-a") {
            require_keys(node, {"family", "q"}, where);
            return CoefficientModel::geometric_a(yaml_get<double>(node, "q", where));
        }
        if (family == "table") {
            require_keys(node, {"family", "first", "a", "b"}, where);
            return CoefficientModel::table(yaml_get<Index>(node, "first", where),
                                           yaml_get<std::vector<double>>(node, "a", where),
                                           yaml_get<std::vector<double>>(node, "b", where));
        }
        if (family == "shifted") {
            require_keys(node, {"family", "offset", "base"}, where);
            return CoefficientModel::shifted(model_from_yaml(node["base"]), yaml_get<Index>(node, "offset", where));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("model: ") + e.what(), yaml_line(node));
    }
    throw ConfigError("model: unknown family '" + family + "'", yaml_line(node["family"]));
}

inline LatticeWindow window_from_yaml(const YAML::Node& node) {
    if (!node || !node.IsSequence() || node.size() != 2)
        throw ConfigError("window: expected [left, right]", node ? yaml_line(node) : 0);
    try {
        return {node[0].as<Index>(), node[1].as<Index>()};
    } catch (const YAML::Exception&) {
        throw ConfigError("window: bounds must be integers", yaml_line(node));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("window: ") + e.what(), yaml_line(node));
    }
}

/// Decimal text with 17 significant digits.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write_seq(std::ostringstream& os, const std::vector<double>& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v[i]);
    os << ']';
}

inline void write_model(std::ostringstream& os, const CoefficientModel& c, const std::string& indent) {
    std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, CoefficientModel::Table>) {
                os << indent << "family: table\n" << indent << "first: " << r.first << '\n' << indent << "a: ";
                write_seq(os, r.a);
                os << '\n' << indent << "b: ";
                write_seq(os, r.b);
                os << '\n';
            } else if constexpr (std::is_same_v<R, CoefficientModel::Free>) {
                os << indent << "family: free\n";
            } else if constexpr (std::is_same_v<R, CoefficientModel::LinearPotential>) {
                os << indent << "family: linear-potential\n" << indent << "c: " << format_double(r.c) << '\n';
            } else if constexpr (std::is_same_v<R, CoefficientModel::GeometricA>) {
                os << indent << "family: geometric-a\n" << indent << "q: " << format_double(r.q) << '\n';
            } else {
                os << indent << "family: shifted\n" << indent << "offset: " << r.offset << '\n' << indent << "base:\n";
                write_model(os, *r.base, indent + "  ");
            }
        },
        c.representation());
}

} // namespace detail

/// YAML text of a model (17 significant digits; parses back to an identical model).
inline std::string model_to_yaml(const CoefficientModel& c) {
    std::ostringstream os;
    detail::write_model(os, c, "");
    return os.str();
}

inline CoefficientModel model_from_yaml_text(const std::string& text) {
    try {
        return model_from_yaml(YAML::Load(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError(std::string("YAML syntax: ") + e.msg, e.mark.line + 1);
    }
}

inline YAML::Node load_yaml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return YAML::Load(in);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ": YAML syntax: " + e.msg, e.mark.line + 1);
    }
}

} // namespace jweyl
