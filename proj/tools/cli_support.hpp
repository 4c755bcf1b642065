#pragma once

// Task configuration, parameter bookkeeping and output for the jweyl CLI.
//
// A task config is a YAML mapping:
//
//   command: spectrum        # optional; must match the subcommand when present
//   operator: { family: free }
//   window: [0, 4]
//   seed: 7                  # the only source of randomness; --seed overrides
//   output: out.csv          # optional; --out overrides; default stdout (relative to the cwd)
//   task: { ... }            # subcommand parameters, unknown keys rejected
//
// Input files named inside a config are read relative to the config's directory;
// files given on the command line are relative to the cwd.
//
// Every parameter read through TaskContext::get is copied into the output
// metadata together with its default, so an output file records how it was made.

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "jweyl/coefficients.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/model_io.hpp"

#ifndef JWEYL_VERSION
#define JWEYL_VERSION "unknown"
#endif

namespace jweyl::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kVerificationFailure = 4 };

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct GlobalOptions {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    bool no_timestamp = false;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// YAML scalar/sequence/map -> JSON, numbers kept as numbers where they parse.
inline nlohmann::json yaml_to_json(const YAML::Node& n) {
    if (!n || n.IsNull()) return nullptr;
    if (n.IsSequence()) {
        auto j = nlohmann::json::array();
        for (const auto& e : n) j.push_back(yaml_to_json(e));
        return j;
    }
    if (n.IsMap()) {
        auto j = nlohmann::json::object();
        for (const auto& kv : n) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
        return j;
    }
    const std::string s = n.Scalar();
    if (n.Tag() != "!") {
        try {
            std::size_t pos = 0;
            const long long i = std::stoll(s, &pos);
            if (pos == s.size()) return i;
        } catch (const std::exception&) {
        }
        try {
            std::size_t pos = 0;
            const double d = std::stod(s, &pos);
            if (pos == s.size()) return d;
        } catch (const std::exception&) {
        }
        if (s == "true") return true;
        if (s == "false") return false;
    }
    return s;
}

class TaskContext {
public:
    TaskContext(std::string command, const GlobalOptions& g, std::set<std::string> task_keys)
        : command_(std::move(command)), global_(g), task_keys_(std::move(task_keys)) {
        if (!g.config_path.empty()) root_ = load_yaml_file(g.config_path);
        if (root_ && !root_.IsNull()) {
            require_keys(root_, {"command", "operator", "window", "seed", "output", "task"}, where("config"));
            if (root_["command"]) {
                const auto c = yaml_get<std::string>(root_, "command", where("config"));
                if (c != command_)
                    throw ConfigError(where("config") + ": command '" + c + "' does not match subcommand '" + command_ + "'",
                                      yaml_line(root_["command"]));
            }
            task_ = root_["task"];
            if (task_) require_keys(task_, task_keys_, where("task"));
        }
        if (g.seed) {
            seed_ = *g.seed;
        } else if (root_ && root_["seed"]) {
            seed_ = yaml_get<std::uint64_t>(root_, "seed", where("config"));
        }
        out_path_ = g.out_path;
        if (out_path_.empty() && root_ && root_["output"]) out_path_ = yaml_get<std::string>(root_, "output", where("config"));
    }

    const std::string& command() const { return command_; }
    std::uint64_t seed() const { return seed_; }

    /// "<config path>: <what>" for line-anchored messages.
    std::string where(const std::string& what) const {
        return global_.config_path.empty() ? what : global_.config_path + ": " + what;
    }

    /// Data paths in a config are relative to the config file's directory.
    std::string resolve(const std::string& path) const {
        const std::filesystem::path p(path);
        if (p.is_absolute() || global_.config_path.empty()) return path;
        return (std::filesystem::path(global_.config_path).parent_path() / p).lexically_normal().string();
    }

    bool has_operator() const { return root_ && root_["operator"]; }

    const CoefficientModel& model() {
        if (!model_) {
            if (!has_operator()) throw ConfigError(where("config") + ": '" + command_ + "' needs an 'operator'");
            model_ = model_from_yaml(root_["operator"]);
            metadata_["operator"] = model_to_yaml(*model_);
        }
        return *model_;
    }

    const LatticeWindow& window() {
        if (!window_) {
            if (!root_ || !root_["window"]) throw ConfigError(where("config") + ": '" + command_ + "' needs a 'window'");
            window_ = window_from_yaml(root_["window"]);
            try {
                model().require_window(*window_);
            } catch (const DomainError& e) {
                throw ConfigError(where("window") + ": " + e.what(), yaml_line(root_["window"]));
            }
            metadata_["window"] = {window_->left(), window_->right()};
        }
        return *window_;
    }

    bool has(const std::string& key) const { return task_ && task_[key]; }

    YAML::Node node(const std::string& key) const { return task_ ? task_[key] : YAML::Node(); }

    /// Task parameter with a default; the value used is recorded.
    template <typename T>
    T get(const std::string& key, const T& fallback) {
        T v = has(key) ? yaml_get<T>(task_, key, where("task")) : fallback;
        parameters_[key] = v;
        return v;
    }

    template <typename T>
    T require(const std::string& key) {
        if (!has(key)) throw ConfigError(where("task") + ": '" + command_ + "' needs '" + key + "'", task_line());
        T v = yaml_get<T>(task_, key, where("task"));
        parameters_[key] = v;
        return v;
    }

    template <typename T>
    std::optional<T> optional(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return require<T>(key);
    }

    /// Records a parameter that was read by hand (structured values).
    void record(const std::string& key, nlohmann::json v) { parameters_[key] = std::move(v); }
    void tolerance(const std::string& key, double v) { tolerances_[key] = v; }
    void note(const std::string& key, nlohmann::json v) { metadata_[key] = std::move(v); }

    int task_line() const { return task_ ? yaml_line(task_) : 0; }

    nlohmann::json metadata() const {
        nlohmann::json m = nlohmann::json::object();
        m["program"] = "jweyl";
        m["version"] = JWEYL_VERSION;
        m["command"] = command_;
        m["seed"] = seed_;
        if (!global_.config_path.empty()) m["config"] = global_.config_path;
        m["parameters"] = parameters_;
        m["tolerances"] = tolerances_;
        for (const auto& [k, v] : metadata_.items()) m[k] = v;
        if (!global_.no_timestamp) m["timestamp"] = utc_timestamp();
        return m;
    }

    void write_text(const std::string& text) const {
        if (out_path_.empty()) {
            std::cout << text;
            std::cout.flush();
            return;
        }
        std::ofstream out(out_path_, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + out_path_ + "'");
        out << text;
    }

    /// {"metadata": ..., "result": ...}
    void emit_json(const nlohmann::json& result) const {
        const nlohmann::json doc{{"metadata", metadata()}, {"result", result}};
        write_text(doc.dump(2) + "\n");
    }

    /// Metadata as "# key: <json>" lines, then the CSV body.
    void emit_csv(const std::string& body) const {
        std::ostringstream os;
        const nlohmann::json m = metadata();
        for (const auto& [k, v] : m.items()) os << "# " << k << ": " << v.dump() << "\n";
        os << body;
        write_text(os.str());
    }

private:
    std::string command_;
    GlobalOptions global_;
    std::set<std::string> task_keys_;
    YAML::Node root_;
    YAML::Node task_;
    std::uint64_t seed_ = kDefaultSeed;
    std::string out_path_;
    std::optional<CoefficientModel> model_;
    std::optional<LatticeWindow> window_;
    nlohmann::json parameters_ = nlohmann::json::object();
    nlohmann::json tolerances_ = nlohmann::json::object();
    nlohmann::json metadata_ = nlohmann::json::object();
};

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

/// [lo, hi, n] from a YAML sequence.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
};

inline Range range_from_yaml(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence() || node.size() != 3) throw ConfigError(where + ": expected [lo, hi, count]", yaml_line(node));
    try {
        Range r{node[0].as<double>(), node[1].as<double>(), node[2].as<std::size_t>()};
        if (!(r.lo <= r.hi) || r.n == 0) throw ConfigError(where + ": need lo <= hi and count >= 1", yaml_line(node));
        return r;
    } catch (const YAML::Exception&) {
        throw ConfigError(where + ": expected numbers [lo, hi, count]", yaml_line(node));
    }
}

inline std::vector<double> linear_points(const Range& r) {
    std::vector<double> v(r.n);
    for (std::size_t i = 0; i < r.n; ++i)
        v[i] = r.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(r.n - 1);
    return v;
}

/// Complex points written as [re, im] pairs.
inline std::vector<cplx> points_from_yaml(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence()) throw ConfigError(where + ": expected a list of [re, im] pairs", yaml_line(node));
    std::vector<cplx> out;
    for (const auto& p : node) {
        if (!p.IsSequence() || p.size() != 2) throw ConfigError(where + ": expected [re, im]", yaml_line(p));
        try {
            out.emplace_back(p[0].as<double>(), p[1].as<double>());
        } catch (const YAML::Exception&) {
            throw ConfigError(where + ": expected numbers [re, im]", yaml_line(p));
        }
    }
    return out;
}

inline nlohmann::json to_json(cplx z) { return {z.real(), z.imag()}; }

inline nlohmann::json to_json(const std::vector<cplx>& v) {
    auto j = nlohmann::json::array();
    for (const cplx z : v) j.push_back(to_json(z));
    return j;
}

} // namespace jweyl::cli
