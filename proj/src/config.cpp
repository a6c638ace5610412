/*
 Copyright 2026 The sofpg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "sofpg/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "sofpg/error.hpp"

namespace sofpg {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& text, std::string_view what) {
    const std::string t = trim(text);
    double value = 0.0;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw DomainError(std::string(what) + ": expected a number, got '" + t + "'");
    }
    return value;
}

std::uint64_t parse_count(const std::string& text, std::string_view what) {
    const std::string t = trim(text);
    std::uint64_t value = 0;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        // Accept integral values written in floating-point form, e.g. 1e5.
        const double d = parse_double(t, what);
        if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19) {
            throw DomainError(std::string(what) + ": expected a non-negative integer, got '" + t +
                              "'");
        }
        return static_cast<std::uint64_t>(d);
    }
    return value;
}

bool parse_bool(const std::string& text, std::string_view what) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw DomainError(std::string(what) + ": expected a boolean, got '" + t + "'");
}

Matrix matrix_from_json(const nlohmann::json& j, std::string_view what) {
    if (j.is_number()) {
        Matrix m(1, 1);
        m(0, 0) = j.get<double>();
        return m;
    }
    if (!j.is_array() || j.empty()) {
        throw DomainError(std::string(what) + ": expected a non-empty list of rows");
    }
    const bool nested = j.front().is_array();
    const std::size_t rows = nested ? j.size() : 1;
    const std::size_t cols = nested ? j.front().size() : j.size();
    if (cols == 0) throw DimensionError(std::string(what) + ": rows must not be empty");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const nlohmann::json& row = nested ? j[i] : j;
        if (!row.is_array() || row.size() != cols) {
            throw DimensionError(std::string(what) + ": rows have different lengths");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number()) {
                throw DomainError(std::string(what) + ": entries must be numbers");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
        }
    }
    return m;
}

std::string get_required(const pt::ptree& tree, const std::string& key) {
    auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) throw DomainError("missing required config key '" + key + "'");
    return *v;
}

std::optional<std::string> get_optional(const pt::ptree& tree, const std::string& key) {
    auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return *v;
}

pt::ptree to_tree(const ExperimentConfig& cfg) {
    pt::ptree tree;
    tree.put("plant.A", format_matrix(cfg.plant.a()));
    tree.put("plant.B", format_matrix(cfg.plant.b()));
    tree.put("plant.C", format_matrix(cfg.plant.c()));

    tree.put("cost.Q", format_matrix(cfg.cost.q));
    tree.put("cost.R", format_matrix(cfg.cost.r));
    tree.put("cost.l0", format_number(cfg.cost.l0));
    tree.put("cost.l1", format_number(cfg.cost.l1));
    tree.put("cost.psi", format_number(cfg.cost.psi));
    tree.put("cost.phi", format_number(cfg.cost.phi));
    tree.put("cost.d", format_number(cfg.cost.d));
    tree.put("cost.x0", std::string(to_string(cfg.x0_kind)));

    const StabilizerConfig& s = cfg.stabilizer;
    tree.put("stabilizer.gamma0", format_number(s.gamma0));
    tree.put("stabilizer.zeta", format_number(s.zeta));
    tree.put("stabilizer.eps", format_number(s.eps));
    tree.put("stabilizer.eta", s.eta ? format_number(*s.eta) : std::string("auto"));
    tree.put("stabilizer.tau_e", std::to_string(s.inner.tau_e));
    tree.put("stabilizer.n_e", std::to_string(s.inner.n_e));
    tree.put("stabilizer.r", format_number(s.inner.r));
    tree.put("stabilizer.tau", std::to_string(s.cost.tau));
    tree.put("stabilizer.n", std::to_string(s.cost.n));
    tree.put("stabilizer.seed", std::to_string(s.seed));
    tree.put("stabilizer.max_inner", std::to_string(s.max_inner));
    tree.put("stabilizer.max_outer", std::to_string(s.max_outer));

    tree.put("experiment.runs", std::to_string(cfg.runs));
    tree.put("experiment.oracle_logging", cfg.oracle_logging ? "true" : "false");
    return tree;
}

void check_known_keys(const pt::ptree& tree) {
    static const std::map<std::string, std::set<std::string>> known = {
        {"plant", {"A", "B", "C"}},
        {"cost", {"Q", "R", "l0", "l1", "psi", "phi", "d", "x0"}},
        {"stabilizer",
         {"gamma0", "zeta", "eps", "eta", "tau_e", "n_e", "r", "tau", "n", "seed", "max_inner",
          "max_outer"}},
        {"experiment", {"runs", "oracle_logging"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw DomainError("unknown config section [" + section + "]");
        for (const auto& entry : body) {
            if (!it->second.count(entry.first)) {
                throw DomainError("unknown config key '" + section + "." + entry.first + "'");
            }
        }
    }
}

ExperimentConfig from_tree(const pt::ptree& tree, std::string name) {
    check_known_keys(tree);
    Plant plant(parse_matrix(get_required(tree, "plant.A"), "plant.A"),
                parse_matrix(get_required(tree, "plant.B"), "plant.B"),
                parse_matrix(get_required(tree, "plant.C"), "plant.C"));

    Matrix q = parse_matrix(get_required(tree, "cost.Q"), "cost.Q");
    Matrix r = parse_matrix(get_required(tree, "cost.R"), "cost.R");
    if (q.rows() != static_cast<Eigen::Index>(plant.state_dim()) || q.cols() != q.rows()) {
        throw DimensionError("cost.Q must be " + std::to_string(plant.state_dim()) + "x" +
                             std::to_string(plant.state_dim()));
    }
    if (r.rows() != static_cast<Eigen::Index>(plant.input_dim()) || r.cols() != r.rows()) {
        throw DimensionError("cost.R must be " + std::to_string(plant.input_dim()) + "x" +
                             std::to_string(plant.input_dim()));
    }
    const double d = get_optional(tree, "cost.d")
                         ? parse_double(*get_optional(tree, "cost.d"), "cost.d")
                         : std::sqrt(static_cast<double>(plant.state_dim()));

    // Start from the tightest bounds and let explicit keys override them.
    CostParams cost = CostParams::from_plant(plant, std::move(q), std::move(r), d);
    for (auto [key, field] : std::array{std::pair{"cost.l0", &cost.l0}, std::pair{"cost.l1", &cost.l1},
                                        std::pair{"cost.psi", &cost.psi},
                                        std::pair{"cost.phi", &cost.phi}}) {
        if (auto v = get_optional(tree, key)) *field = parse_double(*v, key);
    }
    cost.validate();

    ExperimentConfig cfg{std::move(name), std::move(plant), std::move(cost), InitStateKind::Gaussian, {}};
    if (auto v = get_optional(tree, "cost.x0")) cfg.x0_kind = parse_init_state_kind(trim(*v));

    StabilizerConfig& s = cfg.stabilizer;
    auto num = [&](const char* key, double& field) {
        if (auto v = get_optional(tree, key)) field = parse_double(*v, key);
    };
    auto count = [&](const char* key, auto& field) {
        if (auto v = get_optional(tree, key)) {
            field = static_cast<std::remove_reference_t<decltype(field)>>(parse_count(*v, key));
        }
    };
    num("stabilizer.gamma0", s.gamma0);
    num("stabilizer.zeta", s.zeta);
    num("stabilizer.eps", s.eps);
    if (auto v = get_optional(tree, "stabilizer.eta")) {
        if (trim(*v) == "auto") {
            s.eta.reset();
        } else {
            s.eta = parse_double(*v, "stabilizer.eta");
        }
    }
    count("stabilizer.tau_e", s.inner.tau_e);
    count("stabilizer.n_e", s.inner.n_e);
    num("stabilizer.r", s.inner.r);
    count("stabilizer.tau", s.cost.tau);
    count("stabilizer.n", s.cost.n);
    count("stabilizer.seed", s.seed);
    count("stabilizer.max_inner", s.max_inner);
    count("stabilizer.max_outer", s.max_outer);
    s.theory = cfg.cost;

    count("experiment.runs", cfg.runs);
    if (auto v = get_optional(tree, "experiment.oracle_logging")) {
        cfg.oracle_logging = parse_bool(*v, "experiment.oracle_logging");
    }
    if (cfg.runs < 1) throw DomainError("experiment.runs must be at least 1");

    // Constructs the sampler once to surface an inconsistent d early.
    InitStateSampler(cfg.x0_kind, cfg.cost.d, cfg.plant.state_dim());
    s.validate();
    return cfg;
}

pt::ptree parse_tree(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw DomainError(std::string(origin) + ": " + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    return tree;
}

}  // namespace

Simulator ExperimentConfig::make_simulator() const {
    return Simulator(plant, cost.q, cost.r, InitStateSampler(x0_kind, cost.d, plant.state_dim()));
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_matrix(const Matrix& m) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i > 0) out += ", ";
        out += "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ", ";
            out += format_number(m(i, j));
        }
        out += "]";
    }
    out += "]";
    return out;
}

Matrix parse_matrix(std::string_view text, std::string_view what) {
    const std::string t = trim(text);
    if (t.empty()) throw DomainError(std::string(what) + ": empty matrix");
    Matrix m;
    if (t.front() == '[') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(t);
        } catch (const nlohmann::json::parse_error& e) {
            throw DomainError(std::string(what) + ": " + e.what());
        }
        m = matrix_from_json(j, what);
    } else {
        std::vector<std::vector<double>> rows;
        std::istringstream lines(t);
        std::string line;
        while (std::getline(lines, line)) {
            std::istringstream cells(line);
            std::vector<double> row;
            std::string cell;
            while (cells >> cell) row.push_back(parse_double(cell, what));
            if (!row.empty()) rows.push_back(std::move(row));
        }
        if (rows.empty()) throw DomainError(std::string(what) + ": empty matrix");
        m.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size()) {
                throw DimensionError(std::string(what) + ": rows have different lengths");
            }
            for (std::size_t j = 0; j < rows[i].size(); ++j) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
            }
        }
    }
    require_finite(m, what);
    return m;
}

ExperimentConfig parse_config(std::string_view text, std::string_view origin) {
    return from_tree(parse_tree(text, origin), std::string(origin));
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read config file '" + path + "'", path);
    return parse_config(buf.str(), path);
}

std::string write_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    pt::write_ini(out, to_tree(cfg));
    return out.str();
}

ExperimentConfig with_override(const ExperimentConfig& cfg, std::string_view key,
                               std::string_view value) {
    const std::string k(key);
    if (k.find('.') == std::string::npos) {
        throw DomainError("override key '" + k + "' must have the form section.key");
    }
    pt::ptree tree = to_tree(cfg);
    tree.put(pt::ptree::path_type(k, '.'), std::string(value));
    return from_tree(tree, cfg.name);
}

std::vector<std::string> preset_names() { return {"numerical-example", "cart-pole"}; }

ExperimentConfig preset(std::string_view name) {
    if (name == "numerical-example") {
        return parse_config(R"([plant]
A = [[4.5, 2.8, 0, 0], [3, 2, 0, 0], [2, 0, 1.4, 0], [1.5, 0, 2, 0.4]]
B = [[2], [2], [1], [0]]
C = [[1, 0, 0.3, 0], [0, 1, 0, 0]]

[cost]
Q = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
R = [[1]]
x0 = gaussian

[stabilizer]
gamma0 = 0.01
zeta = 0.9
eps = 1
eta = 0.001
tau_e = 100
n_e = 60
r = 0.001
tau = 100
n = 20

[experiment]
runs = 20
oracle_logging = true
)",
                            "numerical-example");
    }
    if (name == "cart-pole") {
        // Q is 2 I on the four-dimensional state.
        return parse_config(R"([plant]
A = [[1, 0.02, 0.1, 0], [0, 1.05, 0, 0.1], [0, 0.41, 1, 0.02], [0, 1.02, 0, 1.05]]
B = [[0.01], [0.02], [0.2], [0.41]]
C = [[1, 0, 2, 1], [0, 2, 1, 2]]

[cost]
Q = [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]
R = [[1]]
x0 = gaussian

[stabilizer]
gamma0 = 0.1
zeta = 0.8
eps = 1
eta = 0.001
tau_e = 100
n_e = 40
r = 0.01
tau = 100
n = 20

[experiment]
runs = 10
oracle_logging = true
)",
                            "cart-pole");
    }
    throw DomainError("unknown preset '" + std::string(name) +
                      "' (expected numerical-example or cart-pole)");
}

}  // namespace sofpg
