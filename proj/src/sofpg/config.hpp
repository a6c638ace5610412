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

#ifndef SOFPG_CONFIG_HPP
#define SOFPG_CONFIG_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sofpg/oracle.hpp"
#include "sofpg/plant.hpp"
#include "sofpg/stabilizer.hpp"

namespace sofpg {

/// A complete experiment: hidden plant, cost, learner parameters and run
/// count.
///
/// Text form is INI with four sections. Matrices are JSON row lists
/// (`A = [[1, 0.5], [0, 2]]`); a bare number is a 1x1 matrix.
///
///   [plant]       A, B, C
///   [cost]        Q, R, l0, l1, psi, phi, d, x0
///   [stabilizer]  gamma0, zeta, eps, eta (number or "auto"), tau_e, n_e, r,
///                 tau, n, seed, max_inner, max_outer
///   [experiment]  runs, oracle_logging
///
/// Omitted l0/l1 default to the eigenvalue range of Q and R, psi/phi to
/// max(1, ||B||) and max(1, ||C||), d to sqrt(n) and x0 to gaussian.
struct ExperimentConfig {
    std::string name;
    Plant plant;
    CostParams cost;
    InitStateKind x0_kind = InitStateKind::Gaussian;
    StabilizerConfig stabilizer;
    std::size_t runs = 1;
    bool oracle_logging = true;

    Simulator make_simulator() const;
};

ExperimentConfig parse_config(std::string_view text, std::string_view origin = "<string>");

/// Throws IoError naming the path when the file cannot be read.
ExperimentConfig load_config(const std::string& path);

/// Serializes with shortest round-trip number formatting, so
/// parse_config(write_config(c)) reproduces every matrix bit for bit.
std::string write_config(const ExperimentConfig& cfg);

/// Re-parses `cfg` with one key ("section.key") replaced by `value`.
ExperimentConfig with_override(const ExperimentConfig& cfg, std::string_view key,
                               std::string_view value);

/// "numerical-example" and "cart-pole".
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// JSON row-list literal, a bare number, or whitespace-separated rows (one
/// row per line).
Matrix parse_matrix(std::string_view text, std::string_view what);
std::string format_matrix(const Matrix& m);

/// Shortest text that parses back to exactly `value`; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_number(double value);

}  // namespace sofpg

#endif  // SOFPG_CONFIG_HPP
