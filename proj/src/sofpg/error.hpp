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

#ifndef SOFPG_ERROR_HPP
#define SOFPG_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace sofpg {

enum class ErrorKind {
    Dimension,
    Domain,
    Instability,
    Divergence,
    Numerical,
    Io,
};

/// Base of every exception thrown by the library. The kind maps one-to-one
/// onto the status codes of the C interface.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what)
        : Error(ErrorKind::Dimension, what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what)
        : Error(ErrorKind::Domain, what) {}
};

/// sqrt(gamma) * rho(Acl) >= 1: the requested Lyapunov solution does not exist.
class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double damped_radius)
        : Error(ErrorKind::Instability, what), damped_radius_(damped_radius) {}

    double damped_radius() const noexcept { return damped_radius_; }

private:
    double damped_radius_;
};

/// A rollout left the representable range. `step` is the time index at which
/// the state norm crossed the guard; trajectory/sign are filled in by the
/// estimators when the failing rollout belongs to a batch.
class DivergenceError : public Error {
public:
    static constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

    DivergenceError(const std::string& what, std::size_t step,
                    std::size_t trajectory = kNoIndex, int sign = 0)
        : Error(ErrorKind::Divergence, what),
          step_(step),
          trajectory_(trajectory),
          sign_(sign) {}

    std::size_t step() const noexcept { return step_; }
    std::size_t trajectory() const noexcept { return trajectory_; }
    int sign() const noexcept { return sign_; }

private:
    std::size_t step_;
    std::size_t trajectory_;
    int sign_;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t iterations)
        : Error(ErrorKind::Numerical, what), iterations_(iterations) {}

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

class IoError : public Error {
public:
    IoError(const std::string& what, std::string path)
        : Error(ErrorKind::Io, what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace sofpg

#endif  // SOFPG_ERROR_HPP
