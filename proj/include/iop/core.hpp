// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace iop {

namespace phys {
inline constexpr double c = 299792458.0;        // m/s
inline constexpr double k_B = 1.380649e-23;     // J/K
inline constexpr double pi = std::numbers::pi;
// 10*log10(e): converts a natural-log power attenuation (nepers of power) to dB
inline constexpr double db_per_neper_power = 4.342944819032518;
} // namespace phys

// Error hierarchy. Each maps onto one CLI exit code class:
// configuration/load problems exit 2, model/calibration problems exit 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadError : ConfigError {
    using ConfigError::ConfigError;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasiblePathError : ModelError {
    using ModelError::ModelError;
};

struct CalibrationError : ModelError {
    using ModelError::ModelError;
};

inline double db_to_linear(double db) { return std::pow(10.0, -db / 10.0); }

} // namespace iop
