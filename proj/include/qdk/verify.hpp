#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdk/domain_io.hpp"

namespace qdk {

/// Optional hard requirement on the quadrature defect of the configured nodes.
struct DefectRequirement {
    double tolerance = 1e-6;
    std::vector<cplx> nodes;  // default: the base point
    std::vector<int> orders;  // default: 1 at every node
};

struct VerifyConfig {
    std::string domain_label; // path or "inline", echoed in the report
    json domain;
    int n_points = 256;
    std::optional<cplx> base_point; // default: default_anchor of the grid
    std::uint64_t seed = 1;
    std::optional<DefectRequirement> require_defect;
};

/// Config file:
///   {"domain": "disc.json" | {...domain spec...}, "n_points": 256, "base_point": [re, im],
///    "seed": 1, "require": {"quadrature_defect": {"tolerance": 1e-6, "nodes": [...],
///    "orders": [...]}}}
/// A relative domain path is resolved against base_dir. Unknown keys are rejected.
VerifyConfig parse_verify_config(const json& cfg, const std::filesystem::path& base_dir = {});
VerifyConfig load_verify_config(const std::filesystem::path& path);

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail; // error text when the check could not be evaluated
};

struct VerificationReport {
    std::string domain_label;
    int connectivity = 0;
    bool rational_image = false;
    int n_points = 0;
    cplx base_point;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    bool passed = false;

    /// Fixed-format text: residuals and tolerances as %.3e, no timestamps.
    std::string text() const;
};

/// Runs the identity suite. Checks are evaluated independently and reported in a fixed
/// order; a library error inside one check marks that check failed. Errors that make the
/// configuration itself unusable (bad domain, base point outside) propagate.
VerificationReport run_verification(const VerifyConfig& cfg);

} // namespace qdk
