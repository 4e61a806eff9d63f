// validation.hpp - invariant suite behind the `validate` subcommand and the
// oracle section of the acceptance run.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace excitrans {

struct CheckResult {
    std::string name;
    double measured = 0.0;   ///< worst value over the check's cases
    double tolerance = 0.0;  ///< pass when measured < tolerance
    bool pass = false;
    std::string detail;
};

struct ValidationScale {
    int steady_max_sites = 8;        ///< steady state vs time integration for N = 2 .. this
    double integration_time = 3000;  ///< propagation time of the integration oracle
    std::vector<int> eigen_sizes{1, 2, 3, 5, 10, 25, 50, 100, 200};
    int unitarity_draws = 1000;
    std::vector<int> continuity_sizes{10, 20, 50};  ///< pumped chains audited across g and gamma_P
};

/// Fast settings for the CLI.
[[nodiscard]] ValidationScale quick_validation();

[[nodiscard]] CheckResult check_hermiticity(std::uint64_t seed);
[[nodiscard]] CheckResult check_decoupled_photon(std::uint64_t seed);
[[nodiscard]] CheckResult check_steady_vs_integration(const ValidationScale& scale, std::uint64_t seed);
[[nodiscard]] CheckResult check_obc_eigenvalues(const ValidationScale& scale, std::uint64_t seed);
[[nodiscard]] CheckResult check_unitarity(const ValidationScale& scale, std::uint64_t seed);
[[nodiscard]] CheckResult check_continuity(const ValidationScale& scale, std::uint64_t seed);

[[nodiscard]] std::vector<CheckResult> run_invariants(const ValidationScale& scale, std::uint64_t seed);

}  // namespace excitrans
