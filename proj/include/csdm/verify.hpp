#ifndef CSDM_VERIFY_HPP
#define CSDM_VERIFY_HPP

#include <string>
#include <vector>

namespace csdm {

enum class VerifyLevel { Fast, Full };

struct CheckResult {
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

/// Runs the built-in invariant battery: scalar-reduction equivalence, churn
/// collapse, loss-weight normalization, preconditioning pass-through,
/// closed-form-denoiser optimality, score/finite-difference agreement, grid
/// boundaries and solver convergence order. The Full level adds the
/// Monte-Carlo checks (forward-SDE marginals, vicinal sampling uniformity).
std::vector<CheckResult> run_verification(VerifyLevel level);

}  // namespace csdm

#endif  // CSDM_VERIFY_HPP
