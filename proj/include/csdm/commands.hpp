#ifndef CSDM_COMMANDS_HPP
#define CSDM_COMMANDS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "csdm/config.hpp"
#include "csdm/eval.hpp"
#include "csdm/verify.hpp"

namespace csdm {

/// Environment variable that overrides the configured output root.
inline constexpr const char* kOutRootEnv = "CSDM_OUT_ROOT";

/// Resolved output root (env override, then config), with the standard
/// data/, params/, samples/, reports/ layout created on demand.
std::filesystem::path output_root(const RunConfig& cfg);

struct GenDataResult {
    std::filesystem::path csv_path;
    std::filesystem::path report_path;
    Eigen::Index rows = 0;
};
GenDataResult cmd_gen_data(const RunConfig& cfg);

struct TrainResult {
    std::filesystem::path params_path;
    std::filesystem::path trace_path;
    std::filesystem::path report_path;
    double final_loss = 0.0;
    int steps = 0;
};
TrainResult cmd_train(const RunConfig& cfg);

struct SampleResult {
    std::filesystem::path samples_path;
    std::filesystem::path report_path;
    Eigen::Index rows = 0;
};
/// Generates `per_label` samples for every label; each chain derives its
/// seed from (global seed, label index, chain index) so any subset of the
/// work reproduces the same rows. The optional `sampler_override` replaces
/// the configured solver ("ode" or "sde").
SampleResult cmd_sample(const RunConfig& cfg, const std::vector<double>& labels, int per_label,
                        const std::string& sampler_override = "");

struct EvalResult {
    std::filesystem::path metrics_path;
    std::filesystem::path report_path;
    MetricsReport metrics;
};
EvalResult cmd_eval(const RunConfig& cfg, const std::filesystem::path& real_csv,
                    const std::filesystem::path& fake_csv);

struct VerifyOutcome {
    std::vector<CheckResult> checks;
    bool all_passed = false;
};
/// Runs the verification battery and prints one PASS/FAIL line per check.
VerifyOutcome cmd_verify(VerifyLevel level, bool print_runtimes);

/// Parses "0.1,0.5,0.9" or "start:end:count" into a label list.
std::vector<double> parse_labels(const std::string& text);

}  // namespace csdm

#endif  // CSDM_COMMANDS_HPP
