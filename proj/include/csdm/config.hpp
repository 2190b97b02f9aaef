#ifndef CSDM_CONFIG_HPP
#define CSDM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "csdm/covariance.hpp"
#include "csdm/denoiser.hpp"
#include "csdm/eval.hpp"
#include "csdm/sampler.hpp"
#include "csdm/synthdata.hpp"
#include "csdm/vicinity.hpp"

namespace csdm {

enum class DenoiserMode { ClosedForm, Trained };
enum class SamplerKind { Ode, Sde };

/// Full experiment configuration. The on-disk form is flat "section.key =
/// value" text; see the repository README for the grammar. A `preset = NAME`
/// line seeds the configuration from a named preset before the remaining
/// keys are applied.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    DenoiserMode denoiser_mode = DenoiserMode::ClosedForm;

    DatasetSpec dataset;
    std::string dataset_csv;  // where gen-data writes / other commands read

    EmbeddingSpec embedding;
    double lambda_y_train = 0.0;
    double lambda_y_sample = 0.0;
    double sigma_data = 0.5;
    bool sigma_data_auto = false;  // estimate from the dataset when true

    VicinityConfig vicinity = VicinityConfig::hard_adaptive(10);
    double kde_sigma = 0.0;
    bool kde_auto = true;  // Silverman bandwidth when true

    LossConfig loss;
    int train_steps = 1000;
    double train_lr = 1e-3;
    int train_width = 64;
    std::string params_path;  // where train writes / sample (trained) reads

    SamplerConfig sampler;
    SamplerKind sampler_kind = SamplerKind::Sde;

    EvalConfig eval;

    /// Canonical key -> value snapshot (sorted, normalized numbers).
    std::map<std::string, std::string> snapshot() const;
    /// FNV-1a hash of the snapshot, 16 hex digits.
    std::string hash() const;
    /// Covariance parameters for the training or sampling phase.
    CovParams cov_params(bool sampling) const;
};

/// Named presets for the published per-dataset settings (vicinity size,
/// condition weights, guidance scale; all use the 32-step SDE sampler):
/// rc49, cell200, utkface64, utkface128, steering-angle64,
/// steering-angle128, steering-angle256.
RunConfig preset_config(const std::string& name);

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

/// Cross-section consistency checks (dimensions, enums, ranges).
void validate(const RunConfig& cfg);

}  // namespace csdm

#endif  // CSDM_CONFIG_HPP
