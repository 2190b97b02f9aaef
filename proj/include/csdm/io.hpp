#ifndef CSDM_IO_HPP
#define CSDM_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csdm/denoiser.hpp"
#include "csdm/eval.hpp"
#include "csdm/sampler.hpp"
#include "csdm/vicinity.hpp"

namespace csdm {

/// I/O failure (missing file, unwritable path, malformed content).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest round-trip decimal form of a double, locale-independent.
std::string format_double(double v);

/// Dataset CSV: header "y,x_1,...,x_d", one row per sample, decimal floats.
void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& data);

/// Reads the dataset CSV; the label range is taken from the caller when
/// given, otherwise from the observed min/max.
LabeledDataset read_dataset_csv(const std::filesystem::path& path);
LabeledDataset read_dataset_csv(const std::filesystem::path& path, double label_min,
                                double label_max);

/// Trajectory CSV: header "step,t,x_1,...,x_d".
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);

/// Loss trace CSV: header "step,loss".
void write_loss_trace_csv(const std::filesystem::path& path, const std::vector<double>& trace);

/// Trained-denoiser persistence: JSON with layer shape, sigma_data, the
/// owning config hash and the flat parameter array.
void write_denoiser_params(const std::filesystem::path& path, const TrainableDenoiser& model,
                           const std::string& config_hash);
TrainableDenoiser read_denoiser_params(const std::filesystem::path& path);

/// Metrics JSON: {centers, distances (null when starved), starved,
/// mean_distance, label_mae, config_hash, seed}.
void write_metrics_json(const std::filesystem::path& path, const MetricsReport& report);

}  // namespace csdm

#endif  // CSDM_IO_HPP
