#include "csdm/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "csdm/io.hpp"
#include "csdm/sampler.hpp"
#include "csdm/stats.hpp"

namespace csdm {

namespace fs = std::filesystem;

namespace {

// Stream tags for deriving per-purpose seeds from the global one.
enum : std::uint64_t { kSeedGenData = 0x6461, kSeedTrain = 0x7472, kSeedSample = 0x7361 };

fs::path ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
    return p;
}

void write_run_report(const fs::path& path, const RunConfig& cfg, const std::string& command,
                      double wall_seconds, const nlohmann::json& extra) {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = cfg.snapshot();
    j["config_hash"] = cfg.hash();
    j["seed"] = cfg.seed;
    j["wall_clock_seconds"] = wall_seconds;  // excluded from the hash by construction
    j.update(extra);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report " + path.string());
    out << j.dump(2) << "\n";
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path dataset_path(const RunConfig& cfg) {
    if (!cfg.dataset_csv.empty()) return cfg.dataset_csv;
    return output_root(cfg) / "data" / (cfg.hash() + "_dataset.csv");
}

LabeledDataset load_dataset(const RunConfig& cfg) {
    const fs::path path = dataset_path(cfg);
    if (!fs::exists(path)) throw IoError("dataset file not found: " + path.string());
    return read_dataset_csv(path, cfg.dataset.label_min, cfg.dataset.label_max);
}

double resolve_sigma_data(const RunConfig& cfg, const LabeledDataset& data) {
    if (!cfg.sigma_data_auto) return cfg.sigma_data;
    // Empirical per-dimension std averaged to a scalar.
    double acc = 0.0;
    for (Eigen::Index j = 0; j < data.dim(); ++j)
        acc += std::sqrt(variance(data.samples.col(j).array()));
    return acc / static_cast<double>(data.dim());
}

double resolve_kde_sigma(const RunConfig& cfg, const LabeledDataset& data) {
    return cfg.kde_auto ? silverman_bandwidth(data.labels) : cfg.kde_sigma;
}

}  // namespace

fs::path output_root(const RunConfig& cfg) {
    const char* env = std::getenv(kOutRootEnv);
    const fs::path root = (env && *env) ? fs::path(env) : fs::path(cfg.out_dir);
    ensure_dir(root / "data");
    ensure_dir(root / "params");
    ensure_dir(root / "samples");
    ensure_dir(root / "reports");
    return root;
}

std::vector<double> parse_labels(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("labels: empty specification");
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0.0, hi = 0.0;
        int count = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
            throw std::invalid_argument("labels: range must be start:end:count");
        if (count == 1) return {lo};
        for (int i = 0; i < count; ++i)
            out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("labels: malformed number '" + item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("labels: empty specification");
    return out;
}

GenDataResult cmd_gen_data(const RunConfig& cfg) {
    Stopwatch watch;
    validate(cfg);
    const fs::path path = dataset_path(cfg);

    const std::uint64_t seed =
        cfg.dataset.seed != 0 ? cfg.dataset.seed : mix_seed(cfg.seed, kSeedGenData);
    Rng rng(seed);
    const LabeledDataset data = generate_dataset(cfg.dataset, rng);
    write_dataset_csv(path, data);

    GenDataResult result;
    result.csv_path = path;
    result.rows = data.size();
    result.report_path = output_root(cfg) / "reports" / (cfg.hash() + "_gen-data_report.json");
    write_run_report(result.report_path, cfg, "gen-data", watch.seconds(),
                     {{"outputs", {{"dataset_csv", path.string()}}},
                      {"rows", data.size()}});
    return result;
}

TrainResult cmd_train(const RunConfig& cfg) {
    Stopwatch watch;
    validate(cfg);
    const LabeledDataset data = load_dataset(cfg);
    if (data.dim() != cfg.dataset.dim)
        throw std::invalid_argument("cmd_train: dataset dimension differs from config");

    LossConfig loss = cfg.loss;
    loss.sigma_data = resolve_sigma_data(cfg, data);
    const KdeConfig kde{resolve_kde_sigma(cfg, data)};
    const CovParams cov = [&] {
        CovParams p = cfg.cov_params(false);
        p.sigma_data = loss.sigma_data;
        return p;
    }();

    Rng rng(mix_seed(cfg.seed, kSeedTrain));
    TrainableDenoiser model(data.dim(), cfg.train_width, loss.sigma_data, rng);
    const TrainOptions options{cfg.train_steps, cfg.train_lr};

    const fs::path root = output_root(cfg);
    TrainResult result;
    result.params_path = cfg.params_path.empty()
                             ? root / "params" / (cfg.hash() + "_params.json")
                             : fs::path(cfg.params_path);
    result.trace_path = root / "params" / (cfg.hash() + "_trace.csv");
    result.report_path = root / "reports" / (cfg.hash() + "_train_report.json");

    std::vector<double> trace;
    try {
        trace = train_denoiser(model, data, cfg.vicinity, kde, cov, loss, options, rng);
    } catch (const TrainingDivergence& e) {
        write_loss_trace_csv(result.trace_path, e.partial_trace);  // for diagnosis
        throw;
    }

    write_denoiser_params(result.params_path, model, cfg.hash());
    write_loss_trace_csv(result.trace_path, trace);
    result.final_loss = trace.empty() ? 0.0 : trace.back();
    result.steps = static_cast<int>(trace.size());
    write_run_report(result.report_path, cfg, "train", watch.seconds(),
                     {{"outputs",
                       {{"params", result.params_path.string()},
                        {"loss_trace", result.trace_path.string()}}},
                      {"final_loss", result.final_loss},
                      {"steps", result.steps}});
    return result;
}

SampleResult cmd_sample(const RunConfig& cfg, const std::vector<double>& labels, int per_label,
                        const std::string& sampler_override) {
    Stopwatch watch;
    validate(cfg);
    if (labels.empty()) throw std::invalid_argument("cmd_sample: no labels given");
    if (per_label < 1) throw std::invalid_argument("cmd_sample: per_label must be >= 1");
    for (double y : labels)
        if (y < cfg.dataset.label_min || y > cfg.dataset.label_max)
            throw std::invalid_argument("cmd_sample: label " + std::to_string(y) +
                                        " outside the label range");

    SamplerKind kind = cfg.sampler_kind;
    if (!sampler_override.empty()) {
        if (sampler_override == "ode") kind = SamplerKind::Ode;
        else if (sampler_override == "sde") kind = SamplerKind::Sde;
        else throw std::invalid_argument("cmd_sample: unknown sampler '" + sampler_override + "'");
    }

    std::unique_ptr<Denoiser> denoiser;
    double sigma_data = cfg.sigma_data;
    if (cfg.denoiser_mode == DenoiserMode::ClosedForm) {
        LabeledDataset data = load_dataset(cfg);
        sigma_data = resolve_sigma_data(cfg, data);
        denoiser = std::make_unique<ClosedFormDenoiser>(std::move(data), cfg.vicinity);
    } else {
        if (cfg.params_path.empty())
            throw std::invalid_argument("cmd_sample: trained mode needs train.params");
        TrainableDenoiser model = read_denoiser_params(cfg.params_path);
        if (model.dim() != cfg.dataset.dim)
            throw std::invalid_argument("cmd_sample: params dimension differs from config");
        sigma_data = model.sigma_data();
        denoiser = std::make_unique<TrainableDenoiser>(std::move(model));
    }

    CovParams cov = cfg.cov_params(true);
    cov.sigma_data = sigma_data;

    const Eigen::Index d = cfg.dataset.dim;
    const Eigen::Index rows = static_cast<Eigen::Index>(labels.size()) * per_label;
    Eigen::MatrixXd samples(rows, d);
    Eigen::ArrayXd out_labels(rows);

    Eigen::Index row = 0;
    for (std::size_t li = 0; li < labels.size(); ++li) {
        for (int ci = 0; ci < per_label; ++ci) {
            Rng chain_rng(mix_seed(mix_seed(cfg.seed, kSeedSample), li, static_cast<std::uint64_t>(ci)));
            const Eigen::VectorXd x =
                kind == SamplerKind::Ode
                    ? heun_sample(*denoiser, labels[li], cov, cfg.sampler, chain_rng)
                    : stochastic_sample(*denoiser, labels[li], cov, cfg.sampler, chain_rng);
            samples.row(row) = x.transpose();
            out_labels[row] = labels[li];
            ++row;
        }
    }

    const fs::path root = output_root(cfg);
    const std::string kind_name = kind == SamplerKind::Ode ? "ode" : "sde";
    SampleResult result;
    result.samples_path = root / "samples" / (cfg.hash() + "_samples_" + kind_name + ".csv");
    result.report_path =
        root / "reports" / (cfg.hash() + "_sample_" + kind_name + "_report.json");
    result.rows = rows;

    LabeledDataset generated;
    generated.samples = std::move(samples);
    generated.labels = std::move(out_labels);
    generated.label_min = cfg.dataset.label_min;
    generated.label_max = cfg.dataset.label_max;
    write_dataset_csv(result.samples_path, generated);

    write_run_report(result.report_path, cfg, "sample", watch.seconds(),
                     {{"outputs", {{"samples_csv", result.samples_path.string()}}},
                      {"sampler", kind_name},
                      {"rows", rows}});
    return result;
}

EvalResult cmd_eval(const RunConfig& cfg, const fs::path& real_csv, const fs::path& fake_csv) {
    Stopwatch watch;
    validate(cfg);
    if (!fs::exists(real_csv)) throw IoError("real CSV not found: " + real_csv.string());
    if (!fs::exists(fake_csv)) throw IoError("generated CSV not found: " + fake_csv.string());
    const LabeledDataset real = read_dataset_csv(real_csv);
    const LabeledDataset fake = read_dataset_csv(fake_csv);
    if (real.dim() != fake.dim())
        throw std::invalid_argument("cmd_eval: real and generated dimensions differ (" +
                                    std::to_string(real.dim()) + " vs " +
                                    std::to_string(fake.dim()) + ")");

    EvalConfig eval_cfg = cfg.eval;
    if (eval_cfg.seed == 0) eval_cfg.seed = cfg.seed;
    if (eval_cfg.centers.empty()) {
        // Default: ten evenly spaced centers inside the label range.
        const double lo = cfg.dataset.label_min;
        const double hi = cfg.dataset.label_max;
        for (int i = 0; i < 10; ++i)
            eval_cfg.centers.push_back(lo + (hi - lo) * (0.5 + i) / 10.0);
    }

    EvalResult result;
    result.metrics.sliding = sliding_distance(real, fake, eval_cfg);
    result.metrics.label_mae = label_consistency(fake, cfg.dataset);
    result.metrics.config_hash = cfg.hash();
    result.metrics.seed = eval_cfg.seed;

    const fs::path root = output_root(cfg);
    result.metrics_path = root / "reports" / (cfg.hash() + "_metrics.json");
    result.report_path = root / "reports" / (cfg.hash() + "_eval_report.json");
    write_metrics_json(result.metrics_path, result.metrics);
    write_run_report(result.report_path, cfg, "eval", watch.seconds(),
                     {{"outputs", {{"metrics_json", result.metrics_path.string()}}},
                      {"mean_distance", result.metrics.sliding.mean_distance},
                      {"label_mae", result.metrics.label_mae},
                      {"starved_centers", result.metrics.sliding.starved_count}});
    return result;
}

VerifyOutcome cmd_verify(VerifyLevel level, bool print_runtimes) {
    VerifyOutcome outcome;
    outcome.checks = run_verification(level);
    outcome.all_passed = true;
    for (const auto& check : outcome.checks) {
        outcome.all_passed = outcome.all_passed && check.passed;
        if (print_runtimes) {
            std::printf("%s %-26s (%.2fs) %s\n", check.passed ? "PASS" : "FAIL",
                        check.name.c_str(), check.seconds, check.detail.c_str());
        } else {
            std::printf("%s %-26s %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                        check.detail.c_str());
        }
    }
    std::printf("%s: %zu checks, %s\n", outcome.all_passed ? "OK" : "FAILED",
                outcome.checks.size(), level == VerifyLevel::Full ? "full" : "fast");
    return outcome;
}

}  // namespace csdm
