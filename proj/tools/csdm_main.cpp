#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csdm/commands.hpp"
#include "csdm/io.hpp"

namespace {

// Exit codes: 0 success, 1 validation/check failure, 2 I/O error.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitIo = 2;

int run(int argc, char** argv) {
    CLI::App app{"Condition-specific diffusion experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string labels_text;
    int per_label = 1;
    std::string sampler_override;
    std::string real_csv;
    std::string fake_csv;
    std::string level = "fast";
    bool dump_trajectory = false;

    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset CSV");
    gen->add_option("--config", config_path, "Config file")->required();

    auto* train = app.add_subcommand("train", "Train the denoiser on a dataset");
    train->add_option("--config", config_path, "Config file")->required();

    auto* sample = app.add_subcommand("sample", "Generate samples at given labels");
    sample->add_option("--config", config_path, "Config file")->required();
    sample->add_option("--labels", labels_text, "Comma list or start:end:count range")
        ->required();
    sample->add_option("--per-label", per_label, "Chains per label")->default_val(1);
    sample->add_option("--sampler", sampler_override, "ode or sde (overrides config)");
    sample->add_flag("--trajectory", dump_trajectory, "Also dump the first chain trajectory");

    auto* eval = app.add_subcommand("eval", "Compare generated samples against real data");
    eval->add_option("--real", real_csv, "Real dataset CSV")->required();
    eval->add_option("--fake", fake_csv, "Generated dataset CSV")->required();
    eval->add_option("--config", config_path, "Config file")->required();

    auto* verify = app.add_subcommand("verify", "Run the built-in verification checks");
    verify->add_option("--level", level, "fast or full")->default_val("fast");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        const auto result = csdm::cmd_gen_data(csdm::load_config(config_path));
        std::printf("wrote %lld rows to %s\n", static_cast<long long>(result.rows),
                    result.csv_path.string().c_str());
        return kExitOk;
    }
    if (train->parsed()) {
        const auto result = csdm::cmd_train(csdm::load_config(config_path));
        std::printf("trained %d steps, final loss %.6g, params at %s\n", result.steps,
                    result.final_loss, result.params_path.string().c_str());
        return kExitOk;
    }
    if (sample->parsed()) {
        const auto cfg = csdm::load_config(config_path);
        const auto labels = csdm::parse_labels(labels_text);
        const auto result = csdm::cmd_sample(cfg, labels, per_label, sampler_override);
        std::printf("wrote %lld samples to %s\n", static_cast<long long>(result.rows),
                    result.samples_path.string().c_str());
        return kExitOk;
    }
    if (eval->parsed()) {
        const auto result =
            csdm::cmd_eval(csdm::load_config(config_path), real_csv, fake_csv);
        std::printf("mean distance %.6g, label MAE %.6g, metrics at %s\n",
                    result.metrics.sliding.mean_distance, result.metrics.label_mae,
                    result.metrics_path.string().c_str());
        return kExitOk;
    }
    if (verify->parsed()) {
        csdm::VerifyLevel lv;
        if (level == "fast") lv = csdm::VerifyLevel::Fast;
        else if (level == "full") lv = csdm::VerifyLevel::Full;
        else throw std::invalid_argument("verify: level must be fast or full");
        const auto outcome = csdm::cmd_verify(lv, level == "full");
        return outcome.all_passed ? kExitOk : kExitFailure;
    }
    return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const csdm::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
}
