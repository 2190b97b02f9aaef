#include "csdm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "csdm/io.hpp"

namespace csdm {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" +
                                    value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw std::invalid_argument("config: key '" + key + "' expects an integer");
    return i;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' expects an unsigned integer");
    }
}

Eigen::ArrayXd to_array(const std::string& key, const std::string& value) {
    std::vector<double> vals;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(to_double(key, trim(item)));
    return Eigen::Map<const Eigen::ArrayXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string array_to_string(const Eigen::ArrayXd& a) {
    std::string out;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += format_double(a[i]);
    }
    return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
    const Eigen::ArrayXd a = to_array(key, value);
    return std::vector<double>(a.data(), a.data() + a.size());
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "run.seed") cfg.seed = to_u64(key, value);
    else if (key == "run.out_dir") cfg.out_dir = value;
    else if (key == "run.denoiser") {
        if (value == "closed-form") cfg.denoiser_mode = DenoiserMode::ClosedForm;
        else if (value == "trained") cfg.denoiser_mode = DenoiserMode::Trained;
        else throw std::invalid_argument("config: run.denoiser must be closed-form or trained");
    } else if (key == "dataset.kind") {
        if (value == "gaussian-shift") cfg.dataset.kind = DatasetKind::GaussianShift;
        else if (value == "ring") cfg.dataset.kind = DatasetKind::Ring;
        else if (value == "imbalanced-shift") cfg.dataset.kind = DatasetKind::ImbalancedShift;
        else throw std::invalid_argument("config: unknown dataset.kind '" + value + "'");
    } else if (key == "dataset.n_samples") cfg.dataset.n_samples = to_int(key, value);
    else if (key == "dataset.dim") cfg.dataset.dim = to_int(key, value);
    else if (key == "dataset.label_min") cfg.dataset.label_min = to_double(key, value);
    else if (key == "dataset.label_max") cfg.dataset.label_max = to_double(key, value);
    else if (key == "dataset.noise_std") cfg.dataset.noise_std = to_double(key, value);
    else if (key == "dataset.radius") cfg.dataset.radius = to_double(key, value);
    else if (key == "dataset.seed") cfg.dataset.seed = to_u64(key, value);
    else if (key == "dataset.csv") cfg.dataset_csv = value;
    else if (key == "embedding.kind") {
        if (value == "constant") cfg.embedding.kind = EmbeddingKind::Constant;
        else if (value == "affine") cfg.embedding.kind = EmbeddingKind::AffineInY;
        else if (value == "sinusoidal") cfg.embedding.kind = EmbeddingKind::SinusoidalInY;
        else throw std::invalid_argument("config: unknown embedding.kind '" + value + "'");
    } else if (key == "embedding.offset") cfg.embedding.offset = to_array(key, value);
    else if (key == "embedding.slope") cfg.embedding.slope = to_array(key, value);
    else if (key == "embedding.frequency") cfg.embedding.frequency = to_array(key, value);
    else if (key == "cov.lambda_y_train") cfg.lambda_y_train = to_double(key, value);
    else if (key == "cov.lambda_y_sample") cfg.lambda_y_sample = to_double(key, value);
    else if (key == "cov.sigma_data") {
        if (value == "auto") cfg.sigma_data_auto = true;
        else { cfg.sigma_data_auto = false; cfg.sigma_data = to_double(key, value); }
    } else if (key == "vicinity.mode") {
        if (value == "hard-fixed") cfg.vicinity.mode = VicinityConfig::Mode::HardFixed;
        else if (value == "hard-adaptive") cfg.vicinity.mode = VicinityConfig::Mode::HardAdaptive;
        else throw std::invalid_argument("config: unknown vicinity.mode '" + value + "'");
    } else if (key == "vicinity.kappa") {
        cfg.vicinity.kappa = value == "inf" ? std::numeric_limits<double>::infinity()
                                            : to_double(key, value);
    } else if (key == "vicinity.n_av") cfg.vicinity.n_av = to_int(key, value);
    else if (key == "kde.sigma") {
        if (value == "auto") cfg.kde_auto = true;
        else { cfg.kde_auto = false; cfg.kde_sigma = to_double(key, value); }
    } else if (key == "loss.p_mean") cfg.loss.p_mean = to_double(key, value);
    else if (key == "loss.p_std") cfg.loss.p_std = to_double(key, value);
    else if (key == "loss.batch_size") cfg.loss.batch_size = to_int(key, value);
    else if (key == "loss.label_drop_prob") cfg.loss.label_drop_prob = to_double(key, value);
    else if (key == "train.steps") cfg.train_steps = to_int(key, value);
    else if (key == "train.lr") cfg.train_lr = to_double(key, value);
    else if (key == "train.width") cfg.train_width = to_int(key, value);
    else if (key == "train.params") cfg.params_path = value;
    else if (key == "sampler.kind") {
        if (value == "ode") cfg.sampler_kind = SamplerKind::Ode;
        else if (value == "sde") cfg.sampler_kind = SamplerKind::Sde;
        else throw std::invalid_argument("config: unknown sampler.kind '" + value + "'");
    } else if (key == "sampler.n_steps") cfg.sampler.n_steps = to_int(key, value);
    else if (key == "sampler.sigma_min") cfg.sampler.sigma_min = to_double(key, value);
    else if (key == "sampler.sigma_max") cfg.sampler.sigma_max = to_double(key, value);
    else if (key == "sampler.rho") cfg.sampler.rho = to_double(key, value);
    else if (key == "sampler.s_churn") cfg.sampler.s_churn = to_double(key, value);
    else if (key == "sampler.s_tmin") cfg.sampler.s_tmin = to_double(key, value);
    else if (key == "sampler.s_tmax") cfg.sampler.s_tmax = to_double(key, value);
    else if (key == "sampler.s_noise") cfg.sampler.s_noise = to_double(key, value);
    else if (key == "sampler.cfg_gamma") cfg.sampler.cfg_gamma = to_double(key, value);
    else if (key == "eval.centers") cfg.eval.centers = to_double_list(key, value);
    else if (key == "eval.window") cfg.eval.window = to_double(key, value);
    else if (key == "eval.n_projections") cfg.eval.n_projections = to_int(key, value);
    else if (key == "eval.seed") cfg.eval.seed = to_u64(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace

RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    cfg.denoiser_mode = DenoiserMode::ClosedForm;
    cfg.sampler_kind = SamplerKind::Sde;
    cfg.sampler.n_steps = 32;
    cfg.vicinity.mode = VicinityConfig::Mode::HardAdaptive;

    auto set = [&cfg](int n_av, double lambda_t, double lambda_s, double gamma) {
        cfg.vicinity.n_av = n_av;
        cfg.lambda_y_train = lambda_t;
        cfg.lambda_y_sample = lambda_s;
        cfg.sampler.cfg_gamma = gamma;
    };

    if (name == "rc49") set(50, 0.001, 0.001, 1.2);
    else if (name == "cell200") set(20, 0.01, 0.01, 1.5);
    else if (name == "utkface64") set(400, 0.05, 0.05, 1.5);
    else if (name == "utkface128") set(400, 0.01, 0.01, 1.5);
    else if (name == "steering-angle64") set(10, 2.5, 2.5, 1.5);
    else if (name == "steering-angle128") set(10, 0.01, 0.1, 1.5);
    else if (name == "steering-angle256") set(20, 0.01, 0.1, 2.0);
    else throw std::invalid_argument("config: unknown preset '" + name + "'");
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string preset;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: empty key or value at line " +
                                        std::to_string(line_no));
        if (key == "preset") preset = value;
        else pairs.emplace_back(key, value);
    }

    RunConfig cfg = preset.empty() ? RunConfig{} : preset_config(preset);
    for (const auto& [key, value] : pairs) apply_key(cfg, key, value);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::map<std::string, std::string> RunConfig::snapshot() const {
    std::map<std::string, std::string> m;
    m["run.seed"] = std::to_string(seed);
    m["run.out_dir"] = out_dir;
    m["run.denoiser"] = denoiser_mode == DenoiserMode::ClosedForm ? "closed-form" : "trained";
    switch (dataset.kind) {
        case DatasetKind::GaussianShift: m["dataset.kind"] = "gaussian-shift"; break;
        case DatasetKind::Ring: m["dataset.kind"] = "ring"; break;
        case DatasetKind::ImbalancedShift: m["dataset.kind"] = "imbalanced-shift"; break;
    }
    m["dataset.n_samples"] = std::to_string(dataset.n_samples);
    m["dataset.dim"] = std::to_string(dataset.dim);
    m["dataset.label_min"] = format_double(dataset.label_min);
    m["dataset.label_max"] = format_double(dataset.label_max);
    m["dataset.noise_std"] = format_double(dataset.noise_std);
    m["dataset.radius"] = format_double(dataset.radius);
    m["dataset.seed"] = std::to_string(dataset.seed);
    if (!dataset_csv.empty()) m["dataset.csv"] = dataset_csv;
    switch (embedding.kind) {
        case EmbeddingKind::Constant: m["embedding.kind"] = "constant"; break;
        case EmbeddingKind::AffineInY: m["embedding.kind"] = "affine"; break;
        case EmbeddingKind::SinusoidalInY: m["embedding.kind"] = "sinusoidal"; break;
    }
    if (embedding.offset.size()) m["embedding.offset"] = array_to_string(embedding.offset);
    if (embedding.slope.size()) m["embedding.slope"] = array_to_string(embedding.slope);
    if (embedding.frequency.size()) m["embedding.frequency"] = array_to_string(embedding.frequency);
    m["cov.lambda_y_train"] = format_double(lambda_y_train);
    m["cov.lambda_y_sample"] = format_double(lambda_y_sample);
    m["cov.sigma_data"] = sigma_data_auto ? "auto" : format_double(sigma_data);
    m["vicinity.mode"] =
        vicinity.mode == VicinityConfig::Mode::HardFixed ? "hard-fixed" : "hard-adaptive";
    m["vicinity.kappa"] = std::isinf(vicinity.kappa) ? "inf" : format_double(vicinity.kappa);
    m["vicinity.n_av"] = std::to_string(vicinity.n_av);
    m["kde.sigma"] = kde_auto ? "auto" : format_double(kde_sigma);
    m["loss.p_mean"] = format_double(loss.p_mean);
    m["loss.p_std"] = format_double(loss.p_std);
    m["loss.batch_size"] = std::to_string(loss.batch_size);
    m["loss.label_drop_prob"] = format_double(loss.label_drop_prob);
    m["train.steps"] = std::to_string(train_steps);
    m["train.lr"] = format_double(train_lr);
    m["train.width"] = std::to_string(train_width);
    if (!params_path.empty()) m["train.params"] = params_path;
    m["sampler.kind"] = sampler_kind == SamplerKind::Ode ? "ode" : "sde";
    m["sampler.n_steps"] = std::to_string(sampler.n_steps);
    m["sampler.sigma_min"] = format_double(sampler.sigma_min);
    m["sampler.sigma_max"] = format_double(sampler.sigma_max);
    m["sampler.rho"] = format_double(sampler.rho);
    m["sampler.s_churn"] = format_double(sampler.s_churn);
    m["sampler.s_tmin"] = format_double(sampler.s_tmin);
    m["sampler.s_tmax"] = format_double(sampler.s_tmax);
    m["sampler.s_noise"] = format_double(sampler.s_noise);
    m["sampler.cfg_gamma"] = format_double(sampler.cfg_gamma);
    if (!eval.centers.empty()) {
        const Eigen::Map<const Eigen::ArrayXd> c(eval.centers.data(),
                                                 static_cast<Eigen::Index>(eval.centers.size()));
        m["eval.centers"] = array_to_string(c);
    }
    m["eval.window"] = format_double(eval.window);
    m["eval.n_projections"] = std::to_string(eval.n_projections);
    m["eval.seed"] = std::to_string(eval.seed);
    return m;
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, value] : cfg.snapshot()) out += key + " = " + value + "\n";
    return out;
}

std::string RunConfig::hash() const {
    // FNV-1a over the canonical serialized snapshot.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : serialize_config(*this)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CovParams RunConfig::cov_params(bool sampling) const {
    CovParams p;
    p.lambda_y = sampling ? lambda_y_sample : lambda_y_train;
    p.sigma_data = sigma_data;
    p.embedding = embedding;
    return p;
}

void validate(const RunConfig& cfg) {
    validate(cfg.dataset);
    validate(cfg.sampler);
    if (cfg.lambda_y_train < 0.0 || cfg.lambda_y_sample < 0.0)
        throw std::invalid_argument("config: lambda_y must be >= 0");
    if (!cfg.sigma_data_auto && !(cfg.sigma_data > 0.0))
        throw std::invalid_argument("config: sigma_data must be positive");
    if (!cfg.kde_auto && !(cfg.kde_sigma > 0.0))
        throw std::invalid_argument("config: kde.sigma must be positive");
    if (cfg.vicinity.mode == VicinityConfig::Mode::HardFixed && !(cfg.vicinity.kappa > 0.0))
        throw std::invalid_argument("config: vicinity.kappa must be positive");
    if (cfg.vicinity.mode == VicinityConfig::Mode::HardAdaptive && cfg.vicinity.n_av < 1)
        throw std::invalid_argument("config: vicinity.n_av must be >= 1");
    if (!(cfg.loss.p_std > 0.0)) throw std::invalid_argument("config: loss.p_std must be positive");
    if (cfg.loss.label_drop_prob < 0.0 || cfg.loss.label_drop_prob >= 1.0)
        throw std::invalid_argument("config: loss.label_drop_prob must be in [0, 1)");
    if (cfg.loss.batch_size < 1) throw std::invalid_argument("config: loss.batch_size must be >= 1");
    if (cfg.train_steps < 0) throw std::invalid_argument("config: train.steps must be >= 0");
    if (cfg.train_width < 1) throw std::invalid_argument("config: train.width must be >= 1");
    if (!(cfg.train_lr > 0.0)) throw std::invalid_argument("config: train.lr must be positive");
    if (!(cfg.eval.window > 0.0)) throw std::invalid_argument("config: eval.window must be positive");
    if (cfg.eval.n_projections < 1)
        throw std::invalid_argument("config: eval.n_projections must be >= 1");
    for (double c : cfg.eval.centers)
        if (c < cfg.dataset.label_min || c > cfg.dataset.label_max)
            throw std::invalid_argument("config: eval center outside the label range");

    // Embedding parameter lengths must broadcast against the data dimension
    // and stay non-negative over the label range.
    validate_embedding(cfg.embedding, cfg.dataset.dim, cfg.dataset.label_min,
                       cfg.dataset.label_max);
}

}  // namespace csdm
