#include "csdm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace csdm {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("malformed number '" + s + "' in " + path.string());
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_dataset_csv(const std::filesystem::path& path, const LabeledDataset& data) {
    auto out = open_out(path);
    out << "y";
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << ",x_" << (j + 1);
    out << "\n";
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        out << format_double(data.labels[i]);
        for (Eigen::Index j = 0; j < data.dim(); ++j)
            out << "," << format_double(data.samples(i, j));
        out << "\n";
    }
}

namespace {

LabeledDataset read_dataset_rows(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty dataset file: " + path.string());
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "y")
        throw IoError("bad dataset header (expected y,x_1,...): " + path.string());
    const Eigen::Index d = static_cast<Eigen::Index>(header.size()) - 1;

    std::vector<double> labels;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<Eigen::Index>(fields.size()) != d + 1)
            throw IoError("row width mismatch in " + path.string());
        labels.push_back(parse_double(fields[0], path));
        for (Eigen::Index j = 0; j < d; ++j)
            values.push_back(parse_double(fields[static_cast<std::size_t>(j) + 1], path));
    }
    if (labels.empty()) throw IoError("dataset has no rows: " + path.string());

    const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd samples(n, d);
    Eigen::ArrayXd label_arr(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        label_arr[i] = labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < d; ++j)
            samples(i, j) = values[static_cast<std::size_t>(i * d + j)];
    }
    LabeledDataset data;
    data.samples = std::move(samples);
    data.labels = std::move(label_arr);
    data.label_min = data.labels.minCoeff();
    data.label_max = data.labels.maxCoeff();
    return data;
}

}  // namespace

LabeledDataset read_dataset_csv(const std::filesystem::path& path) {
    return read_dataset_rows(path);
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path, double label_min,
                                double label_max) {
    LabeledDataset data = read_dataset_rows(path);
    return make_dataset(std::move(data.samples), std::move(data.labels), label_min, label_max);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
    auto out = open_out(path);
    const Eigen::Index d = trajectory.states.empty() ? 0 : trajectory.states.front().size();
    out << "step,t";
    for (Eigen::Index j = 0; j < d; ++j) out << ",x_" << (j + 1);
    out << "\n";
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        out << k << "," << format_double(trajectory.times[k]);
        for (Eigen::Index j = 0; j < d; ++j)
            out << "," << format_double(trajectory.states[k][j]);
        out << "\n";
    }
}

void write_loss_trace_csv(const std::filesystem::path& path, const std::vector<double>& trace) {
    auto out = open_out(path);
    out << "step,loss\n";
    for (std::size_t k = 0; k < trace.size(); ++k)
        out << k << "," << format_double(trace[k]) << "\n";
}

void write_denoiser_params(const std::filesystem::path& path, const TrainableDenoiser& model,
                           const std::string& config_hash) {
    nlohmann::json j;
    j["dim"] = model.dim();
    j["width"] = model.width();
    j["sigma_data"] = model.sigma_data();
    j["config_hash"] = config_hash;
    j["theta"] = std::vector<double>(model.params().data(),
                                     model.params().data() + model.params().size());
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

TrainableDenoiser read_denoiser_params(const std::filesystem::path& path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
        const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
        const int width = j.at("width").get<int>();
        const double sigma_data = j.at("sigma_data").get<double>();
        const auto theta_vec = j.at("theta").get<std::vector<double>>();
        Eigen::VectorXd theta =
            Eigen::Map<const Eigen::VectorXd>(theta_vec.data(),
                                              static_cast<Eigen::Index>(theta_vec.size()));
        return TrainableDenoiser(dim, width, sigma_data, std::move(theta));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad denoiser params file " + path.string() + ": " + e.what());
    }
}

void write_metrics_json(const std::filesystem::path& path, const MetricsReport& report) {
    nlohmann::json j;
    std::vector<double> centers;
    nlohmann::json distances = nlohmann::json::array();
    std::vector<bool> starved;
    for (const auto& cd : report.sliding.per_center) {
        centers.push_back(cd.center);
        if (cd.starved) {
            distances.push_back(nullptr);
        } else {
            distances.push_back(cd.distance);
        }
        starved.push_back(cd.starved);
    }
    j["centers"] = centers;
    j["distances"] = distances;
    j["starved"] = starved;
    j["mean_distance"] = report.sliding.mean_distance;
    j["label_mae"] = report.label_mae;
    j["config_hash"] = report.config_hash;
    j["seed"] = report.seed;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

}  // namespace csdm
