#include "llf/model_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace llf {

namespace {

using nlohmann::json;

json config_json(const TrainConfig& cfg) {
    return {{"config", config_name(cfg.remap_kind, cfg.norm_enabled)},
            {"lr", cfg.lr},
            {"epochs", cfg.epochs},
            {"adam_beta1", cfg.beta1},
            {"adam_beta2", cfg.beta2},
            {"adam_epsilon", cfg.adam_epsilon},
            {"num_levels", cfg.llf.num_levels},
            {"lut_levels", cfg.llf.lut_levels},
            {"table_size", cfg.table_size},
            {"seed", cfg.seed}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig cfg;
    const auto [kind, norm] = parse_config_name(j.at("config").get<std::string>());
    cfg.remap_kind = kind;
    cfg.norm_enabled = norm;
    cfg.lr = j.value("lr", 1e-4);
    cfg.epochs = j.value("epochs", 300);
    cfg.beta1 = j.value("adam_beta1", 0.9);
    cfg.beta2 = j.value("adam_beta2", 0.999);
    cfg.adam_epsilon = j.value("adam_epsilon", 1e-8);
    cfg.llf.num_levels = j.value("num_levels", 0);
    cfg.llf.lut_levels = j.value("lut_levels", 64);
    cfg.table_size = j.value("table_size", 1024);
    cfg.seed = j.value("seed", 0ull);
    return cfg;
}

std::string hash_string(const std::vector<double>& blob) {
    const uint64_t h = fnv1a64(blob.data(), blob.size() * sizeof(double));
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_blob(const std::vector<double>& blob, const std::string& path) {
    static_assert(std::endian::native == std::endian::little,
                  "weight blobs are little-endian");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write weight blob " + path);
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size() * sizeof(double)));
    if (!out) throw io_error("failed writing weight blob " + path);
}

std::vector<double> read_blob(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw io_error("cannot read weight blob " + path);
    const auto bytes = static_cast<size_t>(in.tellg());
    if (bytes % sizeof(double) != 0) throw io_error("weight blob " + path + " is truncated");
    std::vector<double> blob(bytes / sizeof(double));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw io_error("failed reading weight blob " + path);
    return blob;
}

json monotonicity_json(const MonotonicityReport& r) {
    json v = json::array();
    for (const auto& viol : r.violations)
        v.push_back({{"index", viol.index}, {"delta", viol.delta}, {"drop", viol.drop}});
    return {{"is_monotonic", r.is_monotonic}, {"violations", v}};
}

}  // namespace

uint64_t fnv1a64(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

void save_model(const TrainedModel& model, const std::string& path) {
    namespace fs = std::filesystem;
    json j;
    j["format"] = "llfstyle-model";
    j["version"] = 1;
    j["train"] = config_json(model.config);
    j["final_loss"] = model.final_loss;
    j["epochs_run"] = static_cast<int>(model.history.size());
    j["beta_projections"] = model.beta_projections;
    j["norm"] = {{"enabled", model.norm_enabled},
                 {"gamma", model.norm.gamma},
                 {"omega", model.norm.omega}};
    j["monotonicity"] = monotonicity_json(model.monotonicity);

    if (model.kind == RemapKind::orig) {
        j["remap"] = {{"kind", "orig"},
                      {"sigma", model.orig.sigma},
                      {"alpha", model.orig.alpha},
                      {"beta", model.orig.beta}};
    } else {
        const std::vector<double> blob = model.mlp.state_blob();
        const std::string blob_name = fs::path(path).filename().string() + ".weights.bin";
        write_blob(blob, (fs::path(path).parent_path() / blob_name).string());
        json widths = json::array();
        for (int w : MlpRemap::kWidths) widths.push_back(w);
        j["remap"] = {{"kind", "mlp"},
                      {"widths", widths},
                      {"bn_epsilon", MlpRemap::kBnEpsilon},
                      {"bn_momentum", MlpRemap::kBnMomentum},
                      {"weights_file", blob_name},
                      {"weights_hash", hash_string(blob)},
                      {"pretrain_steps", model.pretrain_steps},
                      {"pretrain_error", model.pretrain_error}};
    }

    std::ofstream out(path);
    if (!out) throw io_error("cannot write model manifest " + path);
    out << j.dump(2) << "\n";
}

TrainedModel load_model(const std::string& path) {
    namespace fs = std::filesystem;
    std::ifstream in(path);
    if (!in) throw io_error("cannot read model manifest " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw io_error("malformed model manifest " + path + ": " + e.what());
    }
    if (j.value("format", "") != "llfstyle-model")
        throw io_error(path + " is not a model manifest");

    TrainedModel model;
    model.config = config_from_json(j.at("train"));
    model.kind = model.config.remap_kind;
    model.norm_enabled = j.at("norm").at("enabled").get<bool>();
    model.norm.gamma = j.at("norm").at("gamma").get<double>();
    model.norm.omega = j.at("norm").at("omega").get<double>();
    model.final_loss = j.value("final_loss", 0.0);
    model.beta_projections = j.value("beta_projections", 0);

    const json& r = j.at("remap");
    if (r.at("kind") == "orig") {
        model.kind = RemapKind::orig;
        model.orig.sigma = r.at("sigma").get<double>();
        model.orig.alpha = r.at("alpha").get<double>();
        model.orig.beta = r.at("beta").get<double>();
    } else {
        model.kind = RemapKind::mlp;
        const std::string blob_path =
            (fs::path(path).parent_path() / r.at("weights_file").get<std::string>()).string();
        const std::vector<double> blob = read_blob(blob_path);
        if (hash_string(blob) != r.at("weights_hash").get<std::string>())
            throw io_error("weight blob hash mismatch for " + blob_path);
        model.mlp.load_state_blob(blob);
        model.mlp.set_mode(MlpRemap::Mode::inference);
        model.pretrain_steps = r.value("pretrain_steps", 0);
        model.pretrain_error = r.value("pretrain_error", 0.0);
    }

    model.curve = export_curve(model.remap(), model.config.table_size);
    model.monotonicity = check_monotonic(model.curve);
    return model;
}

void write_loss_log(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write loss log " + path);
    for (const auto& rec : model.history) {
        json j = {{"epoch", rec.epoch},
                  {"mean_loss", rec.mean_loss},
                  {"mse_term", rec.mse_term},
                  {"mssim_term", rec.mssim_term}};
        out << j.dump() << "\n";
    }
}

std::string eval_report_json(const EvalReport& rep, const TrainedModel& model) {
    json pairs = json::array();
    for (const auto& p : rep.pairs) pairs.push_back({{"ssim", p.ssim}, {"mse", p.mse}});
    json j = {{"model_config", config_json(model.config)},
              {"pairs", pairs},
              {"mean_ssim", rep.mean_ssim},
              {"stddev_ssim", rep.stddev_ssim},
              {"mean_mse", rep.mean_mse},
              {"stddev_mse", rep.stddev_mse}};
    return j.dump(2);
}

}  // namespace llf
