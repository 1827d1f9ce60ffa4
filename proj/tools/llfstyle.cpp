// Command-line surface: dataset synthesis, training, application,
// evaluation, remap inspection and the gradient-histogram baseline.
// Exit codes: 0 success, 2 bad arguments, 3 data error, 4 numerical
// divergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "llf/baseline.hpp"
#include "llf/imageio.hpp"
#include "llf/model_io.hpp"
#include "llf/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitDataError = 3;
constexpr int kExitNumeric = 4;

struct TrainFlags {
    std::string config = "R|N";
    std::string data_dir;
    std::string out = "model.json";
    std::string config_file;
    std::optional<double> lr;
    std::optional<int> epochs;
    std::optional<int> lut_levels;
    std::optional<int> levels;
    std::optional<int> table_size;
    std::optional<uint64_t> seed;
};

// Optional JSON config file seeds the defaults; explicit flags win.
llf::TrainConfig merge_train_config(const TrainFlags& f) {
    llf::TrainConfig cfg;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw llf::io_error("cannot read config file " + f.config_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw llf::io_error("malformed config file " + f.config_file + ": " + e.what());
        }
        if (j.contains("config")) {
            const auto [kind, norm] = llf::parse_config_name(j["config"].get<std::string>());
            cfg.remap_kind = kind;
            cfg.norm_enabled = norm;
        }
        cfg.lr = j.value("lr", cfg.lr);
        cfg.epochs = j.value("epochs", cfg.epochs);
        cfg.llf.lut_levels = j.value("lut_levels", cfg.llf.lut_levels);
        cfg.llf.num_levels = j.value("num_levels", cfg.llf.num_levels);
        cfg.table_size = j.value("table_size", cfg.table_size);
        cfg.seed = j.value("seed", cfg.seed);
    }
    const auto [kind, norm] = llf::parse_config_name(f.config);
    cfg.remap_kind = kind;
    cfg.norm_enabled = norm;
    if (f.lr) cfg.lr = *f.lr;
    if (f.epochs) cfg.epochs = *f.epochs;
    if (f.lut_levels) cfg.llf.lut_levels = *f.lut_levels;
    if (f.levels) cfg.llf.num_levels = *f.levels;
    if (f.table_size) cfg.table_size = *f.table_size;
    if (f.seed) cfg.seed = *f.seed;
    return cfg;
}

void write_model_artifacts(const llf::TrainedModel& model, const std::string& out) {
    llf::save_model(model, out);
    llf::write_loss_log(model, out + ".loss.jsonl");
    llf::write_curve_csv(model.curve, out + ".curve.csv");
    llf::write_monotonicity_json(model.monotonicity, model.curve, out + ".monotonicity.json");
}

int cmd_synth(uint64_t seed, int count, int size, const llf::SynthStyleParams& style,
              const std::string& out_dir, int test_count, const std::string& format,
              int depth) {
    if (count < 1) throw llf::config_error("--count must be at least 1");
    if (test_count < 0 || test_count > count)
        throw llf::config_error("--test-count must lie in [0, count]");

    llf::DatasetManifest manifest;
    manifest.seed = seed;
    manifest.count = count;
    manifest.width = manifest.height = size;
    manifest.style = style;

    std::vector<std::pair<llf::Image, llf::Image>> pairs;
    for (int i = 0; i < count; ++i) {
        pairs.push_back(llf::synth_pair(seed + static_cast<uint64_t>(i), size, size, style));
        manifest.splits.push_back(i < count - test_count ? "train" : "test");
    }
    llf::write_dataset(out_dir, manifest, pairs, depth, format);
    std::printf("wrote %d pairs (%d train, %d test) to %s\n", count, count - test_count,
                test_count, out_dir.c_str());
    return 0;
}

int cmd_train(const TrainFlags& flags) {
    const llf::TrainConfig cfg = merge_train_config(flags);
    const llf::PairedDataset data = llf::load_dataset(flags.data_dir, "train");
    if (data.pairs.empty())
        throw llf::io_error("no training pairs in " + flags.data_dir);

    std::printf("training %s: lr=%g epochs=%d lut_levels=%d pairs=%zu\n",
                llf::config_name(cfg.remap_kind, cfg.norm_enabled).c_str(), cfg.lr, cfg.epochs,
                cfg.llf.lut_levels, data.pairs.size());
    const llf::TrainedModel model = llf::fit(data, cfg);
    write_model_artifacts(model, flags.out);
    std::printf("final loss %.6g; curve %s; artifacts at %s{,.loss.jsonl,.curve.csv}\n",
                model.final_loss, model.monotonicity.is_monotonic ? "monotonic" : "NON-MONOTONIC",
                flags.out.c_str());
    return 0;
}

int cmd_apply(const std::string& model_path, const std::string& input_path,
              const std::string& output_path, int depth) {
    const llf::TrainedModel model = llf::load_model(model_path);
    const llf::Image input = llf::load_image(input_path);
    const llf::Image out = llf::forward(input, model);
    llf::save_image(out, output_path, depth);
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_dir,
             const std::string& report_path, const std::string& split) {
    const llf::TrainedModel model = llf::load_model(model_path);
    const llf::PairedDataset data = llf::load_dataset(data_dir, split);
    if (data.pairs.empty()) throw llf::io_error("no '" + split + "' pairs in " + data_dir);
    const llf::EvalReport rep = llf::evaluate(data, model);
    std::ofstream out(report_path);
    if (!out) throw llf::io_error("cannot write report " + report_path);
    out << llf::eval_report_json(rep, model) << "\n";
    std::printf("mean ssim %.6f, mean mse %.6g over %zu pairs\n", rep.mean_ssim, rep.mean_mse,
                rep.pairs.size());
    return 0;
}

int cmd_inspect(const std::string& model_path, const std::string& curve_path,
                const std::string& report_path) {
    const llf::TrainedModel model = llf::load_model(model_path);
    if (!curve_path.empty()) llf::write_curve_csv(model.curve, curve_path);
    if (!report_path.empty())
        llf::write_monotonicity_json(model.monotonicity, model.curve, report_path);
    std::printf("remap curve is %s (%zu violations)\n",
                model.monotonicity.is_monotonic ? "monotonic" : "NON-MONOTONIC",
                model.monotonicity.violations.size());
    return 0;
}

int cmd_baseline(const std::string& input_path, const std::string& target_path,
                 const std::string& data_dir, const std::string& out_prefix, int bins,
                 int lut_levels) {
    llf::LlfConfig cfg;
    cfg.lut_levels = lut_levels;

    llf::BaselineFit fit;
    json report;
    report["method"] = "gradient-histogram";
    report["note"] = "simplified transfer: pooled signed-gradient histogram specification, "
                     "odd-symmetrized magnitude remap";
    report["bins"] = bins;

    if (!data_dir.empty()) {
        const llf::PairedDataset train = llf::load_dataset(data_dir, "train");
        if (train.pairs.empty()) throw llf::io_error("no train pairs in " + data_dir);
        fit = llf::fit_gradient_remap(train.pairs, bins);

        const llf::PairedDataset test = llf::load_dataset(data_dir, "test");
        if (!test.pairs.empty()) {
            json pairs = json::array();
            double mean_ssim = 0.0, mean_mse = 0.0;
            for (const auto& [in, tg] : test.pairs) {
                const llf::Image out = llf::apply_baseline(in, fit.curve, cfg);
                const double s = llf::mssim(out, tg), m = llf::mse(out, tg);
                pairs.push_back({{"ssim", s}, {"mse", m}});
                mean_ssim += s;
                mean_mse += m;
            }
            report["pairs"] = pairs;
            report["mean_ssim"] = mean_ssim / test.pairs.size();
            report["mean_mse"] = mean_mse / test.pairs.size();
        }
    } else {
        if (input_path.empty() || target_path.empty())
            throw llf::config_error("baseline needs --input and --target, or --data-dir");
        const llf::Image input = llf::load_image(input_path);
        const llf::Image target = llf::load_image(target_path);
        fit = llf::fit_gradient_remap(input, target, bins);
        const llf::Image styled = llf::apply_baseline(input, fit.curve, cfg);
        llf::save_image(styled, out_prefix + ".styled.pgm", 16);
        report["ssim"] = llf::mssim(styled, target);
        report["mse"] = llf::mse(styled, target);
    }

    if (fit.degenerate)
        std::fprintf(stderr, "warning: degenerate gradient histograms, identity remap used\n");
    report["degenerate"] = fit.degenerate;

    llf::write_curve_csv(fit.curve, out_prefix + ".curve.csv");
    const llf::MonotonicityReport mono = llf::check_monotonic(fit.curve);
    llf::write_monotonicity_json(mono, fit.curve, out_prefix + ".monotonicity.json");
    report["is_monotonic"] = mono.is_monotonic;

    std::ofstream out(out_prefix + ".report.json");
    if (!out) throw llf::io_error("cannot write " + out_prefix + ".report.json");
    out << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trainable local Laplacian style transfer for grayscale images"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic paired dataset");
    uint64_t s_seed = 7;
    int s_count = 10, s_size = 64, s_test = 0, s_depth = 16;
    std::string s_out = "dataset", s_format = "pgm";
    llf::SynthStyleParams style;
    synth->add_option("--seed", s_seed, "Base RNG seed");
    synth->add_option("--count", s_count, "Number of pairs");
    synth->add_option("--size", s_size, "Square image size in pixels");
    synth->add_option("--sigma", style.sigma, "Hidden remap threshold");
    synth->add_option("--alpha", style.alpha, "Hidden detail exponent");
    synth->add_option("--beta", style.beta, "Hidden edge slope");
    synth->add_option("--gamma", style.gamma, "Hidden output scale");
    synth->add_option("--omega", style.omega, "Hidden output offset");
    synth->add_option("--out-dir", s_out, "Output directory");
    synth->add_option("--test-count", s_test, "Trailing pairs tagged as the test split");
    synth->add_option("--format", s_format, "pgm, png or csv")
        ->check(CLI::IsMember({"pgm", "png", "csv"}));
    synth->add_option("--depth", s_depth, "Bit depth for pgm/png output")
        ->check(CLI::IsMember({8, 16}));

    // train
    auto* train = app.add_subcommand("train", "Optimize a remap and normalization layer");
    TrainFlags tf;
    double t_lr;
    int t_epochs, t_lut, t_levels, t_table;
    uint64_t t_seed;
    train->add_option("--config", tf.config, "M|N, M|-, R|N or R|- (aliases mn/m-/rn/r-)");
    train->add_option("--data-dir", tf.data_dir, "Dataset directory")->required();
    train->add_option("--out", tf.out, "Model manifest path");
    train->add_option("--config-file", tf.config_file, "JSON config; flags win on conflict");
    auto* olr = train->add_option("--lr", t_lr, "Learning rate (default 0.0001)");
    auto* oep = train->add_option("--epochs", t_epochs, "Training epochs (default 300)");
    auto* olut = train->add_option("--lut-levels", t_lut, "Context samples K (default 64)");
    auto* olev = train->add_option("--levels", t_levels, "Pyramid levels, 0 = auto");
    auto* otab = train->add_option("--table-size", t_table, "Remap table knots (default 1024)");
    auto* osee = train->add_option("--seed", t_seed, "Training seed");

    // apply
    auto* apply = app.add_subcommand("apply", "Run a trained model on one image");
    std::string a_model, a_input, a_output;
    int a_depth = 16;
    apply->add_option("--model", a_model, "Model manifest")->required();
    apply->add_option("--input", a_input, "Input image")->required();
    apply->add_option("--output", a_output, "Output image")->required();
    apply->add_option("--depth", a_depth, "Output bit depth")->check(CLI::IsMember({8, 16}));

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a model against paired data");
    std::string e_model, e_dir, e_report = "report.json", e_split = "test";
    eval->add_option("--model", e_model, "Model manifest")->required();
    eval->add_option("--data-dir", e_dir, "Dataset directory")->required();
    eval->add_option("--report", e_report, "JSON report path");
    eval->add_option("--split", e_split, "Dataset split to evaluate");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Export the remap curve and its audit");
    std::string i_model, i_curve = "curve.csv", i_report = "monotonicity.json";
    inspect->add_option("--model", i_model, "Model manifest")->required();
    inspect->add_option("--curve", i_curve, "Curve CSV path");
    inspect->add_option("--report", i_report, "Monotonicity JSON path");

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Gradient-histogram reference method");
    std::string b_input, b_target, b_dir, b_out = "baseline";
    int b_bins = 256, b_lut = 64;
    baseline->add_option("--input", b_input, "Input image (single-pair mode)");
    baseline->add_option("--target", b_target, "Target image (single-pair mode)");
    baseline->add_option("--data-dir", b_dir, "Dataset directory (fit on train split)");
    baseline->add_option("--out", b_out, "Output prefix");
    baseline->add_option("--bins", b_bins, "Histogram bins");
    baseline->add_option("--lut-levels", b_lut, "Context samples K");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitBadArgs;
    }

    try {
        if (*synth)
            return cmd_synth(s_seed, s_count, s_size, style, s_out, s_test, s_format, s_depth);
        if (*train) {
            if (*olr) tf.lr = t_lr;
            if (*oep) tf.epochs = t_epochs;
            if (*olut) tf.lut_levels = t_lut;
            if (*olev) tf.levels = t_levels;
            if (*otab) tf.table_size = t_table;
            if (*osee) tf.seed = t_seed;
            return cmd_train(tf);
        }
        if (*apply) return cmd_apply(a_model, a_input, a_output, a_depth);
        if (*eval) return cmd_eval(e_model, e_dir, e_report, e_split);
        if (*inspect) return cmd_inspect(i_model, i_curve, i_report);
        if (*baseline) return cmd_baseline(b_input, b_target, b_dir, b_out, b_bins, b_lut);
    } catch (const llf::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadArgs;
    } catch (const llf::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDataError;
    } catch (const llf::numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
