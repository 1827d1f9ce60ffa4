#include "llf/train.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "llf/adam.hpp"

namespace llf {

std::pair<RemapKind, bool> parse_config_name(const std::string& name) {
    std::string n;
    for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (n == "m|n" || n == "mn") return {RemapKind::mlp, true};
    if (n == "m|-" || n == "m-") return {RemapKind::mlp, false};
    if (n == "r|n" || n == "rn") return {RemapKind::orig, true};
    if (n == "r|-" || n == "r-") return {RemapKind::orig, false};
    throw config_error("unknown configuration '" + name + "' (expected M|N, M|-, R|N or R|-)");
}

std::string config_name(RemapKind kind, bool norm_enabled) {
    std::string s = kind == RemapKind::mlp ? "M|" : "R|";
    s += norm_enabled ? "N" : "-";
    return s;
}

std::pair<double, double> loss_terms(const Image& out, const Image& target) {
    return {mse(out, target), 1.0 - mssim(out, target)};
}

std::pair<double, Image> loss_and_grad(const Image& out, const Image& target) {
    const double mse_term = mse(out, target);
    const double ms = mssim(out, target);
    Image grad = mssim_backward(out, target, SsimParams{}, -1.0);
    const double inv_n = 1.0 / static_cast<double>(out.size());
    for (size_t i = 0; i < grad.size(); ++i)
        grad.data()[i] += 2.0 * (out.data()[i] - target.data()[i]) * inv_n;
    return {mse_term + (1.0 - ms), std::move(grad)};
}

std::pair<double, double> norm_backward(const Image& out_grad, const Image& llf_out) {
    double dgamma = 0.0, domega = 0.0;
    for (size_t i = 0; i < out_grad.size(); ++i) {
        dgamma += out_grad.data()[i] * llf_out.data()[i];
        domega += out_grad.data()[i];
    }
    return {dgamma, domega};
}

namespace {

RemapCurve tabulate_orig(const OrigRemap& remap, int table_size) {
    return export_curve(remap, table_size);
}

RemapCurve tabulate_mlp_training(MlpRemap& net, int table_size, bool update_running,
                                 MlpRemap::ForwardCache* cache) {
    RemapCurve c;
    c.grid = RemapCurve::make_grid(table_size);
    c.values = net.forward(c.grid, cache, update_running);
    return c;
}

struct StepResult {
    double loss;
    double mse_term;
    double mssim_term;
};

// One forward/backward pass over a single training pair; fills grads.
StepResult pipeline_step(const Image& input, const Image& target, const RemapCurve& table,
                         const MlpRemap::ForwardCache* mlp_cache, MlpRemap* mlp,
                         const OrigRemap* orig, const NormLayer& norm, bool norm_enabled,
                         const LlfConfig& llf_cfg, PipelineGrads& grads) {
    TabulatedRemap remap(table);
    auto [llf_out, tape] = llf_fast_with_tape(input, remap, llf_cfg);

    Image out(llf_out.width(), llf_out.height());
    for (size_t i = 0; i < out.size(); ++i)
        out.data()[i] = llf_out.data()[i] * norm.gamma + norm.omega;

    auto [loss, dout] = loss_and_grad(out, target);
    const auto [mse_term, mssim_term] = loss_terms(out, target);

    if (norm_enabled) {
        std::tie(grads.gamma, grads.omega) = norm_backward(dout, llf_out);
    } else {
        grads.gamma = grads.omega = 0.0;
    }

    Image dllf(dout.width(), dout.height());
    for (size_t i = 0; i < dllf.size(); ++i) dllf.data()[i] = dout.data()[i] * norm.gamma;

    const std::vector<double> dtable = llf_backward(tape, dllf);

    if (orig) {
        grads.remap.assign(3, 0.0);
        for (size_t j = 0; j < dtable.size(); ++j) {
            const auto g3 = orig_remap_grad(*orig, table.grid[j]);
            grads.remap[0] += dtable[j] * g3[0];
            grads.remap[1] += dtable[j] * g3[1];
            grads.remap[2] += dtable[j] * g3[2];
        }
    } else {
        const auto net_grads = mlp->backward(*mlp_cache, dtable);
        grads.remap = net_grads.trainable;
    }
    return {loss, mse_term, mssim_term};
}

}  // namespace

Image forward(const Image& img, const TrainedModel& model) {
    const RemapCurve table = export_curve(model.remap(), model.config.table_size);
    TabulatedRemap remap(table);
    Image out = llf_fast(img, remap, model.config.llf);
    const double gamma = model.norm_enabled ? model.norm.gamma : 1.0;
    const double omega = model.norm_enabled ? model.norm.omega : 0.0;
    for (size_t i = 0; i < out.size(); ++i)
        out.data()[i] = out.data()[i] * gamma + omega;
    return out;
}

TrainedModel fit(const PairedDataset& data, const TrainConfig& cfg) {
    if (data.pairs.empty()) throw config_error("training needs at least one image pair");
    if (cfg.epochs < 1) throw config_error("epochs must be at least 1");
    if (cfg.lr <= 0.0) throw config_error("learning rate must be positive");
    if (cfg.table_size < 2) throw config_error("table_size must be at least 2");

    TrainedModel model;
    model.kind = cfg.remap_kind;
    model.norm_enabled = cfg.norm_enabled;
    model.config = cfg;

    if (cfg.remap_kind == RemapKind::mlp) {
        PretrainResult pre = pretrain_identity(cfg.seed);
        model.mlp = std::move(pre.net);
        model.mlp.set_mode(MlpRemap::Mode::training);
        model.pretrain_steps = pre.steps;
        model.pretrain_error = pre.max_abs_error;
    } else {
        model.orig = OrigRemap(0.25, 1.0, 1.0);  // identity for any sigma
    }

    const size_t n_remap =
        cfg.remap_kind == RemapKind::mlp ? model.mlp.num_trainable() : 3;
    const size_t n_params = n_remap + (cfg.norm_enabled ? 2 : 0);

    std::vector<double> params(n_params);
    auto pack = [&]() {
        if (cfg.remap_kind == RemapKind::mlp)
            model.mlp.copy_trainable(std::span(params.data(), n_remap));
        else {
            params[0] = model.orig.sigma;
            params[1] = model.orig.alpha;
            params[2] = model.orig.beta;
        }
        if (cfg.norm_enabled) {
            params[n_remap] = model.norm.gamma;
            params[n_remap + 1] = model.norm.omega;
        }
    };
    auto unpack = [&]() {
        if (cfg.remap_kind == RemapKind::mlp)
            model.mlp.apply_trainable(std::span<const double>(params.data(), n_remap));
        else {
            model.orig.sigma = std::max(params[0], 1e-4);
            params[0] = model.orig.sigma;
            if (params[2] < 0.0) {
                params[2] = 0.0;
                ++model.beta_projections;
            }
            model.orig.alpha = params[1];
            model.orig.beta = params[2];
        }
        if (cfg.norm_enabled) {
            model.norm.gamma = params[n_remap];
            model.norm.omega = params[n_remap + 1];
        }
    };

    Adam opt(n_params, cfg.lr);
    opt.beta1 = cfg.beta1;
    opt.beta2 = cfg.beta2;
    opt.epsilon = cfg.adam_epsilon;

    std::vector<double> flat_grads(n_params);
    PipelineGrads grads;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double ep_loss = 0.0, ep_mse = 0.0, ep_mssim = 0.0;
        for (size_t pi = 0; pi < data.pairs.size(); ++pi) {
            const auto& [input, target] = data.pairs[pi];

            RemapCurve table;
            MlpRemap::ForwardCache cache;
            if (cfg.remap_kind == RemapKind::mlp)
                table = tabulate_mlp_training(model.mlp, cfg.table_size, true, &cache);
            else
                table = tabulate_orig(model.orig, cfg.table_size);

            StepResult res = pipeline_step(
                input, target, table, &cache,
                cfg.remap_kind == RemapKind::mlp ? &model.mlp : nullptr,
                cfg.remap_kind == RemapKind::orig ? &model.orig : nullptr, model.norm,
                cfg.norm_enabled, cfg.llf, grads);

            if (!std::isfinite(res.loss)) {
                char msg[192];
                std::snprintf(msg, sizeof msg,
                              "non-finite loss at epoch %d, pair %zu (mse=%.6g, 1-mssim=%.6g)",
                              epoch, pi, res.mse_term, res.mssim_term);
                throw numeric_error(msg);
            }

            for (size_t i = 0; i < n_remap; ++i) flat_grads[i] = grads.remap[i];
            if (cfg.norm_enabled) {
                flat_grads[n_remap] = grads.gamma;
                flat_grads[n_remap + 1] = grads.omega;
            }
            pack();
            opt.step(params, flat_grads);
            unpack();

            ep_loss += res.loss;
            ep_mse += res.mse_term;
            ep_mssim += res.mssim_term;
        }
        const double inv = 1.0 / static_cast<double>(data.pairs.size());
        model.history.push_back({epoch, ep_loss * inv, ep_mse * inv, ep_mssim * inv});
    }
    model.final_loss = model.history.back().mean_loss;

    if (cfg.remap_kind == RemapKind::mlp) model.mlp.set_mode(MlpRemap::Mode::inference);
    model.curve = export_curve(model.remap(), cfg.table_size);
    model.monotonicity = check_monotonic(model.curve);
    return model;
}

EvalReport evaluate(const PairedDataset& data, const TrainedModel& model) {
    if (data.pairs.empty()) throw config_error("evaluation needs at least one image pair");
    EvalReport rep;
    for (const auto& [input, target] : data.pairs) {
        const Image out = forward(input, model);
        rep.pairs.push_back({mssim(out, target), mse(out, target)});
    }
    const double n = static_cast<double>(rep.pairs.size());
    for (const auto& p : rep.pairs) {
        rep.mean_ssim += p.ssim;
        rep.mean_mse += p.mse;
    }
    rep.mean_ssim /= n;
    rep.mean_mse /= n;
    for (const auto& p : rep.pairs) {
        rep.stddev_ssim += (p.ssim - rep.mean_ssim) * (p.ssim - rep.mean_ssim);
        rep.stddev_mse += (p.mse - rep.mean_mse) * (p.mse - rep.mean_mse);
    }
    rep.stddev_ssim = std::sqrt(rep.stddev_ssim / n);
    rep.stddev_mse = std::sqrt(rep.stddev_mse / n);
    return rep;
}

}  // namespace llf
