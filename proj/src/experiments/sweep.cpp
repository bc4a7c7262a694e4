#include "equiloc/experiments/sweep.hpp"

#include "equiloc/data/synthetic.hpp"
#include "equiloc/error.hpp"
#include "equiloc/model/network.hpp"
#include "equiloc/ndkernel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace equiloc::experiments {

namespace {

std::vector<double> odd_range(int lo, int hi) {
    std::vector<double> v;
    for (int x = lo; x <= hi; x += 2) v.push_back(x);
    return v;
}

std::vector<double> paper_sigma_grid() {
    std::vector<double> v;
    for (int k = 1; k <= 21; ++k) v.push_back(k / 10.0);
    for (int k = 9; k <= 20; ++k) v.push_back(k / 4.0);  // 2.25, 2.5, ..., 5
    return v;
}

void set_varied(bounds::BoundInputs& in, bounds::Vary vary, double value) {
    const auto as_int = [&](const char* name) {
        if (value != std::floor(value)) throw DomainError(std::string(name) + " must be an integer");
        return static_cast<int>(value);
    };
    switch (vary) {
        case bounds::Vary::EncoderRF: in.s_psi = as_int("s_psi"); break;
        case bounds::Vary::DecoderRF: in.s_phi = as_int("s_phi"); break;
        case bounds::Vary::ObjectSize: in.s_o = as_int("s_o"); break;
        case bounds::Vary::GaussianSD: in.sigma_g = value; break;
    }
}

}  // namespace

SweepConfig SweepConfig::paper(bounds::Vary vary) {
    SweepConfig c;
    c.vary = vary;
    c.seeds = 20;
    c.s_img = 80;
    c.channels = 32;
    c.train = train::TrainConfig{};  // 500 epochs, batch 128, lr 1e-3
    switch (vary) {
        case bounds::Vary::EncoderRF:
            c.values = odd_range(1, 31);
            c.fixed = {.s_psi = 9, .s_phi = 25, .s_o = 9, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
        case bounds::Vary::DecoderRF:
            c.values = odd_range(1, 31);
            c.fixed = {.s_psi = 9, .s_phi = 25, .s_o = 9, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
        case bounds::Vary::ObjectSize:
            c.values = odd_range(1, 25);
            c.fixed = {.s_psi = 9, .s_phi = 25, .s_o = 9, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
        case bounds::Vary::GaussianSD:
            c.values = paper_sigma_grid();
            c.fixed = {.s_psi = 9, .s_phi = 11, .s_o = 7, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
    }
    return c;
}

SweepConfig SweepConfig::desk(bounds::Vary vary) {
    SweepConfig c;
    c.vary = vary;
    c.seeds = 10;
    c.s_img = 48;
    c.channels = 8;
    c.s_pad = 14;  // 16 positions per axis at 48 px and s_o = 5
    c.train.epochs = 100;
    c.train.batch_size = 8;
    c.train.learning_rate = 5e-3;
    switch (vary) {
        case bounds::Vary::EncoderRF:
            c.values = {1, 3, 5, 9, 13};
            c.fixed = {.s_psi = 5, .s_phi = 13, .s_o = 5, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
        case bounds::Vary::DecoderRF:
            c.values = {5, 7, 9, 13, 17};
            c.fixed = {.s_psi = 5, .s_phi = 13, .s_o = 5, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
        case bounds::Vary::ObjectSize:
            c.values = {1, 3, 5, 7, 9};
            c.fixed = {.s_psi = 5, .s_phi = 13, .s_o = 5, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
        case bounds::Vary::GaussianSD:
            c.values = {0.4, 0.8, 1.2, 1.6, 2.0};
            c.fixed = {.s_psi = 5, .s_phi = 9, .s_o = 5, .sigma_g = 0.8, .n_sigma = 4.0, .size_range = std::nullopt};
            break;
    }
    return c;
}

void SweepConfig::validate() const {
    if (values.empty()) throw DomainError("SweepConfig: empty value list");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1])) throw DomainError("SweepConfig: values must be strictly increasing");
    if (seeds < 1) throw DomainError("SweepConfig: seeds must be >= 1");
    if (s_img < 1) throw DomainError("SweepConfig: s_img must be positive");
    if (s_pad < 0) throw DomainError("SweepConfig: s_pad must be >= 0");
    if (min_positions < 2) throw DomainError("SweepConfig: min_positions must be >= 2");
    if (channels < 1 || n_layers < 1) throw DomainError("SweepConfig: channels and layers must be >= 1");
    if (!(temperature > 0.0)) throw DomainError("SweepConfig: temperature must be positive");
    fixed.validate(false);
    train.validate();
}

PointPlan plan_point(const SweepConfig& cfg, double value) {
    PointPlan plan;
    plan.inputs = cfg.fixed;
    plan.inputs.size_range.reset();
    try {
        set_varied(plan.inputs, cfg.vary, value);
        plan.inputs.validate(true);
        if (plan.inputs.sigma_g <= 0.0) throw DomainError("sigma_g must be positive to render");
        model::plan_kernels(plan.inputs.s_psi, cfg.n_layers);
        model::plan_kernels(plan.inputs.s_phi, cfg.n_layers);
    } catch (const DomainError& e) {
        plan.reason = e.what();
        return plan;
    }
    plan.s_pad = std::max(cfg.s_pad, data::required_padding(plan.inputs.s_psi, plan.inputs.s_phi));
    plan.s_img = std::max(cfg.s_img, 2 * plan.s_pad + plan.inputs.s_o - 1 + cfg.min_positions);
    plan.feasible = true;
    return plan;
}

SweepRecord make_record(const bounds::BoundInputs& in, bounds::Vary vary, double value, int seed, double delta,
                        bool success) {
    const bounds::BoundValue b = bounds::theorem_bound(in, 0.0);
    SweepRecord r;
    r.vary = vary;
    r.value = value;
    r.seed = seed;
    r.delta_px = delta;
    r.success = success;
    r.enc_term = b.encoder_term.value();
    r.dec_mean = b.decoder_term_mean.value();
    r.band = b.decoder_band;
    r.within_bound = delta <= std::min(r.enc_term, r.dec_mean + r.band);
    return r;
}

train::RunResult run_point(const SweepConfig& cfg, const PointPlan& plan, int seed) {
    if (!plan.feasible) throw DomainError("run_point: infeasible point: " + plan.reason);
    const std::uint64_t run_seed = nd::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(seed));

    data::SyntheticConfig dc{plan.s_img, plan.inputs.s_o, plan.s_pad};
    dc.validate_for(plan.inputs.s_psi, plan.inputs.s_phi);
    const data::Split split = data::split_quadrants(data::generate_square_dataset(dc));

    model::ModelConfig mc;
    mc.height = mc.width = static_cast<std::size_t>(plan.s_img);
    mc.channels = cfg.channels;
    mc.n_layers = cfg.n_layers;
    mc.s_psi = plan.inputs.s_psi;
    mc.s_phi = plan.inputs.s_phi;
    mc.softargmax.temperature = cfg.temperature;
    mc.render.sigma = plan.inputs.sigma_g;
    mc.seed = nd::derive_seed(run_seed, 0);
    model::Autoencoder model(mc);

    train::TrainConfig tc = cfg.train;
    tc.seed = run_seed;
    return train::train_run(model, split, tc);
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    std::vector<SweepRecord> records;
    for (double value : cfg.values) {
        const PointPlan plan = plan_point(cfg, value);
        if (!plan.feasible) {
            if (progress) progress({value, -1, nullptr, "skipped: " + plan.reason});
            continue;
        }
        for (int s = 0; s < cfg.seeds; ++s) {
            train::RunResult result;
            std::string note;
            try {
                result = run_point(cfg, plan, s);
            } catch (const DivergenceError& e) {
                result.success = false;
                result.delta = std::nan("");
                note = e.what();
            }
            records.push_back(make_record(plan.inputs, cfg.vary, value, s, result.delta, result.success));
            if (progress) progress({value, s, &result, note});
        }
    }
    std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return a.value != b.value ? a.value < b.value : a.seed < b.seed;
    });
    return records;
}

bounds::BoundCurve sweep_curve(const SweepConfig& cfg) {
    std::vector<double> domain;
    for (double v : cfg.values)
        if (plan_point(cfg, v).feasible) domain.push_back(v);
    bounds::BoundInputs in = cfg.fixed;
    in.size_range.reset();
    return bounds::corollary_bound(cfg.vary, domain, in);
}

std::vector<std::pair<double, Verdict>> tally(const std::vector<SweepRecord>& records) {
    std::map<double, Verdict> by_value;
    for (const auto& r : records) {
        Verdict& v = by_value[r.value];
        ++v.runs;
        if (r.success) {
            ++v.successes;
            if (!r.within_bound) ++v.violations;
        }
    }
    return {by_value.begin(), by_value.end()};
}

}  // namespace equiloc::experiments
