#include "equiloc/experiments/cli.hpp"

#include "equiloc/bounds/oracle.hpp"
#include "equiloc/data/export.hpp"
#include "equiloc/experiments/config.hpp"
#include "equiloc/experiments/report.hpp"
#include "equiloc/model/checkpoint.hpp"
#include "equiloc/ndkernel/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>

namespace equiloc::experiments {

namespace {

namespace fs = std::filesystem;

struct Common {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool paper = false;
    bool desk = false;
    std::string config;
};

struct Overrides {
    std::string vary;
    std::vector<double> values;
    std::optional<int> s_psi, s_phi, s_o, seeds, epochs;
    std::optional<double> sigma_g, n_sigma;
};

void add_common(CLI::App* app, Common& c, bool with_config) {
    app->add_option("--out-dir", c.out_dir, "Directory for output files")->capture_default_str();
    app->add_option("--seed", c.seed, "Master seed");
    auto* p = app->add_flag("--paper-faithful", c.paper, "Full-scale settings (80 px, 32 channels, 500 epochs, 20 seeds)");
    auto* d = app->add_flag("--desk-scale", c.desk, "Reduced settings for one CPU core (default)");
    p->excludes(d);
    if (with_config) app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
}

const std::vector<std::string> kVaryNames{"enc-rf", "dec-rf", "obj-size", "sigma-g"};

void add_overrides(CLI::App* app, Overrides& o) {
    app->add_option("--vary", o.vary, "Varied quantity")->check(CLI::IsMember(kVaryNames));
    app->add_option("--values", o.values, "Values of the varied quantity");
    app->add_option("--s-psi", o.s_psi, "Encoder receptive field (px)");
    app->add_option("--s-phi", o.s_phi, "Decoder receptive field (px)");
    app->add_option("--s-o", o.s_o, "Object size (px)");
    app->add_option("--sigma-g", o.sigma_g, "Gaussian standard deviation (px)");
    app->add_option("--n-sigma", o.n_sigma, "Decoder band width in standard deviations");
}

SweepConfig build_config(const Common& c, const Overrides& o, bool default_paper = false) {
    const bool paper = c.paper || (default_paper && !c.desk);
    const auto preset = [&](bounds::Vary v) { return paper ? SweepConfig::paper(v) : SweepConfig::desk(v); };
    SweepConfig cfg;
    if (c.config.empty()) {
        cfg = preset(o.vary.empty() ? bounds::Vary::EncoderRF : bounds::parse_vary(o.vary));
    } else {
        cfg = load_sweep_config(c.config);
        if (!o.vary.empty() && bounds::parse_vary(o.vary) != cfg.vary) {
            const SweepConfig p = preset(bounds::parse_vary(o.vary));
            cfg.vary = p.vary;
            cfg.values = p.values;
            cfg.fixed = p.fixed;
        }
        if (c.paper || c.desk) {
            const SweepConfig p = preset(cfg.vary);
            cfg.seeds = p.seeds;
            cfg.s_img = p.s_img;
            cfg.channels = p.channels;
            cfg.s_pad = p.s_pad;
            cfg.train = p.train;
        }
    }
    if (!o.values.empty()) cfg.values = o.values;
    if (o.s_psi) cfg.fixed.s_psi = *o.s_psi;
    if (o.s_phi) cfg.fixed.s_phi = *o.s_phi;
    if (o.s_o) cfg.fixed.s_o = *o.s_o;
    if (o.sigma_g) cfg.fixed.sigma_g = *o.sigma_g;
    if (o.n_sigma) cfg.fixed.n_sigma = *o.n_sigma;
    if (o.seeds) cfg.seeds = *o.seeds;
    if (o.epochs) cfg.train.epochs = *o.epochs;
    if (c.seed) cfg.master_seed = *c.seed;
    return cfg;
}

fs::path out_path(const Common& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    return fs::path(c.out_dir) / name;
}

double fixed_value(const SweepConfig& cfg) {
    switch (cfg.vary) {
        case bounds::Vary::EncoderRF: return cfg.fixed.s_psi;
        case bounds::Vary::DecoderRF: return cfg.fixed.s_phi;
        case bounds::Vary::ObjectSize: return cfg.fixed.s_o;
        case bounds::Vary::GaussianSD: return cfg.fixed.sigma_g;
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Translation-equivariant autoencoder: position-error bounds, training and sweeps", "equiloc"};
    app.require_subcommand(1);

    // bounds
    Common bc;
    Overrides bo;
    std::optional<int> size_min, size_max;
    auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate a bound curve and write CSV/SVG");
    add_common(bounds_cmd, bc, false);
    add_overrides(bounds_cmd, bo);
    bounds_cmd->add_option("--size-min", size_min, "Smallest object size of a size range (px)");
    bounds_cmd->add_option("--size-max", size_max, "Largest object size of a size range (px)");

    // oracle
    int oracle_max = 31, oracle_max_s_o = 25;
    auto* oracle_cmd = app.add_subcommand("oracle", "Check the bound terms against brute-force enumeration");
    oracle_cmd->add_option("--max", oracle_max, "Largest receptive field")->capture_default_str();
    oracle_cmd->add_option("--max-s-o", oracle_max_s_o, "Largest object size")->capture_default_str();

    // gen-data
    Common gc;
    data::SyntheticConfig gen{80, 9, 24};
    auto* gen_cmd = app.add_subcommand("gen-data", "Export the synthetic square dataset");
    add_common(gen_cmd, gc, false);
    gen_cmd->add_option("--s-img", gen.s_img, "Image size (px)")->capture_default_str();
    gen_cmd->add_option("--s-o", gen.s_o, "Object size (px)")->capture_default_str();
    gen_cmd->add_option("--s-pad", gen.s_pad, "Border padding (px)")->capture_default_str();

    // train
    Common tc;
    Overrides to;
    std::optional<double> train_value;
    int seed_index = 0;
    auto* train_cmd = app.add_subcommand("train", "Train one model and report its position error");
    add_common(train_cmd, tc, true);
    add_overrides(train_cmd, to);
    train_cmd->add_option("--value", train_value, "Value of the varied quantity (default: the fixed value)");
    train_cmd->add_option("--seed-index", seed_index, "Seed index within the sweep")->capture_default_str();
    train_cmd->add_option("--epochs", to.epochs, "Training epochs");

    // sweep
    Common sc;
    Overrides so;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a full sweep and write records CSV and SVG report");
    add_common(sweep_cmd, sc, true);
    add_overrides(sweep_cmd, so);
    sweep_cmd->add_option("--seeds", so.seeds, "Seeds per value");
    sweep_cmd->add_option("--epochs", so.epochs, "Training epochs");

    // report
    Common rc;
    Overrides ro;
    std::string records_path;
    auto* report_cmd = app.add_subcommand("report", "Re-render the SVG report from a records CSV");
    add_common(report_cmd, rc, true);
    add_overrides(report_cmd, ro);
    report_cmd->add_option("--records", records_path, "Records CSV")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*bounds_cmd) {
            SweepConfig cfg = build_config(bc, bo, true);
            bounds::BoundCurve curve;
            if (size_min || size_max) {
                if (!size_min || !size_max) {
                    err << "bounds: --size-min and --size-max go together\n";
                    return 1;
                }
                cfg.fixed.size_range = bounds::SizeRange{*size_min, *size_max};
                curve = bounds::sizerange_bound(cfg.vary, cfg.values, cfg.fixed);
            } else {
                curve = sweep_curve(cfg);
            }
            const std::string csv = curve_to_csv(curve);
            out << csv;
            if (bounds_cmd->count("--out-dir")) {
                const std::string stem = "bounds_" + bounds::to_string(cfg.vary);
                write_text(out_path(bc, stem + ".csv"), csv);
                write_text(out_path(bc, stem + ".svg"), render_svg({}, curve, "bound, " + bounds::to_string(cfg.vary)));
            }
            return 0;
        }

        if (*oracle_cmd) {
            const auto t0 = std::chrono::steady_clock::now();
            const bounds::OracleReport report = bounds::oracle_grid_check(oracle_max, oracle_max_s_o);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (report.ok()) {
                out << "all " << report.cases << " cases match (" << secs << " s)\n";
                return 0;
            }
            for (const auto& m : report.mismatches) {
                out << "mismatch s_psi=" << m.s_psi << " s_phi=" << m.s_phi << " s_o=" << m.s_o << " side "
                    << bounds::to_string(m.side) << ": oracle " << m.oracle.str() << " formula " << m.formula.str()
                    << '\n';
            }
            out << report.mismatches.size() << " of " << report.cases << " cases mismatch\n";
            return 2;
        }

        if (*gen_cmd) {
            const auto samples = data::generate_square_dataset(gen);
            const auto split = data::split_quadrants(samples);
            const auto bin = out_path(gc, "dataset.bin");
            data::write_dataset(bin.string(), gen, samples);
            data::write_centre_index(out_path(gc, "centres.txt").string(), samples);
            out << samples.size() << " samples (" << split.train.size() << " train / " << split.test.size()
                << " test) -> " << bin.string() << '\n';
            return 0;
        }

        if (*train_cmd) {
            const SweepConfig cfg = build_config(tc, to);
            cfg.validate();
            const double value = train_value.value_or(fixed_value(cfg));
            const PointPlan plan = plan_point(cfg, value);
            if (!plan.feasible) {
                err << "train: infeasible point: " << plan.reason << '\n';
                return 2;
            }
            const std::uint64_t run_seed = nd::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(seed_index));
            data::SyntheticConfig dc{plan.s_img, plan.inputs.s_o, plan.s_pad};
            const auto split = data::split_quadrants(data::generate_square_dataset(dc));
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
            train::TrainConfig tcfg = cfg.train;
            tcfg.seed = run_seed;
            const auto result = train::train_run(model, split, tcfg, [&](int epoch, double loss) {
                if (epoch % 10 == 0 || epoch + 1 == tcfg.epochs) err << "epoch " << epoch << " loss " << loss << '\n';
            });
            const SweepRecord rec = make_record(plan.inputs, cfg.vary, value, seed_index, result.delta, result.success);

            nlohmann::json j;
            j["vary"] = bounds::to_string(cfg.vary);
            j["value"] = value;
            j["seed_index"] = seed_index;
            j["run_seed"] = run_seed;
            j["s_img"] = plan.s_img;
            j["s_pad"] = plan.s_pad;
            j["accuracy"] = result.accuracy;
            j["success"] = result.success;
            j["delta_px"] = result.delta;
            j["offset_spread_px"] = {result.offset_spread_y, result.offset_spread_x};
            j["bound_px"] = std::min(rec.enc_term, rec.dec_mean + rec.band);
            j["within_bound"] = rec.within_bound;
            j["epochs"] = result.epochs_run;
            j["batchnorm_at_eval"] = "running statistics";
            j["loss_history"] = result.loss_history;
            write_text(out_path(tc, "run.json"), j.dump(2) + "\n");
            model::save_checkpoint(model, out_path(tc, "checkpoint.json").string());
            out << "accuracy " << result.accuracy << (result.success ? " (success)" : " (below gate)") << ", delta "
                << result.delta << " px, bound " << std::min(rec.enc_term, rec.dec_mean + rec.band) << " px\n";
            return 0;
        }

        if (*sweep_cmd) {
            const SweepConfig cfg = build_config(sc, so);
            cfg.validate();
            const std::string stem = bounds::to_string(cfg.vary);
            write_text(out_path(sc, "config_" + stem + ".json"), sweep_config_to_json(cfg) + "\n");
            const auto records = run_sweep(cfg, [&](const RunInfo& info) {
                if (!info.result) {
                    err << stem << " = " << info.value << ": " << info.note << '\n';
                    return;
                }
                err << stem << " = " << info.value << " seed " << info.seed << ": accuracy " << info.result->accuracy
                    << " delta " << info.result->delta << (info.note.empty() ? "" : " " + info.note) << '\n';
            });
            const auto curve = sweep_curve(cfg);
            write_records_csv(out_path(sc, "records_" + stem + ".csv").string(), records);
            write_text(out_path(sc, "curve_" + stem + ".csv"), curve_to_csv(curve));
            write_text(out_path(sc, "report_" + stem + ".svg"), render_svg(records, curve, "position error, " + stem));
            int violations = 0;
            for (const auto& [value, v] : tally(records)) {
                out << stem << " = " << value << ": " << v.successes << "/" << v.runs << " successful, "
                    << v.violations << " above bound\n";
                violations += v.violations;
            }
            return violations == 0 ? 0 : 2;
        }

        if (*report_cmd) {
            const auto records = read_records_csv(records_path);
            Overrides o = ro;
            if (o.vary.empty() && rc.config.empty() && !records.empty()) o.vary = bounds::to_string(records.front().vary);
            SweepConfig cfg = build_config(rc, o, false);
            if (ro.values.empty() && rc.config.empty()) {
                std::set<double> seen;
                for (const auto& r : records) seen.insert(r.value);
                if (!seen.empty()) cfg.values.assign(seen.begin(), seen.end());
            }
            const std::string stem = bounds::to_string(cfg.vary);
            const auto curve = sweep_curve(cfg);
            write_text(out_path(rc, "curve_" + stem + ".csv"), curve_to_csv(curve));
            write_text(out_path(rc, "report_" + stem + ".svg"), render_svg(records, curve, "position error, " + stem));
            out << "wrote " << out_path(rc, "report_" + stem + ".svg").string() << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace equiloc::experiments
