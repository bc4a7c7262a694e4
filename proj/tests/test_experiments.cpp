#include "criteria.hpp"

#include "equiloc/error.hpp"
#include "equiloc/experiments/cli.hpp"
#include "equiloc/experiments/config.hpp"
#include "equiloc/experiments/report.hpp"
#include "equiloc/experiments/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace equiloc;
using namespace equiloc::experiments;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

struct CliResult {
    int code;
    std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "equiloc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<SweepRecord> sample_records() {
    const bounds::BoundInputs in{5, 13, 5, 0.8, 4.0, std::nullopt};
    std::vector<SweepRecord> r;
    r.push_back(make_record(in, bounds::Vary::EncoderRF, 5, 0, 0.1 + 0.2, true));
    r.push_back(make_record(in, bounds::Vary::EncoderRF, 5, 1, 1.0 / 3.0, false));
    r.push_back(make_record(in, bounds::Vary::EncoderRF, 5, 2, std::nan(""), false));
    return r;
}

}  // namespace

TEST(Records, CsvRoundTripIsExact) {
    const auto records = sample_records();
    const std::string csv = records_to_csv(records);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kRecordsHeader);
    const auto back = records_from_csv(csv);
    ASSERT_EQ(back.size(), records.size());
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(back[i], records[i]);
    EXPECT_TRUE(std::isnan(back[2].delta_px));
    EXPECT_FALSE(back[2].within_bound);
    EXPECT_EQ(records_to_csv(back), csv);
}

TEST(Records, EmptyListIsHeaderOnly) {
    EXPECT_EQ(records_to_csv({}), std::string(kRecordsHeader) + "\n");
    EXPECT_TRUE(records_from_csv(records_to_csv({})).empty());
}

TEST(Records, MalformedCsvIsRejected) {
    EXPECT_THROW(records_from_csv("nope\n"), DomainError);
    EXPECT_THROW(records_from_csv(std::string(kRecordsHeader) + "\nenc-rf,1,0\n"), DomainError);
}

TEST(Records, WithinBoundUsesTheTighterSide) {
    const bounds::BoundInputs in{13, 13, 5, 0.8, 4.0, std::nullopt};
    // enc 8.5, dec 4 + 3.2 = 7.2
    EXPECT_TRUE(make_record(in, bounds::Vary::EncoderRF, 13, 0, 7.2, true).within_bound);
    EXPECT_FALSE(make_record(in, bounds::Vary::EncoderRF, 13, 0, 7.3, true).within_bound);
    const bounds::BoundInputs small{1, 13, 5, 0.8, 4.0, std::nullopt};
    EXPECT_FALSE(make_record(small, bounds::Vary::EncoderRF, 1, 0, 2.01, true).within_bound);
}

TEST(Report, SvgHasOneElementPerItem) {
    const SweepConfig cfg = SweepConfig::desk(bounds::Vary::EncoderRF);
    const bounds::BoundCurve curve = sweep_curve(cfg);
    const std::string svg = render_svg(sample_records(), curve, "t");
    EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.find("<svg") != std::string::npos, true);
    EXPECT_EQ(count(svg, "class=\"band\""), 4u);
    EXPECT_EQ(count(svg, "class=\"theory\""), 1u);
    EXPECT_EQ(count(svg, "class=\"breakpoint\""), curve.breakpoints.size());
    EXPECT_EQ(count(svg, "class=\"run\""), 1u);  // only the successful, finite run
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Report, SvgRejectsMismatchedQuantities) {
    const bounds::BoundCurve curve = sweep_curve(SweepConfig::desk(bounds::Vary::DecoderRF));
    EXPECT_THROW(render_svg(sample_records(), curve), DomainError);
}

TEST(Report, CurveCsvColumns) {
    const std::string csv = curve_to_csv(sweep_curve(SweepConfig::desk(bounds::Vary::EncoderRF)));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "vary,value,mean,side,band1,band2,band3,band4");
    EXPECT_EQ(count(csv, "\n"), 6u);
}

TEST(Config, JsonRoundTrip) {
    SweepConfig c = SweepConfig::desk(bounds::Vary::GaussianSD);
    c.values = {0.5, 1.5};
    c.seeds = 3;
    c.master_seed = 77;
    c.s_pad = 9;
    c.train.learning_rate = 0.0125;
    const SweepConfig back = sweep_config_from_json(sweep_config_to_json(c));
    EXPECT_EQ(sweep_config_to_json(back), sweep_config_to_json(c));
    EXPECT_EQ(back.values, c.values);
    EXPECT_EQ(back.s_pad, 9);
    EXPECT_EQ(back.train.learning_rate, 0.0125);
    EXPECT_EQ(back.fixed.s_phi, c.fixed.s_phi);
}

TEST(Config, MissingKeysKeepThePreset) {
    const SweepConfig c = sweep_config_from_json(R"({"mode": "paper", "vary": "dec-rf", "seeds": 2})");
    const SweepConfig p = SweepConfig::paper(bounds::Vary::DecoderRF);
    EXPECT_EQ(c.seeds, 2);
    EXPECT_EQ(c.values, p.values);
    EXPECT_EQ(c.channels, p.channels);
    EXPECT_EQ(c.train.epochs, p.train.epochs);
}

TEST(Config, BadInputIsDomainError) {
    EXPECT_THROW(sweep_config_from_json("{"), DomainError);
    EXPECT_THROW(sweep_config_from_json(R"({"mode": "huge"})"), DomainError);
    EXPECT_THROW(sweep_config_from_json(R"({"seeds": "many"})"), DomainError);
    EXPECT_THROW(load_sweep_config("/nonexistent/cfg.json"), IoError);
}

TEST(Plan, PaddingAndImageGrowth) {
    SweepConfig c = SweepConfig::desk(bounds::Vary::EncoderRF);
    c.s_pad = 0;
    const PointPlan p = plan_point(c, 13);
    ASSERT_TRUE(p.feasible);
    EXPECT_EQ(p.s_pad, 12);
    EXPECT_EQ(p.s_img, 48);

    c.s_pad = 14;
    EXPECT_EQ(plan_point(c, 13).s_pad, 14);

    SweepConfig paper = SweepConfig::paper(bounds::Vary::DecoderRF);
    const PointPlan big = plan_point(paper, 31);
    ASSERT_TRUE(big.feasible);
    EXPECT_EQ(big.s_pad, 30);
    EXPECT_GE(big.s_img - 2 * big.s_pad - big.inputs.s_o + 1, paper.min_positions);
}

TEST(Plan, InfeasiblePointsCarryAReason) {
    const SweepConfig c = SweepConfig::paper(bounds::Vary::DecoderRF);
    const PointPlan p = plan_point(c, 7);  // s_o 9 does not fit a 7 px decoder field
    EXPECT_FALSE(p.feasible);
    EXPECT_FALSE(p.reason.empty());
    EXPECT_THROW(run_point(c, p, 0), DomainError);
}

TEST(Plan, PaperEncoderSweepIsFullyPlannable) {
    const SweepConfig c = SweepConfig::paper(bounds::Vary::EncoderRF);
    int planned = 0;
    for (double v : c.values)
        if (plan_point(c, v).feasible) planned += c.seeds;
    EXPECT_EQ(planned, 16 * 20);
}

TEST(Tally, CountsSuccessesAndViolations) {
    auto records = sample_records();
    SweepRecord bad = records[0];
    bad.value = 9;
    bad.delta_px = 50;
    bad.within_bound = false;
    records.push_back(bad);
    const auto t = tally(records);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].first, 5.0);
    EXPECT_EQ(t[0].second.runs, 3);
    EXPECT_EQ(t[0].second.successes, 1);
    EXPECT_EQ(t[0].second.violations, 0);
    EXPECT_EQ(t[1].second.violations, 1);

    EXPECT_FALSE(acceptance::judge_sweep(records, 0.0).pass);  // a violation always fails
    records.pop_back();
    EXPECT_TRUE(acceptance::judge_sweep(records, 0.3).pass);
    EXPECT_FALSE(acceptance::judge_sweep(records, 0.6).pass);
}

TEST(Sweep, TinySweepIsDeterministicAndSorted) {
    SweepConfig c = SweepConfig::desk(bounds::Vary::EncoderRF);
    c.values = {1, 3};
    c.fixed.s_phi = 3;
    c.fixed.s_o = 3;
    c.s_img = 12;
    c.min_positions = 2;
    c.seeds = 2;
    c.channels = 2;
    c.train.epochs = 1;
    c.train.batch_size = 4;
    std::vector<std::pair<double, int>> seen;
    const auto a = run_sweep(c, [&](const RunInfo& i) { seen.emplace_back(i.value, i.seed); });
    const auto b = run_sweep(c);
    ASSERT_EQ(a.size(), 4u);
    EXPECT_EQ(seen.size(), 4u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].delta_px, b[i].delta_px);
        EXPECT_EQ(a[i].value, i < 2 ? 1.0 : 3.0);
        EXPECT_EQ(a[i].seed, int(i % 2));
    }
}

TEST(Cli, BoundsPrintsTheCurve) {
    const CliResult r = run_cli({"bounds", "--vary", "enc-rf", "--s-phi", "25", "--s-o", "9"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("enc-rf,9,8,"), std::string::npos) << r.out;
}

TEST(Cli, OracleReportsAllCases) {
    const CliResult r = run_cli({"oracle"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("all 3904 cases match"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitWithOne) {
    EXPECT_EQ(run_cli({"--no-such-flag"}).code, 1);
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"bounds", "--vary", "size"}).code, 1);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, GenDataWritesTheDataset) {
    const auto dir = std::filesystem::temp_directory_path() / "equiloc_cli_gen";
    std::filesystem::remove_all(dir);
    const CliResult r = run_cli({"gen-data", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("576 samples (432 train / 144 test)"), std::string::npos) << r.out;
    EXPECT_TRUE(std::filesystem::exists(dir / "dataset.bin"));
    EXPECT_TRUE(std::filesystem::exists(dir / "centres.txt"));
    std::filesystem::remove_all(dir);
}

TEST(Acceptance, OracleEquivalence) { EXPECT_TRUE(acceptance::oracle_equivalence().pass); }

TEST(Acceptance, CorollaryConsistency) {
    const auto o = acceptance::corollary_consistency();
    EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Acceptance, EquivarianceSuite) {
    const auto o = acceptance::equivariance_suite(10, 99);
    EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Acceptance, GradientSuite) {
    const auto o = acceptance::gradient_suite();
    EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Acceptance, ProtocolFidelity) {
    const auto dir = std::filesystem::temp_directory_path() / "equiloc_protocol";
    const auto o = acceptance::protocol_fidelity(dir.string());
    EXPECT_TRUE(o.pass) << o.detail;
    std::filesystem::remove_all(dir);
}

TEST(Acceptance, DeskConfigIsValid) {
    const SweepConfig c = acceptance::desk_reproduction_config();
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.values, (std::vector<double>{1, 3, 5, 9, 13}));
    for (double v : c.values) {
        const PointPlan p = plan_point(c, v);
        EXPECT_TRUE(p.feasible) << v;
        EXPECT_EQ(p.s_img, 48);
        EXPECT_EQ(p.s_pad, 14);  // 16 x 16 positions, 192 train / 64 test
    }
}
