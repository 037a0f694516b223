#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "reheat/errors.hpp"
#include "reheat/harness.hpp"

namespace fs = std::filesystem;
using namespace reheat;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    int workers = 1;
};

void add_common(CLI::App* app, Options& o) {
    app->add_option("--config", o.config, "INI config file (defaults when omitted)");
    app->add_option("--seed", o.seed, "override experiment.seed");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Options& o) {
    ExperimentConfig config = o.config.empty() ? parse_config("") : load_config(o.config);
    if (o.seed) config.seed = *o.seed;
    return config;
}

// Wall-clock goes to its own file so every other output stays byte-stable.
void write_timing(const fs::path& out, const char* verb, std::chrono::steady_clock::time_point start) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["verb"] = verb;
    j["wall_clock_seconds"] = seconds;
    write_file(out / "timing.json", j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale laboratory for non-monotonic noise schedules"};
    app.require_subcommand(1);
    Options o;

    auto* schedule = app.add_subcommand("schedule", "schedule utilities");
    schedule->require_subcommand(1);
    auto* dump = schedule->add_subcommand("dump", "write the configured schedule as CSV");
    add_common(dump, o);
    auto* run = app.add_subcommand("run", "sample one schedule against a monotonic control");
    add_common(run, o);
    auto* ablation = app.add_subcommand("ablation", "position x magnitude single-reheat grid");
    add_common(ablation, o);
    auto* ssc_cmd = app.add_subcommand("ssc", "schedule sensitivity coefficient");
    add_common(ssc_cmd, o);
    auto* pareto = app.add_subcommand("pareto", "NFE sweep over stochasticity variants");
    add_common(pareto, o);
    auto* calibrate = app.add_subcommand("calibrate", "adaptive-reheat threshold calibration");
    add_common(calibrate, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << error_json("usage_error", e.what());
        return 2;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        const ExperimentConfig config = resolve(o);
        const fs::path out = o.out;
        if (dump->parsed()) {
            write_file(out / "schedule.csv", to_csv(config.schedule(config.nfe)));
            write_timing(out, "schedule dump", start);
        } else if (run->parsed()) {
            write_file(out / "report.json", to_json(cmd_run(config, o.workers), config));
            write_timing(out, "run", start);
        } else if (ablation->parsed()) {
            const AblationReport report = cmd_ablation(config, o.workers);
            write_file(out / "ablation.csv", ablation_csv(report));
            write_file(out / "ablation_summary.csv", ablation_summary_csv(report));
            write_file(out / "ablation_rows.csv", ablation_rows_csv(report));
            write_file(out / "report.json", to_json(report, config));
            write_timing(out, "ablation", start);
        } else if (ssc_cmd->parsed()) {
            write_file(out / "ssc.json", to_json(cmd_ssc(config, o.workers), config));
            write_timing(out, "ssc", start);
        } else if (pareto->parsed()) {
            write_file(out / "pareto.csv", pareto_csv(cmd_pareto(config, o.workers)));
            write_timing(out, "pareto", start);
        } else if (calibrate->parsed()) {
            write_file(out / "calibration.json", to_json(cmd_calibrate(config, o.workers), config));
            write_timing(out, "calibrate", start);
        }
    } catch (const Error& e) {
        std::cerr << error_json(std::string(to_string(e.code())), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::cerr << error_json("internal_error", e.what());
        return 1;
    }
    return 0;
}
