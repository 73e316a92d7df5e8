// ace: benchmarks, scenario simulations, and model-table emission.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ace/bench.hpp"
#include "ace/config.hpp"
#include "ace/models.hpp"
#include "ace/sim.hpp"

namespace fs = std::filesystem;

namespace {

bool write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return out.good();
}

std::optional<ace::config::KvMap> load_overrides(const std::string& config_path) {
    if (config_path.empty()) return ace::config::KvMap{};
    auto kv = ace::config::load_kv_file(config_path);
    if (!kv) {
        std::cerr << "error: cannot read config file: " << config_path << "\n";
        return std::nullopt;
    }
    return kv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ace-runtime benchmarks, simulator and model tables"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::string config_path;
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::string scenario_name;
    std::vector<std::size_t> batch_sizes = {100, 500, 2000};

    auto* bench_crypto = app.add_subcommand("bench-crypto", "crypto microbenchmarks");
    bench_crypto->add_option("--out", out_dir, "output directory");

    auto* bench_pipeline = app.add_subcommand("bench-pipeline", "pipeline phase benchmarks");
    bench_pipeline->add_option("--out", out_dir, "output directory");
    bench_pipeline->add_option("--batch-sizes", batch_sizes, "batch sizes")->delimiter(',');

    auto* simulate = app.add_subcommand("simulate", "run a consensus scenario");
    simulate->add_option("scenario", scenario_name, "scenario name")->required();
    simulate->add_option("--seed", seed, "simulation seed")->each([&](const std::string&) {
        seed_set = true;
    });
    simulate->add_option("--config", config_path, "key=value config file");
    simulate->add_option("--out", out_dir, "output directory");

    auto* tables = app.add_subcommand("tables", "emit model comparison tables");
    tables->add_option("--config", config_path, "key=value config file");
    tables->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);

    if (bench_crypto->parsed()) {
        auto report = ace::bench::bench_crypto();
        std::cout << report.render_text();
        if (!write_file(fs::path(out_dir) / "bench_crypto.txt", report.render_text()) ||
            !write_file(fs::path(out_dir) / "bench_crypto.csv", report.render_csv())) {
            std::cerr << "error: cannot write reports to " << out_dir << "\n";
            return 1;
        }
        return 0;
    }

    if (bench_pipeline->parsed()) {
        auto report = ace::bench::bench_pipeline(batch_sizes);
        std::cout << report.render_text();
        if (!write_file(fs::path(out_dir) / "bench_pipeline.txt", report.render_text()) ||
            !write_file(fs::path(out_dir) / "bench_pipeline.csv", report.render_csv())) {
            std::cerr << "error: cannot write reports to " << out_dir << "\n";
            return 1;
        }
        return 0;
    }

    if (simulate->parsed()) {
        auto scenario = ace::sim::parse_scenario(scenario_name);
        if (!scenario) {
            std::cerr << "error: unknown scenario '" << scenario_name << "'\n";
            std::cerr << "scenarios: normal builder-withholds-proof backup-proves "
                         "witness-shortfall-rollback invalid-fc-slash forged-attestation-flood\n";
            return 2;
        }
        auto overrides = load_overrides(config_path);
        if (!overrides) return 2;
        auto cfg = ace::sim::config_for_scenario(*scenario, &*overrides);
        if (seed_set) cfg.seed = seed;
        auto report = ace::sim::run_scenario(cfg, *scenario);
        std::cout << report.render();
        if (!write_file(fs::path(out_dir) / "report.txt", report.render()) ||
            !write_file(fs::path(out_dir) / "audit.log", report.render_audit())) {
            std::cerr << "error: cannot write reports to " << out_dir << "\n";
            return 1;
        }
        return report.ok() ? 0 : 1;
    }

    if (tables->parsed()) {
        auto overrides = load_overrides(config_path);
        if (!overrides) return 2;
        auto params = ace::models::CostModelParams::from_kv(*overrides);
        if (!ace::models::write_tables(out_dir, params)) {
            std::cerr << "error: cannot write tables to " << out_dir << "\n";
            return 1;
        }
        std::cout << ace::models::table5_text(params) << "\n"
                  << ace::models::table6_text(params) << "\n"
                  << ace::models::tps_text(params);
        return 0;
    }

    return 2;
}
