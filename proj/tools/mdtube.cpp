// mdtube: run scenario configs and the acceptance suite.
//
//   mdtube run <config> [--out DIR] [--levels N] [--threads N]
//   mdtube verify [--criteria 1,3] [--threads N] [--fine-sweep] [--artifacts DIR]
//   mdtube config <kind>          print the full default config of a scenario kind
//   mdtube network [--seed N]     print the synthetic root network in the .net format

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "mdtube/acceptance.hpp"
#include "mdtube/config.hpp"
#include "mdtube/errors.hpp"
#include "mdtube/output.hpp"
#include "mdtube/scenarios.hpp"

namespace {

int run_command(const std::string& path, const std::string& out_dir, int levels, int threads, bool quiet) {
    mdtube::ScenarioConfig cfg = mdtube::load_config(path);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    if (levels > 0) cfg.grid.levels = levels;
    if (threads > 0) cfg.threads = threads;
    cfg.validate();

    mdtube::RunOptions ro;
    ro.log = quiet ? nullptr : &std::cerr;
    ro.keep_fields = cfg.output.vtk || cfg.output.history;
    const auto result = mdtube::run_scenario(cfg, ro);
    const auto files = mdtube::write_outputs(result, cfg.output.directory);
    std::cout << "wrote " << files.size() << " files to " << cfg.output.directory << '\n';
    return 0;
}

int verify_command(const std::vector<int>& criteria, int threads, bool fine_sweep, const std::string& artifacts,
                   bool quiet) {
    mdtube::AcceptanceOptions opt;
    opt.only = criteria;
    opt.threads = std::max(threads, 1);
    opt.fine_sweep = fine_sweep;
    opt.artifact_directory = artifacts;
    opt.log = quiet ? nullptr : &std::cerr;
    int failed = 0;
    opt.on_result = [&](const mdtube::CriterionResult& r) {
        std::cout << mdtube::format_criterion(r) << std::endl;
        if (!r.passed) ++failed;
    };
    const auto results = mdtube::run_acceptance(opt);
    std::cout << (failed ? std::to_string(failed) + " of " + std::to_string(results.size()) + " criteria failed"
                         : "all " + std::to_string(results.size()) + " criteria passed")
              << std::endl;
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-dimensional tube/bulk diffusion solver"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Suppress progress output on stderr");

    auto* run = app.add_subcommand("run", "Run a scenario config and write its outputs");
    std::string config_path, out_dir;
    int levels = 0, threads = 0;
    run->add_option("config", config_path, "Scenario config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    run->add_option("--levels", levels, "Number of refinement levels")->check(CLI::PositiveNumber);
    run->add_option("--threads", threads, "Worker threads for coupling assembly")->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "Run the acceptance suite, one line per criterion");
    std::vector<int> criteria;
    int verify_threads = 1;
    bool fine_sweep = false;
    std::string artifacts;
    verify->add_option("--criteria", criteria, "Subset of criteria to run")
        ->delimiter(',')
        ->check(CLI::Range(1, mdtube::kNumCriteria));
    verify->add_option("--threads", verify_threads, "Worker threads")->check(CLI::PositiveNumber);
    verify->add_flag("--fine-sweep", fine_sweep, "Full collar-pressure sweep on the fine root-soil grid");
    verify->add_option("--artifacts", artifacts, "Write the tables behind each criterion here");

    auto* config = app.add_subcommand("config", "Print the complete default config of a scenario kind");
    std::string kind;
    config->add_option("kind", kind, "single_tube | parallel_tubes | kernel_radius_study | delta_study | root_soil")
        ->required();

    auto* network = app.add_subcommand("network", "Print the synthetic root system as a network file");
    std::uint64_t seed = mdtube::RootGeneratorOptions{}.seed;
    network->add_option("--seed", seed, "Generator seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(config_path, out_dir, levels, threads, quiet);
        if (*verify) return verify_command(criteria, verify_threads, fine_sweep, artifacts, quiet);
        if (*config) {
            const auto cfg = mdtube::parse_config_string("[scenario]\nkind = " + kind + "\n", "<command line>");
            mdtube::emit_config(std::cout, cfg);
            return 0;
        }
        if (*network) {
            mdtube::RootGeneratorOptions opt;
            opt.seed = seed;
            mdtube::synthetic_root_system(opt).write(std::cout);
            return 0;
        }
    } catch (const mdtube::Error& e) {
        std::cerr << "mdtube: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "mdtube: unexpected error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
