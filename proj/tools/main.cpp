// dpw: command-line front end for the waveguide studies.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "dpw/error.hpp"

namespace fs = std::filesystem;
using dpw::cli::Config;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit : int { ok = 0, failure = 1, config_error = 2, no_convergence = 3 };

int diagnose(const std::string& kind, const std::string& message, const std::string& key, int code) {
    nlohmann::ordered_json j;
    j["level"] = "error";
    j["kind"] = kind;
    if (!key.empty()) j["key"] = key;
    j["message"] = message;
    j["exit"] = code;
    std::cerr << j.dump() << '\n';
    return code;
}

void write_manifest(const dpw::cli::RunLog& log, const std::string& command, const std::string& config_path,
                    const std::string& resolved, const Config& cfg, int threads, double total) {
    nlohmann::ordered_json j;
    j["manifest_version"] = 1;
    j["tool"] = "dpw";
    j["tool_version"] = kVersion;
    j["subcommand"] = command;
    j["config_path"] = config_path;
    j["resolved_config"] = resolved;
    j["seeds"] = {{"solver", cfg.seed}};
    j["threads"] = threads;
    auto outputs = nlohmann::ordered_json::array();
    for (const auto& p : log.outputs) outputs.push_back(p.filename().string());
    j["outputs"] = outputs;
    nlohmann::ordered_json stages;
    for (const auto& [name, secs] : log.stages) stages[name] = secs;
    stages["total"] = total;
    j["wall_clock_s"] = stages;

    const fs::path tmp = log.out_dir / "manifest.json.tmp";
    {
        std::ofstream os(tmp);
        os << j.dump(2) << '\n';
        if (!os) throw dpw::Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, log.out_dir / "manifest.json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thin waveguides joined through a small window: spectra, capacities, convergence studies, bands"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool dry_run = false;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "TOML configuration file")->check(CLI::ExistingFile);
    app.add_option("--out-dir", out_dir, "directory for CSV/JSON artifacts");
    app.add_option("--seed", seed, "overrides solver.seed");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--dry-run", dry_run, "validate the configuration without computing");
    app.add_option("--set", overrides, "override one key, section.name=value (repeatable)")->take_all();

    const char* help[] = {"1D limit-model eigenvalues", "2D waveguide eigenvalues and profiles",
                          "slit capacity in the unit disk", "convergence study over eps",
                          "Bloch bands against Kronig-Penney gaps"};
    for (std::size_t i = 0; i < dpw::cli::kCommands.size(); ++i)
        app.add_subcommand(dpw::cli::kCommands[i], help[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return diagnose("usage", e.what(), "", config_error);
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        Config cfg = dpw::cli::load_config(config_path, overrides);
        if (seed) cfg.seed = *seed;
        dpw::cli::validate(cfg, command);
        const std::string resolved = dpw::cli::to_toml(cfg);
        if (dry_run) {
            std::cout << "config ok: " << command << '\n';
            return ok;
        }

        const auto t0 = std::chrono::steady_clock::now();
        dpw::cli::RunLog log;
        log.out_dir = out_dir;
        fs::create_directories(log.out_dir);
        {
            std::ofstream os(log.add_output("resolved_config.toml"));
            os << resolved;
        }
        dpw::cli::run_command(command, cfg, threads, log);
        const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(log, command, config_path, resolved, cfg, threads, total);
        return ok;
    } catch (const dpw::ConfigError& e) {
        return diagnose("config", e.what(), e.key(), config_error);
    } catch (const dpw::InfeasibleError& e) {
        return diagnose("config", e.what(), e.condition(), config_error);
    } catch (const dpw::ConvergenceError& e) {
        return diagnose("convergence", e.what(), "", no_convergence);
    } catch (const dpw::ContractError& e) {
        return diagnose("config", e.what(), "", config_error);
    } catch (const dpw::DomainError& e) {
        return diagnose("config", e.what(), "", config_error);
    } catch (const dpw::ResolutionError& e) {
        return diagnose("config", e.what(), "", config_error);
    } catch (const dpw::BudgetError& e) {
        return diagnose("config", e.what(), "", config_error);
    } catch (const std::exception& e) {
        return diagnose("internal", e.what(), "", failure);
    }
}
