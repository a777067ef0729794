// Command-line front end: verify job configurations, run Backlund transforms
// and the self-propelled solver, and print the report schema.  JSON in, JSON
// out, UTF-8; exit codes 0 pass / 1 fail / 2 bad config / 3 mostly skipped.

#include <veronese/job.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int log_level()
{
    const char* env = std::getenv("VERONESE_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

void log_info(const std::string& msg)
{
    if (log_level() >= 1) std::cerr << "veronese: " << msg << "\n";
}

std::string read_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw veronese::config_error("$", "cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int run_job(const std::string& config_path, const std::vector<std::string>& forced_checks,
            std::optional<std::uint64_t> seed_override, int jobs, const std::string& output)
{
    veronese::Report report;
    try {
        veronese::JobConfig cfg = veronese::parse_job_config_text(read_file(config_path));
        if (!forced_checks.empty()) cfg.checks = forced_checks;
        if (cfg.checks.empty()) throw veronese::config_error("checks", "no checks requested");
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.raw["seed"] = *seed_override;
        }
        if (log_level() >= 2)
            std::cerr << "veronese: running " << cfg.checks.size() << " check(s) with " << jobs
                      << " job(s)\n";
        report = veronese::run(cfg, jobs);
    } catch (const veronese::config_error& e) {
        std::cerr << "veronese: invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "veronese: error: " << e.what() << "\n";
        return 2;
    }

    const std::string text = report.to_json().dump(2);
    if (output.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream os(output);
        os << text << "\n";
        log_info("report written to " + output);
    }
    for (const auto& c : report.checks)
        log_info(c.name + (c.pass ? ": pass" : ": FAIL") + " (value " + std::to_string(c.value) +
                 ")");
    return veronese::exit_code(report);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"verification toolkit for 3D Veronese webs and their integrable PDE families"};
    app.require_subcommand(1);

    std::string config_path, output;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool show_schema = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("config", config_path, "job configuration (JSON)")->required();
        cmd->add_option("--seed", seed, "override the 64-bit probe seed");
        cmd->add_option("--jobs", jobs, "worker threads for grid sweeps")->check(CLI::PositiveNumber);
        cmd->add_option("--output", output, "write the report to this path instead of stdout");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the checks requested in the config");
    add_common(verify, true);

    CLI::App* backlund =
        app.add_subcommand("backlund", "run the Backlund-transform check for the config");
    add_common(backlund, true);

    CLI::App* solve = app.add_subcommand("solve-self-propelled",
                                         "run the self-propelled Newton solver over the domain");
    add_common(solve, true);

    CLI::App* rep = app.add_subcommand("report", "report format utilities");
    rep->add_flag("--schema", show_schema, "print the report schema");

    CLI11_PARSE(app, argc, argv);

    if (rep->parsed()) {
        if (show_schema) {
            std::cout << veronese::report_schema().dump(2) << "\n";
            return 0;
        }
        std::cerr << "veronese: nothing to do; try report --schema\n";
        return 2;
    }
    if (verify->parsed()) return run_job(config_path, {}, seed, jobs, output);
    if (backlund->parsed()) return run_job(config_path, {"backlund"}, seed, jobs, output);
    if (solve->parsed()) return run_job(config_path, {"self_propelled"}, seed, jobs, output);
    return 2;
}
