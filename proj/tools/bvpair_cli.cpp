#include "bvpair/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace bvpair;

int main(int argc, char** argv) {
    CLI::App app{"Exact lambda-pairings of divergence-measure fields with BV functions"};
    app.require_subcommand(1);

    std::string file;
    std::string out_dir;
    double tolerance = 1e-9;
    int jobs = 1;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "run every check of a scenario and write reports");
    run->add_option("file", file, "scenario JSON")->required();
    run->add_option("--out", out_dir, "directory for <name>.txt, <name>.json and CSV series");
    run->add_option("--tolerance", tolerance, "quadrature tolerance for inexact checks")->check(CLI::NonNegativeNumber);
    run->add_option("--jobs", jobs, "checks run in parallel")->check(CLI::PositiveNumber);
    run->add_flag("--quiet", quiet, "do not print the text report");

    auto* validate = app.add_subcommand("validate", "parse a scenario without running it");
    validate->add_option("file", file, "scenario JSON")->required();

    app.add_subcommand("list-checks", "list the registered checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    try {
        if (app.got_subcommand("list-checks")) {
            std::cout << list_checks_text();
            return kExitOk;
        }
        const Scenario s = load_scenario(file);
        if (app.got_subcommand("validate")) {
            std::cout << s.name << ": valid (" << s.checks.size() << (s.checks.size() == 1 ? " check)\n" : " checks)\n");
            return kExitOk;
        }
        const RunResult r = run_scenario(s, RunOptions{tolerance, jobs});
        if (!quiet) std::cout << r.text;
        if (!out_dir.empty()) write_reports(r, out_dir);
        return r.exit_code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::Parse ? kExitParse : is_unsupported(e.code()) ? kExitUnsupported : kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}
