// Command-line front end: validate / solve / verify / simulate /
// compare-coefficients over JSON scenario files.  Exit codes: 0 success,
// 1 domain failure, 2 unusable input.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsgame/commands.hpp"

namespace {

struct SubArgs {
    std::string path;
    rsgame::CmdOptions opts;
};

void add_common_flags(CLI::App* sub, SubArgs& args) {
    sub->add_option("scenario", args.path, "scenario JSON file")->required();
    sub->add_option("--steps", [&args](const CLI::results_t& res) {
        args.opts.steps = std::stoi(res[0]);
        return true;
    }, "step count (ODE grid for solve/verify/compare, Euler grid for simulate)");
    sub->add_option("--paths", [&args](const CLI::results_t& res) {
        args.opts.paths = std::stol(res[0]);
        return true;
    }, "Monte Carlo path count");
    sub->add_option("--seed", [&args](const CLI::results_t& res) {
        args.opts.seed = std::stoull(res[0]);
        return true;
    }, "RNG seed (overrides the scenario)");
    sub->add_option("--out", [&args](const CLI::results_t& res) {
        args.opts.out = res[0];
        return true;
    }, "output CSV path (coefficients for solve, per-path logF for simulate)");
    sub->add_option("--tol-res", [&args](const CLI::results_t& res) {
        args.opts.tol_res = std::stod(res[0]);
        return true;
    }, "residual tolerance for verification");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-sensitive benchmarked-investment game: solve, verify, simulate"};
    app.require_subcommand(1);

    SubArgs validate_args, solve_args, verify_args, simulate_args, compare_args;

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", validate_args.path, "scenario JSON file")->required();

    CLI::App* solve = app.add_subcommand("solve", "integrate the value coefficients");
    add_common_flags(solve, solve_args);

    CLI::App* verify = app.add_subcommand("verify", "certify the solved value function");
    add_common_flags(verify, verify_args);
    verify->add_option("--coeffs", [&verify_args](const CLI::results_t& res) {
        verify_args.opts.coeffs = res[0];
        return true;
    }, "verify an existing coefficients CSV instead of solving");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the criterion");
    add_common_flags(simulate, simulate_args);
    simulate->add_option("--strategy", simulate_args.opts.strategy,
                         "saddle | constant:h;gamma | perturbed:d1,d2,...");
    simulate->add_flag("--doleans", simulate_args.opts.doleans,
                       "also report the measure-change martingale mean");

    CLI::App* compare = app.add_subcommand(
        "compare-coefficients", "diagnostic: extracted ODE RHS vs closed-form transcription");
    add_common_flags(compare, compare_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (validate->parsed()) return rsgame::cmd_validate(validate_args.path, std::cout, std::cerr);
    if (solve->parsed())
        return rsgame::cmd_solve(solve_args.path, solve_args.opts, std::cout, std::cerr);
    if (verify->parsed())
        return rsgame::cmd_verify(verify_args.path, verify_args.opts, std::cout, std::cerr);
    if (simulate->parsed())
        return rsgame::cmd_simulate(simulate_args.path, simulate_args.opts, std::cout, std::cerr);
    if (compare->parsed())
        return rsgame::cmd_compare_coefficients(compare_args.path, compare_args.opts, std::cout,
                                                std::cerr);
    return 2;
}
