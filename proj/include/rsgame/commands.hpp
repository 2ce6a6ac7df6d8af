#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rsgame {

// Flag values shared by the subcommands.  Meaning of --steps: ODE grid steps
// for solve/verify/compare-coefficients, Euler steps for simulate.
struct CmdOptions {
    std::optional<int> steps;
    std::optional<long> paths;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;      // solve: coefficients CSV; simulate: per-path CSV
    std::optional<double> tol_res;
    std::optional<std::string> coeffs;   // verify: externally supplied coefficients CSV
    std::string strategy = "saddle";     // simulate: saddle | constant:h;gamma | perturbed:d1,d2,...
    bool doleans = false;                // simulate: append the measure-change martingale check
};

// Exit codes: 0 success, 1 domain failure (validation errors, verification
// violations, numeric breakdown), 2 unusable input (missing file, malformed
// JSON, unknown field, bad flag syntax).
int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_solve(const std::string& path, const CmdOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_verify(const std::string& path, const CmdOptions& opts, std::ostream& out,
               std::ostream& err);
int cmd_simulate(const std::string& path, const CmdOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_compare_coefficients(const std::string& path, const CmdOptions& opts, std::ostream& out,
                             std::ostream& err);

}  // namespace rsgame
