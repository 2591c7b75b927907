#ifndef FVBS_RUNNER_HPP
#define FVBS_RUNNER_HPP

#include <ostream>
#include <random>

#include "fvbs/config.hpp"
#include "fvbs/degiorgi.hpp"

namespace fvbs {

// Exit codes shared by the CLI and the runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitMesh = 2;
inline constexpr int kExitAssembly = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitAudit = 5;

/// Random problem with f >= 0, v^D in [0,1], b >= 0 and ||U|| <= u_max
/// (trigonometric fields with closed-form bounds).
ProblemSpec random_compliant_problem(std::mt19937_64& rng, double u_max = 2.0);

/// Random problem with sign-changing f and v^D.
ProblemSpec random_mixed_problem(std::mt19937_64& rng);

int run_solve(const RunConfig& config, std::ostream& log);
int run_verify(const RunConfig& config, std::ostream& log);
int run_calibrate(const RunConfig& config, std::ostream& log);
int run_mesh_check(const RunConfig& config, std::ostream& log);

/// Maps a thrown exception to the exit-code contract.
int dispatch(const std::string& verb, const RunConfig& config, std::ostream& log);

}  // namespace fvbs

#endif
