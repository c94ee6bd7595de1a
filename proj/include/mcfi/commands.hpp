#pragma once

#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcfi/config.hpp"
#include "mcfi/pipeline.hpp"

namespace mcfi {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumeric = 2,
  kExitThreshold = 3,
};

/// Exit code for an error escaping a command.
int exit_code_for(const std::exception& error);

/// Targets from one forward run at `design`: the leading `modes` canonical-sign
/// modes, their singular values and the temporal mean.
ObjectiveTargets generate_targets(const RunConfig& config, const DesignVector& design, int modes);

struct ResolvedTargets {
  ObjectiveTargets targets;
  /// The design that produced them, when known.
  std::optional<DesignVector> design;
};

/// Targets according to `target.source`.
ResolvedTargets resolve_targets(const RunConfig& config);

ObjectiveSpec make_objective(const RunConfig& config, ObjectiveTargets targets);
InversionProblem make_problem(const RunConfig& config, ObjectiveTargets targets);

/// Zero-based components the grad-check evaluates (explicit list, seeded
/// sample, or all).
std::vector<int> grad_check_components(const RunConfig& config);

/// Each command writes its files into config.output_dir and returns kExitOk
/// or kExitThreshold. Errors propagate as exceptions; files already written
/// by a failing command are removed.
int cmd_forward(const RunConfig& config, std::ostream& log);
int cmd_make_target(const RunConfig& config, std::ostream& log);
int cmd_grad_check(const RunConfig& config, std::ostream& log);
int cmd_invert(const RunConfig& config, std::ostream& log);

/// Dispatches by name ("forward", "make-target", "grad-check", "invert") and
/// converts errors into exit codes with a message on `err`.
int run_command(const std::string& command, const RunConfig& config, std::ostream& log, std::ostream& err);

/// Reads a state-shaped column group written by the commands: `name` in 1D,
/// `name`_u and `name`_v in 2D.
StateVector read_state_field(const std::filesystem::path& path, const Grid& grid, const std::string& name);

}  // namespace mcfi
