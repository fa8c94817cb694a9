#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fejerlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitPrecondition = 4;

/// Runs one subcommand. `args` excludes the program name.
///
///   solve --method M --problem P.json [--schedule S] [--control C]
///         [--max-iters N] --out FILE [--format csv|json]
///   analyze --trace T --anchors A [--anchor-set NAME] [--report R] [--tol X]
///           [--clusters] [--tail F] [--radius R] [--plot CSV]
///   example --name 3.3|remark|quasi2 [--iters N] [--anchors-count M]
///           [--grid G] [--seed S] --out FILE
///   operator-test --operator O.json --property P [--pairs N] [--seed S]
///                 [--lo A] [--hi B] [--tol X] [--report R]
///
/// FEJERLAB_TOL sets the default tolerance when --tol is not given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fejerlab::cli
