#pragma once

namespace sfflab::cli {

/// Exit codes: 0 success, 2 flag or configuration errors, 1 runtime failure.
int run(int argc, char** argv);

}  // namespace sfflab::cli
