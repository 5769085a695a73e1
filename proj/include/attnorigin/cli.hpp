// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace attnorigin::cli {

/// Runs one subcommand. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace attnorigin::cli
