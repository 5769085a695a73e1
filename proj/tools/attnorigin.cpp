// Copyright 2026 The attnorigin Authors. Licensed under the Apache License, Version 2.0.

#include "attnorigin/cli.hpp"

int main(int argc, char** argv) { return attnorigin::cli::run_cli(argc, argv); }
