// Copyright 2026 The qibound Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(qibound_cli::main_with_args(std::env::args_os()));
}
