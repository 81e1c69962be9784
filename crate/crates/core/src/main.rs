// SPDX-License-Identifier: MIT OR Apache-2.0

//! `shiftscan` command line binary.

fn main() {
    std::process::exit(shiftscan::cli::run());
}
