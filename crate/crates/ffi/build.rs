// SPDX-License-Identifier: MIT OR Apache-2.0

//! Generates the C header for the FFI surface with cbindgen. The header is
//! written into `include/` and committed, so C consumers can vendor it
//! without running the Rust toolchain.

use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(
        std::env::var("CARGO_MANIFEST_DIR").expect("cargo always sets CARGO_MANIFEST_DIR"),
    );
    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml is present and well-formed");
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("FFI surface is representable in C")
        .write_to_file(crate_dir.join("include").join("shiftscan.h"));

    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
