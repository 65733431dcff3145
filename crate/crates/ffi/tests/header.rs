//! The generated header compiles as C and declares every exported symbol.

use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/so_converse.h")
}

#[test]
fn declares_the_interface() {
    let text = std::fs::read_to_string(header()).expect("header generated by the build script");
    for symbol in [
        "so_last_error",
        "so_string_free",
        "so_config_new",
        "so_config_set_suites",
        "so_run",
        "so_report_check",
        "so_report_json",
        "so_decompose",
        "so_decomposition_bessel",
        "SO_STATUS_OK",
        "typedef struct SoReport SoReport",
    ] {
        assert!(text.contains(symbol), "{symbol} missing from the header");
    }
}

#[test]
fn compiles_as_c() {
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(header()).output()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
