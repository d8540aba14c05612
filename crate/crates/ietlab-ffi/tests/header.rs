use std::path::Path;
use std::process::Command;

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ietlab.h")).unwrap();
    for name in [
        "ietlab_version",
        "ietlab_last_error_message",
        "ietlab_string_free",
        "ietlab_perm_parse",
        "ietlab_perm_classify",
        "ietlab_perm_free",
        "ietlab_iet_new",
        "ietlab_iet_apply_str",
        "ietlab_iet_apply_f64",
        "ietlab_iet_rauzy_step",
        "ietlab_iet_free",
        "IETLAB_STATUS_INVALID_INPUT",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ietlab.h");
    match Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).status() {
        Ok(status) => assert!(status.success()),
        Err(_) => eprintln!("no C compiler found; skipping"),
    }
}
