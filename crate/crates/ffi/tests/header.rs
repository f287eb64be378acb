use std::path::PathBuf;

fn header() -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/torsym.h");
    std::fs::read_to_string(path).expect("build script writes the header")
}

#[test]
fn header_declares_the_api() {
    let h = header();
    for name in [
        "torsym_last_error_message",
        "torsym_poly_from_json",
        "torsym_poly_free",
        "torsym_poly_dim",
        "torsym_poly_n_terms",
        "torsym_poly_evaluate",
        "torsym_certify_config_default",
        "torsym_certify_signs",
        "torsym_find_semi_integral",
        "torsym_string_free",
        "typedef struct TorsymPoly TorsymPoly;",
        "TorsymStatus_Ok = 0",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

/// Compiles a small C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let target_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = target_dir.join("libtorsym_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "torsym.h"
int main(void) {
    const char *g = "{\"dim\":3,\"terms\":[{\"nu\":[1,1,0],\"sin\":1},{\"nu\":[0,1,-1],\"cos\":-1},{\"nu\":[1,0,1],\"sin\":-1}]}";
    TorsymPoly *p = NULL;
    if (torsym_poly_from_json(g, &p) != TorsymStatus_Ok) return 1;
    double x[3] = {0.125, 0.125, 0.125}, v = 0, e = 0;
    if (torsym_poly_evaluate(p, x, 3, &v, &e) != TorsymStatus_Ok) return 2;
    if (torsym_poly_evaluate(p, x, 1, &v, &e) != TorsymStatus_DimensionMismatch) return 3;
    if (torsym_last_error_message() == NULL) return 4;
    char *json = NULL;
    if (torsym_find_semi_integral(p, &json) != TorsymStatus_Ok) return 5;
    printf("%.17g %.3g %s\n", v, e, json);
    torsym_string_free(json);
    torsym_poly_free(p);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("probe");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = std::process::Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "probe exited with {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    assert!((v + 1.0).abs() < 1e-12, "{text}");
    assert!(text.contains("\"found\":false"));
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("c_probe");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
