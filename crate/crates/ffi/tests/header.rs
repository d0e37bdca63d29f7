//! Compiles and runs a small C program against the generated header and
//! the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "framecoh.h"

int main(void) {
    FcFrame *f = NULL;
    if (fc_build_code(4, 1, 0, &f) != FC_STATUS_OK) return 10;
    if (fc_frame_rows(f) != 16 || fc_frame_cols(f) != 256) return 11;
    FcCoherence c;
    if (fc_frame_coherence(f, &c) != FC_STATUS_OK) return 12;
    if (fabs(c.mu - 0.5) > 1e-12) return 13;
    fc_frame_free(f);

    double b = 0.0;
    if (fc_complex_bound(1, 4, &b) != FC_STATUS_UNDEFINED) return 14;
    if (fc_last_error() == NULL) return 15;
    printf("mu=%.6f\n", c.mu);
    return 0;
}
"#;

#[test]
fn c_program_builds_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    assert!(include.join("framecoh.h").exists());
    // target/<profile>/deps/<this test> → target/<profile>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libframecoh_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "mu=0.500000");
}
