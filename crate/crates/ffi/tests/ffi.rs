use std::ffi::{CStr, CString};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use disk_eit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(de_last_error()) }.to_string_lossy().into_owned()
}

fn field(json: &str) -> *mut DeField {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { de_field_from_json(text.as_ptr(), &mut out) }, DeStatus::Ok);
    out
}

#[test]
fn forward_validate_reconstruct_roundtrip() {
    let f = field(r#"{"kind":"conductivity","cos":{"0":[[0,1.0],[2,0.5]],"2":[[2,-0.3]]},"sin":{"1":[[1,0.2]]}}"#);
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(de_forward(f, 4, &mut set), DeStatus::Ok);

        let mut v = 0.0;
        assert_eq!(de_dtn_entry(set, DeBlock::Cc, 1, 1, &mut v), DeStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(de_dtn_entry(set, DeBlock::Cc, 0, 0, &mut v), DeStatus::Range);
        assert!(last_error().contains("outside"));

        let (mut passed, mut dev) = (0, 1.0);
        assert_eq!(de_validate(set, 1e-12, &mut passed, &mut dev), DeStatus::Ok);
        assert_eq!(passed, 1);
        assert!(dev <= 1e-12);

        let mut rec = ptr::null_mut();
        assert_eq!(de_reconstruct(set, 4, 1e-9, 0, &mut rec), DeStatus::Ok);
        let (mut want, mut got) = (0.0, 0.0);
        for (r, phi) in [(0.2, 0.1), (0.7, 2.4), (0.95, 5.0)] {
            assert_eq!(de_field_eval(f, r, phi, &mut want), DeStatus::Ok);
            assert_eq!(de_reconstruction_eval(rec, r, phi, &mut got), DeStatus::Ok);
            assert!((want - got).abs() < 1e-9);
        }
        let mut q = 0.0;
        assert_eq!(de_reconstruction_coefficient(rec, 1, 0, 1, &mut q), DeStatus::Ok);
        assert!((q - 0.2).abs() < 1e-10);
        let mut adm = 0.0;
        assert_eq!(de_reconstruction_admissibility(rec, &mut adm), DeStatus::Ok);
        assert!(adm > 0.0);

        let mut back = ptr::null_mut();
        assert_eq!(de_reconstruction_to_field(rec, &mut back), DeStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(de_field_to_json(back, &mut text), DeStatus::Ok);
        assert!(CStr::from_ptr(text).to_str().unwrap().contains("conductivity"));
        de_string_free(text);

        assert_eq!(de_reconstruction_to_json(rec, &mut text), DeStatus::Ok);
        de_string_free(text);

        assert_eq!(de_dtn_to_json(set, &mut text), DeStatus::Ok);
        let mut copy = ptr::null_mut();
        assert_eq!(de_dtn_from_json(text, &mut copy), DeStatus::Ok);
        de_string_free(text);
        assert_eq!(de_dtn_set_entry(copy, DeBlock::Cc, 1, 2, 1.0), DeStatus::Ok);
        assert_eq!(de_validate(copy, 1e-9, &mut passed, &mut dev), DeStatus::Ok);
        assert_eq!(passed, 0);
        let mut bad = ptr::null_mut();
        assert_eq!(de_reconstruct(copy, 4, 1e-9, 0, &mut bad), DeStatus::InconsistentData);
        assert!(bad.is_null());

        de_field_free(back);
        de_reconstruction_free(rec);
        de_dtn_free(copy);
        de_dtn_free(set);
        de_field_free(f);
    }
}

#[test]
fn error_statuses() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(de_field_from_json(ptr::null(), &mut out), DeStatus::NullPointer);
        let junk = CString::new("{").unwrap();
        assert_eq!(de_field_from_json(junk.as_ptr(), &mut out), DeStatus::Parse);
        assert!(!last_error().is_empty());
        let bytes = [0xffu8, 0];
        assert_eq!(de_field_from_json(bytes.as_ptr().cast(), &mut out), DeStatus::InvalidUtf8);

        let f = field(r#"{"kind":"potential"}"#);
        let mut v = 0.0;
        assert_eq!(de_field_eval(f, 0.5, 0.0, ptr::null_mut()), DeStatus::NullPointer);
        assert_eq!(de_field_eval(f, 2.0, 0.0, &mut v), DeStatus::Domain);
        let mut set = ptr::null_mut();
        assert_eq!(de_forward(f, 2, &mut set), DeStatus::Ok);
        let mut passed = 0;
        assert_eq!(de_validate(set, 0.0, &mut passed, &mut v), DeStatus::Domain);
        de_dtn_free(set);
        de_field_free(f);

        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(de_psi(2.0, 0.0, 0.0, &mut re, &mut im), DeStatus::Domain);
        let (c, s) = ((PI / 4.0).cos(), (PI / 4.0).sin());
        assert_eq!(de_psi_inverse(PI / 4.0, c, s, &mut re, &mut im), DeStatus::SingularPoint);

        de_field_free(ptr::null_mut());
        de_dtn_free(ptr::null_mut());
        de_reconstruction_free(ptr::null_mut());
        de_arc_free(ptr::null_mut());
        de_string_free(ptr::null_mut());
    }
}

#[test]
fn partial_boundary_entry_points() {
    let n = 3;
    let data: Vec<f64> =
        (0..n * n).map(|i| if i / n == i % n { (i / n + 1) as f64 * PI / 2.0 } else { 0.0 }).collect();
    unsafe {
        let mut rec = ptr::null_mut();
        assert_eq!(de_half_disk_invert(data.as_ptr(), n, n, 1e-9, &mut rec), DeStatus::Ok);
        let mut v = 0.0;
        assert_eq!(de_reconstruction_eval(rec, 0.5, 1.0, &mut v), DeStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        de_reconstruction_free(rec);

        let mut arc = ptr::null_mut();
        assert_eq!(de_arc_invert(0.8, data.as_ptr(), n, n, 1e-9, &mut arc), DeStatus::Ok);
        assert_eq!(de_arc_eval(arc, 0.1, -0.4, &mut v), DeStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        de_arc_free(arc);

        let (mut re, mut im, mut x, mut y) = (0.0, 0.0, 0.0, 0.0);
        assert_eq!(de_psi(0.8, 0.3, 0.4, &mut re, &mut im), DeStatus::Ok);
        assert_eq!(de_psi_inverse(0.8, re, im, &mut x, &mut y), DeStatus::Ok);
        assert!((x - 0.3).abs() < 1e-12 && (y - 0.4).abs() < 1e-12);
    }
}

fn header_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/disk_eit.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header_path()).unwrap();
    for decl in [
        "#ifndef DISK_EIT_H",
        "typedef struct DeField DeField;",
        "typedef struct DeDtnSet DeDtnSet;",
        "typedef struct DeReconstruction DeReconstruction;",
        "typedef struct DeArcReconstruction DeArcReconstruction;",
        "DE_STATUS_OK = 0",
        "DE_STATUS_INCONSISTENT_DATA = 4",
        "DE_BLOCK_CS = 3",
        "const char *de_last_error(void);",
        "DeStatus de_forward(const struct DeField *field, size_t n, struct DeDtnSet **out);",
        "de_reconstruct(",
        "de_arc_invert(",
    ] {
        assert!(h.contains(decl), "header is missing `{decl}`");
    }
}

/// Builds and runs a C program against the static library.
#[test]
fn c_program_links_against_staticlib() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libdisk_eit_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());

    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("ffi_c");
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "disk_eit.h"

int main(void) {
    DeField *f = NULL;
    DeDtnSet *set = NULL;
    DeReconstruction *rec = NULL;
    double p = 0.0;
    if (de_field_from_json("{\"kind\":\"conductivity\",\"cos\":{\"0\":[[0,1.0]]}}", &f) != DE_STATUS_OK) return 1;
    if (de_forward(f, 3, &set) != DE_STATUS_OK) return 2;
    if (de_reconstruct(set, 3, 1e-9, 1, &rec) != DE_STATUS_OK) return 3;
    if (de_reconstruction_coefficient(rec, 0, 0, 0, &p) != DE_STATUS_OK) return 4;
    if (de_dtn_set_entry(set, DE_BLOCK_CC, 9, 9, 0.0) == DE_STATUS_OK) return 5;
    printf("%.12f %s\n", p, de_last_error());
    de_reconstruction_free(rec);
    de_dtn_free(set);
    de_field_free(f);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("main");
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(header_path().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("2.000000000000 "), "{stdout}");
}
