use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use lsgame_ffi::*;

fn last_error() -> String {
    let p = ls_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn magic_square_values() {
    unsafe {
        let mut sys = ptr::null_mut();
        assert_eq!(ls_system_magic_square(&mut sys), LsStatus::Ok);
        assert_eq!((ls_system_rows(sys), ls_system_columns(sys)), (6, 9));
        let mut game = ptr::null_mut();
        assert_eq!(ls_game_new(sys, &mut game), LsStatus::Ok);
        let (mut num, mut den) = (0, 0);
        assert_eq!(ls_game_classical_value(game, &mut num, &mut den), LsStatus::Ok);
        assert_eq!((num, den), (17, 18));
        let mut bound = 0.0;
        assert_eq!(ls_game_npa_bound(game, 1, &mut bound), LsStatus::Ok);
        assert!((bound - 1.0).abs() < 1e-5);
        assert_eq!(ls_game_npa_bound(game, 3, &mut bound), LsStatus::Precondition);

        let mut accepted = 0;
        let mut digest = ptr::null_mut();
        assert_eq!(ls_pzk_protocol(sys, 200, 1, &mut accepted, &mut digest), LsStatus::Ok);
        assert_eq!(accepted, 200);
        assert_eq!(CStr::from_ptr(digest).to_bytes().len(), 64);
        ls_string_free(digest);
        ls_game_free(game);
        ls_system_free(sys);
    }
}

#[test]
fn errors_and_null_handles() {
    unsafe {
        let mut sys = ptr::null_mut();
        let bad = CString::new("1 1\n2 | 0\n").unwrap();
        assert_eq!(ls_system_parse(bad.as_ptr(), &mut sys), LsStatus::Malformed);
        assert!(sys.is_null());
        assert!(last_error().contains("out of range"));

        assert_eq!(ls_system_parse(ptr::null(), &mut sys), LsStatus::NullPointer);
        let ok = CString::new("1 1\n1 | 1\n").unwrap();
        assert_eq!(ls_system_parse(ok.as_ptr(), ptr::null_mut()), LsStatus::NullPointer);
        let mut game = ptr::null_mut();
        assert_eq!(ls_game_new(ptr::null(), &mut game), LsStatus::NullPointer);
        assert_eq!(ls_system_rows(ptr::null()), 0);
        ls_system_free(ptr::null_mut());
        ls_string_free(ptr::null_mut());

        let invalid = [0xffu8, 0];
        assert_eq!(ls_system_parse(invalid.as_ptr().cast(), &mut sys), LsStatus::InvalidUtf8);
    }
}

#[test]
fn presentation_round_trip() {
    unsafe {
        let text = CString::new("gens a J\ninv J\nrel a a\nrel J J\nrel a J a' J'\n").unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(ls_presentation_parse(text.as_ptr(), &mut p), LsStatus::Ok);

        let cert = CString::new("target a a\nstep |0|+1\n").unwrap();
        let (mut valid, mut area) = (false, 0);
        assert_eq!(ls_presentation_verify_certificate(p, cert.as_ptr(), &mut valid, &mut area), LsStatus::Ok);
        assert!(valid);
        assert_eq!(area, 1);

        let mut sys = ptr::null_mut();
        assert_eq!(ls_compile_presentation(p, &mut sys), LsStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(ls_system_to_text(sys, &mut out), LsStatus::Ok);
        let sys_text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        ls_string_free(out);
        assert!(sys_text.lines().skip(1).all(|l| l.split('|').next().unwrap().split_whitespace().count() == 3));

        let mut gamma = ptr::null_mut();
        assert_eq!(ls_solution_group(sys, &mut gamma), LsStatus::Ok);
        assert_eq!(ls_presentation_to_text(gamma, &mut out), LsStatus::Ok);
        assert!(CStr::from_ptr(out).to_str().unwrap().starts_with("gens "));
        ls_string_free(out);

        let no_inv = CString::new("gens a\nrel a a\n").unwrap();
        let mut q = ptr::null_mut();
        assert_eq!(ls_presentation_parse(no_inv.as_ptr(), &mut q), LsStatus::Ok);
        let mut sys2 = ptr::null_mut();
        assert_eq!(ls_compile_presentation(q, &mut sys2), LsStatus::Precondition);

        ls_presentation_free(q);
        ls_presentation_free(gamma);
        ls_system_free(sys);
        ls_presentation_free(p);
    }
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/lsgame.h")).unwrap();
    for name in [
        "ls_last_error",
        "ls_string_free",
        "ls_system_parse",
        "ls_game_classical_value",
        "ls_game_npa_bound",
        "ls_pzk_protocol",
        "ls_compile_presentation",
        "typedef struct LsSystem LsSystem",
        "LS_STATUS_MALFORMED = 2",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compile and run the C smoke program against the static library.
#[test]
fn c_program_links() {
    let profile_dir: PathBuf = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("liblsgame_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let exe = tempfile::tempdir().unwrap();
    let bin = exe.path().join("smoke");
    let status = Command::new("cc")
        .arg(format!("-I{}", crate_dir().join("include").display()))
        .arg(crate_dir().join("c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("a C compiler is on PATH");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("classical 17/18"));
}
