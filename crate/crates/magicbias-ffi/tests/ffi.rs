use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use magicbias::config::NamedSet;
use magicbias::gadget::{Gadget, NoisyFlags};
use magicbias::noise::Preset;
use magicbias::tomography::{analyse, Mode};
use magicbias_ffi::*;

fn enumerate(flags: &str, sets: &[&str], order: u32) -> (MbStatus, *mut MbEnumeration) {
    let flags = CString::new(flags).unwrap();
    let owned: Vec<CString> = sets.iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<*const c_char> = owned.iter().map(|s| s.as_ptr()).collect();
    let mut h = ptr::null_mut();
    let st = unsafe { mb_enumerate(flags.as_ptr(), ptrs.as_ptr(), ptrs.len(), order, 1, &mut h) };
    (st, h)
}

fn last_error() -> String {
    let p = mb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn metrics_match_the_library() {
    let (st, h) = enumerate("SMIE", &["Z", "Z1Z2,X1X2"], 2);
    assert_eq!(st, MbStatus::Ok);
    let mut m = MbMetrics::default();
    assert_eq!(unsafe { mb_analyse(h, 0, 10.0, 1e-3, true, &mut m) }, MbStatus::Ok);

    let g = Gadget::new(NoisyFlags::ALL).unwrap();
    let zz = NamedSet::parse_arg("Z1Z2,X1X2", "zz").unwrap().set;
    let counts = g.enumerate(2, &[Preset::Z.set(), zz], 1).unwrap();
    let r = analyse(&g.tallies(&counts, 0, 10.0, 1e-3).unwrap(), Mode::Adaptive).unwrap();
    assert_eq!(m.r_proc, r.metrics.r_proc);
    assert_eq!(m.eta_zl, r.metrics.eta_zl);
    assert_eq!(m.ptm[4 * 3 + 3], r.ptm[3][3]);

    let (mut sites, mut depol) = (0usize, 0.0);
    unsafe {
        assert_eq!(mb_enumeration_sites(h, &mut sites), MbStatus::Ok);
        assert_eq!(mb_depolarizing_eta(h, 1, &mut depol), MbStatus::Ok);
        assert_eq!(mb_analyse(h, 1, f64::INFINITY, 1e-3, false, &mut m), MbStatus::Ok);
    }
    assert_eq!((sites, depol), (121, 0.25));
    unsafe { mb_enumeration_free(h) };
}

#[test]
fn errors_set_status_and_message() {
    let (st, h) = enumerate("SMQ", &["Z"], 1);
    assert_eq!(st, MbStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains('Q'), "{}", last_error());

    let (st, _) = enumerate("SMIE", &["W"], 1);
    assert_eq!(st, MbStatus::InvalidArgument);
    assert!(last_error().contains("sets[0]"));

    let (st, _) = enumerate("SMIE", &["Z", "X", "Y", "M", "Z"], 1);
    assert_eq!(st, MbStatus::InvalidArgument);
    let (st, _) = enumerate("SMIE", &["Z"], 4);
    assert_eq!(st, MbStatus::InvalidArgument);

    let mut m = MbMetrics::default();
    assert_eq!(unsafe { mb_analyse(ptr::null(), 0, 1.0, 1e-3, true, &mut m) }, MbStatus::NullPointer);
    let (st, h) = enumerate("MI", &["Z"], 1);
    assert_eq!(st, MbStatus::Ok);
    unsafe {
        assert_eq!(mb_analyse(h, 1, 1.0, 1e-3, true, &mut m), MbStatus::InvalidArgument);
        assert_eq!(mb_analyse(h, 0, -1.0, 1e-3, true, &mut m), MbStatus::InvalidArgument);
        assert_eq!(mb_analyse(h, 0, 1.0, 1e-3, true, ptr::null_mut()), MbStatus::NullPointer);
        mb_enumeration_free(h);
        mb_enumeration_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(mb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "magicbias.h"

int main(void) {
    const char *sets[] = {"Z"};
    MbEnumeration *h = NULL;
    if (mb_enumerate("SMIE", sets, 1, 1, 1, &h) != MB_STATUS_OK) return 1;
    MbMetrics m;
    if (mb_analyse(h, 0, INFINITY, 1e-3, true, &m) != MB_STATUS_OK) return 2;
    printf("%.17g %.17g\n", m.r_proc, m.p_zl);
    mb_enumeration_free(h);
    if (mb_enumerate("bogus", sets, 1, 1, 1, &h) != MB_STATUS_INVALID_ARGUMENT) return 3;
    return mb_last_error() == NULL ? 4 : 0;
}
"#;

#[test]
fn c_program_links_against_the_static_library() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipped");
        return;
    }
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = lib_dir.join("libmagicbias_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let cc = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap();
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());

    let g = Gadget::new(NoisyFlags::ALL).unwrap();
    let counts = g.enumerate(1, &[Preset::Z.set()], 1).unwrap();
    let r = analyse(&g.tallies(&counts, 0, f64::INFINITY, 1e-3).unwrap(), Mode::Adaptive).unwrap();
    let out = String::from_utf8(run.stdout).unwrap();
    let v: Vec<f64> = out.split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(v, [r.metrics.r_proc, r.metrics.p_zl]);
}
