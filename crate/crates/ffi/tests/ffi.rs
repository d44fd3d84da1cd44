use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use springnet_ffi::*;

#[test]
fn special_functions_match_reference_values() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(sn_bessel_j(0, 5.0, &mut v), SnStatus::Ok);
        assert!((v + 0.1775967713143383).abs() < 1e-14);
        assert_eq!(sn_struve_h(1, 12.3, &mut v), SnStatus::Ok);
        assert!((v - 0.52180273967053556).abs() < 1e-13);
        assert_eq!(sn_bessel_j(7, 1.0, &mut v), SnStatus::InvalidArgument);
    }
}

#[test]
fn null_out_pointer_is_reported() {
    unsafe {
        assert_eq!(sn_bessel_j(0, 1.0, ptr::null_mut()), SnStatus::NullPointer);
        let n = sn_last_error_message(ptr::null_mut(), 0);
        let mut buf = vec![0 as std::ffi::c_char; n + 1];
        assert_eq!(sn_last_error_message(buf.as_mut_ptr(), buf.len()), n);
        let msg = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(msg.contains("out_value"), "{msg}");
    }
}

#[test]
fn error_message_truncates() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(sn_beta_critical(0.6, 0.5, 0.5, 0.5, &mut v), SnStatus::Precondition);
        let mut buf = [1 as std::ffi::c_char; 8];
        let full = sn_last_error_message(buf.as_mut_ptr(), buf.len());
        assert!(full > 7);
        assert_eq!(buf[7], 0);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 7);
    }
}

#[test]
fn dispersion_and_shape_agree() {
    let (mut f, mut g) = (0.0, 0.0);
    for z in [0.3, 1.7, 4.0] {
        unsafe {
            assert_eq!(sn_dispersion(0.5, 25.0, z, &mut f), SnStatus::Ok);
            assert_eq!(sn_hooke_shape(0.5, z, &mut g), SnStatus::Ok);
        }
        assert!((f - z * z * (1.0 + 25.0 * g)).abs() < 1e-12);
    }
}

#[test]
fn bifurcation_reference_case() {
    let mut r = std::mem::MaybeUninit::<SnBifurcation>::uninit();
    let rep = unsafe {
        assert_eq!(sn_bifurcation_analyze(0.25, 0.5, 0.5, 0.5, f64::NAN, r.as_mut_ptr()), SnStatus::Ok);
        r.assume_init()
    };
    assert!((rep.beta_c - 31.056).abs() < 0.01);
    assert!((rep.c + 7.948).abs() < 0.05);
    assert!((rep.d - 239.936).abs() < 0.5);
    assert_eq!(rep.classification, SnClassification::Subcritical);
    assert!(rep.stationary_amplitude.is_nan());
    assert_eq!(rep.assumptions_ok, 1);
}

fn micro_params() -> SnMicroParams {
    SnMicroParams {
        n: 40,
        kappa: 1.0,
        l0: 0.05,
        radius: 0.1,
        diffusion: 0.01,
        mu: 1.0,
        nu_f: 1.0,
        nu_d: 1.0,
        dt: 0.01,
        l1: 0.5,
        l2: 0.5,
    }
}

fn micro_run(seed: u64) -> Vec<f64> {
    let p = micro_params();
    let mut sim = ptr::null_mut();
    let mut pos = vec![0.0; 2 * p.n];
    unsafe {
        assert_eq!(sn_micro_new(&p, seed, &mut sim), SnStatus::Ok);
        assert_eq!(sn_micro_step(sim, 200), SnStatus::Ok);
        assert!((sn_micro_time(sim) - 2.0).abs() < 1e-12);
        assert!(sn_micro_energy(sim) >= 0.0);
        assert_eq!(sn_micro_positions(sim, pos.as_mut_ptr(), 2 * p.n - 1), SnStatus::InvalidArgument);
        assert_eq!(sn_micro_positions(sim, pos.as_mut_ptr(), pos.len()), SnStatus::Ok);
        sn_micro_free(sim);
    }
    pos
}

#[test]
fn micro_handle_is_deterministic() {
    assert_eq!(micro_run(3), micro_run(3));
    assert_ne!(micro_run(3), micro_run(4));
    assert!(micro_run(5).iter().all(|x| x.abs() <= 0.5));
}

#[test]
fn micro_rejects_bad_dt() {
    let mut p = micro_params();
    p.dt = 1.0;
    let mut sim = ptr::null_mut();
    unsafe {
        assert_eq!(sn_micro_new(&p, 0, &mut sim), SnStatus::NumericalGuard);
        assert!(sim.is_null());
        assert!(sn_micro_time(ptr::null()).is_nan());
        sn_micro_free(ptr::null_mut());
    }
}

#[test]
fn macro_handle_decays_at_the_heat_rate() {
    let p = SnMacroParams {
        gamma: 0.0,
        kappa: 1.0,
        l0: 0.125,
        radius: 0.25,
        l1: 0.5,
        l2: 0.5,
        n1: 16,
        n2: 16,
        dt: 1e-4,
        dealias: 1,
    };
    let mode = SnCosineMode { k1: 1, k2: 0, eps: 1e-4 };
    let mut s = ptr::null_mut();
    let (mut re, mut im, mut e) = (0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(sn_macro_new(&p, &mode, 1, &mut s), SnStatus::Ok);
        assert_eq!(sn_macro_mode(s, 1, 0, &mut re, &mut im), SnStatus::Ok);
        let a0 = re.hypot(im);
        assert_eq!(sn_macro_step(s, 1000), SnStatus::Ok);
        assert_eq!(sn_macro_mode(s, 1, 0, &mut re, &mut im), SnStatus::Ok);
        let rate = (re.hypot(im) / a0).ln() / sn_macro_time(s);
        let exact = -4.0 * std::f64::consts::PI.powi(2);
        assert!((rate - exact).abs() < 0.01 * exact.abs(), "{rate}");
        assert!((sn_macro_mass(s) - 1.0).abs() < 1e-12);
        assert_eq!(sn_macro_free_energy(s, &mut e), SnStatus::Ok);
        assert!(e.is_finite());
        assert_eq!(sn_macro_mode(s, 8, 0, &mut re, &mut im), SnStatus::InvalidArgument);
        sn_macro_free(s);
    }
}

#[test]
fn macro_rejects_odd_grid() {
    let p = SnMacroParams {
        gamma: 0.0,
        kappa: 1.0,
        l0: 0.125,
        radius: 0.25,
        l1: 0.5,
        l2: 0.5,
        n1: 24,
        n2: 16,
        dt: 1e-4,
        dealias: 1,
    };
    let mut s = ptr::null_mut();
    unsafe {
        assert_ne!(sn_macro_new(&p, ptr::null(), 0, &mut s), SnStatus::Ok);
        assert!(s.is_null());
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/springnet.h");
    assert!(header.exists(), "header missing at {}", header.display());
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libspringnet_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}, C check skipped", lib.display());
        return;
    }
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler, C check skipped");
        return;
    };
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("springnet_c_smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
