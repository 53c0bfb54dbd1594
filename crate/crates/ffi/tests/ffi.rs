use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use jsr_ffi::*;

fn message() -> String {
    unsafe { CStr::from_ptr(jsr_last_error_message()) }.to_str().unwrap().to_string()
}

fn pair() -> *mut JsrMatrixSet {
    let re = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { jsr_set_new(2, 2, re.as_ptr(), ptr::null(), &mut set) }, JsrStatus::Ok);
    set
}

#[test]
fn bracket_of_the_rank_one_pair() {
    let set = pair();
    assert_eq!(unsafe { jsr_set_dim(set) }, 2);
    assert_eq!(unsafe { jsr_set_len(set) }, 2);
    let mut br = JsrBracket::default();
    assert_eq!(unsafe { jsr_bracket(set, 6, 0, &mut br) }, JsrStatus::Ok);
    assert_eq!((br.lower, br.upper, br.depth_n, br.witness_len), (1.0, 1.0, 6, 2));
    assert_eq!(message(), "");
    unsafe { jsr_set_free(set) };
}

#[test]
fn certificate_constants() {
    let set = pair();
    let mut c = JsrCertificate::default();
    assert_eq!(unsafe { jsr_certificate(set, 1.0, 0, 1, 12, 1000, 0, &mut c) }, JsrStatus::Ok);
    assert_eq!(c.theta, 1.0);
    assert_eq!(c.omega, 2.0);
    assert!((c.tau - 0.125).abs() <= 1e-12);
    assert_eq!(c.n0, 4);
    assert!(c.radius_at_n0 > 0.0 && c.guarantee_at_n0 < c.rho_lower);
    unsafe { jsr_set_free(set) };
}

#[test]
fn complex_spectral_radius() {
    // [[i, 0], [0, 0.5]]
    let re = [0.0, 0.0, 0.0, 0.5];
    let im = [1.0, 0.0, 0.0, 0.0];
    let mut r = 0.0;
    assert_eq!(unsafe { jsr_spectral_radius(2, re.as_ptr(), im.as_ptr(), &mut r) }, JsrStatus::Ok);
    assert!((r - 1.0).abs() <= 1e-15);
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut set = ptr::null_mut();
    let re = [1.0, f64::NAN, 0.0, 1.0];
    assert_eq!(unsafe { jsr_set_new(2, 1, re.as_ptr(), ptr::null(), &mut set) }, JsrStatus::InvalidInput);
    assert!(set.is_null());
    assert!(message().starts_with("invalid input"), "{}", message());

    assert_eq!(unsafe { jsr_set_new(2, 1, ptr::null(), ptr::null(), &mut set) }, JsrStatus::NullPointer);
    assert_eq!(message(), "null pointer: re");

    let set = pair();
    let mut br = JsrBracket::default();
    assert_eq!(unsafe { jsr_bracket(set, 20, 100, &mut br) }, JsrStatus::Budget);
    assert!(message().contains("budget"));
    assert_eq!(unsafe { jsr_bracket(set, 0, 0, &mut br) }, JsrStatus::InvalidInput);
    assert_eq!(unsafe { jsr_bracket(ptr::null(), 3, 0, &mut br) }, JsrStatus::NullPointer);
    assert_eq!(unsafe { jsr_bracket(set, 3, 0, ptr::null_mut()) }, JsrStatus::NullPointer);
    unsafe { jsr_set_free(set) };
    unsafe { jsr_set_free(ptr::null_mut()) };
    assert_eq!(unsafe { jsr_set_len(ptr::null()) }, 0);

    // nilpotent singleton: ρ = 0 leaves nothing to certify
    let re = [0.0, 1.0, 0.0, 0.0];
    let mut nil = ptr::null_mut();
    assert_eq!(unsafe { jsr_set_new(2, 1, re.as_ptr(), ptr::null(), &mut nil) }, JsrStatus::Ok);
    let mut c = JsrCertificate::default();
    assert_eq!(unsafe { jsr_certificate(nil, 1.0, 0, 1, 8, 100, 0, &mut c) }, JsrStatus::Precondition);
    unsafe { jsr_set_free(nil) };
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(jsr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(include.join("jsr.h")).unwrap();
    for name in ["jsr_set_new", "jsr_set_free", "jsr_bracket", "jsr_certificate", "jsr_last_error_message"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"jsr.h\"\nint main(void) { JsrBracket b; JsrMatrixSet *s = 0; \
         return jsr_bracket(s, 3, 0, &b) == JSR_STATUS_OK; }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .expect("a C compiler is available");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
