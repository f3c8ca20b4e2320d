use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use diagk_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn fixture(name: &str) -> *mut DiagkGraph {
    let mut g = ptr::null_mut();
    assert_eq!(diagk_graph_fixture(cstr(name).as_ptr(), &mut g), DiagkStatus::Ok);
    g
}

unsafe fn k0(g: *const DiagkGraph) -> *mut DiagkK0 {
    let mut k = ptr::null_mut();
    assert_eq!(diagk_k0_compute(g, &mut k), DiagkStatus::Ok);
    k
}

#[test]
fn k0_json_of_graph_e() {
    unsafe {
        let g = fixture("graph_e");
        let k = k0(g);
        let mut s = ptr::null_mut();
        assert_eq!(diagk_k0_to_json(k, &mut s), DiagkStatus::Ok);
        assert_eq!(
            CStr::from_ptr(s).to_str().unwrap(),
            r#"{"invariant_factors":[],"free_rank":1,"classes":{"v":[-2],"w":[1]},"unit":[-1],"k1_rank":0}"#
        );
        let mut rank = 0usize;
        assert_eq!(diagk_k0_free_rank(k, &mut rank), DiagkStatus::Ok);
        assert_eq!(rank, 1);
        diagk_string_free(s);
        diagk_k0_free(k);
        diagk_graph_free(g);
    }
}

#[test]
fn pointed_comparison_of_e_and_f() {
    unsafe {
        let (e, f) = (fixture("graph_e"), fixture("graph_f"));
        let (ke, kf) = (k0(e), k0(f));
        let mut out = DiagkComparison::Undecided;
        assert_eq!(diagk_pointed_compare(ke, kf, &mut out), DiagkStatus::Ok);
        assert_eq!(out, DiagkComparison::IsoOnlyFlippingUnit);
        diagk_k0_free(ke);
        diagk_k0_free(kf);
        diagk_graph_free(e);
        diagk_graph_free(f);
    }
}

#[test]
fn parse_errors_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        let status = diagk_graph_parse(cstr("edge a b -3\n").as_ptr(), &mut g);
        assert_eq!(status, DiagkStatus::ParseError);
        assert!(g.is_null());
        let msg = CStr::from_ptr(diagk_last_error()).to_str().unwrap();
        assert!(msg.contains("line 1"), "{msg}");

        assert_eq!(diagk_graph_fixture(cstr("nope").as_ptr(), &mut g), DiagkStatus::UnknownFixture);
        assert_eq!(diagk_graph_parse(ptr::null(), &mut g), DiagkStatus::NullPointer);
        let mut n = 0usize;
        assert_eq!(diagk_graph_vertex_count(ptr::null(), &mut n), DiagkStatus::NullPointer);
    }
}

#[test]
fn parsed_graph_and_dot() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(diagk_graph_parse(cstr("edge c c inf\n").as_ptr(), &mut g), DiagkStatus::Ok);
        let mut n = 0usize;
        assert_eq!(diagk_graph_vertex_count(g, &mut n), DiagkStatus::Ok);
        assert_eq!(n, 1);
        let mut dot = ptr::null_mut();
        assert_eq!(diagk_graph_to_dot(g, &mut dot), DiagkStatus::Ok);
        assert!(CStr::from_ptr(dot).to_str().unwrap().starts_with("digraph"));
        diagk_string_free(dot);
        diagk_graph_free(g);
    }
}

#[test]
fn monoid_equality() {
    unsafe {
        let e = fixture("graph_e");
        let mut out = DiagkMonoidEquality::Unknown;
        let st = diagk_monoid_equal(e, cstr("v").as_ptr(), cstr("2*v + 2*w").as_ptr(), 8, &mut out);
        assert_eq!(st, DiagkStatus::Ok);
        assert_eq!(out, DiagkMonoidEquality::Equal);
        let st = diagk_monoid_equal(e, cstr("v").as_ptr(), cstr("w").as_ptr(), 8, &mut out);
        assert_eq!(st, DiagkStatus::Ok);
        assert_eq!(out, DiagkMonoidEquality::NotEqual);
        let st = diagk_monoid_equal(e, cstr("v").as_ptr(), cstr("x").as_ptr(), 8, &mut out);
        assert_eq!(st, DiagkStatus::DomainError);
        diagk_graph_free(e);
    }
}

/// The generated header must be valid C when a compiler is available.
#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/diagk.h");
    assert!(header.exists());
    let Ok(probe) = Command::new("cc").arg("--version").output() else { return };
    if !probe.status.success() {
        return;
    }
    let dir = std::env::temp_dir().join(format!("diagk-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"diagk.h\"\nint main(void) { DiagkGraph *g = 0; return diagk_graph_fixture(\"graph_e\", &g) == DIAGK_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
