use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use relpol_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    relpol_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(relpol_last_error()).to_str().unwrap().to_string()
}

const POLICY: &str = "(policy (rule holding put-down) (rule (not cclear) unstack))";

#[test]
fn act_through_handles() {
    unsafe {
        let mut dom = ptr::null_mut();
        assert_eq!(relpol_domain_builtin(cs("bw1").as_ptr(), &mut dom), RelpolStatus::Ok);
        let mut pol = ptr::null_mut();
        assert_eq!(relpol_policy_parse(dom, cs(POLICY).as_ptr(), &mut pol), RelpolStatus::Ok);

        let mut text = ptr::null_mut();
        assert_eq!(relpol_policy_to_string(pol, &mut text), RelpolStatus::Ok);
        assert!(take(text).starts_with("(policy"));

        let state = cs("(state (objects a b) (facts (on a b) (on-table b) (clear a) (arm-empty) (gon-table a)))");
        let mut act = ptr::null_mut();
        assert_eq!(relpol_act(pol, state.as_ptr(), &mut act), RelpolStatus::Ok);
        assert_eq!(take(act), "unstack(a)");

        let held = cs("(state (objects a) (facts (holding a) (gon-table a)))");
        assert_eq!(relpol_act(pol, held.as_ptr(), &mut act), RelpolStatus::Ok);
        assert_eq!(take(act), "put-down(a)");

        relpol_policy_free(pol);
        relpol_domain_free(dom);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut dom = ptr::null_mut();
        assert_eq!(relpol_domain_builtin(cs("nope").as_ptr(), &mut dom), RelpolStatus::Domain);
        assert!(!last_error().is_empty());
        assert_eq!(relpol_domain_builtin(ptr::null(), &mut dom), RelpolStatus::NullArgument);
        assert_eq!(relpol_domain_parse(cs("(domain").as_ptr(), &mut dom), RelpolStatus::Domain);

        assert_eq!(relpol_domain_builtin(cs("bw1").as_ptr(), &mut dom), RelpolStatus::Ok);
        let mut pol = ptr::null_mut();
        assert_eq!(relpol_policy_parse(dom, cs("(policy (rule zzz pick-up))").as_ptr(), &mut pol), RelpolStatus::Policy);
        assert_eq!(relpol_policy_parse(dom, cs(POLICY).as_ptr(), &mut pol), RelpolStatus::Ok);
        let mut act = ptr::null_mut();
        assert_eq!(relpol_act(pol, cs("(state (objects a a))").as_ptr(), &mut act), RelpolStatus::State);
        assert!(act.is_null());
        assert_eq!(
            relpol_act(pol, cs("(state (objects) (facts (arm-empty)))").as_ptr(), &mut act),
            RelpolStatus::DeadEnd
        );
        let (mut phi, mut psi) = (0.0, 0.0);
        assert_eq!(
            relpol_evaluate(pol, cs("x").as_ptr(), 10, 10, 0, &mut phi, &mut psi),
            RelpolStatus::Params
        );
        assert_eq!(
            relpol_evaluate(pol, cs("3").as_ptr(), 0, 10, 0, &mut phi, &mut psi),
            RelpolStatus::Params
        );
        assert_eq!(relpol_policy_learn(dom, cs("").as_ptr(), 2, 4, 3, 0, 0, 0, &mut pol), RelpolStatus::Training);
        relpol_policy_free(pol);
        relpol_domain_free(dom);
        relpol_policy_free(ptr::null_mut());
        relpol_domain_free(ptr::null_mut());
        relpol_string_free(ptr::null_mut());
    }
}

#[test]
fn learn_and_evaluate() {
    let train = concat!(
        r#"{"state":{"objects":["a","b"],"facts":["on(a,b)","on-table(b)","clear(a)","arm-empty","gon-table(a)"]},"optimal":["unstack(a)"],"trajectory":0}"#,
        "\n",
        r#"{"state":{"objects":["a","b"],"facts":["holding(a)","on-table(b)","clear(b)","gon-table(a)"]},"optimal":["put-down(a)"],"trajectory":0}"#,
        "\n",
    );
    unsafe {
        let mut dom = ptr::null_mut();
        assert_eq!(relpol_domain_builtin(cs("bw1").as_ptr(), &mut dom), RelpolStatus::Ok);
        let mut pol = ptr::null_mut();
        assert_eq!(relpol_policy_learn(dom, cs(train).as_ptr(), 2, 4, 3, 0, 0, 0, &mut pol), RelpolStatus::Ok);
        let (mut phi, mut psi) = (-1.0, -1.0);
        assert_eq!(
            relpol_evaluate(pol, cs("2").as_ptr(), 20, 10, 3, &mut phi, &mut psi),
            RelpolStatus::Ok
        );
        assert!((0.0..=1.0).contains(&phi));
        assert!(psi.is_nan() || psi >= 0.0);
        relpol_policy_free(pol);

        let mut bag = ptr::null_mut();
        assert_eq!(relpol_policy_learn(dom, cs(train).as_ptr(), 2, 4, 3, 3, 1, 9, &mut bag), RelpolStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(relpol_policy_to_string(bag, &mut text), RelpolStatus::Ok);
        assert!(take(text).starts_with("(ensemble"));
        assert_eq!(relpol_policy_learn(dom, cs(train).as_ptr(), 2, 4, 3, 3, 0, 9, &mut bag), RelpolStatus::Params);
        relpol_policy_free(bag);
        relpol_domain_free(dom);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/relpol.h")).unwrap();
    for f in [
        "relpol_last_error",
        "relpol_string_free",
        "relpol_domain_builtin",
        "relpol_domain_parse",
        "relpol_domain_free",
        "relpol_policy_parse",
        "relpol_policy_learn",
        "relpol_policy_free",
        "relpol_policy_to_string",
        "relpol_act",
        "relpol_evaluate",
        "typedef struct RelpolDomain RelpolDomain",
        "RELPOL_STATUS_DEAD_END = 8",
    ] {
        assert!(header.contains(f), "{f}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile_dir();
    let src = dir.join("use.c");
    std::fs::write(
        &src,
        "#include \"relpol.h\"\nint main(void) { RelpolDomain *d = 0; return relpol_domain_builtin(\"bw1\", &d) == RELPOL_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new(cc)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(include)
        .arg(&src)
        .status()
        .unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("relpol-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
