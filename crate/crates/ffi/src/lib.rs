//! C interface to relpol.
//!
//! Domains and policies are opaque handles. Every function returns a
//! [`RelpolStatus`]; on failure a message is available from
//! [`relpol_last_error`] on the calling thread. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`relpol_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use relpol::domains::{builtin_domain, GeneratorSpec};
use relpol::harness::{self, evaluate, EvalConfig};
use relpol::learner::{BagParams, LearnerParams};
use relpol::policy::{parse_policy, Policy};
use relpol::pstrips::{parse_domain, parse_state, DomainDef};
use relpol::trainset;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelpolStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    State = 4,
    Policy = 5,
    Training = 6,
    Params = 7,
    /// The policy has no legal action in the state.
    DeadEnd = 8,
    Panic = 9,
}

/// A parsed PSTRIPS domain.
pub struct RelpolDomain {
    dom: Arc<DomainDef>,
}

/// A decision list or ensemble, bound to its domain.
pub struct RelpolPolicy {
    dom: Arc<DomainDef>,
    policy: Policy,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

type Res<T> = Result<T, (RelpolStatus, String)>;

fn guard(f: impl FnOnce() -> Res<()>) -> RelpolStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RelpolStatus::Ok,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            RelpolStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Res<&'a str> {
    if p.is_null() {
        return Err((RelpolStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RelpolStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out<T>(p: *mut T, what: &str) -> Res<&'static mut T> {
    p.as_mut()
        .ok_or_else(|| (RelpolStatus::NullArgument, format!("{what} is null")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread. Valid until the next
/// call on the same thread; never null.
#[no_mangle]
pub extern "C" fn relpol_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn relpol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a built-in domain by name (`bw1`, `lw2`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relpol_domain_builtin(name: *const c_char, out: *mut *mut RelpolDomain) -> RelpolStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        let dom = builtin_domain(text(name, "name")?).map_err(|e| (RelpolStatus::Domain, e.to_string()))?;
        *slot = Box::into_raw(Box::new(RelpolDomain { dom: Arc::new(dom) }));
        Ok(())
    })
}

/// Parses a domain from its s-expression source.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relpol_domain_parse(source: *const c_char, out: *mut *mut RelpolDomain) -> RelpolStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        let dom = parse_domain(text(source, "source")?).map_err(|e| (RelpolStatus::Domain, e.to_string()))?;
        *slot = Box::into_raw(Box::new(RelpolDomain { dom: Arc::new(dom) }));
        Ok(())
    })
}

/// # Safety
/// `dom` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn relpol_domain_free(dom: *mut RelpolDomain) {
    if !dom.is_null() {
        drop(Box::from_raw(dom));
    }
}

unsafe fn domain<'a>(dom: *const RelpolDomain) -> Res<&'a RelpolDomain> {
    dom.as_ref()
        .ok_or((RelpolStatus::NullArgument, "domain is null".into()))
}

unsafe fn policy<'a>(pol: *const RelpolPolicy) -> Res<&'a RelpolPolicy> {
    pol.as_ref()
        .ok_or((RelpolStatus::NullArgument, "policy is null".into()))
}

/// Parses a `(policy ...)` or `(ensemble ...)` file for `dom`.
///
/// # Safety
/// Pointers must be valid; `source` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relpol_policy_parse(
    dom: *const RelpolDomain,
    source: *const c_char,
    out: *mut *mut RelpolPolicy,
) -> RelpolStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        let d = domain(dom)?;
        let policy = parse_policy(text(source, "source")?, &d.dom).map_err(|e| (RelpolStatus::Policy, e.to_string()))?;
        *slot = Box::into_raw(Box::new(RelpolPolicy {
            dom: d.dom.clone(),
            policy,
        }));
        Ok(())
    })
}

/// Learns a policy from JSON-lines training data. `bag_size == 0` learns a
/// single decision list; otherwise `bag_size` members are learned from
/// `sample_size` trajectories each (untagged lines count as their own
/// trajectory).
///
/// # Safety
/// Pointers must be valid; `training` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relpol_policy_learn(
    dom: *const RelpolDomain,
    training: *const c_char,
    depth: usize,
    width: usize,
    beam: usize,
    bag_size: usize,
    sample_size: usize,
    seed: u64,
    out: *mut *mut RelpolPolicy,
) -> RelpolStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        let d = domain(dom)?;
        let (f, tags) = trainset::read_tagged(text(training, "training")?.as_bytes(), &d.dom)
            .map_err(|e| (RelpolStatus::Training, e.to_string()))?;
        let params = LearnerParams {
            d: depth,
            w: width,
            b: beam,
        };
        let bag = (bag_size > 0).then_some(BagParams {
            z: bag_size,
            m: sample_size,
        });
        let units = trainset::units(&tags);
        let learned = harness::learn(&d.dom, &f, params, bag, Some(&units), seed).map_err(|e| match e {
            harness::Error::EmptyTrainingSet => (RelpolStatus::Training, e.to_string()),
            e => (RelpolStatus::Params, e.to_string()),
        })?;
        *slot = Box::into_raw(Box::new(RelpolPolicy {
            dom: d.dom.clone(),
            policy: learned.into_policy(),
        }));
        Ok(())
    })
}

/// # Safety
/// `pol` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn relpol_policy_free(pol: *mut RelpolPolicy) {
    if !pol.is_null() {
        drop(Box::from_raw(pol));
    }
}

/// Canonical text of a policy.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn relpol_policy_to_string(pol: *const RelpolPolicy, out: *mut *mut c_char) -> RelpolStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        let p = policy(pol)?;
        *slot = c_string(p.policy.to_string(&p.dom));
        Ok(())
    })
}

/// The action the policy takes in `state` (an `(state ...)` s-expression),
/// written as `name(object)`.
///
/// # Safety
/// Pointers must be valid; `state` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relpol_act(
    pol: *const RelpolPolicy,
    state: *const c_char,
    out: *mut *mut c_char,
) -> RelpolStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        let p = policy(pol)?;
        let q = parse_state(&p.dom, text(state, "state")?).map_err(|e| (RelpolStatus::State, e.to_string()))?;
        let a = p
            .policy
            .act(&q, &p.dom)
            .ok_or((RelpolStatus::DeadEnd, "no legal action".to_string()))?;
        *slot = c_string(a.display(&p.dom, q.objects()).to_string());
        Ok(())
    })
}

/// Runs `episodes` test problems of `size` (`"20"`, `"<5,7,7,20"`, ...) and
/// reports the success rate and the mean length of successful episodes
/// (NaN when none succeed).
///
/// # Safety
/// Pointers must be valid; `size` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relpol_evaluate(
    pol: *const RelpolPolicy,
    size: *const c_char,
    episodes: usize,
    horizon: usize,
    seed: u64,
    phi: *mut f64,
    psi: *mut f64,
) -> RelpolStatus {
    guard(|| {
        let phi = self::out(phi, "phi")?;
        let psi = self::out(psi, "psi")?;
        let p = policy(pol)?;
        if episodes == 0 || horizon == 0 {
            return Err((RelpolStatus::Params, "episodes and horizon must be at least 1".into()));
        }
        let size = text(size, "size")?
            .parse()
            .map_err(|e: relpol::domains::Error| (RelpolStatus::Params, e.to_string()))?;
        let spec = GeneratorSpec::new(p.dom.clone(), &p.dom.name, size)
            .map_err(|e| (RelpolStatus::Domain, e.to_string()))?;
        let r = evaluate(
            &p.policy,
            &EvalConfig {
                spec,
                episodes,
                horizon,
                seed,
            },
        );
        *phi = r.phi;
        *psi = r.psi.unwrap_or(f64::NAN);
        Ok(())
    })
}
