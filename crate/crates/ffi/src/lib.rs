//! C ABI over the analysis and simulation engines.
//!
//! Parameters live behind an opaque `MmwParams` handle created by
//! `mmw_params_default` or `mmw_params_from_toml` and released with
//! `mmw_params_free`. Every fallible call returns an `MmwStatus`; on
//! failure `mmw_last_error` gives a message for the calling thread. Results
//! are written through out-pointers, which are left untouched on failure.
//! Panics never cross the boundary: they are reported as `MMW_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mmwave_d2d::analysis::{self, AnalysisError, AnalysisSettings, ClusterForm, LaplaceKind, Variant};
use mmwave_d2d::channel::LinkKind;
use mmwave_d2d::params::{default_params, load_params, NetworkParams, ParamError};
use mmwave_d2d::simulator::{self, McSettings, SimError};

/// Outcome of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmwStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or a string was not valid UTF-8.
    InvalidArgument = 2,
    /// The configuration could not be parsed or failed validation.
    Config = 3,
    /// A numerical evaluation failed (e.g. quadrature did not converge).
    Numerical = 4,
    /// The simulator rejected its settings.
    Simulation = 5,
    /// An internal panic was caught.
    Panic = 6,
}

/// Serving link of the typical receiver.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmwMode {
    Cellular = 0,
    D2d = 1,
}

/// Mode-selection formula.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmwVariant {
    Partitioned = 0,
    Printed = 1,
}

/// Interference component for `mmw_laplace`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmwLaplaceKind {
    Cc = 0,
    DcExact = 1,
    DcApprox = 2,
    Cd = 3,
    DdIntra = 4,
    DdInterExact = 5,
    DdInterApprox = 6,
}

/// Monte Carlo estimate with its standard error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmwEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
}

/// Opaque parameter set.
pub struct MmwParams {
    inner: NetworkParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MmwStatus, String);

impl From<ParamError> for Failure {
    fn from(e: ParamError) -> Self {
        Failure(MmwStatus::Config, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let status = match e {
            AnalysisError::InvalidArgument(_) | AnalysisError::MissingW0 => MmwStatus::InvalidArgument,
            _ => MmwStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure(MmwStatus::Simulation, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MmwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MmwStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            MmwStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MmwStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn params_ref<'a>(p: *const MmwParams) -> Result<&'a NetworkParams, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("params"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(MmwStatus::InvalidArgument, format!("`{what}` is not valid UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

fn link(mode: MmwMode) -> LinkKind {
    match mode {
        MmwMode::Cellular => LinkKind::Cellular,
        MmwMode::D2d => LinkKind::D2d,
    }
}

fn positive(name: &str, x: f64) -> Result<(), Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Failure(MmwStatus::InvalidArgument, format!("{name} must be positive and finite, got {x}")))
    }
}

fn probability(x: f64) -> Result<(), Failure> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Failure(MmwStatus::InvalidArgument, format!("p_d2d must lie in [0, 1], got {x}")))
    }
}

/// Message of the last failed call on this thread, or null if there was
/// none. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mmw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mmw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default (reference scenario) parameters. Never null.
#[no_mangle]
pub extern "C" fn mmw_params_default() -> *mut MmwParams {
    Box::into_raw(Box::new(MmwParams { inner: default_params() }))
}

/// Parse a TOML config; missing keys take default values.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_params_from_toml(text: *const c_char, out: *mut *mut MmwParams) -> MmwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = load_params(c_str(text, "text")?)?;
        write(out, Box::into_raw(Box::new(MmwParams { inner })))
    })
}

/// Independent copy of a parameter set.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_params_clone(params: *const MmwParams, out: *mut *mut MmwParams) -> MmwStatus {
    guard(|| {
        let inner = params_ref(params)?.clone();
        write(out, Box::into_raw(Box::new(MmwParams { inner })))
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mmw_params_free(params: *mut MmwParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Set one config key in config units (dB, degrees, mW; booleans as 0/1).
/// The handle is unchanged if the result would be invalid.
///
/// # Safety
/// `params` must be a live handle and `key` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mmw_params_set(params: *mut MmwParams, key: *const c_char, value: f64) -> MmwStatus {
    guard(|| {
        let key = c_str(key, "key")?;
        let handle = params.as_mut().ok_or_else(|| null("params"))?;
        handle.inner = handle.inner.with_override(key, value)?;
        Ok(())
    })
}

/// Read one config key in config units.
///
/// # Safety
/// `params` must be a live handle, `key` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_params_get(params: *const MmwParams, key: *const c_char, out: *mut f64) -> MmwStatus {
    guard(|| {
        let p = params_ref(params)?;
        let key = c_str(key, "key")?;
        let v = p
            .get(key)
            .ok_or_else(|| Failure(MmwStatus::InvalidArgument, format!("unknown or unset key `{key}`")))?;
        write(out, v)
    })
}

/// Probability that a potential D2D UE selects D2D mode.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_p_d2d(params: *const MmwParams, variant: MmwVariant, out: *mut f64) -> MmwStatus {
    guard(|| {
        let p = params_ref(params)?;
        let v = match variant {
            MmwVariant::Partitioned => Variant::Partitioned,
            MmwVariant::Printed => Variant::Printed,
        };
        let m = analysis::p_d2d(p, v, &AnalysisSettings::default())?;
        write(out, m.value)
    })
}

/// Outage probability at linear SINR threshold `gamma`, averaged over the
/// configured beamsteering error.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_outage(
    params: *const MmwParams,
    mode: MmwMode,
    gamma: f64,
    p_d2d: f64,
    out: *mut f64,
) -> MmwStatus {
    guard(|| {
        let p = params_ref(params)?;
        positive("gamma", gamma)?;
        probability(p_d2d)?;
        let r = analysis::outage_with_beam_error(gamma, link(mode), p, p_d2d, &AnalysisSettings::default())?;
        write(out, r.value)
    })
}

/// `E[exp(-v I)]` of one interference component. `w0` is the distance of
/// the receiver from its cluster centre and is used by `DdIntra` only.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_laplace(
    params: *const MmwParams,
    kind: MmwLaplaceKind,
    v: f64,
    p_d2d: f64,
    w0: f64,
    out: *mut f64,
) -> MmwStatus {
    guard(|| {
        let p = params_ref(params)?;
        if !v.is_finite() || v < 0.0 {
            return Err(Failure(MmwStatus::InvalidArgument, format!("v must be finite and >= 0, got {v}")));
        }
        probability(p_d2d)?;
        let kind = match kind {
            MmwLaplaceKind::Cc => LaplaceKind::Cc,
            MmwLaplaceKind::DcExact => LaplaceKind::Dc(ClusterForm::Exact),
            MmwLaplaceKind::DcApprox => LaplaceKind::Dc(ClusterForm::Approx),
            MmwLaplaceKind::Cd => LaplaceKind::Cd,
            MmwLaplaceKind::DdIntra => LaplaceKind::DdIntra,
            MmwLaplaceKind::DdInterExact => LaplaceKind::DdInter(ClusterForm::Exact),
            MmwLaplaceKind::DdInterApprox => LaplaceKind::DdInter(ClusterForm::Approx),
        };
        let w0 = (w0 >= 0.0).then_some(w0);
        let x = analysis::laplace(kind, v, p, p_d2d, w0, &AnalysisSettings::default())?;
        write(out, x)
    })
}

/// Area spectral efficiency (bits/s/Hz/m²) at linear threshold `gamma`
/// with the sharing mode and partition factor of `params`.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_ase(params: *const MmwParams, gamma: f64, p_d2d: f64, out: *mut f64) -> MmwStatus {
    guard(|| {
        let p = params_ref(params)?;
        positive("gamma", gamma)?;
        probability(p_d2d)?;
        let x = analysis::ase(gamma, p, p.sharing, p.delta, p_d2d, &AnalysisSettings::default())?;
        write(out, x)
    })
}

/// Simulated outage probability. Deterministic for a given seed.
///
/// # Safety
/// `params` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mmw_simulate_outage(
    params: *const MmwParams,
    mode: MmwMode,
    gamma: f64,
    p_d2d: f64,
    trials: u64,
    seed: u64,
    out: *mut MmwEstimate,
) -> MmwStatus {
    guard(|| {
        let p = params_ref(params)?;
        positive("gamma", gamma)?;
        probability(p_d2d)?;
        let trials = usize::try_from(trials)
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Failure(MmwStatus::InvalidArgument, format!("trials must be positive, got {trials}")))?;
        let mc = McSettings {
            trials,
            seed,
            ..McSettings::default()
        };
        let e = simulator::simulate_outage(link(mode), gamma, p, p_d2d, &mc)?;
        write(
            out,
            MmwEstimate {
                mean: e.mean,
                std_err: e.std_err,
                trials: e.trials as u64,
            },
        )
    })
}
