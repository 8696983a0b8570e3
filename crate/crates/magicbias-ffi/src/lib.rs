//! C ABI over the enumeration and reconstruction pipeline.
//!
//! Every fallible call returns an `MbStatus`; on failure the message is kept
//! per thread and read with `mb_last_error`. Handles are opaque and freed
//! with `mb_enumeration_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use magicbias::config::NamedSet;
use magicbias::gadget::{Counts, Gadget, NoisyFlags};
use magicbias::tomography::{analyse, Mode};
use magicbias::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Computation = 3,
    Panic = 4,
}

/// Logical noise of one grid point. `ptm` is the reconstructed logical PTM,
/// row major in the I, X, Y, Z basis.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MbMetrics {
    pub accept_rate: f64,
    pub leak_rate: f64,
    pub r_proc: f64,
    pub r_avg: f64,
    pub p_xl: f64,
    pub p_yl: f64,
    pub p_zl: f64,
    pub eta_zl: f64,
    pub eta_xl: f64,
    pub ptm: [f64; 16],
}

/// Fault-configuration counts of one gadget for up to four bias sets.
pub struct MbEnumeration {
    gadget: Gadget,
    counts: Counts,
    sets: Vec<NamedSet>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Config(_) | Error::Noise(_) | Error::ParsePauli(_) | Error::TooExpensive { .. } => {
                MbStatus::InvalidArgument
            }
            _ => MbStatus::Computation,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(MbStatus::InvalidArgument, msg.into())
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MbStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MbStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(h: *const MbEnumeration) -> Result<&'a MbEnumeration, Failure> {
    h.as_ref().ok_or(Failure(MbStatus::NullPointer, "enumeration handle is null".into()))
}

fn null(what: &str) -> Failure {
    Failure(MbStatus::NullPointer, format!("{what} is null"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Enumerates all fault configurations up to `order` for the gadget with the
/// noisy components in `flags` (letters S, M, I, E or "none").
///
/// Each entry of `sets` is a preset name (Z, X, Y, M) or comma-separated
/// two-qubit generators such as "Z1Z2,X1". `workers` = 0 uses every core.
///
/// # Safety
/// `flags` and the `n_sets` entries of `sets` must be NUL-terminated strings;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_enumerate(
    flags: *const c_char,
    sets: *const *const c_char,
    n_sets: usize,
    order: u32,
    workers: u32,
    out: *mut *mut MbEnumeration,
) -> MbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if sets.is_null() {
            return Err(null("sets"));
        }
        if n_sets == 0 || n_sets > 4 {
            return Err(invalid(format!("between 1 and 4 bias sets per enumeration, got {n_sets}")));
        }
        if order > 3 {
            return Err(invalid(format!("truncation order at most 3, got {order}")));
        }
        let flags = NoisyFlags::parse_key(text(flags, "flags")?)?;
        let named = (0..n_sets)
            .map(|i| {
                let field = format!("sets[{i}]");
                Ok(NamedSet::parse_arg(text(*sets.add(i), &field)?, &field)?)
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        let gadget = Gadget::new(flags)?;
        let bias: Vec<_> = named.iter().map(|s| s.set.clone()).collect();
        let counts = gadget.enumerate(order as usize, &bias, workers as usize)?;
        *out = Box::into_raw(Box::new(MbEnumeration { gadget, counts, sets: named }));
        Ok(())
    })
}

/// Number of fault sites of the enumerated gadget.
///
/// # Safety
/// `h` must come from `mb_enumerate`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_enumeration_sites(h: *const MbEnumeration, out: *mut usize) -> MbStatus {
    guard(|| {
        let h = handle(h)?;
        *out.as_mut().ok_or_else(|| null("out"))? = h.gadget.n_sites();
        Ok(())
    })
}

/// Bias of the depolarizing channel for bias set `set`: 0.25 for every
/// two-qubit set.
///
/// # Safety
/// `h` must come from `mb_enumerate`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_depolarizing_eta(h: *const MbEnumeration, set: usize, out: *mut f64) -> MbStatus {
    guard(|| {
        let h = handle(h)?;
        let s = h.sets.get(set).ok_or_else(|| invalid(format!("set index {set} out of range")))?;
        *out.as_mut().ok_or_else(|| null("out"))? = s.set.depolarizing_eta();
        Ok(())
    })
}

/// Reconstructs the logical channel at one (eta, p) point. `eta` may be
/// infinite. `adaptive` selects the adaptive T correction.
///
/// # Safety
/// `h` must come from `mb_enumerate`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mb_analyse(
    h: *const MbEnumeration,
    set: usize,
    eta: f64,
    p: f64,
    adaptive: bool,
    out: *mut MbMetrics,
) -> MbStatus {
    guard(|| {
        let h = handle(h)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if set >= h.sets.len() {
            return Err(invalid(format!("set index {set} out of range")));
        }
        let mode = if adaptive { Mode::Adaptive } else { Mode::NonAdaptive };
        let r = analyse(&h.gadget.tallies(&h.counts, set, eta, p)?, mode)?;
        let m = &r.metrics;
        let mut ptm = [0.0; 16];
        for (i, row) in r.ptm.iter().enumerate() {
            ptm[4 * i..4 * i + 4].copy_from_slice(row);
        }
        *out = MbMetrics {
            accept_rate: m.accept_rate,
            leak_rate: m.leak_rate,
            r_proc: m.r_proc,
            r_avg: m.r_avg,
            p_xl: m.p_xl,
            p_yl: m.p_yl,
            p_zl: m.p_zl,
            eta_zl: m.eta_zl,
            eta_xl: m.eta_xl,
            ptm,
        };
        Ok(())
    })
}

/// Frees a handle from `mb_enumerate`. NULL is ignored.
///
/// # Safety
/// `h` must come from `mb_enumerate` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mb_enumeration_free(h: *mut MbEnumeration) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
