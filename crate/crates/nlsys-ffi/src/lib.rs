//! C ABI over the closed-form layer: log-Gamma, the four boundedness
//! thresholds, the Gamma-function stability criteria, singular-profile
//! constants, the embedding-exponent step, and the exponent bootstrap.
//!
//! Conventions: every fallible entry point returns an [`NlsStatus`] and
//! writes results through out-pointers, which are written only on
//! `NLS_STATUS_OK`. The bootstrap trace is an opaque heap handle released
//! with [`nls_bootstrap_free`]. No state is shared between calls, so the
//! whole surface is thread-safe.

use nlsys::special;
use nlsys::Error;

/// ABI revision of this header; bump on any breaking change.
pub const NLS_ABI_VERSION: u32 = 1;

/// Stable error codes mirroring the library's failure modes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Input outside the mathematical domain (Gamma pole, order outside
    /// its interval, exponent out of range).
    Domain = 2,
    /// State outside the admissible set of a constrained family.
    Constraint = 3,
    /// A numerical kernel failed to converge or lost ellipticity.
    Numerical = 4,
    /// Invalid run configuration or artifact schema.
    Config = 5,
}

fn status_of(e: &Error) -> NlsStatus {
    match e {
        Error::Domain(_) | Error::BoundaryDivergence { .. } => NlsStatus::Domain,
        Error::ConstraintViolation(_) => NlsStatus::Constraint,
        Error::Config(_) | Error::Schema(_) => NlsStatus::Config,
        _ => NlsStatus::Numerical,
    }
}

/// Outcome of a strict-inequality criterion; ties within the floating-point
/// guard band are reported as marginal instead of being forced to a side.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlsVerdict {
    False = 0,
    True = 1,
    Marginal = 2,
}

impl From<special::Verdict> for NlsVerdict {
    fn from(v: special::Verdict) -> Self {
        match v {
            special::Verdict::False => NlsVerdict::False,
            special::Verdict::True => NlsVerdict::True,
            special::Verdict::Marginal => NlsVerdict::Marginal,
        }
    }
}

/// Kind of Lebesgue-exponent gain of one linear-regularity step.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlsEmbedding {
    /// Below the critical integrability: a finite gained exponent.
    Finite = 0,
    /// Exactly critical: every finite exponent is gained.
    AnyFinite = 1,
    /// Above critical: the solution is bounded.
    Unbounded = 2,
}

/// Verdict of the exponent bootstrap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlsBootstrapVerdict {
    Inconclusive = 0,
    Bounded = 1,
}

/// Opaque bootstrap trace handle.
pub struct NlsBootstrap {
    trace: special::BootstrapTrace,
}

unsafe fn deliver(out: *mut f64, result: nlsys::Result<f64>) -> NlsStatus {
    if out.is_null() {
        return NlsStatus::NullPointer;
    }
    match result {
        Ok(value) => {
            *out = value;
            NlsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// ABI revision of the loaded library; compare against `NLS_ABI_VERSION`
/// from the header.
#[no_mangle]
pub extern "C" fn nls_abi_version() -> u32 {
    NLS_ABI_VERSION
}

/// Natural log of Gamma(x) for real non-pole `x`.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_log_gamma(x: f64, out: *mut f64) -> NlsStatus {
    deliver(out, special::log_gamma(x))
}

/// Dimension threshold of the exponential-nonlinearity system: 10 s.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_threshold_gelfand(s: f64, out: *mut f64) -> NlsStatus {
    deliver(out, special::threshold_gelfand(s))
}

/// Dimension threshold of the (1+u)^p power system.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_threshold_lane_emden(s: f64, p: f64, out: *mut f64) -> NlsStatus {
    deliver(out, special::threshold_lane_emden(s, p))
}

/// Dimension threshold of the singular 1/(1-u)^p system.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_threshold_mems(s: f64, p: f64, out: *mut f64) -> NlsStatus {
    deliver(out, special::threshold_mems(s, p))
}

/// Dimension threshold of the gradient system with power nonlinearities
/// (1+u)^p, (1+v)^q; needs p > 2 and q > 2.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_threshold_gradient(
    s: f64,
    p: f64,
    q: f64,
    out: *mut f64,
) -> NlsStatus {
    deliver(out, special::threshold_gradient(s, p, q))
}

/// Gamma-function stability criterion of the exponential family.
///
/// # Safety
/// `out` must be null or valid for writing one `NlsVerdict`.
#[no_mangle]
pub unsafe extern "C" fn nls_gelfand_criterion(
    n: f64,
    s: f64,
    out: *mut NlsVerdict,
) -> NlsStatus {
    if out.is_null() {
        return NlsStatus::NullPointer;
    }
    match special::gelfand_gamma_criterion(n, s) {
        Ok(v) => {
            *out = v.into();
            NlsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Gamma-function stability criterion of the pure-power family.
///
/// # Safety
/// `out` must be null or valid for writing one `NlsVerdict`.
#[no_mangle]
pub unsafe extern "C" fn nls_lane_emden_criterion(
    n: f64,
    s: f64,
    p: f64,
    out: *mut NlsVerdict,
) -> NlsStatus {
    if out.is_null() {
        return NlsStatus::NullPointer;
    }
    match special::lane_emden_gamma_criterion(n, s, p) {
        Ok(v) => {
            *out = v.into();
            NlsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Coupling constant of the explicit log-singular profile of the
/// exponential equation.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_singular_lambda(n: f64, s: f64, out: *mut f64) -> NlsStatus {
    deliver(out, special::singular_lambda_gelfand(n, s))
}

/// Amplitude of the explicit power-singular profile of the pure-power
/// equation.
///
/// # Safety
/// `out` must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_singular_amplitude(
    n: f64,
    s: f64,
    p: f64,
    out: *mut f64,
) -> NlsStatus {
    deliver(out, special::singular_amplitude_lane_emden(n, s, p))
}

/// Lebesgue-exponent gain of one linear-regularity step. `q_out` is written
/// only when the kind is `NLS_EMBEDDING_FINITE`.
///
/// # Safety
/// `kind_out` must be null or valid for writing one `NlsEmbedding`; `q_out`
/// must be null or valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_embedding_exponent(
    n: f64,
    s: f64,
    r: f64,
    kind_out: *mut NlsEmbedding,
    q_out: *mut f64,
) -> NlsStatus {
    if kind_out.is_null() || q_out.is_null() {
        return NlsStatus::NullPointer;
    }
    match special::embedding_exponent(n, s, r) {
        Ok(special::EmbeddingExponent::Finite(q)) => {
            *kind_out = NlsEmbedding::Finite;
            *q_out = q;
            NlsStatus::Ok
        }
        Ok(special::EmbeddingExponent::AnyFinite) => {
            *kind_out = NlsEmbedding::AnyFinite;
            NlsStatus::Ok
        }
        Ok(special::EmbeddingExponent::Unbounded) => {
            *kind_out = NlsEmbedding::Unbounded;
            NlsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn deliver_trace(
    out: *mut *mut NlsBootstrap,
    result: nlsys::Result<special::BootstrapTrace>,
) -> NlsStatus {
    if out.is_null() {
        return NlsStatus::NullPointer;
    }
    match result {
        Ok(trace) => {
            *out = Box::into_raw(Box::new(NlsBootstrap { trace }));
            NlsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Run the exponent bootstrap from the explicit starting exponent `p0`.
/// On success `*out` owns a trace handle; release it with
/// `nls_bootstrap_free`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_new(
    n: f64,
    s: f64,
    p0: f64,
    max_steps: usize,
    out: *mut *mut NlsBootstrap,
) -> NlsStatus {
    deliver_trace(out, special::nedev_bootstrap(n, s, p0, max_steps))
}

/// Run the exponent bootstrap from the embedding starting exponent
/// n/(n-2s).
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_from_embedding(
    n: f64,
    s: f64,
    max_steps: usize,
    out: *mut *mut NlsBootstrap,
) -> NlsStatus {
    deliver_trace(out, special::nedev_bootstrap_from_embedding(n, s, max_steps))
}

/// Run the exponent bootstrap with its hand-tuned opening stages.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_staged(
    n: f64,
    s: f64,
    max_steps: usize,
    out: *mut *mut NlsBootstrap,
) -> NlsStatus {
    deliver_trace(out, special::nedev_bootstrap_staged(n, s, max_steps))
}

/// Verdict of a finished bootstrap run.
///
/// # Safety
/// `handle` must be null or a live handle from a constructor; `out` must be
/// null or valid for writing one `NlsBootstrapVerdict`.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_verdict(
    handle: *const NlsBootstrap,
    out: *mut NlsBootstrapVerdict,
) -> NlsStatus {
    let (Some(handle), Some(out)) = (handle.as_ref(), out.as_mut()) else {
        return NlsStatus::NullPointer;
    };
    *out = match handle.trace.verdict {
        special::BootstrapVerdict::Bounded => NlsBootstrapVerdict::Bounded,
        special::BootstrapVerdict::Inconclusive => NlsBootstrapVerdict::Inconclusive,
    };
    NlsStatus::Ok
}

/// Number of recursion steps the run performed.
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be null or valid for
/// writing one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_steps(
    handle: *const NlsBootstrap,
    out: *mut usize,
) -> NlsStatus {
    let (Some(handle), Some(out)) = (handle.as_ref(), out.as_mut()) else {
        return NlsStatus::NullPointer;
    };
    *out = handle.trace.steps;
    NlsStatus::Ok
}

/// Number of exponents in the visited trace (at least one: the start).
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be null or valid for
/// writing one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_exponent_count(
    handle: *const NlsBootstrap,
    out: *mut usize,
) -> NlsStatus {
    let (Some(handle), Some(out)) = (handle.as_ref(), out.as_mut()) else {
        return NlsStatus::NullPointer;
    };
    *out = handle.trace.exponents.len();
    NlsStatus::Ok
}

/// Visited exponent at `index`; out-of-range indices are a domain error.
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be null or valid for
/// writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_exponent(
    handle: *const NlsBootstrap,
    index: usize,
    out: *mut f64,
) -> NlsStatus {
    let (Some(handle), Some(out)) = (handle.as_ref(), out.as_mut()) else {
        return NlsStatus::NullPointer;
    };
    match handle.trace.exponents.get(index) {
        Some(&value) => {
            *out = value;
            NlsStatus::Ok
        }
        None => NlsStatus::Domain,
    }
}

/// Release a trace handle; null is a no-op. The handle must not be used
/// afterwards.
///
/// # Safety
/// `handle` must be null or a live handle from a constructor, released at
/// most once.
#[no_mangle]
pub unsafe extern "C" fn nls_bootstrap_free(handle: *mut NlsBootstrap) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_map_each_error_class() {
        assert_eq!(status_of(&Error::Domain("x".into())), NlsStatus::Domain);
        assert_eq!(
            status_of(&Error::ConstraintViolation("x".into())),
            NlsStatus::Constraint
        );
        assert_eq!(status_of(&Error::Config("x".into())), NlsStatus::Config);
        assert_eq!(status_of(&Error::Schema("x".into())), NlsStatus::Config);
        assert_eq!(
            status_of(&Error::NumericalFailure("x".into())),
            NlsStatus::Numerical
        );
    }

    #[test]
    fn out_pointers_are_only_written_on_success() {
        let mut slot = -7.0f64;
        let status = unsafe { nls_threshold_gelfand(2.0, &mut slot) };
        assert_eq!(status, NlsStatus::Domain);
        assert_eq!(slot, -7.0);
    }
}
