//! C interface to `eebandit`.
//!
//! Every fallible call returns an [`EebStatus`]; on failure the message is
//! available from [`eeb_last_error_message`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use eebandit::analytics::{pareto_indices, ParetoObjective, TradeoffPoint};
use eebandit::env::{compute_reward, lambda_from_epsilon, ExitOutcome};
use eebandit::harness::{run_grid, write_outputs, ExperimentConfig, OutputSelection};
use eebandit::numerics::{derive_stream_id, inverse_normal_cdf, normal_cdf, RngStream};
use eebandit::policy::{NigPrior, Policy, PolicyConfig, PolicyKind};
use eebandit::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EebStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Contract = 4,
    Config = 5,
    Trace = 6,
    Io = 7,
    Parse = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EebPolicyKind {
    Ucb1 = 0,
    UcbV = 1,
    UcbTuned = 2,
    UcbBayes = 3,
    UcbBwk = 4,
}

impl From<EebPolicyKind> for PolicyKind {
    fn from(k: EebPolicyKind) -> Self {
        match k {
            EebPolicyKind::Ucb1 => PolicyKind::Ucb1,
            EebPolicyKind::UcbV => PolicyKind::UcbV,
            EebPolicyKind::UcbTuned => PolicyKind::UcbTuned,
            EebPolicyKind::UcbBayes => PolicyKind::UcbBayes,
            EebPolicyKind::UcbBwk => PolicyKind::UcbBwk,
        }
    }
}

/// Normal-inverse-gamma prior for UCB-Bayes.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EebNigPrior {
    pub mu0: f64,
    pub lambda0: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EebPolicyConfig {
    pub kind: EebPolicyKind,
    /// Reward range B for UCB-V.
    pub reward_range: f64,
    /// Exponent of the UCB-Bayes quantile schedule.
    pub quantile_exponent: f64,
    pub prior: EebNigPrior,
}

impl From<&EebPolicyConfig> for PolicyConfig {
    fn from(c: &EebPolicyConfig) -> Self {
        PolicyConfig {
            kind: c.kind.into(),
            reward_range: c.reward_range,
            prior: NigPrior {
                mu0: c.prior.mu0,
                lambda0: c.prior.lambda0,
                alpha0: c.prior.alpha0,
                beta0: c.prior.beta0,
            },
            quantile_exponent: c.quantile_exponent,
        }
    }
}

/// Opaque policy handle.
pub struct EebPolicy(Policy);

/// Opaque random stream handle.
pub struct EebRng(RngStream);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> EebStatus {
    match err {
        Error::Domain(_) => EebStatus::Domain,
        Error::Contract(_) => EebStatus::Contract,
        Error::Config(_) => EebStatus::Config,
        Error::Trace { .. } | Error::TraceTooShort { .. } => EebStatus::Trace,
        Error::Io { .. } => EebStatus::Io,
        Error::Parse { .. } => EebStatus::Parse,
    }
}

/// Runs `f`, translating errors and panics into a status and the last-error
/// message.
fn guard(f: impl FnOnce() -> Result<(), (EebStatus, String)>) -> EebStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EebStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EebStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (EebStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (EebStatus, String) {
    (EebStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (EebStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            EebStatus::InvalidArgument,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (EebStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message for the most recent failed call on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eeb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Fills `out` with the default configuration for `kind`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `EebPolicyConfig`.
#[no_mangle]
pub unsafe extern "C" fn eeb_policy_config_default(
    kind: EebPolicyKind,
    out: *mut EebPolicyConfig,
) -> EebStatus {
    guard(|| {
        let out = unsafe { self::out(out, "out") }?;
        let c = PolicyConfig::new(kind.into());
        *out = EebPolicyConfig {
            kind,
            reward_range: c.reward_range,
            quantile_exponent: c.quantile_exponent,
            prior: EebNigPrior {
                mu0: c.prior.mu0,
                lambda0: c.prior.lambda0,
                alpha0: c.prior.alpha0,
                beta0: c.prior.beta0,
            },
        };
        Ok(())
    })
}

/// Creates a policy over `num_arms` arms; release with [`eeb_policy_free`].
///
/// # Safety
/// `config` must point to a valid `EebPolicyConfig`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_policy_new(
    config: *const EebPolicyConfig,
    num_arms: usize,
    out: *mut *mut EebPolicy,
) -> EebStatus {
    guard(|| {
        let config = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        let out = unsafe { self::out(out, "out") }?;
        let policy = Policy::new(config.into(), num_arms).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(EebPolicy(policy)));
        Ok(())
    })
}

/// # Safety
/// `policy` must be null or a handle from [`eeb_policy_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eeb_policy_free(policy: *mut EebPolicy) {
    if !policy.is_null() {
        drop(Box::from_raw(policy));
    }
}

/// Chooses the arm for 1-based step `t`.
///
/// # Safety
/// `policy` must be a live handle; `arm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_policy_select(
    policy: *const EebPolicy,
    t: u64,
    arm: *mut usize,
) -> EebStatus {
    guard(|| {
        let p = unsafe { policy.as_ref() }.ok_or_else(|| null("policy"))?;
        let arm = unsafe { out(arm, "arm") }?;
        *arm = p.0.select_arm(t).map_err(lib_err)?;
        Ok(())
    })
}

/// Records a reward in [0, 1] and a normalized cost for `arm`.
///
/// # Safety
/// `policy` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eeb_policy_update(
    policy: *mut EebPolicy,
    arm: usize,
    reward: f64,
    cost: f64,
) -> EebStatus {
    guard(|| {
        let p = unsafe { policy.as_mut() }.ok_or_else(|| null("policy"))?;
        p.0.update_arm(arm, reward, cost).map_err(lib_err)
    })
}

/// Current index of `arm` at step `t` (infinite for an unpulled arm).
///
/// # Safety
/// `policy` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_policy_index(
    policy: *const EebPolicy,
    arm: usize,
    t: u64,
    value: *mut f64,
) -> EebStatus {
    guard(|| {
        let p = unsafe { policy.as_ref() }.ok_or_else(|| null("policy"))?;
        let value = unsafe { out(value, "value") }?;
        *value = p.0.index(arm, t).map_err(lib_err)?;
        Ok(())
    })
}

/// Number of times `arm` has been updated.
///
/// # Safety
/// `policy` must be a live handle; `pulls` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_policy_pulls(
    policy: *const EebPolicy,
    arm: usize,
    pulls: *mut u64,
) -> EebStatus {
    guard(|| {
        let p = unsafe { policy.as_ref() }.ok_or_else(|| null("policy"))?;
        let pulls = unsafe { out(pulls, "pulls") }?;
        let state =
            p.0.arms()
                .get(arm)
                .ok_or_else(|| (EebStatus::Contract, format!("arm {arm} out of range")))?;
        *pulls = state.pulls();
        Ok(())
    })
}

/// Creates a SplitMix64 stream; release with [`eeb_rng_free`].
#[no_mangle]
pub extern "C" fn eeb_rng_new(seed: u64, stream_id: u64) -> *mut EebRng {
    Box::into_raw(Box::new(EebRng(RngStream::new(seed, stream_id))))
}

/// # Safety
/// `rng` must be null or a handle from [`eeb_rng_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eeb_rng_free(rng: *mut EebRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// # Safety
/// `rng` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_rng_next_u64(rng: *mut EebRng, value: *mut u64) -> EebStatus {
    guard(|| {
        let r = unsafe { rng.as_mut() }.ok_or_else(|| null("rng"))?;
        *unsafe { out(value, "value") }? = r.0.next_u64();
        Ok(())
    })
}

/// Uniform draw in [0, 1).
///
/// # Safety
/// `rng` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_rng_next_unit(rng: *mut EebRng, value: *mut f64) -> EebStatus {
    guard(|| {
        let r = unsafe { rng.as_mut() }.ok_or_else(|| null("rng"))?;
        *unsafe { out(value, "value") }? = r.0.next_unit();
        Ok(())
    })
}

/// Stream id for a (policy, arm set, seed, purpose) key.
///
/// # Safety
/// The strings must be null-terminated UTF-8; `stream_id` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_derive_stream_id(
    policy: *const c_char,
    arm_set: *const c_char,
    seed: u64,
    purpose: *const c_char,
    stream_id: *mut u64,
) -> EebStatus {
    guard(|| {
        let policy = unsafe { c_str(policy, "policy") }?;
        let arm_set = unsafe { c_str(arm_set, "arm_set") }?;
        let purpose = unsafe { c_str(purpose, "purpose") }?;
        *unsafe { out(stream_id, "stream_id") }? = derive_stream_id(policy, arm_set, seed, purpose);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn eeb_normal_cdf(x: f64) -> f64 {
    normal_cdf(x)
}

/// Standard normal quantile; `p` must lie in (0, 1).
///
/// # Safety
/// `z` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_inverse_normal_cdf(p: f64, z: *mut f64) -> EebStatus {
    guard(|| {
        let z = unsafe { out(z, "z") }?;
        *z = inverse_normal_cdf(p).map_err(lib_err)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn eeb_lambda_from_epsilon(epsilon: f64, num_exits: usize) -> f64 {
    lambda_from_epsilon(epsilon, num_exits)
}

/// Reward and normalized cost of exiting at 1-based `exit_index` of
/// `num_exits` with the given confidence and gating score.
///
/// # Safety
/// `reward` and `cost` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_compute_reward(
    confidence: f64,
    gating: f64,
    exit_index: usize,
    num_exits: usize,
    lambda: f64,
    kind: EebPolicyKind,
    reward: *mut f64,
    cost: *mut f64,
) -> EebStatus {
    guard(|| {
        let reward = unsafe { out(reward, "reward") }?;
        let cost = unsafe { out(cost, "cost") }?;
        if exit_index == 0 || exit_index > num_exits {
            return Err((
                EebStatus::InvalidArgument,
                format!("exit index {exit_index} outside 1..={num_exits}"),
            ));
        }
        if !(0.0..=1.0).contains(&confidence) || !(0.0..=1.0).contains(&gating) {
            return Err((
                EebStatus::InvalidArgument,
                "confidence and gating must lie in [0, 1]".into(),
            ));
        }
        let outcome = ExitOutcome {
            exit_index,
            num_exits,
            confidence,
            gating,
            correct: false,
            latency_ms: 0.0,
            energy_units: 0.0,
        };
        let signal = compute_reward(&outcome, lambda, kind.into());
        *reward = signal.reward;
        *cost = signal.cost;
        Ok(())
    })
}

/// Non-dominated points of (accuracy up, cost down), ordered by ascending
/// cost. Writes at most `n` indices to `indices` and the count to `count`.
///
/// # Safety
/// `accuracy` and `cost` must hold `n` values; `indices` must have room for
/// `n` entries; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eeb_pareto_indices(
    accuracy: *const f64,
    cost: *const f64,
    n: usize,
    indices: *mut usize,
    count: *mut usize,
) -> EebStatus {
    guard(|| {
        let count = unsafe { out(count, "count") }?;
        if n == 0 {
            *count = 0;
            return Ok(());
        }
        if accuracy.is_null() || cost.is_null() || indices.is_null() {
            return Err(null("accuracy, cost or indices"));
        }
        let acc = unsafe { std::slice::from_raw_parts(accuracy, n) };
        let cost_in = unsafe { std::slice::from_raw_parts(cost, n) };
        let dst = unsafe { std::slice::from_raw_parts_mut(indices, n) };
        let points: Vec<TradeoffPoint> = acc
            .iter()
            .zip(cost_in)
            .map(|(&a, &c)| TradeoffPoint {
                label: String::new(),
                accuracy: a,
                mean_latency_ms: c,
                mean_energy_units: c,
            })
            .collect();
        let frontier = pareto_indices(&points, ParetoObjective::AccuracyVsLatency);
        dst[..frontier.len()].copy_from_slice(&frontier);
        *count = frontier.len();
        Ok(())
    })
}

/// Parses and validates a config file, including its trace.
///
/// # Safety
/// `path` must be a null-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn eeb_validate_config(path: *const c_char) -> EebStatus {
    guard(|| {
        let path = PathBuf::from(unsafe { c_str(path, "path") }?);
        let config = ExperimentConfig::load(path).map_err(lib_err)?;
        config.validate_with_environment().map_err(lib_err)?;
        Ok(())
    })
}

/// Runs the full grid of a config file and writes every CSV output.
///
/// # Safety
/// `path` must be a null-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn eeb_run_config(path: *const c_char, seed_offset: u64) -> EebStatus {
    guard(|| {
        let path = PathBuf::from(unsafe { c_str(path, "path") }?);
        let config = ExperimentConfig::load(path)
            .map_err(lib_err)?
            .with_seed_offset(seed_offset);
        let result = run_grid(&config).map_err(lib_err)?;
        write_outputs(&result, &config.output_dir, OutputSelection::ALL).map_err(lib_err)?;
        Ok(())
    })
}
