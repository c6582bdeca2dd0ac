//! C ABI over `gchaos`.
//!
//! Tensors and metric spaces are opaque heap handles created by the
//! `*_new`/`*_from_*` functions and released by the matching `*_free`. Every
//! fallible function returns a [`GchaosStatus`] and writes results through
//! out-pointers; on failure the message is available from
//! [`gchaos_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gchaos::chaining::{dudley_integral, greedy_admissible_sequence, MetricMatrix};
use gchaos::chaos::{hanson_wright_bound, partition_moment_bound, sample_chaos_moment, ChaosSampleConfig};
use gchaos::norms::{hs_norm, operator_norm_2d, partition_norm, NormOptions};
use gchaos::tensor::io::parse_tensor;
use gchaos::tensor::{DenseTensor, Partition};
use gchaos::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GchaosStatus {
    Ok = 0,
    NullPointer = 1,
    Shape = 2,
    Index = 3,
    Argument = 4,
    Parse = 5,
    Io = 6,
    Utf8 = 7,
    Panic = 8,
}

/// Opaque dense tensor.
pub struct GchaosTensor(DenseTensor);

/// Opaque finite metric space.
pub struct GchaosMetric(MetricMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GchaosStatus {
    match e {
        Error::Shape(_) => GchaosStatus::Shape,
        Error::Index(_) => GchaosStatus::Index,
        Error::Argument(_) => GchaosStatus::Argument,
        Error::Parse(_) => GchaosStatus::Parse,
        Error::Io(_) => GchaosStatus::Io,
    }
}

struct Failure(GchaosStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GchaosStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GchaosStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GchaosStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GchaosStatus::Panic
        }
    }
}

unsafe fn tensor_ref<'a>(t: *const GchaosTensor) -> Result<&'a DenseTensor, Failure> {
    t.as_ref().map(|t| &t.0).ok_or_else(|| null("tensor"))
}

unsafe fn metric_ref<'a>(m: *const GchaosMetric) -> Result<&'a MetricMatrix, Failure> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("metric"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(GchaosStatus::Utf8, format!("{what} is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn gchaos_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Tensor with `order` axes of sizes `dims` and `len` row-major entries.
///
/// # Safety
/// `dims` and `data` must point to `order` and `len` readable elements.
#[no_mangle]
pub unsafe extern "C" fn gchaos_tensor_new(
    dims: *const usize,
    order: usize,
    data: *const f64,
    len: usize,
    out: *mut *mut GchaosTensor,
) -> GchaosStatus {
    guard(|| {
        let dims = slice(dims, order, "dims")?.to_vec();
        let data = slice(data, len, "data")?.to_vec();
        let t = DenseTensor::new(dims, data)?;
        write(out, Box::into_raw(Box::new(GchaosTensor(t))), "out")
    })
}

/// Tensor parsed from the JSON format `{"dims": [..], "data": [..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gchaos_tensor_from_json(json: *const c_char, out: *mut *mut GchaosTensor) -> GchaosStatus {
    guard(|| {
        let t = parse_tensor(c_str(json, "json")?)?;
        write(out, Box::into_raw(Box::new(GchaosTensor(t))), "out")
    })
}

/// Releases a tensor; NULL is ignored.
///
/// # Safety
/// `t` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gchaos_tensor_free(t: *mut GchaosTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of axes; 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live tensor handle.
#[no_mangle]
pub unsafe extern "C" fn gchaos_tensor_order(t: *const GchaosTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.order())
}

/// Frobenius norm.
///
/// # Safety
/// `t` must be a live tensor handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_hs_norm(t: *const GchaosTensor, out: *mut f64) -> GchaosStatus {
    guard(|| write(out, hs_norm(tensor_ref(t)?), "out"))
}

/// Spectral norm of an order-2 tensor.
///
/// # Safety
/// `t` must be a live tensor handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_operator_norm_2d(t: *const GchaosTensor, out: *mut f64) -> GchaosStatus {
    guard(|| write(out, operator_norm_2d(tensor_ref(t)?)?, "out"))
}

/// Partition norm for a partition string such as `{1,3}{2}`.
///
/// # Safety
/// `t` must be a live tensor handle, `partition` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_partition_norm(
    t: *const GchaosTensor,
    partition: *const c_char,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> GchaosStatus {
    guard(|| {
        let p: Partition = c_str(partition, "partition")?.parse()?;
        let opts = NormOptions {
            restarts,
            seed,
            ..NormOptions::default()
        };
        write(out, partition_norm(tensor_ref(t)?, &p, &opts)?.value, "out")
    })
}

/// Monte Carlo `(E|Z|^p)^{1/p}` and its standard error.
///
/// # Safety
/// `t` must be a live tensor handle; `value` and `std_error` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_sample_moment(
    t: *const GchaosTensor,
    p: f64,
    samples: usize,
    seed: u64,
    decoupled: bool,
    value: *mut f64,
    std_error: *mut f64,
) -> GchaosStatus {
    guard(|| {
        let a = tensor_ref(t)?.clone();
        let cfg = if decoupled {
            ChaosSampleConfig::decoupled(a, p, samples, seed)
        } else {
            ChaosSampleConfig::coupled(a, p, samples, seed)
        };
        let est = sample_chaos_moment(&cfg)?;
        write(value, est.value, "value")?;
        write(std_error, est.std_error, "std_error")
    })
}

/// `Σ_P p^{card P / 2} ‖A‖_P` over all partitions of the axes.
///
/// # Safety
/// `t` must be a live tensor handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_partition_moment_bound(
    t: *const GchaosTensor,
    p: f64,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> GchaosStatus {
    guard(|| {
        let opts = NormOptions {
            restarts,
            seed,
            ..NormOptions::default()
        };
        write(out, partition_moment_bound(tensor_ref(t)?, p, &opts)?.total, "out")
    })
}

/// `√p ‖A‖_HS + p ‖A‖_op` for an order-2 tensor.
///
/// # Safety
/// `t` must be a live tensor handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_hanson_wright_bound(t: *const GchaosTensor, p: f64, out: *mut f64) -> GchaosStatus {
    guard(|| write(out, hanson_wright_bound(tensor_ref(t)?, p)?, "out"))
}

/// Metric space from a row-major `size × size` distance matrix.
///
/// # Safety
/// `dist` must point to `size * size` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_metric_new(size: usize, dist: *const f64, out: *mut *mut GchaosMetric) -> GchaosStatus {
    guard(|| {
        let len = size
            .checked_mul(size)
            .ok_or_else(|| Failure(GchaosStatus::Argument, "size overflows".into()))?;
        let m = MetricMatrix::new(size, slice(dist, len, "dist")?.to_vec())?;
        write(out, Box::into_raw(Box::new(GchaosMetric(m))), "out")
    })
}

/// Euclidean metric on `n` points of `R^dim` stored row-major.
///
/// # Safety
/// `points` must point to `n * dim` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_metric_from_points(
    points: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut GchaosMetric,
) -> GchaosStatus {
    guard(|| {
        if dim == 0 {
            return Err(Failure(GchaosStatus::Argument, "dim must be positive".into()));
        }
        let len = n
            .checked_mul(dim)
            .ok_or_else(|| Failure(GchaosStatus::Argument, "size overflows".into()))?;
        let coords = slice(points, len, "points")?;
        let pts: Vec<Vec<f64>> = coords.chunks(dim).map(<[f64]>::to_vec).collect();
        let m = MetricMatrix::from_points(&pts)?;
        write(out, Box::into_raw(Box::new(GchaosMetric(m))), "out")
    })
}

/// Releases a metric; NULL is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gchaos_metric_free(m: *mut GchaosMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Chaining value of the greedy admissible sequence.
///
/// # Safety
/// `m` must be a live metric handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_gamma(m: *const GchaosMetric, out: *mut f64) -> GchaosStatus {
    guard(|| write(out, greedy_admissible_sequence(metric_ref(m)?).value, "out"))
}

/// Dudley entropy integral on the dyadic grid.
///
/// # Safety
/// `m` must be a live metric handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gchaos_dudley(m: *const GchaosMetric, out: *mut f64) -> GchaosStatus {
    guard(|| write(out, dudley_integral(metric_ref(m)?), "out"))
}
