//! C ABI over the `mpgtf` library.
//!
//! Every fallible function returns an [`MpgtfStatus`]; on failure a message
//! is kept per thread and can be read with [`mpgtf_last_error_message`].
//! Objects are passed as opaque handles and released with the matching
//! `*_free` function. Matrices are copied out row-major, one row per filter.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mpgtf::metrics::si_snr;
use mpgtf::transform::{apply_mask, decode, encode, pseudo_inverse_decoder, rectify, DecoderBank, EncodedSignal, Mask};
use mpgtf::{build_mpgtf, AudioSignal, Error, Filterbank, MpgtfConfig};
use nalgebra::DMatrix;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpgtfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OddFilterCount = 3,
    TooFewFilters = 4,
    DimensionMismatch = 5,
    RankDeficient = 6,
    ZeroPower = 7,
    Io = 8,
    Parse = 9,
    Internal = 10,
}

/// Analysis filterbank.
pub struct MpgtfFilterbank(Filterbank);

/// Synthesis bank produced by [`mpgtf_decoder_pinv`].
pub struct MpgtfDecoder(DecoderBank);

/// Encoded signal, `n_filters x n_frames`.
pub struct MpgtfEncoded(EncodedSignal);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MpgtfStatus {
    match err {
        Error::OddFilterCount(_) => MpgtfStatus::OddFilterCount,
        Error::TooFewFilters { .. } => MpgtfStatus::TooFewFilters,
        Error::DimensionMismatch(_) | Error::LengthMismatch(..) | Error::SignalTooShort { .. } => {
            MpgtfStatus::DimensionMismatch
        }
        Error::RankDeficient { .. } => MpgtfStatus::RankDeficient,
        Error::ZeroPower => MpgtfStatus::ZeroPower,
        Error::Io(_) | Error::Wav(_) => MpgtfStatus::Io,
        Error::Json(_) | Error::InvalidBank(_) | Error::UnsupportedFormat(_) => MpgtfStatus::Parse,
        _ => MpgtfStatus::InvalidArgument,
    }
}

struct Fail(MpgtfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MpgtfStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MpgtfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MpgtfStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MpgtfStatus::Internal
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn check_len(got: usize, want: usize, what: &str) -> Result<(), Fail> {
    if got == want {
        Ok(())
    } else {
        Err(Fail(
            MpgtfStatus::DimensionMismatch,
            format!("{what}: buffer holds {got} values, need {want}"),
        ))
    }
}

fn copy_row_major(m: &DMatrix<f64>, out: &mut [f64]) {
    let cols = m.ncols();
    for ((r, c), v) in m.iter().enumerate().map(|(k, v)| ((k % m.nrows(), k / m.nrows()), v)) {
        out[r * cols + c] = *v;
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn mpgtf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mpgtf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a bank of `n_filters` filters. `duration_s` is the filter length in
/// seconds; frequencies are in Hz.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_build(
    n_filters: usize,
    sample_rate: u32,
    duration_s: f64,
    f_low_hz: f64,
    f_high_hz: f64,
    out: *mut *mut MpgtfFilterbank,
) -> MpgtfStatus {
    guard(|| {
        let cfg = MpgtfConfig {
            n_filters,
            sample_rate,
            duration_s,
            f_low_hz,
            f_high_hz,
        };
        put(out, MpgtfFilterbank(build_mpgtf(&cfg)?))
    })
}

/// Builds a bank with default parameters (8 kHz, 2 ms, 100 Hz to 4 kHz).
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_build_default(
    n_filters: usize,
    out: *mut *mut MpgtfFilterbank,
) -> MpgtfStatus {
    guard(|| put(out, MpgtfFilterbank(build_mpgtf(&MpgtfConfig::with_filters(n_filters))?)))
}

/// # Safety
/// `bank` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_free(bank: *mut MpgtfFilterbank) {
    if !bank.is_null() {
        drop(Box::from_raw(bank));
    }
}

/// Number of filters, 0 for NULL.
///
/// # Safety
/// `bank` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_n_filters(bank: *const MpgtfFilterbank) -> usize {
    bank.as_ref().map_or(0, |b| b.0.n_filters())
}

/// Taps per filter, 0 for NULL.
///
/// # Safety
/// `bank` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_filter_length(bank: *const MpgtfFilterbank) -> usize {
    bank.as_ref().map_or(0, |b| b.0.filter_length())
}

/// Sample rate in Hz, 0 for NULL.
///
/// # Safety
/// `bank` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_sample_rate(bank: *const MpgtfFilterbank) -> u32 {
    bank.as_ref().map_or(0, |b| b.0.sample_rate())
}

/// Copies the coefficients, row-major, into `out` of exactly
/// `n_filters * filter_length` values.
///
/// # Safety
/// `bank` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_coeffs(
    bank: *const MpgtfFilterbank,
    out: *mut f64,
    len: usize,
) -> MpgtfStatus {
    guard(|| {
        let b = &handle(bank, "bank")?.0;
        check_len(len, b.n_filters() * b.filter_length(), "coeffs")?;
        let out = slice_mut(out, len, "out")?;
        for (dst, f) in out.chunks_mut(b.filter_length()).zip(b.filters()) {
            dst.copy_from_slice(&f.coeffs);
        }
        Ok(())
    })
}

/// Serializes the bank to JSON. Release the string with [`mpgtf_string_free`].
///
/// # Safety
/// `bank` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_to_json(bank: *const MpgtfFilterbank, out: *mut *mut c_char) -> MpgtfStatus {
    guard(|| {
        let text = handle(bank, "bank")?.0.to_json()?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = CString::new(text).map_err(|e| Fail(MpgtfStatus::Internal, e.to_string()))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// Parses a bank from JSON written by [`mpgtf_filterbank_to_json`] or the CLI.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_filterbank_from_json(json: *const c_char, out: *mut *mut MpgtfFilterbank) -> MpgtfStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(MpgtfStatus::Parse, e.to_string()))?;
        put(out, MpgtfFilterbank(Filterbank::from_json(text)?))
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Pseudo-inverse decoder for an analysis bank.
///
/// # Safety
/// `bank` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_decoder_pinv(bank: *const MpgtfFilterbank, out: *mut *mut MpgtfDecoder) -> MpgtfStatus {
    guard(|| put(out, MpgtfDecoder(pseudo_inverse_decoder(&handle(bank, "bank")?.0)?)))
}

/// # Safety
/// `dec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_decoder_free(dec: *mut MpgtfDecoder) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Encodes `len` samples at the bank's sample rate. Only complete frames
/// are kept.
///
/// # Safety
/// `samples` must be valid for `len` reads; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_encode(
    bank: *const MpgtfFilterbank,
    samples: *const f64,
    len: usize,
    frame_shift: usize,
    out: *mut *mut MpgtfEncoded,
) -> MpgtfStatus {
    guard(|| {
        let b = &handle(bank, "bank")?.0;
        let x = AudioSignal::new(slice(samples, len, "samples")?.to_vec(), b.sample_rate())?;
        put(out, MpgtfEncoded(encode(&x, b, frame_shift)?))
    })
}

/// # Safety
/// `enc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_encoded_free(enc: *mut MpgtfEncoded) {
    if !enc.is_null() {
        drop(Box::from_raw(enc));
    }
}

/// Rows of the encoding, 0 for NULL.
///
/// # Safety
/// `enc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_encoded_n_filters(enc: *const MpgtfEncoded) -> usize {
    enc.as_ref().map_or(0, |e| e.0.n_filters())
}

/// Frames of the encoding, 0 for NULL.
///
/// # Safety
/// `enc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_encoded_n_frames(enc: *const MpgtfEncoded) -> usize {
    enc.as_ref().map_or(0, |e| e.0.n_frames())
}

/// Copies the encoding, row-major, into `out` of exactly
/// `n_filters * n_frames` values.
///
/// # Safety
/// `enc` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_encoded_values(enc: *const MpgtfEncoded, out: *mut f64, len: usize) -> MpgtfStatus {
    guard(|| {
        let e = &handle(enc, "encoded")?.0;
        check_len(len, e.n_filters() * e.n_frames(), "values")?;
        copy_row_major(e.values(), slice_mut(out, len, "out")?);
        Ok(())
    })
}

/// Half-wave rectified copy of an encoding.
///
/// # Safety
/// `enc` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_rectify(enc: *const MpgtfEncoded, out: *mut *mut MpgtfEncoded) -> MpgtfStatus {
    guard(|| put(out, MpgtfEncoded(rectify(&handle(enc, "encoded")?.0))))
}

/// Multiplies an encoding by a non-negative mask given row-major with the
/// encoding's shape.
///
/// # Safety
/// `mask` must be valid for `len` reads; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_apply_mask(
    enc: *const MpgtfEncoded,
    mask: *const f64,
    len: usize,
    out: *mut *mut MpgtfEncoded,
) -> MpgtfStatus {
    guard(|| {
        let e = &handle(enc, "encoded")?.0;
        check_len(len, e.n_filters() * e.n_frames(), "mask")?;
        let m = DMatrix::from_row_slice(e.n_filters(), e.n_frames(), slice(mask, len, "mask")?);
        put(out, MpgtfEncoded(apply_mask(e, &Mask::new(m)?)?))
    })
}

/// Decodes with overlap-add into `out`, writing exactly `out_len` samples
/// (truncated or zero-padded).
///
/// # Safety
/// `out` must be valid for `out_len` writes; handles must be live.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_decode(
    enc: *const MpgtfEncoded,
    dec: *const MpgtfDecoder,
    out: *mut f64,
    out_len: usize,
) -> MpgtfStatus {
    guard(|| {
        let e = &handle(enc, "encoded")?.0;
        let d = &handle(dec, "decoder")?.0;
        let out = slice_mut(out, out_len, "out")?;
        out.copy_from_slice(decode(e, d, out_len)?.samples());
        Ok(())
    })
}

/// Scale-invariant SNR in dB of `estimate` against `reference`, both of
/// length `len`. A perfect estimate gives +infinity.
///
/// # Safety
/// Both arrays must be valid for `len` reads; `out_db` for one write.
#[no_mangle]
pub unsafe extern "C" fn mpgtf_si_snr(
    estimate: *const f64,
    reference: *const f64,
    len: usize,
    out_db: *mut f64,
) -> MpgtfStatus {
    guard(|| {
        let v = si_snr(slice(estimate, len, "estimate")?, slice(reference, len, "reference")?)?;
        if out_db.is_null() {
            return Err(null("out_db"));
        }
        *out_db = v;
        Ok(())
    })
}
