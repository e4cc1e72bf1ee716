//! C ABI for `unigen`.
//!
//! Objects cross the boundary as opaque handles. Each is released by the
//! matching `*_free` function. Every fallible function
//! returns a status code (`UNIGEN_OK` on success) and writes its result
//! through an out-pointer; on failure [`unigen_last_error_message`] describes
//! what went wrong on the calling thread.
//!
//! Matrices are passed as `2·d·d` doubles: row-major, each entry as `re, im`.
//! Generator indices in letters are zero-based.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use unigen::algebra::{bracket_closure, ClosureConfig, GeneratorSet};
use unigen::chart::SolverConfig;
use unigen::completion::{complete_basis, rk_schedule, CompletedBasis, CompletionConfig};
use unigen::error::Error;
use unigen::io::{parse_str, to_canonical_checked, NetFile, ProblemFile, WordFile};
use unigen::lift::{lift_word_nonneg, RecurrenceConfig};
use unigen::matrix::{mat_distance, GroupElement, Matrix, Tolerances};
use unigen::net::{build_net, synthesize, CoverNet, NetConfig};
use unigen::word::{group_of, replay, GeneratorWord};

pub const UNIGEN_OK: i32 = 0;
pub const UNIGEN_ERR_IO: i32 = 1;
pub const UNIGEN_ERR_INVALID_INPUT: i32 = 2;
pub const UNIGEN_ERR_NOT_GENERATING: i32 = 3;
pub const UNIGEN_ERR_NO_CONVERGENCE: i32 = 4;
pub const UNIGEN_ERR_COVERAGE_NOT_REACHED: i32 = 5;
pub const UNIGEN_ERR_BUDGET_EXHAUSTED: i32 = 6;
pub const UNIGEN_ERR_NULL_ARGUMENT: i32 = 8;
pub const UNIGEN_ERR_PANIC: i32 = 9;
pub const UNIGEN_ERR_OUT_OF_RANGE: i32 = 10;

/// Validated generators.
pub struct UnigenProblem {
    file: ProblemFile,
    gens: GeneratorSet,
}

/// Generators completed to a basis of their algebra.
pub struct UnigenBasis {
    basis: CompletedBasis,
}

/// A validated epsilon-net.
pub struct UnigenNet {
    net: CoverNet,
}

/// A word over the generators with the error it achieved against its target.
pub struct UnigenWord {
    word: GeneratorWord,
    stated_error: f64,
    nonnegative: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn unigen_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

/// The CLI exit code, except that index errors get their own status.
fn status_of(e: &Error) -> i32 {
    match e {
        Error::IndexOutOfRange { .. } => UNIGEN_ERR_OUT_OF_RANGE,
        _ => e.exit_code(),
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> i32 {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UNIGEN_OK,
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is NULL"));
            UNIGEN_ERR_NULL_ARGUMENT
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            UNIGEN_ERR_PANIC
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| {
        Failure::Core(Error::Parse {
            context: what.into(),
            message: e.to_string(),
        })
    })
}

fn into_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure::Core(Error::InvalidConfig(e.to_string())))
}

unsafe fn read_matrix(data: *const f64, len: usize, dim: usize) -> FfiResult<Matrix> {
    if data.is_null() {
        return Err(Failure::Null("matrix data"));
    }
    if len != 2 * dim * dim {
        return Err(Error::DimMismatch {
            expected: 2 * dim * dim,
            found: len,
        }
        .into());
    }
    let s = std::slice::from_raw_parts(data, len);
    Ok(Matrix::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * dim + j);
        Complex64::new(s[k], s[k + 1])
    }))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Parses a problem document (`dim`, `structure`, `generators`, ...).
#[no_mangle]
pub unsafe extern "C" fn unigen_problem_from_json(json: *const c_char, out: *mut *mut UnigenProblem) -> i32 {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let text = c_str(json, "json")?;
        let file: ProblemFile = parse_str(text, "problem")?;
        let gens = file.to_generators(&Tolerances::default())?;
        *out = boxed(UnigenProblem { file, gens });
        Ok(())
    })
}

/// One of the bundled demos: `su2_pauli_pair`, `su3_gellmann_pair`,
/// `so3_rotations`.
#[no_mangle]
pub unsafe extern "C" fn unigen_problem_demo(name: *const c_char, out: *mut *mut UnigenProblem) -> i32 {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let name = c_str(name, "name")?;
        let (gens, dim) = unigen::demos::demo(name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown demo {name:?}")))?;
        let file = ProblemFile::from_generators(&gens, Some(dim));
        *out = boxed(UnigenProblem { file, gens });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn unigen_problem_free(p: *mut UnigenProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Matrix size `d` and generator count `m`.
#[no_mangle]
pub unsafe extern "C" fn unigen_problem_shape(p: *const UnigenProblem, dim: *mut usize, count: *mut usize) -> i32 {
    guard(|| {
        let p = deref(p, "problem")?;
        *out_ptr(dim, "dim")? = p.gens.dim();
        *out_ptr(count, "count")? = p.gens.len();
        Ok(())
    })
}

/// Dimension of the Lie algebra spanned by the generators and their
/// iterated brackets.
#[no_mangle]
pub unsafe extern "C" fn unigen_problem_closure_dim(p: *const UnigenProblem, out: *mut usize) -> i32 {
    guard(|| {
        let p = deref(p, "problem")?;
        let out = out_ptr(out, "out")?;
        *out = bracket_closure(&p.gens, &ClosureConfig::default())?.dim_algebra;
        Ok(())
    })
}

/// Word-length bound for an `n`-dimensional algebra with `m` generators.
#[no_mangle]
pub unsafe extern "C" fn unigen_bound(n: usize, m: usize, out: *mut u64) -> i32 {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = rk_schedule(n, m)?.bound;
        Ok(())
    })
}

/// Completes the generators to a basis. Fails with
/// `UNIGEN_ERR_NOT_GENERATING` if the problem declares an algebra dimension
/// the generators do not reach.
#[no_mangle]
pub unsafe extern "C" fn unigen_basis_complete(p: *const UnigenProblem, out: *mut *mut UnigenBasis) -> i32 {
    guard(|| {
        let p = deref(p, "problem")?;
        let out = out_ptr(out, "out")?;
        let alg = bracket_closure(&p.gens, &ClosureConfig::default())?;
        if let Some(expected) = p.file.expected_algebra_dim {
            if alg.dim_algebra != expected {
                return Err(Error::NotGenerating {
                    closure_dim: alg.dim_algebra,
                    expected,
                }
                .into());
            }
        }
        let basis = complete_basis(&p.gens, &alg, &CompletionConfig::default())?;
        *out = boxed(UnigenBasis { basis });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn unigen_basis_free(b: *mut UnigenBasis) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Basis size `n` and the worst-case chart word length.
#[no_mangle]
pub unsafe extern "C" fn unigen_basis_info(b: *const UnigenBasis, n: *mut usize, bound: *mut u64) -> i32 {
    guard(|| {
        let b = deref(b, "basis")?;
        *out_ptr(n, "n")? = b.basis.n();
        *out_ptr(bound, "bound")? = b.basis.schedule().bound;
        Ok(())
    })
}

/// Builds a validated net of the given radius. Random choices are fully
/// determined by `seed`.
#[no_mangle]
pub unsafe extern "C" fn unigen_net_build(
    b: *const UnigenBasis,
    radius: f64,
    seed: u64,
    out: *mut *mut UnigenNet,
) -> i32 {
    guard(|| {
        let b = deref(b, "basis")?;
        let out = out_ptr(out, "out")?;
        let cfg = NetConfig {
            seed,
            ..NetConfig::default()
        };
        let net = build_net(&b.basis, radius, &cfg)?;
        *out = boxed(UnigenNet { net });
        Ok(())
    })
}

/// Loads a net cache written by [`unigen_net_to_json`] or the CLI, checking
/// it against the basis generators.
#[no_mangle]
pub unsafe extern "C" fn unigen_net_from_json(
    b: *const UnigenBasis,
    json: *const c_char,
    out: *mut *mut UnigenNet,
) -> i32 {
    guard(|| {
        let b = deref(b, "basis")?;
        let out = out_ptr(out, "out")?;
        let file: NetFile = parse_str(c_str(json, "json")?, "net")?;
        let net = file.into_net(b.basis.generators(), 1e-9)?;
        *out = boxed(UnigenNet { net });
        Ok(())
    })
}

/// Serializes the net; release the string with [`unigen_string_free`].
#[no_mangle]
pub unsafe extern "C" fn unigen_net_to_json(b: *const UnigenBasis, n: *const UnigenNet, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let b = deref(b, "basis")?;
        let n = deref(n, "net")?;
        let out = out_ptr(out, "out")?;
        let file = NetFile::new(b.basis.generators(), n.net.clone());
        *out = into_c_string(to_canonical_checked(&file)?)?;
        Ok(())
    })
}

/// Number of points and the longest point word.
#[no_mangle]
pub unsafe extern "C" fn unigen_net_info(n: *const UnigenNet, points: *mut usize, max_word_len: *mut usize) -> i32 {
    guard(|| {
        let n = deref(n, "net")?;
        *out_ptr(points, "points")? = n.net.len();
        *out_ptr(max_word_len, "max_word_len")? = n.net.max_word_len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn unigen_net_free(n: *mut UnigenNet) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

/// Writes `target` as a word whose replay is within `tol` of it.
#[no_mangle]
pub unsafe extern "C" fn unigen_synthesize(
    b: *const UnigenBasis,
    n: *const UnigenNet,
    target: *const f64,
    target_len: usize,
    tol: f64,
    out: *mut *mut UnigenWord,
) -> i32 {
    guard(|| {
        let b = deref(b, "basis")?;
        let n = deref(n, "net")?;
        let out = out_ptr(out, "out")?;
        let gens = b.basis.generators();
        let m = read_matrix(target, target_len, gens.dim())?;
        let solver = SolverConfig {
            final_tol_total: tol,
            ..SolverConfig::default()
        };
        let target = GroupElement::with_tol(m, group_of(gens), solver.tolerances.group_tol)?;
        let r = synthesize(&target, &n.net, &b.basis, &solver)?;
        *out = boxed(UnigenWord {
            word: r.word,
            stated_error: r.target_error,
            nonnegative: false,
        });
        Ok(())
    })
}

/// Replaces every negative time by a nonnegative one with the same
/// exponential up to `per_factor_tol`. The new word's stated error is the
/// old one plus the accumulated lift error.
#[no_mangle]
pub unsafe extern "C" fn unigen_word_lift_nonneg(
    b: *const UnigenBasis,
    w: *const UnigenWord,
    per_factor_tol: f64,
    out: *mut *mut UnigenWord,
) -> i32 {
    guard(|| {
        let b = deref(b, "basis")?;
        let w = deref(w, "word")?;
        let out = out_ptr(out, "out")?;
        let lifted = lift_word_nonneg(
            &w.word.letters,
            b.basis.generators(),
            per_factor_tol,
            &RecurrenceConfig::default(),
        )?;
        let stated_error = w.stated_error + lifted.lift_error;
        let word = lifted.into_word(w.word.meta.bound_used, w.word.meta.product_error);
        *out = boxed(UnigenWord {
            word,
            stated_error,
            nonnegative: true,
        });
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn unigen_word_len(w: *const UnigenWord, out: *mut usize) -> i32 {
    guard(|| {
        *out_ptr(out, "out")? = deref(w, "word")?.word.len();
        Ok(())
    })
}

/// Letter `index`: zero-based generator index and time.
#[no_mangle]
pub unsafe extern "C" fn unigen_word_letter(
    w: *const UnigenWord,
    index: usize,
    generator: *mut usize,
    time: *mut f64,
) -> i32 {
    guard(|| {
        let w = deref(w, "word")?;
        let l = w.word.letters.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: w.word.len(),
        })?;
        *out_ptr(generator, "generator")? = l.generator;
        *out_ptr(time, "time")? = l.time;
        Ok(())
    })
}

/// Error bound stated for the word against its target.
#[no_mangle]
pub unsafe extern "C" fn unigen_word_stated_error(w: *const UnigenWord, out: *mut f64) -> i32 {
    guard(|| {
        *out_ptr(out, "out")? = deref(w, "word")?.stated_error;
        Ok(())
    })
}

/// Frobenius distance between the replayed word and `target`.
#[no_mangle]
pub unsafe extern "C" fn unigen_word_replay_error(
    b: *const UnigenBasis,
    w: *const UnigenWord,
    target: *const f64,
    target_len: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let b = deref(b, "basis")?;
        let w = deref(w, "word")?;
        let out = out_ptr(out, "out")?;
        let gens = b.basis.generators();
        let t = read_matrix(target, target_len, gens.dim())?;
        *out = mat_distance(replay(&w.word.letters, gens)?.mat(), &t);
        Ok(())
    })
}

/// Serializes the word in the CLI's word-file format.
#[no_mangle]
pub unsafe extern "C" fn unigen_word_to_json(w: *const UnigenWord, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let w = deref(w, "word")?;
        let out = out_ptr(out, "out")?;
        let file = WordFile {
            word: w.word.clone(),
            stated_error: w.stated_error,
            nonnegative: w.nonnegative,
        };
        *out = into_c_string(to_canonical_checked(&file)?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn unigen_word_free(w: *mut UnigenWord) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn unigen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
