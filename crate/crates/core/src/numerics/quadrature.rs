//! Adaptive Gauss–Kronrod quadrature over finite intervals, half-lines and
//! the positive quadrant.
//!
//! Every panel is integrated with the 10-point Gauss / 21-point Kronrod pair;
//! the panel with the largest error estimate is bisected until the global
//! estimate meets the tolerance. Half-lines are mapped onto `(0, 1)` with
//! `x = lower + u / (1 - u)`. The initial partition is graded geometrically
//! toward both ends of the interval so integrable endpoint singularities are
//! resolved early.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value of a definite integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: usize,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_TOL_1D,
            abs_tol: 0.0,
            max_evaluations: 2_000_000,
        }
    }
}

pub const DEFAULT_TOL_1D: f64 = 1e-8;
pub const DEFAULT_TOL_2D: f64 = 1e-6;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_720_392_939_856,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() || !fc.is_finite() {
        return Err(Error::Quadrature {
            message: format!("non-finite integrand on [{a}, {b}]"),
            partial: QuadratureResult {
                value: f64::NAN,
                abs_error_estimate: f64::INFINITY,
                evaluations: 21,
            },
        });
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    })
}

/// Initial breakpoints on `[a, b]`, graded geometrically toward both ends.
fn graded_partition(a: f64, b: f64) -> Vec<f64> {
    let fractions = [0.0, 1.0 / 256.0, 1.0 / 64.0, 1.0 / 16.0, 0.25, 0.5];
    let width = b - a;
    let mut pts: Vec<f64> = fractions.iter().map(|t| a + t * width).collect();
    pts.extend(fractions.iter().rev().skip(1).map(|t| b - t * width));
    pts
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadratureResult> {
    if !(opts.rel_tol > 0.0) && !(opts.abs_tol > 0.0) {
        return Err(Error::domain("quadrature tolerance must be positive"));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate needs finite limits"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        });
    }
    if a > b {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadratureResult {
            value: -r.value,
            ..r
        });
    }

    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Panel> = Vec::new();
    let mut evaluations = 0usize;
    for w in graded_partition(a, b).windows(2) {
        heap.push(kronrod21(&f, w[0], w[1])?);
        evaluations += 21;
    }

    loop {
        let (value, error, abs_value) = heap
            .iter()
            .chain(settled.iter())
            .fold((0.0, 0.0, 0.0), |(v, e, s), p| (v + p.value, e + p.error, s + p.abs_value));
        let target = (opts.rel_tol * value.abs()).max(opts.abs_tol);
        let roundoff = 50.0 * f64::EPSILON * abs_value;
        if error <= target || error <= roundoff || heap.is_empty() {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        if evaluations >= opts.max_evaluations {
            return Err(Error::Quadrature {
                message: format!("evaluation budget {} exhausted", opts.max_evaluations),
                partial: QuadratureResult {
                    value,
                    abs_error_estimate: error,
                    evaluations,
                },
            });
        }
        // Bisect a batch of the worst panels before re-summing.
        for _ in 0..16 {
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                settled.push(worst);
                continue;
            }
            heap.push(kronrod21(&f, worst.a, mid)?);
            heap.push(kronrod21(&f, mid, worst.b)?);
            evaluations += 42;
        }
    }
}

/// Adaptive integration of `f` over `(lower, ∞)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, lower: f64, opts: QuadOptions) -> Result<QuadratureResult> {
    if !lower.is_finite() {
        return Err(Error::domain("lower limit must be finite"));
    }
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        let x = lower + u / one_minus;
        if x.is_infinite() {
            return 0.0;
        }
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx / (one_minus * one_minus)
        }
    };
    integrate(mapped, 0.0, 1.0, opts)
}

/// Iterated integration of `f2(t1, t2)` over `(0, ∞)²`.
///
/// The inner integrals run at a tenth of the requested tolerance; the
/// reported error adds the outer estimate to the worst inner relative error
/// applied to the total.
pub fn integrate_quadrant<F: Fn(f64, f64) -> f64>(f2: F, opts: QuadOptions) -> Result<QuadratureResult> {
    let inner_opts = QuadOptions {
        rel_tol: opts.rel_tol * 0.1,
        abs_tol: opts.abs_tol * 0.1,
        max_evaluations: opts.max_evaluations,
    };
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_evals = RefCell::new(0usize);
    let worst_inner_rel = RefCell::new(0.0f64);

    let outer = integrate_semi_infinite(
        |t1| {
            if inner_failure.borrow().is_some() {
                return 0.0;
            }
            match integrate_semi_infinite(|t2| f2(t1, t2), 0.0, inner_opts) {
                Ok(r) => {
                    *inner_evals.borrow_mut() += r.evaluations;
                    if r.value != 0.0 {
                        let rel = r.abs_error_estimate / r.value.abs();
                        let mut w = worst_inner_rel.borrow_mut();
                        *w = w.max(rel);
                    }
                    r.value
                }
                Err(e) => {
                    *inner_failure.borrow_mut() = Some(e);
                    0.0
                }
            }
        },
        0.0,
        opts,
    );

    let inner_evals = inner_evals.into_inner();
    if let Some(e) = inner_failure.into_inner() {
        return Err(match e {
            Error::Quadrature { message, partial } => Error::Quadrature {
                message: format!("inner integral: {message}"),
                partial,
            },
            other => other,
        });
    }
    let outer = outer?;
    let value = outer.value;
    Ok(QuadratureResult {
        value,
        abs_error_estimate: outer.abs_error_estimate + worst_inner_rel.into_inner() * value.abs(),
        evaluations: outer.evaluations.max(1) + inner_evals,
    })
}
