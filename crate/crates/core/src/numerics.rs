//! Quadrature and root finding used by the optimality conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-14) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
                reason: "must be finite and at least 1e-14",
            });
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                value: self.abs_tol,
                reason: "must be finite and positive",
            });
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter {
                name: "max_subdivisions",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

// 21-point Gauss-Kronrod abscissae and weights (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_930_416_611,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
// 10-point Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = fc.abs() * WGK[10];
    let mut gauss = 0.0;
    let mut fv = [0.0; 20];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && error < floor {
        error = floor;
    }
    Panel {
        lo,
        hi,
        value,
        error,
    }
}

/// Adaptive Gauss-Kronrod quadrature on a finite interval, returning the
/// value and its error estimate. `budget` counts bisections.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    budget: &mut usize,
) -> Result<(f64, f64)> {
    let mut panels = vec![gauss_kronrod(f, lo, hi)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::ToleranceNotMet {
                subdivisions: panels.len(),
                estimate: value,
                error,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok((value, error));
        }
        if *budget == 0 {
            return Err(Error::ToleranceNotMet {
                subdivisions: panels.len(),
                estimate: value,
                error,
            });
        }
        *budget -= 1;
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if !(mid > p.lo && mid < p.hi) {
            // Interval has collapsed to adjacent floats.
            return Err(Error::ToleranceNotMet {
                subdivisions: panels.len() + 1,
                estimate: value,
                error,
            });
        }
        panels.push(gauss_kronrod(f, p.lo, mid));
        panels.push(gauss_kronrod(f, mid, p.hi));
    }
}

/// `∫_lo^hi f` by adaptive 21-point Gauss-Kronrod. Returns 0 for an empty
/// range and the negated integral when `hi < lo`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadSpec) -> Result<f64> {
    spec.validate()?;
    if lo == hi {
        return Ok(0.0);
    }
    if hi < lo {
        return integrate(f, hi, lo, spec).map(|v| -v);
    }
    let mut budget = spec.max_subdivisions;
    adaptive(&f, lo, hi, spec.rel_tol, spec.abs_tol, &mut budget).map(|(v, _)| v)
}

/// `∫_a^∞ f` for an integrand obeying `|f(z)| <= |f(t)| e^{-decay (z - t)}`
/// for all `z >= t >= a`.
///
/// The range is covered by panels of width `4/decay`; integration stops at
/// the first right end `t` where the envelope bound `|f(t)|/decay` on the
/// remaining tail falls below half of the requested tolerance.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, a: f64, decay: f64, spec: &QuadSpec) -> Result<f64> {
    spec.validate()?;
    if !(decay > 0.0) || !decay.is_finite() {
        return Err(Error::InvalidParameter {
            name: "decay",
            value: decay,
            reason: "decay rate must be finite and positive",
        });
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "lower limit must be finite",
        });
    }
    const MAX_PANELS: usize = 4096;
    let width = 4.0 / decay;
    let mut budget = spec.max_subdivisions;
    let mut total = 0.0;
    let mut error = 0.0;
    for k in 0..MAX_PANELS {
        let lo = a + k as f64 * width;
        let hi = lo + width;
        let (value, err) = adaptive(&f, lo, hi, spec.rel_tol, spec.abs_tol, &mut budget)?;
        total += value;
        error += err;
        let tail = f(hi).abs() / decay;
        if !tail.is_finite() {
            break;
        }
        if tail <= 0.5 * (spec.rel_tol * total.abs() + spec.abs_tol) {
            return Ok(total);
        }
    }
    Err(Error::ToleranceNotMet {
        subdivisions: spec.max_subdivisions - budget,
        estimate: total,
        error,
    })
}

/// Outcome of a sign-change search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub root: f64,
    /// `h(root)`.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Set when `h(lo) <= 0`, i.e. the optimum sits at the lower end.
    pub boundary_case: bool,
}

/// Locates the single `+ -> -` sign change of `h` on `[lo, ∞)`.
///
/// When `h(lo) <= 0` the lower end is returned with `boundary_case` set.
/// Otherwise the upper end grows as `hi <- max(1, 2 hi)` until `h(hi) < 0`
/// (failing once `hi > hi_limit`) and Brent's method refines the bracket to
/// width `tol`.
pub fn find_root_decreasing_sign<F: Fn(f64) -> f64>(
    h: F,
    lo: f64,
    tol: f64,
    hi_limit: f64,
) -> Result<RootReport> {
    if !(lo >= 0.0) || !lo.is_finite() {
        return Err(Error::InvalidParameter {
            name: "lo",
            value: lo,
            reason: "lower end must be finite and nonnegative",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "tolerance must be positive",
        });
    }
    let f_lo = h(lo);
    if f_lo.is_nan() {
        return Err(Error::BracketFailure { lo, hi: lo });
    }
    if f_lo <= 0.0 {
        return Ok(RootReport {
            root: lo,
            residual: f_lo,
            bracket: (lo, lo),
            iterations: 0,
            boundary_case: true,
        });
    }

    let (mut a, mut fa) = (lo, f_lo);
    let mut b = lo;
    let mut fb;
    let mut iterations = 0;
    loop {
        b = (2.0 * b).max(1.0);
        if b > hi_limit {
            return Err(Error::BracketFailure { lo, hi: b });
        }
        fb = h(b);
        iterations += 1;
        if fb.is_nan() {
            return Err(Error::BracketFailure { lo: a, hi: b });
        }
        if fb < 0.0 {
            break;
        }
        a = b;
        fa = fb;
    }
    let bracket = (a, b);
    let (root, residual, brent_iters) = brent(&h, a, fa, b, fb, tol);
    Ok(RootReport {
        root,
        residual,
        bracket,
        iterations: iterations + brent_iters,
        boundary_case: false,
    })
}

// Brent's method (Numerical Recipes `zbrent`) on a bracket with fa > 0 > fb.
fn brent<F: Fn(f64) -> f64>(
    h: &F,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    tol: f64,
) -> (f64, f64, usize) {
    const MAX_ITER: usize = 200;
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITER {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return (b, fb, iter);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = h(b);
    }
    (b, fb, MAX_ITER)
}
