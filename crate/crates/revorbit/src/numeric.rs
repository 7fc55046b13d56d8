//! Shared numerical kernels: adaptive Gauss–Kronrod quadrature, bracketed
//! root finding and central finite-difference stencils.

use crate::error::{Error, Result};

// 15-point Kronrod nodes with the embedded 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_8,
    0.140_653_259_715_525_918_8,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_4,
    0.209_482_141_084_727_828_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_9,
    0.417_959_183_673_469_387_8,
];

/// One Gauss–Kronrod panel on [a, b]: returns (kronrod, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];

    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            // odd Kronrod indices are the embedded Gauss nodes
            gauss += WG[j / 2] * fsum;
        }
    }

    (kronrod * half, (kronrod - gauss).abs() * half.abs())
}

/// Adaptive quadrature of `f` over [a, b] to absolute tolerance `abs_tol`.
///
/// Panels are split recursively with a tolerance budget proportional to
/// their width. Endpoints are never evaluated (all Kronrod nodes are
/// interior), which lets integrands with removable endpoint behaviour
/// pass through without special casing.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut state = QuadState {
        total: 0.0,
        unresolved: 0.0,
        min_width: (b - a).abs() * 1e-14,
        // hard cap on work: past this the remaining error is reported, not chased
        panels_left: 40_000,
    };
    recurse(f, a, b, abs_tol, 0, &mut state);
    if state.unresolved > abs_tol.max(1e-15 * state.total.abs()) || state.total.is_nan() {
        return Err(Error::QuadratureFailure {
            tol: abs_tol,
            estimate: state.unresolved,
        });
    }
    Ok(state.total)
}

struct QuadState {
    total: f64,
    unresolved: f64,
    min_width: f64,
    panels_left: u32,
}

fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32, state: &mut QuadState) {
    let (value, err) = gk15(f, a, b);
    state.panels_left = state.panels_left.saturating_sub(1);
    if err <= tol || err <= 1e-16 * value.abs() {
        state.total += value;
        return;
    }
    if depth >= 52
        || (b - a).abs() <= state.min_width
        || state.panels_left == 0
        || err.is_nan()
    {
        state.total += value;
        state.unresolved += if err.is_nan() { f64::INFINITY } else { err };
        return;
    }
    let mid = 0.5 * (a + b);
    recurse(f, a, mid, 0.5 * tol, depth + 1, state);
    recurse(f, mid, b, 0.5 * tol, depth + 1, state);
}

/// Refine a bracketing interval by bisection until it collapses to
/// floating-point resolution. The endpoints may come in either order.
pub fn bisect<F: Fn(f64) -> Option<f64>>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let flo = match f(lo) {
        Some(v) => v,
        None => return 0.5 * (lo + hi),
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval is one ulp wide
        }
        match f(mid) {
            Some(fm) => {
                if (fm > 0.0) == (flo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            None => hi = mid, // shrink toward the evaluable side
        }
    }
    0.5 * (lo + hi)
}

/// Scan `cells` uniform cells of [lo, hi] for sign changes of `f` and
/// refine each to a root. Cells where `f` is not evaluable are skipped.
pub fn scan_roots<F: Fn(f64) -> Option<f64>>(f: &F, lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / cells as f64;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=cells {
        let u = lo + step * i as f64;
        let value = f(u);
        if let (Some((u_prev, f_prev)), Some(v)) = (prev, value) {
            if f_prev == 0.0 {
                roots.push(u_prev);
            } else if f_prev * v < 0.0 {
                roots.push(bisect(f, u_prev, u));
            }
        }
        prev = value.map(|v| (u, v));
    }
    if let Some((u_last, f_last)) = prev {
        if f_last == 0.0 {
            roots.push(u_last);
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < step * 1e-9);
    roots
}

/// Central finite-difference first derivative, O(h^4) five-point stencil.
pub fn fd_first<F: Fn(f64) -> Option<f64>>(f: &F, x: f64, h: f64) -> Option<f64> {
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    Some((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h))
}

/// Central finite-difference second derivative, O(h^4) five-point stencil.
pub fn fd_second<F: Fn(f64) -> Option<f64>>(f: &F, x: f64, h: f64) -> Option<f64> {
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let c = f(x)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    Some((-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h))
}
