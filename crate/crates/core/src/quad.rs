//! Adaptive quadrature: nested Gauss-Kronrod 7-15 in 1D and the tensor rule
//! on adaptively refined cells in 2D.
//!
//! Integrand closures return `Result`, so validity errors (off-surface,
//! characteristic point, domain errors) propagate out of the integrator
//! instead of being averaged into the answer. Cell/segment totals are
//! re-accumulated by pairwise summation at the end, which keeps results
//! deterministic and order-insensitive.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// 15 Kronrod nodes on [-1, 1], ascending.
static XGK: [f64; 15] = [
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];

/// Kronrod weights matching `XGK`.
static WGK: [f64; 15] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];

/// Weights of the embedded Gauss-7 rule, zero at Kronrod-only nodes.
static WG_FULL: [f64; 15] = [
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.129484966168869693270611432679082,
    0.0,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Hard cap on the number of segments/cells.
    pub max_cells: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs_tol: 1e-8,
            rel_tol: 1e-8,
            max_cells: 1 << 20,
        }
    }
}

impl QuadTol {
    /// Share the budget across `n` independent pieces of one integral.
    pub fn split(&self, n: usize) -> QuadTol {
        let n = n.max(1) as f64;
        QuadTol {
            abs_tol: self.abs_tol / n,
            rel_tol: self.rel_tol,
            max_cells: self.max_cells,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };

    pub fn accumulate(&mut self, other: QuadResult) {
        self.value += other.value;
        self.error += other.error;
        self.evaluations += other.evaluations;
    }
}

/// Pairwise summation; deterministic and stable for long cell lists.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for i in 0..15 {
        let v = f(center + half * XGK[i])?;
        kronrod += WGK[i] * v;
        gauss += WG_FULL[i] * v;
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Ok((value, err))
}

#[derive(Debug, Clone, Copy)]
struct Seg {
    err: f64,
    val: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Seg {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Seg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive 1D integral of `f` over [a, b].
pub fn integrate_1d<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: &QuadTol,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult::ZERO);
    }
    let mut evals = 15usize;
    let (v0, e0) = gk15(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Seg {
        err: e0,
        val: v0,
        a,
        b,
    });
    let mut total_val = v0;
    let mut total_err = e0;
    while total_err > tol.abs_tol.max(tol.rel_tol * total_val.abs()) {
        if heap.len() >= tol.max_cells {
            return Err(Error::IntegrationBudget {
                cells: heap.len(),
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty while error is positive");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; keep its estimate.
            total_err -= worst.err;
            heap.push(Seg { err: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, mid)?;
        let (v2, e2) = gk15(f, mid, worst.b)?;
        evals += 30;
        total_val += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Seg {
            err: e1,
            val: v1,
            a: worst.a,
            b: mid,
        });
        heap.push(Seg {
            err: e2,
            val: v2,
            a: mid,
            b: worst.b,
        });
    }
    let mut segs: Vec<Seg> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let vals: Vec<f64> = segs.iter().map(|s| s.val).collect();
    let errs: Vec<f64> = segs.iter().map(|s| s.err).collect();
    Ok(QuadResult {
        value: pairwise_sum(&vals),
        error: pairwise_sum(&errs),
        evaluations: evals,
    })
}

/// Axis-aligned rectangle in parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0 || self.y1 <= self.y0
    }
}

fn gk15_2d<F: FnMut(f64, f64) -> Result<f64>>(f: &mut F, r: Rect) -> Result<(f64, f64)> {
    let cx = 0.5 * (r.x0 + r.x1);
    let hx = 0.5 * (r.x1 - r.x0);
    let cy = 0.5 * (r.y0 + r.y1);
    let hy = 0.5 * (r.y1 - r.y0);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for i in 0..15 {
        let x = cx + hx * XGK[i];
        let mut krow = 0.0;
        let mut grow = 0.0;
        for j in 0..15 {
            let v = f(x, cy + hy * XGK[j])?;
            krow += WGK[j] * v;
            grow += WG_FULL[j] * v;
        }
        kron += WGK[i] * krow;
        gauss += WG_FULL[i] * grow;
    }
    let scale = hx * hy;
    Ok((kron * scale, ((kron - gauss) * scale).abs()))
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    err: f64,
    val: f64,
    rect: Rect,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive 2D integral of `f` over a rectangle, refining the worst cell
/// into quadrants until the summed error estimate meets the tolerance.
pub fn integrate_2d<F: FnMut(f64, f64) -> Result<f64>>(
    f: &mut F,
    rect: Rect,
    tol: &QuadTol,
) -> Result<QuadResult> {
    if rect.is_empty() {
        return Ok(QuadResult::ZERO);
    }
    let mut evals = 225usize;
    let (v0, e0) = gk15_2d(f, rect)?;
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        err: e0,
        val: v0,
        rect,
    });
    let mut total_val = v0;
    let mut total_err = e0;
    while total_err > tol.abs_tol.max(tol.rel_tol * total_val.abs()) {
        if heap.len() >= tol.max_cells {
            return Err(Error::IntegrationBudget {
                cells: heap.len(),
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty while error is positive");
        let r = worst.rect;
        let mx = 0.5 * (r.x0 + r.x1);
        let my = 0.5 * (r.y0 + r.y1);
        if mx <= r.x0 || mx >= r.x1 || my <= r.y0 || my >= r.y1 {
            total_err -= worst.err;
            heap.push(Cell { err: 0.0, ..worst });
            continue;
        }
        total_val -= worst.val;
        total_err -= worst.err;
        for quad in [
            Rect::new(r.x0, mx, r.y0, my),
            Rect::new(mx, r.x1, r.y0, my),
            Rect::new(r.x0, mx, my, r.y1),
            Rect::new(mx, r.x1, my, r.y1),
        ] {
            let (v, e) = gk15_2d(f, quad)?;
            evals += 225;
            total_val += v;
            total_err += e;
            heap.push(Cell {
                err: e,
                val: v,
                rect: quad,
            });
        }
    }
    let mut cells: Vec<Cell> = heap.into_vec();
    cells.sort_by(|a, b| {
        a.rect
            .x0
            .total_cmp(&b.rect.x0)
            .then(a.rect.y0.total_cmp(&b.rect.y0))
    });
    let vals: Vec<f64> = cells.iter().map(|c| c.val).collect();
    let errs: Vec<f64> = cells.iter().map(|c| c.err).collect();
    Ok(QuadResult {
        value: pairwise_sum(&vals),
        error: pairwise_sum(&errs),
        evaluations: evals,
    })
}

/// Subtract an axis-aligned box from a rectangle, returning the up-to-four
/// rectangles that remain.
pub fn rect_subtract(r: Rect, cut: Rect) -> Vec<Rect> {
    let ix0 = r.x0.max(cut.x0);
    let ix1 = r.x1.min(cut.x1);
    let iy0 = r.y0.max(cut.y0);
    let iy1 = r.y1.min(cut.y1);
    if ix0 >= ix1 || iy0 >= iy1 {
        return vec![r];
    }
    let mut out = Vec::new();
    let mut push = |rect: Rect| {
        if !rect.is_empty() {
            out.push(rect);
        }
    };
    push(Rect::new(r.x0, ix0, r.y0, r.y1));
    push(Rect::new(ix1, r.x1, r.y0, r.y1));
    push(Rect::new(ix0, ix1, r.y0, iy0));
    push(Rect::new(ix0, ix1, iy1, r.y1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> QuadTol {
        QuadTol::default()
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = WGK.iter().sum();
        let g: f64 = WG_FULL.iter().sum();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_is_integrated_exactly() {
        let mut f = |x: f64| Ok(x.powi(10) - 3.0 * x.powi(3) + 1.0);
        let r = integrate_1d(&mut f, -1.0, 2.0, &tol()).unwrap();
        // Antiderivative x^11/11 − 3x^4/4 + x evaluated at the ends.
        let exact = (2048.0f64 / 11.0 - 12.0 + 2.0) - (-1.0f64 / 11.0 - 0.75 - 1.0);
        assert!((r.value - exact).abs() < 1e-12, "{} vs {}", r.value, exact);
    }

    #[test]
    fn oscillatory_integral_converges() {
        let mut f = |x: f64| Ok((10.0 * x).sin());
        let r = integrate_1d(&mut f, 0.0, std::f64::consts::PI, &tol()).unwrap();
        let exact = (1.0 - (10.0 * std::f64::consts::PI).cos()) / 10.0;
        assert!((r.value - exact).abs() < 1e-10);
        assert!(r.error < 1e-7);
    }

    #[test]
    fn integrand_errors_propagate() {
        let mut f = |x: f64| {
            if x > 0.5 {
                Err(crate::error::Error::DegenerateDenominator { t: x })
            } else {
                Ok(x)
            }
        };
        assert!(integrate_1d(&mut f, 0.0, 1.0, &tol()).is_err());
    }

    #[test]
    fn separable_2d_integral() {
        let mut f = |x: f64, y: f64| Ok(x * x * y.sin());
        let r = integrate_2d(
            &mut f,
            Rect::new(0.0, 1.0, 0.0, std::f64::consts::PI),
            &tol(),
        )
        .unwrap();
        let exact = (1.0 / 3.0) * 2.0;
        assert!((r.value - exact).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn peaked_2d_integrand_is_refined() {
        // Narrow Gaussian bump: forces adaptive subdivision.
        let mut f = |x: f64, y: f64| {
            let d2 = (x - 0.3) * (x - 0.3) + (y - 0.7) * (y - 0.7);
            Ok((-d2 / 1e-3).exp())
        };
        let r = integrate_2d(&mut f, Rect::new(0.0, 1.0, 0.0, 1.0), &tol()).unwrap();
        let exact = std::f64::consts::PI * 1e-3; // whole-plane integral; tails negligible
        assert!(
            (r.value - exact).abs() < 1e-9,
            "{} vs {}",
            r.value,
            exact
        );
    }

    #[test]
    fn rect_subtraction_partitions_area() {
        let r = Rect::new(0.0, 4.0, 0.0, 3.0);
        let cut = Rect::new(1.0, 2.0, 1.0, 2.0);
        let parts = rect_subtract(r, cut);
        let total: f64 = parts.iter().map(|p| p.area()).sum();
        assert!((total - (r.area() - cut.area())).abs() < 1e-14);
        // Non-overlapping box leaves the rectangle untouched.
        let parts = rect_subtract(r, Rect::new(10.0, 11.0, 0.0, 1.0));
        assert_eq!(parts, vec![r]);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs = [0.1, 0.2, 0.3, 0.4, 0.5];
        assert!((pairwise_sum(&xs) - 1.5).abs() < 1e-15);
    }
}
