//! Adaptive Simpson quadrature with breakpoint pre-splitting.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Knobs for [`integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Absolute tolerance over the whole interval.
    pub tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Equal panels each breakpoint-free segment starts with.
    pub initial_panels: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { tol: 1e-12, max_depth: 30, initial_panels: 4 }
    }
}

impl QuadSettings {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Integrates `f` over `[a, b]`, splitting at every breakpoint strictly inside.
///
/// Breakpoints need not be sorted; duplicates and points outside `(a, b)` are
/// dropped. Kinks of the integrand must be listed here, otherwise the depth
/// cap is hit and [`Error::ToleranceNotMet`] is returned.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_with(f, a, b, breakpoints, QuadSettings::with_tol(tol))
}

pub fn integrate_with<F>(f: F, a: f64, b: f64, breakpoints: &[f64], settings: QuadSettings) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a <= b) {
        return Err(Error::InvalidArgument(alloc::format!("integration bounds [{a}, {b}]")));
    }
    if !(settings.tol > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("tolerance {}", settings.tol)));
    }
    if a == b {
        return Ok(0.0);
    }

    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(|x, y| x.total_cmp(y));
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let eval = |t: f64| -> Result<f64> {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { t })
        }
    };

    let width = b - a;
    let panels = settings.initial_panels.max(1);
    let mut acc = Accumulator::default();
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let h = (hi - lo) / panels as f64;
        let mut left = lo;
        let mut f_left = eval(lo)?;
        for k in 0..panels {
            let right = if k + 1 == panels { hi } else { lo + h * (k + 1) as f64 };
            let f_right = eval(right)?;
            let mid = 0.5 * (left + right);
            let f_mid = eval(mid)?;
            let whole = simpson(left, right, f_left, f_mid, f_right);
            let tol = settings.tol * (right - left) / width;
            adapt(&eval, Panel { a: left, b: right, fa: f_left, fm: f_mid, fb: f_right, whole }, tol, 0, settings.max_depth, &mut acc)?;
            left = right;
            f_left = f_right;
        }
    }

    if acc.failed {
        Err(Error::ToleranceNotMet { estimate: acc.sum, error_bound: acc.error })
    } else {
        Ok(acc.sum)
    }
}

#[derive(Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
    error: f64,
    failed: bool,
}

impl Accumulator {
    // Neumaier summation keeps thousands of tiny panels from drifting.
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn finish(&mut self) {
        self.sum += self.comp;
        self.comp = 0.0;
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adapt<E>(eval: &E, p: Panel, tol: f64, depth: u32, max_depth: u32, acc: &mut Accumulator) -> Result<()>
where
    E: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    let converged = delta.abs() <= 15.0 * tol
        // roundoff floor: below this the difference carries no information
        || delta.abs() <= 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if converged || depth >= max_depth {
        if !converged {
            acc.failed = true;
        }
        acc.add(left + right + delta / 15.0);
        acc.error += delta.abs() / 15.0;
        if depth == 0 {
            acc.finish();
        }
        return Ok(());
    }
    adapt(eval, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, 0.5 * tol, depth + 1, max_depth, acc)?;
    adapt(eval, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, 0.5 * tol, depth + 1, max_depth, acc)?;
    if depth == 0 {
        acc.finish();
    }
    Ok(())
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Five-point Gauss–Legendre rule on `[a, b]`; exact for degree ≤ 9.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES.iter().zip(GL5_WEIGHTS.iter()).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}
