use alloc::vec::Vec;

use super::grid;

/// Scan resolution used by [`find_roots`]. Profiles in scope oscillate at most a
/// handful of times on `[0, 1]`; use [`find_roots_with`] for anything finer.
pub const ROOT_SCAN_PANELS: usize = 1024;

/// Sign-change roots of `f` on `[a, b]`, sorted, each bisected to within `tol`.
///
/// Endpoints are reported when `|f| < tol` there. Roots of even multiplicity
/// (touching zeros) are not sign changes and are not reported.
pub fn find_roots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Vec<f64> {
    find_roots_with(f, a, b, tol, ROOT_SCAN_PANELS)
}

pub fn find_roots_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> Vec<f64> {
    let panels = panels.max(1);
    let nodes: Vec<f64> = grid(a, b, panels).collect();
    let values: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();

    let mut roots = Vec::new();
    if values[0].abs() < tol {
        roots.push(a);
    }
    for i in 0..panels {
        let (t0, t1) = (nodes[i], nodes[i + 1]);
        let (v0, v1) = (values[i], values[i + 1]);
        if i > 0 && v0 == 0.0 {
            roots.push(t0);
            continue;
        }
        if v0 == 0.0 || v1 == 0.0 {
            continue;
        }
        if (v0 < 0.0) != (v1 < 0.0) {
            roots.push(bisect(&f, t0, t1, v0, tol));
        }
    }
    if values[panels].abs() < tol {
        roots.push(b);
    }

    roots.sort_by(|x, y| x.total_cmp(y));
    let merge = 2.0 * tol;
    roots.dedup_by(|later, earlier| (*later - *earlier).abs() <= merge);
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> f64 {
    // 200 halvings exhaust f64 resolution on any bounded interval
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn linear_root() {
        let r = find_roots(|t| t - 0.5, 0.0, 1.0, 1e-12);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn sine_roots_include_endpoints() {
        let r = find_roots(|t| (2.0 * PI * t).sin(), 0.0, 1.0, 1e-12);
        assert_eq!(r.len(), 3, "{r:?}");
        for (got, want) in r.iter().zip([0.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(find_roots(|_| 1.0, 0.0, 1.0, 1e-12).is_empty());
    }

    #[test]
    fn exact_zero_on_grid_node() {
        let r = find_roots(|t| t - 0.25, 0.0, 1.0, 1e-12);
        assert_eq!(r, [0.25]);
    }

    #[test]
    fn touching_zero_is_not_a_sign_change() {
        assert!(find_roots(|t| (t - 0.3) * (t - 0.3) + 1e-3, 0.0, 1.0, 1e-12).is_empty());
    }
}
