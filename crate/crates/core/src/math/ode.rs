#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Result of [`rk4_flow`]: the final state and, when requested, every step.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow<const N: usize> {
    pub state: [f64; N],
    pub trajectory: Option<Vec<(f64, [f64; N])>>,
}

/// One classic RK4 step of size `h` for the autonomous system `ẋ = field(x)`.
pub fn rk4_step<const N: usize, F>(field: &F, x: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let eval = |y: &[f64; N]| -> Result<[f64; N]> {
        let v = field(y);
        if v.iter().all(|c| c.is_finite()) {
            Ok(v)
        } else {
            Err(Error::Evaluation { t: f64::NAN })
        }
    };
    let shift = |k: &[f64; N], s: f64| -> [f64; N] { core::array::from_fn(|i| x[i] + s * k[i]) };
    let k1 = eval(x)?;
    let k2 = eval(&shift(&k1, 0.5 * h))?;
    let k3 = eval(&shift(&k2, 0.5 * h))?;
    let k4 = eval(&shift(&k3, h))?;
    Ok(core::array::from_fn(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

/// Integrates `ẋ = field(x)` for `duration` (negative runs backwards) with
/// steps no longer than `step`.
///
/// Angles are carried unreduced; reducing them is up to the caller, so crossing
/// counts can always be read off the universal cover.
pub fn rk4_flow<const N: usize, F>(field: F, x0: [f64; N], duration: f64, step: f64, record: bool) -> Result<Flow<N>>
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    if !(step > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("step {step}, duration {duration}")));
    }
    let steps = (duration.abs() / step).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let mut x = x0;
    let mut trajectory = record.then(|| {
        let mut v = Vec::with_capacity(steps + 1);
        v.push((0.0, x0));
        v
    });
    for i in 0..steps {
        x = rk4_step(&field, &x, h).map_err(|_| Error::Evaluation { t: h * i as f64 })?;
        if let Some(traj) = trajectory.as_mut() {
            traj.push((h * (i + 1) as f64, x));
        }
    }
    Ok(Flow { state: x, trajectory })
}
