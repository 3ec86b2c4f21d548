//! Thread-pool execution of Monte Carlo work.
//!
//! Batches reduce through exact integer tallies and rows are collected in
//! index order, so results do not depend on the number of threads.

use fluxknot_core::blocks::Profile;
use fluxknot_core::flux::{
    flux_estimate_with, theta_grid, FiberSurface, FiberSweep, FluxEstimate, FluxJob, FluxSettings, MeasureSpec, Tally,
};
use fluxknot_core::math::RngStream;
use rayon::prelude::*;

pub fn pool(threads: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n.max(1));
    }
    Ok(b.build()?)
}

pub fn run_job(job: &FluxJob<'_>) -> fluxknot_core::Result<FluxEstimate> {
    let tallies =
        (0..job.batch_count()).into_par_iter().map(|b| job.run_batch(b)).collect::<fluxknot_core::Result<Vec<Tally>>>()?;
    Ok(job.finish(tallies.into_iter().sum()))
}

pub fn estimate(
    profile: &Profile,
    measure: &MeasureSpec,
    surface: &FiberSurface,
    epsilon: f64,
    n: u64,
    stream: RngStream,
) -> fluxknot_core::Result<FluxEstimate> {
    match measure {
        MeasureSpec::Volume(norm) => {
            run_job(&FluxJob::new(profile, *norm, surface, epsilon, n, stream, FluxSettings::default())?)
        }
        MeasureSpec::DiracOrbit(_) => {
            flux_estimate_with(profile, measure, surface, epsilon, n, stream, FluxSettings::default())
        }
    }
}

/// Same streams and results as the sequential sweep.
pub fn fiber_sweep(
    profile: &Profile,
    measure: &MeasureSpec,
    thetas: usize,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> fluxknot_core::Result<FiberSweep> {
    if thetas < 8 {
        return fluxknot_core::flux::fiber_sweep(profile, measure, thetas, epsilon, n, seed);
    }
    let grid: Vec<(usize, f64)> = theta_grid(thetas).enumerate().collect();
    let rows = grid
        .into_par_iter()
        .map(|(k, theta)| {
            let est = estimate(profile, measure, &FiberSurface::new(theta), epsilon, n, RngStream::new(seed, k as u64))?;
            Ok((theta, est))
        })
        .collect::<fluxknot_core::Result<Vec<_>>>()?;
    Ok(FiberSweep::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fluxknot_core::invariants::Normalization;
    use fluxknot_core::math::ScalarFn;

    #[test]
    fn matches_sequential_sweep_at_any_thread_count() {
        let p = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.0, 0.2), ScalarFn::constant(1.0)).unwrap();
        let m = MeasureSpec::Volume(Normalization::Lebesgue);
        let reference = fluxknot_core::flux::fiber_sweep(&p, &m, 8, 1e-3, 150_000, 3).unwrap();
        for threads in [1, 3, 8] {
            let got = pool(Some(threads)).unwrap().install(|| fiber_sweep(&p, &m, 8, 1e-3, 150_000, 3)).unwrap();
            assert_eq!(got, reference);
        }
    }
}
