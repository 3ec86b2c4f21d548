//! Monte Carlo flux through fibers `{x₁ = θ}` of the thickened torus.
//!
//! The flux of a measured flow `(X, μ)` through a surface `S` is the limit of
//! `μ(φ^{[0,ε]}(S)) / ε`. For a volume measure a sample `x` lies in the swept
//! set iff its backward orbit segment `{φ^{−s}(x) : s ∈ [0, ε]}` meets `S`.
//! For `T²`-invariant fields that segment is a straight line in the universal
//! cover, so the test is a lattice-membership check; an RK4 path with
//! level-crossing detection handles transformed fields.
//!
//! Estimates are exact integer tallies over a fixed batch schedule derived
//! from `n`, so any partition of batches across workers reduces to the same
//! bits.

use alloc::vec::Vec;

#[allow(unused_imports)] // std shadows these when it is linked
use num_traits::Float;

use crate::blocks::Profile;
use crate::invariants::Normalization;
use crate::math::{grid, rk4_step, RngStream};
use crate::{Error, Result, THICK_TORUS_VOLUME, TAU};

/// Draws consumed per volume sample.
const DRAWS_PER_SAMPLE: u64 = 3;
/// Fewer hits than this marks an estimate as noisy.
const LOW_HIT_COUNT: u64 = 100;

/// A closed orbit `s ↦ (x₁₀ + p s, x₂₀ + q s, t₀)` of period 2π carrying its
/// length measure (total mass = period), so its flux through a surface is the
/// geometric intersection count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracOrbit {
    pub p: i64,
    pub q: i64,
    pub t0: f64,
    pub start: [f64; 2],
}

impl DiracOrbit {
    pub fn new(p: i64, q: i64, t0: f64) -> Result<Self> {
        let (a, b) = (p.unsigned_abs(), q.unsigned_abs());
        let mut g = (a, b);
        while g.1 != 0 {
            g = (g.1, g.0 % g.1);
        }
        if g.0 != 1 {
            return Err(Error::InvalidArgument(alloc::format!("orbit slope ({p}, {q}) must be coprime")));
        }
        if !(0.0..=1.0).contains(&t0) {
            return Err(Error::InvalidArgument(alloc::format!("orbit level {t0} outside [0, 1]")));
        }
        Ok(Self { p, q, t0, start: [0.0, 0.0] })
    }

    pub fn with_start(self, start: [f64; 2]) -> Self {
        Self { start, ..self }
    }

    pub fn period(&self) -> f64 {
        TAU
    }

    pub fn mass(&self) -> f64 {
        self.period()
    }

    /// Image under the shear `(x₁, x₂, t) ↦ (x₁, x₂ + k x₁, t)`.
    pub fn sheared(&self, k: i64) -> Self {
        Self {
            q: self.q + k * self.p,
            start: [self.start[0], self.start[1] + k as f64 * self.start[0]],
            ..*self
        }
    }

    /// Transverse crossings with `{x₁ ≡ θ}` over one period.
    pub fn crossings(&self, surface: &FiberSurface) -> u64 {
        lattice_points(self.start[0], self.p as f64 * self.period(), surface.theta)
    }
}

/// Lattice points `θ + 2πm` in the half-open segment from `start` to
/// `start + delta` (the start included, the end excluded).
fn lattice_points(start: f64, delta: f64, theta: f64) -> u64 {
    let a = (start - theta) / TAU;
    let b = (start + delta - theta) / TAU;
    let count = if delta > 0.0 {
        b.ceil() - a.ceil()
    } else if delta < 0.0 {
        a.floor() - b.floor()
    } else {
        0.0
    };
    count as u64
}

/// Whether some level `θ + 2πm` lies between `a` and `b` (inclusive).
fn crosses_level(a: f64, b: f64, theta: f64) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    ((hi - theta) / TAU).floor() >= ((lo - theta) / TAU).ceil()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureSpec {
    /// Uniform volume, of total mass 1 or 4π² per the normalization.
    Volume(Normalization),
    DiracOrbit(DiracOrbit),
}

/// The fiber `{x₁ = θ}`, an annulus in `(x₂, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSurface {
    pub theta: f64,
}

impl FiberSurface {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxEstimate {
    pub value: f64,
    /// Sample standard deviation of the per-sample contribution over `√n`.
    pub stderr: f64,
    pub n_samples: u64,
    pub hits: u64,
    pub epsilon: f64,
    pub seed: u64,
    /// Exact intersection count (Dirac measures), no sampling noise.
    pub exact: bool,
    /// Too few hits for the standard error to be trusted.
    pub low_hit_count: bool,
}

/// Where volume samples are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingDomain {
    /// The whole torus.
    Full,
    /// The slab `|x₁ − θ| ≤ 1.25 ε max|f|`, outside of which no sample can hit;
    /// the weight carries the slab's share of the volume.
    Band,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSettings {
    pub domain: SamplingDomain,
    /// RK4 steps across `[0, ε]` on the general path.
    pub rk4_steps: u32,
    pub batch_size: u64,
}

impl Default for FluxSettings {
    fn default() -> Self {
        Self { domain: SamplingDomain::Band, rk4_steps: 4, batch_size: 1 << 16 }
    }
}

/// Hit tally of a batch; addition is exact and order-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub samples: u64,
    pub hits: u64,
}

impl core::ops::Add for Tally {
    type Output = Tally;
    fn add(self, rhs: Tally) -> Tally {
        Tally { samples: self.samples + rhs.samples, hits: self.hits + rhs.hits }
    }
}

impl core::iter::Sum for Tally {
    fn sum<I: Iterator<Item = Tally>>(iter: I) -> Tally {
        iter.fold(Tally::default(), |a, b| a + b)
    }
}

/// One volume-measure flux estimate, split into independently runnable batches.
#[derive(Debug, Clone)]
pub struct FluxJob<'a> {
    profile: &'a Profile,
    theta: f64,
    epsilon: f64,
    n: u64,
    stream: RngStream,
    mass: f64,
    /// Width of the sampled slab in `x₁`; 0 when the field never moves in `x₁`.
    width: f64,
    /// `Some(k)`: run the sheared system on the RK4 path.
    shear: Option<i64>,
    settings: FluxSettings,
}

impl<'a> FluxJob<'a> {
    pub fn new(
        profile: &'a Profile,
        normalization: Normalization,
        surface: &FiberSurface,
        epsilon: f64,
        n: u64,
        stream: RngStream,
        settings: FluxSettings,
    ) -> Result<Self> {
        check_mc_args(epsilon, n)?;
        let max_speed = grid(0.0, 1.0, 4096).map(|t| profile.f().eval(t).abs()).fold(0.0, f64::max);
        if epsilon * max_speed >= TAU {
            return Err(Error::EpsilonTooLarge { epsilon, max_speed });
        }
        let width = match settings.domain {
            SamplingDomain::Full => TAU,
            SamplingDomain::Band => (2.5 * epsilon * max_speed).min(TAU),
        };
        let mass = match normalization {
            Normalization::Probability => 1.0,
            Normalization::Lebesgue => THICK_TORUS_VOLUME,
        };
        Ok(Self { profile, theta: surface.theta, epsilon, n, stream, mass, width, shear: None, settings })
    }

    /// Applies `(x₁, x₂, t) ↦ (x₁, x₂ + k x₁, t)` to samples, field and surface,
    /// and switches to the RK4 crossing path.
    pub fn sheared(self, k: i64) -> Self {
        Self { shear: Some(k), ..self }
    }

    pub fn batch_count(&self) -> u64 {
        self.n.div_ceil(self.settings.batch_size)
    }

    pub fn run_batch(&self, batch: u64) -> Result<Tally> {
        let first = batch * self.settings.batch_size;
        let last = (first + self.settings.batch_size).min(self.n);
        if first >= last || self.width == 0.0 {
            return Ok(Tally { samples: last.saturating_sub(first), hits: 0 });
        }
        let mut cursor = self.stream.cursor(first * DRAWS_PER_SAMPLE);
        let half = 0.5 * self.width;
        let mut hits = 0;
        for _ in first..last {
            let x1 = self.theta - half + self.width * cursor.next_f64();
            let x2 = TAU * cursor.next_f64();
            let t = cursor.next_f64();
            let f = self.profile.f().eval(t);
            if self.width < TAU && f.abs() * self.epsilon > half {
                return Err(Error::SamplingBand { t });
            }
            let hit = match self.shear {
                None => crosses_level(x1, x1 - f * self.epsilon, self.theta),
                Some(k) => self.sheared_hit(k, [x1, x2 + k as f64 * x1, t])?,
            };
            hits += u64::from(hit);
        }
        Ok(Tally { samples: last - first, hits })
    }

    fn sheared_hit(&self, k: i64, y: [f64; 3]) -> Result<bool> {
        let k = k as f64;
        let profile = self.profile;
        let backward = |y: &[f64; 3]| {
            let (f, g) = profile.velocity(y[2]);
            [-f, -(g + k * f), 0.0]
        };
        // the sheared fiber is the level set of (S⁻¹y)₁ = y₁
        let level = |y: &[f64; 3]| y[0];
        let h = self.epsilon / f64::from(self.settings.rk4_steps.max(1));
        let mut state = y;
        let mut prev = level(&state);
        for _ in 0..self.settings.rk4_steps.max(1) {
            state = rk4_step(&backward, &state, h)?;
            let next = level(&state);
            if crosses_level(prev, next, self.theta) {
                return Ok(true);
            }
            prev = next;
        }
        Ok(false)
    }

    pub fn finish(&self, tally: Tally) -> FluxEstimate {
        let weight = self.width / TAU * self.mass / self.epsilon;
        let n = tally.samples as f64;
        let hits = tally.hits as f64;
        let value = weight * hits / n;
        let variance = if tally.samples > 1 { weight * weight * (hits - hits * hits / n) / (n - 1.0) } else { 0.0 };
        FluxEstimate {
            value,
            stderr: (variance.max(0.0) / n).sqrt(),
            n_samples: tally.samples,
            hits: tally.hits,
            epsilon: self.epsilon,
            seed: self.stream.seed,
            exact: false,
            low_hit_count: tally.hits < LOW_HIT_COUNT,
        }
    }

    pub fn run(&self) -> Result<FluxEstimate> {
        let mut tally = Tally::default();
        for b in 0..self.batch_count() {
            tally = tally + self.run_batch(b)?;
        }
        Ok(self.finish(tally))
    }
}

fn check_mc_args(epsilon: f64, n: u64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1e-2) {
        return Err(Error::InvalidArgument(alloc::format!("epsilon {epsilon} outside (0, 1e-2]")));
    }
    if n < 1000 {
        return Err(Error::InvalidArgument(alloc::format!("n = {n} below 1000")));
    }
    Ok(())
}

fn dirac_estimate(orbit: &DiracOrbit, surface: &FiberSurface, epsilon: f64, seed: u64) -> FluxEstimate {
    let count = orbit.crossings(surface);
    FluxEstimate {
        value: count as f64,
        stderr: 0.0,
        n_samples: 0,
        hits: count,
        epsilon,
        seed,
        exact: true,
        low_hit_count: false,
    }
}

/// Flux of `(X, μ)` through a fiber. Volume measures use random stream
/// `(seed, stream_id)`; Dirac orbits are counted exactly.
#[allow(clippy::too_many_arguments)]
pub fn flux_estimate_with(
    profile: &Profile,
    measure: &MeasureSpec,
    surface: &FiberSurface,
    epsilon: f64,
    n: u64,
    stream: RngStream,
    settings: FluxSettings,
) -> Result<FluxEstimate> {
    match measure {
        MeasureSpec::Volume(norm) => FluxJob::new(profile, *norm, surface, epsilon, n, stream, settings)?.run(),
        MeasureSpec::DiracOrbit(orbit) => {
            check_mc_args(epsilon, n)?;
            Ok(dirac_estimate(orbit, surface, epsilon, stream.seed))
        }
    }
}

pub fn flux_estimate(
    profile: &Profile,
    measure: &MeasureSpec,
    surface: &FiberSurface,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> Result<FluxEstimate> {
    flux_estimate_with(profile, measure, surface, epsilon, n, RngStream::new(seed, 0), FluxSettings::default())
}

/// Per-θ estimates of a fiber sweep and their extremes. The max is an upper
/// bound for the infimum over fibrations; the min is not certified.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSweep {
    pub rows: Vec<(f64, FluxEstimate)>,
    pub empirical_min: f64,
    pub empirical_max: f64,
}

impl FiberSweep {
    pub fn from_rows(rows: Vec<(f64, FluxEstimate)>) -> Self {
        let empirical_min = rows.iter().map(|r| r.1.value).fold(f64::INFINITY, f64::min);
        let empirical_max = rows.iter().map(|r| r.1.value).fold(f64::NEG_INFINITY, f64::max);
        Self { rows, empirical_min, empirical_max }
    }
}

/// `θ_k = 2πk/K` for `k < K`.
pub fn theta_grid(k: usize) -> impl Iterator<Item = f64> {
    (0..k).map(move |i| TAU * i as f64 / k as f64)
}

/// Flux at `θ_k = 2πk/K`, each on its own random stream `(seed, k)`.
pub fn fiber_sweep(
    profile: &Profile,
    measure: &MeasureSpec,
    thetas: usize,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> Result<FiberSweep> {
    if thetas < 8 {
        return Err(Error::InvalidArgument(alloc::format!("theta grid {thetas} below 8")));
    }
    let rows = theta_grid(thetas)
        .enumerate()
        .map(|(k, theta)| {
            let s = FiberSurface::new(theta);
            let est = flux_estimate_with(profile, measure, &s, epsilon, n, RngStream::new(seed, k as u64), FluxSettings::default())?;
            Ok((theta, est))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FiberSweep::from_rows(rows))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearReport {
    /// Worst `|v − v′| / |v|` over the θ grid.
    pub max_relative_discrepancy: f64,
    /// Worst `|v − v′|` in units of the combined standard error.
    pub max_z: f64,
    pub within_noise: bool,
}

/// Compares fiber fluxes before and after the volume-preserving shear
/// `(x₁, x₂, t) ↦ (x₁, x₂ + k x₁, t)` applied to field, samples and fiber.
/// The original runs on the analytic path, the sheared system on RK4.
pub fn shear_invariance_test(
    profile: &Profile,
    k: i64,
    thetas: usize,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> Result<ShearReport> {
    let mut max_rel: f64 = 0.0;
    let mut max_z: f64 = 0.0;
    for (i, theta) in theta_grid(thetas).enumerate() {
        let stream = RngStream::new(seed, i as u64);
        let surface = FiberSurface::new(theta);
        let job = FluxJob::new(profile, Normalization::Probability, &surface, epsilon, n, stream, FluxSettings::default())?;
        let plain = job.run()?;
        let sheared = job.sheared(k).run()?;
        let diff = (plain.value - sheared.value).abs();
        let rel = if diff == 0.0 { 0.0 } else { diff / plain.value.abs().max(f64::MIN_POSITIVE) };
        let se = plain.stderr.hypot(sheared.stderr);
        let z = if diff == 0.0 { 0.0 } else if se > 0.0 { diff / se } else { f64::INFINITY };
        max_rel = max_rel.max(rel);
        max_z = max_z.max(z);
    }
    Ok(ShearReport { max_relative_discrepancy: max_rel, max_z, within_noise: max_z <= 3.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub n: u64,
    pub value: f64,
    pub stderr: f64,
}

/// Estimates on every `(ε, n)` pair, row `i` on stream `(seed, i)`. `ε` must be
/// listed in descending order.
pub fn convergence_report(
    profile: &Profile,
    measure: &MeasureSpec,
    surface: &FiberSurface,
    epsilons: &[f64],
    ns: &[u64],
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if epsilons.is_empty() || ns.is_empty() {
        return Err(Error::InvalidArgument("empty epsilon or n list".into()));
    }
    if epsilons.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidArgument("epsilons must be strictly descending".into()));
    }
    let mut rows = Vec::with_capacity(epsilons.len() * ns.len());
    for &epsilon in epsilons {
        for &n in ns {
            let stream = RngStream::new(seed, rows.len() as u64);
            let est = flux_estimate_with(profile, measure, surface, epsilon, n, stream, FluxSettings::default())?;
            rows.push(ConvergenceRow { epsilon, n, value: est.value, stderr: est.stderr });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ScalarFn;

    fn volume() -> MeasureSpec {
        MeasureSpec::Volume(Normalization::Probability)
    }

    #[test]
    fn lattice_counting() {
        assert_eq!(lattice_points(0.1, TAU * 3.0, 0.0), 3);
        assert_eq!(lattice_points(0.1, -TAU * 2.0, 0.0), 2);
        assert_eq!(lattice_points(0.0, TAU, 0.0), 1);
        assert_eq!(lattice_points(0.5, 0.0, 0.5), 0);
        assert!(crosses_level(0.1, -0.1, 0.0));
        assert!(crosses_level(TAU - 0.1, TAU + 0.1, 0.0));
        assert!(!crosses_level(0.1, 0.2, 0.0));
    }

    #[test]
    fn dirac_counts() {
        let orbit = DiracOrbit::new(2, 3, 0.5).unwrap();
        for theta in [0.1, 1.0, 4.0] {
            assert_eq!(orbit.crossings(&FiberSurface::new(theta)), 2);
        }
        let p = Profile::constant(1.0, 0.0).unwrap();
        let est = flux_estimate(&p, &MeasureSpec::DiracOrbit(orbit), &FiberSurface::new(0.3), 1e-3, 1000, 1).unwrap();
        assert_eq!(est.value, 2.0);
        assert!(est.exact);
        assert!(DiracOrbit::new(2, 4, 0.5).is_err());
        assert_eq!(orbit.sheared(1).q, 5);
        assert_eq!(orbit.sheared(1).crossings(&FiberSurface::new(0.7)), 2);
    }

    #[test]
    fn tangent_flow_has_no_flux() {
        let p = Profile::constant(0.0, 1.0).unwrap();
        let est = flux_estimate(&p, &volume(), &FiberSurface::new(1.0), 1e-3, 10_000, 5).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.n_samples, 10_000);
    }

    #[test]
    fn constant_flow_matches_closed_form() {
        let p = Profile::constant(1.0, 0.0).unwrap();
        let est = flux_estimate(&p, &volume(), &FiberSurface::new(2.0), 1e-3, 200_000, 9).unwrap();
        let exact = 1.0 / TAU;
        assert!((est.value - exact).abs() <= 3.0 * est.stderr, "{est:?}");
        assert!(!est.low_hit_count);
    }

    #[test]
    fn full_domain_sampling_agrees() {
        let p = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.0, 0.0), ScalarFn::constant(1.0)).unwrap();
        let settings = FluxSettings { domain: SamplingDomain::Full, ..FluxSettings::default() };
        let est = flux_estimate_with(&p, &volume(), &FiberSurface::new(0.5), 1e-2, 2_000_000, RngStream::new(3, 0), settings)
            .unwrap();
        // ∫|sin 2πt| / 2π = 1/π²
        let exact = 1.0 / (core::f64::consts::PI * core::f64::consts::PI);
        assert!((est.value - exact).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn argument_checks() {
        let p = Profile::constant(1.0, 0.0).unwrap();
        let s = FiberSurface::new(0.0);
        assert!(flux_estimate(&p, &volume(), &s, 0.0, 10_000, 1).is_err());
        assert!(flux_estimate(&p, &volume(), &s, 0.1, 10_000, 1).is_err());
        assert!(flux_estimate(&p, &volume(), &s, 1e-3, 10, 1).is_err());
        let fast = Profile::constant(1000.0, 0.0).unwrap();
        assert!(matches!(
            flux_estimate(&fast, &volume(), &s, 1e-2, 10_000, 1),
            Err(Error::EpsilonTooLarge { .. })
        ));
        assert!(fiber_sweep(&p, &volume(), 4, 1e-3, 1000, 1).is_err());
        assert!(convergence_report(&p, &volume(), &s, &[1e-3, 1e-2], &[1000], 1).is_err());
    }

    #[test]
    fn batches_partition_freely() {
        let p = Profile::new(ScalarFn::affine(2.0, -1.0), ScalarFn::constant(1.0)).unwrap();
        let job = FluxJob::new(
            &p,
            Normalization::Lebesgue,
            &FiberSurface::new(1.0),
            1e-3,
            50_000,
            RngStream::new(4, 2),
            FluxSettings { batch_size: 4096, ..FluxSettings::default() },
        )
        .unwrap();
        let forward: Tally = (0..job.batch_count()).map(|b| job.run_batch(b).unwrap()).sum();
        let backward: Tally = (0..job.batch_count()).rev().map(|b| job.run_batch(b).unwrap()).sum();
        assert_eq!(forward, backward);
        assert_eq!(forward.samples, 50_000);
        assert_eq!(job.finish(forward), job.run().unwrap());
    }

    #[test]
    fn identity_shear_is_exact() {
        let p = Profile::new(ScalarFn::sinusoid(1.0, 2, 0.3, 0.2), ScalarFn::constant(1.0)).unwrap();
        let r = shear_invariance_test(&p, 0, 8, 1e-3, 20_000, 11).unwrap();
        assert_eq!(r.max_relative_discrepancy, 0.0);
        assert!(r.within_noise);
    }
}
