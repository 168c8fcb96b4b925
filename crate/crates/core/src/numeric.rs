//! Numerical integration of the Hamiltonian system, pointwise transport of
//! trajectories by Bäcklund maps, and random-point sampling of identities.
//!
//! The integrator is an adaptive Dormand–Prince 5(4) pair along the straight
//! path from the start time to `t_end` in the complex `t` plane.

use num_complex::Complex64;
use pvi_field::{Point, Rational, RationalFunction, RootExtElement, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backlund::BirationalMap;
use crate::hamiltonian::{pvi_constants, pvi_residual, ParamVec, PViConstants};
use crate::{CoreError, Result};

/// Default distance kept from `q in {0, 1, t}` and `t in {0, 1}`.
pub const GUARD: f64 = 1e-3;

/// `|q|` or `|p|` beyond this is treated as an approaching movable pole.
pub const BLOWUP: f64 = 1e8;

const MIN_STEP: f64 = 1e-13;
const MAX_STEPS: usize = 1_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub t: Complex64,
    pub q: Complex64,
    pub p: Complex64,
}

impl PhasePoint {
    pub fn new(t: Complex64, q: Complex64, p: Complex64) -> Self {
        PhasePoint { t, q, p }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct IntegratorInfo {
    pub rel_tol: f64,
    pub guard: f64,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub params: ParamVec,
    pub samples: Vec<PhasePoint>,
    /// Local error estimate of the step ending at each sample.
    pub errors: Vec<f64>,
    pub info: IntegratorInfo,
}

impl Trajectory {
    pub fn start(&self) -> &PhasePoint {
        &self.samples[0]
    }

    pub fn end(&self) -> &PhasePoint {
        self.samples.last().expect("trajectory has a start")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_re,t_im,q_re,q_im,p_re,p_im,err\n");
        for (s, e) in self.samples.iter().zip(&self.errors) {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                s.t.re, s.t.im, s.q.re, s.q.im, s.p.re, s.p.im, e
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let samples: Vec<serde_json::Value> = self
            .samples
            .iter()
            .zip(&self.errors)
            .map(|(s, e)| {
                serde_json::json!({
                    "t_re": s.t.re, "t_im": s.t.im,
                    "q_re": s.q.re, "q_im": s.q.im,
                    "p_re": s.p.re, "p_im": s.p.im,
                    "err": e,
                })
            })
            .collect();
        let alphas: Vec<String> = self.params.alphas().iter().map(|a| a.to_string()).collect();
        serde_json::json!({
            "alpha": alphas,
            "integrator": self.info,
            "samples": samples,
        })
    }
}

/// Numeric right-hand side of the expanded system, in kappa coordinates.
#[derive(Copy, Clone, Debug)]
struct Rhs {
    k0: Complex64,
    k1: Complex64,
    kt: Complex64,
    kinf: Complex64,
    rho: Complex64,
}

impl Rhs {
    fn new(pv: &ParamVec) -> Result<Self> {
        let a = pv.complex_alphas()?;
        Ok(Rhs {
            k0: a[4],
            k1: a[3],
            kt: a[0],
            kinf: a[1],
            rho: a[2],
        })
    }

    fn eval(&self, t: Complex64, q: Complex64, p: Complex64) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let tt = t * (t - one);
        let (q1, qt) = (q - one, q - t);
        let qdot = 2.0 * p * q * q1 * qt
            - (self.k0 * q1 * qt + self.k1 * q * qt + (self.kt - one) * q * q1);
        let pdot = -p * p * (3.0 * q * q - 2.0 * (one + t) * q + t)
            + p * (2.0 * (self.k0 + self.k1 + self.kt - one) * q
                - self.k0 * (one + t)
                - self.k1 * t
                - self.kt
                + one)
            - self.rho * (self.kinf + self.rho);
        (qdot / tt, pdot / tt)
    }
}

fn guard_violation(pt: &PhasePoint, guard: f64) -> Option<&'static str> {
    let one = Complex64::new(1.0, 0.0);
    if pt.t.norm() < guard || (pt.t - one).norm() < guard {
        return Some("t near a fixed singular point");
    }
    if pt.q.norm() < guard {
        return Some("q near 0");
    }
    if (pt.q - one).norm() < guard {
        return Some("q near 1");
    }
    if (pt.q - pt.t).norm() < guard {
        return Some("q near t");
    }
    if !pt.q.is_finite() || !pt.p.is_finite() || pt.q.norm() > BLOWUP || pt.p.norm() > BLOWUP {
        return Some("solution blows up");
    }
    None
}

fn singular(pt: &PhasePoint, what: &str) -> CoreError {
    CoreError::Singularity {
        t: pt.t.to_string(),
        what: what.to_string(),
    }
}

/// Distance from `c` to the segment `[a, b]`.
fn segment_distance(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (c - a).norm();
    }
    let s = (((c - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * s - c).norm()
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One DP5 step of size `h` in the path parameter; returns the new state and
/// the scaled error norm.
fn dp_step(
    rhs: &Rhs,
    t0: Complex64,
    dir: Complex64,
    s: f64,
    y: [Complex64; 2],
    h: f64,
    rel_tol: f64,
) -> ([Complex64; 2], f64) {
    let f = |s: f64, y: [Complex64; 2]| {
        let (a, b) = rhs.eval(t0 + dir * s, y[0], y[1]);
        [a * dir, b * dir]
    };
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
    for i in 0..7 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            for c in 0..2 {
                yi[c] += kj[c] * (h * A[i][j]);
            }
        }
        k[i] = f(s + C[i] * h, yi);
    }
    let mut y5 = y;
    let mut err = 0.0f64;
    for c in 0..2 {
        let mut e = Complex64::new(0.0, 0.0);
        for i in 0..7 {
            y5[c] += k[i][c] * (h * B5[i]);
            e += k[i][c] * (h * (B5[i] - B4[i]));
        }
        let scale = rel_tol * (1.0 + y[c].norm().max(y5[c].norm()));
        err = err.max(e.norm() / scale);
    }
    (y5, err)
}

/// Integrates from `start` to `t_end` along the straight segment, recording
/// every accepted step.
pub fn integrate(pv: &ParamVec, start: PhasePoint, t_end: Complex64, rel_tol: f64) -> Result<Trajectory> {
    integrate_with_guard(pv, start, t_end, rel_tol, GUARD)
}

pub fn integrate_with_guard(
    pv: &ParamVec,
    start: PhasePoint,
    t_end: Complex64,
    rel_tol: f64,
    guard: f64,
) -> Result<Trajectory> {
    if rel_tol.is_nan() || rel_tol <= 0.0 {
        return Err(CoreError::Invalid(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let rhs = Rhs::new(pv)?;
    if let Some(what) = guard_violation(&start, guard) {
        return Err(singular(&start, what));
    }
    let one = Complex64::new(1.0, 0.0);
    for (c, what) in [(Complex64::new(0.0, 0.0), "path passes near t = 0"), (one, "path passes near t = 1")] {
        if segment_distance(start.t, t_end, c) < guard {
            return Err(singular(&start, what));
        }
    }
    let mut traj = Trajectory {
        params: pv.clone(),
        samples: vec![start],
        errors: vec![0.0],
        info: IntegratorInfo {
            rel_tol,
            guard,
            accepted: 0,
            rejected: 0,
        },
    };
    let dir = t_end - start.t;
    if dir.norm() == 0.0 {
        return Ok(traj);
    }
    let mut s = 0.0f64;
    let mut y = [start.q, start.p];
    let mut h = 1e-3f64;
    for _ in 0..MAX_STEPS {
        if s >= 1.0 {
            return Ok(traj);
        }
        let h_try = h.min(1.0 - s);
        let (y_new, err) = dp_step(&rhs, start.t, dir, s, y, h_try, rel_tol);
        let finite = y_new.iter().all(|x| x.is_finite()) && err.is_finite();
        if finite && err <= 1.0 {
            s = if h_try >= 1.0 - s { 1.0 } else { s + h_try };
            y = y_new;
            let pt = PhasePoint::new(if s == 1.0 { t_end } else { start.t + dir * s }, y[0], y[1]);
            if let Some(what) = guard_violation(&pt, guard) {
                return Err(singular(&pt, what));
            }
            traj.samples.push(pt);
            traj.errors.push(err * rel_tol);
            traj.info.accepted += 1;
        } else {
            traj.info.rejected += 1;
        }
        let factor = if !finite {
            0.2
        } else if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = h_try * factor;
        if h * dir.norm() < MIN_STEP {
            return Err(CoreError::StepUnderflow(
                traj.end().t.to_string(),
            ));
        }
    }
    Err(CoreError::StepUnderflow(traj.end().t.to_string()))
}

/// Samples on the uniform grid `t0 + k (t_end - t0) / n`, `k = 0..=n`, each
/// reached by integrating from the previous grid point.
pub fn integrate_grid(
    pv: &ParamVec,
    start: PhasePoint,
    t_end: Complex64,
    rel_tol: f64,
    n: usize,
) -> Result<Trajectory> {
    if n == 0 {
        return Err(CoreError::Invalid("grid needs at least one interval".into()));
    }
    let step = (t_end - start.t) / n as f64;
    let mut out = integrate(pv, start, start.t, rel_tol)?;
    let mut cur = start;
    for k in 1..=n {
        let target = if k == n { t_end } else { start.t + step * k as f64 };
        let piece = integrate(pv, cur, target, rel_tol)?;
        cur = *piece.end();
        out.samples.push(cur);
        out.errors.push(piece.errors.iter().copied().fold(0.0, f64::max));
        out.info.accepted += piece.info.accepted;
        out.info.rejected += piece.info.rejected;
    }
    Ok(out)
}

/// Applies `m` to every sample and to the parameters.
pub fn transform_trajectory(m: &BirationalMap, traj: &Trajectory) -> Result<Trajectory> {
    let eps: Vec<Rational> = traj
        .params
        .epsilons()
        .iter()
        .map(|e| e.as_constant())
        .collect::<Option<_>>()
        .ok_or_else(|| CoreError::InvalidParams("transport needs rational parameters".into()))?;
    let eps: [Rational; 4] = eps.try_into().expect("four epsilons");
    let alphas = m.roots.eval(&eps).map(RationalFunction::constant);
    let params = ParamVec::alpha(alphas)?;
    let a = traj.params.complex_alphas()?;
    let mut samples = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let point = Point::new()
            .with(Var::A1, a[1])
            .with(Var::A2, a[2])
            .with(Var::A3, a[3])
            .with(Var::A4, a[4])
            .with(Var::Q, s.q)
            .with(Var::P, s.p)
            .with(Var::T, s.t);
        let eval = |f: &RationalFunction| {
            f.eval_complex(&point).map_err(|_| singular(s, "pole of the transformation"))
        };
        samples.push(PhasePoint::new(eval(&m.t)?, eval(&m.q)?, eval(&m.p)?));
    }
    Ok(Trajectory {
        params,
        samples,
        errors: traj.errors.clone(),
        info: traj.info,
    })
}

/// Largest `|pvi_residual|` over the interior of a uniform-grid trajectory,
/// with `y'` and `y''` from five-point central differences of the samples.
pub fn max_pvi_residual(traj: &Trajectory) -> Result<f64> {
    let n = traj.samples.len();
    if n < 5 {
        return Err(CoreError::Invalid("need at least five samples".into()));
    }
    let k: PViConstants<Complex64> = pvi_constants(&traj.params).to_complex()?;
    let h = (traj.samples[1].t - traj.samples[0].t).norm();
    let dir = (traj.samples[n - 1].t - traj.samples[0].t) / (traj.samples[n - 1].t - traj.samples[0].t).norm();
    let y = |i: usize| traj.samples[i].q;
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let d1 = (y(i - 2) - 8.0 * y(i - 1) + 8.0 * y(i + 1) - y(i + 2)) / (12.0 * h) / dir;
        let d2 = (-y(i - 2) + 16.0 * y(i - 1) - 30.0 * y(i) + 16.0 * y(i + 1) - y(i + 2))
            / (12.0 * h * h)
            / (dir * dir);
        let r = pvi_residual(y(i), d1, d2, traj.samples[i].t, &k)?;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

/// Outcome of one transport-versus-reintegration comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BacklundCheck {
    pub endpoint_error: f64,
    pub residual_original: f64,
    pub residual_transformed: f64,
}

/// Integrates on a grid, transports by `m`, re-integrates from the
/// transported start under the transported parameters and compares ends.
pub fn backlund_round_trip(
    m: &BirationalMap,
    pv: &ParamVec,
    start: PhasePoint,
    t_end: Complex64,
    rel_tol: f64,
    grid: usize,
) -> Result<BacklundCheck> {
    let traj = integrate_grid(pv, start, t_end, rel_tol, grid)?;
    let moved = transform_trajectory(m, &traj)?;
    let direct = integrate_grid(&moved.params, *moved.start(), moved.end().t, rel_tol, grid)?;
    let (a, b) = (moved.end(), direct.end());
    let scale = 1.0 + a.q.norm().max(a.p.norm());
    let endpoint_error = ((a.q - b.q).norm().max((a.p - b.p).norm())) / scale;
    Ok(BacklundCheck {
        endpoint_error,
        residual_original: max_pvi_residual(&traj)?,
        residual_transformed: max_pvi_residual(&direct)?.max(max_pvi_residual(&moved)?),
    })
}

/// Anything that evaluates to a complex number at a point.
pub trait Sampleable {
    fn sample(&self, point: &Point) -> Result<Complex64>;
}

impl Sampleable for RationalFunction {
    fn sample(&self, point: &Point) -> Result<Complex64> {
        Ok(self.eval_complex(point)?)
    }
}

impl Sampleable for RootExtElement {
    /// Principal branches, fixed by the point alone, so both sides of an
    /// identity see the same choice.
    fn sample(&self, point: &Point) -> Result<Complex64> {
        let branches = self.principal_branches(point)?;
        Ok(self.eval_complex(point, &branches)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub trials: usize,
    pub rejected: usize,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// A random complex point with rational real and imaginary parts in
/// `[-3, 3]`, all variables set.
pub fn random_complex_point(rng: &mut ChaCha8Rng) -> Point {
    let mut point = Point::new();
    for v in Var::ALL {
        let re = rng.gen_range(-96i32..=96) as f64 / 32.0;
        let im = rng.gen_range(-96i32..=96) as f64 / 32.0;
        point.set(v, Complex64::new(re, im));
    }
    point
}

/// Compares `lhs` and `rhs` at `trials` seeded random points; draws where
/// either side is singular are skipped.
pub fn sample_identity<L: Sampleable + ?Sized, R: Sampleable + ?Sized>(
    lhs: &L,
    rhs: &R,
    trials: usize,
    tol: f64,
    seed: u64,
) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut rejected = 0;
    let mut max_deviation = 0.0f64;
    while done < trials && rejected < 10 * trials + 10 {
        let point = random_complex_point(&mut rng);
        match (lhs.sample(&point), rhs.sample(&point)) {
            (Ok(a), Ok(b)) => {
                let dev = (a - b).norm() / 1f64.max(a.norm()).max(b.norm());
                max_deviation = max_deviation.max(dev);
                done += 1;
            }
            _ => rejected += 1,
        }
    }
    SampleReport {
        trials: done,
        rejected,
        max_deviation,
        tol,
        pass: done == trials && max_deviation < tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backlund::reflection_map;
    use crate::hamiltonian::expanded_system;
    use pvi_field::rat;

    fn params() -> ParamVec {
        ParamVec::from_alpha_tail([rat(1, 5), rat(1, 10), rat(1, 8), rat(1, 40)])
    }

    fn start() -> PhasePoint {
        PhasePoint::new(Complex64::new(2.0, 0.0), Complex64::new(0.4, 0.3), Complex64::new(0.5, -0.2))
    }

    #[test]
    fn numeric_rhs_matches_the_symbolic_system() {
        let pv = params();
        let rhs = Rhs::new(&pv).unwrap();
        let (qd, pd) = expanded_system(&pv);
        let (t, q, p) = (Complex64::new(2.5, 0.1), Complex64::new(0.3, -0.4), Complex64::new(1.1, 0.2));
        let point = Point::new().with(Var::T, t).with(Var::Q, q).with(Var::P, p);
        let (a, b) = rhs.eval(t, q, p);
        assert!((a - qd.eval_complex(&point).unwrap()).norm() < 1e-13);
        assert!((b - pd.eval_complex(&point).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn zero_length_integration_returns_the_start() {
        let traj = integrate(&params(), start(), start().t, 1e-9).unwrap();
        assert_eq!(traj.samples, vec![start()]);
    }

    #[test]
    fn tightening_the_tolerance_moves_the_endpoint_little() {
        let t_end = Complex64::new(3.0, 0.0);
        let a = integrate(&params(), start(), t_end, 1e-8).unwrap();
        let b = integrate(&params(), start(), t_end, 1e-10).unwrap();
        let d = (a.end().q - b.end().q).norm().max((a.end().p - b.end().p).norm());
        assert!(d < 10.0 * 1e-8, "{d}");
        assert_eq!(a.end().t, t_end);
    }

    #[test]
    fn grid_trajectory_solves_the_scalar_equation() {
        let traj = integrate_grid(&params(), start(), Complex64::new(3.0, 0.0), 1e-9, 64).unwrap();
        let r = max_pvi_residual(&traj).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn identity_map_leaves_samples_alone() {
        let traj = integrate_grid(&params(), start(), Complex64::new(2.5, 0.0), 1e-9, 8).unwrap();
        let moved = transform_trajectory(&BirationalMap::identity(), &traj).unwrap();
        assert_eq!(moved.samples, traj.samples);
        assert_eq!(moved.params.alphas(), traj.params.alphas());
    }

    #[test]
    fn s0_round_trip() {
        let check = backlund_round_trip(
            &reflection_map(0),
            &params(),
            start(),
            Complex64::new(3.0, 0.0),
            1e-9,
            64,
        )
        .unwrap();
        assert!(check.endpoint_error < 1e-6, "{check:?}");
    }

    #[test]
    fn path_through_t_equals_one_is_refused() {
        let s = PhasePoint::new(Complex64::new(0.5, 0.0), Complex64::new(0.2, 0.3), Complex64::new(0.1, 0.0));
        let err = integrate(&params(), s, Complex64::new(2.0, 0.0), 1e-9).unwrap_err();
        assert!(matches!(err, CoreError::Singularity { .. }));
    }

    #[test]
    fn csv_has_the_documented_header() {
        let traj = integrate(&params(), start(), Complex64::new(2.1, 0.0), 1e-9).unwrap();
        let csv = traj.to_csv();
        assert!(csv.starts_with("t_re,t_im,q_re,q_im,p_re,p_im,err\n"));
        assert_eq!(csv.lines().count(), traj.samples.len() + 1);
    }

    #[test]
    fn sampling_flags_a_perturbed_identity() {
        let f = RationalFunction::var(Var::Q) / (RationalFunction::var(Var::T) - RationalFunction::from_int(1));
        let same = sample_identity(&f, &f, 50, 1e-10, 7);
        assert!(same.pass && same.max_deviation == 0.0);
        let g = &f + &RationalFunction::from_frac(1, 1000);
        let off = sample_identity(&f, &g, 50, 1e-10, 7);
        assert!(!off.pass);
    }
}
