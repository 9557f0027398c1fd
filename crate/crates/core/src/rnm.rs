//! The robust Newton iterate and the two iteration loops built on it.
//!
//! At a non-root `z` let `a_j = p^(j)(z)/j!`, `A = max |a_j|` and `k` the
//! first index `j >= 1` with `a_j != 0`. With `u = a_0 * conj(a_k)` the step
//! moves a distance `C_k / 3` along `(u/|u|) e^{i theta}`, where `theta`
//! points into the centre of a descent sector of `|p|^2`. The resulting
//! decrease of `F = |p|^2` is bounded a priori:
//!
//! ```text
//! F(z1) - F(z0) <= -9 A^2 (C_k/3)^(k+1) <= -|u|^(k+1) / (2 * 18^k * A^(2k))
//! ```
//!
//! [`run_rnm`] iterates this step until `|p| <= eps` or `|p p'| <= eps`.
//! [`run_modified_rnm`] additionally treats points with `|p'| <= eps` as if
//! they were critical, which lets the orbit step past critical points.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Complex, DerivativeTable, Polynomial};

/// Relative threshold below which a Taylor coefficient counts as zero.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Every quantity computed for one robust Newton step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    /// Index of the first nonvanishing derivative.
    pub k: usize,
    pub u_k: Complex,
    pub gamma: f64,
    pub delta: f64,
    /// `c_k = max(|gamma|, |delta|)`.
    pub descent_coeff: f64,
    pub theta: f64,
    /// `C_k = c_k |u_k|^(2-k) / (6 A^2)`, always in `(0, 1/3]`.
    pub step_constant: f64,
    /// `C_k / 3`.
    pub step_size: f64,
    /// Unit vector `(u_k/|u_k|) e^{i theta}`.
    pub direction: Complex,
    /// `-9 A^2 (C_k/3)^(k+1)`.
    pub first_bound: f64,
    /// `Delta_k = -|u_k|^(k+1) / (2 * 18^k * A^(2k))`.
    pub decrement_bound: f64,
    pub amplitude: f64,
}

impl StepInfo {
    pub fn iterate(&self, z: Complex) -> Complex {
        z + self.direction * self.step_size
    }
}

/// Smallest `j >= 1` with `|p^(j)(z)/j!| > rel_tol * A(z)`.
pub fn k_index(d: &DerivativeTable, rel_tol: f64) -> Result<usize> {
    let threshold = rel_tol * d.amplitude();
    if d.value().norm() <= threshold {
        return Err(Error::AtRoot(d.point));
    }
    // The leading entry equals a_n, which is nonzero, so the fallback is
    // only reachable when rel_tol >= 1.
    Ok((1..=d.degree())
        .find(|&j| d.values[j].norm() > threshold)
        .unwrap_or(d.degree()))
}

/// Direction, angle and step constants for index `k` at the table's point.
pub fn descent_data(d: &DerivativeTable, k: usize) -> Result<StepInfo> {
    descent_from_parts(d.point, d.value(), d.values[k], k, d.amplitude())
}

fn descent_from_parts(
    z: Complex,
    value: Complex,
    kth: Complex,
    k: usize,
    amplitude: f64,
) -> Result<StepInfo> {
    let u = value * kth.conj();
    let u_abs = u.norm();
    if u_abs == 0.0 {
        return Err(Error::AtRoot(z));
    }
    let power = u.powi(k as i32 - 1);
    let gamma = 2.0 * power.re;
    let delta = -2.0 * power.im;
    let descent_coeff = gamma.abs().max(delta.abs());
    let kf = k as f64;
    // Ties go to the gamma branch.
    let theta = if gamma.abs() >= delta.abs() {
        if gamma < 0.0 {
            0.0
        } else {
            PI / kf
        }
    } else if delta < 0.0 {
        PI / (2.0 * kf)
    } else {
        3.0 * PI / (2.0 * kf)
    };
    let a2 = amplitude * amplitude;
    let step_constant = descent_coeff * u_abs.powi(2 - k as i32) / (6.0 * a2);
    let step_size = step_constant / 3.0;
    let direction = (u / u_abs) * unit_rotation(theta);
    let first_bound = -9.0 * a2 * step_size.powi(k as i32 + 1);
    let decrement_bound =
        -0.5 * u_abs.powi(k as i32 + 1) / (18f64.powi(k as i32) * a2.powi(k as i32));
    Ok(StepInfo {
        k,
        u_k: u,
        gamma,
        delta,
        descent_coeff,
        theta,
        step_constant,
        step_size,
        direction,
        first_bound,
        decrement_bound,
        amplitude,
    })
}

/// `e^{i theta}`, exact at multiples of a quarter turn so that real and
/// imaginary-axis orbits stay on their axis.
fn unit_rotation(theta: f64) -> Complex {
    let quarter = theta / (PI / 2.0);
    if quarter == quarter.round() {
        match quarter.round() as i64 % 4 {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        }
    } else {
        Complex::cis(theta)
    }
}

/// The two a-priori decrement bounds `(first, second)`; `first <= second < 0`.
pub fn decrement_bound(info: &StepInfo) -> (f64, f64) {
    (info.first_bound, info.decrement_bound)
}

/// One robust Newton step from `z`.
pub fn robust_step(p: &Polynomial, z: Complex, rel_tol: f64) -> Result<(Complex, StepInfo)> {
    check_point(z)?;
    robust_step_from_table(&p.normalized_derivatives(z), rel_tol)
}

fn robust_step_from_table(d: &DerivativeTable, rel_tol: f64) -> Result<(Complex, StepInfo)> {
    let k = k_index(d, rel_tol)?;
    let info = descent_data(d, k)?;
    Ok((info.iterate(d.point), info))
}

fn check_point(z: Complex) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("seed"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Plain,
    Modified,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoppingCriteria {
    pub eps: f64,
    pub max_iters: usize,
    pub mode: Mode,
    pub rel_tol: f64,
    /// Recompute `A(z)` every this many iterations (1 = always). In between
    /// the last value is doubled and used as a stand-in.
    pub amplitude_refresh: usize,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        StoppingCriteria {
            eps: 1e-10,
            max_iters: 1_000_000,
            mode: Mode::Plain,
            rel_tol: DEFAULT_REL_TOL,
            amplitude_refresh: 1,
        }
    }
}

impl StoppingCriteria {
    pub fn new(eps: f64, max_iters: usize, mode: Mode) -> Result<Self> {
        let crit = StoppingCriteria {
            eps,
            max_iters,
            mode,
            ..Default::default()
        };
        crit.validate()?;
        Ok(crit)
    }

    pub fn plain(eps: f64, max_iters: usize) -> Result<Self> {
        Self::new(eps, max_iters, Mode::Plain)
    }

    pub fn modified(eps: f64, max_iters: usize) -> Result<Self> {
        Self::new(eps, max_iters, Mode::Modified)
    }

    pub fn with_amplitude_refresh(mut self, every: usize) -> Self {
        self.amplitude_refresh = every.max(1);
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::InvalidCriteria(format!(
                "eps must lie in [0, 1), got {}",
                self.eps
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidCriteria(
                "max_iters must be at least 1".into(),
            ));
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidCriteria(format!(
                "rel_tol must lie in [0, 1), got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// `|p(z)| <= eps`.
    RootTolerance,
    /// `|p(z) p'(z)| <= eps` with `|p(z)| > eps` (plain RNM only).
    ProductTolerance,
    MaxIters,
    /// The iterate stopped moving in floating point before any tolerance
    /// was met.
    Stalled,
    /// Classic Newton hit a point with vanishing derivative.
    CriticalPoint,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::RootTolerance => "RootTolerance",
            Termination::ProductTolerance => "ProductTolerance",
            Termination::MaxIters => "MaxIters",
            Termination::Stalled => "Stalled",
            Termination::CriticalPoint => "CriticalPoint",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which rule produced a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plain,
    NearCriticalAccepted,
    NearCriticalRejected,
    Newton,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plain => "plain",
            Branch::NearCriticalAccepted => "near_critical_accepted",
            Branch::NearCriticalRejected => "near_critical_rejected",
            Branch::Newton => "newton",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Branch::Plain),
            "near_critical_accepted" => Ok(Branch::NearCriticalAccepted),
            "near_critical_rejected" => Ok(Branch::NearCriticalRejected),
            "newton" => Ok(Branch::Newton),
            other => Err(Error::Parse(format!("unknown branch `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub branch: Branch,
    /// Step data of the move actually taken; `None` for Newton steps.
    pub info: Option<StepInfo>,
}

/// Iterates `points[0..]` with `F` at each, one transition per move.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub points: Vec<Complex>,
    pub f_values: Vec<f64>,
    pub transitions: Vec<Transition>,
    pub termination: Termination,
}

impl Orbit {
    fn start(seed: Complex, f0: f64) -> Self {
        Orbit {
            points: vec![seed],
            f_values: vec![f0],
            transitions: Vec::new(),
            termination: Termination::MaxIters,
        }
    }

    pub(crate) fn push(&mut self, z: Complex, f: f64, transition: Transition) {
        self.points.push(z);
        self.f_values.push(f);
        self.transitions.push(transition);
    }

    pub fn final_point(&self) -> Complex {
        *self.points.last().expect("orbit always holds its seed")
    }

    /// `|p|` at the final point, for the polynomial the orbit was run on.
    pub fn residual(&self) -> f64 {
        self.f_values.last().copied().unwrap_or(f64::NAN).sqrt()
    }

    pub fn iterations(&self) -> usize {
        self.transitions.len()
    }
}

fn check_inputs(p: &Polynomial, seed: Complex, crit: &StoppingCriteria, mode: Mode) -> Result<()> {
    p.require_degree("robust Newton iteration", 2)?;
    check_point(seed)?;
    crit.validate()?;
    if crit.mode != mode {
        return Err(Error::InvalidCriteria(format!(
            "expected {mode:?} mode, got {:?}",
            crit.mode
        )));
    }
    Ok(())
}

/// Plain robust Newton iteration.
pub fn run_rnm(p: &Polynomial, seed: Complex, crit: &StoppingCriteria) -> Result<Orbit> {
    check_inputs(p, seed, crit, Mode::Plain)?;
    let mut z = seed;
    let mut cached_amplitude: Option<(f64, usize)> = None;
    let (value, slope) = p.evaluate_with_derivative(z);
    let mut orbit = Orbit::start(z, value.norm_sqr());
    let mut current = (value, slope);
    loop {
        let (value, slope) = current;
        let t = orbit.iterations();
        if value.norm() <= crit.eps {
            orbit.termination = Termination::RootTolerance;
            break;
        }
        if (value * slope).norm() <= crit.eps {
            orbit.termination = Termination::ProductTolerance;
            break;
        }
        if t >= crit.max_iters {
            orbit.termination = Termination::MaxIters;
            break;
        }

        let f = value.norm_sqr();
        let mut step = None;
        if let Some((stale, at)) = cached_amplitude {
            if t - at < crit.amplitude_refresh {
                let amplitude = (2.0 * stale)
                    .max(value.norm())
                    .max(slope.norm())
                    .max(p.leading().norm());
                if slope.norm() > crit.rel_tol * amplitude {
                    let info = descent_from_parts(z, value, slope, 1, amplitude)?;
                    let next = info.iterate(z);
                    if p.modulus_squared(next) < f {
                        step = Some((next, info));
                    }
                }
            }
        }
        let (next, info) = match step {
            Some(s) => s,
            None => {
                let d = p.normalized_derivatives(z);
                cached_amplitude = Some((d.amplitude(), t));
                match robust_step_from_table(&d, crit.rel_tol) {
                    Ok(s) => s,
                    Err(Error::AtRoot(_)) => {
                        orbit.termination = Termination::Stalled;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
        };
        if next == z {
            orbit.termination = Termination::Stalled;
            break;
        }
        z = next;
        current = p.evaluate_with_derivative(z);
        orbit.push(
            z,
            current.0.norm_sqr(),
            Transition {
                branch: Branch::Plain,
                info: Some(info),
            },
        );
    }
    Ok(orbit)
}

/// Smallest `j >= 1` with `|p^(j)(z)| > eps`, using the raw derivative
/// modulus `|entry j| * j!`.
pub fn modified_k_index(d: &DerivativeTable, eps: f64) -> usize {
    let mut factorial = 1.0;
    for j in 1..=d.degree() {
        factorial *= j as f64;
        if d.values[j].norm() * factorial > eps {
            return j;
        }
    }
    d.degree()
}

/// One step of the modified iteration at `z` on a monic polynomial.
pub fn modified_step(
    monic: &Polynomial,
    z: Complex,
    eps: f64,
    rel_tol: f64,
) -> Result<(Complex, Transition)> {
    check_point(z)?;
    modified_step_from_table(monic, &monic.normalized_derivatives(z), eps, rel_tol)
}

pub(crate) fn modified_step_from_table(
    monic: &Polynomial,
    d: &DerivativeTable,
    eps: f64,
    rel_tol: f64,
) -> Result<(Complex, Transition)> {
    let z = d.point;
    if d.derivative().norm() > eps {
        let (next, info) = robust_step_from_table(d, rel_tol)?;
        return Ok((
            next,
            Transition {
                branch: Branch::Plain,
                info: Some(info),
            },
        ));
    }
    let k_bar = modified_k_index(d, eps);
    let candidate = descent_data(d, k_bar)?;
    let trial = candidate.iterate(z);
    let change = monic.modulus_squared(trial) - d.value().norm_sqr();
    if change <= 0.5 * candidate.decrement_bound {
        return Ok((
            trial,
            Transition {
                branch: Branch::NearCriticalAccepted,
                info: Some(candidate),
            },
        ));
    }
    let (next, info) = robust_step_from_table(d, rel_tol)?;
    Ok((
        next,
        Transition {
            branch: Branch::NearCriticalRejected,
            info: Some(info),
        },
    ))
}

/// Modified robust Newton iteration on the monic normalisation of `p`.
/// Residuals and `F` values in the returned orbit refer to that monic
/// polynomial.
pub fn run_modified_rnm(p: &Polynomial, seed: Complex, crit: &StoppingCriteria) -> Result<Orbit> {
    check_inputs(p, seed, crit, Mode::Modified)?;
    let monic = p.monic();
    let mut z = seed;
    let mut d = monic.normalized_derivatives(z);
    let mut orbit = Orbit::start(z, d.value().norm_sqr());
    loop {
        if d.value().norm() <= crit.eps {
            orbit.termination = Termination::RootTolerance;
            break;
        }
        if orbit.iterations() >= crit.max_iters {
            orbit.termination = Termination::MaxIters;
            break;
        }
        let (next, transition) = match modified_step_from_table(&monic, &d, crit.eps, crit.rel_tol)
        {
            Ok(s) => s,
            Err(Error::AtRoot(_)) => {
                orbit.termination = Termination::Stalled;
                break;
            }
            Err(e) => return Err(e),
        };
        if next == z {
            orbit.termination = Termination::Stalled;
            break;
        }
        z = next;
        d = monic.normalized_derivatives(z);
        orbit.push(z, d.value().norm_sqr(), transition);
    }
    Ok(orbit)
}
