//! Classic Newton steps, Smale's approximate-zero test and the hybrid
//! solver that hands over from the robust iteration to Newton once the
//! test certifies quadratic convergence.

use crate::error::{Error, Result};
use crate::poly::{Complex, DerivativeTable, Polynomial};
use crate::rnm::{
    modified_step_from_table, Branch, Orbit, Termination, Transition, DEFAULT_REL_TOL,
};

/// Smale's constant `(13 - 3 sqrt 17) / 4 ~ 0.1577`.
pub fn alpha_0() -> f64 {
    (13.0 - 3.0 * 17f64.sqrt()) / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaReport {
    /// `|p / p'|`, the Newton step length.
    pub beta: f64,
    /// `max_{j>=2} |p^(j) / (j! p')|^(1/(j-1))`.
    pub gamma: f64,
    pub alpha: f64,
    pub certified: bool,
}

fn require_noncritical(d: &DerivativeTable, rel_tol: f64) -> Result<()> {
    if d.derivative().norm() <= rel_tol * d.amplitude() {
        Err(Error::CriticalPoint(d.point))
    } else {
        Ok(())
    }
}

pub fn newton_step(p: &Polynomial, z: Complex, rel_tol: f64) -> Result<Complex> {
    let d = p.normalized_derivatives(z);
    require_noncritical(&d, rel_tol)?;
    Ok(z - d.value() / d.derivative())
}

pub fn alpha_test(d: &DerivativeTable, rel_tol: f64) -> Result<AlphaReport> {
    require_noncritical(d, rel_tol)?;
    let slope = d.derivative();
    let beta = (d.value() / slope).norm();
    let gamma = d
        .values
        .iter()
        .enumerate()
        .skip(2)
        .map(|(j, &v)| (v / slope).norm().powf(1.0 / (j as f64 - 1.0)))
        .fold(0.0, f64::max);
    let alpha = beta * gamma;
    Ok(AlphaReport {
        beta,
        gamma,
        alpha,
        certified: alpha <= alpha_0(),
    })
}

/// Plain Newton iteration until `|p| <= eps`, a critical point, or the cap.
pub fn run_newton(
    p: &Polynomial,
    seed: Complex,
    eps: f64,
    max_iters: usize,
    rel_tol: f64,
) -> Result<Orbit> {
    p.require_degree("Newton iteration", 1)?;
    if !(seed.re.is_finite() && seed.im.is_finite()) {
        return Err(Error::NonFinite("seed"));
    }
    let mut z = seed;
    let mut d = p.normalized_derivatives(z);
    let mut orbit = Orbit {
        points: vec![z],
        f_values: vec![d.value().norm_sqr()],
        transitions: Vec::new(),
        termination: Termination::MaxIters,
    };
    loop {
        if d.value().norm() <= eps {
            orbit.termination = Termination::RootTolerance;
            break;
        }
        if orbit.iterations() >= max_iters {
            orbit.termination = Termination::MaxIters;
            break;
        }
        if require_noncritical(&d, rel_tol).is_err() {
            orbit.termination = Termination::CriticalPoint;
            break;
        }
        let next = z - d.value() / d.derivative();
        if !(next.re.is_finite() && next.im.is_finite()) {
            orbit.termination = Termination::CriticalPoint;
            break;
        }
        if next == z {
            orbit.termination = Termination::Stalled;
            break;
        }
        z = next;
        d = p.normalized_derivatives(z);
        orbit.push(
            z,
            d.value().norm_sqr(),
            Transition {
                branch: Branch::Newton,
                info: None,
            },
        );
    }
    Ok(orbit)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridOptions {
    pub eps: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Also compute the Newton iterate during the robust phase and keep
    /// whichever candidate has the smaller `|p|`.
    pub greedy_compare: bool,
    /// Newton steps allowed after a switch before falling back.
    pub newton_cap: usize,
}

impl HybridOptions {
    pub fn new(eps: f64) -> Self {
        HybridOptions {
            eps,
            ..Default::default()
        }
    }
}

impl Default for HybridOptions {
    fn default() -> Self {
        HybridOptions {
            eps: 1e-10,
            max_iters: 1_000_000,
            rel_tol: DEFAULT_REL_TOL,
            greedy_compare: false,
            newton_cap: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridResult {
    pub root: Complex,
    /// `F` values refer to the polynomial as given, not its monic form.
    pub orbit: Orbit,
    /// Index of the iterate at which the alpha test first certified.
    pub switched_at: Option<usize>,
    pub termination: Termination,
}

/// Modified robust Newton iteration with a switch to pure Newton at the
/// first iterate that passes the alpha test. Terminates on `|p(z)| <= eps`
/// for `p` as given.
pub fn hybrid_solve(p: &Polynomial, seed: Complex, opts: &HybridOptions) -> Result<HybridResult> {
    p.require_degree("hybrid solve", 2)?;
    if !(seed.re.is_finite() && seed.im.is_finite()) {
        return Err(Error::NonFinite("seed"));
    }
    if !(opts.eps > 0.0 && opts.eps < 1.0) {
        return Err(Error::InvalidCriteria(format!(
            "eps must lie in (0, 1), got {}",
            opts.eps
        )));
    }
    let monic = p.monic();
    let mut z = seed;
    let mut value = p.evaluate(z);
    let mut orbit = Orbit {
        points: vec![z],
        f_values: vec![value.norm_sqr()],
        transitions: Vec::new(),
        termination: Termination::MaxIters,
    };
    let mut switched_at = None;
    let mut newton_steps: Option<usize> = None;

    loop {
        if value.norm() <= opts.eps {
            orbit.termination = Termination::RootTolerance;
            break;
        }
        let t = orbit.iterations();
        if t >= opts.max_iters {
            orbit.termination = Termination::MaxIters;
            break;
        }
        let d = monic.normalized_derivatives(z);
        let noncritical = require_noncritical(&d, opts.rel_tol).is_ok();
        if newton_steps.is_none() && noncritical && alpha_test(&d, opts.rel_tol)?.certified {
            switched_at.get_or_insert(t);
            newton_steps = Some(0);
        }
        if newton_steps.is_some_and(|n| n >= opts.newton_cap) || !noncritical {
            newton_steps = None;
        }

        let (next, branch, info) = if let Some(n) = newton_steps {
            newton_steps = Some(n + 1);
            (z - d.value() / d.derivative(), Branch::Newton, None)
        } else {
            let (robust, transition) =
                match modified_step_from_table(&monic, &d, opts.eps, opts.rel_tol) {
                    Ok(s) => s,
                    Err(Error::AtRoot(_)) => {
                        orbit.termination = Termination::Stalled;
                        break;
                    }
                    Err(e) => return Err(e),
                };
            if opts.greedy_compare && noncritical {
                let newton = z - d.value() / d.derivative();
                if p.evaluate(newton).norm() < p.evaluate(robust).norm() {
                    (newton, Branch::Newton, None)
                } else {
                    (robust, transition.branch, transition.info)
                }
            } else {
                (robust, transition.branch, transition.info)
            }
        };
        if next == z {
            orbit.termination = Termination::Stalled;
            break;
        }
        z = next;
        value = p.evaluate(z);
        orbit.push(z, value.norm_sqr(), Transition { branch, info });
    }
    Ok(HybridResult {
        root: z,
        termination: orbit.termination,
        orbit,
        switched_at,
    })
}
