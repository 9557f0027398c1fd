//! End-to-end solvers: closed-form quadratics, cubics seeded at a critical
//! point, and general polynomials by repeated deflation. Every root is
//! polished against the original polynomial before it is reported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Complex, Polynomial};
use crate::rnm::{Termination, DEFAULT_REL_TOL};
use crate::smale::{hybrid_solve, HybridOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    ClosedForm,
    Rnm,
    Hybrid,
    Polished,
}

/// Roots with `|p(root)|` on the polynomial that was solved.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Complex>,
    pub residuals: Vec<f64>,
    pub methods: Vec<RootMethod>,
}

impl RootSet {
    fn build(p: &Polynomial, roots: Vec<Complex>, methods: Vec<RootMethod>) -> RootSet {
        let residuals = roots.iter().map(|&r| p.evaluate(r).norm()).collect();
        RootSet {
            roots,
            residuals,
            methods,
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Index of the root closest to `z`.
    pub fn nearest(&self, z: Complex) -> Option<(usize, f64)> {
        self.roots
            .iter()
            .map(|r| (r - z).norm())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[derive(Serialize, Deserialize)]
struct RootSetJson {
    roots: Vec<[f64; 2]>,
    residuals: Vec<f64>,
    method: Vec<RootMethod>,
}

impl Serialize for RootSet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        RootSetJson {
            roots: self.roots.iter().map(|r| [r.re, r.im]).collect(),
            residuals: self.residuals.clone(),
            method: self.methods.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootSet {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = RootSetJson::deserialize(deserializer)?;
        if raw.roots.len() != raw.residuals.len() || raw.roots.len() != raw.method.len() {
            return Err(serde::de::Error::custom(
                "roots, residuals and method differ in length",
            ));
        }
        Ok(RootSet {
            roots: raw
                .roots
                .iter()
                .map(|&[re, im]| Complex::new(re, im))
                .collect(),
            residuals: raw.residuals,
            methods: raw.method,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub eps: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl SolveOptions {
    pub fn new(eps: f64) -> Self {
        SolveOptions {
            eps,
            ..Default::default()
        }
    }

    fn hybrid(&self) -> HybridOptions {
        HybridOptions {
            eps: self.eps,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            ..Default::default()
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            eps: 1e-10,
            max_iters: 1_000_000,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

/// Both roots of `a2 z^2 + a1 z + a0`, larger magnitude first.
fn quadratic_roots(a0: Complex, a1: Complex, a2: Complex) -> [Complex; 2] {
    let disc = (a1 * a1 - a0 * a2 * 4.0).sqrt();
    // Pick the sign that avoids cancellation.
    let plus = a1 + disc;
    let minus = a1 - disc;
    let sum = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };
    let q = -sum / 2.0;
    if q.norm() == 0.0 {
        return [Complex::new(0.0, 0.0); 2];
    }
    [q / a2, a0 / q]
}

fn require_exact_degree(p: &Polynomial, op: &'static str, need: usize) -> Result<()> {
    if p.degree() != need {
        return Err(Error::WrongDegree {
            op,
            need,
            got: p.degree(),
        });
    }
    Ok(())
}

pub fn solve_quadratic(p: &Polynomial) -> Result<RootSet> {
    require_exact_degree(p, "solve_quadratic", 2)?;
    let a = p.coeffs();
    let roots = quadratic_roots(a[0], a[1], a[2]);
    Ok(RootSet::build(
        p,
        roots.to_vec(),
        vec![RootMethod::ClosedForm; 2],
    ))
}

/// Roots of `p'`, i.e. the critical points of `p`.
pub fn critical_points(p: &Polynomial, opts: &SolveOptions) -> Result<Vec<Complex>> {
    p.require_degree("critical_points", 1)?;
    let derivative = p.derivative()?;
    if derivative.degree() == 0 {
        return Ok(Vec::new());
    }
    Ok(solve_all(&derivative, opts)?.roots)
}

/// `M = min |p(w)|` over critical points `w` that are not roots (`|p(w)| > eps`);
/// infinite when every critical point is a root.
pub fn critical_threshold(p: &Polynomial, opts: &SolveOptions) -> Result<f64> {
    p.require_degree("critical_threshold", 2)?;
    Ok(critical_points(p, opts)?
        .into_iter()
        .map(|w| p.evaluate(w).norm())
        .filter(|&m| m > opts.eps)
        .fold(f64::INFINITY, f64::min))
}

/// Cubic solver: descend from the critical point with the
/// smaller `|p|`, deflate, and finish the quadratic in closed form.
pub fn solve_cubic(p: &Polynomial, opts: &SolveOptions) -> Result<RootSet> {
    require_exact_degree(p, "solve_cubic", 3)?;
    let start = critical_points(p, opts)?
        .into_iter()
        .min_by(|a, b| p.evaluate(*a).norm().total_cmp(&p.evaluate(*b).norm()))
        .expect("a cubic has two critical points");
    let (first, method, converged) = if p.evaluate(start).norm() <= opts.eps {
        (start, RootMethod::ClosedForm, true)
    } else {
        descend(p, start, opts)?
    };
    let (quotient, _) = p.deflate(first)?;
    let a = quotient.coeffs();
    let [r2, r3] = quadratic_roots(a[0], a[1], a[2]);
    polish(
        p,
        vec![first, r2, r3],
        vec![method, RootMethod::ClosedForm, RootMethod::ClosedForm],
        opts,
        converged,
    )
}

/// All roots of `p`, by degree: closed form up to 2, [`solve_cubic`] for 3,
/// deflation with the modified iteration beyond.
pub fn solve_all(p: &Polynomial, opts: &SolveOptions) -> Result<RootSet> {
    p.require_degree("solve_all", 1)?;
    match p.degree() {
        1 => {
            let a = p.coeffs();
            let root = -a[0] / a[1];
            finish(
                RootSet::build(p, vec![root], vec![RootMethod::ClosedForm]),
                opts,
                true,
            )
        }
        2 => polish(
            p,
            solve_quadratic(p)?.roots,
            vec![RootMethod::ClosedForm; 2],
            opts,
            true,
        ),
        3 => solve_cubic(p, opts),
        _ => solve_by_deflation(p, opts),
    }
}

/// One root of `p` from `seed`: the modified iteration, handing over to
/// Newton once the alpha test certifies. The robust step alone contracts
/// by roughly `1 - |p'|^2 / (9 A^2)` per step near a simple root, which is
/// far too slow when roots are clustered.
fn descend(
    p: &Polynomial,
    seed: Complex,
    opts: &SolveOptions,
) -> Result<(Complex, RootMethod, bool)> {
    let result = hybrid_solve(p, seed, &opts.hybrid())?;
    let method = if result.switched_at.is_some() {
        RootMethod::Hybrid
    } else {
        RootMethod::Rnm
    };
    Ok((
        result.root,
        method,
        result.termination == Termination::RootTolerance,
    ))
}

fn first_seed(p: &Polynomial, rel_tol: f64) -> Complex {
    let d = p.normalized_derivatives(Complex::new(0.0, 0.0));
    if d.derivative().norm() > rel_tol * d.amplitude() {
        Complex::new(0.0, 0.0)
    } else {
        Complex::from_polar(p.root_radius() / 2.0, 1.0)
    }
}

fn solve_by_deflation(p: &Polynomial, opts: &SolveOptions) -> Result<RootSet> {
    let mut converged = true;
    let mut roots = Vec::with_capacity(p.degree());
    let mut methods = Vec::with_capacity(p.degree());
    let mut quotient = p.clone();
    let mut seed = first_seed(p, opts.rel_tol);
    while quotient.degree() > 3 {
        let (root, method, ok) = descend(&quotient, seed, opts)?;
        converged &= ok;
        roots.push(root);
        methods.push(method);
        quotient = quotient.deflate(root)?.0;
        seed = root;
    }
    let rest = match solve_all(&quotient, opts) {
        Ok(set) => set,
        Err(Error::ConvergenceFailure(partial)) => {
            converged = false;
            *partial
        }
        Err(e) => return Err(e),
    };
    roots.extend(rest.roots);
    methods.extend(rest.methods);
    polish(p, roots, methods, opts, converged)
}

/// Re-runs the hybrid solver on `p` from every approximation whose
/// residual exceeds `eps`.
fn polish(
    p: &Polynomial,
    mut roots: Vec<Complex>,
    mut methods: Vec<RootMethod>,
    opts: &SolveOptions,
    mut converged: bool,
) -> Result<RootSet> {
    let hybrid = opts.hybrid();
    for (root, method) in roots.iter_mut().zip(methods.iter_mut()) {
        if p.evaluate(*root).norm() <= opts.eps {
            continue;
        }
        let result = hybrid_solve(p, *root, &hybrid)?;
        converged &= result.termination == Termination::RootTolerance;
        *root = result.root;
        *method = RootMethod::Polished;
    }
    finish(RootSet::build(p, roots, methods), opts, converged)
}

fn finish(set: RootSet, opts: &SolveOptions, converged: bool) -> Result<RootSet> {
    if converged && set.residuals.iter().all(|&r| r <= opts.eps) {
        Ok(set)
    } else {
        Err(Error::ConvergenceFailure(Box::new(set)))
    }
}
