//! Empirical checks of the step guarantees on a seeded random corpus.
//!
//! Each sample is a polynomial of degree 2 to 10 with coefficients in the
//! unit box and a seed in `[-2, 2]^2`. One sample in five is rebuilt so that
//! its seed is a critical point of order 1 or 2, which exercises the
//! higher-index step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Complex, Polynomial};
use crate::rnm::{descent_data, k_index, StepInfo, DEFAULT_REL_TOL};

pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_RNG_SEED: u64 = 0x5eed;

/// Absolute-plus-relative slack on decrement comparisons.
const SLACK: f64 = 1e-9;
/// Relative tolerance for the sign identity of the descent direction.
const SIGN_TOL: f64 = 1e-10;
/// Largest move of the finite-difference descent probe.
const PROBE_LENGTH: f64 = 1e-8;
/// Relative change of `F` below which the probe cannot resolve descent.
const PROBE_FLOOR: f64 = 1e-10;
const SAMPLE_ALPHAS: [f64; 3] = [1e-3, 1e-2, 1e-1];

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub poly: Polynomial,
    pub seed: Complex,
}

fn unit_box(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

fn nonzero(rng: &mut ChaCha8Rng) -> Complex {
    loop {
        let c = unit_box(rng);
        if c.norm() > 1e-3 {
            return c;
        }
    }
}

/// Deterministic corpus of `n` samples for `rng_seed`.
pub fn random_corpus(n: usize, rng_seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..n).map(|_| random_sample(&mut rng)).collect()
}

fn random_sample(rng: &mut ChaCha8Rng) -> Sample {
    let degree = rng.gen_range(2..=10usize);
    let seed = Complex::new(rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
    let critical_order = if rng.gen_ratio(1, 5) {
        rng.gen_range(2..=3usize).min(degree)
    } else {
        1
    };
    let mut coeffs: Vec<Complex> = (0..degree).map(|_| unit_box(rng)).collect();
    coeffs.push(nonzero(rng));
    let poly = if critical_order > 1 {
        // q(w) with q'(0) = ... = q^(k-1)(0) = 0, shifted so that w = 0
        // lands on the seed.
        coeffs[0] = nonzero(rng);
        coeffs[critical_order] = nonzero(rng);
        for c in &mut coeffs[1..critical_order] {
            *c = Complex::new(0.0, 0.0);
        }
        Polynomial::new(coeffs)
            .expect("nonzero leading coefficient")
            .taylor_shift(-seed)
    } else {
        Polynomial::new(coeffs).expect("nonzero leading coefficient")
    };
    Sample { poly, seed }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    ModulusReduction,
    SignIdentity,
    StepBound,
    SegmentContainment,
    DescentSector,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::ModulusReduction,
        Check::SignIdentity,
        Check::StepBound,
        Check::SegmentContainment,
        Check::DescentSector,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::ModulusReduction => "modulus_reduction",
            Check::SignIdentity => "sign_identity",
            Check::StepBound => "step_bound",
            Check::SegmentContainment => "segment_containment",
            Check::DescentSector => "descent_sector",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub check: Check,
    pub passed: usize,
    pub failed: usize,
}

/// Enough to replay a failing check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: Check,
    pub sample: usize,
    pub rng_seed: u64,
    pub coeffs: Vec<[f64; 2]>,
    pub seed: [f64; 2],
    pub observed: f64,
    pub limit: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub rng_seed: u64,
    pub tallies: Vec<Tally>,
    pub first_failure: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0)
    }

    pub fn tally(&self, check: Check) -> &Tally {
        self.tallies
            .iter()
            .find(|t| t.check == check)
            .expect("every check is tallied")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub rng_seed: u64,
    /// Multiplies the step constant before the checks run. Anything other
    /// than 1 deliberately breaks the step and should be caught.
    pub step_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: DEFAULT_SAMPLES,
            rng_seed: DEFAULT_RNG_SEED,
            step_scale: 1.0,
        }
    }
}

/// Outcome of one check on one sample: `observed <= limit` passes.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub check: Check,
    pub observed: f64,
    pub limit: f64,
    pub detail: String,
}

impl Outcome {
    pub fn holds(&self) -> bool {
        self.observed <= self.limit
    }
}

/// Step data at `z`, with the step constant multiplied by `scale`.
fn scaled_step(info: StepInfo, scale: f64) -> StepInfo {
    if scale == 1.0 {
        return info;
    }
    let step_constant = info.step_constant * scale;
    let step_size = step_constant / 3.0;
    StepInfo {
        step_constant,
        step_size,
        first_bound: -9.0 * info.amplitude * info.amplitude * step_size.powi(info.k as i32 + 1),
        ..info
    }
}

/// `-C x^k + x^(k+1) / (1 - x)`.
pub fn step_polynomial(c: f64, k: usize, x: f64) -> f64 {
    -c * x.powi(k as i32) + x.powi(k as i32 + 1) / (1.0 - x)
}

fn step_bound_outcome(c: f64, k: usize) -> Outcome {
    let x = c / 3.0;
    Outcome {
        check: Check::StepBound,
        observed: step_polynomial(c, k, x),
        limit: -1.5 * x.powi(k as i32 + 1),
        detail: format!("C = {c:e}, k = {k}"),
    }
}

/// Runs every check at the sample's seed. Returns `None` when the seed is
/// a root, where no step is defined.
pub fn check_sample(sample: &Sample, step_scale: f64) -> Result<Option<Vec<Outcome>>> {
    let p = &sample.poly;
    let z = sample.seed;
    let d = p.normalized_derivatives(z);
    let k = match k_index(&d, DEFAULT_REL_TOL) {
        Ok(k) => k,
        Err(Error::AtRoot(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let info = scaled_step(descent_data(&d, k)?, step_scale);
    let f0 = d.value().norm_sqr();
    let next = info.iterate(z);
    let mut out = Vec::with_capacity(8);

    out.push(Outcome {
        check: Check::ModulusReduction,
        observed: p.modulus_squared(next) - f0,
        limit: info.first_bound + SLACK * (1.0 + f0),
        detail: format!("k = {k}, F = {f0:e}"),
    });

    let u = info.u_k;
    let expected_scale = info.descent_coeff * u.norm_sqr();
    for alpha in SAMPLE_ALPHAS {
        let w = u * Complex::cis(info.theta) * alpha;
        let g = u.conj() * w.powi(k as i32) + u * w.conj().powi(k as i32);
        let expected = -expected_scale * alpha.powi(k as i32);
        out.push(Outcome {
            check: Check::SignIdentity,
            observed: (g - expected).norm(),
            limit: SIGN_TOL * expected.abs(),
            detail: format!("alpha = {alpha:e}, k = {k}"),
        });
    }

    out.push(step_bound_outcome(info.step_constant, k));

    if k == 1 {
        let newton = z - d.value() / d.derivative();
        // The displacement is taken before it is added to `z`, which would
        // round away most of its digits when the step is tiny.
        let t = info.direction * info.step_size / (newton - z);
        let off_line = t.im.abs() - SIGN_TOL * t.norm();
        let outside = (-t.re).max(t.re - (1.0 / 9.0 + 1e-12));
        out.push(Outcome {
            check: Check::SegmentContainment,
            observed: off_line.max(outside),
            limit: 0.0,
            detail: format!("interpolation parameter {t}"),
        });
    }

    // The sector test is the sign of Re(conj(a_0) a_k d^k). The probe
    // confirms it with a short move, evaluated through the Taylor table so
    // that the move is not rounded into `z`, and is skipped when the
    // predicted change sits below the rounding floor of `F`.
    let sector = (d.value().conj() * d.values[k] * info.direction.powi(k as i32)).re;
    out.push(Outcome {
        check: Check::DescentSector,
        observed: sector,
        limit: -f64::MIN_POSITIVE,
        detail: "cone membership".into(),
    });
    let t = PROBE_LENGTH.min(info.step_size);
    if 2.0 * sector.abs() * t.powi(k as i32) > PROBE_FLOOR * f0 {
        let w = info.direction * t;
        let shifted = d
            .values
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &a| acc * w + a);
        out.push(Outcome {
            check: Check::DescentSector,
            observed: shifted.norm_sqr() - f0,
            limit: -f64::MIN_POSITIVE,
            detail: format!("probe at t = {t:e}"),
        });
    }
    Ok(Some(out))
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if !(cfg.step_scale > 0.0 && cfg.step_scale.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "step scale must be positive, got {}",
            cfg.step_scale
        )));
    }
    let mut tallies: Vec<Tally> = Check::ALL
        .iter()
        .map(|&check| Tally {
            check,
            passed: 0,
            failed: 0,
        })
        .collect();
    let mut first_failure = None;

    let mut record = |outcome: Outcome, sample: Option<(usize, &Sample)>| {
        let tally = tallies
            .iter_mut()
            .find(|t| t.check == outcome.check)
            .expect("every check is tallied");
        if outcome.holds() {
            tally.passed += 1;
            return;
        }
        tally.failed += 1;
        if first_failure.is_none() {
            let (index, coeffs, seed) = match sample {
                Some((i, s)) => (
                    i,
                    s.poly.coeffs().iter().map(|c| [c.re, c.im]).collect(),
                    [s.seed.re, s.seed.im],
                ),
                None => (0, Vec::new(), [0.0, 0.0]),
            };
            first_failure = Some(Counterexample {
                check: outcome.check,
                sample: index,
                rng_seed: cfg.rng_seed,
                coeffs,
                seed,
                observed: outcome.observed,
                limit: outcome.limit,
                detail: outcome.detail,
            });
        }
    };

    if cfg.samples > 0 {
        for c in [0.01, 0.1, 1.0 / 3.0] {
            for k in 1..=3 {
                record(step_bound_outcome(c, k), None);
            }
        }
    }
    for (i, sample) in random_corpus(cfg.samples, cfg.rng_seed).iter().enumerate() {
        if let Some(outcomes) = check_sample(sample, cfg.step_scale)? {
            for outcome in outcomes {
                record(outcome, Some((i, sample)));
            }
        }
    }
    Ok(VerifyReport {
        samples: cfg.samples,
        rng_seed: cfg.rng_seed,
        tallies,
        first_failure,
    })
}
