//! Cutting-plane solver for the two LMI programs behind the leakage measures.
//!
//! * Barycentric weights: `min sum_x c_x` over `c >= 0` with
//!   `sum_x c_x rho_x >= rho_x'` for every `x'`. Writing `c = mu * pi` with
//!   `pi` a distribution recovers the weight/scale form, and since every
//!   `rho_x` has unit trace the scale is exactly `mu = sum_x c_x`.
//! * Dominating operator: `min tr Y` over Hermitian `Y` with `Y >= rho_x` for
//!   every `x`. `Y` is stored as `d^2` real coordinates: the diagonal, then the
//!   real and imaginary parts of each upper off-diagonal entry.
//!
//! Each LMI `G(z) >= rho` is relaxed to linear cuts `v^dagger G(z) v >=
//! v^dagger rho v`. The relaxation is solved through its LP dual, where a new
//! cut is a new column, so the simplex basis carries over between rounds. The
//! most negative eigenvector of each violated LMI becomes the next cut.
//!
//! Every LP value is a lower bound. Upper bounds come from feasible points
//! built out of the LP point (scaled, shifted or pinched until all LMIs hold), so the
//! reported gap is a certificate rather than an estimate.

use num_complex::Complex64;

use crate::divergence::dominance_ratio;
use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, CVector, DensityOperator, HermitianOperator, Spectrum, PSD_TOL};
use crate::lp::DenseSimplex;

pub const DEFAULT_GAP_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_CUTS: usize = 2000;
/// Minimum eigenvalue at or above `-FEAS_TOL` counts as satisfied.
pub const FEAS_TOL: f64 = 1e-9;
/// Largest number of LP rows accepted (`d^2` for the operator form).
pub const MAX_LP_ROWS: usize = 4096;

/// Weight given to the uniform mixture when the weighted barycenter misses
/// part of some state's support.
const UNIFORM_MIX: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LmiForm {
    /// Nonnegative weights `c` with `sum_x c_x rho_x >= rho_x'`.
    BarycentricWeights,
    /// Hermitian `Y` with `Y >= rho_x`.
    DominatingOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmiProgram {
    states: Vec<DensityOperator>,
    form: LmiForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrimalPoint {
    Weights(Vec<f64>),
    Operator(HermitianOperator),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    IterationCap,
    Infeasible,
}

/// Bounds after one LP round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub cuts: usize,
    /// Value of this round's relaxation.
    pub relaxation_value: f64,
    /// Objective of this round's restored feasible point.
    pub feasible_value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// Objective of the best feasible point found (equal to `upper_bound`).
    pub value: f64,
    pub primal_point: PrimalPoint,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub status: SolveStatus,
    pub cut_count: usize,
    pub history: Vec<IterationRecord>,
}

impl SdpSolution {
    pub fn relative_gap(&self) -> f64 {
        (self.upper_bound - self.lower_bound) / self.upper_bound.max(1.0)
    }
}

/// The most violated LMI at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: usize,
    pub min_eigenvalue: f64,
    pub eigenvector: CVector,
}

impl Violation {
    pub fn is_feasible(&self) -> bool {
        self.min_eigenvalue >= -FEAS_TOL
    }
}

impl PrimalPoint {
    pub fn objective(&self) -> f64 {
        match self {
            PrimalPoint::Weights(c) => c.iter().sum(),
            PrimalPoint::Operator(y) => y.trace(),
        }
    }

    /// Barycentric distribution `c / sum(c)`, if this is a weight vector.
    pub fn weights_distribution(&self) -> Option<Vec<f64>> {
        match self {
            PrimalPoint::Weights(c) => {
                let s: f64 = c.iter().sum();
                (s > 0.0).then(|| c.iter().map(|x| x / s).collect())
            }
            PrimalPoint::Operator(_) => None,
        }
    }
}

impl LmiProgram {
    pub fn new(form: LmiForm, states: Vec<DensityOperator>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::invalid("states", "at least one constraint state is required"))?;
        let d = first.dim();
        for s in &states {
            Error::check_dim(d, s.dim())?;
        }
        let program = Self { states, form };
        if program.num_variables() > MAX_LP_ROWS {
            return Err(Error::Unsupported(format!(
                "{} LP variables exceeds the limit of {MAX_LP_ROWS}",
                program.num_variables()
            )));
        }
        Ok(program)
    }

    pub fn form(&self) -> LmiForm {
        self.form
    }

    pub fn constraint_states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn num_variables(&self) -> usize {
        match self.form {
            LmiForm::BarycentricWeights => self.states.len(),
            LmiForm::DominatingOperator => self.dim() * self.dim(),
        }
    }

    fn objective_coefficients(&self) -> Vec<f64> {
        match self.form {
            LmiForm::BarycentricWeights => vec![1.0; self.states.len()],
            LmiForm::DominatingOperator => {
                let d = self.dim();
                let mut c = vec![0.0; d * d];
                c[..d].fill(1.0);
                c
            }
        }
    }

    /// Coefficients of `v^dagger G(z) v` as a linear form in `z`.
    fn cut_coefficients(&self, v: &CVector) -> Vec<f64> {
        match self.form {
            LmiForm::BarycentricWeights => self
                .states
                .iter()
                .map(|s| s.operator().expectation(v))
                .collect(),
            LmiForm::DominatingOperator => {
                let d = self.dim();
                let mut a = Vec::with_capacity(d * d);
                a.extend(v.iter().map(|z| z.norm_sqr()));
                for i in 0..d {
                    for j in i + 1..d {
                        let w = v[i].conj() * v[j];
                        a.push(2.0 * w.re);
                        a.push(-2.0 * w.im);
                    }
                }
                a
            }
        }
    }

    fn point_from(&self, z: &[f64]) -> PrimalPoint {
        match self.form {
            LmiForm::BarycentricWeights => {
                PrimalPoint::Weights(z.iter().map(|x| x.max(0.0)).collect())
            }
            LmiForm::DominatingOperator => {
                let d = self.dim();
                let mut m = CMatrix::zeros(d, d);
                for i in 0..d {
                    m[(i, i)] = Complex64::new(z[i], 0.0);
                }
                let mut k = d;
                for i in 0..d {
                    for j in i + 1..d {
                        let e = Complex64::new(z[k], z[k + 1]);
                        m[(i, j)] = e;
                        m[(j, i)] = e.conj();
                        k += 2;
                    }
                }
                PrimalPoint::Operator(HermitianOperator::symmetrized(m))
            }
        }
    }

    /// `G(z)`, the operator that must dominate every constraint state.
    fn lhs(&self, point: &PrimalPoint) -> Result<HermitianOperator> {
        match point {
            PrimalPoint::Weights(c) => {
                if self.form != LmiForm::BarycentricWeights {
                    return Err(Error::invalid(
                        "point",
                        "weights given for the operator form",
                    ));
                }
                Error::check_dim(self.states.len(), c.len())?;
                let mut acc = HermitianOperator::zeros(self.dim());
                for (s, &cx) in self.states.iter().zip(c) {
                    acc = &acc + &(s.operator() * cx);
                }
                Ok(acc)
            }
            PrimalPoint::Operator(y) => {
                if self.form != LmiForm::DominatingOperator {
                    return Err(Error::invalid(
                        "point",
                        "operator given for the weight form",
                    ));
                }
                Error::check_dim(self.dim(), y.dim())?;
                Ok(y.clone())
            }
        }
    }

    /// Minimum eigenpair of `G - rho_x` for every constraint `x`.
    fn separate(&self, lhs: &HermitianOperator) -> Result<Vec<(f64, CVector)>> {
        self.states
            .iter()
            .map(|s| {
                let spec = (lhs - s.operator()).eig()?;
                Ok((spec.min(), spec.vector(0)))
            })
            .collect()
    }
}

/// Most violated LMI at `point`. A non-negative minimum eigenvalue (up to
/// [`FEAS_TOL`]) certifies feasibility.
pub fn violation_certificate(program: &LmiProgram, point: &PrimalPoint) -> Result<Violation> {
    let lhs = program.lhs(point)?;
    let mut worst: Option<Violation> = None;
    for (k, (min, v)) in program.separate(&lhs)?.into_iter().enumerate() {
        if worst.as_ref().is_none_or(|w| min < w.min_eigenvalue) {
            worst = Some(Violation {
                constraint: k,
                min_eigenvalue: min,
                eigenvector: v,
            });
        }
    }
    Ok(worst.expect("program has at least one constraint"))
}

struct CutSet<'a> {
    program: &'a LmiProgram,
    lp: DenseSimplex,
    cuts: usize,
}

impl<'a> CutSet<'a> {
    fn new(program: &'a LmiProgram) -> Result<Self> {
        let mut lp = DenseSimplex::new(&program.objective_coefficients())?;
        if program.form == LmiForm::BarycentricWeights {
            // Slack columns of the dual encode c >= 0.
            let n = program.num_variables();
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                lp.add_column(&e, 0.0)?;
            }
        }
        Ok(Self {
            program,
            lp,
            cuts: 0,
        })
    }

    fn add(&mut self, constraint: usize, v: &CVector) -> Result<()> {
        let a = self.program.cut_coefficients(v);
        let b = self.program.states[constraint].operator().expectation(v);
        self.lp.add_column(&a, -b)?;
        self.cuts += 1;
        Ok(())
    }

    /// Cut for whichever constraint state is largest along `v`.
    fn add_strongest(&mut self, v: &CVector) -> Result<()> {
        let k = (0..self.program.states.len())
            .map(|k| (k, self.program.states[k].operator().expectation(v)))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
            .0;
        self.add(k, v)
    }

    fn seed(&mut self) -> Result<()> {
        for k in 0..self.program.states.len() {
            let spec = self.program.states[k].operator().eig()?;
            for i in 0..spec.dim() {
                self.add(k, &spec.vector(i))?;
            }
        }
        if self.program.form == LmiForm::DominatingOperator {
            // Bound the diagonal and each off-diagonal pair so the relaxation
            // is bounded from the first round.
            let d = self.program.dim();
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..d {
                self.add_strongest(&unit(
                    d,
                    i,
                    Complex64::new(1.0, 0.0),
                    i,
                    Complex64::new(0.0, 0.0),
                ))?;
            }
            for i in 0..d {
                for j in i + 1..d {
                    for phase in [
                        Complex64::new(1.0, 0.0),
                        Complex64::new(-1.0, 0.0),
                        Complex64::new(0.0, 1.0),
                        Complex64::new(0.0, -1.0),
                    ] {
                        self.add_strongest(&unit(d, i, Complex64::new(s, 0.0), j, phase * s))?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn unit(d: usize, i: usize, a: Complex64, j: usize, b: Complex64) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] += a;
    v[j] += b;
    v
}

/// Solves `program` to relative gap `gap_tol`, adding at most `max_cuts`
/// separation cuts beyond the initial eigenvector seeds.
pub fn solve(program: &LmiProgram, gap_tol: f64, max_cuts: usize) -> Result<SdpSolution> {
    if !(gap_tol > 0.0 && gap_tol <= 1e-2) {
        return Err(Error::invalid(
            "gap_tol",
            format!("must lie in (0, 1e-2], got {gap_tol}"),
        ));
    }
    if max_cuts == 0 {
        return Err(Error::invalid("max_cuts", "must be positive"));
    }

    let mut cuts = CutSet::new(program)?;
    cuts.seed()?;
    let seeded = cuts.cuts;
    let pinch = match program.form {
        LmiForm::DominatingOperator => Some(pinching_basis(program)?),
        LmiForm::BarycentricWeights => None,
    };

    let mut lower = f64::NEG_INFINITY;
    let mut best: Option<(f64, PrimalPoint)> = None;
    let mut history = Vec::new();
    let status = loop {
        match cuts.lp.solve() {
            Ok(()) => {}
            Err(Error::LpInfeasible) => break SolveStatus::Infeasible,
            Err(e) => return Err(e),
        }
        let relaxation = -cuts.lp.objective();
        lower = lower.max(relaxation);
        let z: Vec<f64> = cuts.lp.duals().iter().map(|y| -y).collect();
        let point = program.point_from(&z);
        let lhs = program.lhs(&point)?;
        let violations = program.separate(&lhs)?;

        let (feasible_value, feasible_point) =
            restore(program, &point, &lhs, &violations, pinch.as_ref())?;
        if best.as_ref().is_none_or(|(v, _)| feasible_value < *v) {
            best = Some((feasible_value, feasible_point));
        }
        let upper = best.as_ref().map_or(f64::INFINITY, |b| b.0);
        history.push(IterationRecord {
            cuts: cuts.cuts,
            relaxation_value: relaxation,
            feasible_value,
            lower_bound: lower,
            upper_bound: upper,
        });

        if (upper - lower) / upper.max(1.0) <= gap_tol {
            break SolveStatus::Optimal;
        }
        if cuts.cuts - seeded >= max_cuts {
            break SolveStatus::IterationCap;
        }
        let before = cuts.cuts;
        for (k, (min, v)) in violations.iter().enumerate() {
            if *min < -FEAS_TOL && cuts.cuts - seeded < max_cuts {
                cuts.add(k, v)?;
            }
        }
        if cuts.cuts == before {
            // No separating cut is left, so the relaxation is as tight as it
            // can be made at this tolerance.
            break SolveStatus::IterationCap;
        }
    };

    let (value, primal_point) = match best {
        Some(b) => b,
        None => (
            f64::INFINITY,
            program.point_from(&vec![0.0; program.num_variables()]),
        ),
    };
    let lower_bound = if status == SolveStatus::Infeasible {
        f64::INFINITY
    } else {
        lower.min(value)
    };
    Ok(SdpSolution {
        value,
        primal_point,
        lower_bound,
        upper_bound: value,
        status,
        cut_count: cuts.cuts,
        history,
    })
}

/// Cheapest feasible point derived from the LP point.
fn restore(
    program: &LmiProgram,
    point: &PrimalPoint,
    lhs: &HermitianOperator,
    violations: &[(f64, CVector)],
    pinch: Option<&CMatrix>,
) -> Result<(f64, PrimalPoint)> {
    let mut candidates: Vec<(f64, PrimalPoint)> = Vec::new();
    if violations.iter().all(|(min, _)| *min >= -FEAS_TOL) {
        candidates.push((point.objective(), point.clone()));
    }
    match point {
        PrimalPoint::Weights(c) => {
            candidates.push(scale_weights(program, c)?);
        }
        PrimalPoint::Operator(y) => {
            let shift = violations
                .iter()
                .map(|(min, _)| (-min).max(0.0))
                .fold(0.0, f64::max);
            candidates.push(shifted(program, y, shift));
            if let Some(basis) = pinch {
                let pinched = pinched(y, basis)?;
                let shift = program
                    .separate(&pinched)?
                    .iter()
                    .map(|(min, _)| (-min).max(0.0))
                    .fold(0.0, f64::max);
                candidates.push(shifted(program, &pinched, shift));
            }
            let spec = lhs.eig()?;
            if spec.max() > 0.0 && spec.is_psd(PSD_TOL) {
                if let Some(mu) = max_dominance(program, &spec)? {
                    let scaled = y.scale(mu);
                    candidates.push((scaled.trace(), PrimalPoint::Operator(scaled)));
                }
            }
        }
    }
    Ok(candidates
        .into_iter()
        .fold(None, |best: Option<(f64, PrimalPoint)>, cur| match best {
            Some(b) if b.0 <= cur.0 => Some(b),
            _ => Some(cur),
        })
        .expect("at least one candidate"))
}

fn shifted(program: &LmiProgram, y: &HermitianOperator, shift: f64) -> (f64, PrimalPoint) {
    let out = y + &HermitianOperator::identity(program.dim()).scale(shift);
    (out.trace(), PrimalPoint::Operator(out))
}

/// Eigenbasis of a generic positive combination of the constraint states.
/// When the states commute it diagonalizes all of them at once.
fn pinching_basis(program: &LmiProgram) -> Result<CMatrix> {
    let mut acc = HermitianOperator::zeros(program.dim());
    for (k, s) in program.states.iter().enumerate() {
        let w = 1.0 / (k as f64 + std::f64::consts::SQRT_2);
        acc = &acc + &(s.operator() * w);
    }
    Ok(acc.eig()?.eigenvectors)
}

/// Drops the off-diagonal part of `y` in `basis`. This keeps the trace, and
/// for states diagonal in `basis` it cannot break a satisfied constraint.
fn pinched(y: &HermitianOperator, basis: &CMatrix) -> Result<HermitianOperator> {
    let local = y.conjugate_by(&basis.adjoint())?;
    let diag: Vec<f64> = (0..y.dim()).map(|i| local.matrix()[(i, i)].re).collect();
    HermitianOperator::from_real_diagonal(&diag).conjugate_by(basis)
}

/// `max_x inf{mu : rho_x <= mu sigma}`, or `None` if a state leaves the support.
fn max_dominance(program: &LmiProgram, sigma: &Spectrum) -> Result<Option<f64>> {
    let mut mu: f64 = 0.0;
    for s in &program.states {
        match dominance_ratio(s.operator(), sigma)? {
            Some(r) => mu = mu.max(r),
            None => return Ok(None),
        }
    }
    Ok(Some(mu))
}

/// Rescales the barycentric direction of `c` to the smallest feasible multiple.
fn scale_weights(program: &LmiProgram, c: &[f64]) -> Result<(f64, PrimalPoint)> {
    let m = c.len();
    let total: f64 = c.iter().sum();
    let mut pi: Vec<f64> = if total > 0.0 {
        c.iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / m as f64; m]
    };
    for attempt in 0..2 {
        if attempt == 1 {
            pi.iter_mut()
                .for_each(|p| *p = (1.0 - UNIFORM_MIX) * *p + UNIFORM_MIX / m as f64);
        }
        let bary = program.lhs(&PrimalPoint::Weights(pi.clone()))?;
        if let Some(mu) = max_dominance(program, &bary.eig()?)? {
            let weights: Vec<f64> = pi.iter().map(|p| p * mu).collect();
            return Ok((weights.iter().sum(), PrimalPoint::Weights(weights)));
        }
    }
    // The uniform mixture contains every support, so this is unreachable up
    // to rounding; fall back to the always-feasible all-ones point.
    Ok((m as f64, PrimalPoint::Weights(vec![1.0; m])))
}
