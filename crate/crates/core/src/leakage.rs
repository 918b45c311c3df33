//! Leakage of a classical symbol through the quantum state that encodes it.
//!
//! An [`Ensemble`] pairs a prior over symbols with one density operator per
//! symbol. Three measures are computed, in bits:
//!
//! * maximal leakage: the best guessing advantage over all measurements,
//!   `log2 sum_y max_x tr(rho_x F_y)` maximized over POVMs;
//! * barycentric leakage: `log2 min_pi max_x exp(D_inf(rho_x || sum pi rho))`;
//! * pairwise leakage: `max_{x, x'} D_inf(rho_x || rho_x')`.
//!
//! Maximal leakage is the log of the minimum-trace dominating operator program.
//! Merging the outcomes of any POVM by their arg-max symbol gives a POVM with
//! one outcome per symbol and the same value, so the supremum is the optimum
//! of `max sum_x tr(rho_x M_x)` over such POVMs. That program's dual is
//! `min tr Y` subject to `Y >= rho_x`, and `M_x = I / |X|` is strictly
//! feasible, so there is no duality gap.

use num_complex::Complex64;

use crate::divergence::{sandwiched_renyi, ProbVector, RenyiOrder};
use crate::error::{Error, Result};
use crate::hermitian::{
    random_unitary, von_neumann_entropy, CMatrix, CVector, DensityOperator, HermitianOperator,
    PSD_TOL,
};
use crate::sdp::{
    self, LmiForm, LmiProgram, PrimalPoint, SolveStatus, DEFAULT_GAP_TOL, DEFAULT_MAX_CUTS,
};

/// Tolerance on `sum_y F_y = I`.
pub const POVM_TOL: f64 = 1e-9;
/// Slack added to every inequality-chain comparison, in bits.
pub const CHAIN_SLACK: f64 = 1e-6;
pub const DEFAULT_RESTARTS: usize = 32;

const ASCENT_START_STEP: f64 = std::f64::consts::FRAC_PI_4;
const ASCENT_MIN_STEP: f64 = 1e-7;
const ASCENT_MAX_SWEEPS: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    prior: ProbVector,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(prior: ProbVector, states: Vec<DensityOperator>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::invalid("states", "at least one state is required"));
        }
        Error::check_dim(states.len(), prior.len())?;
        if let Some(p) = prior.as_slice().iter().find(|&&p| p <= 0.0) {
            return Err(Error::InvalidProbability(format!(
                "prior must be strictly positive, found {p}"
            )));
        }
        let d = states[0].dim();
        for s in &states {
            Error::check_dim(d, s.dim())?;
        }
        Ok(Self { prior, states })
    }

    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let prior = ProbVector::uniform(states.len())?;
        Self::new(prior, states)
    }

    pub fn prior(&self) -> &ProbVector {
        &self.prior
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `sum_x p(x) rho_x`.
    pub fn average_state(&self) -> Result<DensityOperator> {
        let mut acc = HermitianOperator::zeros(self.dim());
        for (s, &p) in self.states.iter().zip(self.prior.as_slice()) {
            acc = &acc + &(s.operator() * p);
        }
        DensityOperator::normalized(acc, 1e-9)
    }

    /// Same prior, every state replaced by `f(state)`.
    pub fn map_states(
        &self,
        f: impl Fn(&DensityOperator) -> Result<DensityOperator>,
    ) -> Result<Self> {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.prior.clone(), states)
    }
}

/// Measurement given by positive operators that sum to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let d = elements
            .first()
            .ok_or_else(|| Error::invalid("elements", "a POVM needs at least one element"))?
            .dim();
        let mut sum = HermitianOperator::zeros(d);
        for f in &elements {
            Error::check_dim(d, f.dim())?;
            let spec = f.eig()?;
            if !spec.is_psd(PSD_TOL) {
                return Err(Error::NotPsd {
                    min_eigenvalue: spec.min(),
                });
            }
            sum = &sum + f;
        }
        let defect = sum.max_abs_diff(&HermitianOperator::identity(d));
        if defect > POVM_TOL {
            return Err(Error::invalid(
                "elements",
                format!("elements sum to identity only within {defect:e}"),
            ));
        }
        Ok(Self { elements })
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    pub fn computational_basis(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|i| {
                let mut diag = vec![0.0; dim];
                diag[i] = 1.0;
                HermitianOperator::from_real_diagonal(&diag)
            })
            .collect();
        Self { elements }
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Outcome distribution `tr(rho F_y)`.
    pub fn probabilities(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        Error::check_dim(self.dim(), rho.dim())?;
        Ok(self
            .elements
            .iter()
            .map(|f| rho.operator().trace_product(f).max(0.0))
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeakageKind {
    Maximal,
    Barycentric,
    Pairwise,
    SandwichedInfMI,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LeakageWitness {
    /// Barycenter weights `pi`.
    Weights(Vec<f64>),
    /// Minimum-trace operator dominating every state.
    DominatingOperator(HermitianOperator),
    /// Ordered pair attaining the pairwise maximum.
    Pair { from: usize, to: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageCertificate {
    /// Bits; `+inf` only for pairwise leakage.
    pub value: f64,
    pub kind: LeakageKind,
    pub witness: LeakageWitness,
    /// Certified bracket width in bits: the true value lies in `[value - gap, value]`.
    pub gap: f64,
    pub status: SolveStatus,
}

/// `max_{x != x'} D_inf(rho_x || rho_x')`, exact. The prior plays no role.
pub fn pairwise_leakage(e: &Ensemble) -> Result<LeakageCertificate> {
    let mut value = 0.0;
    let mut pair = (0, 0);
    let mut first = true;
    for (x, rx) in e.states.iter().enumerate() {
        for (y, ry) in e.states.iter().enumerate() {
            if x == y {
                continue;
            }
            let d = sandwiched_renyi(rx, ry.operator(), RenyiOrder::Infinity)?;
            if first || d > value {
                value = d;
                pair = (x, y);
                first = false;
            }
        }
    }
    Ok(LeakageCertificate {
        value: value.max(0.0),
        kind: LeakageKind::Pairwise,
        witness: LeakageWitness::Pair {
            from: pair.0,
            to: pair.1,
        },
        gap: 0.0,
        status: SolveStatus::Optimal,
    })
}

/// `log2` of the barycentric-weights program; the witness is the barycenter.
pub fn barycentric_leakage(e: &Ensemble, gap_tol: f64) -> Result<LeakageCertificate> {
    let program = LmiProgram::new(LmiForm::BarycentricWeights, e.states.clone())?;
    let sol = sdp::solve(&program, gap_tol, DEFAULT_MAX_CUTS)?;
    let weights = sol
        .primal_point
        .weights_distribution()
        .ok_or_else(|| Error::Consistency("barycentric program returned no weights".into()))?;
    Ok(certificate(
        &sol,
        LeakageKind::Barycentric,
        LeakageWitness::Weights(weights),
    ))
}

/// Maximal leakage, as `log2` of the minimum-trace dominating operator program.
pub fn max_leakage(e: &Ensemble, gap_tol: f64) -> Result<LeakageCertificate> {
    dominating_certificate(e, gap_tol, LeakageKind::Maximal)
}

/// Sandwiched infinity-order mutual information of the classical-quantum
/// state. Each block of `rho_XA <= mu rho_X (x) sigma` reads `rho_x <= mu sigma`,
/// so with `Y = mu sigma` this is the same program as [`max_leakage`].
pub fn sandwiched_inf_mutual_information(e: &Ensemble, gap_tol: f64) -> Result<LeakageCertificate> {
    dominating_certificate(e, gap_tol, LeakageKind::SandwichedInfMI)
}

fn dominating_certificate(
    e: &Ensemble,
    gap_tol: f64,
    kind: LeakageKind,
) -> Result<LeakageCertificate> {
    let program = LmiProgram::new(LmiForm::DominatingOperator, e.states.clone())?;
    let sol = sdp::solve(&program, gap_tol, DEFAULT_MAX_CUTS)?;
    let PrimalPoint::Operator(y) = &sol.primal_point else {
        return Err(Error::Consistency(
            "dominating program returned weights".into(),
        ));
    };
    let witness = LeakageWitness::DominatingOperator(y.clone());
    Ok(certificate(&sol, kind, witness))
}

fn certificate(
    sol: &sdp::SdpSolution,
    kind: LeakageKind,
    witness: LeakageWitness,
) -> LeakageCertificate {
    // Both programs have optimum at least 1, so clamping keeps the bracket valid.
    let upper = sol.upper_bound.max(1.0).log2();
    let lower = sol.lower_bound.max(1.0).log2();
    LeakageCertificate {
        value: upper,
        kind,
        witness,
        gap: (upper - lower).max(0.0),
        status: sol.status,
    }
}

/// `log2 sum_y max_x tr(rho_x F_y)` for one fixed measurement.
pub fn povm_leakage(e: &Ensemble, m: &Povm) -> Result<f64> {
    Error::check_dim(e.dim(), m.dim())?;
    let total: f64 = m
        .elements
        .iter()
        .map(|f| {
            e.states
                .iter()
                .map(|s| s.operator().trace_product(f))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(total.log2().max(0.0))
}

/// `M_x = S^{-1/2} rho_x S^{-1/2}` with `S = sum_x rho_x`, plus one trailing
/// outcome `I - sum_x M_x` when `S` is singular.
pub fn square_root_measurement(e: &Ensemble) -> Result<Povm> {
    let d = e.dim();
    let mut s = HermitianOperator::zeros(d);
    for r in &e.states {
        s = &s + r.operator();
    }
    let spec = s.eig()?;
    let cut = spec.support_cutoff();
    let inv_sqrt = spec.map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 });
    let mut elements = e
        .states
        .iter()
        .map(|r| r.operator().sandwich(&inv_sqrt))
        .collect::<Result<Vec<_>>>()?;
    let mut total = HermitianOperator::zeros(d);
    for m in &elements {
        total = &total + m;
    }
    let rest = &HermitianOperator::identity(d) - &total;
    if spec.eigenvalues.iter().any(|&l| l <= cut) {
        elements.push(rest);
    }
    Povm::new(elements)
}

/// `H(sum_x p_x rho_x) - sum_x p_x H(rho_x)` in bits.
pub fn holevo_information(e: &Ensemble) -> Result<f64> {
    let mixed = von_neumann_entropy(&e.average_state()?)?;
    let mut cond = 0.0;
    for (s, &p) in e.states.iter().zip(e.prior.as_slice()) {
        cond += p * von_neumann_entropy(s)?;
    }
    Ok((mixed - cond).clamp(0.0, (e.dim() as f64).log2()))
}

/// Classical mutual information `I(X; Y)` in bits for measurement `m`.
pub fn measured_information(e: &Ensemble, m: &Povm) -> Result<f64> {
    Error::check_dim(e.dim(), m.dim())?;
    let cond: Vec<Vec<f64>> = e
        .states
        .iter()
        .map(|s| m.probabilities(s))
        .collect::<Result<_>>()?;
    Ok(mutual_information(e.prior.as_slice(), &cond, 0..m.len()))
}

/// Sum over outcomes `ys` of `sum_x p_x P(y|x) log2(P(y|x) / P(y))`.
fn mutual_information(
    prior: &[f64],
    cond: &[Vec<f64>],
    ys: impl IntoIterator<Item = usize>,
) -> f64 {
    ys.into_iter()
        .map(|y| outcome_term(prior, cond.iter().map(|row| row[y])))
        .sum()
}

fn outcome_term(prior: &[f64], column: impl Iterator<Item = f64> + Clone) -> f64 {
    let py: f64 = prior.iter().zip(column.clone()).map(|(p, q)| p * q).sum();
    if py <= 0.0 {
        return 0.0;
    }
    prior
        .iter()
        .zip(column)
        .filter(|(_, q)| *q > 0.0)
        .map(|(p, q)| p * q * (q / py).log2())
        .sum()
}

/// Rank-one measurement frame: columns `w_k` with `sum_k w_k w_k^dagger = I`.
struct Frame<'a> {
    cols: Vec<CVector>,
    states: &'a [DensityOperator],
    prior: &'a [f64],
    /// `cond[k][x] = w_k^dagger rho_x w_k`.
    cond: Vec<Vec<f64>>,
}

impl<'a> Frame<'a> {
    fn new(cols: Vec<CVector>, e: &'a Ensemble) -> Self {
        let cond = cols.iter().map(|w| column_probs(&e.states, w)).collect();
        Self {
            cols,
            states: &e.states,
            prior: e.prior.as_slice(),
            cond,
        }
    }

    fn term(&self, probs: &[f64]) -> f64 {
        outcome_term(self.prior, probs.iter().copied())
    }

    fn value(&self) -> f64 {
        self.cond.iter().map(|c| self.term(c)).sum()
    }

    fn rotated(&self, k: usize, l: usize, theta: f64, phi: f64) -> (CVector, CVector) {
        let (s, c) = theta.sin_cos();
        let ph = Complex64::from_polar(1.0, phi);
        let a = &self.cols[k];
        let b = &self.cols[l];
        let na = a * Complex64::new(c, 0.0) + b * (ph * s);
        let nb = a * (-ph.conj() * s) + b * Complex64::new(c, 0.0);
        (na, nb)
    }

    /// One pass over all column pairs; returns whether anything improved.
    ///
    /// A rotation by `(theta, phi)` maps the outcome probabilities of the pair to
    /// `c^2 A + s^2 B +- 2 c s Re(e^{i phi} C)` with `A = <a|rho|a>`, `B = <b|rho|b>`
    /// and `C = <a|rho|b>`, so candidates are scored without forming vectors.
    fn sweep(&mut self, step: f64) -> bool {
        let n = self.cols.len();
        let mut improved = false;
        let phases = [
            0.0,
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::PI,
            -std::f64::consts::FRAC_PI_2,
        ];
        let m = self.states.len();
        let (mut pa, mut pb) = (vec![0.0; m], vec![0.0; m]);
        for k in 0..n {
            for l in k + 1..n {
                let base = self.term(&self.cond[k]) + self.term(&self.cond[l]);
                let forms: Vec<(f64, f64, Complex64)> = self
                    .states
                    .iter()
                    .map(|s| pair_forms(s.matrix(), &self.cols[k], &self.cols[l]))
                    .collect();
                let mut best: Option<(f64, f64, f64)> = None;
                for &phi in &phases {
                    let ph = Complex64::from_polar(1.0, phi);
                    for theta in [step, -step] {
                        let (s, c) = theta.sin_cos();
                        for (x, &(a, b, cross)) in forms.iter().enumerate() {
                            let mix = 2.0 * c * s * (ph * cross).re;
                            pa[x] = (c * c * a + s * s * b + mix).max(0.0);
                            pb[x] = (s * s * a + c * c * b - mix).max(0.0);
                        }
                        let gain = self.term(&pa) + self.term(&pb) - base;
                        if gain > 1e-15 && best.is_none_or(|b| gain > b.0) {
                            best = Some((gain, theta, phi));
                        }
                    }
                }
                if let Some((_, theta, phi)) = best {
                    let (na, nb) = self.rotated(k, l, theta, phi);
                    self.cond[k] = column_probs(self.states, &na);
                    self.cond[l] = column_probs(self.states, &nb);
                    (self.cols[k], self.cols[l]) = (na, nb);
                    improved = true;
                }
            }
        }
        improved
    }

    fn ascend(&mut self) {
        let mut step = ASCENT_START_STEP;
        for _ in 0..ASCENT_MAX_SWEEPS {
            if !self.sweep(step) {
                step *= 0.5;
                if step < ASCENT_MIN_STEP {
                    break;
                }
            }
        }
    }

    fn into_povm(self) -> Result<Povm> {
        Povm::new(self.cols.iter().map(HermitianOperator::outer).collect())
    }
}

/// `(<a|m|a>, <b|m|b>, <a|m|b>)` for a Hermitian `m`.
fn pair_forms(m: &CMatrix, a: &CVector, b: &CVector) -> (f64, f64, Complex64) {
    let d = a.len();
    let (mut aa, mut bb, mut ab) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    for i in 0..d {
        let (mut ma, mut mb) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for j in 0..d {
            ma += m[(i, j)] * a[j];
            mb += m[(i, j)] * b[j];
        }
        aa += a[i].conj() * ma;
        bb += b[i].conj() * mb;
        ab += a[i].conj() * mb;
    }
    (aa.re, bb.re, ab)
}

fn column_probs(states: &[DensityOperator], w: &CVector) -> Vec<f64> {
    states
        .iter()
        .map(|s| s.operator().expectation(w).max(0.0))
        .collect()
}

/// Lower bound on the accessible information: the best `I(X; Y)` over
/// rank-one POVMs with `2d` outcomes found by pairwise-rotation ascent from
/// `restarts` starting frames. The first start measures in the eigenbasis of
/// the average state; the rest are seeded random frames. The returned value
/// is exactly the information of the returned POVM.
pub fn accessible_information_lower(
    e: &Ensemble,
    restarts: usize,
    seed: u64,
) -> Result<(f64, Povm)> {
    if restarts == 0 {
        return Err(Error::invalid("restarts", "must be positive"));
    }
    let d = e.dim();
    let k = 2 * d;
    let mut best: Option<(f64, Vec<CVector>)> = None;
    for r in 0..restarts {
        let cols: Vec<CVector> = if r == 0 {
            let eig = e.average_state()?.operator().eig()?;
            (0..k)
                .map(|j| {
                    if j < d {
                        eig.vector(j)
                    } else {
                        CVector::zeros(d)
                    }
                })
                .collect()
        } else {
            let u: CMatrix = random_unitary(k, seed.wrapping_add(r as u64))?;
            (0..k)
                .map(|j| u.view((0, j), (d, 1)).column(0).into_owned())
                .collect()
        };
        let mut frame = Frame::new(cols, e);
        frame.ascend();
        let v = frame.value();
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, frame.cols));
        }
    }
    let (_, cols) = best.expect("at least one restart");
    let povm = Frame::new(cols, e).into_povm()?;
    let value = measured_information(e, &povm)?.max(0.0);
    Ok((value, povm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    pub gap_tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            gap_tol: DEFAULT_GAP_TOL,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

/// One `lhs <= rhs + slack` comparison of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCheck {
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub accessible_lower: f64,
    pub holevo: f64,
    pub srm_leakage: f64,
    pub sandwiched_inf_mi: LeakageCertificate,
    pub maximal: LeakageCertificate,
    pub barycentric: LeakageCertificate,
    pub pairwise: LeakageCertificate,
    pub checks: Vec<ChainCheck>,
}

/// Computes every quantity and checks
/// `I_acc <= chi <= B <= R`, `I_inf <= B` and `povm(SRM) <= Q <= B`.
/// Any violation beyond the combined gaps is an internal-consistency error.
pub fn inequality_chain_report(e: &Ensemble, options: &ChainOptions) -> Result<ChainReport> {
    let (accessible_lower, _) = accessible_information_lower(e, options.restarts, options.seed)?;
    let holevo = holevo_information(e)?;
    let srm_leakage = povm_leakage(e, &square_root_measurement(e)?)?;
    let maximal = max_leakage(e, options.gap_tol)?;
    let sandwiched_inf_mi = LeakageCertificate {
        kind: LeakageKind::SandwichedInfMI,
        ..maximal.clone()
    };
    let barycentric = barycentric_leakage(e, options.gap_tol)?;
    let pairwise = pairwise_leakage(e)?;

    let check = |lhs, lv: f64, lgap: f64, rhs, rv: f64, rgap: f64| {
        let slack = lgap + rgap + CHAIN_SLACK;
        ChainCheck {
            lhs,
            rhs,
            lhs_value: lv,
            rhs_value: rv,
            slack,
            holds: rv == f64::INFINITY || lv <= rv + slack,
        }
    };
    let b = (barycentric.value, barycentric.gap);
    let q = (maximal.value, maximal.gap);
    let checks = vec![
        check(
            "accessible_lower",
            accessible_lower,
            0.0,
            "holevo",
            holevo,
            0.0,
        ),
        check("holevo", holevo, 0.0, "barycentric", b.0, b.1),
        check("barycentric", b.0, b.1, "pairwise", pairwise.value, 0.0),
        check(
            "sandwiched_inf_mi",
            sandwiched_inf_mi.value,
            sandwiched_inf_mi.gap,
            "barycentric",
            b.0,
            b.1,
        ),
        check("srm_leakage", srm_leakage, 0.0, "maximal", q.0, q.1),
        check("maximal", q.0, q.1, "barycentric", b.0, b.1),
    ];
    if let Some(bad) = checks.iter().find(|c| !c.holds) {
        return Err(Error::Consistency(format!(
            "{} = {} exceeds {} = {} by more than {:e}",
            bad.lhs, bad.lhs_value, bad.rhs, bad.rhs_value, bad.slack
        )));
    }
    Ok(ChainReport {
        accessible_lower,
        holevo,
        srm_leakage,
        sandwiched_inf_mi,
        maximal,
        barycentric,
        pairwise,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::random_density;
    use approx::assert_abs_diff_eq;

    fn basis(d: usize) -> Ensemble {
        Ensemble::uniform(
            (0..d)
                .map(|i| DensityOperator::basis_state(d, i).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn diag_pair() -> Ensemble {
        Ensemble::uniform(vec![
            DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap(),
            DensityOperator::from_diagonal(&[0.25, 0.75]).unwrap(),
        ])
        .unwrap()
    }

    fn equal_states(n: usize) -> Ensemble {
        let rho = random_density(3, 2, 77).unwrap();
        Ensemble::uniform(vec![rho; n]).unwrap()
    }

    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn ensemble_validation() {
        let rho = DensityOperator::maximally_mixed(2);
        assert!(Ensemble::uniform(vec![]).is_err());
        let zero_prior = ProbVector::new(vec![1.0, 0.0]).unwrap();
        assert!(Ensemble::new(zero_prior, vec![rho.clone(), rho.clone()]).is_err());
        let prior = ProbVector::uniform(3).unwrap();
        assert!(Ensemble::new(prior, vec![rho.clone(), rho.clone()]).is_err());
        assert!(Ensemble::uniform(vec![rho, DensityOperator::maximally_mixed(3)]).is_err());
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![]).is_err());
        assert!(Povm::new(vec![HermitianOperator::from_real_diagonal(&[1.0, 0.5])]).is_err());
        let neg = vec![
            HermitianOperator::from_real_diagonal(&[1.5, 1.0]),
            HermitianOperator::from_real_diagonal(&[-0.5, 0.0]),
        ];
        assert!(matches!(Povm::new(neg), Err(Error::NotPsd { .. })));
        assert!(Povm::new(Povm::computational_basis(3).elements().to_vec()).is_ok());
    }

    #[test]
    fn pairwise_examples() {
        assert_abs_diff_eq!(
            pairwise_leakage(&equal_states(3)).unwrap().value,
            0.0,
            epsilon = 1e-9
        );
        let r = pairwise_leakage(&basis(4)).unwrap();
        assert_eq!(r.value, f64::INFINITY);
        assert_eq!(r.witness, LeakageWitness::Pair { from: 0, to: 1 });
        assert_abs_diff_eq!(
            pairwise_leakage(&diag_pair()).unwrap().value,
            3f64.log2(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn barycentric_examples() {
        assert_abs_diff_eq!(
            barycentric_leakage(&equal_states(3), 1e-6).unwrap().value,
            0.0,
            epsilon = 1e-8
        );
        for n in 1..=3 {
            let c = barycentric_leakage(&basis(1 << n), 1e-6).unwrap();
            assert_abs_diff_eq!(c.value, n as f64, epsilon = 1e-8);
        }
        let c = barycentric_leakage(&diag_pair(), 1e-6).unwrap();
        assert_abs_diff_eq!(c.value, 1.5f64.log2(), epsilon = 1e-8);
        let LeakageWitness::Weights(pi) = &c.witness else {
            panic!()
        };
        assert_abs_diff_eq!(pi[0], 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(pi[1], 0.5, epsilon = 1e-6);
        // 1-D grid over the mixing weight of the two-state barycenter.
        let grid = (0..=1000)
            .map(|i| {
                let a = i as f64 / 1000.0;
                let s0 = 0.75 * a + 0.25 * (1.0 - a);
                let s1 = 0.25 * a + 0.75 * (1.0 - a);
                (0.75 / s0).max(0.25 / s1).max(0.25 / s0).max(0.75 / s1)
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(c.value, grid.log2(), epsilon = 1e-9);
    }

    #[test]
    fn maximal_examples() {
        for n in 1..=3 {
            assert_abs_diff_eq!(
                max_leakage(&basis(1 << n), 1e-6).unwrap().value,
                n as f64,
                epsilon = 1e-8
            );
        }
        assert_abs_diff_eq!(
            max_leakage(&equal_states(2), 1e-6).unwrap().value,
            0.0,
            epsilon = 1e-8
        );
        let q = max_leakage(&diag_pair(), 1e-6).unwrap();
        assert_abs_diff_eq!(q.value, 1.5f64.log2(), epsilon = 1e-8);
        let mi = sandwiched_inf_mutual_information(&diag_pair(), 1e-6).unwrap();
        assert_eq!(mi.kind, LeakageKind::SandwichedInfMI);
        assert_abs_diff_eq!(mi.value, q.value, epsilon = 1e-12);
    }

    #[test]
    fn maximal_matches_projective_grid_on_diagonal_pair() {
        // Projective measurements {|u><u|, I - |u><u|} over a Bloch-sphere grid.
        let e = diag_pair();
        let mut best: f64 = 0.0;
        for i in 0..100 {
            let theta = std::f64::consts::PI * i as f64 / 99.0;
            for j in 0..100 {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / 100.0;
                let u = CVector::from_vec(vec![
                    Complex64::new((theta / 2.0).cos(), 0.0),
                    Complex64::from_polar((theta / 2.0).sin(), phi),
                ]);
                let p = HermitianOperator::outer(&u);
                let q = &HermitianOperator::identity(2) - &p;
                best = best.max(povm_leakage(&e, &Povm::new(vec![p, q]).unwrap()).unwrap());
            }
        }
        let q = max_leakage(&e, 1e-6).unwrap().value;
        assert!(best <= q + 1e-9);
        assert_abs_diff_eq!(best, q, epsilon = 1e-3);
    }

    #[test]
    fn povm_examples() {
        assert_abs_diff_eq!(
            povm_leakage(&diag_pair(), &Povm::trivial(2)).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            povm_leakage(&basis(2), &Povm::computational_basis(2)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let srm = square_root_measurement(&diag_pair()).unwrap();
        assert_eq!(srm.len(), 2);
        assert!(
            srm.elements()[0].max_abs_diff(&HermitianOperator::from_real_diagonal(&[0.75, 0.25]))
                < 1e-14
        );
        assert_abs_diff_eq!(
            povm_leakage(&diag_pair(), &srm).unwrap(),
            1.25f64.log2(),
            epsilon = 1e-12
        );
        assert!(povm_leakage(&diag_pair(), &Povm::trivial(3)).is_err());
    }

    #[test]
    fn srm_single_state_and_orthogonal() {
        let rho = DensityOperator::from_diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let srm = square_root_measurement(&Ensemble::uniform(vec![rho]).unwrap()).unwrap();
        assert_eq!(srm.len(), 2);
        assert!(
            srm.elements()[0]
                .max_abs_diff(&HermitianOperator::from_real_diagonal(&[1.0, 1.0, 0.0]))
                < 1e-12
        );
        assert!(
            srm.elements()[1]
                .max_abs_diff(&HermitianOperator::from_real_diagonal(&[0.0, 0.0, 1.0]))
                < 1e-12
        );

        let srm = square_root_measurement(&basis(4)).unwrap();
        assert_eq!(srm.len(), 4);
        for (i, m) in srm.elements().iter().enumerate() {
            assert!(m.max_abs_diff(DensityOperator::basis_state(4, i).unwrap().operator()) < 1e-12);
        }
    }

    #[test]
    fn holevo_examples() {
        assert_abs_diff_eq!(
            holevo_information(&equal_states(3)).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(holevo_information(&basis(2)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            holevo_information(&diag_pair()).unwrap(),
            1.0 - h2(0.25),
            epsilon = 1e-12
        );
    }

    #[test]
    fn accessible_examples() {
        let (v, _) = accessible_information_lower(&equal_states(2), 3, 0).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        let (v, povm) = accessible_information_lower(&basis(2), 3, 0).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            measured_information(&basis(2), &povm).unwrap(),
            v,
            epsilon = 1e-15
        );
        let (v, _) = accessible_information_lower(&diag_pair(), 4, 1).unwrap();
        let direct = measured_information(&diag_pair(), &Povm::computational_basis(2)).unwrap();
        assert_abs_diff_eq!(direct, 1.0 - h2(0.25), epsilon = 1e-12);
        assert_abs_diff_eq!(v, direct, epsilon = 1e-6);
        assert!(v <= holevo_information(&diag_pair()).unwrap() + 1e-6);
    }

    #[test]
    fn accessible_information_beats_basis_on_trine() {
        // Trine states: the optimum is the three-outcome anti-trine
        // measurement, worth log2(3) - 1 bits; no projective measurement
        // reaches it.
        let states: Vec<_> = (0..3)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let psi = CVector::from_vec(vec![
                    Complex64::new(a.cos(), 0.0),
                    Complex64::new(a.sin(), 0.0),
                ]);
                DensityOperator::pure(&psi).unwrap()
            })
            .collect();
        let e = Ensemble::uniform(states).unwrap();
        let (v, _) = accessible_information_lower(&e, 4, 3).unwrap();
        assert_abs_diff_eq!(v, 3f64.log2() - 1.0, epsilon = 1e-6);
    }

    #[test]
    fn chain_on_basis_encoding() {
        let options = ChainOptions {
            restarts: 4,
            ..Default::default()
        };
        let r = inequality_chain_report(&basis(4), &options).unwrap();
        assert!(r.accessible_lower <= 2.0 + 1e-9);
        assert!(r.holevo <= 2.0 + 1e-9);
        assert_abs_diff_eq!(r.maximal.value, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.barycentric.value, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.sandwiched_inf_mi.value, 2.0, epsilon = 1e-8);
        assert_eq!(r.pairwise.value, f64::INFINITY);
        assert!(r.checks.iter().all(|c| c.holds));
    }

    #[test]
    fn chain_on_equal_states() {
        let options = ChainOptions {
            restarts: 2,
            ..Default::default()
        };
        let r = inequality_chain_report(&equal_states(3), &options).unwrap();
        for v in [
            r.accessible_lower,
            r.holevo,
            r.srm_leakage,
            r.maximal.value,
            r.barycentric.value,
            r.pairwise.value,
        ] {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-8);
        }
    }
}
