//! Quantum channels in Kraus form, depolarizing noise, and the
//! differential-privacy consequence check.
//!
//! An (epsilon, 0)-differentially private channel keeps the max-relative
//! entropy between the outputs of any two neighbouring inputs at or below
//! `epsilon / ln 2` bits. [`verify_dp_on_ensemble`] tests exactly that
//! condition on a finite ensemble. It is necessary for privacy, not
//! sufficient, so a passing report is not a privacy certificate.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::divergence::{sandwiched_renyi, RenyiOrder};
use crate::error::{Error, Result};
use crate::hermitian::{
    random, trace_distance, CMatrix, DensityOperator, HermitianOperator, MAX_DIM,
};
use crate::leakage::{
    barycentric_leakage, pairwise_leakage, Ensemble, LeakageCertificate, CHAIN_SLACK,
};

/// Tolerance on `sum_i K_i^dagger K_i = I`.
pub const KRAUS_TOL: f64 = 1e-9;
/// Slack on the divergence threshold of a DP check, in bits.
pub const DP_SLACK: f64 = 1e-9;

/// How a channel was built; depolarizing channels carry known leakage bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    Kraus,
    DepolarizingGlobal { p: f64 },
    DepolarizingLocal { p: f64, qubits: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    in_dim: usize,
    out_dim: usize,
    kind: ChannelKind,
}

impl QuantumChannel {
    /// Validates shapes and trace preservation.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::invalid("kraus", "at least one Kraus operator is required"))?;
        let (out_dim, in_dim) = first.shape();
        if in_dim == 0 || out_dim == 0 || in_dim > MAX_DIM || out_dim > MAX_DIM {
            return Err(Error::invalid(
                "kraus",
                format!("dimensions must be in 1..={MAX_DIM}"),
            ));
        }
        let mut sum = CMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::invalid(
                    "kraus",
                    format!(
                        "operators must all be {out_dim}x{in_dim}, found {}x{}",
                        k.nrows(),
                        k.ncols()
                    ),
                ));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::invalid("kraus", "entries must be finite"));
            }
            sum += k.adjoint() * k;
        }
        let defect = (sum - CMatrix::identity(in_dim, in_dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > KRAUS_TOL {
            return Err(Error::invalid(
                "kraus",
                format!("not trace preserving (defect {defect:e})"),
            ));
        }
        Ok(Self {
            kraus,
            in_dim,
            out_dim,
            kind: ChannelKind::Kraus,
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![CMatrix::identity(dim, dim)])
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// `sum_i K_i rho K_i^dagger`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        Error::check_dim(self.in_dim, rho.dim())?;
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * rho.matrix() * k.adjoint();
        }
        DensityOperator::normalized(HermitianOperator::symmetrized(out), KRAUS_TOL)
    }

    /// `self` after `first`: Kraus operators `K_j L_i`.
    pub fn compose(&self, first: &QuantumChannel) -> Result<Self> {
        Error::check_dim(self.in_dim, first.out_dim)?;
        let kraus = self
            .kraus
            .iter()
            .flat_map(|k| first.kraus.iter().map(move |l| k * l))
            .collect();
        Self::new(kraus)
    }

    /// Parallel action on a product space, Kraus operators `K_i (x) L_j`.
    pub fn tensor(&self, other: &QuantumChannel) -> Result<Self> {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|k| other.kraus.iter().map(move |l| k.kronecker(l)))
            .collect();
        Self::new(kraus)
    }

    pub fn apply_to_ensemble(&self, e: &Ensemble) -> Result<Ensemble> {
        e.map_states(|rho| self.apply(rho))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")))
    }
}

/// `rho -> (p / d) I + (1 - p) rho`, realized by the `d^2` Weyl operators
/// `X^a Z^b` with weight `1 - p + p / d^2` on the identity and `p / d^2` on
/// the rest. Zero-weight operators are dropped.
pub fn depolarizing_global(p: f64, d: usize) -> Result<QuantumChannel> {
    check_probability(p)?;
    if d == 0 || d > MAX_DIM {
        return Err(Error::invalid(
            "d",
            format!("must be in 1..={MAX_DIM}, got {d}"),
        ));
    }
    let rest = p / (d * d) as f64;
    let mut kraus = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let w = if a == 0 && b == 0 {
                1.0 - p + rest
            } else {
                rest
            };
            if w > 0.0 {
                kraus.push(weyl(d, a, b) * Complex64::new(w.sqrt(), 0.0));
            }
        }
    }
    let mut ch = QuantumChannel::new(kraus)?;
    ch.kind = ChannelKind::DepolarizingGlobal { p };
    Ok(ch)
}

/// `X^a Z^b` with `X|j> = |j+1 mod d>` and `Z|j> = w^j |j>`, `w = e^{2 pi i / d}`.
fn weyl(d: usize, a: usize, b: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for j in 0..d {
        let phase = 2.0 * PI * ((b * j) % d) as f64 / d as f64;
        m[((j + a) % d, j)] = Complex64::from_polar(1.0, phase);
    }
    m
}

/// Independent single-qubit depolarizing noise on each of `qubits` qubits.
pub fn depolarizing_local(p: f64, qubits: usize) -> Result<QuantumChannel> {
    check_probability(p)?;
    if qubits == 0 || qubits >= usize::BITS as usize || (1usize << qubits) > MAX_DIM {
        return Err(Error::invalid(
            "qubits",
            format!("need 1 <= 2^k <= {MAX_DIM}, got k = {qubits}"),
        ));
    }
    let single = depolarizing_global(p, 2)?;
    let mut ch = single.clone();
    for _ in 1..qubits {
        ch = ch.tensor(&single)?;
    }
    ch.kind = ChannelKind::DepolarizingLocal { p, qubits };
    Ok(ch)
}

/// Random channel from a seeded Gaussian isometry cut into `n_kraus` blocks.
pub fn random_channel(
    in_dim: usize,
    out_dim: usize,
    n_kraus: usize,
    seed: u64,
) -> Result<QuantumChannel> {
    if in_dim == 0 || out_dim == 0 || in_dim > MAX_DIM || out_dim > MAX_DIM {
        return Err(Error::invalid(
            "dim",
            format!("dimensions must be in 1..={MAX_DIM}"),
        ));
    }
    if n_kraus == 0 || n_kraus * out_dim < in_dim {
        return Err(Error::invalid(
            "n_kraus",
            "need n_kraus * out_dim >= in_dim",
        ));
    }
    let mut v = random::gaussian_matrix(&mut random::rng(seed), n_kraus * out_dim, in_dim);
    random::orthonormalize_columns(&mut v);
    let kraus = (0..n_kraus)
        .map(|i| v.rows(i * out_dim, out_dim).into_owned())
        .collect();
    QuantumChannel::new(kraus)
}

/// `ln(1 + 2 (1 - p) d / p)` nats: the privacy level of `d`-dimensional
/// depolarizing noise with strength `p` (`+inf` at `p = 0`). The same value
/// bounds local noise with `d = 2^k`.
pub fn dp_epsilon_bound_depolarizing(p: f64, d: usize) -> Result<f64> {
    check_probability(p)?;
    if d == 0 {
        return Err(Error::invalid("d", "must be positive"));
    }
    if p == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((2.0 * (1.0 - p) * d as f64 / p).ln_1p())
}

/// Leakage ceiling in bits after depolarizing noise, if `ch` is depolarizing
/// with `p > 0`.
pub fn depolarizing_leakage_bound(ch: &QuantumChannel) -> Option<f64> {
    let p = match ch.kind {
        ChannelKind::Kraus => return None,
        ChannelKind::DepolarizingGlobal { p } | ChannelKind::DepolarizingLocal { p, .. } => p,
    };
    (p > 0.0)
        .then(|| dp_epsilon_bound_depolarizing(p, ch.out_dim).ok())
        .flatten()
        .map(|e| e / LN_2)
}

/// Which input pairs count as neighbours.
#[derive(Debug, Clone, PartialEq)]
pub enum Neighbouring {
    /// `||rho_x - rho_x'||_1 <= kappa`.
    TraceDistance(f64),
    /// Listed index pairs, taken in both orders.
    ExplicitPairs(Vec<(usize, usize)>),
    /// Every ordered pair, including `(x, x)`.
    AllPairs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpParams {
    epsilon_nats: f64,
    delta: f64,
    neighbouring: Neighbouring,
}

impl DpParams {
    pub fn new(epsilon_nats: f64, delta: f64, neighbouring: Neighbouring) -> Result<Self> {
        if epsilon_nats.is_nan() || epsilon_nats < 0.0 {
            return Err(Error::invalid(
                "epsilon_nats",
                format!("must be >= 0, got {epsilon_nats}"),
            ));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::invalid(
                "delta",
                format!("must lie in [0, 1], got {delta}"),
            ));
        }
        if let Neighbouring::TraceDistance(k) = neighbouring {
            if k.is_nan() || k <= 0.0 {
                return Err(Error::invalid("kappa", format!("must be > 0, got {k}")));
            }
        }
        Ok(Self {
            epsilon_nats,
            delta,
            neighbouring,
        })
    }

    pub fn epsilon_nats(&self) -> f64 {
        self.epsilon_nats
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn neighbouring(&self) -> &Neighbouring {
        &self.neighbouring
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCheck {
    pub from: usize,
    pub to: usize,
    pub divergence_bits: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpReport {
    pub epsilon_nats: f64,
    /// `epsilon / ln 2`.
    pub threshold_bits: f64,
    pub max_divergence_bits: f64,
    pub pairs: Vec<PairCheck>,
    pub passes: bool,
    pub note: &'static str,
}

pub const DP_NOTE: &str = "checks the max-divergence condition implied by (epsilon, 0)-DP on the given \
                           neighbouring pairs; passing is necessary but does not certify differential privacy";

/// Max-relative entropy between channel outputs of every neighbouring pair,
/// against the threshold `epsilon / ln 2`. Only `delta = 0` is supported.
pub fn verify_dp_on_ensemble(
    ch: &QuantumChannel,
    e: &Ensemble,
    params: &DpParams,
) -> Result<DpReport> {
    if params.delta != 0.0 {
        return Err(Error::Unsupported(format!(
            "only delta = 0 can be checked, got delta = {}",
            params.delta
        )));
    }
    Error::check_dim(ch.in_dim, e.dim())?;
    let n = e.len();
    let pairs: Vec<(usize, usize)> = match &params.neighbouring {
        Neighbouring::AllPairs => (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect(),
        Neighbouring::ExplicitPairs(list) => {
            let mut out = Vec::new();
            for &(a, b) in list {
                if a >= n || b >= n {
                    return Err(Error::invalid(
                        "neighbouring",
                        format!("pair ({a}, {b}) out of range for {n} states"),
                    ));
                }
                out.push((a, b));
                out.push((b, a));
            }
            out.sort_unstable();
            out.dedup();
            out
        }
        Neighbouring::TraceDistance(kappa) => {
            let mut out = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let dist = trace_distance(e.states()[x].operator(), e.states()[y].operator())?;
                    if dist <= *kappa + 1e-12 {
                        out.push((x, y));
                    }
                }
            }
            out
        }
    };

    let outputs = e
        .states()
        .iter()
        .map(|s| ch.apply(s))
        .collect::<Result<Vec<_>>>()?;
    let threshold_bits = params.epsilon_nats / LN_2;
    let mut checks = Vec::with_capacity(pairs.len());
    for (from, to) in pairs {
        let divergence_bits = if from == to {
            0.0
        } else {
            sandwiched_renyi(&outputs[from], outputs[to].operator(), RenyiOrder::Infinity)?.max(0.0)
        };
        checks.push(PairCheck {
            from,
            to,
            divergence_bits,
            passes: divergence_bits <= threshold_bits + DP_SLACK,
        });
    }
    let max_divergence_bits = checks.iter().map(|c| c.divergence_bits).fold(0.0, f64::max);
    Ok(DpReport {
        epsilon_nats: params.epsilon_nats,
        threshold_bits,
        max_divergence_bits,
        passes: checks.iter().all(|c| c.passes),
        pairs: checks,
        note: DP_NOTE,
    })
}

/// Barycentric and pairwise leakage of the ensemble after `ch`. For
/// depolarizing channels, both are checked against the known ceiling.
pub fn leakage_after_channel(
    ch: &QuantumChannel,
    e: &Ensemble,
    gap_tol: f64,
) -> Result<(LeakageCertificate, LeakageCertificate)> {
    let out = ch.apply_to_ensemble(e)?;
    let b = barycentric_leakage(&out, gap_tol)?;
    let r = pairwise_leakage(&out)?;
    if let Some(bound) = depolarizing_leakage_bound(ch) {
        if b.value > bound + b.gap + CHAIN_SLACK || r.value > bound + CHAIN_SLACK {
            return Err(Error::Consistency(format!(
                "leakage after depolarizing noise (B = {}, R = {}) exceeds the ceiling {bound}",
                b.value, r.value
            )));
        }
    }
    Ok((b, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{random_density, random_unitary};
    use approx::assert_abs_diff_eq;

    fn diag_pair() -> Ensemble {
        Ensemble::uniform(vec![
            DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap(),
            DensityOperator::from_diagonal(&[0.25, 0.75]).unwrap(),
        ])
        .unwrap()
    }

    fn basis(d: usize) -> Ensemble {
        Ensemble::uniform(
            (0..d)
                .map(|i| DensityOperator::basis_state(d, i).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn affine(p: f64, rho: &DensityOperator) -> HermitianOperator {
        let d = rho.dim();
        &HermitianOperator::identity(d).scale(p / d as f64) + &rho.operator().scale(1.0 - p)
    }

    #[test]
    fn validation() {
        assert!(QuantumChannel::new(vec![]).is_err());
        assert!(
            QuantumChannel::new(vec![CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0)]).is_err()
        );
        assert!(
            QuantumChannel::new(vec![CMatrix::identity(2, 2), CMatrix::identity(3, 3)]).is_err()
        );
        assert!(depolarizing_global(1.5, 2).is_err());
        assert!(depolarizing_global(0.5, 0).is_err());
        assert!(depolarizing_local(0.5, 7).is_err());
        assert!(depolarizing_local(0.5, 0).is_err());
        let ch = QuantumChannel::identity(2).unwrap();
        assert!(ch.apply(&DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn apply_examples() {
        let rho = random_density(3, 2, 1).unwrap();
        let out = QuantumChannel::identity(3).unwrap().apply(&rho).unwrap();
        assert!(out.operator().max_abs_diff(rho.operator()) < 1e-15);

        let u = random_unitary(3, 2).unwrap();
        let out = QuantumChannel::unitary(u.clone())
            .unwrap()
            .apply(&rho)
            .unwrap();
        assert!(
            out.operator()
                .max_abs_diff(rho.evolve(&u).unwrap().operator())
                < 1e-14
        );

        let out = depolarizing_global(1.0, 2)
            .unwrap()
            .apply(&random_density(2, 1, 3).unwrap())
            .unwrap();
        assert!(
            out.operator()
                .max_abs_diff(DensityOperator::maximally_mixed(2).operator())
                < 1e-15
        );
    }

    #[test]
    fn global_matches_affine_formula() {
        for d in [2, 3, 5, 8] {
            for (i, p) in [0.0, 0.13, 0.5, 0.9, 1.0].into_iter().enumerate() {
                let ch = depolarizing_global(p, d).unwrap();
                let rho = random_density(d, 1 + i % d, (d * 10 + i) as u64).unwrap();
                let out = ch.apply(&rho).unwrap();
                assert!(
                    out.operator().max_abs_diff(&affine(p, &rho)) < 1e-10,
                    "d={d} p={p}"
                );
            }
        }
        assert_eq!(depolarizing_global(0.0, 4).unwrap().kraus().len(), 1);
        assert_eq!(depolarizing_global(0.3, 4).unwrap().kraus().len(), 16);
        let out = depolarizing_global(0.5, 2)
            .unwrap()
            .apply(&DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap())
            .unwrap();
        assert!(
            out.operator()
                .max_abs_diff(&HermitianOperator::from_real_diagonal(&[0.625, 0.375]))
                < 1e-15
        );
    }

    #[test]
    fn local_examples() {
        let rho = random_density(2, 2, 8).unwrap();
        let a = depolarizing_local(0.37, 1).unwrap().apply(&rho).unwrap();
        let b = depolarizing_global(0.37, 2).unwrap().apply(&rho).unwrap();
        assert!(a.operator().max_abs_diff(b.operator()) < 1e-15);

        let rho = random_density(8, 3, 9).unwrap();
        let out = depolarizing_local(0.0, 3).unwrap().apply(&rho).unwrap();
        assert!(out.operator().max_abs_diff(rho.operator()) < 1e-14);

        let out = depolarizing_local(1.0, 2)
            .unwrap()
            .apply(&random_density(4, 2, 10).unwrap())
            .unwrap();
        assert!(
            out.operator()
                .max_abs_diff(DensityOperator::maximally_mixed(4).operator())
                < 1e-15
        );

        // Product input: the output is the product of single-qubit outputs.
        let r1 = random_density(2, 2, 11).unwrap();
        let r2 = random_density(2, 1, 12).unwrap();
        let out = depolarizing_local(0.4, 2)
            .unwrap()
            .apply(&r1.kron(&r2))
            .unwrap();
        let expected = affine(0.4, &r1).kron(&affine(0.4, &r2));
        assert!(out.operator().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn compose_and_tensor_stay_trace_preserving() {
        let a = random_channel(3, 2, 3, 1).unwrap();
        let b = random_channel(2, 4, 2, 2).unwrap();
        let ba = b.compose(&a).unwrap();
        assert_eq!((ba.in_dim(), ba.out_dim()), (3, 4));
        let rho = random_density(3, 2, 3).unwrap();
        let lhs = ba.apply(&rho).unwrap();
        let rhs = b.apply(&a.apply(&rho).unwrap()).unwrap();
        assert!(lhs.operator().max_abs_diff(rhs.operator()) < 1e-14);
        assert!(a.compose(&a).is_err());

        let t = a.tensor(&b).unwrap();
        assert_eq!((t.in_dim(), t.out_dim()), (6, 8));
        let r2 = random_density(2, 1, 4).unwrap();
        let out = t.apply(&rho.kron(&r2)).unwrap();
        let expected = a.apply(&rho).unwrap().kron(&b.apply(&r2).unwrap());
        assert!(out.operator().max_abs_diff(expected.operator()) < 1e-14);
        assert!(random_channel(4, 2, 1, 0).is_err());
    }

    #[test]
    fn epsilon_bound() {
        assert_abs_diff_eq!(dp_epsilon_bound_depolarizing(1.0, 2).unwrap(), 0.0);
        assert_abs_diff_eq!(
            dp_epsilon_bound_depolarizing(0.5, 2).unwrap(),
            5f64.ln(),
            epsilon = 1e-15
        );
        assert_eq!(
            dp_epsilon_bound_depolarizing(0.0, 2).unwrap(),
            f64::INFINITY
        );
        assert!(dp_epsilon_bound_depolarizing(1e-9, 2).unwrap() > 20.0);
        let mut last = f64::INFINITY;
        for i in 1..=100 {
            let v = dp_epsilon_bound_depolarizing(i as f64 / 100.0, 4).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(dp_epsilon_bound_depolarizing(-0.1, 2).is_err());
    }

    #[test]
    fn dp_identity_on_basis_fails() {
        let params = DpParams::new(3.0, 0.0, Neighbouring::AllPairs).unwrap();
        let r = verify_dp_on_ensemble(&QuantumChannel::identity(2).unwrap(), &basis(2), &params)
            .unwrap();
        assert!(!r.passes);
        assert_eq!(r.max_divergence_bits, f64::INFINITY);
        assert_eq!(r.pairs.len(), 4);
    }

    #[test]
    fn dp_depolarized_basis_passes() {
        let params = DpParams::new(5f64.ln(), 0.0, Neighbouring::AllPairs).unwrap();
        let r = verify_dp_on_ensemble(&depolarizing_global(0.5, 2).unwrap(), &basis(2), &params)
            .unwrap();
        assert!(r.passes);
        assert_abs_diff_eq!(r.max_divergence_bits, 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.threshold_bits, 5f64.log2(), epsilon = 1e-15);
        // Closed-form ratio for the depolarized basis pair.
        assert_abs_diff_eq!(
            r.max_divergence_bits * LN_2,
            (2.0 / 0.5 - 1.0f64).ln(),
            epsilon = 1e-12
        );
        assert!(r.note.contains("does not certify"));
    }

    #[test]
    fn dp_single_state_and_modes() {
        let single = Ensemble::uniform(vec![random_density(2, 1, 5).unwrap()]).unwrap();
        let params = DpParams::new(0.0, 0.0, Neighbouring::AllPairs).unwrap();
        let r =
            verify_dp_on_ensemble(&QuantumChannel::identity(2).unwrap(), &single, &params).unwrap();
        assert!(r.passes);
        assert_eq!(r.pairs.len(), 1);

        let params = DpParams::new(1.0, 0.1, Neighbouring::AllPairs).unwrap();
        assert!(matches!(
            verify_dp_on_ensemble(&QuantumChannel::identity(2).unwrap(), &single, &params),
            Err(Error::Unsupported(_))
        ));
        assert!(DpParams::new(-1.0, 0.0, Neighbouring::AllPairs).is_err());
        assert!(DpParams::new(1.0, 2.0, Neighbouring::AllPairs).is_err());
        assert!(DpParams::new(1.0, 0.0, Neighbouring::TraceDistance(0.0)).is_err());

        let ch = depolarizing_global(0.5, 2).unwrap();
        let e = diag_pair();
        let explicit = DpParams::new(1.0, 0.0, Neighbouring::ExplicitPairs(vec![(0, 1)])).unwrap();
        let r = verify_dp_on_ensemble(&ch, &e, &explicit).unwrap();
        assert_eq!(
            r.pairs.iter().map(|c| (c.from, c.to)).collect::<Vec<_>>(),
            vec![(0, 1), (1, 0)]
        );
        let bad = DpParams::new(1.0, 0.0, Neighbouring::ExplicitPairs(vec![(0, 2)])).unwrap();
        assert!(verify_dp_on_ensemble(&ch, &e, &bad).is_err());

        // Inputs are at trace distance 1: kappa = 0.5 keeps only reflexive pairs.
        let close = DpParams::new(0.0, 0.0, Neighbouring::TraceDistance(0.5)).unwrap();
        let r = verify_dp_on_ensemble(&ch, &e, &close).unwrap();
        assert_eq!(r.pairs.len(), 2);
        assert!(r.passes);
        let far = DpParams::new(0.0, 0.0, Neighbouring::TraceDistance(2.0)).unwrap();
        assert!(!verify_dp_on_ensemble(&ch, &e, &far).unwrap().passes);
    }

    #[test]
    fn leakage_after_depolarizing() {
        let e = Ensemble::uniform(
            (0..3)
                .map(|k| random_density(3, 1 + k, 30 + k as u64).unwrap())
                .collect(),
        )
        .unwrap();
        let (b, r) =
            leakage_after_channel(&depolarizing_global(1.0, 3).unwrap(), &e, 1e-6).unwrap();
        assert_abs_diff_eq!(b.value, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-9);

        let ch = depolarizing_global(0.5, 2).unwrap();
        let (_, r) = leakage_after_channel(&ch, &diag_pair(), 1e-6).unwrap();
        assert_abs_diff_eq!(r.value, (5.0f64 / 3.0).log2(), epsilon = 1e-12);
        let (b, r) = leakage_after_channel(&ch, &basis(2), 1e-6).unwrap();
        assert_abs_diff_eq!(r.value, 3f64.log2(), epsilon = 1e-12);
        assert!(b.value <= r.value + b.gap);
        assert!(r.value <= depolarizing_leakage_bound(&ch).unwrap());
        assert_eq!(
            depolarizing_leakage_bound(&QuantumChannel::identity(2).unwrap()),
            None
        );
        assert_eq!(
            depolarizing_leakage_bound(&depolarizing_global(0.0, 2).unwrap()),
            None
        );
    }
}
