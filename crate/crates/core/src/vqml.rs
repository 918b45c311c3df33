//! Toy variational quantum classifier and its privacy/utility trade-off.
//!
//! A symbol `x` is encoded as `V_x |0...0>`, processed by a fixed layered
//! circuit `U`, optionally hit by noise, and read out by a classifier POVM.
//! Qubit 0 is the most significant bit of a basis index.
//!
//! Under global depolarizing noise of strength `p` the classifier output moves
//! by at most `2p` in total variation, while the leakage of the encoded symbol
//! is capped by `log2(1 + 2 (1 - p) d / p)`. [`tradeoff_curve`] evaluates both
//! sides along a grid of `p`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{
    depolarizing_global, dp_epsilon_bound_depolarizing, leakage_after_channel, QuantumChannel,
};
use crate::divergence::ProbVector;
use crate::error::{Error, Result};
use crate::hermitian::{random, unitarity_defect, CMatrix, CVector, DensityOperator};
use crate::leakage::{Ensemble, Povm, CHAIN_SLACK};

pub const MAX_QUBITS: usize = 6;
/// Allowed excess of the measured degradation over `2p`.
pub const DEGRADATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoder {
    /// `V_x |0...0> = |x>` for a basis index `x`.
    Basis,
    /// `V_x = R_y(x_0) (x) ... (x) R_y(x_{k-1})`, one angle per qubit.
    Angle,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelInput {
    Index(usize),
    Angles(Vec<f64>),
}

/// Rotation angles of one circuit layer, one entry per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub ry: Vec<f64>,
    pub rz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationalModel {
    qubits: usize,
    encoder: Encoder,
    layers: Vec<Layer>,
    povm: Povm,
    unitary: CMatrix,
}

impl VariationalModel {
    pub fn new(qubits: usize, encoder: Encoder, layers: Vec<Layer>, povm: Povm) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::invalid(
                "qubits",
                format!("must be in 1..={MAX_QUBITS}, got {qubits}"),
            ));
        }
        for layer in &layers {
            if layer.ry.len() != qubits || layer.rz.len() != qubits {
                return Err(Error::invalid(
                    "layers",
                    format!("each layer needs {qubits} ry and rz angles"),
                ));
            }
            if layer.ry.iter().chain(&layer.rz).any(|a| !a.is_finite()) {
                return Err(Error::invalid("layers", "angles must be finite"));
            }
        }
        Error::check_dim(1 << qubits, povm.dim())?;
        let unitary = circuit_unitary(qubits, &layers);
        let defect = unitarity_defect(&unitary);
        if defect > 1e-9 {
            return Err(Error::Consistency(format!(
                "circuit unitarity defect {defect:e}"
            )));
        }
        Ok(Self {
            qubits,
            encoder,
            layers,
            povm,
            unitary,
        })
    }

    /// Model with `n_layers` layers of seeded uniform angles in `[0, 2 pi)`.
    pub fn with_random_layers(
        qubits: usize,
        encoder: Encoder,
        n_layers: usize,
        povm: Povm,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = random::rng(seed);
        let layers = (0..n_layers)
            .map(|_| Layer {
                ry: (0..qubits).map(|_| rng.random_range(0.0..TAU)).collect(),
                rz: (0..qubits).map(|_| rng.random_range(0.0..TAU)).collect(),
            })
            .collect();
        Self::new(qubits, encoder, layers, povm)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn encoder(&self) -> Encoder {
        self.encoder
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// The trainable circuit `U`.
    pub fn circuit(&self) -> &CMatrix {
        &self.unitary
    }

    /// `V_x |0...0>`.
    pub fn encode(&self, x: &ModelInput) -> Result<DensityOperator> {
        let d = self.dim();
        match (self.encoder, x) {
            (Encoder::Basis, ModelInput::Index(i)) => DensityOperator::basis_state(d, *i),
            (Encoder::Angle, ModelInput::Angles(a)) => {
                Error::check_dim(self.qubits, a.len())?;
                if a.iter().any(|t| !t.is_finite()) {
                    return Err(Error::invalid("inputs", "angles must be finite"));
                }
                let mut psi = CVector::from_element(1, Complex64::new(1.0, 0.0));
                for &t in a {
                    let half = 0.5 * t.rem_euclid(TAU);
                    let q = CVector::from_vec(vec![
                        Complex64::new(half.cos(), 0.0),
                        Complex64::new(half.sin(), 0.0),
                    ]);
                    psi = psi.kronecker(&q);
                }
                DensityOperator::pure(&psi)
            }
            _ => Err(Error::invalid(
                "inputs",
                "input kind does not match the model's encoder",
            )),
        }
    }

    /// `U rho U^dagger`.
    pub fn process(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        rho.evolve(&self.unitary)
    }
}

fn ry(theta: f64) -> CMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    )
}

fn rz(theta: f64) -> CMatrix {
    let zero = Complex64::new(0.0, 0.0);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(1.0, -0.5 * theta),
            zero,
            zero,
            Complex64::from_polar(1.0, 0.5 * theta),
        ],
    )
}

/// Permutation matrix of a CNOT between two of `k` qubits.
fn cnot(k: usize, control: usize, target: usize) -> CMatrix {
    let d = 1 << k;
    let cbit = 1 << (k - 1 - control);
    let tbit = 1 << (k - 1 - target);
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        let j = if i & cbit != 0 { i ^ tbit } else { i };
        m[(j, i)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Entangling pattern: none for one qubit, `0 -> 1` for two, and the ring
/// `j -> j+1 mod k` (applied for `j = 0, 1, ...`) otherwise.
fn entangler_pairs(k: usize) -> Vec<(usize, usize)> {
    match k {
        1 => vec![],
        2 => vec![(0, 1)],
        _ => (0..k).map(|j| (j, (j + 1) % k)).collect(),
    }
}

fn circuit_unitary(k: usize, layers: &[Layer]) -> CMatrix {
    let d = 1 << k;
    let mut u = CMatrix::identity(d, d);
    for layer in layers {
        let mut local = CMatrix::identity(1, 1);
        for q in 0..k {
            local = local.kronecker(&(ry(layer.ry[q]) * rz(layer.rz[q])));
        }
        u = local * u;
        for (c, t) in entangler_pairs(k) {
            u = cnot(k, c, t) * u;
        }
    }
    u
}

/// Ensemble of encoded states `V_x |0...0>` with the given prior.
pub fn encode_ensemble(
    model: &VariationalModel,
    inputs: &[ModelInput],
    prior: &ProbVector,
) -> Result<Ensemble> {
    Error::check_dim(inputs.len(), prior.len())?;
    let states = inputs
        .iter()
        .map(|x| model.encode(x))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(prior.clone(), states)
}

/// Class probabilities `tr(O_c E(U rho U^dagger))` for an arbitrary input state.
pub fn classify_state(
    model: &VariationalModel,
    rho: &DensityOperator,
    channel: Option<&QuantumChannel>,
) -> Result<ProbVector> {
    Error::check_dim(model.dim(), rho.dim())?;
    let mut out = model.process(rho)?;
    if let Some(ch) = channel {
        Error::check_dim(model.dim(), ch.in_dim())?;
        Error::check_dim(model.dim(), ch.out_dim())?;
        out = ch.apply(&out)?;
    }
    ProbVector::new(model.povm.probabilities(&out)?)
}

/// Class probabilities for symbol `x`.
pub fn classify_probabilities(
    model: &VariationalModel,
    x: &ModelInput,
    channel: Option<&QuantumChannel>,
) -> Result<ProbVector> {
    classify_state(model, &model.encode(x)?, channel)
}

/// `max_x sum_c |P(c | x) - P_noisy(c | x)|` over the given input states.
pub fn degradation_on_states(
    model: &VariationalModel,
    states: &[DensityOperator],
    channel: &QuantumChannel,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for rho in states {
        let clean = classify_state(model, rho, None)?;
        let noisy = classify_state(model, rho, Some(channel))?;
        let shift: f64 = clean
            .as_slice()
            .iter()
            .zip(noisy.as_slice())
            .map(|(a, b)| (a - b).abs())
            .sum();
        worst = worst.max(shift);
    }
    Ok(worst)
}

/// Performance degradation caused by `channel` over the input list.
pub fn performance_degradation(
    model: &VariationalModel,
    inputs: &[ModelInput],
    channel: &QuantumChannel,
) -> Result<f64> {
    let states = inputs
        .iter()
        .map(|x| model.encode(x))
        .collect::<Result<Vec<_>>>()?;
    degradation_on_states(model, &states, channel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    pub p: f64,
    pub gamma_actual: f64,
    /// `2p`.
    pub gamma_bound: f64,
    pub leakage_b: f64,
    /// Width of the certified bracket on `leakage_b`.
    pub leakage_b_gap: f64,
    pub leakage_r: f64,
    /// `log2(1 + 2 (1 - p) d / p)`.
    pub leakage_bound: f64,
}

/// The leakage ceiling written in terms of a degradation level `gamma`:
/// `log2((1 - 2d) + 4d / gamma)`. At `gamma = 2p` it equals the ceiling in `p`.
pub fn leakage_bound_from_degradation(gamma: f64, d: usize) -> f64 {
    let d = d as f64;
    ((1.0 - 2.0 * d) + 4.0 * d / gamma).log2()
}

/// One row per `p`: measured and bounded degradation, and leakage of the
/// processed ensemble `U rho_x U^dagger` under global depolarizing noise.
/// Every row invariant is checked and a violation is a consistency error.
pub fn tradeoff_curve(
    model: &VariationalModel,
    inputs: &[ModelInput],
    prior: &ProbVector,
    p_grid: &[f64],
    gap_tol: f64,
) -> Result<Vec<TradeoffRow>> {
    if let Some(p) = p_grid.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::invalid(
            "p_grid",
            format!("every p must lie in (0, 1], got {p}"),
        ));
    }
    let d = model.dim();
    let encoded = encode_ensemble(model, inputs, prior)?;
    let processed = encoded.map_states(|rho| model.process(rho))?;
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let ch = depolarizing_global(p, d)?;
        let gamma_actual = degradation_on_states(model, encoded.states(), &ch)?;
        let gamma_bound = 2.0 * p;
        let (b, r) = leakage_after_channel(&ch, &processed, gap_tol)?;
        let leakage_bound = dp_epsilon_bound_depolarizing(p, d)? / std::f64::consts::LN_2;
        let row = TradeoffRow {
            p,
            gamma_actual,
            gamma_bound,
            leakage_b: b.value,
            leakage_b_gap: b.gap,
            leakage_r: r.value,
            leakage_bound,
        };
        check_row(&row, d)?;
        rows.push(row);
    }
    Ok(rows)
}

fn check_row(row: &TradeoffRow, d: usize) -> Result<()> {
    let fail = |what: &str| {
        Err(Error::Consistency(format!(
            "trade-off row p = {}: {what}",
            row.p
        )))
    };
    if row.gamma_actual > row.gamma_bound + DEGRADATION_SLACK {
        return fail("degradation exceeds 2p");
    }
    if row.leakage_r.is_finite() && row.leakage_b > row.leakage_r + row.leakage_b_gap + CHAIN_SLACK
    {
        return fail("barycentric leakage exceeds pairwise leakage");
    }
    let ceiling = row.leakage_bound + CHAIN_SLACK;
    if row.leakage_b > ceiling + row.leakage_b_gap || row.leakage_r > ceiling {
        return fail("leakage exceeds the depolarizing ceiling");
    }
    if row.gamma_actual > 0.0 {
        let via_gamma = leakage_bound_from_degradation(row.gamma_bound, d);
        if (via_gamma - row.leakage_bound).abs() > 1e-9 * row.leakage_bound.abs().max(1.0) {
            return fail("degradation form of the ceiling disagrees with the p form");
        }
        if row.leakage_r > via_gamma + CHAIN_SLACK {
            return fail("pairwise leakage exceeds the degradation-form ceiling");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::depolarizing_local;
    use crate::leakage::{barycentric_leakage, pairwise_leakage};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn bare(qubits: usize, encoder: Encoder) -> VariationalModel {
        VariationalModel::new(
            qubits,
            encoder,
            vec![],
            Povm::computational_basis(1 << qubits),
        )
        .unwrap()
    }

    fn diag_states() -> Vec<DensityOperator> {
        vec![
            DensityOperator::from_diagonal(&[0.75, 0.25]).unwrap(),
            DensityOperator::from_diagonal(&[0.25, 0.75]).unwrap(),
        ]
    }

    #[test]
    fn validation() {
        let povm = Povm::computational_basis(4);
        assert!(VariationalModel::new(0, Encoder::Basis, vec![], povm.clone()).is_err());
        assert!(VariationalModel::new(3, Encoder::Basis, vec![], povm.clone()).is_err());
        let short = Layer {
            ry: vec![0.0],
            rz: vec![0.0, 0.0],
        };
        assert!(VariationalModel::new(2, Encoder::Basis, vec![short], povm.clone()).is_err());
        let m = VariationalModel::new(2, Encoder::Basis, vec![], povm).unwrap();
        assert!(m.encode(&ModelInput::Angles(vec![0.0, 0.0])).is_err());
        assert!(m.encode(&ModelInput::Index(4)).is_err());
        let a = bare(2, Encoder::Angle);
        assert!(a.encode(&ModelInput::Angles(vec![0.0])).is_err());
        assert!(a.encode(&ModelInput::Angles(vec![0.0, f64::NAN])).is_err());
    }

    #[test]
    fn circuit_is_unitary_and_ordered() {
        for k in 1..=4 {
            let m = VariationalModel::with_random_layers(
                k,
                Encoder::Basis,
                3,
                Povm::computational_basis(1 << k),
                k as u64,
            )
            .unwrap();
            assert!(unitarity_defect(m.circuit()) < 1e-12);
        }
        // Qubit 0 is the most significant bit: CNOT 0 -> 1 maps |10> to |11>.
        let c = cnot(2, 0, 1);
        assert_eq!(c[(3, 2)], Complex64::new(1.0, 0.0));
        assert_eq!(c[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(entangler_pairs(3), vec![(0, 1), (1, 2), (2, 0)]);
        // R_y(pi) on qubit 0 alone, no entangler: |00> -> |10>.
        let layer = Layer {
            ry: vec![PI],
            rz: vec![0.0],
        };
        let m = VariationalModel::new(1, Encoder::Basis, vec![layer], Povm::computational_basis(2))
            .unwrap();
        let out = m
            .process(&DensityOperator::basis_state(2, 0).unwrap())
            .unwrap();
        assert!(
            out.operator()
                .max_abs_diff(DensityOperator::basis_state(2, 1).unwrap().operator())
                < 1e-15
        );
    }

    #[test]
    fn encoding_examples() {
        let m = bare(2, Encoder::Basis);
        let inputs: Vec<_> = (0..4).map(ModelInput::Index).collect();
        let e = encode_ensemble(&m, &inputs, &ProbVector::uniform(4).unwrap()).unwrap();
        for (i, s) in e.states().iter().enumerate() {
            assert_eq!(s, &DensityOperator::basis_state(4, i).unwrap());
        }

        let a = bare(2, Encoder::Angle);
        let same = vec![ModelInput::Angles(vec![0.3, 1.1]); 3];
        let e = encode_ensemble(&a, &same, &ProbVector::uniform(3).unwrap()).unwrap();
        assert_abs_diff_eq!(
            barycentric_leakage(&e, 1e-6).unwrap().value,
            0.0,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(pairwise_leakage(&e).unwrap().value, 0.0, epsilon = 1e-8);

        let a = bare(1, Encoder::Angle);
        let e = encode_ensemble(
            &a,
            &[ModelInput::Angles(vec![0.0]), ModelInput::Angles(vec![PI])],
            &ProbVector::uniform(2).unwrap(),
        )
        .unwrap();
        assert!(
            e.states()[0]
                .operator()
                .max_abs_diff(DensityOperator::basis_state(2, 0).unwrap().operator())
                < 1e-15
        );
        assert!(
            e.states()[1]
                .operator()
                .max_abs_diff(DensityOperator::basis_state(2, 1).unwrap().operator())
                < 1e-15
        );
        // Angles wrap modulo 2 pi.
        let wrapped = a.encode(&ModelInput::Angles(vec![PI + TAU])).unwrap();
        assert!(wrapped.operator().max_abs_diff(e.states()[1].operator()) < 1e-14);
        assert!(encode_ensemble(
            &a,
            &[ModelInput::Angles(vec![0.0])],
            &ProbVector::uniform(2).unwrap()
        )
        .is_err());
    }

    #[test]
    fn classify_examples() {
        let m = bare(1, Encoder::Basis);
        let p = classify_probabilities(&m, &ModelInput::Index(0), None).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0]);

        let m2 = VariationalModel::with_random_layers(
            2,
            Encoder::Basis,
            2,
            Povm::computational_basis(4),
            5,
        )
        .unwrap();
        let full = depolarizing_global(1.0, 4).unwrap();
        let p = classify_probabilities(&m2, &ModelInput::Index(2), Some(&full)).unwrap();
        for &q in p.as_slice() {
            assert_abs_diff_eq!(q, 0.25, epsilon = 1e-14);
        }

        let half = depolarizing_global(0.5, 2).unwrap();
        let p = classify_state(&m, &diag_states()[0], Some(&half)).unwrap();
        assert_abs_diff_eq!(p.as_slice()[0], 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(p.as_slice()[1], 0.375, epsilon = 1e-15);
        assert!(classify_state(&m, &diag_states()[0], Some(&full)).is_err());
    }

    #[test]
    fn degradation_examples() {
        let m = bare(1, Encoder::Basis);
        let id = QuantumChannel::identity(2).unwrap();
        assert_eq!(
            performance_degradation(&m, &[ModelInput::Index(0), ModelInput::Index(1)], &id)
                .unwrap(),
            0.0
        );
        let half = depolarizing_global(0.5, 2).unwrap();
        assert_abs_diff_eq!(
            degradation_on_states(&m, &diag_states(), &half).unwrap(),
            0.25,
            epsilon = 1e-15
        );

        for seed in 0..20 {
            let k = 1 + (seed as usize) % 3;
            let m = VariationalModel::with_random_layers(
                k,
                Encoder::Basis,
                2,
                Povm::computational_basis(1 << k),
                seed,
            )
            .unwrap();
            let inputs: Vec<_> = (0..1 << k).map(ModelInput::Index).collect();
            for i in 1..=20 {
                let p = 0.05 * i as f64;
                let g =
                    performance_degradation(&m, &inputs, &depolarizing_global(p, 1 << k).unwrap())
                        .unwrap();
                assert!(g <= 2.0 * p + DEGRADATION_SLACK);
                let g = performance_degradation(&m, &inputs, &depolarizing_local(p, k).unwrap())
                    .unwrap();
                assert!((0.0..=2.0 + 1e-12).contains(&g));
            }
        }
    }

    #[test]
    fn tradeoff_rows() {
        let m = VariationalModel::with_random_layers(
            1,
            Encoder::Basis,
            1,
            Povm::computational_basis(2),
            3,
        )
        .unwrap();
        let inputs = [ModelInput::Index(0), ModelInput::Index(1)];
        let prior = ProbVector::uniform(2).unwrap();
        let grid = [0.1, 0.25, 0.5, 0.75, 1.0];
        let rows = tradeoff_curve(&m, &inputs, &prior, &grid, 1e-6).unwrap();
        assert_eq!(rows.len(), grid.len());
        let last = rows.last().unwrap();
        assert_eq!(last.gamma_bound, 2.0);
        assert_abs_diff_eq!(last.leakage_b, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(last.leakage_r, 0.0, epsilon = 1e-9);
        assert_eq!(last.leakage_bound, 0.0);
        assert_abs_diff_eq!(rows[2].leakage_bound, 5f64.log2(), epsilon = 1e-12);
        // Depolarized basis states: R = log2((2 - p) / p), independent of U.
        assert_abs_diff_eq!(rows[2].leakage_r, 3f64.log2(), epsilon = 1e-9);
        for w in rows.windows(2) {
            assert!(w[1].leakage_bound < w[0].leakage_bound);
            assert!(w[1].gamma_bound > w[0].gamma_bound);
        }
        assert!(tradeoff_curve(&m, &inputs, &prior, &[0.0], 1e-6).is_err());
        assert!(tradeoff_curve(&m, &inputs, &prior, &[1.5], 1e-6).is_err());
    }

    #[test]
    fn degradation_form_identity() {
        for d in [2, 4, 8, 64] {
            for i in 1..=100 {
                let p = i as f64 / 100.0;
                let direct = (1.0 + 2.0 * (1.0 - p) * d as f64 / p).log2();
                assert_abs_diff_eq!(
                    leakage_bound_from_degradation(2.0 * p, d),
                    direct,
                    epsilon = 1e-12
                );
            }
        }
    }
}
