//! Classical Renyi divergence and Sibson mutual information, and the Petz and
//! sandwiched quantum Renyi relative entropies.
//!
//! All results are in bits. `f64::INFINITY` is an ordinary result value: it is
//! returned whenever the support condition fails for an order `alpha >= 1`.

use crate::error::{Error, Result};
use crate::hermitian::{kernel_leak, DensityOperator, HermitianOperator, Spectrum, SUPPORT_TOL};

/// Orders closer than this to 1 are evaluated with the `alpha = 1` formula.
pub const NEAR_ONE: f64 = 1e-6;
/// Squared eigenvector overlap counted as nonzero in the Petz max-divergence.
pub const OVERLAP_TOL: f64 = 1e-12;
/// Tolerance on the total mass of a probability vector.
pub const PROB_SUM_TOL: f64 = 1e-10;

/// A probability mass function over a finite alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Entries must be finite and nonnegative (values above `-1e-12` are
    /// clamped to zero) and sum to one within [`PROB_SUM_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbability("empty alphabet".into()));
        }
        let mut probs = probs;
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::InvalidProbability(format!("entry {i} is {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProbability(format!("entries sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidProbability("empty alphabet".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }
}

/// Row-stochastic channel `P(y|x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalKernel {
    rows: Vec<ProbVector>,
}

impl ConditionalKernel {
    pub fn new(rows: Vec<ProbVector>) -> Result<Self> {
        let width = rows
            .first()
            .ok_or_else(|| Error::InvalidProbability("kernel has no rows".into()))?
            .len();
        for row in &rows {
            Error::check_dim(width, row.len())?;
        }
        Ok(Self { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(ProbVector::new)
                .collect::<Result<_>>()?,
        )
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, x: usize) -> &ProbVector {
        &self.rows[x]
    }
}

/// Order parameter of the Renyi families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RenyiOrder {
    /// `alpha` in `(0, 1) U (1, inf)`.
    Finite(f64),
    One,
    Infinity,
}

impl RenyiOrder {
    /// Maps `1.0` to [`RenyiOrder::One`] and `+inf` to [`RenyiOrder::Infinity`].
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha == f64::INFINITY {
            Ok(RenyiOrder::Infinity)
        } else if alpha == 1.0 {
            Ok(RenyiOrder::One)
        } else {
            RenyiOrder::Finite(alpha).resolve()
        }
    }

    /// Validates the order and snaps `|alpha - 1| < NEAR_ONE` to `One`.
    fn resolve(self) -> Result<Self> {
        match self {
            RenyiOrder::Finite(a) if !(a.is_finite() && a > 0.0) => Err(Error::InvalidOrder(a)),
            RenyiOrder::Finite(a) if (a - 1.0).abs() < NEAR_ONE => Ok(RenyiOrder::One),
            other => Ok(other),
        }
    }
}

/// `log2(sum_k 2^{e_k})` without overflow; `-inf` for an empty sum.
fn log2_sum_exp2(exps: impl Iterator<Item = f64>) -> f64 {
    let exps: Vec<f64> = exps.filter(|e| *e > f64::NEG_INFINITY).collect();
    let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    top + exps.iter().map(|e| (e - top).exp2()).sum::<f64>().log2()
}

/// Classical Renyi divergence `d_alpha(p || q)` in bits.
pub fn renyi_classical(p: &ProbVector, q: &ProbVector, alpha: RenyiOrder) -> Result<f64> {
    Error::check_dim(p.len(), q.len())?;
    let alpha = alpha.resolve()?;
    let pairs = || p.probs.iter().zip(&q.probs);
    let violated = pairs().any(|(&pi, &qi)| pi > 0.0 && qi == 0.0);
    let on_support = || pairs().filter(|(&pi, &qi)| pi > 0.0 && qi > 0.0);

    Ok(match alpha {
        RenyiOrder::One | RenyiOrder::Infinity if violated => f64::INFINITY,
        RenyiOrder::Finite(a) if a > 1.0 && violated => f64::INFINITY,
        RenyiOrder::One => on_support().map(|(pi, qi)| pi * (pi / qi).log2()).sum(),
        RenyiOrder::Infinity => on_support()
            .map(|(pi, qi)| pi / qi)
            .fold(0.0, f64::max)
            .log2(),
        RenyiOrder::Finite(a) => {
            let log_sum =
                log2_sum_exp2(on_support().map(|(pi, qi)| a * pi.log2() + (1.0 - a) * qi.log2()));
            log_sum / (a - 1.0)
        }
    })
}

/// Sibson's alpha-mutual information in bits.
///
/// For finite `alpha` the infimum over output distributions is evaluated in
/// closed form: `alpha/(alpha-1) * log2 sum_y (sum_x p(x) P(y|x)^alpha)^{1/alpha}`.
pub fn sibson_information(
    prior: &ProbVector,
    kernel: &ConditionalKernel,
    alpha: RenyiOrder,
) -> Result<f64> {
    Error::check_dim(kernel.inputs(), prior.len())?;
    if prior.support().next().is_none() {
        return Err(Error::InvalidProbability("prior has empty support".into()));
    }
    let alpha = alpha.resolve()?;
    let ny = kernel.outputs();
    let value = match alpha {
        RenyiOrder::One => {
            let marginal: Vec<f64> = (0..ny)
                .map(|y| {
                    prior
                        .support()
                        .map(|x| prior.probs[x] * kernel.rows[x].probs[y])
                        .sum()
                })
                .collect();
            let mut acc = 0.0;
            for x in prior.support() {
                for (y, &py) in marginal.iter().enumerate() {
                    let k = kernel.rows[x].probs[y];
                    if k > 0.0 {
                        acc += prior.probs[x] * k * (k / py).log2();
                    }
                }
            }
            acc
        }
        RenyiOrder::Infinity => (0..ny)
            .map(|y| {
                prior
                    .support()
                    .map(|x| kernel.rows[x].probs[y])
                    .fold(0.0, f64::max)
            })
            .sum::<f64>()
            .log2(),
        RenyiOrder::Finite(a) => {
            let total: f64 = (0..ny)
                .map(|y| {
                    prior
                        .support()
                        .map(|x| prior.probs[x] * kernel.rows[x].probs[y].powf(a))
                        .sum::<f64>()
                        .powf(1.0 / a)
                })
                .sum();
            a / (a - 1.0) * total.log2()
        }
    };
    Ok(value.max(0.0))
}

struct Pair {
    rho: Spectrum,
    sigma: Spectrum,
    contained: bool,
}

fn prepare(rho: &DensityOperator, sigma: &HermitianOperator) -> Result<Pair> {
    Error::check_dim(rho.dim(), sigma.dim())?;
    let sigma_spec = sigma.eig()?;
    if !sigma_spec.is_psd(crate::hermitian::PSD_TOL) {
        return Err(Error::NotPsd {
            min_eigenvalue: sigma_spec.min(),
        });
    }
    let contained = kernel_leak(rho.operator(), &sigma_spec, SUPPORT_TOL) <= SUPPORT_TOL;
    Ok(Pair {
        rho: rho.operator().eig()?,
        sigma: sigma_spec,
        contained,
    })
}

/// Eigenpairs `(value_i, value_j, |<i|j>|^2)` restricted to both supports.
fn overlaps(pair: &Pair) -> Vec<(f64, f64, f64)> {
    let cut_r = pair.rho.support_cutoff();
    let cut_s = pair.sigma.support_cutoff();
    let gram = pair.rho.eigenvectors.adjoint() * &pair.sigma.eigenvectors;
    let mut out = Vec::new();
    for (i, &v) in pair.rho.eigenvalues.iter().enumerate() {
        if v <= cut_r {
            continue;
        }
        for (j, &l) in pair.sigma.eigenvalues.iter().enumerate() {
            if l <= cut_s {
                continue;
            }
            out.push((v, l, gram[(i, j)].norm_sqr()));
        }
    }
    out
}

/// Umegaki relative entropy `tr rho (log rho - log sigma)` on the supports.
fn relative_entropy(pair: &Pair) -> f64 {
    if !pair.contained {
        return f64::INFINITY;
    }
    overlaps(pair)
        .into_iter()
        .map(|(v, l, w)| v * w * (v.log2() - l.log2()))
        .sum::<f64>()
}

/// Petz quantum Renyi relative entropy `D_alpha(rho || sigma)` in bits.
pub fn petz_renyi(
    rho: &DensityOperator,
    sigma: &HermitianOperator,
    alpha: RenyiOrder,
) -> Result<f64> {
    let alpha = alpha.resolve()?;
    let pair = prepare(rho, sigma)?;
    Ok(match alpha {
        RenyiOrder::One => relative_entropy(&pair),
        RenyiOrder::Infinity if !pair.contained => f64::INFINITY,
        RenyiOrder::Finite(a) if a > 1.0 && !pair.contained => f64::INFINITY,
        RenyiOrder::Infinity => overlaps(&pair)
            .into_iter()
            .filter(|&(_, _, w)| w > OVERLAP_TOL)
            .map(|(v, l, _)| v / l)
            .fold(0.0, f64::max)
            .log2(),
        RenyiOrder::Finite(a) => {
            let log_trace = log2_sum_exp2(
                overlaps(&pair)
                    .into_iter()
                    .filter(|&(_, _, w)| w > 0.0)
                    .map(|(v, l, w)| a * v.log2() + (1.0 - a) * l.log2() + w.log2()),
            );
            log_trace / (a - 1.0)
        }
    })
}

/// Sandwiched quantum Renyi relative entropy in bits.
///
/// Finite orders use `tr((sigma^{(1-a)/(2a)} rho sigma^{(1-a)/(2a)})^a)` with
/// powers taken on the support of `sigma`; the `alpha = inf` limit is
/// `log2 lambda_max(sigma^{-1/2} rho sigma^{-1/2})`.
pub fn sandwiched_renyi(
    rho: &DensityOperator,
    sigma: &HermitianOperator,
    alpha: RenyiOrder,
) -> Result<f64> {
    let alpha = alpha.resolve()?;
    let pair = prepare(rho, sigma)?;
    Ok(match alpha {
        RenyiOrder::One => relative_entropy(&pair),
        RenyiOrder::Infinity => match dominance_ratio(rho.operator(), &pair.sigma)? {
            Some(ratio) => ratio.log2(),
            None => f64::INFINITY,
        },
        RenyiOrder::Finite(a) if a > 1.0 && !pair.contained => f64::INFINITY,
        RenyiOrder::Finite(a) => {
            let log_trace = log2_sum_exp2(
                sandwiched_spectrum(&pair, a)?
                    .into_iter()
                    .filter(|&m| m > 0.0)
                    .map(|m| a * m.log2()),
            );
            log_trace / (a - 1.0)
        }
    })
}

/// Nonzero spectrum of `sigma^{(1-a)/(2a)} rho sigma^{(1-a)/(2a)}`.
///
/// With `rho = V D V^dagger` on its support this equals the spectrum of
/// `D^{1/2} V^dagger sigma^{(1-a)/a} V D^{1/2}`. The power can push genuine
/// eigenvalues far below any relative cutoff, so instead of thresholding them,
/// the directions of the support of `rho` inside the kernel of `sigma` are
/// counted with the (unpowered) support projector of `sigma` and that many
/// smallest eigenvalues are dropped.
fn sandwiched_spectrum(pair: &Pair, a: f64) -> Result<Vec<f64>> {
    let rho = &pair.rho;
    let cut = rho.support_cutoff();
    let keep: Vec<usize> = (0..rho.dim())
        .filter(|&i| rho.eigenvalues[i] > cut)
        .collect();
    let basis = rho.eigenvectors.select_columns(&keep);
    let mut half = basis.clone();
    for (c, &i) in keep.iter().enumerate() {
        half.column_mut(c).scale_mut(rho.eigenvalues[i].sqrt());
    }
    let s_cut = pair.sigma.support_cutoff();
    let e = (1.0 - a) / a;
    let weight = pair.sigma.map(|l| if l > s_cut { l.powf(e) } else { 0.0 });
    let support = pair.sigma.map(|l| if l > s_cut { 1.0 } else { 0.0 });
    let inside = support.conjugate_by(&basis.adjoint())?.eig()?;
    let dropped = inside
        .eigenvalues
        .iter()
        .filter(|&&g| g <= SUPPORT_TOL)
        .count();
    let spec = weight.conjugate_by(&half.adjoint())?.eig()?;
    Ok(spec.eigenvalues[dropped..]
        .iter()
        .map(|&m| m.max(0.0))
        .collect())
}

/// `inf { mu : rho <= mu sigma }`, or `None` when `rho` is not supported on
/// `sigma`. `sigma_spec` must come from a PSD operator.
pub(crate) fn dominance_ratio(
    rho: &HermitianOperator,
    sigma_spec: &Spectrum,
) -> Result<Option<f64>> {
    if kernel_leak(rho, sigma_spec, SUPPORT_TOL) > SUPPORT_TOL {
        return Ok(None);
    }
    let cut = sigma_spec.support_cutoff();
    let inv_sqrt = sigma_spec.map(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 });
    let top = rho.sandwich(&inv_sqrt)?.max_eigenvalue()?;
    Ok(Some(top.max(0.0)))
}
