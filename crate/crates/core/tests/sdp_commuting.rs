use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qleak::hermitian::{random_density, random_unitary};
use qleak::sdp::{self, DEFAULT_MAX_CUTS};
use qleak::{DensityOperator, LmiForm, LmiProgram, SolveStatus};

fn random_probs(n: usize, seed: u64) -> Vec<f64> {
    random_density(n, n, seed)
        .unwrap()
        .operator()
        .eig()
        .unwrap()
        .eigenvalues
}

/// Minimum of `sum c` over `c >= 0`, `sum_x c_x p_x(i) >= p_y(i)` for all `y, i`,
/// by enumerating every basic solution of the inequality system.
fn barycentric_vertex_oracle(dists: &[Vec<f64>]) -> f64 {
    let n = dists.len();
    let d = dists[0].len();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for y in dists {
        for i in 0..d {
            rows.push((dists.iter().map(|p| p[i]).collect(), y[i]));
        }
    }
    for x in 0..n {
        let mut e = vec![0.0; n];
        e[x] = 1.0;
        rows.push((e, 0.0));
    }
    let mut best = f64::INFINITY;
    let mut pick = vec![0usize; n];
    fn visit(
        k: usize,
        start: usize,
        pick: &mut Vec<usize>,
        rows: &[(Vec<f64>, f64)],
        best: &mut f64,
    ) {
        let n = pick.len();
        if k == n {
            let a = DMatrix::from_fn(n, n, |r, c| rows[pick[r]].0[c]);
            let b = DVector::from_fn(n, |r, _| rows[pick[r]].1);
            let Some(c) = a.lu().solve(&b) else { return };
            let feasible = rows.iter().all(|(coef, rhs)| {
                coef.iter().zip(c.iter()).map(|(u, v)| u * v).sum::<f64>() >= rhs - 1e-12
            });
            if feasible && c.iter().all(|v| v.is_finite()) {
                *best = best.min(c.sum());
            }
            return;
        }
        for r in start..rows.len() {
            pick[k] = r;
            visit(k + 1, r + 1, pick, rows, best);
        }
    }
    visit(0, 0, &mut pick, &rows, &mut best);
    best
}

fn commuting_family(dists: &[Vec<f64>], seed: u64) -> Vec<DensityOperator> {
    let u = random_unitary(dists[0].len(), seed).unwrap();
    dists
        .iter()
        .map(|p| {
            DensityOperator::from_diagonal(p)
                .unwrap()
                .evolve(&u)
                .unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dominating_program_on_commuting_states(d in 1usize..=4, n in 1usize..=4, seed in any::<u64>()) {
        let dists: Vec<Vec<f64>> = (0..n).map(|x| random_probs(d, seed.wrapping_add(x as u64))).collect();
        let oracle: f64 = (0..d).map(|i| dists.iter().map(|p| p[i]).fold(0.0, f64::max)).sum();
        for states in [commuting_family(&dists, seed), dists.iter().map(|p| DensityOperator::from_diagonal(p).unwrap()).collect()] {
            let sol = sdp::solve(&LmiProgram::new(LmiForm::DominatingOperator, states).unwrap(), 1e-6, DEFAULT_MAX_CUTS).unwrap();
            prop_assert_eq!(sol.status, SolveStatus::Optimal);
            prop_assert!((sol.value - oracle).abs() <= 1e-8, "{} vs {oracle}", sol.value);
        }
    }

    #[test]
    fn barycentric_program_on_commuting_states(d in 1usize..=3, n in 1usize..=3, seed in any::<u64>()) {
        let dists: Vec<Vec<f64>> = (0..n).map(|x| random_probs(d, seed.wrapping_add(x as u64))).collect();
        let oracle = barycentric_vertex_oracle(&dists);
        let states = commuting_family(&dists, seed ^ 3);
        let sol = sdp::solve(&LmiProgram::new(LmiForm::BarycentricWeights, states).unwrap(), 1e-6, DEFAULT_MAX_CUTS).unwrap();
        prop_assert_eq!(sol.status, SolveStatus::Optimal);
        prop_assert!(sol.relative_gap() <= 1e-6);
        prop_assert!(sol.value >= 1.0 - 1e-12);
        prop_assert!((sol.value - oracle).abs() <= 1e-8, "{} vs {oracle}", sol.value);
    }

    #[test]
    fn values_bracket_and_dominate(d in 2usize..=4, n in 2usize..=4, seed in any::<u64>()) {
        let states: Vec<DensityOperator> = (0..n).map(|x| random_density(d, 1 + x % d, seed.wrapping_add(x as u64)).unwrap()).collect();
        let top = states.iter().map(|s| s.operator().max_eigenvalue().unwrap()).fold(0.0, f64::max);
        for form in [LmiForm::BarycentricWeights, LmiForm::DominatingOperator] {
            let sol = sdp::solve(&LmiProgram::new(form, states.clone()).unwrap(), 1e-6, DEFAULT_MAX_CUTS).unwrap();
            prop_assert!(sol.lower_bound <= sol.upper_bound + 1e-12);
            prop_assert!(sol.relative_gap() <= 1e-6);
            prop_assert!(sol.value >= 1.0 - 1e-9);
            prop_assert!(sol.value >= top - 1e-9);
            prop_assert!(sdp::violation_certificate(&LmiProgram::new(form, states.clone()).unwrap(), &sol.primal_point).unwrap().is_feasible());
        }
    }
}
