//! Entangled strategies and quantum independent sets.
//!
//! A quantum independent set of size `t` on a game graph gives an
//! entangled strategy winning with probability at least `t/k`
//! ([`lift_qis_to_strategy`]); a perfect strategy whose measurements
//! commute gives one of size `k` ([`strategy_to_qis`]).

pub mod catalog;
mod cmatrix;
pub mod io;
mod qis;
mod strategy;
mod support;

pub use catalog::{
    chsh_optimal_strategy, diagonal_strategy, magic_square_observables, magic_square_strategy,
    qis_from_independent_set,
};
pub use cmatrix::CMatrix;
pub use io::{parse_qis, parse_strategy, serialize_qis, serialize_strategy};
pub use qis::{
    lift_qis_to_strategy, strategy_to_qis, verify_quantum_independent_set, QisReport, QuantumIndependentSet,
    Violation, DEFAULT_QIS_TOL,
};
pub use strategy::{
    maximally_entangled_state, winning_probability, winning_probability_dense, winning_probability_max_entangled,
    QuantumStrategy, MEASUREMENT_TOL, STATE_TOL,
};
pub use support::{check_lemma1, supp, supp_hermitian, DEFAULT_SUPP_TOL};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::classical_value;
    use crate::error::Error;
    use crate::game::{all_ones, chsh, independent_set_game, magic_square, ClassicalStrategy};
    use crate::graph::{GameGraph, Graph};

    #[test]
    fn chsh_optimum() {
        let s = chsh_optimal_strategy();
        let v = winning_probability(&chsh(), &s).unwrap();
        assert!((v - (0.5 + 0.5 / 2f64.sqrt())).abs() < 1e-9);
        let dense = winning_probability_dense(&chsh(), &s).unwrap();
        assert!((v - dense).abs() < 1e-12);
    }

    #[test]
    fn magic_square_strategy_is_perfect() {
        let v = winning_probability(&magic_square(), &magic_square_strategy()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chsh_is_not_pseudo_telepathy() {
        assert!(matches!(
            strategy_to_qis(&chsh(), &chsh_optimal_strategy(), 1e-9),
            Err(Error::NotPseudoTelepathy { .. })
        ));
    }

    #[test]
    fn trivial_game_gives_scalar_qis() {
        let g = all_ones(2, 2, 2, 2);
        let s = diagonal_strategy(&g, &[ClassicalStrategy::new(vec![0, 1], vec![1, 0])]).unwrap();
        let qis = strategy_to_qis(&g, &s, 1e-9).unwrap();
        assert_eq!((qis.t(), qis.d()), (4, 1));
        let gg = GameGraph::build(&g).unwrap();
        assert!(verify_quantum_independent_set(&gg, &qis, DEFAULT_QIS_TOL).valid);
        for fam in qis.projectors() {
            let ones = fam.iter().filter(|p| p[(0, 0)] == 1.0).count();
            assert_eq!(ones, 1);
        }
    }

    #[test]
    fn commuting_perfect_strategy_round_trip() {
        // Two perfect classical strategies side by side on C5 with t = 2.
        let g = independent_set_game(&Graph::cycle(5), 2).unwrap();
        let s = diagonal_strategy(
            &g,
            &[ClassicalStrategy::new(vec![0, 2], vec![0, 2]), ClassicalStrategy::new(vec![1, 3], vec![1, 3])],
        )
        .unwrap();
        assert!((winning_probability(&g, &s).unwrap() - 1.0).abs() < 1e-12);
        let qis = strategy_to_qis(&g, &s, 1e-9).unwrap();
        assert_eq!((qis.t(), qis.d()), (4, 2));
        let gg = GameGraph::build(&g).unwrap();
        let report = verify_quantum_independent_set(&gg, &qis, DEFAULT_QIS_TOL);
        assert!(report.valid, "{:?}", report.violations);
        let lifted = lift_qis_to_strategy(&g, &gg, &qis).unwrap();
        assert!((winning_probability(&g, &lifted).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn classical_independent_set_lifts() {
        let g = chsh();
        let gg = GameGraph::build(&g).unwrap();
        let w = classical_value(&g).unwrap().witness.unwrap();
        let qis = qis_from_independent_set(&gg, &w).unwrap();
        assert_eq!(qis.t(), 3);
        let s = lift_qis_to_strategy(&g, &gg, &qis).unwrap();
        assert!(winning_probability(&g, &s).unwrap() >= 0.75 - 1e-9);
        // Completion outcomes are appended at index na.
        assert_eq!(s.alice()[0].len(), 3);
    }

    #[test]
    fn single_vertex_qis() {
        let g = chsh();
        let gg = GameGraph::build(&g).unwrap();
        let qis = qis_from_independent_set(&gg, &[5]).unwrap();
        let s = lift_qis_to_strategy(&g, &gg, &qis).unwrap();
        assert!(winning_probability(&g, &s).unwrap() >= 0.25 - 1e-12);
    }
}
