use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use super::{Composite, LocalQuantity, Party, PredictionRow, PredictionTable, Scenario};
use crate::quantum::{Axis, PauliString, StateVector};

const N: usize = 3;

/// `(|000> + |111>)/sqrt(2)` shared by Alice, Bob and Charlie, one qubit each.
///
/// Quantities `Xk`, `Yk` are `σx`, `σy` on particle `k`. The state is a +1
/// eigenstate of `X1X2X3` and a -1 eigenstate of each `X·Y·Y` arrangement;
/// those four values were read off the simulator and frozen below.
pub fn build_ghz() -> Scenario {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << N];
    amps[0b000] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[0b111] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let state = StateVector::new(amps).expect("normalized");

    let owners = vec![Party::Alice, Party::Bob, Party::Charlie];
    let quantities = (0..N)
        .flat_map(|q| {
            let party = owners[q];
            [(Axis::X, 'X'), (Axis::Y, 'Y')].map(move |(axis, c)| LocalQuantity {
                name: format!("{c}{}", q + 1),
                party,
                observable: PauliString::single(N, q, axis).expect("in range").into(),
            })
        })
        .collect();

    let composite = |axes: [Axis; 3]| {
        let factors: Vec<String> = axes
            .iter()
            .enumerate()
            .map(|(q, a)| format!("{a:?}{}", q + 1))
            .collect();
        Composite {
            label: factors.concat(),
            factors,
            observable: PauliString::new(crate::quantum::Sign::Plus, axes.to_vec())
                .expect("3 qubits")
                .into(),
        }
    };
    use Axis::{X, Y};
    let composites = vec![
        composite([X, Y, Y]),
        composite([Y, X, Y]),
        composite([Y, Y, X]),
        composite([X, X, X]),
    ];

    let rows = vec![
        PredictionRow::new("xyy", "X1Y2Y3=-1", None, 1.0),
        PredictionRow::new("yxy", "Y1X2Y3=-1", None, 1.0),
        PredictionRow::new("yyx", "Y1Y2X3=-1", None, 1.0),
        PredictionRow::new("xxx", "X1X2X3=+1", None, 1.0),
        PredictionRow::new("alice-x", "Y2=-Y3", Some("X1=+1"), 1.0).with_intervening(&["X2", "X3"]),
        PredictionRow::new("bob-x", "Y1=-Y3", Some("X2=+1"), 1.0).with_intervening(&["X1", "X3"]),
        PredictionRow::new("charlie-x", "Y1=-Y2", Some("X3=+1"), 1.0)
            .with_intervening(&["X1", "X2"]),
    ];

    Scenario {
        name: "ghz".to_string(),
        state,
        owners,
        quantities,
        composites,
        predictions: PredictionTable { rows },
        joint_context: ["X1Y2Y3", "Y1X2Y3", "Y1Y2X3", "X1X2X3"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        run_event: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{joint_distribution, Outcome};
    use crate::scenarios::prediction_table;

    #[test]
    fn composites_are_definite() {
        let s = build_ghz();
        let expected = [-1.0, -1.0, -1.0, 1.0];
        for (c, e) in s.composites.iter().zip(expected) {
            let v = c.observable.expectation(&s.state).unwrap();
            assert!((v - e).abs() < 1e-12, "{}: {v}", c.label);
        }
        assert!(prediction_table(&s).unwrap().max_deviation < 1e-12);
    }

    #[test]
    fn joint_context_has_single_outcome() {
        let s = build_ghz();
        let dist = joint_distribution(&s.state, &s.joint().unwrap()).unwrap();
        assert_eq!(dist.len(), 1);
        let (tuple, p) = dist.entries().iter().next().unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        // product of the definite values is -1; classical values would give +1
        assert_eq!(tuple.product(), Outcome::Minus);
    }

    #[test]
    fn quantity_names() {
        assert_eq!(
            build_ghz().quantity_names(),
            vec!["X1", "Y1", "X2", "Y2", "X3", "Y3"]
        );
    }
}
