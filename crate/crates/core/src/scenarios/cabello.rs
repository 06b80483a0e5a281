use super::{Composite, LocalQuantity, Party, PredictionRow, PredictionTable, Scenario};
use crate::quantum::{Axis, Observable, PauliString, StateVector};

const N: usize = 4;

fn local(name: &str, party: Party, qubit: usize, axis: Axis) -> LocalQuantity {
    LocalQuantity {
        name: name.to_string(),
        party,
        observable: PauliString::single(N, qubit, axis)
            .expect("qubit in range")
            .into(),
    }
}

fn composite(label: &str, factors: [&str; 2], sites: [(usize, Axis); 2]) -> Composite {
    Composite {
        label: label.to_string(),
        factors: factors.iter().map(|f| f.to_string()).collect(),
        observable: Observable::from(PauliString::on(N, &sites).expect("qubits in range")),
    }
}

/// Two singlets on particles (1,2) and (3,4); Alice holds 1 and 3, Bob 2 and 4.
///
/// Upper-case names are `σz` values and lower-case names `σx` values, with the
/// digit giving the particle (qubit `digit - 1`).
pub fn build_cabello() -> Scenario {
    let singlet = StateVector::singlet_pair();
    let state = singlet.tensor(&singlet).expect("4 qubits");
    use Axis::{X, Z};
    use Party::{Alice, Bob};

    let quantities = vec![
        local("A1", Alice, 0, Z),
        local("a1", Alice, 0, X),
        local("A3", Alice, 2, Z),
        local("a3", Alice, 2, X),
        local("B2", Bob, 1, Z),
        local("b2", Bob, 1, X),
        local("B4", Bob, 3, Z),
        local("b4", Bob, 3, X),
    ];
    let composites = vec![
        composite("A1A3", ["A1", "A3"], [(0, Z), (2, Z)]),
        composite("a1a3", ["a1", "a3"], [(0, X), (2, X)]),
        composite("B2b4", ["B2", "b4"], [(1, Z), (3, X)]),
        composite("b2B4", ["b2", "B4"], [(1, X), (3, Z)]),
    ];
    let alice = ["A1A3", "a1a3"];
    let bob = ["B2b4", "b2B4"];
    let rows = vec![
        PredictionRow::new("alice-zz", "B2=B4", Some("A1A3=+1"), 1.0).with_intervening(&bob),
        PredictionRow::new("alice-xx", "b2=b4", Some("a1a3=+1"), 1.0).with_intervening(&bob),
        PredictionRow::new("bob-zx", "A1=a3", Some("B2b4=+1"), 1.0).with_intervening(&alice),
        PredictionRow::new("bob-xz", "a1=-A3", Some("b2B4=-1"), 1.0).with_intervening(&alice),
        PredictionRow::new(
            "joint-run",
            "A1A3=+1,a1a3=+1,B2b4=+1,b2B4=-1",
            None,
            0.125,
        ),
        PredictionRow::new("alice-pair", "A1A3=+1,a1a3=+1", None, 0.25),
    ];

    Scenario {
        name: "cabello".to_string(),
        state,
        owners: vec![Alice, Bob, Alice, Bob],
        quantities,
        composites,
        predictions: PredictionTable { rows },
        joint_context: ["A1A3", "a1a3", "B2b4", "b2B4"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        run_event: Some(
            "A1A3=+1,a1a3=+1,B2b4=+1,b2B4=-1"
                .parse()
                .expect("static predicate"),
        ),
    }
}
