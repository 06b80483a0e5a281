use num_complex::Complex64;

use super::{LocalQuantity, Party, PredictionRow, PredictionTable, Scenario};
use crate::quantum::{Axis, Direction, Observable, PauliString, StateVector};

/// Grid spacing of the angle sweep in [`optimize_hardy_angle`].
pub const HARDY_SWEEP_STEP: f64 = 1e-4;

/// Setting angle maximizing the Hardy event probability. Frozen from
/// [`optimize_hardy_angle`] (grid step 1e-4 over (0, π), then golden-section
/// refinement to a bracket of width 1e-12).
pub const HARDY_OPTIMAL_ANGLE: f64 = 1.332478875769184;

/// Hardy event probability at [`HARDY_OPTIMAL_ANGLE`], frozen from the simulator.
pub const HARDY_OPTIMAL_PROBABILITY: f64 = 0.0901699437494742;

/// Two-qubit Hardy construction for a setting angle `angle` in (0, π).
///
/// Each party measures `Z` (`Z1`, `Z2`) or `D = cos(angle) Z + sin(angle) X`
/// (`D1`, `D2`). The state is the unique one orthogonal to `|11>`,
/// `|d+>|0>` and `|0>|d+>`, which is `(t|00> - |01> - |10>)/sqrt(t²+2)` with
/// `t = tan(angle/2)`. Three joint events are then impossible while
/// `D1 = D2 = +1` keeps a positive probability.
pub fn hardy_at_angle(angle: f64, event_probability: f64) -> Scenario {
    let t = (angle / 2.0).tan();
    let amps: Vec<Complex64> = [t, -1.0, -1.0, 0.0]
        .iter()
        .map(|&a| Complex64::new(a, 0.0))
        .collect();
    let (state, _) = StateVector::normalize(amps).expect("nonzero state");

    let d = Direction::in_xz_plane(angle);
    let z = |q: usize| -> Observable { PauliString::single(2, q, Axis::Z).expect("in range").into() };
    let quantity = |name: &str, party, observable| LocalQuantity {
        name: name.to_string(),
        party,
        observable,
    };
    let quantities = vec![
        quantity("Z1", Party::Alice, z(0)),
        quantity("D1", Party::Alice, Observable::local(2, 0, d).expect("in range")),
        quantity("Z2", Party::Bob, z(1)),
        quantity("D2", Party::Bob, Observable::local(2, 1, d).expect("in range")),
    ];
    let rows = vec![
        PredictionRow::new("both-z-down", "Z1=-1,Z2=-1", None, 0.0),
        PredictionRow::new("d1-up-z2-up", "D1=+1,Z2=+1", None, 0.0),
        PredictionRow::new("z1-up-d2-up", "Z1=+1,D2=+1", None, 0.0),
        PredictionRow::new("hardy-event", "D1=+1,D2=+1", None, event_probability),
    ];

    Scenario {
        name: "hardy".to_string(),
        state,
        owners: vec![Party::Alice, Party::Bob],
        quantities,
        composites: Vec::new(),
        predictions: PredictionTable { rows },
        joint_context: vec!["D1".to_string(), "D2".to_string()],
        run_event: Some("D1=+1,D2=+1".parse().expect("static predicate")),
    }
}

pub fn build_hardy() -> Scenario {
    hardy_at_angle(HARDY_OPTIMAL_ANGLE, HARDY_OPTIMAL_PROBABILITY)
}

/// `P(D1=+1, D2=+1)` at `angle`, computed by the measurement engine.
pub fn hardy_probability(angle: f64) -> f64 {
    let s = hardy_at_angle(angle, 0.0);
    let row = s.predictions.row("hardy-event").expect("row exists");
    s.evaluate_row(row).expect("commuting context")
}

/// Grid search over (0, π) at [`HARDY_SWEEP_STEP`], then golden-section
/// refinement around the best grid point. Returns `(angle, probability)`.
pub fn optimize_hardy_angle() -> (f64, f64) {
    let steps = (std::f64::consts::PI / HARDY_SWEEP_STEP) as usize;
    let (best, _) = (1..steps)
        .map(|k| {
            let a = k as f64 * HARDY_SWEEP_STEP;
            (a, hardy_probability(a))
        })
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best - HARDY_SWEEP_STEP, best + HARDY_SWEEP_STEP);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (hardy_probability(c), hardy_probability(d));
    while hi - lo > 1e-12 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = hardy_probability(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = hardy_probability(d);
        }
    }
    let angle = (lo + hi) / 2.0;
    (angle, hardy_probability(angle))
}
