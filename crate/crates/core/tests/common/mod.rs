//! Dense-matrix reference implementation shared by the integration tests.
//! Everything here works on explicit `2^n × 2^n` matrices built by Kronecker
//! products, with no use of the library's bit-mask algebra.
#![allow(dead_code)]

use num_complex::Complex64;

use eprlab::measurement::{CommutingContext, Outcome, OutcomeTuple};
use eprlab::quantum::{Axis, Observable, PauliString, StateVector};

pub type Matrix = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

pub fn axis_matrix(a: Axis) -> Matrix {
    match a {
        Axis::I => identity(2),
        Axis::X => vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]],
        Axis::Y => vec![vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]],
        Axis::Z => vec![vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]],
    }
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0., 0.); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0., 0.); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0., 0.) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn scale(a: &Matrix, s: Complex64) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

/// Qubit 0 is the leftmost Kronecker factor.
pub fn pauli_matrix(p: &PauliString) -> Matrix {
    let mut m = vec![vec![c(p.sign().value(), 0.)]];
    for &a in p.axes() {
        m = kron(&m, &axis_matrix(a));
    }
    m
}

pub fn observable_matrix(o: &Observable) -> Matrix {
    let mut m = vec![vec![c(o.sign().value(), 0.)]];
    for site in o.sites() {
        let local = match site {
            None => identity(2),
            Some(d) => {
                let [x, y, z] = d.components();
                vec![vec![c(z, 0.), c(x, -y)], vec![c(x, y), c(-z, 0.)]]
            }
        };
        m = kron(&m, &local);
    }
    m
}

pub fn apply(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn expectation(m: &Matrix, state: &StateVector) -> Complex64 {
    let v = state.amplitudes();
    apply(m, v).iter().zip(v).map(|(mv, a)| a.conj() * mv).sum()
}

/// `(I + s·M)/2`
pub fn projector(m: &Matrix, outcome: Outcome) -> Matrix {
    let id = identity(m.len());
    scale(&add(&id, &scale(m, c(f64::from(outcome.value()), 0.))), c(0.5, 0.))
}

/// Every tuple's probability `‖Π_k … Π_1 ψ‖²`, including zero-probability
/// tuples, in `+1`-before-`-1` lexicographic order.
pub fn dense_distribution(state: &StateVector, ctx: &CommutingContext) -> Vec<(OutcomeTuple, f64)> {
    let mats: Vec<Matrix> = ctx.observables().iter().map(observable_matrix).collect();
    let k = mats.len();
    (0..1usize << k)
        .map(|bits| {
            let outcomes: Vec<Outcome> = (0..k)
                .map(|j| {
                    if bits >> (k - 1 - j) & 1 == 1 {
                        Outcome::Minus
                    } else {
                        Outcome::Plus
                    }
                })
                .collect();
            let mut v = state.amplitudes().to_vec();
            for (m, &o) in mats.iter().zip(&outcomes) {
                v = apply(&projector(m, o), &v);
            }
            let p = v.iter().map(|a| a.norm_sqr()).sum();
            (OutcomeTuple::new(outcomes), p)
        })
        .collect()
}

/// Commutation by comparing `AB` and `BA` entrywise.
pub fn dense_commutes(a: &Matrix, b: &Matrix) -> bool {
    max_abs_diff(&matmul(a, b), &matmul(b, a)) < 1e-12
}

pub fn all_paulis(n: usize) -> Vec<PauliString> {
    let axes = [Axis::I, Axis::X, Axis::Y, Axis::Z];
    (0..4usize.pow(n as u32))
        .map(|mut k| {
            let mut v = vec![Axis::I; n];
            for q in (0..n).rev() {
                v[q] = axes[k % 4];
                k /= 4;
            }
            PauliString::new(eprlab::quantum::Sign::Plus, v).unwrap()
        })
        .collect()
}
