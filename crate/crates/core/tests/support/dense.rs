//! Dense reference simulator: every gate becomes an explicit `2^n × 2^n` matrix built from
//! Kronecker products, applied by matrix–vector multiplication. Wire 0 is the leftmost factor.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qppo_core::qsim::Gate;

pub type Mat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn m2(a: [Complex64; 4]) -> Mat {
    DMatrix::from_row_slice(2, 2, &a)
}

pub fn identity() -> Mat {
    m2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
}

pub fn pauli_x() -> Mat {
    m2([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> Mat {
    m2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

fn proj0() -> Mat {
    m2([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

fn proj1() -> Mat {
    m2([c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
}

/// `⊗_w ops[w]`, wire 0 leftmost.
pub fn kron_all(ops: &[Mat]) -> Mat {
    ops.iter().skip(1).fold(ops[0].clone(), |acc, op| acc.kronecker(op))
}

/// `op` on `wire`, identity elsewhere.
pub fn on_wire(op: &Mat, wire: usize, n: usize) -> Mat {
    let ops: Vec<Mat> = (0..n)
        .map(|w| if w == wire { op.clone() } else { identity() })
        .collect();
    kron_all(&ops)
}

/// `|0⟩⟨0|_a ⊗ I + |1⟩⟨1|_a ⊗ op_b`.
fn controlled(a: usize, b: usize, op: &Mat, n: usize) -> Mat {
    let idle: Vec<Mat> = (0..n).map(|w| if w == a { proj0() } else { identity() }).collect();
    let active: Vec<Mat> = (0..n)
        .map(|w| match w {
            _ if w == a => proj1(),
            _ if w == b => op.clone(),
            _ => identity(),
        })
        .collect();
    kron_all(&idle) + kron_all(&active)
}

pub fn gate_matrix(gate: &Gate, n: usize) -> Mat {
    match *gate {
        Gate::Rx { wire, angle } => {
            let (s, co) = (angle / 2.0).sin_cos();
            on_wire(&m2([c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]), wire, n)
        }
        Gate::Ry { wire, angle } => {
            let (s, co) = (angle / 2.0).sin_cos();
            on_wire(&m2([c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]), wire, n)
        }
        Gate::Rz { wire, angle } => {
            let h = angle / 2.0;
            let m = m2([
                Complex64::from_polar(1.0, -h),
                c(0.0, 0.0),
                c(0.0, 0.0),
                Complex64::from_polar(1.0, h),
            ]);
            on_wire(&m, wire, n)
        }
        Gate::H { wire } => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            on_wire(&m2([c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]), wire, n)
        }
        Gate::Cnot { control, target } => controlled(control, target, &pauli_x(), n),
        Gate::Cz { a, b } => controlled(a, b, &pauli_z(), n),
    }
}

pub fn dense_state(gates: &[Gate], n: usize) -> DVector<Complex64> {
    let mut psi = DVector::from_element(1 << n, c(0.0, 0.0));
    psi[0] = c(1.0, 0.0);
    for g in gates {
        psi = gate_matrix(g, n) * psi;
    }
    psi
}

pub fn dense_expvals(gates: &[Gate], n: usize, wires: &[usize]) -> Vec<f64> {
    let psi = dense_state(gates, n);
    wires
        .iter()
        .map(|&w| (psi.adjoint() * on_wire(&pauli_z(), w, n) * &psi)[(0, 0)].re)
        .collect()
}
