//! Dense statevector simulation for registers of up to ten qubits.
//!
//! Rotations follow the half-angle convention `R_G(φ) = exp(-i φ G / 2)`.
//! Wire 0 is the most significant bit of the basis index, so the basis state
//! `|0011⟩` on four wires has index 3.

use num_complex::Complex64;

use crate::error::{config_err, Result};

pub const MAX_QUBITS: usize = 10;

/// A single gate of the supported set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rx { wire: usize, angle: f64 },
    Ry { wire: usize, angle: f64 },
    Rz { wire: usize, angle: f64 },
    H { wire: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
}

/// Pauli generator of a rotation gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Gate {
    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// Same gate with its rotation angle replaced. Non-rotations are returned unchanged.
    pub fn with_angle(self, new: f64) -> Gate {
        match self {
            Gate::Rx { wire, .. } => Gate::Rx { wire, angle: new },
            Gate::Ry { wire, .. } => Gate::Ry { wire, angle: new },
            Gate::Rz { wire, .. } => Gate::Rz { wire, angle: new },
            other => other,
        }
    }

    /// The generator `G` of a rotation `exp(-i φ G / 2)` together with its wire.
    pub fn generator(&self) -> Option<(Pauli, usize)> {
        match *self {
            Gate::Rx { wire, .. } => Some((Pauli::X, wire)),
            Gate::Ry { wire, .. } => Some((Pauli::Y, wire)),
            Gate::Rz { wire, .. } => Some((Pauli::Z, wire)),
            _ => None,
        }
    }

    pub fn inverse(self) -> Gate {
        match self.angle() {
            Some(a) => self.with_angle(-a),
            None => self,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |w: usize| {
            if w < n_qubits {
                Ok(())
            } else {
                config_err(format!("wire {w} out of range for {n_qubits} qubits"))
            }
        };
        match *self {
            Gate::Rx { wire, angle } | Gate::Ry { wire, angle } | Gate::Rz { wire, angle } => {
                if !angle.is_finite() {
                    return config_err(format!("non-finite rotation angle {angle}"));
                }
                check(wire)
            }
            Gate::H { wire } => check(wire),
            Gate::Cnot { control: a, target: b } | Gate::Cz { a, b } => {
                check(a)?;
                check(b)?;
                if a == b {
                    return config_err(format!("two-qubit gate on repeated wire {a}"));
                }
                Ok(())
            }
        }
    }
}

/// Amplitudes of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zero basis state `|0…0⟩`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return config_err(format!("qubit count {n_qubits} outside [1, {MAX_QUBITS}]"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, wire: usize) -> usize {
        1 << (self.n_qubits - 1 - wire)
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Returns a new state with `gate` applied.
    pub fn applied(&self, gate: &Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply(gate)?;
        Ok(out)
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        match *gate {
            Gate::Rx { wire, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let m = [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ];
                self.apply_single(wire, m);
            }
            Gate::Ry { wire, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let m = [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ];
                self.apply_single(wire, m);
            }
            Gate::Rz { wire, angle } => {
                let lo = Complex64::from_polar(1.0, -angle / 2.0);
                let hi = Complex64::from_polar(1.0, angle / 2.0);
                let mask = self.mask(wire);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & mask == 0 { lo } else { hi };
                }
            }
            Gate::H { wire } => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(wire, [[h, h], [h, -h]]);
            }
            Gate::Cnot { control, target } => {
                let (cm, tm) = (self.mask(control), self.mask(target));
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            Gate::Cz { a, b } => {
                let m = self.mask(a) | self.mask(b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    fn apply_single(&mut self, wire: usize, m: [[Complex64; 2]; 2]) {
        let mask = self.mask(wire);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// `P |ψ⟩` for a Pauli `P` on `wire`. Not normalised in general (it is for Paulis, trivially).
    pub(crate) fn apply_pauli(&mut self, pauli: Pauli, wire: usize) {
        let mask = self.mask(wire);
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | mask]);
            let (b0, b1) = match pauli {
                Pauli::X => (a1, a0),
                Pauli::Y => (-i_unit * a1, i_unit * a0),
                Pauli::Z => (a0, -a1),
            };
            self.amps[i] = b0;
            self.amps[i | mask] = b1;
        }
    }

    /// `⟨self|other⟩`.
    pub(crate) fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Multiplies each amplitude by a real diagonal weight.
    pub(crate) fn scale_diagonal(&mut self, diag: &[f64]) {
        for (a, d) in self.amps.iter_mut().zip(diag) {
            *a *= *d;
        }
    }

    /// `⟨Z_wire⟩`, exactly.
    pub fn expval_z(&self, wire: usize) -> Result<f64> {
        if wire >= self.n_qubits {
            return config_err(format!("wire {wire} out of range for {} qubits", self.n_qubits));
        }
        let mask = self.mask(wire);
        let e: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum();
        Ok(e.clamp(-1.0, 1.0))
    }

    /// Diagonal of `Σ_w weights[w] Z_w` in the computational basis.
    pub(crate) fn weighted_z_diagonal(n_qubits: usize, wires: &[usize], weights: &[f64]) -> Vec<f64> {
        (0..1usize << n_qubits)
            .map(|i| {
                wires
                    .iter()
                    .zip(weights)
                    .map(|(&w, &u)| if i & (1 << (n_qubits - 1 - w)) == 0 { u } else { -u })
                    .sum()
            })
            .collect()
    }
}

/// Runs `gates` on `|0…0⟩` and returns `⟨Z⟩` for each measured wire in ascending order.
pub fn run_circuit(gates: &[Gate], n_qubits: usize, measured_wires: &[usize]) -> Result<Vec<f64>> {
    let state = final_state(gates, n_qubits)?;
    measure(&state, measured_wires)
}

/// The state after applying `gates` to `|0…0⟩`.
pub fn final_state(gates: &[Gate], n_qubits: usize) -> Result<StateVector> {
    let mut state = StateVector::new(n_qubits)?;
    for g in gates {
        state.apply(g)?;
    }
    Ok(state)
}

pub(crate) fn measure(state: &StateVector, measured_wires: &[usize]) -> Result<Vec<f64>> {
    if measured_wires.is_empty() {
        return config_err("no measured wires");
    }
    let mut wires = measured_wires.to_vec();
    wires.sort_unstable();
    wires.dedup();
    wires.iter().map(|&w| state.expval_z(w)).collect()
}
