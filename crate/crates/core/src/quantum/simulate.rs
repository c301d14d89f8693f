//! Gate application, depolarizing channels and the ideal / noisy simulators.
//!
//! Gates are applied in place on the flat buffers rather than by forming the
//! embedded `2^n × 2^n` unitary; [`Gate::unitary`] is the reference the tests
//! compare against.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, HERMITIAN_TOL};

use super::circuit::{Circuit, Gate, Matrix2};
use super::state::{DensityMatrix, Statevector};

/// Bit mask of `qubit` in a big-endian `n`-qubit basis index.
#[inline]
fn mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Applies `u` to qubit `m` of the vector laid out at `data[offset + k·stride]`, `k < dim`.
fn apply_1q_strided(
    data: &mut [C64],
    dim: usize,
    offset: usize,
    stride: usize,
    m: usize,
    u: &Matrix2,
) {
    for k in 0..dim {
        if k & m != 0 {
            continue;
        }
        let i0 = offset + k * stride;
        let i1 = offset + (k | m) * stride;
        let (a, b) = (data[i0], data[i1]);
        data[i0] = u[0][0] * a + u[0][1] * b;
        data[i1] = u[1][0] * a + u[1][1] * b;
    }
}

fn apply_cnot_strided(
    data: &mut [C64],
    dim: usize,
    offset: usize,
    stride: usize,
    cm: usize,
    tm: usize,
) {
    for k in 0..dim {
        if k & cm != 0 && k & tm == 0 {
            data.swap(offset + k * stride, offset + (k | tm) * stride);
        }
    }
}

fn conj(u: &Matrix2) -> Matrix2 {
    [
        [u[0][0].conj(), u[0][1].conj()],
        [u[1][0].conj(), u[1][1].conj()],
    ]
}

fn check_gate(gate: &Gate, n_qubits: usize) -> Result<()> {
    gate.validate(n_qubits)
}

/// `U|ψ⟩` for a single gate.
pub fn apply_gate_pure(state: &Statevector, gate: &Gate) -> Result<Statevector> {
    let mut out = state.clone();
    apply_gate_pure_in_place(&mut out, gate)?;
    Ok(out)
}

pub(crate) fn apply_gate_pure_in_place(state: &mut Statevector, gate: &Gate) -> Result<()> {
    let n = state.n_qubits();
    check_gate(gate, n)?;
    let dim = state.dim();
    let amps = state.amplitudes_mut();
    match (gate.single_qubit_matrix(), *gate) {
        (Some(u), _) => apply_1q_strided(amps, dim, 0, 1, mask(n, gate.qubits()[0]), &u),
        (None, Gate::Cnot { control, target }) => {
            apply_cnot_strided(amps, dim, 0, 1, mask(n, control), mask(n, target))
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// `UρU†` for a single gate.
pub fn apply_gate_mixed(rho: &DensityMatrix, gate: &Gate) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    apply_gate_mixed_in_place(&mut out, gate)?;
    Ok(out)
}

pub(crate) fn apply_gate_mixed_in_place(rho: &mut DensityMatrix, gate: &Gate) -> Result<()> {
    let n = rho.n_qubits();
    check_gate(gate, n)?;
    let d = rho.dim();
    let data = rho.matrix_mut().as_mut_slice();
    match (gate.single_qubit_matrix(), *gate) {
        (Some(u), _) => {
            let m = mask(n, gate.qubits()[0]);
            // U·ρ acts on the row index of every column
            for col in 0..d {
                apply_1q_strided(data, d, col, d, m, &u);
            }
            // (Uρ)·U† acts on the column index of every row with conj(U)
            let uc = conj(&u);
            for row in 0..d {
                apply_1q_strided(data, d, row * d, 1, m, &uc);
            }
        }
        (None, Gate::Cnot { control, target }) => {
            let (cm, tm) = (mask(n, control), mask(n, target));
            for col in 0..d {
                apply_cnot_strided(data, d, col, d, cm, tm);
            }
            for row in 0..d {
                apply_cnot_strided(data, d, row * d, 1, cm, tm);
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(())
}

/// Global depolarizing channel `(1−p)ρ + (p/d)·I`.
pub fn depolarize_global(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    let d = rho.dim();
    let mut out = rho.clone();
    let data = out.matrix_mut().as_mut_slice();
    for z in data.iter_mut() {
        *z *= 1.0 - p;
    }
    let shift = p / d as f64;
    for i in 0..d {
        data[i * d + i] += shift;
    }
    Ok(out)
}

/// Depolarizing channel on a subset of one or two qubits:
/// `(1−p)ρ + (p/d_sub)·(Tr_sub ρ ⊗ I_sub)`.
pub fn depolarize_local(rho: &DensityMatrix, qubits: &[usize], p: f64) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    depolarize_local_in_place(&mut out, qubits, p)?;
    Ok(out)
}

pub(crate) fn depolarize_local_in_place(
    rho: &mut DensityMatrix,
    qubits: &[usize],
    p: f64,
) -> Result<()> {
    check_probability(p)?;
    let n = rho.n_qubits();
    if qubits.is_empty() || qubits.len() > 2 {
        return Err(Error::Invalid(format!(
            "local depolarizing acts on 1 or 2 qubits, got {}",
            qubits.len()
        )));
    }
    for &q in qubits {
        if q >= n {
            return Err(Error::InvalidQubitIndex {
                index: q,
                n_qubits: n,
            });
        }
    }
    if qubits.len() == 2 && qubits[0] == qubits[1] {
        return Err(Error::Invalid(format!("repeated qubit {}", qubits[0])));
    }
    if p == 0.0 {
        return Ok(());
    }

    let d = rho.dim();
    let sub_masks: Vec<usize> = qubits.iter().map(|&q| mask(n, q)).collect();
    let sub: usize = sub_masks.iter().sum();
    // every assignment of the subsystem bits
    let patterns: Vec<usize> = (0..1usize << qubits.len())
        .map(|bits| {
            sub_masks
                .iter()
                .enumerate()
                .filter(|(k, _)| bits >> k & 1 == 1)
                .map(|(_, m)| m)
                .sum()
        })
        .collect();
    let weight = p / patterns.len() as f64;

    let src = rho.matrix().clone();
    let data = rho.matrix_mut().as_mut_slice();
    for z in data.iter_mut() {
        *z *= 1.0 - p;
    }
    for i in 0..d {
        let i_rest = i & !sub;
        for j in 0..d {
            if i & sub != j & sub {
                continue;
            }
            let j_rest = j & !sub;
            let reduced: C64 = patterns
                .iter()
                .map(|&s| src[(i_rest | s, j_rest | s)])
                .sum();
            data[i * d + j] += reduced * weight;
        }
    }
    Ok(())
}

/// Runs the circuit on `|0…0⟩` without noise.
pub fn simulate_ideal(circuit: &Circuit) -> Result<Statevector> {
    let mut state = Statevector::zero_state(circuit.n_qubits())?;
    for gate in circuit.gates() {
        apply_gate_pure_in_place(&mut state, gate)?;
    }
    Ok(state)
}

/// Runs the circuit on `|0…0⟩⟨0…0|`, following every gate with a depolarizing
/// channel on that gate's qubits: probability `p1` for one-qubit gates, `p2`
/// for two-qubit gates.
pub fn simulate_noisy(circuit: &Circuit, p1: f64, p2: f64) -> Result<DensityMatrix> {
    check_probability(p1)?;
    check_probability(p2)?;
    let mut rho = Statevector::zero_state(circuit.n_qubits())?.to_density();
    for gate in circuit.gates() {
        apply_gate_mixed_in_place(&mut rho, gate)?;
        let p = if gate.arity() == 1 { p1 } else { p2 };
        depolarize_local_in_place(&mut rho, &gate.qubits(), p)?;
    }
    Ok(rho)
}

/// `Re Tr(O ρ)` for a Hermitian observable `O`.
pub fn expectation(op: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64> {
    if op.shape() != (rho.dim(), rho.dim()) {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: op.rows().max(op.cols()),
        });
    }
    let deviation = op.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(crate::linalg::LinalgError::NotHermitian { deviation }.into());
    }
    let value = op.trace_product(rho.matrix())?;
    debug_assert!(value.im.abs() <= 1e-9 * (1.0 + op.frobenius_norm()));
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ONE, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_gate(rng: &mut impl Rng, n: usize) -> Gate {
        let q = rng.gen_range(0..n);
        match rng.gen_range(0..if n > 1 { 4 } else { 3 }) {
            0 => Gate::Rx {
                qubit: q,
                theta: rng.gen_range(-PI..PI),
            },
            1 => Gate::Rz {
                qubit: q,
                theta: rng.gen_range(-PI..PI),
            },
            2 => Gate::H { qubit: q },
            _ => Gate::Cnot {
                control: q,
                target: (q + rng.gen_range(1..n)) % n,
            },
        }
    }

    fn random_circuit(rng: &mut impl Rng, n: usize, len: usize) -> Circuit {
        Circuit::with_gates(n, (0..len).map(|_| random_gate(rng, n)).collect()).unwrap()
    }

    fn random_density(rng: &mut impl Rng, n: usize) -> DensityMatrix {
        let d = 1 << n;
        let g = ComplexMatrix::from_fn(d, d, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let m = g.adjoint().matmul(&g).unwrap();
        let tr = m.trace().re;
        DensityMatrix::new(m.scale(C64::new(1.0 / tr, 0.0))).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[1.0, -1.0])
    }

    /// Partial trace over the last qubit of a 2-qubit matrix, then ⊗ I/2.
    fn replace_last_qubit(m: &ComplexMatrix) -> ComplexMatrix {
        let reduced =
            ComplexMatrix::from_fn(2, 2, |i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)]);
        kron(
            &reduced,
            &ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0)),
        )
    }

    #[test]
    fn rx_zero_is_identity_and_rx_pi_flips() {
        let psi = Statevector::normalized(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.7)]).unwrap();
        let out = apply_gate_pure(
            &psi,
            &Gate::Rx {
                qubit: 0,
                theta: 0.0,
            },
        )
        .unwrap();
        assert_eq!(out, psi);

        let zero = Statevector::zero_state(1).unwrap();
        let out = apply_gate_pure(
            &zero,
            &Gate::Rx {
                qubit: 0,
                theta: PI,
            },
        )
        .unwrap();
        assert!(out.amplitudes()[0].norm() < 1e-15);
        assert!((out.amplitudes()[1] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_on_10_gives_11() {
        let s = Statevector::basis(2, 0b10).unwrap();
        let out = apply_gate_pure(
            &s,
            &Gate::Cnot {
                control: 0,
                target: 1,
            },
        )
        .unwrap();
        assert_eq!(out, Statevector::basis(2, 0b11).unwrap());
    }

    #[test]
    fn invalid_qubit_is_rejected() {
        let s = Statevector::zero_state(2).unwrap();
        assert!(matches!(
            apply_gate_pure(&s, &Gate::H { qubit: 2 }),
            Err(Error::InvalidQubitIndex {
                index: 2,
                n_qubits: 2
            })
        ));
        let rho = s.to_density();
        assert!(apply_gate_mixed(
            &rho,
            &Gate::Cnot {
                control: 0,
                target: 5
            }
        )
        .is_err());
    }

    #[test]
    fn in_place_kernels_match_embedded_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..20 {
                let gate = random_gate(&mut rng, n);
                let u = gate.unitary(n).unwrap();
                let rho = random_density(&mut rng, n);
                let psi = simulate_ideal(&random_circuit(&mut rng, n, 6)).unwrap();

                let pure = apply_gate_pure(&psi, &gate).unwrap();
                let reference = u.apply(psi.amplitudes()).unwrap();
                for (a, b) in pure.amplitudes().iter().zip(&reference) {
                    assert!((a - b).norm() < 1e-12);
                }
                assert!((pure.norm_sqr() - 1.0).abs() < 1e-10);

                let mixed = apply_gate_mixed(&rho, &gate).unwrap();
                let reference = u
                    .matmul(rho.matrix())
                    .unwrap()
                    .matmul(&u.adjoint())
                    .unwrap();
                assert!(mixed.matrix().max_abs_diff(&reference) < 1e-12);
                assert!((mixed.trace() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn unitary_leaves_maximally_mixed_state_fixed() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        for gate in [
            Gate::H { qubit: 0 },
            Gate::Rx {
                qubit: 1,
                theta: 0.7,
            },
            Gate::Rz {
                qubit: 0,
                theta: -1.3,
            },
            Gate::Cnot {
                control: 1,
                target: 0,
            },
        ] {
            let out = apply_gate_mixed(&rho, &gate).unwrap();
            assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn mixed_rx_matches_pure_outer_product() {
        let zero = Statevector::zero_state(1).unwrap();
        let gate = Gate::Rx {
            qubit: 0,
            theta: 0.83,
        };
        let mixed = apply_gate_mixed(&zero.to_density(), &gate).unwrap();
        let pure = apply_gate_pure(&zero, &gate).unwrap().to_density();
        assert!(mixed.matrix().max_abs_diff(pure.matrix()) < 1e-15);
    }

    #[test]
    fn hadamard_on_zero_density() {
        let rho = Statevector::zero_state(1).unwrap().to_density();
        let out = apply_gate_mixed(&rho, &Gate::H { qubit: 0 }).unwrap();
        let plus = ComplexMatrix::from_fn(2, 2, |_, _| C64::new(0.5, 0.0));
        assert!(out.matrix().max_abs_diff(&plus) < 1e-15);
    }

    #[test]
    fn global_depolarizing_examples() {
        let rho = Statevector::zero_state(1).unwrap().to_density();
        assert_eq!(depolarize_global(&rho, 0.0).unwrap(), rho);
        let full = depolarize_global(&rho, 1.0).unwrap();
        assert_eq!(full, DensityMatrix::maximally_mixed(1).unwrap());
        let half = depolarize_global(&rho, 0.5).unwrap();
        assert!(
            half.matrix()
                .max_abs_diff(&ComplexMatrix::from_diag(&[0.75, 0.25]))
                < 1e-15
        );
        assert!(matches!(
            depolarize_global(&rho, 1.5),
            Err(Error::ProbabilityOutOfRange(_))
        ));
        assert!(depolarize_global(&rho, -0.1).is_err());
    }

    #[test]
    fn local_depolarizing_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho = random_density(&mut rng, 1);
        for p in [0.0, 0.2, 1.0] {
            let local = depolarize_local(&rho, &[0], p).unwrap();
            let global = depolarize_global(&rho, p).unwrap();
            assert!(local.matrix().max_abs_diff(global.matrix()) < 1e-15);
        }
        let rho2 = random_density(&mut rng, 2);
        assert_eq!(depolarize_local(&rho2, &[1], 0.0).unwrap(), rho2);
        let two = depolarize_local(&rho2, &[0, 1], 0.4).unwrap();
        let global = depolarize_global(&rho2, 0.4).unwrap();
        assert!(two.matrix().max_abs_diff(global.matrix()) < 1e-15);

        let zero = Statevector::zero_state(2).unwrap().to_density();
        let out = depolarize_local(&zero, &[1], 1.0).unwrap();
        let expected = replace_last_qubit(zero.matrix());
        assert!(out.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(
            out.matrix()
                .max_abs_diff(&ComplexMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0]))
                < 1e-15
        );
    }

    #[test]
    fn local_depolarizing_matches_partial_trace_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density(&mut rng, 2);
        let p = 0.37;
        let out = depolarize_local(&rho, &[1], p).unwrap();
        let expected = rho
            .matrix()
            .scale(C64::new(1.0 - p, 0.0))
            .add(&replace_last_qubit(rho.matrix()).scale(C64::new(p, 0.0)))
            .unwrap();
        assert!(out.matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn local_depolarizing_matches_pauli_twirl() {
        // (1−p)ρ + p·(1/4)Σ_P PρP on the chosen qubit
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let rho = random_density(&mut rng, 3);
        let p = 0.61;
        let paulis = [
            ComplexMatrix::identity(2),
            ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap(),
            ComplexMatrix::from_rows(&[
                vec![ZERO, C64::new(0.0, -1.0)],
                vec![C64::new(0.0, 1.0), ZERO],
            ])
            .unwrap(),
            pauli_z(),
        ];
        let id = ComplexMatrix::identity(2);
        let mut expected = rho.matrix().scale(C64::new(1.0 - p, 0.0));
        for pauli in &paulis {
            let full = kron(&kron(&id, pauli), &id);
            let term = full.matmul(rho.matrix()).unwrap().matmul(&full).unwrap();
            expected = expected.add(&term.scale(C64::new(p / 4.0, 0.0))).unwrap();
        }
        let out = depolarize_local(&rho, &[1], p).unwrap();
        assert!(out.matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn local_depolarizing_errors() {
        let rho = Statevector::zero_state(2).unwrap().to_density();
        assert!(matches!(
            depolarize_local(&rho, &[2], 0.1),
            Err(Error::InvalidQubitIndex { .. })
        ));
        assert!(matches!(
            depolarize_local(&rho, &[0], 2.0),
            Err(Error::ProbabilityOutOfRange(_))
        ));
        assert!(depolarize_local(&rho, &[], 0.1).is_err());
        assert!(depolarize_local(&rho, &[0, 0], 0.1).is_err());
    }

    #[test]
    fn depolarizing_disjoint_qubits_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 3);
            let a =
                depolarize_local(&depolarize_local(&rho, &[0], 0.3).unwrap(), &[2], 0.6).unwrap();
            let b =
                depolarize_local(&depolarize_local(&rho, &[2], 0.6).unwrap(), &[0], 0.3).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
            let a = depolarize_local(&depolarize_local(&rho, &[0, 1], 0.2).unwrap(), &[2], 0.5)
                .unwrap();
            let b = depolarize_local(&depolarize_local(&rho, &[2], 0.5).unwrap(), &[0, 1], 0.2)
                .unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn global_depolarizing_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..10 {
            let r1 = random_density(&mut rng, 2);
            let r2 = random_density(&mut rng, 2);
            let alpha: f64 = rng.gen();
            let p: f64 = rng.gen();
            let mix = |a: &ComplexMatrix, b: &ComplexMatrix| {
                a.scale(C64::new(alpha, 0.0))
                    .add(&b.scale(C64::new(1.0 - alpha, 0.0)))
                    .unwrap()
            };
            let mixed = DensityMatrix::new(mix(r1.matrix(), r2.matrix())).unwrap();
            let lhs = depolarize_global(&mixed, p).unwrap();
            let rhs = mix(
                depolarize_global(&r1, p).unwrap().matrix(),
                depolarize_global(&r2, p).unwrap().matrix(),
            );
            assert!(lhs.matrix().max_abs_diff(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn ideal_simulation_examples() {
        let empty = Circuit::new(2).unwrap();
        assert_eq!(
            simulate_ideal(&empty).unwrap(),
            Statevector::basis(2, 0).unwrap()
        );

        let h = Circuit::with_gates(2, vec![Gate::H { qubit: 0 }]).unwrap();
        let out = simulate_ideal(&h).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [r, 0.0, r, 0.0];
        for (a, e) in out.amplitudes().iter().zip(expected) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-15);
        }

        let mut zero_ansatz = Circuit::new(3).unwrap();
        for q in 0..3 {
            zero_ansatz
                .push(Gate::Rx {
                    qubit: q,
                    theta: 0.0,
                })
                .unwrap();
            zero_ansatz
                .push(Gate::Rz {
                    qubit: q,
                    theta: 0.0,
                })
                .unwrap();
        }
        zero_ansatz
            .push(Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        zero_ansatz
            .push(Gate::Cnot {
                control: 1,
                target: 2,
            })
            .unwrap();
        // RZ(0) is exactly the identity here since e^{±i0} = 1
        assert_eq!(
            simulate_ideal(&zero_ansatz).unwrap(),
            Statevector::zero_state(3).unwrap()
        );
    }

    #[test]
    fn noiseless_simulation_matches_ideal_outer_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let len = rng.gen_range(0..15);
            let c = random_circuit(&mut rng, n, len);
            let psi = simulate_ideal(&c).unwrap();
            let rho = simulate_noisy(&c, 0.0, 0.0).unwrap();
            assert!(rho.matrix().max_abs_diff(psi.to_density().matrix()) <= 1e-10);
        }
    }

    #[test]
    fn single_rx_closed_form() {
        let theta = 1.1;
        let p1 = 0.23;
        let c = Circuit::with_gates(1, vec![Gate::Rx { qubit: 0, theta }]).unwrap();
        let rho = simulate_noisy(&c, p1, 0.9).unwrap();
        let pure = simulate_ideal(&c).unwrap().to_density();
        let expected = pure
            .matrix()
            .scale(C64::new(1.0 - p1, 0.0))
            .add(&ComplexMatrix::identity(2).scale(C64::new(p1 / 2.0, 0.0)))
            .unwrap();
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn full_noise_reduces_purity_and_keeps_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let mut c = Circuit::new(3).unwrap();
        for q in 0..3 {
            c.push(Gate::Rx {
                qubit: q,
                theta: rng.gen_range(-1.0..1.0),
            })
            .unwrap();
        }
        c.push(Gate::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        c.push(Gate::Cnot {
            control: 1,
            target: 2,
        })
        .unwrap();
        let rho = simulate_noisy(&c, 1.0, 1.0).unwrap();
        assert!(rho.purity() < 1.0 - 1e-6);
        assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());

        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let c = random_circuit(&mut rng, n, 10);
            let rho = simulate_noisy(&c, rng.gen(), rng.gen()).unwrap();
            assert!((rho.trace() - 1.0).abs() <= 1e-9);
            assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn expectation_examples() {
        let zero = Statevector::zero_state(1).unwrap().to_density();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((expectation(&ComplexMatrix::identity(2), &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!((expectation(&pauli_z(), &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&pauli_z(), &mixed).unwrap().abs() < 1e-15);
        assert!(matches!(
            expectation(&ComplexMatrix::identity(4), &zero),
            Err(Error::DimensionMismatch { .. })
        ));
        let non_herm = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap();
        assert!(expectation(&non_herm, &zero).is_err());
    }

    #[test]
    fn expectation_matches_eigenbasis_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 3);
            let op = ComplexMatrix::from_fn(8, 8, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .hermitian_part();
            let eig = crate::linalg::hermitian_eig(&op).unwrap();
            let mut oracle = 0.0;
            for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                let v: Vec<C64> = (0..8).map(|i| eig.eigenvectors[(i, k)]).collect();
                let rv = rho.matrix().apply(&v).unwrap();
                let quad: C64 = v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum();
                oracle += lambda * quad.re;
            }
            assert!((expectation(&op, &rho).unwrap() - oracle).abs() < 1e-12);
        }
    }
}
