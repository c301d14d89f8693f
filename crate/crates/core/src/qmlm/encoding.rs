use crate::bits::{hamming, BitString};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::quantum::Statevector;

const PATTERN_TOL: f64 = 1e-9;

/// `⊗ₖ (|+⟩ if bit k is set, else |0⟩)`, qubit 0 first.
pub fn encode_label(bits: &BitString) -> Result<Statevector> {
    if bits.is_empty() {
        return Err(Error::EmptyLabel);
    }
    let l = bits.len();
    let amplitude = std::f64::consts::FRAC_1_SQRT_2.powi(bits.count_ones() as i32);
    // |0⟩ factors force their bit to 0; |+⟩ factors allow either value
    let forced_zero: usize = bits
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| !b)
        .map(|(k, _)| 1usize << (l - 1 - k))
        .sum();
    let amps = (0..1usize << l)
        .map(|i| {
            if i & forced_zero == 0 {
                C64::new(amplitude, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Statevector::from_raw(l, amps))
}

/// Inverse of [`encode_label`]: `|+⟩ ↦ 1`, `|0⟩ ↦ 0`.
///
/// Each qubit is classified by its probability of reading `1` (0 for `|0⟩`,
/// ½ for `|+⟩`); the reconstructed encoding must then match the input state.
pub fn decode_label(state: &Statevector) -> Result<BitString> {
    let l = state.n_qubits();
    let amps = state.amplitudes();
    let mut bits = Vec::with_capacity(l);
    for k in 0..l {
        let m = 1usize << (l - 1 - k);
        let p_one: f64 = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        if p_one.abs() <= PATTERN_TOL {
            bits.push(false);
        } else if (p_one - 0.5).abs() <= PATTERN_TOL {
            bits.push(true);
        } else {
            return Err(Error::NotAnEncodedLabel { qubit: k });
        }
    }
    let bits = BitString::new(bits);
    let expected = encode_label(&bits)?;
    for (i, (a, b)) in amps.iter().zip(expected.amplitudes()).enumerate() {
        if (a - b).norm() > PATTERN_TOL {
            // first qubit whose bit differs between the offending index and a pattern index
            let qubit = (0..l).find(|&k| i >> (l - 1 - k) & 1 == 1).unwrap_or(0);
            return Err(Error::NotAnEncodedLabel { qubit });
        }
    }
    Ok(bits)
}

/// `2^{−d_H(a, b)}`, the fidelity between two encoded labels.
pub fn label_fidelity(a: &BitString, b: &BitString) -> Result<f64> {
    let d = hamming(a, b)?;
    Ok(0.5f64.powi(d as i32))
}
