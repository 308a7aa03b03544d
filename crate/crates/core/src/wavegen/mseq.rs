//! Maximal-length binary sequences from a Fibonacci LFSR.

use crate::error::{Error, Result};

/// Primitive feedback polynomials, one per degree, given as the exponents of
/// the non-constant terms (`[9, 5]` is `x^9 + x^5 + 1`).
pub const DEFAULT_TAPS: [&[u32]; 19] = [
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
];

pub fn default_taps(degree: u32) -> Option<&'static [u32]> {
    (2..=20).contains(&degree).then(|| DEFAULT_TAPS[(degree - 2) as usize])
}

/// An ordered list of ±1 chips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySequence {
    bits: Vec<i8>,
}

impl BinarySequence {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::invalid("binary sequence is empty"));
        }
        if let Some(i) = bits.iter().position(|&b| b != 1 && b != -1) {
            return Err(Error::invalid(format!("element {i} is {}, expected ±1", bits[i])));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `#(+1) - #(-1)`.
    pub fn imbalance(&self) -> i64 {
        self.bits.iter().map(|&b| b as i64).sum()
    }
}

/// Generates one period of the m-sequence for `x^degree + Σ x^t + 1`, mapped
/// to chips as `(-1)^bit`.
///
/// The recurrence is `a[n+m] = XOR_{t in taps} a[n+m-t]`; `init_state` holds
/// `a[0..m]` with `a[0]` in bit 0.
pub fn gen_msequence(degree: u32, taps: &[u32], init_state: u32) -> Result<BinarySequence> {
    if !(2..=20).contains(&degree) {
        return Err(Error::invalid(format!("degree must be in 2..=20, got {degree}")));
    }
    if taps.iter().any(|&t| t == 0 || t > degree) {
        return Err(Error::invalid(format!("taps {taps:?} must lie in 1..={degree}")));
    }
    if !taps.contains(&degree) {
        return Err(Error::invalid(format!("taps {taps:?} must include the degree {degree}")));
    }
    let mask = (1u32 << degree) - 1;
    let init = init_state & mask;
    if init == 0 {
        return Err(Error::ZeroState);
    }

    let expected = (1usize << degree) - 1;
    let mut state = init;
    let mut bits = Vec::with_capacity(expected);
    for step in 1..=expected {
        bits.push(if state & 1 == 0 { 1 } else { -1 });
        let fb = taps
            .iter()
            .fold(0u32, |acc, &t| acc ^ ((state >> (degree - t)) & 1));
        state = (state >> 1) | (fb << (degree - 1));
        if state == init && step < expected {
            return Err(Error::NonPrimitiveTaps {
                degree,
                taps: taps.to_vec(),
                period: step,
                expected,
            });
        }
    }
    if state != init {
        // the register entered a cycle that does not contain the initial state
        return Err(Error::NonPrimitiveTaps {
            degree,
            taps: taps.to_vec(),
            period: 0,
            expected,
        });
    }
    BinarySequence::new(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circular_acf(bits: &[i8]) -> Vec<i64> {
        let n = bits.len();
        (0..n)
            .map(|k| (0..n).map(|i| bits[i] as i64 * bits[(i + k) % n] as i64).sum())
            .collect()
    }

    #[test]
    fn degree3_matches_hand_simulation() {
        // a[n+3] = a[n] ^ a[n+1], a[0..3] = 1,1,1 -> 1 1 1 0 0 1 0
        let seq = gen_msequence(3, &[3, 2], 0b111).unwrap();
        assert_eq!(seq.bits(), &[-1, -1, -1, 1, 1, -1, 1]);
        assert_eq!(circular_acf(seq.bits()), vec![7, -1, -1, -1, -1, -1, -1]);
        assert_eq!(seq.imbalance(), -1);
    }

    #[test]
    fn default_taps_are_primitive_for_every_degree() {
        for degree in 2..=20 {
            let seq = gen_msequence(degree, default_taps(degree).unwrap(), 1).unwrap();
            assert_eq!(seq.len(), (1 << degree) - 1);
            assert_eq!(seq.imbalance().abs(), 1, "degree {degree}");
        }
    }

    #[test]
    fn two_valued_acf_up_to_degree_12() {
        for degree in 2..=12 {
            let seq = gen_msequence(degree, default_taps(degree).unwrap(), 0x5a5 & ((1 << degree) - 1) | 1).unwrap();
            let acf = circular_acf(seq.bits());
            assert_eq!(acf[0], seq.len() as i64);
            assert!(acf[1..].iter().all(|&r| r == -1), "degree {degree}");
        }
    }

    #[test]
    fn degree9_has_511_chips() {
        assert_eq!(gen_msequence(9, &[9, 5], 0x1ff).unwrap().len(), 511);
    }

    #[test]
    fn rejects_non_primitive_and_zero_state() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(matches!(
            gen_msequence(4, &[4, 2], 1),
            Err(Error::NonPrimitiveTaps { .. })
        ));
        assert!(matches!(gen_msequence(9, &[9, 5], 0), Err(Error::ZeroState)));
        assert!(gen_msequence(9, &[5], 1).is_err());
        assert!(gen_msequence(1, &[1], 1).is_err());
    }
}
