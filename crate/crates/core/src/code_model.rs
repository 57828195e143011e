//! Three-qubit bit-flip code: encodings, parity syndromes, and the Markov
//! model of untracked flip dynamics.
//!
//! The eight logical encodings are labeled by the Pauli-X pattern relating
//! them to the reference encoding `III` (index 0), with single bit flips
//! connecting encodings that differ in exactly one bit. Two-qubit parities
//! (Z1Z2, Z2Z3) identify single flips; complementary encodings share both
//! parities and cannot be distinguished by the syndrome.

use crate::error::{Error, Result};

/// Bit patterns (bit1, bit2, bit3) for encoding indices 0..=7.
///
/// The index order is III, XII, IXI, IIX, XXI, XIX, IXX, XXX: single-flip
/// encodings first, then double flips, then the triple flip. This is not
/// binary counting order.
const BITS: [[bool; 3]; 8] = [
    [false, false, false], // 0 III
    [true, false, false],  // 1 XII
    [false, true, false],  // 2 IXI
    [false, false, true],  // 3 IIX
    [true, true, false],   // 4 XXI
    [true, false, true],   // 5 XIX
    [false, true, true],   // 6 IXX
    [true, true, true],    // 7 XXX
];

const LABELS: [&str; 8] = ["III", "XII", "IXI", "IIX", "XXI", "XIX", "IXX", "XXX"];

const fn parity(a: bool, b: bool) -> i8 {
    if a == b {
        1
    } else {
        -1
    }
}

const fn parities_of(bits: [bool; 3]) -> [i8; 2] {
    [parity(bits[0], bits[1]), parity(bits[1], bits[2])]
}

const fn index_of(bits: [bool; 3]) -> u8 {
    let mut k = 0;
    while k < 8 {
        if BITS[k][0] == bits[0] && BITS[k][1] == bits[1] && BITS[k][2] == bits[2] {
            return k as u8;
        }
        k += 1;
    }
    unreachable!()
}

const fn flipped_index(k: usize, bit0: usize) -> u8 {
    let mut bits = BITS[k];
    bits[bit0] = !bits[bit0];
    index_of(bits)
}

/// `NEIGHBORS[k][b]` is the encoding reached from `k` by flipping bit `b+1`.
pub(crate) const NEIGHBORS: [[u8; 3]; 8] = {
    let mut table = [[0u8; 3]; 8];
    let mut k = 0;
    while k < 8 {
        let mut b = 0;
        while b < 3 {
            table[k][b] = flipped_index(k, b);
            b += 1;
        }
        k += 1;
    }
    table
};

/// `PARITIES[k]` is `(s_{1,2|k}, s_{2,3|k})`, each `+1` or `-1`.
pub(crate) const PARITIES: [[i8; 2]; 8] = {
    let mut table = [[0i8; 2]; 8];
    let mut k = 0;
    while k < 8 {
        table[k] = parities_of(BITS[k]);
        k += 1;
    }
    table
};

/// One of the eight logical encodings of the three-qubit bit-flip code.
///
/// Index, bit triplet, and parity pair are stored redundantly; filters read
/// the parities on every step, so they are precomputed once.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Encoding {
    index: u8,
    bits: [bool; 3],
    parities: [i8; 2],
}

impl Encoding {
    /// The reference encoding `III`.
    pub const fn reference() -> Self {
        Self::from_index_const(0)
    }

    const fn from_index_const(k: usize) -> Self {
        Encoding {
            index: k as u8,
            bits: BITS[k],
            parities: PARITIES[k],
        }
    }

    pub fn from_index(k: u8) -> Result<Self> {
        if k > 7 {
            return Err(Error::invalid(format!("encoding index {k} out of 0..=7")));
        }
        Ok(Self::from_index_const(k as usize))
    }

    pub fn from_bits(bits: [bool; 3]) -> Self {
        Self::from_index_const(index_of(bits) as usize)
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn bits(&self) -> [bool; 3] {
        self.bits
    }

    /// Parity eigenvalue pair `(s_{1,2}, s_{2,3})`.
    pub fn parities(&self) -> (i8, i8) {
        (self.parities[0], self.parities[1])
    }

    pub fn label(&self) -> &'static str {
        LABELS[self.index as usize]
    }

    /// Encoding with all three bits flipped. Complements share both parities,
    /// so the syndrome cannot tell them apart.
    pub fn complement(&self) -> Self {
        Self::from_index_const(7 - self.index as usize)
    }

    /// Flip one bit (1-based index), returning the neighboring encoding.
    /// An involution: flipping the same bit twice returns the original.
    pub fn flip(&self, bit: u8) -> Result<Self> {
        if !(1..=3).contains(&bit) {
            return Err(Error::invalid(format!("bit index {bit} out of 1..=3")));
        }
        Ok(self.flip_idx(bit as usize - 1))
    }

    #[inline]
    pub(crate) fn flip_idx(&self, bit0: usize) -> Self {
        Self::from_index_const(NEIGHBORS[self.index as usize][bit0] as usize)
    }
}

impl std::fmt::Debug for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}(k={})", self.label(), self.index)
    }
}

/// A pair of observed parity values, each restricted to +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyndromePair {
    s12: i8,
    s23: i8,
}

impl SyndromePair {
    pub fn new(s12: i8, s23: i8) -> Result<Self> {
        if (s12 != 1 && s12 != -1) || (s23 != 1 && s23 != -1) {
            return Err(Error::invalid(format!(
                "syndrome values must be +1 or -1, got ({s12}, {s23})"
            )));
        }
        Ok(SyndromePair { s12, s23 })
    }

    pub fn s12(&self) -> i8 {
        self.s12
    }

    pub fn s23(&self) -> i8 {
        self.s23
    }
}

/// Update an encoding estimate from an observed syndrome pair.
///
/// Parities that differ from the estimate's select which single bit flipped:
/// only `s12` → bit 1, only `s23` → bit 3, both → bit 2, neither → unchanged.
/// The mapping is total, so single flips are always decoded.
pub fn decode_syndrome(estimate: Encoding, observed: SyndromePair) -> Encoding {
    let (p12, p23) = estimate.parities();
    match (observed.s12 != p12, observed.s23 != p23) {
        (false, false) => estimate,
        (true, false) => estimate.flip_idx(0),
        (false, true) => estimate.flip_idx(2),
        (true, true) => estimate.flip_idx(1),
    }
}

/// Generator matrix for independent bit flips at rate `mu` per qubit.
///
/// Off-diagonal entries are `mu` exactly where two encodings differ by a
/// single flip, diagonal entries are `-3 mu`, and every column sums to zero.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    entries: [[f64; 8]; 8],
    rate: f64,
}

impl TransitionMatrix {
    pub fn entries(&self) -> &[[f64; 8]; 8] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

#[allow(clippy::needless_range_loop)]
pub fn markov_matrix(mu: f64) -> Result<TransitionMatrix> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::invalid(format!("flip rate must be positive, got {mu}")));
    }
    let mut entries = [[0.0; 8]; 8];
    for k in 0..8 {
        entries[k][k] = -3.0 * mu;
        for b in 0..3 {
            let j = NEIGHBORS[k][b] as usize;
            entries[k][j] = mu;
        }
    }
    Ok(TransitionMatrix { entries, rate: mu })
}

/// A probability distribution over the eight encodings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityVector {
    p: [f64; 8],
}

impl ProbabilityVector {
    const SUM_TOL: f64 = 1e-12;

    pub fn new(p: [f64; 8]) -> Result<Self> {
        if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::invalid("probability components must be >= 0".to_string()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(ProbabilityVector { p })
    }

    /// All weight on a single encoding.
    pub fn point(e: Encoding) -> Self {
        let mut p = [0.0; 8];
        p[e.index() as usize] = 1.0;
        ProbabilityVector { p }
    }

    pub fn uniform() -> Self {
        ProbabilityVector { p: [0.125; 8] }
    }

    pub fn components(&self) -> &[f64; 8] {
        &self.p
    }

    pub fn component(&self, k: usize) -> f64 {
        self.p[k]
    }
}

/// Evolve a distribution for time `t` under independent flips at rate `mu`.
///
/// Each bit flips independently, so the propagator factors into per-bit
/// two-state kernels; this closed product form solves the master equation
/// exactly. The distribution relaxes to uniform (1/8 per encoding) as
/// `mu * t` grows.
pub fn propagate(p0: &ProbabilityVector, mu: f64, t: f64) -> Result<ProbabilityVector> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("time must be >= 0, got {t}")));
    }
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::invalid(format!("flip rate must be >= 0, got {mu}")));
    }
    // Per-bit flip probability after time t.
    let q = 0.5 * (1.0 - (-2.0 * mu * t).exp());
    let mut out = [0.0; 8];
    for (k_to, out_k) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k_from, &w) in p0.p.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut kernel = 1.0;
            for (to, from) in BITS[k_to].iter().zip(&BITS[k_from]) {
                kernel *= if to != from { q } else { 1.0 - q };
            }
            acc += kernel * w;
        }
        *out_k = acc;
    }
    // Remove accumulated roundoff before the simplex check.
    let sum: f64 = out.iter().sum();
    for x in &mut out {
        *x /= sum;
    }
    ProbabilityVector::new(out)
}

/// Matrix-exponential route for [`propagate`], by scaling and squaring.
///
/// Kept as an independent cross-check of the product-form solution; the two
/// agree to better than 1e-10 on this 8x8 generator.
#[allow(clippy::needless_range_loop)]
pub fn propagate_expm(p0: &ProbabilityVector, mu: f64, t: f64) -> Result<ProbabilityVector> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("time must be >= 0, got {t}")));
    }
    let m = markov_matrix(mu.max(f64::MIN_POSITIVE))?;
    let mut a = [[0.0; 8]; 8];
    for r in 0..8 {
        for c in 0..8 {
            a[r][c] = t * if mu > 0.0 { m.entries[r][c] } else { 0.0 };
        }
    }
    let exp_a = expm8(&a);
    let mut out = [0.0; 8];
    for r in 0..8 {
        for c in 0..8 {
            out[r] += exp_a[r][c] * p0.p[c];
        }
    }
    let sum: f64 = out.iter().sum();
    for x in &mut out {
        *x = (*x / sum).max(0.0);
    }
    let sum: f64 = out.iter().sum();
    for x in &mut out {
        *x /= sum;
    }
    ProbabilityVector::new(out)
}

fn matmul8(a: &[[f64; 8]; 8], b: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let mut c = [[0.0; 8]; 8];
    for i in 0..8 {
        for k in 0..8 {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..8 {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// exp(A) for an 8x8 matrix via scaling-and-squaring with a Taylor series.
#[allow(clippy::needless_range_loop)]
fn expm8(a: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let norm: f64 = (0..8)
        .map(|r| a[r].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 1.0 / (1u64 << s.min(63)) as f64;
    let mut b = [[0.0; 8]; 8];
    for r in 0..8 {
        for c in 0..8 {
            b[r][c] = a[r][c] * scale;
        }
    }
    // Taylor: sum B^j / j!, converged well past double precision at ||B|| <= 0.5.
    let mut result = [[0.0; 8]; 8];
    for (r, row) in result.iter_mut().enumerate() {
        row[r] = 1.0;
    }
    let mut term = result;
    for j in 1..=24 {
        term = matmul8(&term, &b);
        let inv = 1.0 / (j as f64);
        for r in 0..8 {
            for c in 0..8 {
                term[r][c] *= inv;
                result[r][c] += term[r][c];
            }
        }
    }
    for _ in 0..s {
        result = matmul8(&result, &result);
    }
    result
}

/// Average fidelity with no jump tracking: `[(1 + exp(-2 mu t)) / 2]^3`.
pub fn no_tracking_fidelity(mu: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0 && mu >= 0.0);
    let e = (-2.0 * mu * t).exp();
    let half = 0.5 * (1.0 + e);
    half * half * half
}
