//! Arithmetic over Z2^a × Z4^b.
//!
//! Binary coordinates are stored as `bool` and read as the elements {0, 2} of
//! Z4 whenever they take part in mod-4 arithmetic. A vector therefore has a
//! single canonical storage form and the factor 2 is applied in exactly one
//! place.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// An element of Z4, always reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Z4(u8);

impl Z4 {
    pub const ZERO: Z4 = Z4(0);
    pub const ONE: Z4 = Z4(1);
    pub const TWO: Z4 = Z4(2);
    pub const THREE: Z4 = Z4(3);

    pub const fn new(v: u32) -> Self {
        Z4((v & 3) as u8)
    }

    pub const fn value(self) -> u8 {
        self.0
    }

    pub const fn is_odd(self) -> bool {
        self.0 & 1 == 1
    }
}

impl Add for Z4 {
    type Output = Z4;
    fn add(self, rhs: Z4) -> Z4 {
        Z4((self.0 + rhs.0) & 3)
    }
}

impl Sub for Z4 {
    type Output = Z4;
    fn sub(self, rhs: Z4) -> Z4 {
        Z4((self.0 + 4 - rhs.0) & 3)
    }
}

impl Mul for Z4 {
    type Output = Z4;
    fn mul(self, rhs: Z4) -> Z4 {
        Z4((self.0 * rhs.0) & 3)
    }
}

impl Neg for Z4 {
    type Output = Z4;
    fn neg(self) -> Z4 {
        Z4((4 - self.0) & 3)
    }
}

impl fmt::Display for Z4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Image of a quaternary digit under the Gray map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitPair {
    pub hi: bool,
    pub lo: bool,
}

impl BitPair {
    pub const fn new(hi: bool, lo: bool) -> Self {
        BitPair { hi, lo }
    }
}

/// Gray map Z4 → Z2²: 0 ↦ 00, 1 ↦ 01, 2 ↦ 11, 3 ↦ 10.
pub const fn gray_map(d: Z4) -> BitPair {
    match d.0 {
        0 => BitPair::new(false, false),
        1 => BitPair::new(false, true),
        2 => BitPair::new(true, true),
        _ => BitPair::new(true, false),
    }
}

pub const fn gray_inverse(p: BitPair) -> Z4 {
    match (p.hi, p.lo) {
        (false, false) => Z4(0),
        (false, true) => Z4(1),
        (true, true) => Z4(2),
        (true, false) => Z4(3),
    }
}

/// An element of Z2^a × Z4^b.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MixedVector {
    binary: Vec<bool>,
    quaternary: Vec<Z4>,
}

impl MixedVector {
    pub fn new(binary: Vec<bool>, quaternary: Vec<Z4>) -> Self {
        MixedVector { binary, quaternary }
    }

    /// Builds a vector from small integers; binary entries are reduced mod 2.
    pub fn from_digits(binary: &[u8], quaternary: &[u8]) -> Self {
        MixedVector {
            binary: binary.iter().map(|&b| b & 1 == 1).collect(),
            quaternary: quaternary.iter().map(|&q| Z4::new(q as u32)).collect(),
        }
    }

    pub fn zero(binary_len: usize, quaternary_len: usize) -> Self {
        MixedVector {
            binary: vec![false; binary_len],
            quaternary: vec![Z4::ZERO; quaternary_len],
        }
    }

    /// The vector whose every coordinate is 2 (binary coordinates set).
    pub fn all_twos(binary_len: usize, quaternary_len: usize) -> Self {
        MixedVector {
            binary: vec![true; binary_len],
            quaternary: vec![Z4::TWO; quaternary_len],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.binary.len(), self.quaternary.len())
    }

    pub fn len(&self) -> usize {
        self.binary.len() + self.quaternary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn binary(&self) -> &[bool] {
        &self.binary
    }

    pub fn quaternary(&self) -> &[Z4] {
        &self.quaternary
    }

    pub fn is_zero(&self) -> bool {
        !self.binary.iter().any(|&b| b) && self.quaternary.iter().all(|&q| q == Z4::ZERO)
    }

    /// True when `2·v = 0`, i.e. every quaternary coordinate is even.
    pub fn has_order_two(&self) -> bool {
        self.quaternary.iter().all(|q| !q.is_odd())
    }

    /// Coordinate `i` of the flattened vector, binary coordinates first.
    /// Binary coordinates are returned as their {0, 1} value.
    pub fn coordinate(&self, i: usize) -> Z4 {
        if i < self.binary.len() {
            Z4(self.binary[i] as u8)
        } else {
            self.quaternary[i - self.binary.len()]
        }
    }

    fn check_shape(&self, other: &MixedVector) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }

    /// Group addition: XOR on the binary part, mod-4 sum on the quaternary part.
    pub fn try_add(&self, other: &MixedVector) -> Result<MixedVector> {
        self.check_shape(other)?;
        Ok(MixedVector {
            binary: self
                .binary
                .iter()
                .zip(&other.binary)
                .map(|(a, b)| a ^ b)
                .collect(),
            quaternary: self
                .quaternary
                .iter()
                .zip(&other.quaternary)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    /// Scalar action of Z4. Binary coordinates stand for {0, 2}, so odd
    /// scalars fix them and even scalars clear them.
    pub fn scale(&self, eps: Z4) -> MixedVector {
        let odd = eps.is_odd();
        MixedVector {
            binary: self.binary.iter().map(|&b| b && odd).collect(),
            quaternary: self.quaternary.iter().map(|&q| q * eps).collect(),
        }
    }

    pub fn negate(&self) -> MixedVector {
        self.scale(Z4::THREE)
    }

    /// `2·Σ u_i v_i + Σ u_j v_j (mod 4)` with binary bits read as quaternary 0/1.
    pub fn inner_product(&self, other: &MixedVector) -> Result<Z4> {
        self.check_shape(other)?;
        let binary = self
            .binary
            .iter()
            .zip(&other.binary)
            .filter(|(&a, &b)| a && b)
            .count() as u32;
        let quaternary = self
            .quaternary
            .iter()
            .zip(&other.quaternary)
            .fold(Z4::ZERO, |acc, (&a, &b)| acc + a * b);
        Ok(Z4::new(2 * binary) + quaternary)
    }

    /// Base-4 integer with the first coordinate most significant; binary
    /// coordinates contribute the digit 0 or 2.
    pub fn base4_key(&self) -> u64 {
        let digits = self
            .binary
            .iter()
            .map(|&b| if b { 2 } else { 0 })
            .chain(self.quaternary.iter().map(|q| q.0 as u64));
        digits.fold(0u64, |acc, d| acc * 4 + d)
    }

    /// Renders with binary coordinates printed as 0/2, as in a parity-check matrix.
    pub fn to_matrix_notation(&self) -> String {
        let mut s = String::with_capacity(self.len() + 1);
        for &b in &self.binary {
            s.push(if b { '2' } else { '0' });
        }
        s.push('|');
        for q in &self.quaternary {
            s.push(char::from(b'0' + q.0));
        }
        s
    }
}

impl fmt::Display for MixedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.binary {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str("|")?;
        for q in &self.quaternary {
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

impl FromStr for MixedVector {
    type Err = Error;

    /// Parses `"b…b|q…q"`, e.g. `"010|202310"`.
    fn from_str(s: &str) -> Result<Self> {
        let (bin, quat) = s
            .split_once('|')
            .ok_or_else(|| Error::InvalidParameters(format!("missing '|' in {s:?}")))?;
        let binary = bin
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameters(format!("bad binary digit {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let quaternary = quat
            .chars()
            .map(|c| match c.to_digit(4) {
                Some(d) => Ok(Z4::new(d)),
                None => Err(Error::InvalidParameters(format!(
                    "bad quaternary digit {c:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MixedVector { binary, quaternary })
    }
}

pub fn mixed_add(u: &MixedVector, v: &MixedVector) -> Result<MixedVector> {
    u.try_add(v)
}

pub fn scalar_mul(eps: Z4, v: &MixedVector) -> MixedVector {
    v.scale(eps)
}

/// `Σ_i w_i · h_i` over Z4, the syndrome of `w` under the columns `h_i`.
///
/// `w` needs one coordinate per column (binary coordinates first); all
/// columns must share one shape.
pub fn syndrome(columns: &[MixedVector], w: &MixedVector) -> Result<MixedVector> {
    if w.len() != columns.len() {
        return Err(Error::LengthMismatch {
            expected: columns.len(),
            found: w.len(),
        });
    }
    let Some(first) = columns.first() else {
        return Ok(MixedVector::default());
    };
    let (g, d) = first.shape();
    let mut acc = MixedVector::zero(g, d);
    for (i, h) in columns.iter().enumerate() {
        let c = w.coordinate(i);
        if c != Z4::ZERO {
            acc = acc.try_add(&h.scale(c))?;
        }
    }
    Ok(acc)
}

/// Packs vectors of a fixed shape (γ, δ) into the low γ + 2δ bits of a word.
///
/// Binary coordinate `j` sits at bit `j`; quaternary coordinate `j` occupies
/// bits `γ + 2j` (low) and `γ + 2j + 1` (high). Addition is done lane-wise in
/// one machine operation, which is what the embedding hot path relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackedLayout {
    gamma: u32,
    delta: u32,
    /// Binary lanes plus the high bit of every quaternary lane.
    high: u32,
    /// Low bit of every quaternary lane.
    low: u32,
}

impl PackedLayout {
    pub fn new(gamma: u32, delta: u32) -> Self {
        assert!(
            gamma + 2 * delta <= 31,
            "packed syndromes hold at most 31 bits"
        );
        let binary_mask = (1u32 << gamma) - 1;
        let mut low = 0u32;
        for j in 0..delta {
            low |= 1 << (gamma + 2 * j);
        }
        PackedLayout {
            gamma,
            delta,
            high: binary_mask | (low << 1),
            low,
        }
    }

    pub fn bits(&self) -> u32 {
        self.gamma + 2 * self.delta
    }

    /// Number of distinct words, `2^(γ+2δ)`.
    pub fn size(&self) -> usize {
        1usize << self.bits()
    }

    pub fn pack(&self, v: &MixedVector) -> u32 {
        debug_assert_eq!(v.shape(), (self.gamma as usize, self.delta as usize));
        let mut word = 0u32;
        for (j, &b) in v.binary.iter().enumerate() {
            word |= (b as u32) << j;
        }
        for (j, q) in v.quaternary.iter().enumerate() {
            word |= (q.0 as u32) << (self.gamma as usize + 2 * j);
        }
        word
    }

    pub fn unpack(&self, word: u32) -> MixedVector {
        let binary = (0..self.gamma).map(|j| (word >> j) & 1 == 1).collect();
        let quaternary = (0..self.delta)
            .map(|j| Z4::new(word >> (self.gamma + 2 * j)))
            .collect();
        MixedVector { binary, quaternary }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a & !self.high) + (b & !self.high)) ^ ((a ^ b) & self.high)
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        a ^ ((a & self.low) << 1)
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn scale(&self, eps: Z4, a: u32) -> u32 {
        match eps.0 {
            0 => 0,
            1 => a,
            // 2·x: binary lanes vanish, quaternary lanes shift their low bit up.
            2 => (a & self.low) << 1,
            _ => self.neg(a),
        }
    }
}
