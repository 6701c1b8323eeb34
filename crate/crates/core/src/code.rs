//! Parity-check matrices of perfect Z2Z4-additive codes and their lookup tables.
//!
//! Column layout (0-based indices):
//! - column 0 is the all-twos vector;
//! - columns `1..alpha` hold the remaining order-two vectors as complement
//!   pairs `(h, h + 2)`, pairs sorted by the base-4 key of their smaller
//!   member, smaller member first;
//! - columns `alpha..alpha+beta` hold one representative of each `{v, -v}`
//!   class of order-four vectors, the one whose first odd quaternary digit
//!   is 1, sorted by base-4 key.

use std::fmt::Write as _;

use crate::algebra::{MixedVector, PackedLayout, Z4};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeParameters {
    pub m: u32,
    pub delta: u32,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: u32,
    /// Cover symbols per block, `2^(m-1)`.
    pub n: usize,
}

impl CodeParameters {
    /// Message bits carried by one block; always equals `m`.
    pub fn bits_per_block(&self) -> u32 {
        self.gamma + 2 * self.delta
    }

    /// Binary length of the perfect code, `alpha + 2·beta = 2^m - 1`.
    pub fn binary_length(&self) -> usize {
        self.alpha + 2 * self.beta
    }

    /// Symbols `0..pair_symbols` carry the x1 bit and the order-two pairs.
    pub fn pair_symbols(&self) -> usize {
        self.alpha.div_ceil(2)
    }
}

/// Largest `m` accepted; syndromes are packed into machine words and the
/// decode table is dense.
pub const MAX_M: u32 = 20;

pub fn build_code(m: u32, delta: u32) -> Result<CodeSpec> {
    CodeSpec::build(m, delta)
}

pub fn derive_parameters(m: u32, delta: u32) -> Result<CodeParameters> {
    if m < 2 {
        return Err(Error::InvalidParameters(format!(
            "m = {m} must be at least 2"
        )));
    }
    if m > MAX_M {
        return Err(Error::InvalidParameters(format!("m = {m} exceeds {MAX_M}")));
    }
    if delta > m / 2 {
        return Err(Error::InvalidParameters(format!(
            "delta = {delta} outside 0..={}",
            m / 2
        )));
    }
    Ok(CodeParameters {
        m,
        delta,
        alpha: (1usize << (m - delta)) - 1,
        beta: (1usize << (m - 1)) - (1usize << (m - delta - 1)),
        gamma: m - 2 * delta,
        n: 1usize << (m - 1),
    })
}

/// `+h` or `-h`; also the direction `+1` / `-1` of a change to a cover symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn scalar(self) -> Z4 {
        match self {
            Sign::Plus => Z4::ONE,
            Sign::Minus => Z4::THREE,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Canonical member of `{v, -v}` and whether it is `-v`.
pub fn canonical_rep(v: &MixedVector) -> Result<(MixedVector, bool)> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    match v.quaternary().iter().find(|q| q.is_odd()) {
        Some(&q) if q == Z4::THREE => Ok((v.negate(), true)),
        _ => Ok((v.clone(), false)),
    }
}

/// Which cover bit a column reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolRole {
    /// Gray low bit of the first symbol.
    X1Bit,
    /// Gray high bit of a paired symbol.
    PairHi,
    /// Gray low bit of a paired symbol.
    PairLo,
    /// Least quaternary digit of the symbol.
    Quaternary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolAssoc {
    pub symbol: usize,
    pub role: SymbolRole,
}

/// A constructed perfect code with every table the codec needs.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    params: CodeParameters,
    layout: PackedLayout,
    columns: Vec<MixedVector>,
    /// `packed_multiples[i][e]` = packed `e · h_i`.
    packed_multiples: Vec<[u32; 4]>,
    /// Indexed by packed syndrome.
    decode: Vec<Option<(u32, Sign)>>,
    /// Indexed by column; `Some` only for order-four columns.
    complement: Vec<Option<(usize, bool)>>,
    assoc: Vec<SymbolAssoc>,
}

impl CodeSpec {
    pub fn build(m: u32, delta: u32) -> Result<CodeSpec> {
        let params = derive_parameters(m, delta)?;
        let (g, d) = (params.gamma as usize, params.delta as usize);
        let layout = PackedLayout::new(params.gamma, params.delta);
        let twos = MixedVector::all_twos(g, d);

        let mut order_two = Vec::new();
        let mut order_four = Vec::new();
        for word in 1..layout.size() as u32 {
            let v = layout.unpack(word);
            if v.has_order_two() {
                if v != twos {
                    order_two.push(v);
                }
            } else if !canonical_rep(&v)?.1 {
                order_four.push(v);
            }
        }

        let mut pairs: Vec<(MixedVector, MixedVector)> = order_two
            .iter()
            .filter_map(|h| {
                let mate = h.try_add(&twos).expect("shapes agree");
                (h.base4_key() < mate.base4_key()).then(|| (h.clone(), mate))
            })
            .collect();
        pairs.sort_by_key(|(h, _)| h.base4_key());
        order_four.sort_by_key(MixedVector::base4_key);

        let mut columns = Vec::with_capacity(params.alpha + params.beta);
        columns.push(twos.clone());
        for (h, mate) in pairs {
            columns.push(h);
            columns.push(mate);
        }
        columns.extend(order_four);
        debug_assert_eq!(columns.len(), params.alpha + params.beta);

        let packed_multiples: Vec<[u32; 4]> = columns
            .iter()
            .map(|h| {
                let p = layout.pack(h);
                [0, p, layout.scale(Z4::TWO, p), layout.neg(p)]
            })
            .collect();

        let mut decode = vec![None; layout.size()];
        for (i, mult) in packed_multiples.iter().enumerate() {
            decode[mult[1] as usize] = Some((i as u32, Sign::Plus));
            if i >= params.alpha {
                decode[mult[3] as usize] = Some((i as u32, Sign::Minus));
            }
        }

        let twos_packed = layout.pack(&twos);
        let complement = (0..columns.len())
            .map(|i| {
                (i >= params.alpha).then(|| {
                    let target = layout.add(packed_multiples[i][3], twos_packed);
                    let (j, sign) = decode[target as usize].expect("table is total");
                    (j as usize, sign == Sign::Minus)
                })
            })
            .collect();

        let pair_symbols = params.pair_symbols();
        let mut assoc = Vec::with_capacity(columns.len());
        assoc.push(SymbolAssoc {
            symbol: 0,
            role: SymbolRole::X1Bit,
        });
        for k in 1..pair_symbols {
            assoc.push(SymbolAssoc {
                symbol: k,
                role: SymbolRole::PairHi,
            });
            assoc.push(SymbolAssoc {
                symbol: k,
                role: SymbolRole::PairLo,
            });
        }
        for j in 0..params.beta {
            assoc.push(SymbolAssoc {
                symbol: pair_symbols + j,
                role: SymbolRole::Quaternary,
            });
        }

        Ok(CodeSpec {
            params,
            layout,
            columns,
            packed_multiples,
            decode,
            complement,
            assoc,
        })
    }

    pub fn params(&self) -> &CodeParameters {
        &self.params
    }

    pub fn layout(&self) -> &PackedLayout {
        &self.layout
    }

    pub fn columns(&self) -> &[MixedVector] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &MixedVector {
        &self.columns[i]
    }

    pub fn all_twos(&self) -> &MixedVector {
        &self.columns[0]
    }

    pub fn symbol_assoc(&self) -> &[SymbolAssoc] {
        &self.assoc
    }

    pub fn is_quaternary_column(&self, i: usize) -> bool {
        i >= self.params.alpha && i < self.columns.len()
    }

    #[inline]
    pub(crate) fn packed_multiple(&self, i: usize, e: Z4) -> u32 {
        self.packed_multiples[i][e.value() as usize]
    }

    /// `(i, sign)` with `sign · h_i = gap` for a packed gap, or `None` for zero.
    #[inline]
    pub(crate) fn decode_packed(&self, gap: u32) -> Option<(usize, Sign)> {
        if gap == 0 {
            return None;
        }
        self.decode[gap as usize].map(|(i, s)| (i as usize, s))
    }

    /// The unique `(i, ε)` with `ε · h_i = gap`; `None` iff `gap` is zero.
    /// Order-two columns always come back with [`Sign::Plus`].
    pub fn decode_gap(&self, gap: &MixedVector) -> Result<Option<(usize, Sign)>> {
        self.check_syndrome_shape(gap)?;
        Ok(self.decode_packed(self.layout.pack(gap)))
    }

    /// Canonical form of `3·h_i + 2` for an order-four column `i`.
    pub fn complement_of(&self, i: usize) -> Result<(usize, bool)> {
        self.complement
            .get(i)
            .copied()
            .flatten()
            .ok_or(Error::NotQuaternaryColumn(i))
    }

    pub(crate) fn check_syndrome_shape(&self, v: &MixedVector) -> Result<()> {
        let expected = (self.params.gamma as usize, self.params.delta as usize);
        if v.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: v.shape(),
            });
        }
        Ok(())
    }

    /// Every syndrome is hit exactly once by `{0} ∪ {ε·h_i}`.
    pub fn check_perfect(&self) -> bool {
        let mut seen = vec![false; self.layout.size()];
        seen[0] = true;
        for (i, mult) in self.packed_multiples.iter().enumerate() {
            let images: &[u32] = if i < self.params.alpha {
                &mult[1..2]
            } else {
                &[mult[1], mult[3]]
            };
            for &w in images {
                if std::mem::replace(&mut seen[w as usize], true) {
                    return false;
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Checks `h_0` is the all-twos vector, pairs differ by it, and the
    /// trailing columns have order four.
    pub fn check_pairing(&self) -> bool {
        let p = &self.params;
        let twos = self.all_twos();
        if *twos != MixedVector::all_twos(p.gamma as usize, p.delta as usize) {
            return false;
        }
        let pairs_ok = (1..p.alpha).step_by(2).all(|k| {
            self.columns[k].has_order_two()
                && self.columns[k].try_add(twos).ok().as_ref() == Some(&self.columns[k + 1])
        });
        let quats_ok = self.columns[p.alpha..].iter().all(|h| !h.has_order_two());
        pairs_ok && quats_ok
    }

    /// Header line plus one column per line, binary coordinates printed as 0/2.
    pub fn matrix_dump(&self) -> String {
        let p = &self.params;
        let mut out = format!(
            "m={} delta={} alpha={} beta={} gamma={}\n",
            p.m, p.delta, p.alpha, p.beta, p.gamma
        );
        for h in &self.columns {
            let _ = writeln!(out, "{}", h.to_matrix_notation());
        }
        out
    }
}
