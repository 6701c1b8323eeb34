//! Embedding and extraction of syndromes in blocks of grayscale symbols.
//!
//! A block of `N = 2^(m-1)` symbols is read as a vector `w` with one
//! coordinate per parity-check column: the Gray low bit of the first symbol,
//! both Gray bits of each paired symbol, and the least quaternary digit of
//! every remaining symbol. The hidden unit is the syndrome of `w`. Embedding
//! changes at most two symbols, each by exactly one unit.

use arrayvec::ArrayVec;

use crate::algebra::{gray_inverse, gray_map, BitPair, MixedVector, Z4};
use crate::code::{CodeSpec, Sign, SymbolRole};
use crate::error::{Error, Result};

/// Sample depth `B`: symbols live in `0..=2^B - 1`.
///
/// Only even depths are accepted. For even `B` the top value is `3 mod 4`,
/// which makes the low Gray bit of any symbol flippable without leaving the
/// range (see [`direction_to_flip`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Depth(u32);

impl Depth {
    pub const EIGHT: Depth = Depth(8);
    pub const SIXTEEN: Depth = Depth(16);

    pub fn new(bits: u32) -> Result<Depth> {
        if !(2..=30).contains(&bits) || !bits.is_multiple_of(2) {
            return Err(Error::UnsupportedDepth(bits));
        }
        Ok(Depth(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn max_value(self) -> u32 {
        (1u32 << self.0) - 1
    }

    #[inline]
    fn can_move(self, x: u32, dir: Sign) -> bool {
        match dir {
            Sign::Plus => x < self.max_value(),
            Sign::Minus => x > 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrayBit {
    Lo,
    Hi,
}

impl GrayBit {
    fn other(self) -> GrayBit {
        match self {
            GrayBit::Lo => GrayBit::Hi,
            GrayBit::Hi => GrayBit::Lo,
        }
    }
}

#[inline]
pub fn least_digit(x: u32) -> Z4 {
    Z4::new(x)
}

#[inline]
fn gray_bit(x: u32, bit: GrayBit) -> bool {
    let p = gray_map(least_digit(x));
    match bit {
        GrayBit::Lo => p.lo,
        GrayBit::Hi => p.hi,
    }
}

/// The unit step that flips the requested Gray bit of `x`'s least digit,
/// or `None` when that step would leave `0..=2^B - 1`.
pub fn direction_to_flip(x: u32, bit: GrayBit, depth: Depth) -> Option<Sign> {
    let d = least_digit(x);
    let mut p = gray_map(d);
    match bit {
        GrayBit::Lo => p.lo = !p.lo,
        GrayBit::Hi => p.hi = !p.hi,
    }
    let dir = if gray_inverse(p) == d + Z4::ONE {
        Sign::Plus
    } else {
        Sign::Minus
    };
    depth.can_move(x, dir).then_some(dir)
}

/// One `±1` modification of a cover symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Change {
    pub symbol: usize,
    pub direction: Sign,
}

/// How a plan was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanKind {
    /// The block already carries the secret.
    Unchanged,
    /// One change on the symbol tied to the decoded column.
    Direct,
    /// The direct change was blocked; replaced by the opposite change on the
    /// complementary column plus a flip of the first symbol's low bit.
    Fallback,
    /// The complementary change was blocked as well; found by searching all
    /// two-column decompositions of the gap.
    Searched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangePlan {
    changes: ArrayVec<Change, 2>,
    kind: PlanKind,
}

impl ChangePlan {
    fn new(kind: PlanKind, changes: &[Change]) -> Self {
        ChangePlan {
            changes: changes.iter().copied().collect(),
            kind,
        }
    }

    pub fn changes(&self) -> &[Change] {
        &self.changes
    }

    pub fn kind(&self) -> PlanKind {
        self.kind
    }

    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    /// Squared error of the plan; every change has magnitude one.
    pub fn squared_error(&self) -> u32 {
        self.changes.len() as u32
    }

    pub fn apply(&self, block: &mut [u32]) {
        for c in &self.changes {
            match c.direction {
                Sign::Plus => block[c.symbol] += 1,
                Sign::Minus => block[c.symbol] -= 1,
            }
        }
    }
}

/// What to do when both the direct and the complementary change are blocked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SaturationPolicy {
    /// Search every pair of columns for a feasible two-change plan; the
    /// lowest `(a, b)` column pair wins.
    #[default]
    Search,
    /// Report [`Error::DoubleSaturationUnresolvable`] instead.
    Strict,
}

/// Bits of the stream length header.
pub const HEADER_BITS: usize = 32;

/// A code bound to a sample depth and saturation policy.
#[derive(Debug, Clone)]
pub struct StegoCodec {
    spec: CodeSpec,
    depth: Depth,
    policy: SaturationPolicy,
    twos: u32,
}

impl StegoCodec {
    pub fn new(spec: CodeSpec, depth: Depth) -> Self {
        let twos = spec.layout().pack(spec.all_twos());
        StegoCodec {
            spec,
            depth,
            policy: SaturationPolicy::default(),
            twos,
        }
    }

    pub fn with_policy(mut self, policy: SaturationPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    pub fn policy(&self) -> SaturationPolicy {
        self.policy
    }

    pub fn block_len(&self) -> usize {
        self.spec.params().n
    }

    pub fn bits_per_block(&self) -> usize {
        self.spec.params().m as usize
    }

    fn check_block(&self, block: &[u32]) -> Result<()> {
        if block.len() != self.block_len() {
            return Err(Error::LengthMismatch {
                expected: self.block_len(),
                found: block.len(),
            });
        }
        Ok(())
    }

    fn check_range(&self, block: &[u32]) -> Result<()> {
        let max = self.depth.max_value();
        match block.iter().find(|&&x| x > max) {
            Some(&value) => Err(Error::SymbolOutOfRange {
                value,
                depth: self.depth.bits(),
            }),
            None => Ok(()),
        }
    }

    #[inline]
    fn coefficient(&self, block: &[u32], column: usize) -> Z4 {
        let a = self.spec.symbol_assoc()[column];
        let x = block[a.symbol];
        match a.role {
            SymbolRole::X1Bit | SymbolRole::PairLo => Z4::new(gray_bit(x, GrayBit::Lo) as u32),
            SymbolRole::PairHi => Z4::new(gray_bit(x, GrayBit::Hi) as u32),
            SymbolRole::Quaternary => least_digit(x),
        }
    }

    /// The vector `w` read from a block.
    pub fn symbols_to_vector(&self, block: &[u32]) -> Result<MixedVector> {
        self.check_block(block)?;
        let p = self.spec.params();
        let coords: Vec<Z4> = (0..self.spec.columns().len())
            .map(|i| self.coefficient(block, i))
            .collect();
        Ok(MixedVector::new(
            coords[..p.alpha].iter().map(|c| c.value() == 1).collect(),
            coords[p.alpha..].to_vec(),
        ))
    }

    /// Packed syndrome of a block of the right length.
    #[inline]
    pub fn syndrome_word(&self, block: &[u32]) -> u32 {
        let layout = self.spec.layout();
        (0..self.spec.columns().len()).fold(0, |acc, i| {
            layout.add(
                acc,
                self.spec.packed_multiple(i, self.coefficient(block, i)),
            )
        })
    }

    pub fn extract_block(&self, block: &[u32]) -> Result<MixedVector> {
        self.check_block(block)?;
        Ok(self.spec.layout().unpack(self.syndrome_word(block)))
    }

    pub fn plan_changes(&self, block: &[u32], secret: &MixedVector) -> Result<ChangePlan> {
        self.check_block(block)?;
        self.check_range(block)?;
        self.spec.check_syndrome_shape(secret)?;
        self.plan_word(block, self.spec.layout().pack(secret))
    }

    pub fn embed_block(&self, block: &[u32], secret: &MixedVector) -> Result<Vec<u32>> {
        let plan = self.plan_changes(block, secret)?;
        let mut out = block.to_vec();
        plan.apply(&mut out);
        Ok(out)
    }

    #[inline]
    fn x1_flip(&self, block: &[u32]) -> Change {
        let direction = direction_to_flip(block[0], GrayBit::Lo, self.depth)
            .expect("low Gray bit is flippable inward at both extremes for even B");
        Change {
            symbol: 0,
            direction,
        }
    }

    /// Plans the changes that bring the block's syndrome to the packed `target`.
    /// The block must have the right length and in-range symbols.
    pub fn plan_word(&self, block: &[u32], target: u32) -> Result<ChangePlan> {
        let layout = self.spec.layout();
        let gap = layout.sub(target, self.syndrome_word(block));
        let Some((column, sign)) = self.spec.decode_packed(gap) else {
            return Ok(ChangePlan::new(PlanKind::Unchanged, &[]));
        };
        let assoc = self.spec.symbol_assoc()[column];
        let s = assoc.symbol;
        let x = block[s];
        match assoc.role {
            SymbolRole::X1Bit => Ok(ChangePlan::new(PlanKind::Direct, &[self.x1_flip(block)])),
            SymbolRole::PairHi | SymbolRole::PairLo => {
                let bit = if assoc.role == SymbolRole::PairHi {
                    GrayBit::Hi
                } else {
                    GrayBit::Lo
                };
                if let Some(direction) = direction_to_flip(x, bit, self.depth) {
                    return Ok(ChangePlan::new(
                        PlanKind::Direct,
                        &[Change {
                            symbol: s,
                            direction,
                        }],
                    ));
                }
                // The mate column is h + 2; flipping it together with x1 adds h.
                let direction = direction_to_flip(x, bit.other(), self.depth)
                    .expect("the other Gray bit moves in the opposite, inward direction");
                Ok(ChangePlan::new(
                    PlanKind::Fallback,
                    &[
                        Change {
                            symbol: s,
                            direction,
                        },
                        self.x1_flip(block),
                    ],
                ))
            }
            SymbolRole::Quaternary => {
                if self.depth.can_move(x, sign) {
                    return Ok(ChangePlan::new(
                        PlanKind::Direct,
                        &[Change {
                            symbol: s,
                            direction: sign,
                        }],
                    ));
                }
                let (c, sign_c) = self
                    .spec
                    .decode_packed(layout.add(gap, self.twos))
                    .expect("gap + 2 has order four");
                let sc = self.spec.symbol_assoc()[c].symbol;
                if self.depth.can_move(block[sc], sign_c) {
                    return Ok(ChangePlan::new(
                        PlanKind::Fallback,
                        &[
                            Change {
                                symbol: sc,
                                direction: sign_c,
                            },
                            self.x1_flip(block),
                        ],
                    ));
                }
                match self.policy {
                    SaturationPolicy::Strict => {
                        Err(Error::DoubleSaturationUnresolvable { block: None })
                    }
                    SaturationPolicy::Search => self.search_two_changes(block, gap),
                }
            }
        }
    }

    /// Feasible unit change realising `sign · h_column`, if any.
    fn column_change(&self, block: &[u32], column: usize, sign: Sign) -> Option<Change> {
        let a = self.spec.symbol_assoc()[column];
        let x = block[a.symbol];
        let direction = match a.role {
            SymbolRole::X1Bit | SymbolRole::PairLo => {
                direction_to_flip(x, GrayBit::Lo, self.depth)?
            }
            SymbolRole::PairHi => direction_to_flip(x, GrayBit::Hi, self.depth)?,
            SymbolRole::Quaternary => {
                if !self.depth.can_move(x, sign) {
                    return None;
                }
                sign
            }
        };
        Some(Change {
            symbol: a.symbol,
            direction,
        })
    }

    fn search_two_changes(&self, block: &[u32], gap: u32) -> Result<ChangePlan> {
        let layout = self.spec.layout();
        let alpha = self.spec.params().alpha;
        let cols = self.spec.columns().len();
        let assoc = self.spec.symbol_assoc();
        let signs = |i: usize| -> &'static [Sign] {
            if i < alpha {
                &[Sign::Plus]
            } else {
                &[Sign::Plus, Sign::Minus]
            }
        };
        for a in 0..cols {
            for b in a + 1..cols {
                if assoc[a].symbol == assoc[b].symbol {
                    continue;
                }
                for &sa in signs(a) {
                    let ha = self.spec.packed_multiple(a, sa.scalar());
                    for &sb in signs(b) {
                        let hb = self.spec.packed_multiple(b, sb.scalar());
                        if layout.add(ha, hb) != gap {
                            continue;
                        }
                        if let (Some(ca), Some(cb)) = (
                            self.column_change(block, a, sa),
                            self.column_change(block, b, sb),
                        ) {
                            return Ok(ChangePlan::new(PlanKind::Searched, &[ca, cb]));
                        }
                    }
                }
            }
        }
        Err(Error::DoubleSaturationUnresolvable { block: None })
    }

    /// Splits a bitstream into secret units: `gamma` binary coordinates,
    /// then one quaternary coordinate per Gray bit pair. The last unit is
    /// zero-padded.
    pub fn pack_message(&self, bits: &[bool]) -> Vec<MixedVector> {
        let layout = self.spec.layout();
        self.pack_words(bits.iter().copied())
            .into_iter()
            .map(|w| layout.unpack(w))
            .collect()
    }

    fn pack_words(&self, bits: impl Iterator<Item = bool>) -> Vec<u32> {
        let p = self.spec.params();
        let m = p.m as usize;
        let gamma = p.gamma as usize;
        let bits: Vec<bool> = bits.collect();
        bits.chunks(m)
            .map(|chunk| {
                let mut padded = [false; 32];
                padded[..chunk.len()].copy_from_slice(chunk);
                let mut word = 0u32;
                for (j, &b) in padded[..gamma].iter().enumerate() {
                    word |= (b as u32) << j;
                }
                for j in 0..p.delta as usize {
                    let q = gray_inverse(BitPair::new(
                        padded[gamma + 2 * j],
                        padded[gamma + 2 * j + 1],
                    ));
                    word |= (q.value() as u32) << (gamma + 2 * j);
                }
                word
            })
            .collect()
    }

    fn unpack_word(&self, word: u32, out: &mut Vec<bool>) {
        let p = self.spec.params();
        let gamma = p.gamma;
        for j in 0..gamma {
            out.push((word >> j) & 1 == 1);
        }
        for j in 0..p.delta {
            let bp = gray_map(Z4::new(word >> (gamma + 2 * j)));
            out.push(bp.hi);
            out.push(bp.lo);
        }
    }

    /// Blocks consumed by a framed message of `message_len` bytes.
    pub fn stream_blocks(&self, message_len: usize) -> usize {
        (HEADER_BITS + 8 * message_len).div_ceil(self.bits_per_block())
    }

    /// Message bytes a cover of `symbols` symbols can carry.
    pub fn capacity_bytes(&self, symbols: usize) -> usize {
        let bits = self.bits_per_block() * (symbols / self.block_len());
        bits.saturating_sub(HEADER_BITS) / 8
    }

    pub fn embed_stream(&self, symbols: &[u32], message: &[u8]) -> Result<Vec<u32>> {
        let mut out = symbols.to_vec();
        self.embed_stream_in_place(&mut out, message)?;
        Ok(out)
    }

    /// Embeds a length-framed message block by block; returns the plans in
    /// block order. Symbols past the last used block are untouched.
    pub fn embed_stream_in_place(
        &self,
        symbols: &mut [u32],
        message: &[u8],
    ) -> Result<Vec<ChangePlan>> {
        let n = self.block_len();
        let available_bits = self.bits_per_block() * (symbols.len() / n);
        let needed_bits = HEADER_BITS + 8 * message.len();
        if needed_bits > available_bits || 8 * message.len() > u32::MAX as usize {
            return Err(Error::CapacityExceeded {
                needed_bits,
                available_bits,
            });
        }
        let header = ((8 * message.len()) as u32).to_be_bytes();
        let bits = header
            .iter()
            .chain(message)
            .flat_map(|&byte| (0..8).rev().map(move |k| (byte >> k) & 1 == 1));
        let words = self.pack_words(bits);

        let mut plans = Vec::with_capacity(words.len());
        for (index, (block, &word)) in symbols.chunks_exact_mut(n).zip(&words).enumerate() {
            self.check_range(block)?;
            let plan = self.plan_word(block, word).map_err(|e| match e {
                Error::DoubleSaturationUnresolvable { .. } => {
                    Error::DoubleSaturationUnresolvable { block: Some(index) }
                }
                other => other,
            })?;
            plan.apply(block);
            plans.push(plan);
        }
        Ok(plans)
    }

    pub fn extract_stream(&self, symbols: &[u32]) -> Result<Vec<u8>> {
        let n = self.block_len();
        let m = self.bits_per_block();
        let blocks = symbols.len() / n;
        let header_blocks = HEADER_BITS.div_ceil(m);
        if blocks < header_blocks {
            return Err(Error::StreamTooShort { blocks });
        }
        let mut bits = Vec::with_capacity(blocks * m);
        let read = |bits: &mut Vec<bool>, upto: usize| {
            let start = bits.len() / m;
            for block in symbols.chunks_exact(n).take(upto).skip(start) {
                self.unpack_word(self.syndrome_word(block), bits);
            }
        };
        read(&mut bits, header_blocks);
        let declared = bits[..HEADER_BITS]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64);
        let capacity_bits = m * blocks - HEADER_BITS;
        if declared > capacity_bits as u64 || declared % 8 != 0 {
            return Err(Error::MalformedHeader {
                declared_bits: declared,
                capacity_bits,
            });
        }
        let total = HEADER_BITS + declared as usize;
        read(&mut bits, total.div_ceil(m));
        Ok(bits[HEADER_BITS..total]
            .chunks_exact(8)
            .map(|byte| byte.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
            .collect())
    }
}
