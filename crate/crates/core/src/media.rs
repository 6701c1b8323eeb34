//! Binary PGM (`P5`) and raw sample streams. 16-bit samples are big-endian.

use crate::codec::Depth;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MediaKind {
    Pgm {
        width: usize,
        height: usize,
        maxval: u32,
        comments: Vec<String>,
    },
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaDocument {
    pub kind: MediaKind,
    pub depth: Depth,
    pub symbols: Vec<u32>,
    /// Header bytes exactly as read; reused on write so headers survive a
    /// parse/write cycle byte for byte.
    header: Option<Vec<u8>>,
    /// Anything after the payload (e.g. further images), kept verbatim.
    trailer: Vec<u8>,
}

impl MediaDocument {
    pub fn pgm(width: usize, height: usize, depth: Depth, symbols: Vec<u32>) -> Result<Self> {
        let maxval = match depth.bits() {
            8 => 255,
            16 => 65535,
            b => return Err(Error::UnsupportedDepth(b)),
        };
        if symbols.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                found: symbols.len(),
            });
        }
        check_symbols(&symbols, depth)?;
        Ok(MediaDocument {
            kind: MediaKind::Pgm {
                width,
                height,
                maxval,
                comments: Vec::new(),
            },
            depth,
            symbols,
            header: None,
            trailer: Vec::new(),
        })
    }

    pub fn raw(depth: Depth, symbols: Vec<u32>) -> Result<Self> {
        if !matches!(depth.bits(), 8 | 16) {
            return Err(Error::UnsupportedDepth(depth.bits()));
        }
        check_symbols(&symbols, depth)?;
        Ok(MediaDocument {
            kind: MediaKind::Raw,
            depth,
            symbols,
            header: None,
            trailer: Vec::new(),
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        match self.kind {
            MediaKind::Pgm { .. } => write_pgm(self),
            MediaKind::Raw => write_raw(self),
        }
    }
}

fn check_symbols(symbols: &[u32], depth: Depth) -> Result<()> {
    match symbols.iter().find(|&&x| x > depth.max_value()) {
        Some(&value) => Err(Error::SymbolOutOfRange {
            value,
            depth: depth.bits(),
        }),
        None => Ok(()),
    }
}

fn decode_samples(payload: &[u8], depth: Depth) -> Vec<u32> {
    match depth.bits() {
        8 => payload.iter().map(|&b| b as u32).collect(),
        _ => payload
            .chunks_exact(2)
            .map(|p| u16::from_be_bytes([p[0], p[1]]) as u32)
            .collect(),
    }
}

fn encode_samples(symbols: &[u32], depth: Depth, out: &mut Vec<u8>) {
    match depth.bits() {
        8 => out.extend(symbols.iter().map(|&x| x as u8)),
        _ => out.extend(symbols.iter().flat_map(|&x| (x as u16).to_be_bytes())),
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    comments: Vec<String>,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                let end = self.bytes[self.pos..]
                    .iter()
                    .position(|&c| c == b'\n' || c == b'\r')
                    .map_or(self.bytes.len(), |e| self.pos + e);
                let text = String::from_utf8_lossy(&self.bytes[self.pos + 1..end]);
                self.comments.push(text.trim().to_string());
                self.pos = end;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::BadHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::BadHeader(format!("{what} too large")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<MediaDocument> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::BadMagic);
    }
    let mut cur = HeaderCursor {
        bytes,
        pos: 2,
        comments: Vec::new(),
    };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::BadMagic);
    }
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    let depth = match maxval {
        255 => Depth::EIGHT,
        65535 => Depth::SIXTEEN,
        other => return Err(Error::UnsupportedMaxval(other)),
    };
    // exactly one whitespace byte separates the header from the samples
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::BadHeader("no whitespace after maxval".into())),
    }
    let header_len = cur.pos;
    let sample_bytes = (depth.bits() / 8) as usize;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(sample_bytes))
        .ok_or_else(|| Error::BadHeader("image dimensions overflow".into()))?;
    let payload = &bytes[header_len..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    Ok(MediaDocument {
        kind: MediaKind::Pgm {
            width,
            height,
            maxval,
            comments: cur.comments,
        },
        depth,
        symbols: decode_samples(&payload[..expected], depth),
        header: Some(bytes[..header_len].to_vec()),
        trailer: payload[expected..].to_vec(),
    })
}

pub fn write_pgm(doc: &MediaDocument) -> Result<Vec<u8>> {
    let MediaKind::Pgm {
        width,
        height,
        maxval,
        ref comments,
    } = doc.kind
    else {
        return Err(Error::BadHeader("document is not a PGM image".into()));
    };
    if doc.symbols.len() != width * height {
        return Err(Error::LengthMismatch {
            expected: width * height,
            found: doc.symbols.len(),
        });
    }
    check_symbols(&doc.symbols, doc.depth)?;
    let mut out = Vec::with_capacity(doc.symbols.len() * 2 + 32);
    match &doc.header {
        Some(h) => out.extend_from_slice(h),
        None => {
            out.extend_from_slice(b"P5\n");
            for c in comments {
                out.extend_from_slice(format!("# {c}\n").as_bytes());
            }
            out.extend_from_slice(format!("{width} {height}\n{maxval}\n").as_bytes());
        }
    }
    encode_samples(&doc.symbols, doc.depth, &mut out);
    out.extend_from_slice(&doc.trailer);
    Ok(out)
}

pub fn parse_raw(bytes: &[u8], depth: Depth) -> Result<MediaDocument> {
    let width = match depth.bits() {
        8 => 1,
        16 => 2,
        b => return Err(Error::UnsupportedDepth(b)),
    };
    if !bytes.len().is_multiple_of(width) {
        return Err(Error::RawLength {
            len: bytes.len(),
            depth: depth.bits(),
        });
    }
    MediaDocument::raw(depth, decode_samples(bytes, depth))
}

pub fn write_raw(doc: &MediaDocument) -> Result<Vec<u8>> {
    check_symbols(&doc.symbols, doc.depth)?;
    let mut out = Vec::with_capacity(doc.symbols.len() * 2);
    encode_samples(&doc.symbols, doc.depth, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_minimal_pgm() {
        let doc = parse_pgm(b"P5 2 1 255 \xef\xfb").unwrap();
        assert_eq!(
            doc.kind,
            MediaKind::Pgm {
                width: 2,
                height: 1,
                maxval: 255,
                comments: vec![]
            }
        );
        assert_eq!(doc.symbols, vec![239, 251]);
    }

    #[test]
    fn parses_sixteen_bit_big_endian() {
        let doc = parse_pgm(b"P5\n1 1\n65535\n\x00\xff").unwrap();
        assert_eq!(doc.depth, Depth::SIXTEEN);
        assert_eq!(doc.symbols, vec![255]);
        let doc = parse_pgm(b"P5\n1 1\n65535\n\x12\x34").unwrap();
        assert_eq!(doc.symbols, vec![0x1234]);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_pgm(b"P2 1 1 255 0"), Err(Error::BadMagic)));
        assert!(matches!(parse_pgm(b"P51 1 255 0"), Err(Error::BadMagic)));
        assert!(matches!(
            parse_pgm(b"P5 1 1 300 \x00"),
            Err(Error::UnsupportedMaxval(300))
        ));
        assert!(matches!(
            parse_pgm(b"P5 2 2 255 \x00\x01"),
            Err(Error::TruncatedPayload {
                expected: 4,
                found: 2
            })
        ));
        assert!(matches!(parse_pgm(b"P5 2"), Err(Error::BadHeader(_))));
        assert!(matches!(parse_pgm(b"P5 2 1 255"), Err(Error::BadHeader(_))));
    }

    #[test]
    fn comments_are_kept() {
        let bytes = b"P5\n# made by hand\n3 1\n# another\n255\n\x01\x02\x03";
        let doc = parse_pgm(bytes).unwrap();
        let MediaKind::Pgm { comments, .. } = &doc.kind else {
            unreachable!()
        };
        assert_eq!(comments, &["made by hand", "another"]);
        assert_eq!(write_pgm(&doc).unwrap(), bytes);
    }

    #[test]
    fn payload_edits_leave_header_alone() {
        let bytes = b"P5\n#c\n2 2\n255\n\x00\x01\x02\x03TRAILER".to_vec();
        let mut doc = parse_pgm(&bytes).unwrap();
        doc.symbols[3] = 4;
        let out = write_pgm(&doc).unwrap();
        assert_eq!(out.len(), bytes.len());
        let diff: Vec<usize> = (0..out.len()).filter(|&i| out[i] != bytes[i]).collect();
        assert_eq!(diff, vec![bytes.len() - 8]);
    }

    #[test]
    fn fresh_document_gets_canonical_header() {
        let doc = MediaDocument::pgm(2, 1, Depth::EIGHT, vec![1, 2]).unwrap();
        assert_eq!(write_pgm(&doc).unwrap(), b"P5\n2 1\n255\n\x01\x02");
        assert!(MediaDocument::pgm(2, 2, Depth::EIGHT, vec![1, 2]).is_err());
        assert!(MediaDocument::pgm(1, 1, Depth::EIGHT, vec![256]).is_err());
        assert!(MediaDocument::pgm(1, 1, Depth::new(12).unwrap(), vec![1]).is_err());
    }

    #[test]
    fn raw_streams() {
        assert!(parse_raw(b"", Depth::EIGHT).unwrap().symbols.is_empty());
        assert!(matches!(
            parse_raw(b"\x00\x01\x02", Depth::SIXTEEN),
            Err(Error::RawLength { len: 3, depth: 16 })
        ));
        assert_eq!(
            parse_raw(b"\x01\x00", Depth::SIXTEEN).unwrap().symbols,
            vec![256]
        );
        assert!(parse_raw(b"\x01", Depth::new(12).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn pgm_roundtrip(w in 1usize..20, h in 1usize..20, wide in any::<bool>(), seed in any::<u64>()) {
            let depth = if wide { Depth::SIXTEEN } else { Depth::EIGHT };
            let symbols: Vec<u32> = (0..w * h)
                .map(|i| ((seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407))) >> 33) as u32 & depth.max_value())
                .collect();
            let doc = MediaDocument::pgm(w, h, depth, symbols).unwrap();
            let bytes = write_pgm(&doc).unwrap();
            let back = parse_pgm(&bytes).unwrap();
            prop_assert_eq!(&back.kind, &doc.kind);
            prop_assert_eq!(&back.symbols, &doc.symbols);
            prop_assert_eq!(write_pgm(&back).unwrap(), bytes);
        }

        #[test]
        fn raw_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 0..64), wide in any::<bool>()) {
            let depth = if wide { Depth::SIXTEEN } else { Depth::EIGHT };
            let bytes = if wide && bytes.len() % 2 == 1 { &bytes[1..] } else { &bytes[..] };
            let doc = parse_raw(bytes, depth).unwrap();
            prop_assert_eq!(write_raw(&doc).unwrap(), bytes);
            prop_assert_eq!(parse_raw(&write_raw(&doc).unwrap(), depth).unwrap(), doc);
        }
    }
}
