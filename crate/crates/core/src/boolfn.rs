//! Total Boolean functions on `n + n` bits and their sign matrices.
//!
//! The truth table is row-major: index `x * 2^n + y` holds `f(x, y)`, so row
//! `x` of the sign matrix is the signal state Alice's input `x` produces.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::rng;
use crate::{Error, Result};

/// Largest supported number of input bits per party.
pub const MAX_N: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Inner product mod 2.
    Ip,
    Eq,
    Ne,
    /// 1 exactly when `x AND y == 0`.
    Disj,
    Const0,
    Const1,
    /// Independent fair bits from a seed.
    Random,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Ip,
        Family::Eq,
        Family::Ne,
        Family::Disj,
        Family::Const0,
        Family::Const1,
        Family::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ip => "ip",
            Family::Eq => "eq",
            Family::Ne => "ne",
            Family::Disj => "disj",
            Family::Const0 => "const0",
            Family::Const1 => "const1",
            Family::Random => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown function family `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<u8>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        Err(Error::SizeOutOfRange(n))
    } else {
        Ok(())
    }
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<u8>) -> Result<Self> {
        check_n(n)?;
        let expected = 1usize << (2 * n);
        if table.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: table.len(),
            });
        }
        if let Some(pos) = table.iter().position(|&v| v > 1) {
            return Err(Error::InvalidParameter(format!(
                "truth table entry {pos} is {}, expected 0 or 1",
                table[pos]
            )));
        }
        Ok(BooleanFunction { n, table })
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let dim = 1usize << n;
        let table = (0..dim * dim)
            .map(|i| u8::from(f(i / dim, i % dim)))
            .collect();
        BooleanFunction { n, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `2^n`, the number of inputs per party.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn value(&self, x: usize, y: usize) -> u8 {
        self.table[x * self.dim() + y]
    }
}

pub fn make_family(family: Family, n: usize, seed: Option<u64>) -> Result<BooleanFunction> {
    check_n(n)?;
    Ok(match family {
        Family::Ip => BooleanFunction::from_fn(n, |x, y| (x & y).count_ones() % 2 == 1),
        Family::Eq => BooleanFunction::from_fn(n, |x, y| x == y),
        Family::Ne => BooleanFunction::from_fn(n, |x, y| x != y),
        Family::Disj => BooleanFunction::from_fn(n, |x, y| x & y == 0),
        Family::Const0 => BooleanFunction::from_fn(n, |_, _| false),
        Family::Const1 => BooleanFunction::from_fn(n, |_, _| true),
        Family::Random => {
            let seed = seed.ok_or(Error::MissingSeed)?;
            BooleanFunction {
                n,
                table: rng::random_bits(seed, 1 << (2 * n)),
            }
        }
    })
}

/// The `2^n x 2^n` matrix with entries `(-1)^f(x,y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    /// Row-major `entries`, each exactly `+1` or `-1`.
    pub fn from_entries(n: usize, entries: Vec<i8>) -> Result<Self> {
        check_n(n)?;
        let expected = 1usize << (2 * n);
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter(format!(
                "sign matrix entry {pos} is {}, expected +1 or -1",
                entries[pos]
            )));
        }
        Ok(SignMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, x: usize, y: usize) -> i8 {
        self.entries[x * self.dim() + y]
    }

    pub fn row(&self, x: usize) -> &[i8] {
        let dim = self.dim();
        &self.entries[x * dim..(x + 1) * dim]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Rows as bitsets (bit set where the entry is `-1`), `words_per_row` u64s each.
    pub fn packed_rows(&self) -> (usize, Vec<u64>) {
        let dim = self.dim();
        let words = dim.div_ceil(64);
        let mut packed = vec![0u64; dim * words];
        for x in 0..dim {
            for (y, &v) in self.row(x).iter().enumerate() {
                if v < 0 {
                    packed[x * words + y / 64] |= 1 << (y % 64);
                }
            }
        }
        (words, packed)
    }
}

pub fn sign_matrix(f: &BooleanFunction) -> SignMatrix {
    SignMatrix {
        n: f.n,
        entries: f.table.iter().map(|&v| 1 - 2 * v as i8).collect(),
    }
}

const CCF_MAGIC: &str = "CCF1";

pub fn serialize_ccf(f: &BooleanFunction) -> String {
    let mut out = String::with_capacity(f.table.len() + 16);
    out.push_str(CCF_MAGIC);
    out.push('\n');
    out.push_str(&f.n.to_string());
    out.push('\n');
    out.extend(f.table.iter().map(|&v| if v == 1 { '1' } else { '0' }));
    out.push('\n');
    out
}

/// Parses the CCF1 format: magic line, decimal `n`, then `2^(2n)` row-major
/// `0`/`1` characters, each line LF-terminated and nothing else.
pub fn parse_ccf(bytes: &[u8]) -> Result<BooleanFunction> {
    let err = |line: usize, offset: usize, message: String| Error::Parse {
        line,
        offset,
        message,
    };

    let mut lines = Vec::with_capacity(3);
    let mut start = 0;
    for (i, &c) in bytes.iter().enumerate() {
        if c == b'\n' {
            lines.push((start, &bytes[start..i]));
            start = i + 1;
        }
    }
    if start != bytes.len() {
        return Err(err(
            lines.len() + 1,
            start,
            "missing trailing newline".to_string(),
        ));
    }
    if lines.len() != 3 {
        return Err(err(
            lines.len().min(3) + 1,
            start,
            format!("expected 3 lines, found {}", lines.len()),
        ));
    }

    let (magic_at, magic) = lines[0];
    if magic != CCF_MAGIC.as_bytes() {
        return Err(err(
            1,
            magic_at,
            "bad magic line, expected `CCF1`".to_string(),
        ));
    }

    let (n_at, n_line) = lines[1];
    if n_line.is_empty() || !n_line.iter().all(u8::is_ascii_digit) || n_line.len() > 3 {
        return Err(err(2, n_at, "expected a decimal n".to_string()));
    }
    let n: usize = std::str::from_utf8(n_line)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(2, n_at, "expected a decimal n".to_string()))?;
    if n == 0 || n > MAX_N {
        return Err(err(2, n_at, format!("n = {n} out of range 1..={MAX_N}")));
    }

    let (payload_at, payload) = lines[2];
    let expected = 1usize << (2 * n);
    if let Some(pos) = payload.iter().position(|&c| c != b'0' && c != b'1') {
        return Err(err(
            3,
            payload_at + pos,
            format!(
                "unexpected byte 0x{:02x}, expected `0` or `1`",
                payload[pos]
            ),
        ));
    }
    if payload.len() != expected {
        return Err(err(
            3,
            payload_at,
            format!(
                "payload has {} characters, expected {expected}",
                payload.len()
            ),
        ));
    }
    Ok(BooleanFunction {
        n,
        table: payload.iter().map(|&c| c - b'0').collect(),
    })
}
