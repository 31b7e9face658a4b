//! Text formats.
//!
//! A map file is a header line `p=<p> n=<n> m=<m>` followed by `m` blocks of
//! `n` rows of `n` integers in `[0, p)`, blocks separated by blank lines.
//! Block `k`, row `i`, column `j` is the entry `A_k[i][j]` of
//! `α(u, v)_k = uᵀ A_k v`. Lines starting with `#` are comments.
//!
//! A group file puts an `[alpha]` line before one map and a `[beta]` line
//! before another. A class-2 file is `kind=class2` followed by one
//! alternating map. A witness file is a `kind=` line, the `p n m` header, and
//! matrix blocks `[a]`, `[b]` (`n × n`) and `[c]` (`m × m`).

use crate::bilinear::BilinearMap;
use crate::embed::Class2Data;
use crate::error::{Error, Result};
use crate::isotopy::{Isotopism, IsotopyKind};
use crate::linalg::{FieldParams, FpMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub p: u64,
    pub n: usize,
    pub m: usize,
}

/// Non-comment lines with their 1-based line numbers, trimmed.
fn lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'))
        .collect()
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            lines: lines(text),
            pos: 0,
            last_line: text.lines().count().max(1),
        }
    }

    fn skip_blank(&mut self) {
        while self.pos < self.lines.len() && self.lines[self.pos].1.is_empty() {
            self.pos += 1;
        }
    }

    /// Next non-blank line.
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.skip_blank();
        let l = self.lines.get(self.pos).copied().ok_or_else(|| {
            Error::parse(
                self.last_line,
                format!("unexpected end of input, expected {what}"),
            )
        })?;
        self.pos += 1;
        Ok(l)
    }

    fn peek(&mut self) -> Option<(usize, &'a str)> {
        self.skip_blank();
        self.lines.get(self.pos).copied()
    }

    /// Next line, which must be blank or absent (a block separator).
    fn separator(&mut self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some((_, "")) | None => Ok(()),
            Some(&(line, _)) => Err(Error::parse(line, "expected a blank line between blocks")),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some((line, _)) => Err(Error::parse(line, "unexpected trailing content")),
        }
    }
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>().map_err(|_| {
        Error::parse(
            line,
            format!("{key} must be a non-negative integer, got {v:?}"),
        )
    })
}

fn parse_header(line: usize, text: &str) -> Result<Header> {
    let (mut p, mut n, mut m) = (None, None, None);
    for tok in text.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, got {tok:?}")))?;
        let slot = match k {
            "p" => &mut p,
            "n" => &mut n,
            "m" => &mut m,
            _ => return Err(Error::parse(line, format!("unknown header key {k:?}"))),
        };
        if slot.replace(parse_usize(line, k, v)?).is_some() {
            return Err(Error::parse(line, format!("duplicate header key {k:?}")));
        }
    }
    let get = |x: Option<u64>, k: &str| {
        x.ok_or_else(|| Error::parse(line, format!("header is missing {k}")))
    };
    let h = Header {
        p: get(p, "p")?,
        n: get(n, "n")? as usize,
        m: get(m, "m")? as usize,
    };
    FieldParams::new(h.p).map_err(|e| Error::parse(line, e.to_string()))?;
    if h.n == 0 || h.m == 0 {
        return Err(Error::parse(line, "n and m must be positive"));
    }
    Ok(h)
}

fn parse_row(line: usize, text: &str, width: usize, p: u64) -> Result<Vec<u32>> {
    let row: Vec<u32> = text
        .split_whitespace()
        .map(|t| {
            let x = t
                .parse::<u64>()
                .map_err(|_| Error::parse(line, format!("expected an integer, got {t:?}")))?;
            if x >= p {
                return Err(Error::parse(line, format!("entry {x} is not in [0, {p})")));
            }
            Ok(x as u32)
        })
        .collect::<Result<_>>()?;
    if row.len() != width {
        return Err(Error::parse(
            line,
            format!("expected {width} entries, found {}", row.len()),
        ));
    }
    Ok(row)
}

fn parse_matrix(cur: &mut Cursor, size: usize, p: u64, what: &str) -> Result<FpMatrix> {
    let mut data = Vec::with_capacity(size * size);
    for r in 0..size {
        let (line, text) = if r == 0 {
            cur.next(what)?
        } else {
            let l = cur
                .lines
                .get(cur.pos)
                .copied()
                .filter(|(_, t)| !t.is_empty())
                .ok_or_else(|| {
                    let line = cur.lines.get(cur.pos).map_or(cur.last_line, |l| l.0);
                    Error::parse(line, format!("{what} has {r} rows, expected {size}"))
                })?;
            cur.pos += 1;
            l
        };
        data.extend(parse_row(line, text, size, p)?);
    }
    FpMatrix::from_data(size, size, data)
}

fn parse_map_body(cur: &mut Cursor) -> Result<BilinearMap> {
    let (line, text) = cur.next("a header line p=<p> n=<n> m=<m>")?;
    let h = parse_header(line, text)?;
    let fp = FieldParams::new(h.p)?;
    let mut slices = Vec::with_capacity(h.m);
    for k in 0..h.m {
        slices.push(parse_matrix(cur, h.n, h.p, &format!("block {}", k + 1))?);
        cur.separator()?;
    }
    BilinearMap::new(fp, h.n, h.m, slices)
}

pub fn parse_map(text: &str) -> Result<BilinearMap> {
    let mut cur = Cursor::new(text);
    let map = parse_map_body(&mut cur)?;
    cur.finish()?;
    Ok(map)
}

fn write_matrix(out: &mut String, m: &FpMatrix) {
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// Canonical form: no comments, one blank line between blocks, trailing
/// newline.
pub fn write_map(map: &BilinearMap) -> String {
    let mut out = format!("p={} n={} m={}\n", map.fp().p(), map.n(), map.m());
    for (k, s) in map.slices().iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        write_matrix(&mut out, s);
    }
    out
}

fn expect_line(cur: &mut Cursor, want: &str) -> Result<()> {
    let (line, text) = cur.next(want)?;
    if text != want {
        return Err(Error::parse(
            line,
            format!("expected {want:?}, got {text:?}"),
        ));
    }
    Ok(())
}

/// `(alpha, beta)` from a group file.
pub fn parse_group(text: &str) -> Result<(BilinearMap, BilinearMap)> {
    let mut cur = Cursor::new(text);
    expect_line(&mut cur, "[alpha]")?;
    let alpha = parse_map_body(&mut cur)?;
    expect_line(&mut cur, "[beta]")?;
    let beta_line = cur.peek().map_or(cur.last_line, |l| l.0);
    let beta = parse_map_body(&mut cur)?;
    cur.finish()?;
    if !alpha.same_shape(&beta) {
        return Err(Error::parse(
            beta_line,
            "beta must share p, n and m with alpha",
        ));
    }
    Ok((alpha, beta))
}

pub fn write_group(alpha: &BilinearMap, beta: &BilinearMap) -> String {
    format!("[alpha]\n{}\n[beta]\n{}", write_map(alpha), write_map(beta))
}

/// A plain map, or the `alpha` and `beta` of a group file.
pub fn parse_map_or_group(text: &str) -> Result<(BilinearMap, Option<BilinearMap>)> {
    let mut cur = Cursor::new(text);
    match cur.peek() {
        Some((_, "[alpha]")) => parse_group(text).map(|(a, b)| (a, Some(b))),
        _ => parse_map(text).map(|a| (a, None)),
    }
}

pub fn parse_class2(text: &str) -> Result<Class2Data> {
    let mut cur = Cursor::new(text);
    expect_line(&mut cur, "kind=class2")?;
    let line = cur.peek().map_or(cur.last_line, |l| l.0);
    let gamma = parse_map_body(&mut cur)?;
    cur.finish()?;
    Class2Data::new(gamma).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn write_class2(data: &Class2Data) -> String {
    format!("kind=class2\n{}", write_map(data.gamma()))
}

pub fn parse_witness(text: &str) -> Result<Isotopism> {
    let mut cur = Cursor::new(text);
    let (line, kind_line) = cur.next("a kind= line")?;
    let kind = match kind_line.strip_prefix("kind=") {
        Some("isotopism") => IsotopyKind::Isotopism,
        Some("anti-isotopism") => IsotopyKind::AntiIsotopism,
        _ => {
            return Err(Error::parse(
                line,
                "expected kind=isotopism or kind=anti-isotopism",
            ))
        }
    };
    let (line, text) = cur.next("a header line")?;
    let h = parse_header(line, text)?;
    let fp = FieldParams::new(h.p)?;
    let mut mats = Vec::with_capacity(3);
    for (name, size) in [("[a]", h.n), ("[b]", h.n), ("[c]", h.m)] {
        expect_line(&mut cur, name)?;
        mats.push(parse_matrix(&mut cur, size, h.p, name)?);
        cur.separator()?;
    }
    cur.finish()?;
    let c = mats.pop().unwrap();
    let b = mats.pop().unwrap();
    let a = mats.pop().unwrap();
    Isotopism::new(a, b, c, kind, fp).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn write_witness(iso: &Isotopism, p: u32) -> String {
    let mut out = format!(
        "kind={}\np={} n={} m={}\n",
        iso.kind().as_str(),
        p,
        iso.a().rows(),
        iso.c().rows()
    );
    for (name, m) in [("[a]", iso.a()), ("[b]", iso.b()), ("[c]", iso.c())] {
        out.push('\n');
        out.push_str(name);
        out.push('\n');
        write_matrix(&mut out, m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIELD_3_2_2: &str = "p=3 n=2 m=2\n1 0\n0 2\n\n0 1\n1 0\n";

    #[test]
    fn field_map_serializes_bit_exact() {
        let fp = FieldParams::new(3).unwrap();
        let map = BilinearMap::field_quotient_map(fp, 2, 2).unwrap();
        assert_eq!(write_map(&map), FIELD_3_2_2);
        assert_eq!(parse_map(FIELD_3_2_2).unwrap(), map);
    }

    #[test]
    fn comments_and_extra_blank_lines_are_accepted() {
        let text = "# a comment\np=3 n=2 m=2\n1 0\n# inside\n0 2\n\n\n0 1\n1 0\n\n";
        assert_eq!(parse_map(text).unwrap(), parse_map(FIELD_3_2_2).unwrap());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("p=4 n=1 m=1\n1\n", 1),
            ("p=3 n=2\n1 0\n0 1\n", 1),
            ("p=3 n=2 m=1\n1 0\n0 3\n", 3),
            ("p=3 n=2 m=1\n1 0 0\n0 1\n", 2),
            ("p=3 n=2 m=2\n1 0\n0 1\n0 1\n", 4),
            ("p=3 n=2 m=1\n1 0\n", 2),
            ("p=3 n=1 m=1\n1\n\n2\n", 4),
            ("p=3 n=1 m=1\nx\n", 2),
        ];
        for (text, line) in cases {
            match parse_map(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn group_round_trip() {
        let fp = FieldParams::new(5).unwrap();
        let alpha = BilinearMap::field_quotient_map(fp, 2, 1).unwrap();
        let beta = BilinearMap::random_biadditive(fp, 2, 1, 3);
        let text = write_group(&alpha, &beta);
        assert_eq!(parse_group(&text).unwrap(), (alpha.clone(), beta.clone()));
        assert_eq!(
            parse_map_or_group(&text).unwrap(),
            (alpha.clone(), Some(beta))
        );
        assert_eq!(
            parse_map_or_group(&write_map(&alpha)).unwrap(),
            (alpha, None)
        );
    }

    #[test]
    fn class2_round_trip() {
        let fp = FieldParams::new(3).unwrap();
        let data = Class2Data::new(BilinearMap::random_alternating(fp, 3, 2, 1)).unwrap();
        let text = write_class2(&data);
        assert!(text.starts_with("kind=class2\np=3 n=3 m=2\n"));
        assert_eq!(parse_class2(&text).unwrap(), data);
        let sym = "kind=class2\np=3 n=2 m=1\n0 1\n1 0\n";
        assert!(matches!(
            parse_class2(sym),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn witness_round_trip() {
        let fp = FieldParams::new(3).unwrap();
        let a = FpMatrix::from_rows([[1, 1], [0, 1]], fp).unwrap();
        let c = FpMatrix::from_rows([[2]], fp).unwrap();
        let iso = Isotopism::new(a.clone(), a, c, IsotopyKind::AntiIsotopism, fp).unwrap();
        let text = write_witness(&iso, 3);
        assert_eq!(
            text,
            "kind=anti-isotopism\np=3 n=2 m=1\n\n[a]\n1 1\n0 1\n\n[b]\n1 1\n0 1\n\n[c]\n2\n"
        );
        assert_eq!(parse_witness(&text).unwrap(), iso);
    }
}
