//! Text formats.
//!
//! `.mfun`: a header `mfun m=<int> n=<int> alphabet=<unity|int>` followed by the
//! `m^n` labels in index order, separated by any whitespace.
//! `.mpart`: the same with header `mpart m=<int> n=<int>`; values are class labels.
//! Polynomials: a header `poly m=<int> n=<int> alphabet=<..> scale=<int>`, then
//! one term per line as `coeff * x1^a1 x3^a3` (variables with exponent 0
//! omitted, a constant term is the bare coefficient, `0` for no terms).
//!
//! In all three, lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact_arith::{BigRational, CycInt};
use crate::functions::{Alphabet, MAryFunction};
use crate::limits::Limits;
use crate::partitions::VertexPartition;
use crate::representation::{RepresentingPolynomial, Scalar};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// A whitespace-separated token with its 1-based position.
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn is_blank(line: &str) -> bool {
    let t = line.trim_start();
    t.is_empty() || t.starts_with('#')
}

fn tokens(text: &str) -> impl Iterator<Item = Token<'_>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !is_blank(l))
        .flat_map(|(i, line)| {
            let base = line.as_ptr() as usize;
            line.split_whitespace().map(move |t| Token {
                text: t,
                line: i + 1,
                column: t.as_ptr() as usize - base + 1,
            })
        })
}

/// Field name to (value, column), plus the header's line number.
type Header<'a> = (BTreeMap<&'a str, (&'a str, usize)>, usize);

/// Parses `key=value` header fields after the leading keyword.
fn header_fields<'a>(
    text: &'a str,
    keyword: &str,
    required: &[&str],
    optional: &[&str],
) -> Result<Header<'a>> {
    let first = text
        .lines()
        .enumerate()
        .find(|(_, l)| !is_blank(l))
        .ok_or_else(|| parse_err(1, 1, format!("empty input, expected a '{keyword}' header")))?;
    let (idx, line) = first;
    let line_no = idx + 1;
    let mut toks = tokens(line).map(|t| (t.text, t.column));
    match toks.next() {
        Some((k, _)) if k == keyword => {}
        Some((other, col)) => {
            return Err(parse_err(
                line_no,
                col,
                format!("expected '{keyword}', found '{other}'"),
            ))
        }
        None => unreachable!("line is nonempty"),
    }
    let mut fields = BTreeMap::new();
    for (tok, col) in toks {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, col, format!("expected key=value, found '{tok}'")))?;
        if !required.contains(&key) && !optional.contains(&key) {
            return Err(parse_err(
                line_no,
                col,
                format!("unknown header field '{key}'"),
            ));
        }
        if fields.insert(key, (value, col)).is_some() {
            return Err(parse_err(
                line_no,
                col,
                format!("duplicate header field '{key}'"),
            ));
        }
    }
    for key in required {
        if !fields.contains_key(key) {
            return Err(parse_err(line_no, 1, format!("header is missing '{key}='")));
        }
    }
    Ok((fields, line_no))
}

fn field<T: std::str::FromStr>(
    fields: &BTreeMap<&str, (&str, usize)>,
    key: &str,
    line: usize,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let (value, col) = fields[key];
    value.parse().map_err(|e| {
        parse_err(
            line,
            col + key.len() + 1,
            format!("bad value for {key}: {e}"),
        )
    })
}

struct Table {
    m: u32,
    n: usize,
    alphabet: Option<Alphabet>,
    values: Vec<u32>,
}

fn parse_table(text: &str, keyword: &str, with_alphabet: bool, limits: &Limits) -> Result<Table> {
    let optional: &[&str] = if with_alphabet { &[] } else { &["alphabet"] };
    let required: &[&str] = if with_alphabet {
        &["m", "n", "alphabet"]
    } else {
        &["m", "n"]
    };
    let (fields, header_line) = header_fields(text, keyword, required, optional)?;
    let m: u32 = field(&fields, "m", header_line)?;
    let n: usize = field(&fields, "n", header_line)?;
    let alphabet = match fields.contains_key("alphabet") {
        true => Some(field::<Alphabet>(&fields, "alphabet", header_line)?),
        false => None,
    };
    if m < 2 || n < 1 {
        return Err(parse_err(
            header_line,
            1,
            format!("need m >= 2 and n >= 1, got m={m} n={n}"),
        ));
    }
    let expected = limits.check_dense(m, n)?;
    let mut values = Vec::with_capacity(expected);
    let mut last = (header_line, 1);
    for tok in tokens(text).filter(|t| t.line > header_line) {
        last = (tok.line, tok.column);
        if values.len() == expected {
            return Err(parse_err(
                tok.line,
                tok.column,
                format!("expected {expected} labels, found more"),
            ));
        }
        let v: u32 = tok.text.parse().map_err(|_| {
            parse_err(
                tok.line,
                tok.column,
                format!(
                    "label {} ('{}') is not a nonnegative integer",
                    values.len(),
                    tok.text
                ),
            )
        })?;
        if v >= m {
            return Err(parse_err(
                tok.line,
                tok.column,
                format!("label {} is {v}, outside [0, {}]", values.len(), m - 1),
            ));
        }
        values.push(v);
    }
    if values.len() != expected {
        return Err(parse_err(
            last.0,
            last.1,
            format!("expected {expected} labels, found {}", values.len()),
        ));
    }
    Ok(Table {
        m,
        n,
        alphabet,
        values,
    })
}

fn write_table(out: &mut String, m: u32, values: &[u32]) {
    for row in values.chunks(m as usize) {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

pub fn parse_mfun(text: &str, limits: &Limits) -> Result<MAryFunction> {
    let t = parse_table(text, "mfun", true, limits)?;
    MAryFunction::from_table(t.m, t.n, t.alphabet.expect("required field"), t.values)
}

pub fn write_mfun(f: &MAryFunction, limits: &Limits) -> Result<String> {
    let table = f.to_dense(limits)?;
    let mut out = format!("mfun m={} n={} alphabet={}\n", f.m(), f.n(), f.alphabet());
    write_table(&mut out, f.m(), table.table().expect("dense"));
    Ok(out)
}

pub fn parse_mpart(text: &str, limits: &Limits) -> Result<VertexPartition> {
    let t = parse_table(text, "mpart", false, limits)?;
    VertexPartition::new(t.m, t.n, t.values)
}

pub fn write_mpart(p: &VertexPartition) -> String {
    let mut out = format!("mpart m={} n={}\n", p.m(), p.n());
    write_table(&mut out, p.m(), p.classes());
    out
}

pub fn write_polynomial(p: &RepresentingPolynomial) -> String {
    let mut out = format!(
        "poly m={} n={} alphabet={} scale={}\n",
        p.m(),
        p.n(),
        p.alphabet(),
        p.scale()
    );
    if p.terms().is_empty() {
        out.push_str("0\n");
    }
    for (exps, coeff) in p.terms() {
        let mono: Vec<String> = exps
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(j, a)| format!("x{}^{a}", j + 1))
            .collect();
        if mono.is_empty() {
            let _ = writeln!(out, "{coeff}");
        } else {
            let _ = writeln!(out, "{coeff} * {}", mono.join(" "));
        }
    }
    out
}

pub fn parse_polynomial(text: &str) -> Result<RepresentingPolynomial> {
    let (fields, header_line) = header_fields(text, "poly", &["m", "n", "alphabet", "scale"], &[])?;
    let m: u32 = field(&fields, "m", header_line)?;
    let n: usize = field(&fields, "n", header_line)?;
    let alphabet: Alphabet = field(&fields, "alphabet", header_line)?;
    let scale: BigInt = field(&fields, "scale", header_line)?;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate().skip(header_line) {
        let line_no = i + 1;
        let line = raw.trim();
        if is_blank(line) || line == "0" {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        let (coeff_text, mono_text, mono_col) =
            split_term(line).map_err(|(col, msg)| parse_err(line_no, indent + col, msg))?;
        let coeff = match alphabet {
            Alphabet::Unity => Scalar::Cyclotomic(
                CycInt::parse(m, coeff_text)
                    .map_err(|e| parse_err(line_no, indent + 1, e.to_string()))?,
            ),
            Alphabet::Integer => {
                Scalar::Rational(coeff_text.parse::<BigRational>().map_err(|e| {
                    parse_err(
                        line_no,
                        indent + 1,
                        format!("bad rational '{coeff_text}': {e}"),
                    )
                })?)
            }
        };
        let mut exps = vec![0u32; n];
        for tok in tokens(mono_text) {
            let col = indent + mono_col + tok.column - 1;
            let bad = || parse_err(line_no, col, format!("malformed variable '{}'", tok.text));
            let rest = tok.text.strip_prefix('x').ok_or_else(bad)?;
            let (var, exp) = rest.split_once('^').ok_or_else(bad)?;
            let var: usize = var.parse().map_err(|_| bad())?;
            let exp: u32 = exp.parse().map_err(|_| bad())?;
            if var < 1 || var > n {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("variable x{var} outside x1..x{n}"),
                ));
            }
            if exps[var - 1] != 0 {
                return Err(parse_err(line_no, col, format!("variable x{var} repeated")));
            }
            exps[var - 1] = exp;
        }
        terms.push((exps, coeff));
    }
    RepresentingPolynomial::from_terms(m, n, alphabet, scale, terms)
}

/// Splits a term into coefficient and monomial text; columns are 1-based
/// within the trimmed line.
fn split_term(line: &str) -> std::result::Result<(&str, &str, usize), (usize, String)> {
    let coeff_end = if line.starts_with('(') {
        line.find(')')
            .map(|i| i + 1)
            .ok_or((1, "unclosed '('".to_string()))?
    } else {
        line.find(char::is_whitespace).unwrap_or(line.len())
    };
    let (coeff, rest) = line.split_at(coeff_end);
    let trimmed = rest.trim_start();
    if trimmed.is_empty() {
        return Ok((coeff, "", coeff_end + 1));
    }
    let after_star = trimmed.strip_prefix('*').ok_or((
        line.len() - trimmed.len() + 1,
        "expected '*' after the coefficient".to_string(),
    ))?;
    let mono_start = line.len() - after_star.len();
    Ok((coeff, after_star, mono_start + 1))
}
