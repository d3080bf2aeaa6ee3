//! Text formats shared by the library and the CLI.
//!
//! Graph files: line 1 `n m`, then `m` lines `u v` (1-indexed endpoints,
//! `u u` is one self loop occupying a single slot). Matrix files: line 1
//! `n`, then `n` rows of `n` decimal values. All numeric output uses
//! C's `%.17g`, which round-trips `f64` exactly and is diff-friendly.

use crate::error::{Error, Result};
use crate::graph::LabeledMultigraph;
use crate::matrix::Matrix;

/// Format `x` exactly as C's `printf("%.17g", x)` would.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf".into() } else { "inf".into() };
    }
    // 17 significant digits via exponential form "d.dddddddddddddddde±x".
    let e_form = format!("{:.16e}", x);
    let (mantissa, exp_str) = e_form.split_once('e').expect("exponential form");
    let dexp: i32 = exp_str.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };

    if !(-4..17).contains(&dexp) {
        let frac = &digits[1..];
        let exp_sign = if dexp < 0 { '-' } else { '+' };
        let mag = dexp.unsigned_abs();
        let head = if frac.is_empty() {
            digits[..1].to_string()
        } else {
            format!("{}.{}", &digits[..1], frac)
        };
        format!("{sign}{head}e{exp_sign}{mag:02}")
    } else if dexp >= 0 {
        let int_len = dexp as usize + 1;
        if digits.len() <= int_len {
            let mut s = digits.to_string();
            s.push_str(&"0".repeat(int_len - digits.len()));
            format!("{sign}{s}")
        } else {
            format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        let zeros = "0".repeat((-dexp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

pub fn write_matrix(m: &Matrix<f64>) -> String {
    let mut out = String::new();
    out.push_str(&m.n().to_string());
    out.push('\n');
    for i in 0..m.n() {
        let row: Vec<String> = m.row(i).iter().map(|&v| g17(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<Matrix<f64>> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("matrix dimension: {e}")))?;
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("matrix truncated at entry ({i},{j})")))?;
            m[(i, j)] =
                tok.parse().map_err(|e| Error::Parse(format!("matrix entry ({i},{j}): {e}")))?;
        }
    }
    if tokens.next().is_some() {
        return Err(Error::Parse("trailing tokens after matrix".into()));
    }
    Ok(m)
}

/// Serialize a graph. Each undirected edge appears once, in deterministic
/// vertex-major slot order; a rotation pair joining two distinct slots of
/// the same vertex is written as two `u u` loop lines so that degrees and
/// the adjacency matrix survive the round trip.
pub fn write_graph(g: &LabeledMultigraph) -> String {
    let mut lines = Vec::new();
    for (a, b) in g.enumerate_slots() {
        if a.vertex == b.vertex && a.label != b.label {
            lines.push(format!("{} {}", a.vertex, b.vertex));
            lines.push(format!("{} {}", a.vertex, b.vertex));
        } else {
            lines.push(format!("{} {}", a.vertex, b.vertex));
        }
    }
    let mut out = format!("{} {}\n", g.vertex_count(), lines.len());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn parse_graph(text: &str) -> Result<LabeledMultigraph> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty graph file".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("vertex count: {e}")))?;
    let m: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing edge count".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("edge count: {e}")))?;
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let u: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("edge {i} truncated")))?
            .parse()
            .map_err(|e| Error::Parse(format!("edge {i}: {e}")))?;
        let v: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("edge {i} truncated")))?
            .parse()
            .map_err(|e| Error::Parse(format!("edge {i}: {e}")))?;
        edges.push((u, v));
    }
    if tokens.next().is_some() {
        return Err(Error::Parse("trailing tokens after edge list".into()));
    }
    LabeledMultigraph::from_edge_list(n, &edges)
}

/// Weighted edge list `(u, v, w)` with 1-indexed endpoints.
pub type WeightedEdges = Vec<(usize, usize, f64)>;

/// Weighted graph: `n m` then `u v w` lines. Used by the odd-step
/// sparsifier output.
pub fn write_weighted_graph(n: usize, edges: &[(usize, usize, f64)]) -> String {
    let mut out = format!("{} {}\n", n, edges.len());
    for &(u, v, w) in edges {
        out.push_str(&format!("{} {} {}\n", u, v, g17(w)));
    }
    out
}

pub fn parse_weighted_graph(text: &str) -> Result<(usize, WeightedEdges)> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty weighted graph file".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("vertex count: {e}")))?;
    let m: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing edge count".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("edge count: {e}")))?;
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let mut next = || tokens.next().ok_or_else(|| Error::Parse(format!("edge {i} truncated")));
        let u: usize = next()?.parse().map_err(|e| Error::Parse(format!("edge {i}: {e}")))?;
        let v: usize = next()?.parse().map_err(|e| Error::Parse(format!("edge {i}: {e}")))?;
        let w: f64 = next()?.parse().map_err(|e| Error::Parse(format!("edge {i}: {e}")))?;
        edges.push((u, v, w));
    }
    Ok((n, edges))
}
