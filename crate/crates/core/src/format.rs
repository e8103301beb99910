//! Text formats: a plain edge list and McKay's graph6.
//!
//! Edge list: first line `n m`, then `m` lines `u v`. Lines starting with `#`
//! are comments, blank lines are ignored.

use crate::error::{Error, Result};
use crate::graph::{MultiGraph, MAX_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Graph6,
    Edgelist,
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<MultiGraph> {
    match format {
        GraphFormat::Edgelist => parse_edge_list(text),
        GraphFormat::Graph6 => {
            let (line, g6) = text
                .lines()
                .enumerate()
                .find(|(_, l)| !l.trim().is_empty())
                .ok_or_else(|| Error::parse(1, "empty input"))?;
            parse_graph6(g6.trim()).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(line + 1, message),
                other => other,
            })
        }
    }
}

pub fn serialize_graph(g: &MultiGraph, format: GraphFormat) -> Result<String> {
    match format {
        GraphFormat::Edgelist => Ok(to_edge_list(g)),
        GraphFormat::Graph6 => to_graph6(g),
    }
}

pub fn parse_edge_list(text: &str) -> Result<MultiGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header line `n m`"))?;
    let [n, m] = two_numbers(hline, header, "header")?;
    if n > MAX_VERTICES {
        return Err(Error::parse(
            hline,
            format!("{n} vertices exceeds the limit of {MAX_VERTICES}"),
        ));
    }
    let mut g = MultiGraph::new(n)?;
    for k in 0..m {
        let (line, text) = lines
            .next()
            .ok_or_else(|| Error::parse(hline, format!("expected {m} edges, found {k}")))?;
        let [u, v] = two_numbers(line, text, "edge")?;
        if u >= n || v >= n {
            return Err(Error::parse(
                line,
                format!("vertex out of range in edge {u} {v} (n = {n})"),
            ));
        }
        if u == v {
            return Err(Error::parse(line, format!("loop at vertex {u}")));
        }
        g.add_edge(u, v)?;
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::parse(line, format!("more than {m} edge lines")));
    }
    Ok(g)
}

fn two_numbers(line: usize, text: &str, what: &str) -> Result<[usize; 2]> {
    let mut it = text.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::parse(line, format!("malformed {what}: `{text}`")))?
            .parse()
            .map_err(|_| Error::parse(line, format!("malformed {what}: `{text}`")))
    };
    let pair = [next()?, next()?];
    if it.next().is_some() {
        return Err(Error::parse(line, format!("malformed {what}: `{text}`")));
    }
    Ok(pair)
}

pub fn to_edge_list(g: &MultiGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for e in g.edges() {
        out.push_str(&format!("{} {}\n", e.u, e.v));
    }
    out
}

const HEADER: &str = ">>graph6<<";

/// Decodes one graph6 string. The optional `>>graph6<<` header is accepted.
pub fn parse_graph6(s: &str) -> Result<MultiGraph> {
    let s = s.strip_prefix(HEADER).unwrap_or(s);
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(Error::parse(1, "empty graph6 string"));
    }
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(Error::parse(1, format!("invalid graph6 byte 0x{b:02x}")));
    }
    let (n, body) = if bytes[0] != 126 {
        ((bytes[0] - 63) as usize, &bytes[1..])
    } else {
        if bytes.len() < 4 || bytes[1] == 126 {
            return Err(Error::parse(1, "unsupported graph6 size prefix"));
        }
        let n = bytes[1..4]
            .iter()
            .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        (n, &bytes[4..])
    };
    if n > MAX_VERTICES {
        return Err(Error::parse(
            1,
            format!("{n} vertices exceeds the limit of {MAX_VERTICES}"),
        ));
    }
    let nbits = n * n.saturating_sub(1) / 2;
    if body.len() != nbits.div_ceil(6) {
        return Err(Error::parse(
            1,
            format!(
                "graph6 body has {} bytes, expected {}",
                body.len(),
                nbits.div_ceil(6)
            ),
        ));
    }
    let bit_at = |k: usize| (body[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut g = MultiGraph::new(n)?;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit_at(k) {
                g.add_edge(i, j)?;
            }
            k += 1;
        }
    }
    Ok(g)
}

/// Encodes a simple graph as graph6 (no header, no newline).
pub fn to_graph6(g: &MultiGraph) -> Result<String> {
    if !g.is_simple() {
        return Err(Error::Precondition(
            "graph6 encodes simple graphs only".into(),
        ));
    }
    let n = g.n();
    let mut out = Vec::new();
    if n < 63 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
    let adj = g.neighbor_masks();
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | ((adj[j] >> i) & 1) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::complete;
    use proptest::prelude::*;

    /// Textbook graph6 decoder over the bit string, written independently of
    /// `parse_graph6`: expand every data byte into six bits first, then read
    /// the upper triangle column by column.
    fn reference_decode(s: &str) -> (usize, Vec<(usize, usize)>) {
        let b = s.as_bytes();
        let n = (b[0] - 63) as usize;
        let bits: Vec<u8> = b[1..]
            .iter()
            .flat_map(|&c| (0..6).rev().map(move |k| ((c - 63) >> k) & 1))
            .collect();
        let mut edges = Vec::new();
        let mut k = 0;
        for j in 0..n {
            for i in 0..j {
                if bits[k] == 1 {
                    edges.push((i, j));
                }
                k += 1;
            }
        }
        (n, edges)
    }

    #[test]
    fn edge_list_k4() {
        let g = parse_edge_list("4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.sorted_pairs(), complete(4).sorted_pairs());
    }

    #[test]
    fn edge_list_double_edge_and_comments() {
        let g = parse_edge_list("# 2K2\n2 2\n\n0 1\n# again\n0 1\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.multiplicity(0, 1), 2);
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(parse_edge_list(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("3 x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("3 1\n1 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("3 1\n0 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("3 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("3 1\n0 1\n1 2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_edge_list("3 1\n0 1 2\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn graph6_k4() {
        let g = parse_graph6("C~").unwrap();
        assert_eq!(g, complete(4));
        let (n, edges) = reference_decode("C~");
        assert_eq!(n, 4);
        assert_eq!(edges, g.pairs().into_iter().collect::<Vec<_>>());
        assert_eq!(to_graph6(&g).unwrap(), "C~");
        assert_eq!(parse_graph6(">>graph6<<C~").unwrap(), g);
    }

    #[test]
    fn graph6_errors() {
        assert!(parse_graph6("").is_err());
        assert!(parse_graph6("C").is_err());
        assert!(parse_graph6("C~~").is_err());
        assert!(parse_graph6("C !").is_err());
        let double = MultiGraph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap();
        assert!(to_graph6(&double).is_err());
    }

    #[test]
    fn graph6_long_form() {
        let g = complete(63);
        let s = to_graph6(&g).unwrap();
        assert!(s.starts_with('~'));
        assert_eq!(parse_graph6(&s).unwrap(), g);
    }

    fn arb_multigraph() -> impl Strategy<Value = MultiGraph> {
        (1usize..9).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..20).prop_map(move |pairs| {
                let mut g = MultiGraph::new(n).unwrap();
                for (u, v) in pairs {
                    if u != v {
                        g.add_edge(u, v).unwrap();
                    }
                }
                g
            })
        })
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(g in arb_multigraph()) {
            let text = to_edge_list(&g);
            let back = parse_edge_list(&text).unwrap();
            prop_assert_eq!(&back, &g.renumbered());
            prop_assert_eq!(to_edge_list(&back), text);
        }

        #[test]
        fn graph6_matches_reference(mask in 0u64..(1 << 21), n in 1usize..8) {
            let pairs: Vec<(usize, usize)> = (1..n)
                .flat_map(|j| (0..j).map(move |i| (i, j)))
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, p)| p)
                .collect();
            let g = MultiGraph::from_pairs(n, &pairs).unwrap();
            let s = to_graph6(&g).unwrap();
            let (rn, redges) = reference_decode(&s);
            prop_assert_eq!(rn, n);
            prop_assert_eq!(redges, pairs);
            prop_assert_eq!(parse_graph6(&s).unwrap(), g);
        }
    }
}
