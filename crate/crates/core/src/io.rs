//! Plain-text instance formats.
//!
//! ```text
//! # weighted tournament: one line per unordered pair, complement inferred
//! fast 3 2
//! w 0 1 2
//! w 0 2 1
//! w 1 2 0
//!
//! # unweighted shorthand (D = 1), arcs point from winner to loser
//! tour 3
//! 0 1
//! 1 2
//! 2 0
//!
//! # betweenness: every triple once, last column is the designated middle
//! bt 3
//! 0 1 2 1
//! ```
//!
//! Vote files hold one vote per line, most preferred candidate first.
//! Blank lines and everything after `#` are ignored in all formats.

use std::fmt::Write as _;

use crate::betweenness::{triple_count, BetweennessInstance};
use crate::error::{Error, Result};
use crate::kra::VoteProfile;
use crate::tournament::WeightedTournament;

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found {tok:?}")))
}

fn vertex(line: usize, tok: &str, n: usize) -> Result<usize> {
    let v: usize = num(line, tok, "vertex id")?;
    if v >= n {
        return Err(Error::parse(line, format!("vertex {v} out of range 0..{n}")));
    }
    Ok(v)
}

fn expect_arity(line: usize, toks: &[&str], k: usize) -> Result<()> {
    if toks.len() != k {
        return Err(Error::parse(
            line,
            format!("expected {k} fields, found {}", toks.len()),
        ));
    }
    Ok(())
}

/// Parses either the `fast` or the `tour` format.
pub fn parse_tournament(text: &str) -> Result<WeightedTournament> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    match header[0] {
        "fast" => {
            expect_arity(hl, &header, 3)?;
            let n: usize = num(hl, header[1], "vertex count")?;
            let d: u64 = num(hl, header[2], "denominator")?;
            if d == 0 {
                return Err(Error::parse(hl, "denominator must be positive"));
            }
            let mut w: Vec<Option<u64>> = vec![None; n * n];
            for (ln, toks) in lines {
                if toks[0] != "w" {
                    return Err(Error::parse(ln, format!("expected weight line, found {:?}", toks[0])));
                }
                expect_arity(ln, &toks, 4)?;
                let u = vertex(ln, toks[1], n)?;
                let v = vertex(ln, toks[2], n)?;
                if u == v {
                    return Err(Error::parse(ln, format!("self pair ({u}, {u})")));
                }
                let x: u64 = num(ln, toks[3], "weight numerator")?;
                if x > d {
                    return Err(Error::parse(ln, format!("weight {x} exceeds denominator {d}")));
                }
                let (a, b, x) = if u < v { (u, v, x) } else { (v, u, d - x) };
                if w[a * n + b].replace(x).is_some() {
                    return Err(Error::parse(ln, format!("pair ({a}, {b}) given twice")));
                }
            }
            if let Some((a, b)) = first_missing_pair(n, |a, b| w[a * n + b].is_some()) {
                return Err(Error::parse(hl, format!("missing weight for pair ({a}, {b})")));
            }
            WeightedTournament::from_pairs(n, d, |u, v| w[u * n + v].expect("checked"))
        }
        "tour" => {
            expect_arity(hl, &header, 2)?;
            let n: usize = num(hl, header[1], "vertex count")?;
            let mut seen = vec![false; n * n];
            let mut arcs = Vec::new();
            for (ln, toks) in lines {
                expect_arity(ln, &toks, 2)?;
                let u = vertex(ln, toks[0], n)?;
                let v = vertex(ln, toks[1], n)?;
                if u == v {
                    return Err(Error::parse(ln, format!("self arc ({u}, {u})")));
                }
                let key = u.min(v) * n + u.max(v);
                if std::mem::replace(&mut seen[key], true) {
                    return Err(Error::parse(ln, format!("pair ({u}, {v}) given twice")));
                }
                arcs.push((u, v));
            }
            if let Some((a, b)) = first_missing_pair(n, |a, b| seen[a * n + b]) {
                return Err(Error::parse(hl, format!("missing arc for pair ({a}, {b})")));
            }
            WeightedTournament::from_arcs(n, &arcs)
        }
        other => Err(Error::parse(hl, format!("unknown header {other:?}, expected fast or tour"))),
    }
}

fn first_missing_pair(n: usize, present: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).find(|&(a, b)| !present(a, b))
}

/// `fast` format, pairs in lexicographic order.
pub fn print_tournament(t: &WeightedTournament) -> String {
    let n = t.n();
    let mut s = format!("fast {} {}\n", n, t.denom());
    for u in 0..n {
        for v in u + 1..n {
            writeln!(s, "w {u} {v} {}", t.w(u, v)).unwrap();
        }
    }
    s
}

pub fn parse_votes(text: &str) -> Result<VoteProfile> {
    let votes: Vec<(usize, Vec<&str>)> = content_lines(text).collect();
    if votes.is_empty() {
        return Err(Error::parse(1, "no votes"));
    }
    // re-run validation per line so errors carry a line number
    let first = &votes[0].1;
    for (ln, v) in &votes {
        if let Err(e) = VoteProfile::from_names(&[first.clone(), v.clone()]) {
            let msg = match e {
                Error::Invalid(m) => m,
                other => other.to_string(),
            };
            return Err(Error::parse(*ln, msg));
        }
    }
    let all: Vec<Vec<&str>> = votes.into_iter().map(|(_, v)| v).collect();
    VoteProfile::from_names(&all)
}

pub fn print_votes(p: &VoteProfile) -> String {
    let mut s = String::new();
    for vote in p.votes() {
        s.push_str(&p.names(vote).join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_betweenness(text: &str) -> Result<BetweennessInstance> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    if header[0] != "bt" {
        return Err(Error::parse(hl, format!("unknown header {:?}, expected bt", header[0])));
    }
    expect_arity(hl, &header, 2)?;
    let n: usize = num(hl, header[1], "vertex count")?;
    let mut b = BetweennessInstance::from_chain(n);
    let mut seen = vec![false; triple_count(n)];
    let mut given = 0usize;
    for (ln, toks) in lines {
        expect_arity(ln, &toks, 4)?;
        let mut t = [
            vertex(ln, toks[0], n)?,
            vertex(ln, toks[1], n)?,
            vertex(ln, toks[2], n)?,
        ];
        let m = vertex(ln, toks[3], n)?;
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] {
            return Err(Error::parse(ln, "triple repeats a vertex"));
        }
        let idx = crate::betweenness::triple_index(t[0], t[1], t[2]);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::parse(ln, format!("triple ({}, {}, {}) given twice", t[0], t[1], t[2])));
        }
        b.set_middle(t[0], t[1], t[2], m).map_err(|e| Error::parse(ln, e.to_string()))?;
        given += 1;
    }
    if given != triple_count(n) {
        let missing = b
            .triples()
            .map(|(a, x, c, _)| (a, x, c))
            .find(|&(a, x, c)| !seen[crate::betweenness::triple_index(a, x, c)])
            .expect("a triple is missing");
        return Err(Error::parse(
            hl,
            format!("missing triple ({}, {}, {})", missing.0, missing.1, missing.2),
        ));
    }
    Ok(b)
}

pub fn print_betweenness(b: &BetweennessInstance) -> String {
    let mut s = format!("bt {}\n", b.n());
    for (x, y, z, m) in b.triples() {
        writeln!(s, "{x} {y} {z} {m}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_round_trip() {
        let t = WeightedTournament::from_pairs(4, 10, |u, v| (3 * u + v) as u64 % 11).unwrap();
        assert_eq!(parse_tournament(&print_tournament(&t)).unwrap(), t);
    }

    #[test]
    fn tour_shorthand() {
        let t = parse_tournament("tour 3\n0 1\n1 2 # back\n2 0\n").unwrap();
        assert_eq!(t, WeightedTournament::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap());
    }

    #[test]
    fn reversed_pair_uses_complement() {
        let t = parse_tournament("fast 2 5\nw 1 0 2\n").unwrap();
        assert_eq!((t.w(0, 1), t.w(1, 0)), (3, 2));
    }

    #[test]
    fn fast_errors_carry_lines() {
        let e = parse_tournament("fast 3 1\nw 0 1 1\nw 0 2 x\nw 1 2 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse_tournament("fast 3 1\n\nw 0 1 1\nw 1 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
        let e = parse_tournament("fast 3 1\nw 0 1 1\nw 0 2 1\n").unwrap_err();
        assert!(e.to_string().contains("(1, 2)"));
        assert!(parse_tournament("fast 2 1\nw 0 1 2\n").is_err());
        assert!(parse_tournament("").is_err());
    }

    #[test]
    fn votes_round_trip() {
        let p = parse_votes("a b c\n# x\na b c\nb a c\n").unwrap();
        assert_eq!(p.voters(), 3);
        assert_eq!(parse_votes(&print_votes(&p)).unwrap(), p);
        let e = parse_votes("a b\na z\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn bt_round_trip_and_missing_triple() {
        let mut b = BetweennessInstance::from_chain(5);
        b.set_middle(1, 3, 4, 4).unwrap();
        assert_eq!(parse_betweenness(&print_betweenness(&b)).unwrap(), b);
        let text = print_betweenness(&BetweennessInstance::from_chain(4));
        let cut: String = text.lines().filter(|l| *l != "0 2 3 2").map(|l| format!("{l}\n")).collect();
        let e = parse_betweenness(&cut).unwrap_err();
        assert!(e.to_string().contains("missing triple (0, 2, 3)"), "{e}");
        assert!(parse_betweenness("bt 3\n0 1 2 3\n").is_err());
    }
}
