//! Planar-diagram (PD) codes, Wirtinger presentations and the built-in
//! catalog of knots and links.
//!
//! A crossing `X(i,j,k,l)` lists its four edge labels counterclockwise,
//! starting from the incoming under-edge `i`; `k` is the outgoing under-edge
//! and `j`, `l` belong to the over-strand. A sign suffix `X(i,j,k,l;+)`
//! fixes the crossing sign; when it is missing the sign is read off the
//! over-strand orientation (`+` when the over-strand runs from `l` to `j`).
//! `O` stands for a component without crossings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fpgroup::{default_generator_names, Letter, Presentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed token at line {line}: {message}")]
    MalformedToken { line: usize, message: String },
    #[error("edge label {label} appears {count} times (expected 2)")]
    ArcCountMismatch { label: usize, count: usize },
    #[error("empty diagram")]
    EmptyInput,
    #[error("edge labels give no consistent orientation near label {label}")]
    InconsistentOrientation { label: usize },
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
}

/// Crossing sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Sign {
    pub fn as_char(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    /// Edge labels `[incoming under, over, outgoing under, over]`.
    pub labels: [usize; 4],
    pub sign: Sign,
}

impl Crossing {
    pub fn under_in(&self) -> usize {
        self.labels[0]
    }
    pub fn under_out(&self) -> usize {
        self.labels[2]
    }
    pub fn over(&self) -> (usize, usize) {
        (self.labels[1], self.labels[3])
    }
}

/// A validated diagram. Edge labels run over `1..=arc_count`; labels that
/// appear in no crossing are crossing-free unknotted components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDCode {
    crossings: Vec<Crossing>,
    arc_count: usize,
    component_of: Vec<usize>,
}

/// Crossing as parsed, before sign resolution.
#[derive(Debug, Clone, Copy)]
pub struct RawCrossing {
    pub labels: [usize; 4],
    pub sign: Option<Sign>,
}

impl PDCode {
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    /// Number of edge labels, including crossing-free loops.
    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    /// Component index of edge `label` (1-based label).
    pub fn component_of(&self, label: usize) -> usize {
        self.component_of[label - 1]
    }

    pub fn num_components(&self) -> usize {
        self.component_of.iter().max().map_or(0, |m| m + 1)
    }

    /// Labels that appear in no crossing.
    pub fn free_loops(&self) -> Vec<usize> {
        let mut seen = vec![false; self.arc_count];
        for c in &self.crossings {
            for &l in &c.labels {
                seen[l - 1] = true;
            }
        }
        (1..=self.arc_count).filter(|&l| !seen[l - 1]).collect()
    }

    /// Build from crossings and a number of crossing-free loops. Labels are
    /// renumbered by first appearance; missing signs are inferred.
    pub fn from_parts(raw: &[RawCrossing], free_loops: usize) -> Result<PDCode, DiagramError> {
        if raw.is_empty() && free_loops == 0 {
            return Err(DiagramError::EmptyInput);
        }
        // renumber by first appearance
        let mut map: Vec<(usize, usize)> = Vec::new();
        let mut relabel = |old: usize| -> usize {
            match map.iter().find(|(o, _)| *o == old) {
                Some(&(_, n)) => n,
                None => {
                    let n = map.len() + 1;
                    map.push((old, n));
                    n
                }
            }
        };
        let renumbered: Vec<RawCrossing> = raw
            .iter()
            .map(|c| RawCrossing { labels: c.labels.map(&mut relabel), sign: c.sign })
            .collect();
        let edge_labels = map.len();
        let arc_count = edge_labels + free_loops;

        let mut counts = vec![0usize; edge_labels];
        for c in &renumbered {
            for &l in &c.labels {
                counts[l - 1] += 1;
            }
        }
        if let Some((i, &count)) = counts.iter().enumerate().find(|(_, &n)| n != 2) {
            return Err(DiagramError::ArcCountMismatch { label: i + 1, count });
        }

        let mut uf = UnionFind::new(arc_count);
        for c in &renumbered {
            uf.union(c.labels[0] - 1, c.labels[2] - 1);
            uf.union(c.labels[1] - 1, c.labels[3] - 1);
        }
        let component_of = uf.dense_classes();

        let needs_orientation = renumbered.iter().any(|c| c.sign.is_none());
        let inferred = if needs_orientation { Some(infer_signs(&renumbered, edge_labels)?) } else { None };
        let crossings = renumbered
            .iter()
            .enumerate()
            .map(|(n, c)| Crossing {
                labels: c.labels,
                sign: c.sign.unwrap_or_else(|| inferred.as_ref().expect("signs inferred")[n]),
            })
            .collect();

        Ok(PDCode { crossings, arc_count, component_of })
    }

    /// Wirtinger arc index of every edge label (index `label - 1`): edges
    /// joined through an over-crossing belong to the same arc. Arcs are
    /// numbered by their smallest edge label.
    pub fn wirtinger_arcs(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.arc_count);
        for c in &self.crossings {
            let (j, l) = c.over();
            uf.union(j - 1, l - 1);
        }
        uf.dense_classes()
    }

    pub fn wirtinger_arc_count(&self) -> usize {
        self.wirtinger_arcs().iter().max().map_or(0, |m| m + 1)
    }
}

/// Resolve crossing signs from the orientation of the edges. Each edge ends
/// at one of its two occurrences and starts at the other; under-edges fix
/// this directly and over-edges inherit it.
fn infer_signs(crossings: &[RawCrossing], edge_labels: usize) -> Result<Vec<Sign>, DiagramError> {
    // ends[c][p]: Some(true) if the edge at slot p of crossing c ends there
    let mut ends: Vec<[Option<bool>; 4]> = crossings.iter().map(|_| [Some(true), None, Some(false), None]).collect();
    let mut occurrences: Vec<Vec<(usize, usize)>> = vec![Vec::new(); edge_labels];
    for (ci, c) in crossings.iter().enumerate() {
        for (p, &l) in c.labels.iter().enumerate() {
            occurrences[l - 1].push((ci, p));
        }
    }

    let set = |ends: &mut Vec<[Option<bool>; 4]>, ci: usize, p: usize, v: bool, label: usize| -> Result<bool, DiagramError> {
        match ends[ci][p] {
            Some(old) if old != v => Err(DiagramError::InconsistentOrientation { label }),
            Some(_) => Ok(false),
            None => {
                ends[ci][p] = Some(v);
                Ok(true)
            }
        }
    };

    loop {
        let mut changed = true;
        while changed {
            changed = false;
            for (li, occ) in occurrences.iter().enumerate() {
                let (a, b) = (occ[0], occ[1]);
                match (ends[a.0][a.1], ends[b.0][b.1]) {
                    (Some(x), _) => changed |= set(&mut ends, b.0, b.1, !x, li + 1)?,
                    (None, Some(y)) => changed |= set(&mut ends, a.0, a.1, !y, li + 1)?,
                    _ => {}
                }
                if a == b {
                    continue;
                }
                if let (Some(x), Some(y)) = (ends[a.0][a.1], ends[b.0][b.1]) {
                    if x == y {
                        return Err(DiagramError::InconsistentOrientation { label: li + 1 });
                    }
                }
            }
            for (ci, c) in crossings.iter().enumerate() {
                match (ends[ci][1], ends[ci][3]) {
                    (Some(x), _) => changed |= set(&mut ends, ci, 3, !x, c.labels[3])?,
                    (None, Some(y)) => changed |= set(&mut ends, ci, 1, !y, c.labels[1])?,
                    _ => {}
                }
            }
        }
        // over-only components have no anchor; orient them j -> l
        match ends.iter().position(|e| e[1].is_none()) {
            Some(ci) => {
                ends[ci][1] = Some(true);
            }
            None => break,
        }
    }

    Ok(ends
        .iter()
        .map(|e| if e[3] == Some(true) { Sign::Positive } else { Sign::Negative })
        .collect())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Class index per element, classes numbered by smallest member.
    fn dense_classes(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut index = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|x| {
                let r = self.find(x);
                if index[r] == usize::MAX {
                    index[r] = next;
                    next += 1;
                }
                index[r]
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// text format

/// Parse the PD text format. See the module docs for the grammar.
pub fn parse_pd(text: &str) -> Result<PDCode, DiagramError> {
    let mut raw = Vec::new();
    let mut loops = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut rest = line.trim_start();
        let malformed = |message: String| DiagramError::MalformedToken { line: lineno + 1, message };
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix(';') {
                rest = r.trim_start();
                continue;
            }
            if let Some(r) = rest.strip_prefix('O') {
                if r.starts_with(|c: char| c.is_alphanumeric()) {
                    return Err(malformed(format!("unexpected {rest:?}")));
                }
                loops += 1;
                rest = r.trim_start();
                continue;
            }
            let body = rest
                .strip_prefix("X(")
                .or_else(|| rest.strip_prefix("X["))
                .ok_or_else(|| malformed(format!("expected X(...) or O, found {rest:?}")))?;
            let close = body
                .find([')', ']'])
                .ok_or_else(|| malformed("missing closing parenthesis".to_string()))?;
            raw.push(parse_crossing(&body[..close]).map_err(malformed)?);
            rest = body[close + 1..].trim_start();
        }
    }
    if raw.is_empty() && loops == 0 {
        return Err(DiagramError::EmptyInput);
    }
    PDCode::from_parts(&raw, loops)
}

fn parse_crossing(inner: &str) -> Result<RawCrossing, String> {
    let (nums, sign) = match inner.split_once(';') {
        Some((n, s)) => {
            let sign = match s.trim() {
                "+" => Sign::Positive,
                "-" | "\u{2212}" => Sign::Negative,
                other => return Err(format!("bad sign {other:?}")),
            };
            (n, Some(sign))
        }
        None => (inner, None),
    };
    let parts: Vec<&str> = nums.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 labels in X({inner})"));
    }
    let mut labels = [0usize; 4];
    for (slot, p) in labels.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("bad label {p:?}"))?;
        if *slot == 0 {
            return Err("labels start at 1".to_string());
        }
    }
    Ok(RawCrossing { labels, sign })
}

impl fmt::Display for PDCode {
    /// Canonical serialization with explicit signs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tokens: Vec<String> = self
            .crossings
            .iter()
            .map(|c| {
                let [a, b, d, e] = c.labels;
                format!("X({a},{b},{d},{e};{})", c.sign.as_char())
            })
            .collect();
        tokens.extend(self.free_loops().iter().map(|_| "O".to_string()));
        write!(f, "{}", tokens.join("; "))
    }
}

impl FromStr for PDCode {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pd(s)
    }
}

// ---------------------------------------------------------------------------

/// Wirtinger presentation: one generator per arc, one relator per crossing.
///
/// At a crossing with over-arc `o`, incoming under-arc `x` and outgoing
/// under-arc `y`, a positive crossing gives `y = o⁻¹ x o` and a negative one
/// `y = o x o⁻¹`.
pub fn wirtinger_presentation(pd: &PDCode) -> Presentation {
    let arcs = pd.wirtinger_arcs();
    let n = pd.wirtinger_arc_count();
    let relators = pd
        .crossings
        .iter()
        .map(|c| {
            let o = arcs[c.over().0 - 1];
            let x = arcs[c.under_in() - 1];
            let y = arcs[c.under_out() - 1];
            let conj_inv = c.sign == Sign::Positive;
            Word(vec![
                Letter::new(y, true),
                Letter::new(o, conj_inv),
                Letter::new(x, false),
                Letter::new(o, !conj_inv),
            ])
        })
        .collect();
    Presentation::new(default_generator_names(n), relators).expect("arc indices are in range")
}

/// Over/under crossing counts between the two components of a 2-component link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingCounts {
    pub over: usize,
    pub under: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub pd: PDCode,
    pub expected_presentation: Presentation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing_counts: Option<CrossingCounts>,
}

pub const CATALOG_NAMES: [&str; 6] = ["trefoil", "figure8", "hopf", "whitehead", "unknot", "unlink2"];

/// Built-in diagrams. PD codes follow the standard knot tables; the expected
/// presentations and the link crossing counts are the published ones.
pub fn catalog(name: &str) -> Result<CatalogEntry, DiagramError> {
    let (pd, gens, rels, counts): (&str, Vec<&str>, &[&str], Option<(usize, usize)>) = match name {
        "trefoil" => ("X(1,4,2,5); X(3,6,4,1); X(5,2,6,3)", vec!["a", "b"], &["babABA"], None),
        "figure8" => ("X(4,2,5,1); X(8,6,1,5); X(6,3,7,4); X(2,7,3,8)", vec!["a", "b"], &["baBabABaBA"], None),
        "hopf" => ("X(4,1,3,2); X(2,3,1,4)", vec!["a", "b"], &["abAB"], Some((1, 1))),
        "whitehead" => (
            "X(6,1,7,2); X(10,7,5,8); X(4,5,1,6); X(2,10,3,9); X(8,4,9,3)",
            vec!["x", "y"],
            &["abABaBAbABabAbaB"],
            Some((2, 2)),
        ),
        "unknot" => ("O", vec!["a"], &[], None),
        "unlink2" => ("O; O", vec!["a", "b"], &[], Some((0, 0))),
        other => return Err(DiagramError::UnknownName(other.to_string())),
    };
    let pd = parse_pd(pd).expect("catalog PD codes are valid");
    let relators = rels.iter().map(|r| Word::parse(r).expect("catalog words parse")).collect();
    let expected_presentation =
        Presentation::new(gens.into_iter().map(String::from).collect(), relators).expect("catalog presentation");
    Ok(CatalogEntry {
        name: name.to_string(),
        pd,
        expected_presentation,
        crossing_counts: counts.map(|(over, under)| CrossingCounts { over, under }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::{commutator, equivalent_relator, equivalent_up_to_renaming};
    use proptest::prelude::*;

    #[test]
    fn parse_trefoil() {
        let pd = parse_pd("X(1,4,2,5); X(3,6,4,1); X(5,2,6,3)").unwrap();
        assert_eq!(pd.crossings().len(), 3);
        assert_eq!(pd.arc_count(), 6);
        assert_eq!(pd.num_components(), 1);
        // all three over-strands run j -> l
        assert!(pd.crossings().iter().all(|c| c.sign == Sign::Negative));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_pd(""), Err(DiagramError::EmptyInput));
        assert_eq!(parse_pd("  # only a comment\n"), Err(DiagramError::EmptyInput));
        assert!(matches!(parse_pd("X(1,2,3)"), Err(DiagramError::MalformedToken { .. })));
        assert!(matches!(parse_pd("X(1,2,3,4;?)"), Err(DiagramError::MalformedToken { .. })));
        assert!(matches!(parse_pd("Y(1,2,3,4)"), Err(DiagramError::MalformedToken { .. })));
        assert!(matches!(parse_pd("X(1,2,3,0)"), Err(DiagramError::MalformedToken { .. })));
        assert!(matches!(parse_pd("X(1,2,3,4)"), Err(DiagramError::ArcCountMismatch { count: 1, .. })));
    }

    #[test]
    fn kink_is_accepted() {
        let pd = parse_pd("X(1,1,2,2)").unwrap();
        assert_eq!(pd.crossings().len(), 1);
        assert_eq!(pd.arc_count(), 2);
        let p = wirtinger_presentation(&pd);
        assert_eq!(p.generator_count(), 1);
        assert!(p.simplify().relators().is_empty());
    }

    #[test]
    fn renumbering_by_first_appearance() {
        let pd = parse_pd("X(10,40,20,50;+)\nX(30,60,40,10;+) # comment\nX(50,20,60,30;+)").unwrap();
        assert_eq!(pd.crossings()[0].labels, [1, 2, 3, 4]);
        assert_eq!(pd.crossings()[1].labels, [5, 6, 2, 1]);
    }

    #[test]
    fn explicit_signs_and_unicode_minus() {
        let pd = parse_pd("X(1,4,2,5;+); X(3,6,4,1;\u{2212}); X(5,2,6,3;-)").unwrap();
        let signs: Vec<Sign> = pd.crossings().iter().map(|c| c.sign).collect();
        assert_eq!(signs, vec![Sign::Positive, Sign::Negative, Sign::Negative]);
    }

    #[test]
    fn serialization_emits_signs() {
        let pd = catalog("hopf").unwrap().pd;
        assert_eq!(pd.to_string(), "X(1,2,3,4;-); X(4,3,2,1;-)");
        assert_eq!(catalog("unlink2").unwrap().pd.to_string(), "O; O");
    }

    #[test]
    fn figure8_signs_alternate_in_pairs() {
        let pd = catalog("figure8").unwrap().pd;
        let pos = pd.crossings().iter().filter(|c| c.sign == Sign::Positive).count();
        assert_eq!(pos, 2);
    }

    #[test]
    fn components() {
        assert_eq!(catalog("hopf").unwrap().pd.num_components(), 2);
        assert_eq!(catalog("whitehead").unwrap().pd.num_components(), 2);
        assert_eq!(catalog("unlink2").unwrap().pd.num_components(), 2);
        assert_eq!(catalog("unknot").unwrap().pd.num_components(), 1);
    }

    #[test]
    fn wirtinger_trefoil_three_generators() {
        let pd = catalog("trefoil").unwrap().pd;
        let p = wirtinger_presentation(&pd);
        assert_eq!(p.generator_count(), 3);
        assert_eq!(p.relators().len(), 3);
        // textbook form c = a⁻¹ba, b = c⁻¹ac, a = b⁻¹cb
        let reference = Presentation::parse(3, &["CAba", "BCac", "ABcb"]).unwrap();
        assert!(equivalent_up_to_renaming(&p, &reference, true), "{p}");
    }

    #[test]
    fn wirtinger_unknot() {
        let p = wirtinger_presentation(&catalog("unknot").unwrap().pd);
        assert_eq!(p.generator_count(), 1);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn wirtinger_hopf_reduces_to_commutator() {
        let p = wirtinger_presentation(&catalog("hopf").unwrap().pd).simplify();
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relators().len(), 1);
        assert!(equivalent_relator(&p.relators()[0], &commutator(&Word::gen(0), &Word::gen(1))));
    }

    #[test]
    fn catalog_entries() {
        let t = catalog("trefoil").unwrap();
        assert_eq!(t.expected_presentation.relators()[0].to_string(), "babABA");
        assert!(t.crossing_counts.is_none());
        let w = catalog("whitehead").unwrap();
        let (x, y) = (Word::gen(0), Word::gen(1));
        let reference = commutator(&x, &y)
            .concat(&commutator(&x, &y.inverse()))
            .concat(&commutator(&x.inverse(), &y.inverse()))
            .concat(&commutator(&x.inverse(), &y));
        assert_eq!(w.expected_presentation.relators()[0], reference.cyclic_reduce());
        assert_eq!(w.crossing_counts, Some(CrossingCounts { over: 2, under: 2 }));
        let u = catalog("unknot").unwrap();
        assert_eq!(u.expected_presentation.generator_count(), 1);
        assert!(u.crossing_counts.is_none());
        assert!(matches!(catalog("granny"), Err(DiagramError::UnknownName(_))));
    }

    #[test]
    fn crossing_counts_iff_two_components() {
        for name in CATALOG_NAMES {
            let e = catalog(name).unwrap();
            assert_eq!(e.crossing_counts.is_some(), e.pd.num_components() == 2, "{name}");
        }
    }

    /// Random valid codes: a random pairing of 2n label slots with explicit signs.
    fn random_pd() -> impl Strategy<Value = (Vec<RawCrossing>, usize)> {
        (1usize..7, 0usize..3).prop_flat_map(|(n, loops)| {
            let slots: Vec<usize> = (0..2 * n).flat_map(|l| [l + 1, l + 1]).collect();
            (Just(slots).prop_shuffle(), prop::collection::vec(any::<bool>(), n), Just(loops))
        }).prop_map(|(slots, signs, loops)| {
            let raw = slots
                .chunks(4)
                .zip(signs)
                .map(|(c, s)| RawCrossing {
                    labels: [c[0], c[1], c[2], c[3]],
                    sign: Some(if s { Sign::Positive } else { Sign::Negative }),
                })
                .collect();
            (raw, loops)
        })
    }

    proptest! {
        #[test]
        fn generator_count_is_wirtinger_arc_count((raw, loops) in random_pd()) {
            let pd = PDCode::from_parts(&raw, loops).unwrap();
            let p = wirtinger_presentation(&pd);
            prop_assert_eq!(p.generator_count(), pd.wirtinger_arc_count());
            prop_assert_eq!(p.relators().len(), pd.crossings().len());
            let comps = pd.num_components();
            for l in 1..=pd.arc_count() {
                prop_assert!(pd.component_of(l) < comps);
            }
        }

        #[test]
        fn serialize_round_trip((raw, loops) in random_pd()) {
            let pd = PDCode::from_parts(&raw, loops).unwrap();
            prop_assert_eq!(parse_pd(&pd.to_string()).unwrap(), pd);
        }
    }
}
