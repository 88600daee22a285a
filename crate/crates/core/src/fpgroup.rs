//! Words, finitely presented groups, and the Tietze moves used to bring
//! Wirtinger presentations down to two-generator form.
//!
//! Word syntax: a lowercase letter is a generator (`a` = generator 0),
//! the uppercase letter is its inverse, and generators beyond the alphabet
//! are written `g26` / `G26`. The empty string is the identity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed word {word:?} at byte {pos}")]
    MalformedWord { word: String, pos: usize },
    #[error("generator index {index} out of range for {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("relator index {index} out of range for {count} relators")]
    RelatorOutOfRange { index: usize, count: usize },
    #[error("relator {relator} cannot be solved for generator {generator}")]
    NotSolvable { generator: usize, relator: usize },
    #[error("braid group needs at least 2 strands, got {0}")]
    TooFewStrands(usize),
}

/// One letter of a word: a generator or its inverse.
///
/// The derived order is `a < A < b < B < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub const fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }

    pub fn exponent(self) -> i8 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen < 26 {
            let c = (b'a' + self.gen as u8) as char;
            let c = if self.inv { c.to_ascii_uppercase() } else { c };
            write!(f, "{c}")
        } else if self.inv {
            write!(f, "G{}", self.gen)
        } else {
            write!(f, "g{}", self.gen)
        }
    }
}

/// A word in the generators, exponents ±1 only.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![Letter::new(g, false)])
    }

    pub fn gen_inv(g: usize) -> Self {
        Word(vec![Letter::new(g, true)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Concatenation without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.iter().copied().cycle().take(self.len() * n).collect())
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    pub fn free_reduce(&self) -> Word {
        free_reduce(self)
    }

    /// Freely and cyclically reduced form.
    pub fn cyclic_reduce(&self) -> Word {
        let w = free_reduce(self);
        let letters = &w.0;
        let mut lo = 0;
        let mut hi = letters.len();
        while hi - lo >= 2 && letters[lo].cancels(letters[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        Word(letters[lo..hi].to_vec())
    }

    /// `self` rotated left by `k` letters.
    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let n = v.len();
            v.rotate_left(k % n);
        }
        Word(v)
    }

    pub fn occurrences(&self, g: usize) -> usize {
        self.0.iter().filter(|l| l.gen == g).count()
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    /// Replace every occurrence of `g` by `w` (and `g⁻¹` by `w⁻¹`); no reduction.
    pub fn substitute(&self, g: usize, w: &Word) -> Word {
        let w_inv = w.inverse();
        let mut out = Vec::with_capacity(self.len());
        for l in &self.0 {
            if l.gen == g {
                out.extend_from_slice(if l.inv { &w_inv.0 } else { &w.0 });
            } else {
                out.push(*l);
            }
        }
        Word(out)
    }

    /// Shift generator indices above `removed` down by one.
    fn drop_generator_index(&self, removed: usize) -> Word {
        Word(
            self.0
                .iter()
                .map(|l| if l.gen > removed { Letter::new(l.gen - 1, l.inv) } else { *l })
                .collect(),
        )
    }

    pub fn relabel(&self, map: &[(usize, bool)]) -> Word {
        Word(self.0.iter().map(|l| {
            let (g, flip) = map[l.gen];
            Letter::new(g, l.inv ^ flip)
        }).collect())
    }

    /// Least representative of the class of `self` under cyclic rotation and
    /// inversion, after cyclic reduction.
    pub fn canonical_relator(&self) -> Word {
        let r = self.cyclic_reduce();
        let ri = r.inverse();
        let n = r.len();
        let mut best = r.clone();
        for k in 0..n.max(1) {
            for cand in [r.rotate(k), ri.rotate(k)] {
                if cand < best {
                    best = cand;
                }
            }
        }
        best
    }

    pub fn parse(s: &str) -> Result<Word, GroupError> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut out = Vec::new();
        let err = |pos| GroupError::MalformedWord { word: s.to_string(), pos };
        while pos < bytes.len() {
            let c = bytes[pos];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' | b'.' | b'*' => pos += 1,
                b'g' | b'G' if pos + 1 < bytes.len() && bytes[pos + 1].is_ascii_digit() => {
                    let start = pos + 1;
                    let mut end = start;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                    let index: usize = s[start..end].parse().map_err(|_| err(start))?;
                    out.push(Letter::new(index, c == b'G'));
                    pos = end;
                }
                b'a'..=b'z' => {
                    out.push(Letter::new((c - b'a') as usize, false));
                    pos += 1;
                }
                b'A'..=b'Z' => {
                    out.push(Letter::new((c - b'A') as usize, true));
                    pos += 1;
                }
                _ => return Err(err(pos)),
            }
        }
        Ok(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl TryFrom<String> for Word {
    type Error = GroupError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Word::parse(&s)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl std::str::FromStr for Word {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

/// Cancel adjacent inverse pairs until none remain.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.0 {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word(stack)
}

/// `[x, y] = x y x⁻¹ y⁻¹`, freely reduced.
pub fn commutator(x: &Word, y: &Word) -> Word {
    free_reduce(&x.concat(y).concat(&x.inverse()).concat(&y.inverse()))
}

/// True when `u` and `v` agree after cyclic reduction, up to rotation and
/// inversion.
pub fn equivalent_relator(u: &Word, v: &Word) -> bool {
    let (u, v) = (u.cyclic_reduce(), v.cyclic_reduce());
    u.len() == v.len() && u.canonical_relator() == v.canonical_relator()
}

// ---------------------------------------------------------------------------

/// A finitely presented group `⟨generators | relators⟩`.
///
/// Relators are kept freely and cyclically reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPresentation")]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

#[derive(Deserialize)]
struct RawPresentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl TryFrom<RawPresentation> for Presentation {
    type Error = GroupError;
    fn try_from(raw: RawPresentation) -> Result<Self, GroupError> {
        Presentation::new(raw.generators, raw.relators)
    }
}

/// Default generator names: `a, b, c, ...`, then `g26, g27, ...`.
pub fn default_generator_names(n: usize) -> Vec<String> {
    (0..n).map(|i| Letter::new(i, false).to_string()).collect()
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, GroupError> {
        let count = generators.len();
        for r in &relators {
            if let Some(g) = r.max_gen().filter(|&g| g >= count) {
                return Err(GroupError::GeneratorOutOfRange { index: g, count });
            }
        }
        let relators = relators.iter().map(Word::cyclic_reduce).collect();
        Ok(Presentation { generators, relators })
    }

    /// Presentation with default generator names.
    pub fn with_generators(n: usize, relators: Vec<Word>) -> Result<Self, GroupError> {
        Presentation::new(default_generator_names(n), relators)
    }

    /// Parse relators in word syntax.
    pub fn parse(n: usize, relators: &[&str]) -> Result<Self, GroupError> {
        let words = relators.iter().map(|r| Word::parse(r)).collect::<Result<Vec<_>, _>>()?;
        Presentation::with_generators(n, words)
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// Drop trivial relators and relators equivalent to an earlier one.
    pub fn dedup_relators(&self) -> Presentation {
        let mut kept: Vec<Word> = Vec::new();
        let mut seen: Vec<Word> = Vec::new();
        for r in &self.relators {
            if r.is_empty() {
                continue;
            }
            let c = r.canonical_relator();
            if !seen.contains(&c) {
                seen.push(c);
                kept.push(r.clone());
            }
        }
        Presentation { generators: self.generators.clone(), relators: kept }
    }

    /// Index of the first relator that contains `g` exactly once.
    pub fn solvable_relator(&self, g: usize) -> Option<usize> {
        self.relators.iter().position(|r| r.occurrences(g) == 1)
    }

    /// Repeatedly eliminate the highest-indexed solvable generator, dropping
    /// trivial and duplicate relators after every move.
    pub fn simplify(&self) -> Presentation {
        let mut p = self.dedup_relators();
        loop {
            let next = (0..p.generator_count())
                .rev()
                .find_map(|g| p.solvable_relator(g).map(|r| (g, r)));
            match next {
                Some((g, r)) => {
                    p = eliminate_generator(&p, g, r).expect("solvable relator was located");
                }
                None => return p,
            }
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{} | ", self.generators.join(","))?;
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        write!(f, "{}>", rels.join(", "))
    }
}

/// Tietze move: solve relator `relator` for generator `g` and substitute the
/// solution everywhere else.
pub fn eliminate_generator(p: &Presentation, g: usize, relator: usize) -> Result<Presentation, GroupError> {
    let count = p.generator_count();
    if g >= count {
        return Err(GroupError::GeneratorOutOfRange { index: g, count });
    }
    let r = p.relators.get(relator).ok_or(GroupError::RelatorOutOfRange {
        index: relator,
        count: p.relators.len(),
    })?;
    if r.occurrences(g) != 1 {
        return Err(GroupError::NotSolvable { generator: g, relator });
    }
    let at = r.0.iter().position(|l| l.gen == g).expect("occurrence counted above");
    let rotated = r.rotate(at);
    // rotated = g^e · rest = 1, so g = rest⁻¹ (e = +1) or g = rest (e = -1)
    let rest = Word(rotated.0[1..].to_vec());
    let solution = if rotated.0[0].inv { rest } else { rest.inverse() };

    let mut out = Presentation {
        generators: p.generators.iter().enumerate().filter(|&(i, _)| i != g).map(|(_, n)| n.clone()).collect(),
        relators: Vec::new(),
    };
    for (j, other) in p.relators.iter().enumerate() {
        if j == relator {
            continue;
        }
        let w = other.substitute(g, &solution).cyclic_reduce().drop_generator_index(g);
        out.relators.push(w);
    }
    Ok(out.dedup_relators())
}

/// Artin presentation of the braid group on `n` strands.
pub fn braid_presentation(n: usize) -> Result<Presentation, GroupError> {
    if n < 2 {
        return Err(GroupError::TooFewStrands(n));
    }
    let gens = n - 1;
    let names = (1..=gens).map(|i| format!("s{i}")).collect();
    let mut rels = Vec::new();
    for i in 0..gens.saturating_sub(1) {
        let (a, b) = (Word::gen(i), Word::gen(i + 1));
        let lhs = a.concat(&b).concat(&a);
        let rhs = b.concat(&a).concat(&b);
        rels.push(lhs.concat(&rhs.inverse()));
    }
    for i in 0..gens {
        for j in (i + 2)..gens {
            rels.push(commutator(&Word::gen(i), &Word::gen(j)));
        }
    }
    Presentation::new(names, rels)
}

/// True when `q` becomes `p` (relators matched one-to-one via
/// [`equivalent_relator`]) under some permutation of generators, optionally
/// also inverting individual generators.
///
/// Exhaustive over relabelings, so only intended for small generator counts.
pub fn equivalent_up_to_renaming(p: &Presentation, q: &Presentation, allow_inversion: bool) -> bool {
    let n = p.generator_count();
    if n != q.generator_count() || p.relators.len() != q.relators.len() {
        return false;
    }
    let target: Vec<Word> = {
        let mut v: Vec<Word> = p.relators.iter().map(Word::canonical_relator).collect();
        v.sort();
        v
    };
    let flips: Vec<u32> = if allow_inversion { (0..(1u32 << n)).collect() } else { vec![0] };
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        for &mask in &flips {
            let map: Vec<(usize, bool)> = perm.iter().enumerate().map(|(i, &g)| (g, mask >> i & 1 == 1)).collect();
            let mut mapped: Vec<Word> = q.relators.iter().map(|r| r.relabel(&map).canonical_relator()).collect();
            mapped.sort();
            if mapped == target {
                return true;
            }
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(free_reduce(&w("aAb")), w("b"));
        assert_eq!(free_reduce(&Word::identity()), Word::identity());
        assert_eq!(free_reduce(&w("babABA")), w("babABA"));
        assert_eq!(free_reduce(&w("abBA")), Word::identity());
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator(&w("a"), &w("b")), w("abAB"));
        assert_eq!(commutator(&w("a"), &w("a")), Word::identity());
        assert_eq!(commutator(&w("x"), &w("Y")), w("xYXy"));
    }

    /// Oracle: enumerate every rotation of `u` and of `u⁻¹` directly.
    fn rotation_oracle(u: &Word, v: &Word) -> bool {
        let (u, v) = (u.cyclic_reduce(), v.cyclic_reduce());
        if u.len() != v.len() {
            return false;
        }
        if u.is_empty() {
            return true;
        }
        let ui = u.inverse();
        (0..u.len()).any(|k| u.rotate(k) == v || ui.rotate(k) == v)
    }

    #[test]
    fn equivalent_relator_examples() {
        assert!(equivalent_relator(&w("babABA"), &w("abaBAB")));
        assert!(rotation_oracle(&w("babABA"), &w("abaBAB")));
        assert!(equivalent_relator(&Word::identity(), &Word::identity()));
        assert!(!equivalent_relator(&w("abAB"), &w("abab")));
        assert!(!rotation_oracle(&w("abAB"), &w("abab")));
    }

    #[test]
    fn word_syntax() {
        assert_eq!(w("g27G3a").0, vec![Letter::new(27, false), Letter::new(3, true), Letter::new(0, false)]);
        assert_eq!(Word(vec![Letter::new(30, true), Letter::new(1, false)]).to_string(), "G30b");
        assert!(Word::parse("ab!").is_err());
        assert_eq!(w(""), Word::identity());
    }

    #[test]
    fn cyclic_reduce_strips_conjugation() {
        assert_eq!(w("abcBA").cyclic_reduce(), w("c"));
        assert_eq!(w("aA").cyclic_reduce(), Word::identity());
    }

    #[test]
    fn trefoil_elimination_matches_hand_computation() {
        // c = a⁻¹ba, b = c⁻¹ac, a = b⁻¹cb
        let p = Presentation::parse(3, &["CAba", "BCac", "ABcb"]).unwrap();
        let out = eliminate_generator(&p, 2, 0).unwrap();
        assert_eq!(out.generator_count(), 2);
        assert_eq!(out.relators().len(), 1, "second relator must be dropped: {out}");
        assert!(equivalent_relator(&out.relators()[0], &w("babABA")));
    }

    #[test]
    fn elimination_errors() {
        let p = Presentation::parse(3, &["abAB"]).unwrap();
        assert!(matches!(eliminate_generator(&p, 2, 0), Err(GroupError::NotSolvable { .. })));
        assert!(matches!(eliminate_generator(&p, 0, 0), Err(GroupError::NotSolvable { .. })));
        assert!(matches!(eliminate_generator(&p, 5, 0), Err(GroupError::GeneratorOutOfRange { .. })));
        assert!(matches!(eliminate_generator(&p, 0, 3), Err(GroupError::RelatorOutOfRange { .. })));
    }

    #[test]
    fn braid_presentations() {
        let b3 = braid_presentation(3).unwrap();
        assert_eq!(b3.relators(), &[w("abaBAB")]);
        let b2 = braid_presentation(2).unwrap();
        assert_eq!(b2.generator_count(), 1);
        assert!(b2.relators().is_empty());
        let b4 = braid_presentation(4).unwrap();
        assert_eq!(b4.generator_count(), 3);
        assert_eq!(b4.relators().len(), 3);
        assert_eq!(b4.relators()[2], w("acAC"));
        assert!(matches!(braid_presentation(1), Err(GroupError::TooFewStrands(1))));
    }

    #[test]
    fn renaming_equivalence() {
        let p = Presentation::parse(2, &["babABA"]).unwrap();
        let q = Presentation::parse(2, &["abaBAB"]).unwrap();
        assert!(equivalent_up_to_renaming(&p, &q, false));
        let fig8 = Presentation::parse(2, &["baBabABaBA"]).unwrap();
        assert!(!equivalent_up_to_renaming(&p, &fig8, true));
    }

    #[test]
    fn presentation_rejects_out_of_range() {
        assert!(Presentation::parse(1, &["ab"]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let p = Presentation::parse(2, &["babABA"]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"generators":["a","b"],"relators":["babABA"]}"#);
        let back: Presentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    fn word_strategy(gens: usize, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..gens, any::<bool>()), 0..max_len)
            .prop_map(|v| Word(v.into_iter().map(|(g, i)| Letter::new(g, i)).collect()))
    }

    proptest! {
        #[test]
        fn free_reduce_idempotent_and_shrinking(u in word_strategy(3, 30)) {
            let r = free_reduce(&u);
            prop_assert!(r.len() <= u.len());
            prop_assert!(r.is_freely_reduced());
            prop_assert_eq!(free_reduce(&r), r);
        }

        #[test]
        fn equivalent_relator_agrees_with_oracle(u in word_strategy(2, 8), v in word_strategy(2, 8)) {
            prop_assert_eq!(equivalent_relator(&u, &v), rotation_oracle(&u, &v));
        }

        #[test]
        fn equivalent_relator_is_an_equivalence(u in word_strategy(2, 8), k in 0usize..8, inv in any::<bool>(), v in word_strategy(2, 8)) {
            let u = u.cyclic_reduce();
            prop_assert!(equivalent_relator(&u, &u));
            let mut t = u.rotate(k);
            if inv { t = t.inverse(); }
            prop_assert!(equivalent_relator(&u, &t));
            prop_assert!(equivalent_relator(&t, &u));
            let s = t.inverse().rotate(k / 2);
            prop_assert!(equivalent_relator(&u, &s));
            prop_assert_eq!(equivalent_relator(&u, &v), equivalent_relator(&t, &v));
        }

        #[test]
        fn word_syntax_round_trip(u in word_strategy(40, 20)) {
            prop_assert_eq!(Word::parse(&u.to_string()).unwrap(), u);
        }
    }
}
