//! Approximate SU(2) targets by words in a two-generator representation.
//!
//! The search is exhaustive over freely reduced words up to a length bound.
//! Words of length `L` are split as `u·v` with `|u| = ⌈L/2⌉`; for each
//! prefix `u` the best suffix is a nearest-neighbour query for `±q_u⁻¹ t`
//! in a 4-d tree of suffix quaternions. A second pass re-evaluates every
//! pair within a small slack of the best distance with plain matrix
//! products, so the reported minimum and its tie-break do not depend on the
//! order of floating-point operations inside the search.
//!
//! Ties are broken lexicographically with `a < A < b < B`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{distance, Mat2, Quaternion};
use crate::fpgroup::{Letter, Word};
use crate::reps::{haar_quaternion, Representation, TOL_REP};

pub const MAX_LEN_LIMIT: usize = 24;
const CANDIDATE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("target is not in SU(2) (defect {0:e})")]
    TargetNotSU2(f64),
    #[error("max_len {0} exceeds the limit of {MAX_LEN_LIMIT}")]
    MaxLenTooLarge(usize),
    #[error("compilation needs a 2-generator representation, got {0}")]
    NotTwoGenerator(usize),
    #[error("representation residual {0:e} exceeds tolerance")]
    InvalidRepresentation(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileResult {
    pub word: Word,
    pub achieved: Mat2,
    pub dist: f64,
    pub explored: u64,
}

// letter codes: a = 0, A = 1, b = 2, B = 3 (so `c ^ 1` is the inverse)

fn letter_of(code: u8) -> Letter {
    Letter::new((code >> 1) as usize, code & 1 == 1)
}

/// Words of one length packed two bits per letter, first letter highest.
fn unpack(code: u64, len: usize) -> impl Iterator<Item = u8> {
    (0..len).map(move |i| ((code >> (2 * (len - 1 - i))) & 3) as u8)
}

fn first_letter(code: u64, len: usize) -> u8 {
    ((code >> (2 * (len - 1))) & 3) as u8
}

#[derive(Debug, Clone, Copy)]
struct Node {
    p: [f64; 4],
    id: u32,
}

/// Static 4-d tree stored as a median-ordered array.
#[derive(Debug, Clone, Default)]
struct KdTree {
    nodes: Vec<Node>,
}

fn dist2(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum()
}

impl KdTree {
    fn build(mut nodes: Vec<Node>) -> KdTree {
        fn rec(s: &mut [Node], depth: usize) {
            if s.len() <= 1 {
                return;
            }
            let axis = depth % 4;
            let mid = s.len() / 2;
            s.select_nth_unstable_by(mid, |x, y| x.p[axis].total_cmp(&y.p[axis]).then(x.id.cmp(&y.id)));
            let (left, right) = s.split_at_mut(mid);
            rec(left, depth + 1);
            rec(&mut right[1..], depth + 1);
        }
        rec(&mut nodes, 0);
        KdTree { nodes }
    }

    fn nearest(&self, q: &[f64; 4], best: &mut (f64, u32), visited: &mut u64) {
        fn rec(s: &[Node], depth: usize, q: &[f64; 4], best: &mut (f64, u32), visited: &mut u64) {
            if s.is_empty() {
                return;
            }
            let mid = s.len() / 2;
            let axis = depth % 4;
            *visited += 1;
            let d = dist2(&s[mid].p, q);
            if d < best.0 || (d == best.0 && s[mid].id < best.1) {
                *best = (d, s[mid].id);
            }
            let diff = q[axis] - s[mid].p[axis];
            let (near, far) = if diff < 0.0 { (&s[..mid], &s[mid + 1..]) } else { (&s[mid + 1..], &s[..mid]) };
            rec(near, depth + 1, q, best, visited);
            if diff * diff <= best.0 {
                rec(far, depth + 1, q, best, visited);
            }
        }
        rec(&self.nodes, 0, q, best, visited);
    }

    fn within(&self, q: &[f64; 4], r2: f64, out: &mut Vec<u32>, visited: &mut u64) {
        fn rec(s: &[Node], depth: usize, q: &[f64; 4], r2: f64, out: &mut Vec<u32>, visited: &mut u64) {
            if s.is_empty() {
                return;
            }
            let mid = s.len() / 2;
            let axis = depth % 4;
            *visited += 1;
            if dist2(&s[mid].p, q) <= r2 {
                out.push(s[mid].id);
            }
            let diff = q[axis] - s[mid].p[axis];
            if diff <= 0.0 || diff * diff <= r2 {
                rec(&s[..mid], depth + 1, q, r2, out, visited);
            }
            if diff >= 0.0 || diff * diff <= r2 {
                rec(&s[mid + 1..], depth + 1, q, r2, out, visited);
            }
        }
        rec(&self.nodes, 0, q, r2, out, visited);
    }
}

/// All freely reduced words of one length with their quaternions, plus
/// trees of the same words bucketed by first letter.
#[derive(Debug, Clone)]
struct Level {
    len: usize,
    codes: Vec<u64>,
    quats: Vec<Quaternion>,
    trees: Vec<KdTree>,
}

impl Level {
    /// Trees admissible after a prefix ending in `last` (`None`: any).
    fn trees_after(&self, last: Option<u8>) -> impl Iterator<Item = &KdTree> {
        let single = self.len == 0;
        self.trees.iter().enumerate().filter(move |(k, _)| single || last.is_none_or(|l| *k as u8 != l ^ 1)).map(|(_, t)| t)
    }
}

/// Precomputed word tables for repeated compilation against one
/// representation and length bound.
#[derive(Debug, Clone)]
pub struct Compiler {
    rep: Representation,
    max_len: usize,
    levels: Vec<Level>,
}

impl Compiler {
    pub fn new(rep: &Representation, max_len: usize) -> Result<Compiler, CompileError> {
        if rep.images().len() != 2 {
            return Err(CompileError::NotTwoGenerator(rep.images().len()));
        }
        if !(rep.residual() <= TOL_REP) {
            return Err(CompileError::InvalidRepresentation(rep.residual()));
        }
        if max_len > MAX_LEN_LIMIT {
            return Err(CompileError::MaxLenTooLarge(max_len));
        }
        let q = rep.quaternions();
        let letters = [q[0], q[0].conj(), q[1], q[1].conj()];
        let half = max_len.div_ceil(2);
        let mut levels: Vec<Level> = Vec::with_capacity(half + 1);
        let mut codes = vec![0u64];
        let mut quats = vec![Quaternion::ONE];
        for len in 0..=half {
            if len > 0 {
                let mut nc = Vec::with_capacity(codes.len() * 3);
                let mut nq = Vec::with_capacity(codes.len() * 3);
                for (c, qw) in codes.iter().zip(&quats) {
                    for l in 0u8..4 {
                        if len > 1 && (c & 3) as u8 == l ^ 1 {
                            continue;
                        }
                        nc.push((c << 2) | l as u64);
                        nq.push(*qw * letters[l as usize]);
                    }
                }
                codes = nc;
                quats = nq;
            }
            let buckets = if len == 0 { 1 } else { 4 };
            let mut groups: Vec<Vec<Node>> = vec![Vec::new(); buckets];
            for (i, (c, qw)) in codes.iter().zip(&quats).enumerate() {
                let b = if len == 0 { 0 } else { first_letter(*c, len) as usize };
                groups[b].push(Node { p: (*qw).into(), id: i as u32 });
            }
            let trees = groups.into_par_iter().map(KdTree::build).collect();
            levels.push(Level { len, codes: codes.clone(), quats: quats.clone(), trees });
        }
        Ok(Compiler { rep: rep.clone(), max_len, levels })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn letter_matrix(&self, code: u8) -> Mat2 {
        let m = self.rep.image((code >> 1) as usize);
        if code & 1 == 1 {
            m.adjoint()
        } else {
            m
        }
    }

    /// Continue the left-to-right product `acc · x₁ ⋯ x_len`.
    fn evaluate_packed(&self, code: u64, len: usize, acc: Mat2) -> Mat2 {
        unpack(code, len).fold(acc, |acc, c| acc * self.letter_matrix(c))
    }

    /// Closest freely reduced word of length at most `max_len`; stops after
    /// the first length tier whose best distance is at most `epsilon`.
    pub fn compile(&self, target: &Mat2, epsilon: f64) -> Result<CompileResult, CompileError> {
        let defect = target.su2_defect();
        if !(defect <= 1e-9) {
            return Err(CompileError::TargetNotSU2(defect));
        }
        let t = target.quaternion_part();
        let mut explored = 0u64;
        let mut best: Option<(f64, Vec<u8>, Mat2)> = None;

        for len in 0..=self.max_len {
            let (pl, sl) = (len.div_ceil(2), len / 2);
            let (prefix, suffix) = (&self.levels[pl], &self.levels[sl]);
            let queries = |i: usize| {
                let x: [f64; 4] = (prefix.quats[i].conj() * t).into();
                let neg = x.map(|v| -v);
                let last = if pl == 0 { None } else { Some((prefix.codes[i] & 3) as u8) };
                (x, neg, last)
            };

            let (tier_best, visited) = (0..prefix.codes.len())
                .into_par_iter()
                .map(|i| {
                    let (x, neg, last) = queries(i);
                    let mut b = (f64::INFINITY, u32::MAX);
                    let mut v = 0u64;
                    for tree in suffix.trees_after(last) {
                        tree.nearest(&x, &mut b, &mut v);
                        tree.nearest(&neg, &mut b, &mut v);
                    }
                    (b.0, v)
                })
                .reduce(|| (f64::INFINITY, 0), |a, b| (a.0.min(b.0), a.1 + b.1));
            explored += visited;

            let tier_dist = tier_best.sqrt();
            if best.as_ref().is_none_or(|(d, _, _)| tier_dist <= *d + CANDIDATE_SLACK) {
                let r = tier_dist + CANDIDATE_SLACK;
                let r2 = r * r;
                // within a tier all words share the split, so lexicographic
                // order is the order of (prefix code, suffix code)
                let (tier_min, visited) = (0..prefix.codes.len())
                    .into_par_iter()
                    .map(|i| {
                        let (x, neg, last) = queries(i);
                        let mut ids = Vec::new();
                        let mut v = 0u64;
                        for tree in suffix.trees_after(last) {
                            tree.within(&x, r2, &mut ids, &mut v);
                            tree.within(&neg, r2, &mut ids, &mut v);
                        }
                        if ids.is_empty() {
                            return (None, v);
                        }
                        let m_u = self.evaluate_packed(prefix.codes[i], pl, Mat2::identity());
                        let local = ids
                            .into_iter()
                            .map(|id| {
                                let scode = suffix.codes[id as usize];
                                let m = self.evaluate_packed(scode, sl, m_u);
                                (distance(&m, target), prefix.codes[i], scode, m)
                            })
                            .min_by(tier_order);
                        (local, v)
                    })
                    .reduce(
                        || (None, 0),
                        |a, b| {
                            let m = match (a.0, b.0) {
                                (Some(x), Some(y)) => Some(if tier_order(&x, &y).is_le() { x } else { y }),
                                (x, y) => x.or(y),
                            };
                            (m, a.1 + b.1)
                        },
                    );
                explored += visited;
                if let Some((d, pcode, scode, m)) = tier_min {
                    let codes: Vec<u8> = unpack(pcode, pl).chain(unpack(scode, sl)).collect();
                    let better = match &best {
                        None => true,
                        Some((bd, w, _)) => d < *bd || (d == *bd && codes < *w),
                    };
                    if better {
                        best = Some((d, codes, m));
                    }
                }
            }
            if best.as_ref().is_some_and(|(d, _, _)| *d <= epsilon) {
                break;
            }
        }

        let (dist, codes, achieved) = best.expect("the empty word is always a candidate");
        Ok(CompileResult { word: Word(codes.iter().map(|&c| letter_of(c)).collect()), achieved, dist, explored })
    }
}

type Scored = (f64, u64, u64, Mat2);

fn tier_order(x: &Scored, y: &Scored) -> std::cmp::Ordering {
    x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2))
}

/// One-shot [`Compiler::compile`].
pub fn compile_word(rep: &Representation, target: &Mat2, max_len: usize, epsilon: f64) -> Result<CompileResult, CompileError> {
    Compiler::new(rep, max_len)?.compile(target, epsilon)
}

/// Targets drawn from a ChaCha8 stream: four standard normals, normalized.
pub fn haar_targets(samples: usize, seed: u64) -> Vec<Mat2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| haar_quaternion(&mut rng).to_matrix()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub epsilon: f64,
    pub max_len: usize,
    pub sample_count: usize,
    pub covered_fraction: f64,
    pub seed: u64,
    pub median_dist: f64,
}

/// Fraction of Haar-random targets reachable within `epsilon`.
pub fn coverage(rep: &Representation, epsilon: f64, max_len: usize, samples: usize, seed: u64) -> Result<CoverageReport, CompileError> {
    let compiler = Compiler::new(rep, max_len)?;
    let targets = haar_targets(samples, seed);
    let mut dists = targets
        .par_iter()
        .map(|t| compiler.compile(t, epsilon).map(|r| r.dist))
        .collect::<Result<Vec<f64>, _>>()?;
    let covered = dists.iter().filter(|&&d| d <= epsilon).count();
    dists.sort_by(f64::total_cmp);
    let median_dist = if dists.is_empty() { f64::NAN } else { dists[dists.len() / 2] };
    Ok(CoverageReport {
        epsilon,
        max_len,
        sample_count: samples,
        covered_fraction: if samples == 0 { 0.0 } else { covered as f64 / samples as f64 },
        seed,
        median_dist,
    })
}
