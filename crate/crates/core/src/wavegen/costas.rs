//! Costas permutations: verification, seeded search and algebraic
//! constructions.
//!
//! Orders up to [`BACKTRACK_MAX_ORDER`] are found by randomized backtracking.
//! Larger orders are drawn from the Welch (prime p) and Golomb (prime power q)
//! families, closed under removing or adding corner dots and under the eight
//! symmetries of the square. Every result passes [`verify_costas`].

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gf::{gcd, prime_power, FiniteField};
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 26;
pub const BACKTRACK_MAX_ORDER: usize = 12;

/// A permutation of `1..=order` in row order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CostasPermutation {
    perm: Vec<usize>,
}

impl CostasPermutation {
    /// Accepts any permutation of `1..=n`; use [`verify_costas`] to test the
    /// Costas property.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        check_permutation(&perm)?;
        Ok(Self { perm })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn order(&self) -> usize {
        self.perm.len()
    }
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    if n == 0 {
        return Err(Error::NotPermutation {
            order: 0,
            detail: "empty".into(),
        });
    }
    let mut seen = vec![false; n + 1];
    for &v in perm {
        if v == 0 || v > n {
            return Err(Error::NotPermutation {
                order: n,
                detail: format!("value {v} out of range"),
            });
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::NotPermutation {
                order: n,
                detail: format!("value {v} repeated"),
            });
        }
    }
    Ok(())
}

fn is_costas(perm: &[usize]) -> bool {
    let n = perm.len();
    // for a fixed row gap the column differences must be distinct
    let mut seen = vec![usize::MAX; 2 * n + 1];
    for gap in 1..n {
        for i in 0..n - gap {
            let d = perm[i + gap] + n - perm[i];
            if seen[d] == gap {
                return false;
            }
            seen[d] = gap;
        }
    }
    true
}

/// True iff all displacement vectors `(j - i, perm[j] - perm[i])`, `i < j`,
/// are pairwise distinct.
pub fn verify_costas(perm: &CostasPermutation) -> bool {
    is_costas(&perm.perm)
}

/// Checks an arbitrary slice, rejecting non-permutations.
pub fn verify_costas_slice(perm: &[usize]) -> Result<bool> {
    check_permutation(perm)?;
    Ok(is_costas(perm))
}

/// Finds a Costas permutation of `order`, deterministically for a given seed.
pub fn gen_costas_perm(order: usize, seed: u64) -> Result<CostasPermutation> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(Error::invalid(format!("Costas order must be in 2..={MAX_ORDER}, got {order}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perm = if order <= BACKTRACK_MAX_ORDER {
        backtrack(order, &mut rng, u64::MAX)
    } else {
        let candidates = algebraic_family(order);
        if candidates.is_empty() {
            backtrack(order, &mut rng, 200_000_000)
        } else {
            let pick = rng.gen_range(0..candidates.len());
            candidates.into_iter().nth(pick)
        }
    };
    let perm = perm.ok_or(Error::CostasSearchExhausted { order })?;
    debug_assert!(is_costas(&perm));
    Ok(CostasPermutation { perm })
}

/// Depth-first search with a shuffled value order at every row.
fn backtrack(order: usize, rng: &mut impl Rng, node_budget: u64) -> Option<Vec<usize>> {
    struct Search<'a, R> {
        n: usize,
        perm: Vec<usize>,
        used: Vec<bool>,
        // diffs[gap][d + n] marks difference d already seen at that row gap
        diffs: Vec<Vec<bool>>,
        rng: &'a mut R,
        budget: u64,
    }

    impl<R: Rng> Search<'_, R> {
        fn place(&mut self) -> bool {
            let row = self.perm.len();
            if row == self.n {
                return true;
            }
            let mut values: Vec<usize> = (1..=self.n).filter(|&v| !self.used[v]).collect();
            values.shuffle(self.rng);
            for v in values {
                if self.budget == 0 {
                    return false;
                }
                self.budget -= 1;
                let ok = (0..row).all(|i| !self.diffs[row - i][v + self.n - self.perm[i]]);
                if !ok {
                    continue;
                }
                for i in 0..row {
                    self.diffs[row - i][v + self.n - self.perm[i]] = true;
                }
                self.used[v] = true;
                self.perm.push(v);
                if self.place() {
                    return true;
                }
                self.perm.pop();
                self.used[v] = false;
                for i in 0..row {
                    self.diffs[row - i][v + self.n - self.perm[i]] = false;
                }
            }
            false
        }
    }

    let mut search = Search {
        n: order,
        perm: Vec::with_capacity(order),
        used: vec![false; order + 1],
        diffs: vec![vec![false; 2 * order + 1]; order],
        rng,
        budget: node_budget,
    };
    search.place().then_some(search.perm)
}

/// Welch exponential arrays of order p-1: `perm[i] = g^(i+shift) mod p`.
fn welch(p: u32) -> Vec<Vec<usize>> {
    if p < 3 || prime_power(p) != Some((p, 1)) {
        return Vec::new();
    }
    let Some(field) = FiniteField::new(p) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for e in field.primitive_exponents() {
        for shift in 0..p - 1 {
            out.push(
                (0..p - 1)
                    .map(|i| field.pow_gen(e as u64 * (i + shift) as u64) as usize)
                    .collect(),
            );
        }
    }
    out
}

/// Golomb arrays of order q-2: dot at (i, j) iff `a^i + b^j = 1`.
fn golomb(q: u32) -> Vec<Vec<usize>> {
    let Some(field) = FiniteField::new(q) else {
        return Vec::new();
    };
    if q < 4 {
        return Vec::new();
    }
    let m = q - 1;
    let prims = field.primitive_exponents();
    let mut out = Vec::new();
    for &a in &prims {
        for &b in &prims {
            // b * b_inv = 1 mod (q-1)
            let b_inv = (1..m).find(|x| (b as u64 * *x as u64) % m as u64 == 1).unwrap();
            debug_assert_eq!(gcd(b, m), 1);
            let perm = (1..=q - 2)
                .map(|i| {
                    let ai = field.pow_gen(a as u64 * i as u64);
                    let v = field.sub(field.one(), ai);
                    ((field.log(v) as u64 * b_inv as u64) % m as u64) as usize
                })
                .collect();
            out.push(perm);
        }
    }
    out
}

fn strip_corners(perm: &[usize]) -> Vec<Vec<usize>> {
    let n = perm.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    if perm[0] == 1 {
        out.push(perm[1..].iter().map(|v| v - 1).collect());
    }
    if perm[0] == n {
        out.push(perm[1..].to_vec());
    }
    if perm[n - 1] == 1 {
        out.push(perm[..n - 1].iter().map(|v| v - 1).collect());
    }
    if perm[n - 1] == n {
        out.push(perm[..n - 1].to_vec());
    }
    out
}

fn add_corners(perm: &[usize]) -> Vec<Vec<usize>> {
    let n = perm.len();
    let shifted: Vec<usize> = perm.iter().map(|v| v + 1).collect();
    let candidates = [
        std::iter::once(1).chain(shifted.iter().copied()).collect::<Vec<_>>(),
        std::iter::once(n + 1).chain(perm.iter().copied()).collect(),
        shifted.iter().copied().chain(std::iter::once(1)).collect(),
        perm.iter().copied().chain(std::iter::once(n + 1)).collect(),
    ];
    candidates.into_iter().filter(|c| is_costas(c)).collect()
}

fn symmetries(perm: &[usize]) -> [Vec<usize>; 8] {
    let n = perm.len();
    let flip_rows = |p: &[usize]| p.iter().rev().copied().collect::<Vec<_>>();
    let flip_cols = |p: &[usize]| p.iter().map(|v| n + 1 - v).collect::<Vec<_>>();
    let transpose = |p: &[usize]| {
        let mut t = vec![0; n];
        for (i, &v) in p.iter().enumerate() {
            t[v - 1] = i + 1;
        }
        t
    };
    let t = transpose(perm);
    [
        perm.to_vec(),
        flip_rows(perm),
        flip_cols(perm),
        flip_rows(&flip_cols(perm)),
        t.clone(),
        flip_rows(&t),
        flip_cols(&t),
        flip_rows(&flip_cols(&t)),
    ]
}

/// All constructible Costas permutations of `order`, in a canonical order.
pub(crate) fn algebraic_family(order: usize) -> BTreeSet<Vec<usize>> {
    let mut bases: Vec<Vec<usize>> = Vec::new();
    // base sizes order-1 ..= order+3 cover corner addition and up to three strips
    for size in order.saturating_sub(1)..=order + 3 {
        bases.extend(welch(size as u32 + 1));
        bases.extend(golomb(size as u32 + 2));
    }

    let mut found = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<Vec<usize>> = Vec::new();
    for b in &bases {
        if b.len() + 1 == order {
            for grown in add_corners(b) {
                stack.push(grown);
            }
        }
        stack.push(b.clone());
    }
    while let Some(p) = stack.pop() {
        if p.len() < order || !seen.insert(p.clone()) {
            continue;
        }
        if p.len() == order {
            for s in symmetries(&p) {
                found.insert(s);
            }
        } else {
            for s in symmetries(&p) {
                stack.extend(strip_corners(&s));
            }
        }
    }
    found
}
