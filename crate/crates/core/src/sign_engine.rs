//! Mod-2 sign exponents and exhaustive checks of the composite sign identities.
//!
//! Every exponent is returned as a [`Parity`]; signs are combined by XOR and only
//! turned into `±1` at the point where an integer coefficient is multiplied.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{BitXor, BitXorAssign};

/// An element of `Z/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub struct Parity(bool);

impl Parity {
    pub const EVEN: Parity = Parity(false);
    pub const ODD: Parity = Parity(true);

    /// Reduction of an integer mod 2 (negative values allowed).
    pub fn of(x: i64) -> Parity {
        Parity(x.rem_euclid(2) == 1)
    }

    pub fn is_odd(self) -> bool {
        self.0
    }

    /// `(-1)^self`.
    pub fn sign(self) -> i64 {
        if self.0 {
            -1
        } else {
            1
        }
    }
}

impl BitXor for Parity {
    type Output = Parity;
    fn bitxor(self, rhs: Parity) -> Parity {
        Parity(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for Parity {
    fn bitxor_assign(&mut self, rhs: Parity) {
        self.0 ^= rhs.0;
    }
}

impl From<Parity> for u8 {
    fn from(p: Parity) -> u8 {
        p.0 as u8
    }
}

impl TryFrom<u8> for Parity {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Parity::EVEN),
            1 => Ok(Parity::ODD),
            _ => Err(format!("parity must be 0 or 1, got {v}")),
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 as u8)
    }
}

fn check_partition(parts: &[usize], d: usize) -> Result<()> {
    if parts.is_empty() || parts.contains(&0) {
        return Err(Error::MalformedPartition(format!("{parts:?}: parts must be positive")));
    }
    let total: usize = parts.iter().sum();
    if total != d {
        return Err(Error::MalformedPartition(format!("{parts:?} sums to {total}, arity is {d}")));
    }
    Ok(())
}

fn check_split(mu: &[i64], d: usize, n: usize, m: usize) -> Result<()> {
    if mu.len() != d {
        return Err(Error::IndexRange(format!("degree tuple has length {}, arity is {d}", mu.len())));
    }
    if m == 0 || n + m > d {
        return Err(Error::IndexRange(format!("n = {n}, m = {m} not valid for arity {d}")));
    }
    Ok(())
}

/// `† = Σ i·μ(xⁱ)` with 1-based `i`.
pub fn dagger(mu: &[i64]) -> Parity {
    Parity::of(weighted_sum(mu, 1))
}

/// `Σ (i + offset)·μᵢ` over 1-based `i`.
fn weighted_sum(mu: &[i64], offset: i64) -> i64 {
    mu.iter()
        .enumerate()
        .map(|(i, &x)| (i as i64 + offset) * x)
        .sum()
}

/// `‡ₙ = Σ_{i≤n} μᵢ − n`.
pub fn ddagger(mu: &[i64], n: usize) -> Result<Parity> {
    if n > mu.len() {
        return Err(Error::IndexRange(format!("n = {n} exceeds arity {}", mu.len())));
    }
    let s: i64 = mu[..n].iter().sum();
    Ok(Parity::of(s - n as i64))
}

/// `♠ = Σ j·μ(xʲ) + k`.
pub fn spade(mu: &[i64], k: usize) -> Parity {
    dagger(mu) ^ Parity::of(k as i64)
}

/// The two readings of the index in the second sum of `♣`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClubReading {
    /// `Σ_{ℓ<i} s_ℓ`: the parts strictly before the marked one.
    PartialSum,
    /// `(i−1)·s_r`: the last part repeated.
    LastPart,
}

/// `♣ = Σ_{ℓ ≤ s₁+…+s_{i−1}} μ(x^ℓ) − Σ_{ℓ<i} s_ℓ` for a 1-based marked index `i`.
pub fn club(mu: &[i64], parts: &[usize], i: usize) -> Result<Parity> {
    club_with(mu, parts, i, ClubReading::PartialSum)
}

pub fn club_with(mu: &[i64], parts: &[usize], i: usize, reading: ClubReading) -> Result<Parity> {
    check_partition(parts, mu.len())?;
    if i == 0 || i > parts.len() {
        return Err(Error::IndexRange(format!("marked index {i} not in 1..={}", parts.len())));
    }
    let cut: usize = parts[..i - 1].iter().sum();
    let degrees: i64 = mu[..cut].iter().sum();
    let shift = match reading {
        ClubReading::PartialSum => cut as i64,
        ClubReading::LastPart => (i as i64 - 1) * *parts.last().unwrap() as i64,
    };
    Ok(Parity::of(degrees - shift))
}

fn tail_sum(mu: &[i64], n: usize, m: usize) -> i64 {
    mu[n + m..].iter().sum()
}

/// `■_𝔪 = m(d−m−1) + m·Σ_{k>n+m} μ(xᵏ)`.
pub fn square_m(mu: &[i64], d: usize, n: usize, m: usize) -> Result<Parity> {
    check_split(mu, d, n, m)?;
    let (d, m_) = (d as i64, m as i64);
    Ok(Parity::of(m_ * (d - m_ - 1) + m_ * tail_sum(mu, n, m)))
}

/// `▲ = m(d−n) + m + n`.
pub fn triangle(d: usize, n: usize, m: usize) -> Result<Parity> {
    if m == 0 || n + m > d {
        return Err(Error::IndexRange(format!("n = {n}, m = {m} not valid for arity {d}")));
    }
    let (d, n, m) = (d as i64, n as i64, m as i64);
    Ok(Parity::of(m * (d - n) + m + n))
}

/// `■_𝔣 = m(d−m) + m·Σ_{k>n+m} μ(xᵏ)`.
pub fn square_f(mu: &[i64], d: usize, n: usize, m: usize) -> Result<Parity> {
    check_split(mu, d, n, m)?;
    let (d, m_) = (d as i64, m as i64);
    Ok(Parity::of(m_ * (d - m_) + m_ * tail_sum(mu, n, m)))
}

/// Degrees `μ(yʲ) = Σ_{block j} μ + sⱼ − 1` of the outputs of the blocks of a partition.
pub fn block_output_degrees(mu: &[i64], parts: &[usize]) -> Result<Vec<i64>> {
    check_partition(parts, mu.len())?;
    let mut out = Vec::with_capacity(parts.len());
    let mut pos = 0;
    for &s in parts {
        let block: i64 = mu[pos..pos + s].iter().sum();
        out.push(block + s as i64 - 1);
        pos += s;
    }
    Ok(out)
}

fn sum_ordered_pairs(sp: &[i64]) -> i64 {
    let mut acc = 0;
    for i in 0..sp.len() {
        for j in i..sp.len() {
            acc += sp[i] * sp[j];
        }
    }
    acc
}

/// `■_𝔣′ = (Σs′)ℓ + Σ_{i≤j} s′ᵢs′ⱼ + Σ_{i<ℓ} (s′₁+…+s′ᵢ)·μ(y^{i+1})` with `s′ = s − 1`.
pub fn square_fprime(mu: &[i64], parts: &[usize]) -> Result<Parity> {
    let ys = block_output_degrees(mu, parts)?;
    let sp: Vec<i64> = parts.iter().map(|&s| s as i64 - 1).collect();
    let l = parts.len() as i64;
    let mut acc = sp.iter().sum::<i64>() * l + sum_ordered_pairs(&sp);
    let mut prefix = 0;
    for i in 0..parts.len() - 1 {
        prefix += sp[i];
        acc += prefix * ys[i + 1];
    }
    Ok(Parity::of(acc))
}

/// `▲′ = dℓ + d + Σ_{i≤j} s′ᵢs′ⱼ` for the parameter-space configuration of a partition.
pub fn triangle_fprime(d: usize, parts: &[usize]) -> Result<Parity> {
    check_partition(parts, d)?;
    let sp: Vec<i64> = parts.iter().map(|&s| s as i64 - 1).collect();
    let (d, l) = (d as i64, parts.len() as i64);
    Ok(Parity::of(d * l + d + sum_ordered_pairs(&sp)))
}

/// Which composite identity to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    MComposition,
    FComposition,
    FprimeComposition,
}

impl std::str::FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" | "m-composition" => Ok(Identity::MComposition),
            "f" | "f-composition" => Ok(Identity::FComposition),
            "fprime" | "f'" | "fprime-composition" => Ok(Identity::FprimeComposition),
            other => Err(Error::Config(format!("unknown identity '{other}' (expected m, f or fprime)"))),
        }
    }
}

/// `Standard` evaluates the identity as stated; `DropTriangle` omits the parameter-space term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityVariant {
    Standard,
    DropTriangle,
}

/// Position data of a boundary configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitData {
    /// Inner operation of arity `m` inserted after `n` inputs.
    Insert { n: usize, m: usize },
    /// Outer operation applied to blocks of the given sizes.
    Partition { parts: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySides {
    pub lhs: Parity,
    pub rhs: Parity,
}

impl IdentitySides {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluate both sides of an identity at one configuration.
///
/// The glued degrees are always derived from the rigidity conditions, never supplied.
pub fn identity_sides(
    which: Identity,
    mu: &[i64],
    split: &SplitData,
    variant: IdentityVariant,
) -> Result<IdentitySides> {
    let d = mu.len();
    if d == 0 {
        return Err(Error::IndexRange("arity must be at least 1".into()));
    }
    let base = Parity::of(weighted_sum(mu, 2));
    let keep_triangle = variant == IdentityVariant::Standard;
    match (which, split) {
        (Identity::MComposition, SplitData::Insert { n, m }) => {
            let (n, m) = (*n, *m);
            check_split(mu, d, n, m)?;
            let glued = glued_tuple(mu, n, m);
            let inner = &mu[n..n + m];
            let mut lhs = dagger(&glued) ^ dagger(inner) ^ square_m(mu, d, n, m)?;
            if keep_triangle {
                lhs ^= triangle(d, n, m)?;
            }
            let rhs = ddagger(mu, n)? ^ base;
            Ok(IdentitySides { lhs, rhs })
        }
        (Identity::FComposition, SplitData::Insert { n, m }) => {
            let (n, m) = (*n, *m);
            check_split(mu, d, n, m)?;
            let glued = glued_tuple(mu, n, m);
            let inner = &mu[n..n + m];
            let mut lhs = square_f(mu, d, n, m)? ^ dagger(inner) ^ spade(&glued, glued.len());
            if keep_triangle {
                lhs ^= triangle(d, n, m)?;
            }
            let rhs = ddagger(mu, n)? ^ Parity::ODD ^ base ^ Parity::of(d as i64);
            Ok(IdentitySides { lhs, rhs })
        }
        (Identity::FprimeComposition, SplitData::Partition { parts }) => {
            let ys = block_output_degrees(mu, parts)?;
            let mut lhs = square_fprime(mu, parts)? ^ dagger(&ys);
            if keep_triangle {
                lhs ^= triangle_fprime(d, parts)?;
            }
            let mut pos = 0;
            for &s in parts {
                lhs ^= spade(&mu[pos..pos + s], s);
                pos += s;
            }
            let rhs = base ^ Parity::of(d as i64);
            Ok(IdentitySides { lhs, rhs })
        }
        (w, s) => Err(Error::IndexRange(format!("split data {s:?} does not apply to {w:?}"))),
    }
}

/// Degree tuple of the outer operation: the block `n+1..n+m` replaced by its glued output
/// of degree `Σ μ + m − 2`.
fn glued_tuple(mu: &[i64], n: usize, m: usize) -> Vec<i64> {
    let glued: i64 = mu[n..n + m].iter().sum::<i64>() + m as i64 - 2;
    let mut out = Vec::with_capacity(mu.len() - m + 1);
    out.extend_from_slice(&mu[..n]);
    out.push(glued);
    out.extend_from_slice(&mu[n + m..]);
    out
}

/// A violating assignment, reported verbatim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub identity: Identity,
    pub d: usize,
    pub mu: Vec<i64>,
    pub split: SplitData,
    pub lhs: Parity,
    pub rhs: Parity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum IdentityOutcome {
    Pass { cases: u64 },
    Counterexample(Counterexample),
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, IdentityOutcome::Pass { .. })
    }
}

/// All compositions of `d` in lexicographic order.
pub fn compositions(d: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for s in 1..=rest {
            cur.push(s);
            rec(rest - s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, &mut Vec::new(), &mut out);
    }
    out
}

fn splits_for(which: Identity, d: usize) -> Vec<SplitData> {
    match which {
        Identity::MComposition | Identity::FComposition => {
            let mut v = Vec::new();
            for n in 0..d {
                for m in 1..=d - n {
                    v.push(SplitData::Insert { n, m });
                }
            }
            v
        }
        Identity::FprimeComposition => compositions(d)
            .into_iter()
            .map(|parts| SplitData::Partition { parts })
            .collect(),
    }
}

/// Exhaustive check over all degree tuples drawn from `degrees` and all arities `1..=d_max`.
///
/// Assignments are visited in increasing `(d, μ, split)` lexicographic order, so the first
/// violation found is the least one.
pub fn verify_identity(which: Identity, degrees: &[i64], d_max: usize) -> IdentityOutcome {
    verify_identity_variant(which, degrees, d_max, IdentityVariant::Standard)
}

pub fn verify_identity_variant(
    which: Identity,
    degrees: &[i64],
    d_max: usize,
    variant: IdentityVariant,
) -> IdentityOutcome {
    let mut range: Vec<i64> = degrees.to_vec();
    range.sort_unstable();
    range.dedup();
    let mut cases = 0u64;
    if range.is_empty() {
        return IdentityOutcome::Pass { cases };
    }
    for d in 1..=d_max {
        let splits = splits_for(which, d);
        let mut idx = vec![0usize; d];
        'tuples: loop {
            let mu: Vec<i64> = idx.iter().map(|&i| range[i]).collect();
            for split in &splits {
                cases += 1;
                let sides = identity_sides(which, &mu, split, variant)
                    .expect("enumerated splits are valid by construction");
                if !sides.holds() {
                    return IdentityOutcome::Counterexample(Counterexample {
                        identity: which,
                        d,
                        mu,
                        split: split.clone(),
                        lhs: sides.lhs,
                        rhs: sides.rhs,
                    });
                }
            }
            // odometer, last position fastest
            let mut pos = d;
            loop {
                if pos == 0 {
                    break 'tuples;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < range.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    IdentityOutcome::Pass { cases }
}
