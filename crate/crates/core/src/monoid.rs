//! Exact arithmetic, partial order and joins in quasi-lattice ordered monoids.
//!
//! Two families are supported: free products `*P^λ` of totally ordered groups
//! (with positive cone ℕ or the dense positive rationals) and direct sums
//! `⊕P^λ` of the same. Both share one word type; a direct-sum word keeps its
//! letters sorted by factor id, a free-product word only merges neighbours.
//! A monoid with a single factor is a total order and behaves the same way
//! under either policy.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact exponent / coordinate type.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorKind {
    /// `(ℤ, ℕ)`.
    Integers,
    /// `(ℚ, ℚ ∩ [0, ∞))`; no finite ideals exist.
    RationalsDense,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub id: usize,
    pub kind: FactorKind,
}

/// One syllable `g^x` of a reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub factor: usize,
    pub exponent: Scalar,
}

impl Letter {
    pub fn new(factor: usize, exponent: Scalar) -> Self {
        Letter { factor, exponent }
    }

    pub fn int(factor: usize, exponent: i64) -> Self {
        Letter { factor, exponent: scalar(exponent) }
    }
}

/// A reduced word; the empty word is the identity `e`.
///
/// Elements are ordered graded-lexicographically: first by total degree,
/// then lexicographically on the expanded generator sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MonoidElement {
    letters: Vec<Letter>,
}

impl MonoidElement {
    pub fn identity() -> Self {
        MonoidElement { letters: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Sum of all exponents.
    pub fn degree(&self) -> Scalar {
        self.letters.iter().fold(Scalar::zero(), |acc, l| acc + &l.exponent)
    }

    fn has_negative(&self) -> bool {
        self.letters.iter().any(|l| l.exponent.is_negative())
    }

    pub fn first(&self) -> Option<&Letter> {
        self.letters.first()
    }

    pub fn last(&self) -> Option<&Letter> {
        self.letters.last()
    }

    /// Wraps letters that are already reduced under some policy.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        MonoidElement { letters }
    }

    /// Coordinate (sum of exponents) of one factor.
    pub fn coordinate(&self, factor: usize) -> Scalar {
        self.letters
            .iter()
            .filter(|l| l.factor == factor)
            .fold(Scalar::zero(), |acc, l| acc + &l.exponent)
    }
}

fn expanded_cmp(a: &[Letter], b: &[Letter]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    let mut ra = a.first().map(|l| l.exponent.clone());
    let mut rb = b.first().map(|l| l.exponent.clone());
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                if x.factor != y.factor {
                    return x.factor.cmp(&y.factor);
                }
                let ea = ra.take().expect("remaining exponent");
                let eb = rb.take().expect("remaining exponent");
                match ea.cmp(&eb) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        ra = a.get(i).map(|l| l.exponent.clone());
                        rb = b.get(j).map(|l| l.exponent.clone());
                    }
                    Ordering::Less => {
                        i += 1;
                        ra = a.get(i).map(|l| l.exponent.clone());
                        rb = Some(eb - ea);
                    }
                    Ordering::Greater => {
                        j += 1;
                        rb = b.get(j).map(|l| l.exponent.clone());
                        ra = Some(ea - eb);
                    }
                }
            }
        }
    }
}

impl Ord for MonoidElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.has_negative().cmp(&other.has_negative()))
            .then_with(|| {
                if self.has_negative() {
                    let key = |l: &Letter| (l.factor, l.exponent.clone());
                    self.letters.iter().map(key).cmp(other.letters.iter().map(key))
                } else {
                    expanded_cmp(&self.letters, &other.letters)
                }
            })
    }
}

impl PartialOrd for MonoidElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn generator_name(factor: usize) -> String {
    if factor < 26 {
        ((b'a' + factor as u8) as char).to_string()
    } else {
        format!("g{factor}")
    }
}

fn fmt_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{}", generator_name(l.factor))?;
            if !l.exponent.is_one() {
                write!(f, "^{}", fmt_scalar(&l.exponent))?;
            }
        }
        Ok(())
    }
}

/// `s ∨ t`: a finite least upper bound or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Join {
    Finite(MonoidElement),
    Infinity,
}

impl Join {
    pub fn finite(&self) -> Option<&MonoidElement> {
        match self {
            Join::Finite(s) => Some(s),
            Join::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Join::Infinity)
    }
}

impl fmt::Display for Join {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Join::Finite(s) => write!(f, "{s}"),
            Join::Infinity => write!(f, "∞"),
        }
    }
}

/// Image `θ(s)` in the direct sum; zero coordinates are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DirectSumImage {
    pub coordinates: BTreeMap<usize, Scalar>,
}

impl DirectSumImage {
    /// Componentwise maximum.
    pub fn join(&self, other: &DirectSumImage) -> DirectSumImage {
        let mut coordinates = self.coordinates.clone();
        for (k, v) in &other.coordinates {
            let slot = coordinates.entry(*k).or_insert_with(Scalar::zero);
            if *v > *slot {
                *slot = v.clone();
            }
        }
        coordinates.retain(|_, v| !v.is_zero());
        DirectSumImage { coordinates }
    }

    pub fn get(&self, factor: usize) -> Scalar {
        self.coordinates.get(&factor).cloned().unwrap_or_else(Scalar::zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonoidKind {
    FreeProduct,
    DirectSum,
}

/// Finite index set used for Fock truncations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Truncation {
    /// All positive words of total exponent at most `L`.
    Length(u32),
    /// All vectors below a componentwise box (direct sums).
    Box(Vec<u32>),
}

/// A quasi-lattice ordered group `(G, P)` built from totally ordered factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monoid {
    kind: MonoidKind,
    factors: Vec<Factor>,
}

impl Monoid {
    pub fn new(kind: MonoidKind, kinds: &[FactorKind]) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::InvalidElement("a monoid needs at least one factor".into()));
        }
        let factors = kinds
            .iter()
            .enumerate()
            .map(|(id, &kind)| Factor { id, kind })
            .collect();
        Ok(Monoid { kind, factors })
    }

    /// `ℕ * ℕ * … * ℕ` with `n` factors.
    pub fn free_product(n: usize) -> Self {
        Self::new(MonoidKind::FreeProduct, &vec![FactorKind::Integers; n]).expect("n > 0")
    }

    /// `ℕ ⊕ … ⊕ ℕ` with `n` summands.
    pub fn direct_sum(n: usize) -> Self {
        Self::new(MonoidKind::DirectSum, &vec![FactorKind::Integers; n]).expect("n > 0")
    }

    /// `(ℕ, +)`.
    pub fn naturals() -> Self {
        Self::free_product(1)
    }

    pub fn kind(&self) -> MonoidKind {
        self.kind
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn factor_kind(&self, factor: usize) -> Option<FactorKind> {
        self.factors.get(factor).map(|f| f.kind)
    }

    /// Joins always lie in `{s, t, ∞}`.
    pub fn is_qto(&self) -> bool {
        self.kind == MonoidKind::FreeProduct || self.factors.len() == 1
    }

    pub fn has_dense_factor(&self) -> bool {
        self.factors.iter().any(|f| f.kind == FactorKind::RationalsDense)
    }

    pub fn generator(&self, factor: usize) -> MonoidElement {
        assert!(factor < self.rank(), "generator index out of range");
        MonoidElement::from_reduced(vec![Letter::int(factor, 1)])
    }

    /// Builds a validated element from `(factor, exponent)` pairs.
    pub fn element(&self, letters: &[(usize, i64)]) -> Result<MonoidElement> {
        let s = self.normalize(letters.iter().map(|&(f, e)| Letter::int(f, e)));
        self.check(&s)?;
        Ok(s)
    }

    /// Builds an element from direct-sum coordinates.
    pub fn coords(&self, coords: &[i64]) -> Result<MonoidElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        if self.kind == MonoidKind::FreeProduct && self.rank() > 1 {
            return Err(Error::InvalidElement(
                "coordinate form is ambiguous in a free product".into(),
            ));
        }
        let pairs: Vec<_> = coords.iter().copied().enumerate().collect();
        self.element(&pairs)
    }

    /// Validates factor ids, exponent kinds and reducedness.
    pub fn check(&self, s: &MonoidElement) -> Result<()> {
        for l in &s.letters {
            let kind = self
                .factor_kind(l.factor)
                .ok_or_else(|| Error::InvalidElement(format!("unknown factor {}", l.factor)))?;
            if l.exponent.is_zero() {
                return Err(Error::InvalidElement("zero exponent".into()));
            }
            if kind == FactorKind::Integers && !l.exponent.is_integer() {
                return Err(Error::InvalidElement(format!(
                    "factor {} takes integer exponents",
                    generator_name(l.factor)
                )));
            }
        }
        let reduced = match self.kind {
            MonoidKind::FreeProduct => s.letters.windows(2).all(|w| w[0].factor != w[1].factor),
            MonoidKind::DirectSum => s.letters.windows(2).all(|w| w[0].factor < w[1].factor),
        };
        if !reduced {
            return Err(Error::InvalidElement(format!("{s} is not reduced")));
        }
        Ok(())
    }

    /// Merges neighbours, drops zero exponents and (for direct sums) sorts.
    pub fn normalize(&self, raw: impl IntoIterator<Item = Letter>) -> MonoidElement {
        match self.kind {
            MonoidKind::FreeProduct => {
                let mut stack: Vec<Letter> = Vec::new();
                for l in raw {
                    if l.exponent.is_zero() {
                        continue;
                    }
                    match stack.last_mut() {
                        Some(top) if top.factor == l.factor => {
                            top.exponent += l.exponent;
                            if top.exponent.is_zero() {
                                stack.pop();
                            }
                        }
                        _ => stack.push(l),
                    }
                }
                MonoidElement::from_reduced(stack)
            }
            MonoidKind::DirectSum => {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for l in raw {
                    *acc.entry(l.factor).or_insert_with(Scalar::zero) += l.exponent;
                }
                MonoidElement::from_reduced(
                    acc.into_iter()
                        .filter(|(_, e)| !e.is_zero())
                        .map(|(factor, exponent)| Letter { factor, exponent })
                        .collect(),
                )
            }
        }
    }

    pub fn multiply(&self, s: &MonoidElement, t: &MonoidElement) -> MonoidElement {
        if s.is_identity() {
            return t.clone();
        }
        if t.is_identity() {
            return s.clone();
        }
        self.normalize(s.letters.iter().chain(t.letters.iter()).cloned())
    }

    pub fn invert(&self, g: &MonoidElement) -> MonoidElement {
        let letters = g
            .letters
            .iter()
            .rev()
            .map(|l| Letter { factor: l.factor, exponent: -l.exponent.clone() });
        self.normalize(letters)
    }

    /// Membership in the positive cone `P`.
    pub fn is_positive(&self, g: &MonoidElement) -> bool {
        g.letters.iter().all(|l| l.exponent.is_positive())
    }

    /// `s ≤ t` iff `s⁻¹t ∈ P`.
    pub fn leq(&self, s: &MonoidElement, t: &MonoidElement) -> bool {
        self.is_positive(&self.multiply(&self.invert(s), t))
    }

    /// Least upper bound of `s, t ∈ P`.
    pub fn join(&self, s: &MonoidElement, t: &MonoidElement) -> Join {
        match self.kind {
            MonoidKind::FreeProduct => {
                if self.leq(s, t) {
                    Join::Finite(t.clone())
                } else if self.leq(t, s) {
                    Join::Finite(s.clone())
                } else {
                    Join::Infinity
                }
            }
            MonoidKind::DirectSum => {
                let img = self.theta(s).join(&self.theta(t));
                Join::Finite(MonoidElement::from_reduced(
                    img.coordinates
                        .into_iter()
                        .map(|(factor, exponent)| Letter { factor, exponent })
                        .collect(),
                ))
            }
        }
    }

    /// Folds `join` over a finite set; `e` for the empty set.
    pub fn join_all<'a>(&self, elems: impl IntoIterator<Item = &'a MonoidElement>) -> Join {
        let mut acc = Join::Finite(MonoidElement::identity());
        for s in elems {
            acc = match acc {
                Join::Finite(a) => self.join(&a, s),
                Join::Infinity => return Join::Infinity,
            };
        }
        acc
    }

    /// `s⁻¹t`, defined when `s ≤ t`.
    pub fn left_quotient(&self, s: &MonoidElement, t: &MonoidElement) -> Result<MonoidElement> {
        let q = self.multiply(&self.invert(s), t);
        if self.is_positive(&q) {
            Ok(q)
        } else {
            Err(Error::NotLeq { s: s.to_string(), t: t.to_string() })
        }
    }

    /// Canonical map to the direct sum: per-factor exponent sums.
    pub fn theta(&self, s: &MonoidElement) -> DirectSumImage {
        let mut coordinates: BTreeMap<usize, Scalar> = BTreeMap::new();
        for l in &s.letters {
            *coordinates.entry(l.factor).or_insert_with(Scalar::zero) += &l.exponent;
        }
        coordinates.retain(|_, v| !v.is_zero());
        DirectSumImage { coordinates }
    }

    /// Whether `s ∈ P` lies in the finite ideal described by `bound`.
    pub fn in_truncation(&self, bound: &Truncation, s: &MonoidElement) -> bool {
        if !self.is_positive(s) {
            return false;
        }
        match self.box_bounds(bound) {
            Ok(Some(b)) => s
                .letters
                .iter()
                .all(|l| l.exponent <= scalar(b[l.factor] as i64)),
            Ok(None) => match bound {
                Truncation::Length(len) => s.degree() <= scalar(*len as i64),
                Truncation::Box(_) => false,
            },
            Err(_) => false,
        }
    }

    /// Box bounds when the truncation is a box in a direct sum (or a total order).
    fn box_bounds(&self, bound: &Truncation) -> Result<Option<Vec<u32>>> {
        if self.has_dense_factor() {
            return Err(Error::UnsupportedTruncation(
                "dense rational factors have no finite ideals".into(),
            ));
        }
        match (self.kind, bound) {
            (MonoidKind::DirectSum, Truncation::Length(l)) => Ok(Some(vec![*l; self.rank()])),
            (_, Truncation::Box(b)) if b.len() != self.rank() => Err(Error::UnsupportedTruncation(
                format!("box has {} entries for {} factors", b.len(), self.rank()),
            )),
            (MonoidKind::DirectSum, Truncation::Box(b)) => Ok(Some(b.clone())),
            (MonoidKind::FreeProduct, Truncation::Box(b)) if self.rank() == 1 => {
                Ok(Some(b.clone()))
            }
            (MonoidKind::FreeProduct, Truncation::Box(_)) => Err(Error::UnsupportedTruncation(
                "free products are truncated by word length".into(),
            )),
            (MonoidKind::FreeProduct, Truncation::Length(_)) => Ok(None),
        }
    }

    /// A finite, downward-closed, join-closed subset of `P` containing `e`,
    /// in graded-lexicographic order.
    pub fn enumerate_ideal(&self, bound: &Truncation) -> Result<Vec<MonoidElement>> {
        let mut out = match (self.box_bounds(bound)?, bound) {
            (Some(b), _) => {
                let mut acc = vec![MonoidElement::identity()];
                for (factor, &limit) in b.iter().enumerate() {
                    let mut next = Vec::with_capacity(acc.len() * (limit as usize + 1));
                    for s in &acc {
                        for k in 0..=limit as i64 {
                            let mut letters = s.letters.clone();
                            if k > 0 {
                                letters.push(Letter::int(factor, k));
                            }
                            next.push(self.normalize(letters));
                        }
                    }
                    acc = next;
                }
                acc
            }
            (None, Truncation::Length(len)) => {
                let mut acc = vec![MonoidElement::identity()];
                let mut frontier = vec![MonoidElement::identity()];
                for _ in 0..*len {
                    let mut next = Vec::new();
                    for s in &frontier {
                        for g in 0..self.rank() {
                            next.push(self.multiply(s, &self.generator(g)));
                        }
                    }
                    acc.extend(next.iter().cloned());
                    frontier = next;
                }
                acc
            }
            (None, Truncation::Box(_)) => unreachable!("box bounds always resolve"),
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Integral exponent of a letter as `u64` (positive words over ℕ factors).
    pub fn int_exponent(l: &Letter) -> Option<u64> {
        if l.exponent.is_integer() && !l.exponent.is_negative() {
            l.exponent.to_integer().to_u64()
        } else {
            None
        }
    }

    /// Renders an element, using tuple notation for direct sums.
    pub fn format(&self, s: &MonoidElement) -> String {
        if self.kind == MonoidKind::DirectSum && self.rank() > 1 {
            let parts: Vec<String> =
                (0..self.rank()).map(|f| fmt_scalar(&s.coordinate(f))).collect();
            format!("({})", parts.join(","))
        } else {
            s.to_string()
        }
    }

    /// Parses `e`, a word such as `a^2 b a^-1`, a tuple `(1,0,2)` or, for a
    /// single factor, a bare scalar such as `3` or `1/2`.
    pub fn parse(&self, text: &str) -> Result<MonoidElement> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(MonoidElement::identity());
        }
        if let Some(inner) = text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != self.rank() {
                return Err(Error::Parse(format!(
                    "tuple {text} has {} entries, expected {}",
                    parts.len(),
                    self.rank()
                )));
            }
            if self.kind == MonoidKind::FreeProduct && self.rank() > 1 {
                return Err(Error::Parse("tuples are only meaningful in direct sums".into()));
            }
            let letters = parts
                .iter()
                .enumerate()
                .map(|(f, p)| parse_scalar(p).map(|x| Letter::new(f, x)))
                .collect::<Result<Vec<_>>>()?;
            let s = self.normalize(letters);
            self.check(&s)?;
            return Ok(s);
        }
        if self.rank() == 1 && text.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
            let s = self.normalize([Letter::new(0, parse_scalar(text)?)]);
            self.check(&s)?;
            return Ok(s);
        }
        let mut letters = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '·' {
                i += 1;
                continue;
            }
            if !c.is_ascii_lowercase() {
                return Err(Error::Parse(format!("unexpected {c:?} in {text:?}")));
            }
            let factor = (c as u8 - b'a') as usize;
            if factor >= self.rank() {
                return Err(Error::Parse(format!("generator {c} not in monoid of rank {}", self.rank())));
            }
            i += 1;
            let mut exponent = Scalar::one();
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/' || chars[i] == '-') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                exponent = parse_scalar(&lit)?;
            }
            letters.push(Letter::new(factor, exponent));
        }
        let s = self.normalize(letters);
        self.check(&s)?;
        Ok(s)
    }
}

pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("bad exponent {text:?}"));
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(m: &Monoid, s: &str) -> MonoidElement {
        m.parse(s).unwrap()
    }

    #[test]
    fn normalize_merges_and_drops_zero() {
        let m = Monoid::free_product(2);
        let s = m.normalize([Letter::int(0, 1), Letter::int(0, 2), Letter::int(1, 0), Letter::int(1, 3)]);
        assert_eq!(s, w(&m, "a^3 b^3"));
        assert!(m.normalize([]).is_identity());
    }

    #[test]
    fn normalize_cascades_cancellation() {
        let m = Monoid::free_product(2);
        let s = m.normalize([Letter::int(0, 1), Letter::int(1, 1), Letter::int(1, -1), Letter::int(0, 1)]);
        assert_eq!(s, w(&m, "a^2"));
    }

    #[test]
    fn direct_sum_normal_form_is_sorted() {
        let m = Monoid::direct_sum(3);
        let s = m.normalize([Letter::int(2, 1), Letter::int(0, 1), Letter::int(2, 1)]);
        assert_eq!(s, m.coords(&[1, 0, 2]).unwrap());
        assert_eq!(m.format(&s), "(1,0,2)");
    }

    #[test]
    fn multiply_and_invert() {
        let m = Monoid::free_product(2);
        assert_eq!(m.multiply(&w(&m, "a"), &w(&m, "b")), w(&m, "ab"));
        assert_eq!(m.multiply(&w(&m, "ab"), &w(&m, "b^2")), w(&m, "ab^3"));
        assert_eq!(m.multiply(&MonoidElement::identity(), &w(&m, "ba")), w(&m, "ba"));
        assert_eq!(m.invert(&w(&m, "ab")), w(&m, "b^-1 a^-1"));
        assert!(m.invert(&MonoidElement::identity()).is_identity());
        assert_eq!(m.invert(&w(&m, "a^2")), w(&m, "a^-2"));
    }

    #[test]
    fn positivity_and_order() {
        let m = Monoid::free_product(2);
        assert!(m.is_positive(&w(&m, "ab^2")));
        assert!(!m.is_positive(&w(&m, "b^-1 a b")));
        assert!(m.is_positive(&MonoidElement::identity()));
        assert!(m.leq(&w(&m, "a"), &w(&m, "ab")));
        assert!(!m.leq(&w(&m, "ab"), &w(&m, "a^2 b")));
        let n3 = Monoid::direct_sum(3);
        assert!(n3.leq(&n3.coords(&[1, 0, 2]).unwrap(), &n3.coords(&[1, 3, 2]).unwrap()));
    }

    #[test]
    fn joins() {
        let m = Monoid::free_product(2);
        assert_eq!(m.join(&w(&m, "a"), &w(&m, "b")), Join::Infinity);
        assert_eq!(m.join(&w(&m, "a"), &w(&m, "ab")), Join::Finite(w(&m, "ab")));
        let n3 = Monoid::direct_sum(3);
        let j = n3.join(&n3.coords(&[1, 0, 2]).unwrap(), &n3.coords(&[0, 3, 1]).unwrap());
        assert_eq!(j, Join::Finite(n3.coords(&[1, 3, 2]).unwrap()));
    }

    #[test]
    fn quotients() {
        let m = Monoid::free_product(2);
        assert_eq!(m.left_quotient(&w(&m, "a"), &w(&m, "ab^2")).unwrap(), w(&m, "b^2"));
        let s = w(&m, "ab");
        assert!(m.left_quotient(&s, &s).unwrap().is_identity());
        assert!(matches!(m.left_quotient(&w(&m, "b"), &w(&m, "ab")), Err(Error::NotLeq { .. })));
        let n2 = Monoid::direct_sum(2);
        let q = n2.left_quotient(&n2.coords(&[1, 0]).unwrap(), &n2.coords(&[2, 3]).unwrap());
        assert_eq!(q.unwrap(), n2.coords(&[1, 3]).unwrap());
    }

    #[test]
    fn theta_abelianizes() {
        let m = Monoid::free_product(2);
        let t = m.theta(&w(&m, "aba"));
        assert_eq!(t.get(0), scalar(2));
        assert_eq!(t.get(1), scalar(1));
        assert!(m.theta(&MonoidElement::identity()).coordinates.is_empty());
        assert_eq!(m.theta(&w(&m, "ab")), m.theta(&w(&m, "ba")));
    }

    #[test]
    fn ideals() {
        let m = Monoid::free_product(2);
        let ideal = m.enumerate_ideal(&Truncation::Length(2)).unwrap();
        let names: Vec<String> = ideal.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["e", "a", "b", "a^2", "ab", "ba", "b^2"]);
        let n = Monoid::naturals();
        assert_eq!(n.enumerate_ideal(&Truncation::Length(3)).unwrap().len(), 4);
        let n2 = Monoid::direct_sum(2);
        let sq = n2.enumerate_ideal(&Truncation::Box(vec![1, 1])).unwrap();
        let names: Vec<String> = sq.iter().map(|s| n2.format(s)).collect();
        assert_eq!(names, ["(0,0)", "(1,0)", "(0,1)", "(1,1)"]);
    }

    #[test]
    fn dense_factors_have_no_ideals() {
        let q = Monoid::new(MonoidKind::FreeProduct, &[FactorKind::RationalsDense]).unwrap();
        assert!(matches!(
            q.enumerate_ideal(&Truncation::Length(2)),
            Err(Error::UnsupportedTruncation(_))
        ));
    }

    #[test]
    fn dense_rationals_order() {
        let q = Monoid::new(
            MonoidKind::FreeProduct,
            &[FactorKind::RationalsDense, FactorKind::Integers],
        )
        .unwrap();
        let half = q.parse("a^1/2").unwrap();
        let s = q.parse("a^1/2 b").unwrap();
        assert!(q.leq(&half, &q.parse("a^2/3 b").unwrap()));
        assert!(!q.leq(&s, &q.parse("a^2/3").unwrap()));
        assert!(q.leq(&half, &q.parse("a^2/3").unwrap()));
        assert!(q.leq(&half, &s));
        assert!(q.parse("b^1/2").is_err());
    }

    #[test]
    fn graded_order_on_expanded_words() {
        let m = Monoid::free_product(2);
        let mut v = [w(&m, "b^2"), w(&m, "ba"), w(&m, "a^2"), w(&m, "ab"), w(&m, "aba"), w(&m, "a^2 b")];
        v.sort();
        let names: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["a^2", "ab", "ba", "b^2", "a^2b", "aba"]);
    }

    #[test]
    fn parse_round_trip() {
        let m = Monoid::free_product(3);
        for s in ["e", "a", "ab^2c", "c^3 a^-1", "b a b"] {
            let x = m.parse(s).unwrap();
            assert_eq!(m.parse(&x.to_string()).unwrap(), x);
        }
        assert!(m.parse("d").is_err());
    }
}
