//! Basis-aligned discrete product systems.
//!
//! Every supported system multiplies canonical basis vectors onto canonical
//! basis vectors, so the unitaries `E_s ⊗ E_t → E_st` reduce to label
//! combinatorics. Three label styles exist:
//!
//! * word-graded: one symbol string per letter of the grade, concatenated
//!   letter-wise (free products) or coordinate-wise (direct sums);
//! * concatenated: a single string over one alphabet whose length is the
//!   total degree, as in the ℕ ⊕ ℕ example with fibers `𝓔^{⊗(m+n)}`;
//! * von Neumann: finitely supported functions `P∖sP → {0..d-1}`, symbol `0`
//!   standing for the distinguished unit vector.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::monoid::{FactorKind, Join, Letter, Monoid, MonoidElement, MonoidKind, Truncation};

pub type C64 = Complex64;

/// Coefficients below this magnitude are dropped from canonical forms.
pub const PRUNE_TOL: f64 = 1e-12;

/// Upper limit on enumerated fiber bases.
const MAX_BASIS: u64 = 1 << 20;

/// Dimension of a generator fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiberDim {
    Finite(u32),
    /// Infinite-dimensional, materialized up to a working dimension.
    InfiniteTruncated(u32),
}

impl FiberDim {
    pub fn working(&self) -> u32 {
        match *self {
            FiberDim::Finite(d) | FiberDim::InfiniteTruncated(d) => d,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, FiberDim::InfiniteTruncated(_))
    }

    fn is_trivial(&self) -> bool {
        *self == FiberDim::Finite(1)
    }
}

/// Dimension of `E_s`: the materialized size, and whether that basis is only
/// a working part of the fiber (infinite, or cut off by a support window).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dim {
    pub working: u64,
    pub infinite: bool,
}

impl Dim {
    pub fn finite(n: u64) -> Dim {
        Dim { working: n, infinite: false }
    }
}

/// Canonical orthonormal basis vector of a fiber.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    Segments(Vec<Vec<u32>>),
    Sparse(BTreeMap<MonoidElement, u32>),
}

fn symbol_char(s: u32) -> char {
    std::char::from_digit(s, 36).unwrap_or('?')
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Segments(segs) => {
                for (i, seg) in segs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    for &c in seg {
                        write!(f, "{}", symbol_char(c))?;
                    }
                }
                Ok(())
            }
            BasisLabel::Sparse(map) => {
                write!(f, "{{")?;
                for (i, (r, v)) in map.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}={}", symbol_char(*v))?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl BasisLabel {
    pub fn empty_segments() -> Self {
        BasisLabel::Segments(Vec::new())
    }

    /// Single-segment label from a symbol string.
    pub fn word(symbols: &[u32]) -> Self {
        if symbols.is_empty() {
            BasisLabel::Segments(Vec::new())
        } else {
            BasisLabel::Segments(vec![symbols.to_vec()])
        }
    }

    /// Parses `01|2` style labels (base-36 symbols) and `{r=1,...}` sparse labels.
    pub fn parse(text: &str, monoid: &Monoid) -> Result<Self> {
        let text = text.trim();
        if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            let mut map = BTreeMap::new();
            for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (r, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected r=symbol in {part:?}")))?;
                let v = parse_symbol(v.trim())?;
                if v != 0 {
                    map.insert(monoid.parse(r)?, v);
                }
            }
            return Ok(BasisLabel::Sparse(map));
        }
        if text.is_empty() {
            return Ok(BasisLabel::Segments(Vec::new()));
        }
        let segs = text
            .split('|')
            .map(|seg| seg.chars().map(|c| parse_symbol(&c.to_string())).collect())
            .collect::<Result<Vec<Vec<u32>>>>()?;
        Ok(BasisLabel::Segments(segs))
    }

    /// All symbols in reading order.
    pub fn flat_symbols(&self) -> Option<Vec<u32>> {
        match self {
            BasisLabel::Segments(segs) => Some(segs.concat()),
            BasisLabel::Sparse(_) => None,
        }
    }
}

fn parse_symbol(s: &str) -> Result<u32> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => c
            .to_digit(36)
            .ok_or_else(|| Error::Parse(format!("bad symbol {c:?}"))),
        _ => Err(Error::Parse(format!("bad symbol {s:?}"))),
    }
}

fn prune<K: Ord>(map: &mut BTreeMap<K, C64>) {
    map.retain(|_, v| v.norm() >= PRUNE_TOL);
}

/// Finitely supported vector in a single fiber `E_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberVector {
    pub grade: MonoidElement,
    pub coords: BTreeMap<BasisLabel, C64>,
}

impl FiberVector {
    pub fn zero(grade: MonoidElement) -> Self {
        FiberVector { grade, coords: BTreeMap::new() }
    }

    pub fn basis(grade: MonoidElement, label: BasisLabel) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(label, C64::new(1.0, 0.0));
        FiberVector { grade, coords }
    }

    pub fn from_terms(grade: MonoidElement, terms: impl IntoIterator<Item = (BasisLabel, C64)>) -> Self {
        let mut v = FiberVector::zero(grade);
        for (k, c) in terms {
            *v.coords.entry(k).or_insert_with(C64::zero) += c;
        }
        prune(&mut v.coords);
        v
    }

    /// `⟨self, other⟩`, linear in `self`.
    pub fn inner(&self, other: &FiberVector) -> C64 {
        if self.grade != other.grade {
            return C64::zero();
        }
        self.coords
            .iter()
            .filter_map(|(k, a)| other.coords.get(k).map(|b| a * b.conj()))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.coords.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn scale(&self, c: C64) -> FiberVector {
        FiberVector::from_terms(self.grade.clone(), self.coords.iter().map(|(k, v)| (k.clone(), v * c)))
    }

    pub fn add(&self, other: &FiberVector) -> Result<FiberVector> {
        if self.grade != other.grade {
            return Err(Error::LabelMismatch(format!(
                "cannot add vectors of grades {} and {}",
                self.grade, other.grade
            )));
        }
        Ok(FiberVector::from_terms(
            self.grade.clone(),
            self.coords.iter().chain(other.coords.iter()).map(|(k, v)| (k.clone(), *v)),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    FiniteRank,
    /// `1 ∈ B(E_s)`, never materialized.
    Identity,
}

/// Operator on a single fiber, stored as a sparse matrix over basis labels.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberOperator {
    pub grade: MonoidElement,
    /// `(row, column) ↦ value`.
    pub entries: BTreeMap<(BasisLabel, BasisLabel), C64>,
    pub kind: OperatorKind,
    /// Set when an infinite fiber was materialized only up to its working dimension.
    pub truncated: bool,
}

impl FiberOperator {
    pub fn zero(grade: MonoidElement) -> Self {
        FiberOperator { grade, entries: BTreeMap::new(), kind: OperatorKind::FiniteRank, truncated: false }
    }

    pub fn identity(grade: MonoidElement) -> Self {
        FiberOperator { grade, entries: BTreeMap::new(), kind: OperatorKind::Identity, truncated: false }
    }

    pub fn from_entries(
        grade: MonoidElement,
        entries: impl IntoIterator<Item = ((BasisLabel, BasisLabel), C64)>,
    ) -> Self {
        let mut op = FiberOperator::zero(grade);
        for (k, v) in entries {
            *op.entries.entry(k).or_insert_with(C64::zero) += v;
        }
        prune(&mut op.entries);
        op
    }

    /// `z ↦ ⟨z, y⟩ x`.
    pub fn rank_one(x: &FiberVector, y: &FiberVector) -> Result<Self> {
        if x.grade != y.grade {
            return Err(Error::LabelMismatch("rank-one operator needs equal grades".into()));
        }
        Ok(FiberOperator::from_entries(
            x.grade.clone(),
            x.coords.iter().flat_map(|(kx, cx)| {
                y.coords.iter().map(move |(ky, cy)| ((kx.clone(), ky.clone()), cx * cy.conj()))
            }),
        ))
    }

    pub fn is_identity(&self) -> bool {
        self.kind == OperatorKind::Identity
    }

    pub fn scale(&self, c: C64) -> FiberOperator {
        let mut out = self.clone();
        if self.is_identity() {
            panic!("cannot scale an unmaterialized identity; materialize it first");
        }
        out.entries = self.entries.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        prune(&mut out.entries);
        out
    }

    pub fn adjoint(&self) -> FiberOperator {
        let mut out = self.clone();
        out.entries = self
            .entries
            .iter()
            .map(|((r, c), v)| ((c.clone(), r.clone()), v.conj()))
            .collect();
        out
    }

    /// Entries with columns grouped: `column ↦ [(row, value)]`.
    fn by_column(&self) -> BTreeMap<&BasisLabel, Vec<(&BasisLabel, C64)>> {
        let mut cols: BTreeMap<&BasisLabel, Vec<(&BasisLabel, C64)>> = BTreeMap::new();
        for ((r, c), v) in &self.entries {
            cols.entry(c).or_default().push((r, *v));
        }
        cols
    }

    fn by_row(&self) -> BTreeMap<&BasisLabel, Vec<(&BasisLabel, C64)>> {
        let mut rows: BTreeMap<&BasisLabel, Vec<(&BasisLabel, C64)>> = BTreeMap::new();
        for ((r, c), v) in &self.entries {
            rows.entry(r).or_default().push((c, *v));
        }
        rows
    }

    /// `self ∘ other` on the same fiber.
    pub fn compose(&self, other: &FiberOperator) -> Result<FiberOperator> {
        if self.grade != other.grade {
            return Err(Error::LabelMismatch("composition across different fibers".into()));
        }
        if self.is_identity() {
            return Ok(other.clone());
        }
        if other.is_identity() {
            return Ok(self.clone());
        }
        let cols = self.by_column();
        let mut out = FiberOperator::zero(self.grade.clone());
        out.truncated = self.truncated || other.truncated;
        for ((k, j), b) in &other.entries {
            if let Some(col) = cols.get(k) {
                for (i, a) in col {
                    *out.entries.entry(((*i).clone(), j.clone())).or_insert_with(C64::zero) += a * b;
                }
            }
        }
        prune(&mut out.entries);
        Ok(out)
    }

    pub fn apply(&self, v: &FiberVector) -> Result<FiberVector> {
        if v.grade != self.grade {
            return Err(Error::LabelMismatch("operator applied to a vector of another grade".into()));
        }
        if self.is_identity() {
            return Ok(v.clone());
        }
        let cols = self.by_column();
        let mut out = BTreeMap::new();
        for (k, c) in &v.coords {
            if let Some(col) = cols.get(k) {
                for (i, a) in col {
                    *out.entry((*i).clone()).or_insert_with(C64::zero) += a * c;
                }
            }
        }
        Ok(FiberVector::from_terms(self.grade.clone(), out))
    }

    pub fn add(&self, other: &FiberOperator) -> Result<FiberOperator> {
        if self.grade != other.grade || self.is_identity() || other.is_identity() {
            return Err(Error::LabelMismatch("addition needs materialized operators on one fiber".into()));
        }
        let mut out = FiberOperator::from_entries(
            self.grade.clone(),
            self.entries.iter().chain(other.entries.iter()).map(|(k, v)| (k.clone(), *v)),
        );
        out.truncated = self.truncated || other.truncated;
        Ok(out)
    }

    /// Largest entrywise difference; operators must both be materialized.
    pub fn max_abs_diff(&self, other: &FiberOperator) -> f64 {
        let mut keys: Vec<_> = self.entries.keys().collect();
        keys.extend(other.entries.keys());
        keys.into_iter()
            .map(|k| {
                let a = self.entries.get(k).copied().unwrap_or_default();
                let b = other.entries.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `(S ⊗ 1)(T ⊗ 1)` on `E_{s∨t}`, or zero when `s ∨ t = ∞`.
#[derive(Clone, Debug, PartialEq)]
pub enum Aligned {
    Zero,
    Operator(FiberOperator),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SystemStyle {
    WordGraded { dims: Vec<FiberDim> },
    Concatenated { dim: FiberDim },
    VonNeumann { dim: FiberDim, window: Vec<MonoidElement> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductSystem {
    monoid: Monoid,
    style: SystemStyle,
}

fn all_strings(len: usize, alphabet: u32) -> Vec<Vec<u32>> {
    let mut acc = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(acc.len() * alphabet as usize);
        for s in &acc {
            for c in 0..alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        acc = next;
    }
    acc
}

fn checked_pow(base: u64, exp: u64) -> Result<u64> {
    let p = u32::try_from(exp).ok().and_then(|e| base.checked_pow(e));
    match p {
        Some(v) if v <= MAX_BASIS => Ok(v),
        _ => Err(Error::InvalidSystem(format!("fiber of working dimension {base}^{exp} is too large"))),
    }
}

impl ProductSystem {
    /// Word-graded system with one generator dimension per factor.
    pub fn word_graded(monoid: Monoid, dims: Vec<FiberDim>) -> Result<Self> {
        if dims.len() != monoid.rank() {
            return Err(Error::InvalidSystem(format!(
                "{} generator dimensions for {} factors",
                dims.len(),
                monoid.rank()
            )));
        }
        for (f, d) in monoid.factors().iter().zip(&dims) {
            if d.working() == 0 {
                return Err(Error::InvalidSystem("fibers must be nontrivial".into()));
            }
            if f.kind == FactorKind::RationalsDense && !d.is_trivial() {
                return Err(Error::DenseDimension { factor: f.id });
            }
        }
        Ok(ProductSystem { monoid, style: SystemStyle::WordGraded { dims } })
    }

    /// Every fiber one-dimensional.
    pub fn trivial(monoid: Monoid) -> Self {
        let dims = vec![FiberDim::Finite(1); monoid.rank()];
        ProductSystem::word_graded(monoid, dims).expect("trivial system is always valid")
    }

    /// Direct-sum system whose fiber over `s` is `𝓔^{⊗|s|}`, multiplied by concatenation.
    pub fn concatenated(monoid: Monoid, dim: FiberDim) -> Result<Self> {
        if monoid.kind() != MonoidKind::DirectSum && monoid.rank() > 1 {
            return Err(Error::InvalidSystem("concatenated systems live on direct sums".into()));
        }
        if monoid.has_dense_factor() {
            return Err(Error::DenseDimension {
                factor: monoid
                    .factors()
                    .iter()
                    .find(|f| f.kind == FactorKind::RationalsDense)
                    .map(|f| f.id)
                    .unwrap_or(0),
            });
        }
        if dim.working() == 0 {
            return Err(Error::InvalidSystem("fibers must be nontrivial".into()));
        }
        Ok(ProductSystem { monoid, style: SystemStyle::Concatenated { dim } })
    }

    /// Von Neumann system `E^d`, with index sets `P∖sP` cut down to the ideal
    /// `support_bound` whenever a basis has to be enumerated.
    pub fn von_neumann(monoid: Monoid, dim: FiberDim, support_bound: &Truncation) -> Result<Self> {
        let window = monoid.enumerate_ideal(support_bound)?;
        if dim.working() == 0 {
            return Err(Error::InvalidSystem("the local Hilbert space must be nonzero".into()));
        }
        Ok(ProductSystem { monoid, style: SystemStyle::VonNeumann { dim, window } })
    }

    /// Free product of word-graded systems over totally ordered factors.
    pub fn free_product(systems: &[ProductSystem]) -> Result<Self> {
        match systems {
            [] => Err(Error::InvalidSystem("free product of no systems".into())),
            [single] => Ok(single.clone()),
            _ => {
                let mut kinds = Vec::new();
                let mut dims = Vec::new();
                for sys in systems {
                    match (&sys.style, sys.monoid.rank()) {
                        (SystemStyle::WordGraded { dims: d }, 1) => {
                            kinds.push(sys.monoid.factors()[0].kind);
                            dims.push(d[0]);
                        }
                        _ => {
                            return Err(Error::InvalidSystem(
                                "free products take word-graded systems over a single factor".into(),
                            ))
                        }
                    }
                }
                ProductSystem::word_graded(Monoid::new(MonoidKind::FreeProduct, &kinds)?, dims)
            }
        }
    }

    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    pub fn style(&self) -> &SystemStyle {
        &self.style
    }

    /// Generator fiber dimensions (one per factor).
    pub fn generator_dims(&self) -> Vec<FiberDim> {
        match &self.style {
            SystemStyle::WordGraded { dims } => dims.clone(),
            SystemStyle::Concatenated { dim } => vec![*dim; self.monoid.rank()],
            SystemStyle::VonNeumann { .. } => (0..self.monoid.rank())
                .map(|f| {
                    let d = self.dim(&self.monoid.generator(f)).expect("generators are valid");
                    let w = d.working.min(u32::MAX as u64) as u32;
                    if d.infinite {
                        FiberDim::InfiniteTruncated(w)
                    } else {
                        FiberDim::Finite(w)
                    }
                })
                .collect(),
        }
    }

    /// Label of `Ω ∈ E_e`.
    pub fn vacuum_label(&self) -> BasisLabel {
        match self.style {
            SystemStyle::VonNeumann { .. } => BasisLabel::Sparse(BTreeMap::new()),
            _ => BasisLabel::Segments(Vec::new()),
        }
    }

    pub fn vacuum(&self) -> FiberVector {
        FiberVector::basis(MonoidElement::identity(), self.vacuum_label())
    }

    fn check_grade(&self, s: &MonoidElement) -> Result<()> {
        self.monoid.check(s)?;
        if !self.monoid.is_positive(s) {
            return Err(Error::InvalidElement(format!("{s} is not in the positive cone")));
        }
        Ok(())
    }

    /// Symbol-string length carried by one letter in word-graded labels.
    fn seg_len(&self, l: &Letter) -> Result<usize> {
        match self.monoid.factor_kind(l.factor) {
            Some(FactorKind::RationalsDense) => Ok(0),
            _ => Monoid::int_exponent(l)
                .map(|e| e as usize)
                .ok_or_else(|| Error::InvalidElement(format!("exponent of {} is not a natural number", l.factor))),
        }
    }

    fn int_degree(&self, s: &MonoidElement) -> Result<usize> {
        s.letters().iter().map(|l| self.seg_len(l)).sum()
    }

    /// `P∖sP` restricted to the window, and whether the window holds all of it.
    fn vn_index_set(&self, s: &MonoidElement, window: &[MonoidElement]) -> (Vec<MonoidElement>, bool) {
        let set: Vec<_> = window.iter().filter(|r| !self.monoid.leq(s, r)).cloned().collect();
        // over ℕ, P∖sP = {0, …, s−1}
        let complete = s.is_identity()
            || (self.monoid.rank() == 1
                && self.monoid.factors()[0].kind == FactorKind::Integers
                && crate::monoid::scalar(set.len() as i64) == s.degree());
        (set, complete)
    }

    /// `dim E_s`, multiplicative in `s`.
    pub fn dim(&self, s: &MonoidElement) -> Result<Dim> {
        self.check_grade(s)?;
        match &self.style {
            SystemStyle::WordGraded { dims } => {
                let mut working = 1u64;
                let mut infinite = false;
                for l in s.letters() {
                    let d = dims[l.factor];
                    if d.is_trivial() {
                        continue;
                    }
                    let e = self.seg_len(l)? as u64;
                    working = working
                        .checked_mul(checked_pow(d.working() as u64, e)?)
                        .filter(|w| *w <= MAX_BASIS)
                        .ok_or_else(|| Error::InvalidSystem("fiber too large".into()))?;
                    infinite |= d.is_infinite();
                }
                Ok(Dim { working, infinite })
            }
            SystemStyle::Concatenated { dim } => {
                let deg = self.int_degree(s)? as u64;
                Ok(Dim { working: checked_pow(dim.working() as u64, deg)?, infinite: dim.is_infinite() && deg > 0 })
            }
            SystemStyle::VonNeumann { dim, window } => {
                if dim.is_trivial() || s.is_identity() {
                    return Ok(Dim::finite(1));
                }
                let (set, finite) = self.vn_index_set(s, window);
                Ok(Dim {
                    working: checked_pow(dim.working() as u64, set.len() as u64)?,
                    infinite: dim.is_infinite() || !finite,
                })
            }
        }
    }

    /// Canonical basis of `E_s` (working part for infinite fibers).
    pub fn basis(&self, s: &MonoidElement) -> Result<Vec<BasisLabel>> {
        self.dim(s)?;
        match &self.style {
            SystemStyle::WordGraded { dims } => {
                let mut acc: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
                for l in s.letters() {
                    let strings = all_strings(self.seg_len(l)?, dims[l.factor].working());
                    let mut next = Vec::with_capacity(acc.len() * strings.len());
                    for prefix in &acc {
                        for st in &strings {
                            let mut segs = prefix.clone();
                            segs.push(st.clone());
                            next.push(segs);
                        }
                    }
                    acc = next;
                }
                Ok(acc.into_iter().map(BasisLabel::Segments).collect())
            }
            SystemStyle::Concatenated { dim } => {
                let deg = self.int_degree(s)?;
                Ok(all_strings(deg, dim.working()).iter().map(|w| BasisLabel::word(w)).collect())
            }
            SystemStyle::VonNeumann { dim, window } => {
                let (set, _) = self.vn_index_set(s, window);
                let mut acc = vec![BTreeMap::new()];
                for r in &set {
                    let mut next = Vec::with_capacity(acc.len() * dim.working() as usize);
                    for m in &acc {
                        for v in 0..dim.working() {
                            let mut m2: BTreeMap<MonoidElement, u32> = m.clone();
                            if v != 0 {
                                m2.insert(r.clone(), v);
                            }
                            next.push(m2);
                        }
                    }
                    acc = next;
                }
                let mut out: Vec<_> = acc.into_iter().map(BasisLabel::Sparse).collect();
                out.sort();
                Ok(out)
            }
        }
    }

    /// Checks that a label has the structure required by grade `s`.
    pub fn check_label(&self, s: &MonoidElement, label: &BasisLabel) -> Result<()> {
        self.check_grade(s)?;
        let bad = |why: &str| Err(Error::LabelMismatch(format!("{label} at grade {s}: {why}")));
        match (&self.style, label) {
            (SystemStyle::WordGraded { dims }, BasisLabel::Segments(segs)) => {
                if segs.len() != s.len() {
                    return bad("one segment per letter expected");
                }
                for (l, seg) in s.letters().iter().zip(segs) {
                    if seg.len() != self.seg_len(l)? {
                        return bad("segment length differs from exponent");
                    }
                    let d = dims[l.factor];
                    if !d.is_infinite() && seg.iter().any(|&c| c >= d.working()) {
                        return bad("symbol exceeds fiber dimension");
                    }
                }
                Ok(())
            }
            (SystemStyle::Concatenated { dim }, BasisLabel::Segments(segs)) => {
                let deg = self.int_degree(s)?;
                let ok_shape = match segs.as_slice() {
                    [] => deg == 0,
                    [w] => w.len() == deg && deg > 0,
                    _ => false,
                };
                if !ok_shape {
                    return bad("expected one string of length equal to the degree");
                }
                if !dim.is_infinite() && segs.iter().flatten().any(|&c| c >= dim.working()) {
                    return bad("symbol exceeds fiber dimension");
                }
                Ok(())
            }
            (SystemStyle::VonNeumann { dim, .. }, BasisLabel::Sparse(map)) => {
                for (r, &v) in map {
                    self.monoid.check(r)?;
                    if !self.monoid.is_positive(r) || self.monoid.leq(s, r) {
                        return bad("support point outside P∖sP");
                    }
                    if v == 0 || (!dim.is_infinite() && v >= dim.working()) {
                        return bad("symbol out of range");
                    }
                }
                Ok(())
            }
            _ => bad("label kind does not match the system style"),
        }
    }

    /// Product of basis vectors: `(s, x)·(t, y) = (st, xy)`.
    pub fn multiply_labels(
        &self,
        s: &MonoidElement,
        x: &BasisLabel,
        t: &MonoidElement,
        y: &BasisLabel,
    ) -> (MonoidElement, BasisLabel) {
        let st = self.monoid.multiply(s, t);
        let label = match (&self.style, x, y) {
            (SystemStyle::WordGraded { .. }, BasisLabel::Segments(a), BasisLabel::Segments(b)) => {
                match self.monoid.kind() {
                    MonoidKind::FreeProduct => {
                        let mut segs = a.clone();
                        let merge = matches!((s.last(), t.first()), (Some(l), Some(f)) if l.factor == f.factor);
                        let mut rest = b.iter();
                        if merge {
                            let head = rest.next().expect("merged letter has a segment");
                            segs.last_mut().expect("merged letter has a segment").extend_from_slice(head);
                        }
                        segs.extend(rest.cloned());
                        BasisLabel::Segments(segs)
                    }
                    MonoidKind::DirectSum => {
                        let mut by_factor: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
                        for (l, seg) in s.letters().iter().zip(a).chain(t.letters().iter().zip(b)) {
                            by_factor.entry(l.factor).or_default().extend_from_slice(seg);
                        }
                        BasisLabel::Segments(
                            st.letters().iter().map(|l| by_factor.remove(&l.factor).unwrap_or_default()).collect(),
                        )
                    }
                }
            }
            (SystemStyle::Concatenated { .. }, BasisLabel::Segments(a), BasisLabel::Segments(b)) => {
                BasisLabel::word(&[a.concat(), b.concat()].concat())
            }
            (SystemStyle::VonNeumann { .. }, BasisLabel::Sparse(eta), BasisLabel::Sparse(zeta)) => {
                let mut gamma = eta.clone();
                for (a, &v) in zeta {
                    gamma.insert(self.monoid.multiply(s, a), v);
                }
                BasisLabel::Sparse(gamma)
            }
            _ => panic!("label kinds do not match the system style"),
        };
        (st, label)
    }

    /// `xy ∈ E_{p(x)p(y)}`, extended bilinearly.
    pub fn multiply_vectors(&self, x: &FiberVector, y: &FiberVector) -> FiberVector {
        let grade = self.monoid.multiply(&x.grade, &y.grade);
        FiberVector::from_terms(
            grade,
            x.coords.iter().flat_map(|(kx, cx)| {
                y.coords.iter().map(move |(ky, cy)| {
                    (self.multiply_labels(&x.grade, kx, &y.grade, ky).1, cx * cy)
                })
            }),
        )
    }

    /// Splits a basis label of `E_u` as a product of labels of `E_s` and `E_{s⁻¹u}`.
    pub fn factor_label(
        &self,
        u: &MonoidElement,
        s: &MonoidElement,
        label: &BasisLabel,
    ) -> Result<(BasisLabel, BasisLabel)> {
        let q = self.monoid.left_quotient(s, u)?;
        if s.is_identity() {
            return Ok((self.vacuum_label(), label.clone()));
        }
        match (&self.style, label) {
            (SystemStyle::WordGraded { .. }, BasisLabel::Segments(segs)) => match self.monoid.kind() {
                MonoidKind::FreeProduct => {
                    let m = s.len();
                    let last = s.last().expect("s is not the identity");
                    let cut = self.seg_len(last)?;
                    let mut left: Vec<Vec<u32>> = segs[..m - 1].to_vec();
                    let split = &segs[m - 1];
                    left.push(split[..cut].to_vec());
                    let mut right = Vec::new();
                    if u.letters()[m - 1].exponent != last.exponent {
                        right.push(split[cut..].to_vec());
                    }
                    right.extend(segs[m..].iter().cloned());
                    Ok((BasisLabel::Segments(left), BasisLabel::Segments(right)))
                }
                MonoidKind::DirectSum => {
                    let mut left = Vec::new();
                    let mut rest: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
                    for (l, seg) in u.letters().iter().zip(segs) {
                        let cut = match s.letters().iter().find(|x| x.factor == l.factor) {
                            Some(x) => self.seg_len(x)?,
                            None => 0,
                        };
                        if s.letters().iter().any(|x| x.factor == l.factor) {
                            left.push(seg[..cut].to_vec());
                        }
                        rest.insert(l.factor, seg[cut..].to_vec());
                    }
                    let right = q
                        .letters()
                        .iter()
                        .map(|l| rest.remove(&l.factor).unwrap_or_default())
                        .collect();
                    Ok((BasisLabel::Segments(left), BasisLabel::Segments(right)))
                }
            },
            (SystemStyle::Concatenated { .. }, BasisLabel::Segments(_)) => {
                let w = label.flat_symbols().expect("segment label");
                let cut = self.int_degree(s)?;
                Ok((BasisLabel::word(&w[..cut]), BasisLabel::word(&w[cut..])))
            }
            (SystemStyle::VonNeumann { .. }, BasisLabel::Sparse(gamma)) => {
                let mut eta = BTreeMap::new();
                let mut zeta = BTreeMap::new();
                for (r, &v) in gamma {
                    if self.monoid.leq(s, r) {
                        zeta.insert(self.monoid.left_quotient(s, r)?, v);
                    } else {
                        eta.insert(r.clone(), v);
                    }
                }
                Ok((BasisLabel::Sparse(eta), BasisLabel::Sparse(zeta)))
            }
            _ => Err(Error::LabelMismatch(format!("{label} does not match the system style"))),
        }
    }

    /// The bijection `basis(E_u) ↔ basis(E_s) × basis(E_{s⁻¹u})`.
    pub fn factor_basis(
        &self,
        u: &MonoidElement,
        s: &MonoidElement,
    ) -> Result<Vec<(BasisLabel, (BasisLabel, BasisLabel))>> {
        self.monoid.left_quotient(s, u)?;
        self.basis(u)?
            .into_iter()
            .map(|k| {
                let parts = self.factor_label(u, s, &k)?;
                Ok((k, parts))
            })
            .collect()
    }

    /// Expands an identity operator on a finite fiber into explicit entries.
    pub fn materialize(&self, op: &FiberOperator) -> Result<FiberOperator> {
        if !op.is_identity() {
            return Ok(op.clone());
        }
        let d = self.dim(&op.grade)?;
        let mut out = FiberOperator::from_entries(
            op.grade.clone(),
            self.basis(&op.grade)?.into_iter().map(|k| ((k.clone(), k), C64::new(1.0, 0.0))),
        );
        out.truncated = op.truncated || d.infinite;
        Ok(out)
    }

    /// `S ⊗ 1^{s⁻¹u}` on `E_u`.
    pub fn promote(&self, op: &FiberOperator, u: &MonoidElement) -> Result<FiberOperator> {
        let s = &op.grade;
        let q = self.monoid.left_quotient(s, u)?;
        if op.is_identity() {
            let mut id = FiberOperator::identity(u.clone());
            id.truncated = op.truncated;
            return Ok(id);
        }
        let qdim = self.dim(&q)?;
        let rights = self.basis(&q)?;
        let q = &q;
        let mut out = FiberOperator::from_entries(
            u.clone(),
            op.entries.iter().flat_map(|((k1, k2), v)| {
                rights.iter().map(move |r| {
                    let (_, a) = self.multiply_labels(s, k1, q, r);
                    let (_, b) = self.multiply_labels(s, k2, q, r);
                    ((a, b), *v)
                })
            }),
        );
        out.truncated = op.truncated || (qdim.infinite && !q.is_identity());
        Ok(out)
    }

    /// `1^t ⊗ S` on `E_{ts}`.
    pub fn promote_left(&self, op: &FiberOperator, t: &MonoidElement) -> Result<FiberOperator> {
        let s = &op.grade;
        let ts = self.monoid.multiply(t, s);
        if op.is_identity() {
            let mut id = FiberOperator::identity(ts);
            id.truncated = op.truncated;
            return Ok(id);
        }
        let tdim = self.dim(t)?;
        let lefts = self.basis(t)?;
        let mut out = FiberOperator::from_entries(
            ts,
            op.entries.iter().flat_map(|((k1, k2), v)| {
                lefts.iter().map(move |r| {
                    let (_, a) = self.multiply_labels(t, r, s, k1);
                    let (_, b) = self.multiply_labels(t, r, s, k2);
                    ((a, b), *v)
                })
            }),
        );
        out.truncated = op.truncated || (tdim.infinite && !t.is_identity());
        Ok(out)
    }

    /// `(S ⊗ 1)(T ⊗ 1)` on `E_{s∨t}`.
    ///
    /// When `s ≤ t` or `t ≤ s` the product is `(S ⊗ 1)T` or `S(T ⊗ 1)` and is
    /// evaluated exactly from the entries of the finite-rank factor. For proper
    /// joins the sum over the basis of `E_{t⁻¹(s∨t)}` is formed, and flagged as
    /// truncated when that fiber is infinite.
    pub fn compact_align(&self, s_op: &FiberOperator, t_op: &FiberOperator) -> Result<Aligned> {
        let (s, t) = (&s_op.grade, &t_op.grade);
        let j = match self.monoid.join(s, t) {
            Join::Infinity => return Ok(Aligned::Zero),
            Join::Finite(j) => j,
        };
        let flag = s_op.truncated || t_op.truncated;
        let result = if s_op.is_identity() && t_op.is_identity() {
            let mut id = FiberOperator::identity(j);
            id.truncated = flag;
            id
        } else if s_op.is_identity() {
            self.promote(t_op, &j)?
        } else if t_op.is_identity() {
            self.promote(s_op, &j)?
        } else if self.monoid.leq(s, t) {
            // (S ⊗ 1) T: push each column of T through S ⊗ 1.
            let s_cols = s_op.by_column();
            let mut out = FiberOperator::zero(j.clone());
            for ((k1, k2), c) in &t_op.entries {
                let (a, r) = self.factor_label(t, s, k1)?;
                if let Some(col) = s_cols.get(&a) {
                    let q = self.monoid.left_quotient(s, t)?;
                    for (a2, c2) in col {
                        let (_, row) = self.multiply_labels(s, a2, &q, &r);
                        *out.entries.entry((row, k2.clone())).or_insert_with(C64::zero) += c2 * c;
                    }
                }
            }
            prune(&mut out.entries);
            out.truncated = flag;
            out
        } else if self.monoid.leq(t, s) {
            // S (T ⊗ 1): pull each row of S back through T ⊗ 1.
            let t_rows = t_op.by_row();
            let q = self.monoid.left_quotient(t, s)?;
            let mut out = FiberOperator::zero(j.clone());
            for ((i, k), c) in &s_op.entries {
                let (a, r) = self.factor_label(s, t, k)?;
                if let Some(row) = t_rows.get(&a) {
                    for (a2, c2) in row {
                        let (_, col) = self.multiply_labels(t, a2, &q, &r);
                        *out.entries.entry((i.clone(), col)).or_insert_with(C64::zero) += c * c2;
                    }
                }
            }
            prune(&mut out.entries);
            out.truncated = flag;
            out
        } else {
            let qt = self.monoid.left_quotient(t, &j)?;
            let qs = self.monoid.left_quotient(s, &j)?;
            let qt_dim = self.dim(&qt)?;
            let s_cols = s_op.by_column();
            let rights = self.basis(&qt)?;
            let mut out = FiberOperator::zero(j.clone());
            for ((k1, k2), c) in &t_op.entries {
                for r in &rights {
                    let (_, col) = self.multiply_labels(t, k2, &qt, r);
                    let (_, v) = self.multiply_labels(t, k1, &qt, r);
                    let (a, r2) = self.factor_label(&j, s, &v)?;
                    if let Some(scol) = s_cols.get(&a) {
                        for (a2, c2) in scol {
                            let (_, row) = self.multiply_labels(s, a2, &qs, &r2);
                            *out.entries.entry((row, col.clone())).or_insert_with(C64::zero) += c2 * c;
                        }
                    }
                }
            }
            prune(&mut out.entries);
            out.truncated = flag || qt_dim.infinite;
            out
        };
        Ok(Aligned::Operator(result))
    }
}
