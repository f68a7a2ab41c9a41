//! The Wick algebra: finite combinations of monomials `i(x)i(y)*` over basis
//! labels, multiplied with the alignment formula
//! `i(w)*i(x) = Σ_{f,g} ⟨xg, wf⟩ i(f)i(g)*`, where `f` and `g` run over bases
//! of `E_{p(w)⁻¹J}` and `E_{p(x)⁻¹J}` with `J = p(w) ∨ p(x)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::monoid::{Join, Monoid, MonoidElement};
use crate::product_system::{Aligned, BasisLabel, FiberOperator, FiberVector, ProductSystem, C64, PRUNE_TOL};

/// Default tolerance for comparing Wick elements.
pub const WICK_EQ_TOL: f64 = 1e-10;

/// Outcome of a computation that may have to cut an infinite sum short.
#[derive(Clone, Debug, PartialEq)]
pub enum Computed<T> {
    Exact(T),
    /// The value was assembled from a working-dimension truncation of an
    /// infinite-dimensional fiber and is not the true result.
    Inexact { truncated: T, reason: String },
}

impl<T> Computed<T> {
    pub fn is_exact(&self) -> bool {
        matches!(self, Computed::Exact(_))
    }

    pub fn value(&self) -> &T {
        match self {
            Computed::Exact(v) | Computed::Inexact { truncated: v, .. } => v,
        }
    }

    pub fn into_value(self) -> T {
        match self {
            Computed::Exact(v) | Computed::Inexact { truncated: v, .. } => v,
        }
    }

    /// The exact value, or the inexactness reason.
    pub fn exact(self) -> std::result::Result<T, String> {
        match self {
            Computed::Exact(v) => Ok(v),
            Computed::Inexact { reason, .. } => Err(reason),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Computed<U> {
        match self {
            Computed::Exact(v) => Computed::Exact(f(v)),
            Computed::Inexact { truncated, reason } => Computed::Inexact { truncated: f(truncated), reason },
        }
    }

    fn with_flag(value: T, reason: Option<String>) -> Self {
        match reason {
            None => Computed::Exact(value),
            Some(reason) => Computed::Inexact { truncated: value, reason },
        }
    }
}

/// Key of the monomial `i(left@left_grade) i(right@right_grade)*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialKey {
    pub left_grade: MonoidElement,
    pub left: BasisLabel,
    pub right_grade: MonoidElement,
    pub right: BasisLabel,
}

impl MonomialKey {
    pub fn new(left_grade: MonoidElement, left: BasisLabel, right_grade: MonoidElement, right: BasisLabel) -> Self {
        MonomialKey { left_grade, left, right_grade, right }
    }

    pub fn adjoint(&self) -> MonomialKey {
        MonomialKey::new(self.right_grade.clone(), self.right.clone(), self.left_grade.clone(), self.left.clone())
    }

    pub fn is_diagonal(&self) -> bool {
        self.left_grade == self.right_grade
    }

    /// Gauge degree `p(x)p(y)⁻¹ ∈ G`.
    pub fn gauge_degree(&self, monoid: &Monoid) -> MonoidElement {
        monoid.multiply(&self.left_grade, &monoid.invert(&self.right_grade))
    }
}

/// Canonical finite linear combination of Wick monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WickElement {
    terms: BTreeMap<MonomialKey, C64>,
}

impl WickElement {
    pub fn zero() -> Self {
        WickElement::default()
    }

    /// Merges duplicate keys and drops negligible coefficients.
    pub fn canonicalize(raw: impl IntoIterator<Item = (MonomialKey, C64)>) -> Self {
        let mut terms: BTreeMap<MonomialKey, C64> = BTreeMap::new();
        for (k, c) in raw {
            *terms.entry(k).or_insert_with(C64::zero) += c;
        }
        terms.retain(|_, c| c.norm() >= PRUNE_TOL);
        WickElement { terms }
    }

    /// `1 = i(Ω)i(Ω)*`.
    pub fn identity(sys: &ProductSystem) -> Self {
        let e = MonoidElement::identity();
        let omega = sys.vacuum_label();
        WickElement::monomial(MonomialKey::new(e.clone(), omega.clone(), e, omega), C64::new(1.0, 0.0))
    }

    pub fn monomial(key: MonomialKey, coeff: C64) -> Self {
        WickElement::canonicalize([(key, coeff)])
    }

    /// `i(x)i(y)*` for arbitrary fiber vectors, expanded over basis labels.
    pub fn from_vectors(x: &FiberVector, y: &FiberVector) -> Self {
        WickElement::canonicalize(x.coords.iter().flat_map(|(kx, cx)| {
            y.coords.iter().map(move |(ky, cy)| {
                (MonomialKey::new(x.grade.clone(), kx.clone(), y.grade.clone(), ky.clone()), cx * cy.conj())
            })
        }))
    }

    pub fn terms(&self) -> &BTreeMap<MonomialKey, C64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &MonomialKey) -> C64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    pub fn adjoint(&self) -> Self {
        WickElement::canonicalize(self.terms.iter().map(|(k, c)| (k.adjoint(), c.conj())))
    }

    pub fn add(&self, other: &WickElement) -> Self {
        WickElement::canonicalize(self.terms.iter().chain(&other.terms).map(|(k, c)| (k.clone(), *c)))
    }

    pub fn sub(&self, other: &WickElement) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        WickElement::canonicalize(self.terms.iter().map(|(k, v)| (k.clone(), v * c)))
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &WickElement) -> f64 {
        self.sub(other).terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &WickElement, tol: f64) -> bool {
        let keys: BTreeSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|k| (self.coeff(k) - other.coeff(k)).norm() <= tol)
    }

    /// `Φ_δ`: keeps the monomials with equal left and right grades.
    pub fn phi_delta(&self) -> Self {
        WickElement {
            terms: self.terms.iter().filter(|(k, _)| k.is_diagonal()).map(|(k, c)| (k.clone(), *c)).collect(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(MonomialKey::is_diagonal)
    }

    /// Distinct gauge degrees of the terms.
    pub fn gauge_degrees(&self, monoid: &Monoid) -> BTreeSet<MonoidElement> {
        self.terms.keys().map(|k| k.gauge_degree(monoid)).collect()
    }

    /// Renders the element in the expression syntax accepted by [`parse`](WickElement::parse).
    pub fn display<'a>(&'a self, monoid: &'a Monoid) -> impl fmt::Display + 'a {
        DisplayWick { elem: self, monoid }
    }

    /// Parses `c i(s:label)i*(t:label) + ...`.
    ///
    /// Coefficients are written `re`, `imj`, `re+imj` or omitted; labels use
    /// base-36 symbols with `|` between letter segments, or `{r=v,...}` for
    /// von Neumann systems.
    pub fn parse(text: &str, sys: &ProductSystem) -> Result<Self> {
        let mut terms = Vec::new();
        let mut rest = text.trim();
        if rest.is_empty() || rest == "0" {
            return Ok(WickElement::zero());
        }
        let mut sign = 1.0;
        loop {
            let (coeff, after) = parse_coefficient(rest)?;
            let after = after.trim_start().trim_start_matches('*').trim_start();
            let (key, after) = parse_monomial(after, sys)?;
            terms.push((key, coeff * sign));
            rest = after.trim_start();
            if rest.is_empty() {
                break;
            }
            sign = match rest.as_bytes()[0] {
                b'+' => 1.0,
                b'-' => -1.0,
                _ => return Err(Error::Parse(format!("expected + or - before {rest:?}"))),
            };
            rest = rest[1..].trim_start();
        }
        Ok(WickElement::canonicalize(terms))
    }
}

struct DisplayWick<'a> {
    elem: &'a WickElement,
    monoid: &'a Monoid,
}

fn format_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}j", c.im)
    } else {
        format!("({}{:+}j)", c.re, c.im)
    }
}

impl fmt::Display for DisplayWick<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.elem.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(
                f,
                "{} i({}:{})i*({}:{})",
                format_coeff(*c),
                self.monoid.format(&k.left_grade),
                k.left,
                self.monoid.format(&k.right_grade),
                k.right
            )?;
        }
        Ok(())
    }
}

/// Reads an optional coefficient: `2`, `-1.5`, `3j`, `(1+2j)`, `1+2j`.
fn parse_coefficient(text: &str) -> Result<(C64, &str)> {
    let text = text.trim_start();
    if text.starts_with("i(") || text.starts_with("i*(") {
        return Ok((C64::new(1.0, 0.0), text));
    }
    if let Some(inner) = text.strip_prefix('(') {
        let close = inner.find(')').ok_or_else(|| Error::Parse("unclosed coefficient".into()))?;
        return Ok((parse_complex(&inner[..close])?, &inner[close + 1..]));
    }
    let end = [text.find("i("), text.find("i*(")]
        .into_iter()
        .flatten()
        .min()
        .ok_or_else(|| Error::Parse(format!("expected a monomial in {text:?}")))?;
    let raw = text[..end].trim().trim_end_matches('*').trim();
    let c = match raw {
        "" | "+" => C64::new(1.0, 0.0),
        "-" => C64::new(-1.0, 0.0),
        _ => parse_complex(raw)?,
    };
    Ok((c, &text[end..]))
}

fn parse_complex(raw: &str) -> Result<C64> {
    let raw: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad coefficient {raw:?}"));
    if let Some(body) = raw.strip_suffix('j') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(i) => (body[..i].parse::<f64>().map_err(|_| bad())?, &body[i..]),
            None => (0.0, body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => s.parse::<f64>().map_err(|_| bad())?,
        };
        Ok(C64::new(re, im))
    } else {
        Ok(C64::new(raw.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

/// Parses `i(s:label)i*(t:label)`; either factor may be omitted (`i(x)`, `i*(y)`).
fn parse_monomial<'a>(text: &'a str, sys: &ProductSystem) -> Result<(MonomialKey, &'a str)> {
    let mut rest = text;
    let vac = (MonoidElement::identity(), sys.vacuum_label());
    let mut left = None;
    let mut right = None;
    loop {
        rest = rest.trim_start();
        let star = if rest.starts_with("i*(") {
            true
        } else if rest.starts_with("i(") {
            false
        } else {
            break;
        };
        let open = if star { 3 } else { 2 };
        let close = matching_paren(&rest[open..])
            .ok_or_else(|| Error::Parse(format!("unclosed factor in {rest:?}")))?;
        let inner = &rest[open..open + close];
        let (g, l) = inner
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected grade:label in {inner:?}")))?;
        let grade = sys.monoid().parse(g)?;
        let label = BasisLabel::parse(l, sys.monoid())?;
        sys.check_label(&grade, &label)?;
        let slot = if star { &mut right } else { &mut left };
        if slot.is_some() {
            return Err(Error::Parse(format!("repeated factor in {text:?}")));
        }
        *slot = Some((grade, label));
        rest = &rest[open + close + 1..];
        if star {
            break;
        }
    }
    if left.is_none() && right.is_none() {
        return Err(Error::Parse(format!("expected i(..) or i*(..) in {text:?}")));
    }
    let (lg, ll) = left.unwrap_or_else(|| vac.clone());
    let (rg, rl) = right.unwrap_or(vac);
    Ok((MonomialKey::new(lg, ll, rg, rl), rest))
}

fn matching_paren(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' if depth == 0 => return Some(i),
            ')' | '}' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    None
}

/// `i(w)*i(x)` for basis labels, as a list of `(f, g)` with
/// `i(w)*i(x) = Σ i(f)i(g)*`; the flag reports a truncated sum.
fn annihilate_create(
    sys: &ProductSystem,
    sw: &MonoidElement,
    w: &BasisLabel,
    sx: &MonoidElement,
    x: &BasisLabel,
) -> Result<Option<(MonoidElement, MonoidElement, Vec<(BasisLabel, BasisLabel)>, Option<String>)>> {
    let monoid = sys.monoid();
    let j = match monoid.join(sw, sx) {
        Join::Infinity => return Ok(None),
        Join::Finite(j) => j,
    };
    let qw = monoid.left_quotient(sw, &j)?;
    let qx = monoid.left_quotient(sx, &j)?;
    let dim_qw = sys.dim(&qw)?;
    let dim_qx = sys.dim(&qx)?;
    let mut pairs = Vec::new();
    // Iterate whichever quotient fiber is finite; each basis vector of it
    // determines at most one partner on the other side.
    let iterate_x_side = !dim_qx.infinite || dim_qw.infinite;
    let reason = (dim_qx.infinite && dim_qw.infinite).then(|| {
        format!(
            "join {} of {} and {} has infinite-dimensional quotient fibers on both sides",
            monoid.format(&j),
            monoid.format(sw),
            monoid.format(sx)
        )
    });
    if iterate_x_side {
        for g in sys.basis(&qx)? {
            let (_, xg) = sys.multiply_labels(sx, x, &qx, &g);
            let (w2, f) = sys.factor_label(&j, sw, &xg)?;
            if &w2 == w {
                pairs.push((f, g));
            }
        }
    } else {
        for f in sys.basis(&qw)? {
            let (_, wf) = sys.multiply_labels(sw, w, &qw, &f);
            let (x2, g) = sys.factor_label(&j, sx, &wf)?;
            if &x2 == x {
                pairs.push((f, g));
            }
        }
    }
    Ok(Some((qw, qx, pairs, reason)))
}

/// Product of two Wick elements.
pub fn wick_multiply(sys: &ProductSystem, a: &WickElement, b: &WickElement) -> Result<Computed<WickElement>> {
    let mut raw = Vec::new();
    let mut reason = None;
    // Memoize i(w)*i(x) across term pairs.
    let mut cache: BTreeMap<(&MonoidElement, &BasisLabel, &MonoidElement, &BasisLabel), _> = BTreeMap::new();
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            let cache_key = (&ka.right_grade, &ka.right, &kb.left_grade, &kb.left);
            if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(cache_key) {
                let v = annihilate_create(sys, &ka.right_grade, &ka.right, &kb.left_grade, &kb.left)?;
                e.insert(v);
            }
            let Some((qw, qx, pairs, why)) = &cache[&cache_key] else { continue };
            if reason.is_none() {
                reason.clone_from(why);
            }
            for (f, g) in pairs {
                let (lg, l) = sys.multiply_labels(&ka.left_grade, &ka.left, qw, f);
                let (rg, r) = sys.multiply_labels(&kb.right_grade, &kb.right, qx, g);
                raw.push((MonomialKey::new(lg, l, rg, r), ca * cb));
            }
        }
    }
    Ok(Computed::with_flag(WickElement::canonicalize(raw), reason))
}

/// `ρ_s(S) = Σ S(k₁,k₂) i(k₁)i(k₂)*`.
pub fn rho_of_compact(sys: &ProductSystem, op: &FiberOperator) -> Result<WickElement> {
    let dense = if op.is_identity() {
        if sys.dim(&op.grade)?.infinite {
            return Err(Error::NotCompact(format!(
                "identity on the infinite-dimensional fiber over {}",
                sys.monoid().format(&op.grade)
            )));
        }
        sys.materialize(op)?
    } else {
        op.clone()
    };
    let s = &op.grade;
    Ok(WickElement::canonicalize(
        dense
            .entries
            .iter()
            .map(|((k1, k2), v)| (MonomialKey::new(s.clone(), k1.clone(), s.clone(), k2.clone()), *v)),
    ))
}

/// Checks `ρ_s(S)ρ_t(T) = ρ_{s∨t}((S⊗1)(T⊗1))`, zero when `s∨t = ∞`.
pub fn covariance_check_symbolic(
    sys: &ProductSystem,
    s_op: &FiberOperator,
    t_op: &FiberOperator,
) -> Result<Computed<bool>> {
    let lhs = wick_multiply(sys, &rho_of_compact(sys, s_op)?, &rho_of_compact(sys, t_op)?)?;
    let (rhs, truncated) = match sys.compact_align(s_op, t_op)? {
        Aligned::Zero => (WickElement::zero(), false),
        Aligned::Operator(op) => {
            let t = op.truncated;
            (rho_of_compact(sys, &op)?, t)
        }
    };
    let equal = lhs.value().approx_eq(&rhs, WICK_EQ_TOL);
    Ok(match lhs {
        Computed::Inexact { reason, .. } => Computed::Inexact { truncated: equal, reason },
        Computed::Exact(_) if truncated => {
            Computed::Inexact { truncated: equal, reason: "aligned product was truncated".into() }
        }
        Computed::Exact(_) => Computed::Exact(equal),
    })
}

/// Grade `a` with `‖X‖ = ‖T_a‖`, and the norm itself.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalNormCertificate {
    pub a: MonoidElement,
    pub value: f64,
    pub matrix_dim: usize,
}

/// Closure of a finite set of grades under finite joins.
pub fn join_closure(monoid: &Monoid, grades: &BTreeSet<MonoidElement>) -> BTreeSet<MonoidElement> {
    let mut closed = grades.clone();
    let mut frontier: Vec<MonoidElement> = grades.iter().cloned().collect();
    while let Some(s) = frontier.pop() {
        let current: Vec<MonoidElement> = closed.iter().cloned().collect();
        for t in current {
            if let Join::Finite(j) = monoid.join(&s, &t) {
                if closed.insert(j.clone()) {
                    frontier.push(j);
                }
            }
        }
    }
    closed
}

/// `T_a = Σ_{s_j ≤ a} (x_j ⊗ ȳ_j) ⊗ 1` for the diagonal element `X = Σ c_j i(x_j)i(y_j)*`.
pub fn assemble_t_a(sys: &ProductSystem, x: &WickElement, a: &MonoidElement) -> Result<FiberOperator> {
    let monoid = sys.monoid();
    let mut acc = FiberOperator::zero(a.clone());
    let mut truncated = false;
    for (k, c) in x.terms() {
        if !monoid.leq(&k.left_grade, a) {
            continue;
        }
        let op = FiberOperator::from_entries(k.left_grade.clone(), [((k.left.clone(), k.right.clone()), *c)]);
        let promoted = sys.promote(&op, a)?;
        truncated |= promoted.truncated;
        acc = acc.add(&promoted)?;
    }
    acc.truncated = truncated;
    Ok(acc)
}

/// Norm of a diagonal element through the block operators `T_a`.
///
/// The Fock block of `X` on `E_t` is `T_a ⊗ 1` with `a = ∨{s_j : s_j ≤ t}`,
/// so the maximum of `‖T_a‖` over the join closure of the appearing grades
/// is the norm of `X`.
pub fn norm_diagonal(sys: &ProductSystem, x: &WickElement) -> Result<Computed<DiagonalNormCertificate>> {
    if !x.is_diagonal() {
        return Err(Error::InvalidElement("norm_diagonal needs a gauge-diagonal element".into()));
    }
    let monoid = sys.monoid();
    let grades: BTreeSet<MonoidElement> = x.terms().keys().map(|k| k.left_grade.clone()).collect();
    let mut best = DiagonalNormCertificate { a: MonoidElement::identity(), value: 0.0, matrix_dim: 1 };
    let mut reason = None;
    for a in join_closure(monoid, &grades) {
        let t_a = assemble_t_a(sys, x, &a)?;
        if t_a.truncated && reason.is_none() {
            reason = Some(format!(
                "T_{} involves an infinite-dimensional quotient fiber",
                monoid.format(&a)
            ));
        }
        let labels: BTreeSet<&BasisLabel> = t_a.entries.keys().flat_map(|(r, c)| [r, c]).collect();
        let index: BTreeMap<&BasisLabel, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let m = SparseMatrix::from_triplets(
            labels.len(),
            t_a.entries.iter().map(|((r, c), v)| (index[r], index[c], *v)),
        );
        let value = m.norm().value;
        if value > best.value {
            best = DiagonalNormCertificate { a, value, matrix_dim: labels.len() };
        }
    }
    Ok(Computed::with_flag(best, reason))
}
