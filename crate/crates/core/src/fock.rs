//! Matrix representations of product systems: the truncated left-regular
//! (Fock) representation and Cuntz-type families on a truncated `ℓ²(ℕ)`.
//!
//! Truncation is tracked per column and per row. Column `j` of an operator is
//! *exact* when the true operator maps basis vector `j` into the truncated
//! space, so the stored column is the true column; rows likewise for the
//! adjoint. An entry is trustworthy when its row or its column is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::monoid::{Monoid, MonoidElement, MonoidKind, Truncation};
use crate::product_system::{BasisLabel, FiberOperator, FiberVector, ProductSystem, SystemStyle, C64};
use crate::wick::WickElement;

/// Enumerated truncated Fock space `⊕_{s ∈ ideal} E_s`.
#[derive(Clone, Debug)]
pub struct FockBasis {
    system: ProductSystem,
    bound: Truncation,
    grades: Vec<MonoidElement>,
    grade_pos: BTreeMap<MonoidElement, usize>,
    ranges: Vec<Range<usize>>,
    entries: Vec<(usize, BasisLabel)>,
    index: BTreeMap<(usize, BasisLabel), usize>,
}

impl FockBasis {
    pub fn build(system: &ProductSystem, bound: &Truncation) -> Result<Self> {
        let grades = system.monoid().enumerate_ideal(bound)?;
        let mut grade_pos = BTreeMap::new();
        let mut ranges = Vec::with_capacity(grades.len());
        let mut entries = Vec::new();
        let mut index = BTreeMap::new();
        for (g, s) in grades.iter().enumerate() {
            grade_pos.insert(s.clone(), g);
            let start = entries.len();
            for label in system.basis(s)? {
                index.insert((g, label.clone()), entries.len());
                entries.push((g, label));
            }
            ranges.push(start..entries.len());
        }
        Ok(FockBasis { system: system.clone(), bound: bound.clone(), grades, grade_pos, ranges, entries, index })
    }

    pub fn system(&self) -> &ProductSystem {
        &self.system
    }

    pub fn monoid(&self) -> &Monoid {
        self.system.monoid()
    }

    pub fn bound(&self) -> &Truncation {
        &self.bound
    }

    pub fn grades(&self) -> &[MonoidElement] {
        &self.grades
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_grade(&self, s: &MonoidElement) -> bool {
        self.grade_pos.contains_key(s)
    }

    /// Index range of the block `E_s`.
    pub fn block(&self, s: &MonoidElement) -> Option<Range<usize>> {
        self.grade_pos.get(s).map(|&g| self.ranges[g].clone())
    }

    pub fn index_of(&self, grade: &MonoidElement, label: &BasisLabel) -> Option<usize> {
        let g = *self.grade_pos.get(grade)?;
        self.index.get(&(g, label.clone())).copied()
    }

    pub fn grade_of(&self, i: usize) -> &MonoidElement {
        &self.grades[self.entries[i].0]
    }

    pub fn label_of(&self, i: usize) -> &BasisLabel {
        &self.entries[i].1
    }

    /// Grades `t` such that `rt` stays in the ideal for every `r ∈ P` of degree at most `k`.
    pub fn interior_grades(&self, k: u32) -> Result<BTreeSet<MonoidElement>> {
        let monoid = self.monoid();
        let k_scalar = crate::monoid::scalar(k as i64);
        let shifts: Vec<MonoidElement> = monoid
            .enumerate_ideal(&Truncation::Length(k))?
            .into_iter()
            .filter(|r| r.degree() <= k_scalar)
            .collect();
        Ok(self
            .grades
            .iter()
            .filter(|t| shifts.iter().all(|r| self.contains_grade(&monoid.multiply(r, t))))
            .cloned()
            .collect())
    }

    /// Basis indices whose grade lies in [`interior_grades`](Self::interior_grades)`(k)`.
    pub fn interior_mask(&self, k: u32) -> Result<Vec<bool>> {
        let inner = self.interior_grades(k)?;
        Ok((0..self.len()).map(|i| inner.contains(self.grade_of(i))).collect())
    }

    /// Coordinates of a fiber vector in the truncated space.
    pub fn vector(&self, x: &FiberVector) -> Result<Vec<C64>> {
        let mut v = vec![C64::zero(); self.len()];
        for (label, c) in &x.coords {
            let i = self
                .index_of(&x.grade, label)
                .ok_or_else(|| Error::OutsideTruncation(format!("{}:{label}", self.monoid().format(&x.grade))))?;
            v[i] += c;
        }
        Ok(v)
    }

    pub fn vacuum_index(&self) -> usize {
        0
    }
}

/// Maximum deviation over trustworthy entries, with the number of columns
/// that could be compared in full.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Deviation {
    pub max: f64,
    pub columns: usize,
}

/// A truncated operator together with its exactness data.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub matrix: SparseMatrix,
    exact_cols: Vec<bool>,
    exact_rows: Vec<bool>,
}

impl FockOperator {
    /// Operator whose truncation is known to be exact.
    pub fn exact(matrix: SparseMatrix) -> Self {
        let n = matrix.dim();
        FockOperator { matrix, exact_cols: vec![true; n], exact_rows: vec![true; n] }
    }

    pub fn with_exactness(matrix: SparseMatrix, exact_cols: Vec<bool>, exact_rows: Vec<bool>) -> Self {
        assert_eq!(matrix.dim(), exact_cols.len());
        assert_eq!(matrix.dim(), exact_rows.len());
        FockOperator { matrix, exact_cols, exact_rows }
    }

    pub fn identity(n: usize) -> Self {
        FockOperator::exact(SparseMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        FockOperator::exact(SparseMatrix::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    pub fn col_exact(&self, j: usize) -> bool {
        self.exact_cols[j]
    }

    pub fn row_exact(&self, i: usize) -> bool {
        self.exact_rows[i]
    }

    pub fn trusted(&self, i: usize, j: usize) -> bool {
        self.exact_rows[i] || self.exact_cols[j]
    }

    /// Whether any image fell outside the truncation.
    pub fn truncated(&self) -> bool {
        self.exact_cols.iter().chain(&self.exact_rows).any(|e| !e)
    }

    pub fn mul(&self, other: &FockOperator) -> FockOperator {
        let matrix = self.matrix.mul(&other.matrix);
        let exact_cols = (0..other.dim())
            .map(|j| other.exact_cols[j] && other.matrix.col(j).iter().all(|(k, _)| self.exact_cols[*k]))
            .collect();
        let adj = self.matrix.adjoint();
        let exact_rows = (0..self.dim())
            .map(|i| self.exact_rows[i] && adj.col(i).iter().all(|(k, _)| other.exact_rows[*k]))
            .collect();
        FockOperator { matrix, exact_cols, exact_rows }
    }

    fn combine(&self, matrix: SparseMatrix, other: &FockOperator) -> FockOperator {
        let and = |a: &[bool], b: &[bool]| a.iter().zip(b).map(|(x, y)| *x && *y).collect();
        FockOperator {
            matrix,
            exact_cols: and(&self.exact_cols, &other.exact_cols),
            exact_rows: and(&self.exact_rows, &other.exact_rows),
        }
    }

    pub fn add(&self, other: &FockOperator) -> FockOperator {
        self.combine(self.matrix.add(&other.matrix), other)
    }

    pub fn sub(&self, other: &FockOperator) -> FockOperator {
        self.combine(self.matrix.sub(&other.matrix), other)
    }

    pub fn scale(&self, c: C64) -> FockOperator {
        FockOperator { matrix: self.matrix.scale(c), ..self.clone() }
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            matrix: self.matrix.adjoint(),
            exact_cols: self.exact_rows.clone(),
            exact_rows: self.exact_cols.clone(),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.apply(v)
    }

    /// The matrix with untrustworthy entries removed.
    pub fn trusted_part(&self) -> SparseMatrix {
        self.matrix.filter(|i, j| self.trusted(i, j))
    }

    /// Power-iteration norm of the stored matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm().value
    }

    /// Compares trustworthy entries in the selected columns.
    pub fn deviation(&self, other: &FockOperator, cols: &[bool]) -> Deviation {
        let mut max: f64 = 0.0;
        let mut columns = 0;
        for (j, _) in cols.iter().enumerate().filter(|(_, c)| **c) {
            let whole = self.exact_cols[j] && other.exact_cols[j];
            let rows: BTreeSet<usize> =
                self.matrix.col(j).iter().chain(other.matrix.col(j)).map(|(i, _)| *i).collect();
            if whole {
                columns += 1;
            }
            for i in rows {
                if whole || (self.exact_rows[i] && other.exact_rows[i]) {
                    max = max.max((self.get(i, j) - other.get(i, j)).norm());
                }
            }
        }
        Deviation { max, columns }
    }
}

/// A representation of a product system by matrices on a truncated space.
pub trait Representation {
    fn system(&self) -> &ProductSystem;

    fn dim(&self) -> usize;

    /// `φ(x)` for a basis vector `x = (grade, label)`.
    fn phi_basis(&self, grade: &MonoidElement, label: &BasisLabel) -> Result<FockOperator>;

    /// Grades over which witness searches range.
    fn search_grades(&self) -> Vec<MonoidElement>;

    fn phi(&self, x: &FiberVector) -> Result<FockOperator> {
        let mut acc = FockOperator::zeros(self.dim());
        for (label, c) in &x.coords {
            acc = acc.add(&self.phi_basis(&x.grade, label)?.scale(*c));
        }
        Ok(acc)
    }

    /// `ρ_s(1) = Σ_u φ(u)φ(u)*` over the basis of `E_s`.
    fn rho_proj(&self, s: &MonoidElement) -> Result<FockOperator> {
        let mut acc = FockOperator::zeros(self.dim());
        for u in self.system().basis(s)? {
            let p = self.phi_basis(s, &u)?;
            acc = acc.add(&p.mul(&p.adjoint()));
        }
        Ok(acc)
    }

    /// `ρ_s(S) = Σ S(k₁,k₂) φ(k₁)φ(k₂)*`.
    fn rho_op(&self, op: &FiberOperator) -> Result<FockOperator> {
        if op.is_identity() {
            return self.rho_proj(&op.grade);
        }
        let mut acc = FockOperator::zeros(self.dim());
        for ((k1, k2), v) in &op.entries {
            let a = self.phi_basis(&op.grade, k1)?;
            let b = self.phi_basis(&op.grade, k2)?;
            acc = acc.add(&a.mul(&b.adjoint()).scale(*v));
        }
        Ok(acc)
    }

    /// `α_t(A) = Σ_u φ(u)Aφ(u)*` over the basis of `E_t`.
    fn alpha(&self, t: &MonoidElement, a: &FockOperator) -> Result<FockOperator> {
        let mut acc = FockOperator::zeros(self.dim());
        for u in self.system().basis(t)? {
            let p = self.phi_basis(t, &u)?;
            acc = acc.add(&p.mul(a).mul(&p.adjoint()));
        }
        Ok(acc)
    }

    /// Image of a Wick element: `Σ c φ(x)φ(y)*`.
    fn represent(&self, x: &WickElement) -> Result<FockOperator> {
        let mut cache: BTreeMap<(MonoidElement, BasisLabel), FockOperator> = BTreeMap::new();
        let mut get = |g: &MonoidElement, l: &BasisLabel| -> Result<FockOperator> {
            let key = (g.clone(), l.clone());
            if let Some(op) = cache.get(&key) {
                return Ok(op.clone());
            }
            let op = self.phi_basis(g, l)?;
            cache.insert(key, op.clone());
            Ok(op)
        };
        let mut acc = FockOperator::zeros(self.dim());
        for (k, c) in x.terms() {
            let a = get(&k.left_grade, &k.left)?;
            let b = get(&k.right_grade, &k.right)?;
            acc = acc.add(&a.mul(&b.adjoint()).scale(*c));
        }
        Ok(acc)
    }
}

/// Left-regular representation on the truncated Fock space.
#[derive(Clone, Debug)]
pub struct FockRep {
    basis: FockBasis,
}

impl FockRep {
    pub fn new(system: &ProductSystem, bound: &Truncation) -> Result<Self> {
        Ok(FockRep { basis: FockBasis::build(system, bound)? })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    /// Creation operator `l(x)` on basis vectors: `(t, m) ↦ (p(x)t, x·m)`.
    pub fn fock_phi(&self, x: &FiberVector) -> Result<FockOperator> {
        self.phi(x)
    }

    /// Gauge-diagonal compression: keeps the blocks `E_s → E_s`.
    pub fn expectation_spatial(&self, a: &FockOperator) -> FockOperator {
        let b = &self.basis;
        FockOperator {
            matrix: a.matrix.filter(|i, j| b.entries[i].0 == b.entries[j].0),
            ..a.clone()
        }
    }
}

impl Representation for FockRep {
    fn system(&self) -> &ProductSystem {
        &self.basis.system
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn phi_basis(&self, grade: &MonoidElement, label: &BasisLabel) -> Result<FockOperator> {
        let sys = &self.basis.system;
        sys.check_label(grade, label)?;
        let n = self.dim();
        let mut triplets = Vec::new();
        let mut exact_cols = vec![true; n];
        for (j, (g, m)) in self.basis.entries.iter().enumerate() {
            let (tg, tl) = sys.multiply_labels(grade, label, &self.basis.grades[*g], m);
            match self.basis.index_of(&tg, &tl) {
                Some(i) => triplets.push((i, j, C64::new(1.0, 0.0))),
                None => exact_cols[j] = false,
            }
        }
        Ok(FockOperator::with_exactness(SparseMatrix::from_triplets(n, triplets), exact_cols, vec![true; n]))
    }

    fn search_grades(&self) -> Vec<MonoidElement> {
        self.basis.grades.clone()
    }

    /// Diagonal projection onto the grades `t ≥ s`.
    fn rho_proj(&self, s: &MonoidElement) -> Result<FockOperator> {
        let monoid = self.basis.monoid();
        let diag: Vec<C64> = (0..self.dim())
            .map(|i| if monoid.leq(s, self.basis.grade_of(i)) { C64::new(1.0, 0.0) } else { C64::zero() })
            .collect();
        Ok(FockOperator::exact(SparseMatrix::diagonal(&diag)))
    }

    /// `S ⊗ 1` on every block `E_t` with `t ≥ s`.
    fn rho_op(&self, op: &FiberOperator) -> Result<FockOperator> {
        if op.is_identity() {
            return self.rho_proj(&op.grade);
        }
        let sys = &self.basis.system;
        let monoid = sys.monoid();
        let s = &op.grade;
        let mut cols: BTreeMap<&BasisLabel, Vec<(&BasisLabel, C64)>> = BTreeMap::new();
        for ((r, c), v) in &op.entries {
            cols.entry(c).or_default().push((r, *v));
        }
        let mut triplets = Vec::new();
        for (j, (g, m)) in self.basis.entries.iter().enumerate() {
            let t = &self.basis.grades[*g];
            if !monoid.leq(s, t) {
                continue;
            }
            let q = monoid.left_quotient(s, t)?;
            let (a, r) = sys.factor_label(t, s, m)?;
            if let Some(col) = cols.get(&a) {
                for (a2, v) in col {
                    let (_, target) = sys.multiply_labels(s, a2, &q, &r);
                    let i = self.basis.index_of(t, &target).ok_or_else(|| {
                        Error::OutsideTruncation(format!("{}:{target}", monoid.format(t)))
                    })?;
                    triplets.push((i, j, *v));
                }
            }
        }
        Ok(FockOperator::exact(SparseMatrix::from_triplets(self.dim(), triplets)))
    }
}

/// Which isometries generate a [`CuntzFamilyRep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `S_k e_n = e_{Dn+k}`: `Σ S_k S_k* = 1`.
    Cuntz,
    /// `S_k e_n = e_{Dn+k+1}`: `Σ S_k S_k* = 1 − |e₀⟩⟨e₀|`.
    Defective,
}

/// `φ^S((m,n), ξ) = S_ξ` for a concatenated system, on `span{e_0, …, e_{N-1}}`.
#[derive(Clone, Debug)]
pub struct CuntzFamilyRep {
    system: ProductSystem,
    kind: FamilyKind,
    n: usize,
    alphabet: usize,
    grades: Vec<MonoidElement>,
}

impl CuntzFamilyRep {
    /// `search` bounds the grades scanned by witness searches.
    pub fn new(system: &ProductSystem, kind: FamilyKind, n: usize, search: &Truncation) -> Result<Self> {
        let alphabet = match system.style() {
            SystemStyle::Concatenated { dim } if !dim.is_infinite() => dim.working() as usize,
            SystemStyle::WordGraded { dims } if system.monoid().rank() == 1 && !dims[0].is_infinite() => {
                dims[0].working() as usize
            }
            _ => {
                return Err(Error::InvalidSystem(
                    "Cuntz families need a finite-alphabet concatenated system".into(),
                ))
            }
        };
        if system.monoid().rank() > 1 && system.monoid().kind() != MonoidKind::DirectSum {
            return Err(Error::InvalidSystem("Cuntz families need a direct sum of copies of ℕ".into()));
        }
        let grades = system.monoid().enumerate_ideal(search)?;
        Ok(CuntzFamilyRep { system: system.clone(), kind, n, alphabet, grades })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    fn generator_target(&self, k: usize, col: usize) -> usize {
        match self.kind {
            FamilyKind::Cuntz => self.alphabet * col + k,
            FamilyKind::Defective => self.alphabet * col + k + 1,
        }
    }

    /// `S_k` itself.
    pub fn generator(&self, k: usize) -> FockOperator {
        self.word(&[k as u32])
    }

    fn word(&self, symbols: &[u32]) -> FockOperator {
        let mut triplets = Vec::new();
        let mut exact_cols = vec![true; self.n];
        for (j, exact) in exact_cols.iter_mut().enumerate() {
            let target = symbols.iter().rev().try_fold(j, |col, &k| {
                let t = self.generator_target(k as usize, col);
                (t < self.n).then_some(t)
            });
            match target {
                Some(i) => triplets.push((i, j, C64::new(1.0, 0.0))),
                None => *exact = false,
            }
        }
        FockOperator::with_exactness(
            SparseMatrix::from_triplets(self.n, triplets),
            exact_cols,
            vec![true; self.n],
        )
    }
}

impl Representation for CuntzFamilyRep {
    fn system(&self) -> &ProductSystem {
        &self.system
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn phi_basis(&self, grade: &MonoidElement, label: &BasisLabel) -> Result<FockOperator> {
        self.system.check_label(grade, label)?;
        let symbols = label.flat_symbols().expect("concatenated labels are symbol strings");
        Ok(self.word(&symbols))
    }

    fn search_grades(&self) -> Vec<MonoidElement> {
        self.grades.clone()
    }
}

/// Outcome of evaluating `∏(1 − ρ_{s_k}(1)) ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaithfulnessReport {
    pub holds: bool,
    /// A unit vector fixed or moved nontrivially by the product.
    pub witness: Option<Vec<C64>>,
    pub product: FockOperator,
}

/// `∏(1 − ρ_{s_k}(1))` and a witness that it is nonzero.
pub fn faithfulness_condition<R: Representation>(rep: &R, grades: &[MonoidElement]) -> Result<FaithfulnessReport> {
    let n = rep.dim();
    let id = FockOperator::identity(n);
    let mut product = id.clone();
    for s in grades {
        product = product.mul(&id.sub(&rep.rho_proj(s)?));
    }
    let witness = (0..n).find_map(|j| {
        if !product.col_exact(j) || product.matrix.col(j).is_empty() {
            return None;
        }
        let mut v = vec![C64::zero(); n];
        v[j] = C64::new(1.0, 0.0);
        Some(v)
    });
    Ok(FaithfulnessReport { holds: witness.is_some(), witness, product })
}

/// Result of the killing-projection search.
#[derive(Clone, Debug, PartialEq)]
pub enum KillingWitness {
    /// `R_C = ∏_{r∈C}(1 − ρ_r(1))` is nonzero and kills every `α_a(R_C)φ(x)`.
    Projection { q: FockOperator, residual: f64 },
    /// `R_C = 0`; a basis vector `y` with `‖α_a(φ(y)φ(y)*)φ(x)‖ < ε` for all `x ∈ F`.
    Vector { y: FiberVector, residual: f64 },
}

fn max_action_norm<R: Representation>(rep: &R, a: &MonoidElement, q: &FockOperator, f: &[FockOperator]) -> Result<f64> {
    let aq = rep.alpha(a, q)?;
    Ok(f.iter().map(|x| aq.mul(x).trusted_part().norm().value).fold(0.0, f64::max))
}

/// Searches for a nonzero projection `Q` with `‖α_a(Q)φ(x)‖ < ε` for all `x ∈ F`.
pub fn killing_witness_search<R: Representation>(
    rep: &R,
    a: &MonoidElement,
    f: &[FiberVector],
    c: &[MonoidElement],
    eps: f64,
) -> Result<KillingWitness> {
    let monoid = rep.system().monoid();
    for x in f {
        if monoid.leq(&x.grade, a) {
            return Err(Error::InvalidElement(format!(
                "p(x) = {} lies below a = {}",
                monoid.format(&x.grade),
                monoid.format(a)
            )));
        }
    }
    if c.iter().any(MonoidElement::is_identity) {
        return Err(Error::InvalidElement("C must avoid the identity".into()));
    }
    let phis: Vec<FockOperator> = f.iter().map(|x| rep.phi(x)).collect::<Result<_>>()?;
    let report = faithfulness_condition(rep, c)?;
    if report.holds {
        let residual = max_action_norm(rep, a, &report.product, &phis)?;
        return Ok(KillingWitness::Projection { q: report.product, residual });
    }
    let mut best = f64::INFINITY;
    for g in rep.search_grades() {
        if !c.iter().any(|r| monoid.leq(r, &g)) {
            continue;
        }
        for label in rep.system().basis(&g)? {
            let p = rep.phi_basis(&g, &label)?;
            let residual = max_action_norm(rep, a, &p.mul(&p.adjoint()), &phis)?;
            if residual < eps {
                return Ok(KillingWitness::Vector { y: FiberVector::basis(g, label), residual });
            }
            best = best.min(residual);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no basis vector reached ε = {eps}; best residual {best:.3e}"
    )))
}

/// `max_{d∈D} ‖φ(yz)φ(yz)* α_d(φ(yz)φ(yz)*)‖`.
pub fn aperiodic_residual<R: Representation>(
    rep: &R,
    y: &FiberVector,
    z: &FiberVector,
    d: &[MonoidElement],
) -> Result<f64> {
    let yz = rep.system().multiply_vectors(y, z);
    let p = rep.phi(&yz)?;
    let proj = p.mul(&p.adjoint());
    let mut worst: f64 = 0.0;
    for g in d {
        let moved = rep.alpha(g, &proj)?;
        worst = worst.max(proj.mul(&moved).trusted_part().norm().value);
    }
    Ok(worst)
}

/// Brute-force search for a basis vector `z` making `yz` aperiodic for `D`.
pub fn aperiodic_search<R: Representation>(
    rep: &R,
    y: &FiberVector,
    d: &[MonoidElement],
    eps: f64,
) -> Result<(FiberVector, f64)> {
    let mut best = f64::INFINITY;
    for g in rep.search_grades() {
        if g.is_identity() {
            continue;
        }
        for label in rep.system().basis(&g)? {
            let z = FiberVector::basis(g.clone(), label);
            let r = aperiodic_residual(rep, y, &z, d)?;
            if r < eps {
                return Ok((z, r));
            }
            best = best.min(r);
        }
    }
    Err(Error::SearchExhausted(format!("no aperiodic extension below ε = {eps}; best residual {best:.3e}")))
}
