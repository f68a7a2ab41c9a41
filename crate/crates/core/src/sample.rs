//! Seeded random inputs for property checks.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::Result;
use crate::monoid::MonoidElement;
use crate::product_system::{BasisLabel, FiberOperator, FiberVector, ProductSystem, C64};
use crate::wick::{MonomialKey, WickElement};

/// Uniform basis label of `E_s`.
pub fn label<R: Rng>(sys: &ProductSystem, s: &MonoidElement, rng: &mut R) -> Result<BasisLabel> {
    let basis = sys.basis(s)?;
    Ok(basis.choose(rng).expect("fibers are nonzero").clone())
}

/// Nonzero complex coefficient whose parts are multiples of 1/4 in `[-1, 1)`,
/// so sums stay exactly representable.
pub fn coeff<R: Rng>(rng: &mut R) -> C64 {
    let q = |rng: &mut R| (rng.random_range(-4..4) as f64) / 4.0;
    loop {
        let c = C64::new(q(rng), q(rng));
        if c.norm() > 0.0 {
            return c;
        }
    }
}

/// Random monomial `i(x)i(y)*` with grades drawn from `grades`.
pub fn monomial<R: Rng>(sys: &ProductSystem, grades: &[MonoidElement], rng: &mut R) -> Result<MonomialKey> {
    let s = grades.choose(rng).expect("nonempty grade list").clone();
    let t = grades.choose(rng).expect("nonempty grade list").clone();
    let l = label(sys, &s, rng)?;
    let r = label(sys, &t, rng)?;
    Ok(MonomialKey::new(s, l, t, r))
}

/// Random element with up to `terms` monomials.
pub fn element<R: Rng>(sys: &ProductSystem, grades: &[MonoidElement], terms: usize, rng: &mut R) -> Result<WickElement> {
    let mut raw = Vec::with_capacity(terms);
    for _ in 0..terms {
        raw.push((monomial(sys, grades, rng)?, coeff(rng)));
    }
    Ok(WickElement::canonicalize(raw))
}

/// Random gauge-diagonal element with up to `terms` monomials.
pub fn diagonal_element<R: Rng>(
    sys: &ProductSystem,
    grades: &[MonoidElement],
    terms: usize,
    rng: &mut R,
) -> Result<WickElement> {
    let mut raw = Vec::with_capacity(terms);
    for _ in 0..terms {
        let s = grades.choose(rng).expect("nonempty grade list").clone();
        let key = MonomialKey::new(s.clone(), label(sys, &s, rng)?, s.clone(), label(sys, &s, rng)?);
        raw.push((key, coeff(rng)));
    }
    Ok(WickElement::canonicalize(raw))
}

/// Random vector of `E_s` supported on at most `terms` basis labels.
pub fn vector<R: Rng>(sys: &ProductSystem, s: &MonoidElement, terms: usize, rng: &mut R) -> Result<FiberVector> {
    let mut raw = Vec::with_capacity(terms);
    for _ in 0..terms.max(1) {
        raw.push((label(sys, s, rng)?, coeff(rng)));
    }
    let v = FiberVector::from_terms(s.clone(), raw);
    if v.is_zero() {
        vector(sys, s, terms, rng)
    } else {
        Ok(v)
    }
}

/// Random finite-rank operator on `E_s` with up to `terms` matrix units.
pub fn operator<R: Rng>(sys: &ProductSystem, s: &MonoidElement, terms: usize, rng: &mut R) -> Result<FiberOperator> {
    let mut raw = Vec::with_capacity(terms);
    for _ in 0..terms.max(1) {
        raw.push(((label(sys, s, rng)?, label(sys, s, rng)?), coeff(rng)));
    }
    Ok(FiberOperator::from_entries(s.clone(), raw))
}
