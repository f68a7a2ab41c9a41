use prodsys_core::monoid::scalar;
use prodsys_core::{FactorKind, Join, Letter, Monoid, MonoidElement, MonoidKind, Truncation};
use proptest::prelude::*;

/// Least upper bound by scanning `universe`: the common upper bound lying
/// below every other one, or `None` when there is no common upper bound.
fn lub_oracle(m: &Monoid, universe: &[MonoidElement], s: &MonoidElement, t: &MonoidElement) -> Option<MonoidElement> {
    let uppers: Vec<&MonoidElement> = universe.iter().filter(|u| m.leq(s, u) && m.leq(t, u)).collect();
    if uppers.is_empty() {
        return None;
    }
    let least: Vec<&MonoidElement> =
        uppers.iter().copied().filter(|c| uppers.iter().all(|u| m.leq(c, u))).collect();
    assert_eq!(least.len(), 1, "upper bounds of {s} and {t} have no least element");
    Some(least[0].clone())
}

fn monoids() -> Vec<Monoid> {
    vec![Monoid::naturals(), Monoid::free_product(2), Monoid::direct_sum(2)]
}

#[test]
fn order_axioms_on_small_ideals() {
    for m in monoids() {
        let ideal = m.enumerate_ideal(&Truncation::Length(3)).unwrap();
        for s in &ideal {
            assert!(m.leq(s, s));
            for t in &ideal {
                if m.leq(s, t) && m.leq(t, s) {
                    assert_eq!(s, t);
                }
                for u in &ideal {
                    if m.leq(s, t) && m.leq(t, u) {
                        assert!(m.leq(s, u), "{s} <= {t} <= {u}");
                    }
                }
            }
        }
    }
}

#[test]
fn left_invariance() {
    for m in monoids() {
        let ideal = m.enumerate_ideal(&Truncation::Length(2)).unwrap();
        for r in &ideal {
            for s in &ideal {
                for t in &ideal {
                    if m.leq(s, t) {
                        assert!(m.leq(&m.multiply(r, s), &m.multiply(r, t)));
                    }
                }
            }
        }
    }
}

#[test]
fn joins_match_oracle_on_free_product() {
    let m = Monoid::free_product(2);
    let small = m.enumerate_ideal(&Truncation::Length(3)).unwrap();
    let big = m.enumerate_ideal(&Truncation::Length(6)).unwrap();
    for s in &small {
        for t in &small {
            let expect = lub_oracle(&m, &big, s, t);
            assert_eq!(m.join(s, t).finite().cloned(), expect, "{s} v {t}");
        }
    }
}

#[test]
fn joins_of_triples_fold() {
    let m = Monoid::direct_sum(2);
    let ideal = m.enumerate_ideal(&Truncation::Length(2)).unwrap();
    let big = m.enumerate_ideal(&Truncation::Length(4)).unwrap();
    for s in &ideal {
        for t in &ideal {
            for u in &ideal {
                let folded = m.join_all([s, t, u]);
                let uppers: Vec<_> = big.iter().filter(|x| m.leq(s, x) && m.leq(t, x) && m.leq(u, x)).collect();
                let least = uppers.iter().find(|c| uppers.iter().all(|x| m.leq(c, x))).cloned();
                assert_eq!(folded.finite(), least);
            }
        }
    }
}

#[test]
fn theta_respects_joins() {
    let m = Monoid::free_product(2);
    let ideal = m.enumerate_ideal(&Truncation::Length(3)).unwrap();
    for s in &ideal {
        for t in &ideal {
            if let Join::Finite(j) = m.join(s, t) {
                assert_eq!(m.theta(&j), m.theta(s).join(&m.theta(t)));
                if m.theta(s) == m.theta(t) {
                    assert_eq!(s, t);
                }
            }
        }
    }
}

#[test]
fn spec_examples() {
    let fp = Monoid::free_product(2);
    let p = |s: &str| fp.parse(s).unwrap();
    assert_eq!(fp.normalize([Letter::int(0, 1), Letter::int(1, 1), Letter::int(1, -1), Letter::int(0, 1)]), p("a^2"));
    assert!(!fp.leq(&p("ab"), &p("a^2 b")));
    assert_eq!(fp.join(&p("a"), &p("b")), Join::Infinity);
    assert_eq!(fp.join(&p("a"), &p("ab")), Join::Finite(p("ab")));
    assert_eq!(fp.left_quotient(&p("a"), &p("a b^2")).unwrap(), p("b^2"));
    assert!(fp.left_quotient(&p("b"), &p("a")).is_err());
    let n3 = Monoid::direct_sum(3);
    let c = |v: &[i64]| n3.coords(v).unwrap();
    assert_eq!(n3.join(&c(&[1, 0, 2]), &c(&[0, 3, 1])), Join::Finite(c(&[1, 3, 2])));
    assert!(n3.leq(&c(&[1, 0, 2]), &c(&[1, 3, 2])));
    let aba = m_theta(&fp, "aba");
    assert_eq!(aba, vec![scalar(2), scalar(1)]);
}

fn m_theta(m: &Monoid, s: &str) -> Vec<prodsys_core::Scalar> {
    let img = m.theta(&m.parse(s).unwrap());
    (0..m.rank()).map(|f| img.get(f)).collect()
}

#[test]
fn dense_factors_are_totally_ordered() {
    let q = Monoid::new(MonoidKind::FreeProduct, &[FactorKind::RationalsDense, FactorKind::Integers]).unwrap();
    let half = q.parse("a^1/2").unwrap();
    let third = q.parse("a^1/3").unwrap();
    assert_eq!(q.join(&half, &third), Join::Finite(half.clone()));
    assert!(q.enumerate_ideal(&Truncation::Length(2)).is_err());
    let hb = q.parse("a^1/2 b").unwrap();
    assert_eq!(q.join(&hb, &third), Join::Finite(hb.clone()));
    assert_eq!(q.join(&hb, &q.parse("a").unwrap()), Join::Infinity);
}

fn raw_word(factors: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..factors, -3i64..=3), 0..8)
        .prop_map(|v| v.into_iter().map(|(f, e)| Letter::int(f, e)).collect())
}

fn positive_word(factors: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..factors, 1i64..=3), 0..5)
        .prop_map(|v| v.into_iter().map(|(f, e)| Letter::int(f, e)).collect())
}

proptest! {
    #[test]
    fn cone_meets_inverse_only_at_identity(w in raw_word(3)) {
        let m = Monoid::free_product(3);
        let g = m.normalize(w);
        if m.is_positive(&g) && m.is_positive(&m.invert(&g)) {
            prop_assert!(g.is_identity());
        }
    }

    #[test]
    fn normalize_is_idempotent(w in raw_word(3)) {
        for m in [Monoid::free_product(3), Monoid::direct_sum(3)] {
            let g = m.normalize(w.clone());
            prop_assert_eq!(m.normalize(g.letters().to_vec()), g);
        }
    }

    #[test]
    fn multiplication_is_associative(a in raw_word(3), b in raw_word(3), c in raw_word(3)) {
        for m in [Monoid::free_product(3), Monoid::direct_sum(3)] {
            let (a, b, c) = (m.normalize(a.clone()), m.normalize(b.clone()), m.normalize(c.clone()));
            prop_assert_eq!(m.multiply(&m.multiply(&a, &b), &c), m.multiply(&a, &m.multiply(&b, &c)));
            prop_assert!(m.multiply(&a, &m.invert(&a)).is_identity());
        }
    }

    #[test]
    fn join_is_least_upper_bound(s in positive_word(2), t in positive_word(2)) {
        let m = Monoid::free_product(2);
        let (s, t) = (m.normalize(s), m.normalize(t));
        match m.join(&s, &t) {
            Join::Finite(j) => {
                prop_assert!(m.leq(&s, &j) && m.leq(&t, &j));
                prop_assert!(j == s || j == t);
            }
            Join::Infinity => prop_assert!(!m.leq(&s, &t) && !m.leq(&t, &s)),
        }
    }

    #[test]
    fn parse_round_trips(w in positive_word(3)) {
        for m in [Monoid::free_product(3), Monoid::direct_sum(3)] {
            let g = m.normalize(w.clone());
            prop_assert_eq!(m.parse(&m.format(&g)).unwrap(), g);
        }
    }
}
