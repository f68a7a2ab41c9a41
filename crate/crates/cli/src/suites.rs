//! Seeded invariant suites over configured or default product systems.

use std::collections::BTreeSet;
use std::time::Instant;

use prodsys_core::{
    covariance_check_symbolic, faithfulness_condition, killing_witness_search, norm_diagonal, sample,
    wick_multiply, Aligned, BasisLabel, Computed, Error, FiberDim, FiberOperator, FiberVector, FockOperator, FockRep,
    Join, KillingWitness, Monoid, MonoidElement, ProductSystem, Representation, SparseMatrix,
    Truncation, WickElement, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ConfigError, SystemConfig};
use crate::report::CheckReport;

/// Residual tolerance for matrix identities.
pub const MATRIX_TOL: f64 = 1e-10;
/// Relative tolerance for norm comparisons.
pub const NORM_TOL: f64 = 1e-8;
/// Tolerance meaning "exactly zero".
pub const EXACT_TOL: f64 = f64::MIN_POSITIVE;

pub const SUITES: &[&str] = &[
    "order-axioms",
    "join-oracle",
    "theta",
    "product-system",
    "lemma-1.1",
    "covariance",
    "homomorphism-oracle",
    "prop-1.6",
    "expectation",
    "norm-diagonal",
    "faithfulness",
];

#[derive(Debug)]
pub enum SuiteError {
    UnknownSuite(String),
    Config(ConfigError),
}

impl std::fmt::Display for SuiteError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SuiteError::UnknownSuite(s) => write!(f, "unknown suite {s:?}; known: {}, all", SUITES.join(", ")),
            SuiteError::Config(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for SuiteError {}

#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Record wall time in each report (breaks byte-stable output).
    pub timings: bool,
}

/// Runs one suite (or `all`) on the given config, or on the suite's
/// default systems when `config` is `None`.
pub fn run_check_suite(
    config: Option<&SystemConfig>,
    suite: &str,
    opts: SuiteOptions,
) -> Result<Vec<CheckReport>, SuiteError> {
    if suite == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_check_suite(config, s, opts)?);
        }
        return Ok(out);
    }
    if !SUITES.contains(&suite) {
        return Err(SuiteError::UnknownSuite(suite.to_string()));
    }
    let needs_fock = !matches!(suite, "order-axioms" | "join-oracle" | "theta" | "product-system" | "prop-1.6");
    let systems = match config {
        Some(c) => {
            if needs_fock {
                c.require_truncation().map_err(SuiteError::Config)?;
            }
            let mut c = c.clone();
            c.truncation.get_or_insert(Truncation::Length(2));
            vec![c]
        }
        None => default_systems(suite),
    };
    let mut out = Vec::new();
    for cfg in &systems {
        let start = Instant::now();
        let mut reports = run_one(suite, cfg, opts.seed);
        if opts.timings {
            let ms = start.elapsed().as_secs_f64() * 1e3 / reports.len().max(1) as f64;
            for r in &mut reports {
                r.wall_ms = Some(ms);
            }
        }
        out.extend(reports);
    }
    Ok(out)
}

fn run_one(suite: &str, cfg: &SystemConfig, seed: u64) -> Vec<CheckReport> {
    let result = match suite {
        "order-axioms" => order_axioms(cfg),
        "join-oracle" => join_oracle(cfg),
        "theta" => theta(cfg),
        "product-system" => product_system(cfg, seed),
        "lemma-1.1" => lemma_1_1(cfg, seed),
        "covariance" => covariance(cfg, seed),
        "homomorphism-oracle" => homomorphism(cfg, seed),
        "prop-1.6" => prop_1_6(cfg, seed),
        "expectation" => expectation(cfg, seed),
        "norm-diagonal" => norm_diag(cfg, seed),
        "faithfulness" => faithfulness(cfg),
        _ => unreachable!("suite names are checked by the caller"),
    };
    result.unwrap_or_else(|e| vec![error_report(suite, &cfg.name, e)])
}

/// Report for a core error: unsupported inputs are not failures.
pub fn error_report(check: &str, system: &str, e: Error) -> CheckReport {
    match e {
        Error::UnsupportedTruncation(_) | Error::DenseDimension { .. } => {
            CheckReport::new(check, system).unsupported(e.to_string())
        }
        other => {
            let mut r = CheckReport::new(check, system);
            r.fail(other.to_string());
            r
        }
    }
}

fn named(name: &str, sys: ProductSystem, bound: Truncation) -> SystemConfig {
    SystemConfig::new(name, sys, Some(bound))
}

fn word_graded(m: Monoid, dims: &[u32]) -> ProductSystem {
    ProductSystem::word_graded(m, dims.iter().map(|d| FiberDim::Finite(*d)).collect()).expect("valid default system")
}

fn example_system() -> ProductSystem {
    ProductSystem::concatenated(Monoid::direct_sum(2), FiberDim::Finite(2)).expect("valid default system")
}

fn free_product_2_3() -> ProductSystem {
    let n = Monoid::naturals();
    ProductSystem::free_product(&[word_graded(n.clone(), &[2]), word_graded(n, &[3])]).expect("valid default system")
}

/// Systems each suite runs on when no config is given.
pub fn default_systems(suite: &str) -> Vec<SystemConfig> {
    let l3 = Truncation::Length(3);
    let trivial_fp = || named("trivial N*N", ProductSystem::trivial(Monoid::free_product(2)), l3.clone());
    let n_d2 = || named("(N,2)", word_graded(Monoid::naturals(), &[2]), l3.clone());
    let example = || named("concatenated N^2 d=2", example_system(), Truncation::Box(vec![3, 3]));
    let fp23 = || named("(N,2)*(N,3)", free_product_2_3(), l3.clone());
    match suite {
        "order-axioms" | "join-oracle" | "theta" => vec![
            trivial_fp(),
            named("trivial N*N*N", ProductSystem::trivial(Monoid::free_product(3)), l3.clone()),
            named("trivial N^3", ProductSystem::trivial(Monoid::direct_sum(3)), l3.clone()),
            named("trivial N", ProductSystem::trivial(Monoid::naturals()), l3.clone()),
        ],
        "product-system" => vec![
            named("(N,2)*(N,3)", free_product_2_3(), Truncation::Length(2)),
            named("concatenated N^2 d=2", example_system(), Truncation::Box(vec![2, 2])),
            named(
                "von Neumann N d=2",
                ProductSystem::von_neumann(Monoid::naturals(), FiberDim::Finite(2), &Truncation::Length(4))
                    .expect("valid default system"),
                l3.clone(),
            ),
        ],
        "lemma-1.1" => vec![trivial_fp(), n_d2()],
        "covariance" | "homomorphism-oracle" | "expectation" => vec![trivial_fp(), example(), fp23()],
        "prop-1.6" => vec![
            named("trivial N*N", ProductSystem::trivial(Monoid::free_product(2)), Truncation::Length(2)),
            named("concatenated N^2 d=2", example_system(), Truncation::Box(vec![1, 1])),
            named("(N,2)*(N,3)", free_product_2_3(), Truncation::Length(2)),
        ],
        "norm-diagonal" => vec![n_d2(), example()],
        "faithfulness" => vec![trivial_fp(), n_d2(), named("concatenated N^2 d=2", example_system(), Truncation::Box(vec![2, 2]))],
        _ => Vec::new(),
    }
}

fn bound(cfg: &SystemConfig) -> &Truncation {
    cfg.truncation.as_ref().expect("suites fill in a truncation")
}

fn ideal(cfg: &SystemConfig) -> prodsys_core::Result<Vec<MonoidElement>> {
    cfg.monoid().enumerate_ideal(bound(cfg))
}

/// Grades of degree at most one inside the configured truncation.
fn small_grades(cfg: &SystemConfig) -> prodsys_core::Result<Vec<MonoidElement>> {
    let one = prodsys_core::monoid::scalar(1);
    Ok(ideal(cfg)?.into_iter().filter(|g| g.degree() <= one).collect())
}

fn scaled(t: &Truncation, k: u32) -> Truncation {
    match t {
        Truncation::Length(l) => Truncation::Length(l * k),
        Truncation::Box(b) => Truncation::Box(b.iter().map(|x| x * k).collect()),
    }
}

fn order_axioms(cfg: &SystemConfig) -> prodsys_core::Result<Vec<CheckReport>> {
    let m = cfg.monoid();
    let els = ideal(cfg)?;
    let mut r = CheckReport::new("order-axioms", &cfg.name);
    for s in &els {
        r.require(m.leq(s, s), || format!("not reflexive at {s}"));
        r.require(s.is_identity() || !m.is_positive(&m.invert(s)), || format!("{s} and its inverse both positive"));
        for t in &els {
            let st = m.leq(s, t);
            if st && m.leq(t, s) {
                r.require(s == t, || format!("antisymmetry fails at {s}, {t}"));
            }
            for u in &els {
                if st && m.leq(t, u) {
                    r.require(m.leq(s, u), || format!("transitivity fails at {s} <= {t} <= {u}"));
                }
                if st {
                    r.require(m.leq(&m.multiply(u, s), &m.multiply(u, t)), || {
                        format!("left invariance fails: {u}{s} vs {u}{t}")
                    });
                }
            }
        }
    }
    r.note(format!("{} elements", els.len()));
    Ok(vec![r])
}

/// The least element of the common upper bounds of `s, t` within `universe`.
pub fn lub_scan(m: &Monoid, universe: &[MonoidElement], s: &MonoidElement, t: &MonoidElement) -> Option<MonoidElement> {
    let uppers: Vec<&MonoidElement> = universe.iter().filter(|u| m.leq(s, u) && m.leq(t, u)).collect();
    let least = uppers.iter().min_by(|a, b| a.degree().cmp(&b.degree()))?;
    uppers.iter().all(|u| m.leq(least, u)).then(|| (*least).clone())
}

fn join_oracle(cfg: &SystemConfig) -> prodsys_core::Result<Vec<CheckReport>> {
    let m = cfg.monoid();
    let els = ideal(cfg)?;
    let universe = m.enumerate_ideal(&scaled(bound(cfg), 2))?;
    let mut r = CheckReport::new("join-oracle", &cfg.name);
    let mut mismatches = 0usize;
    for s in &els {
        for t in &els {
            let got = m.join(s, t).finite().cloned();
            let want = lub_scan(m, &universe, s, t);
            if got != want {
                mismatches += 1;
                r.fail(format!("{s} v {t}: join {got:?}, scan {want:?}"));
            }
        }
    }
    r.residual("mismatches", mismatches as f64, 0.5);
    r.note(format!("{} pairs against a scan of {} elements", els.len() * els.len(), universe.len()));
    Ok(vec![r])
}

fn theta(cfg: &SystemConfig) -> prodsys_core::Result<Vec<CheckReport>> {
    let m = cfg.monoid();
    let els = ideal(cfg)?;
    let mut r = CheckReport::new("theta", &cfg.name);
    let mut pairs = 0;
    for s in &els {
        for t in &els {
            if let Join::Finite(j) = m.join(s, t) {
                pairs += 1;
                r.require(m.theta(&j) == m.theta(s).join(&m.theta(t)), || format!("theta({s} v {t})"));
                if m.theta(s) == m.theta(t) {
                    r.require(s == t, || format!("theta({s}) = theta({t}) on a joinable pair"));
                }
            }
        }
    }
    r.note(format!("{pairs} joinable pairs"));
    Ok(vec![r])
}

fn vec_diff(a: &FiberVector, b: &FiberVector) -> f64 {
    if a.grade != b.grade {
        return f64::INFINITY;
    }
    a.add(&b.scale(C64::new(-1.0, 0.0))).map(|d| d.norm()).unwrap_or(f64::INFINITY)
}

fn product_system(cfg: &SystemConfig, seed: u64) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let m = sys.monoid();
    let grades = ideal(cfg)?;
    let mut unitary = CheckReport::new("basis-bijection", &cfg.name);
    for s in &grades {
        for t in &grades {
            let (bs, bt) = (sys.basis(s)?, sys.basis(t)?);
            let mut images = BTreeSet::new();
            for x in &bs {
                for y in &bt {
                    let (st, label) = sys.multiply_labels(s, x, t, y);
                    unitary.require(sys.check_label(&st, &label).is_ok(), || format!("{s}:{x} * {t}:{y}"));
                    images.insert(label);
                }
            }
            unitary.require(images.len() == bs.len() * bt.len(), || format!("not injective at {s}, {t}"));
            let st = m.multiply(s, t);
            if !sys.dim(s)?.infinite && !sys.dim(t)?.infinite && !sys.dim(&st)?.infinite {
                let target: BTreeSet<BasisLabel> = sys.basis(&st)?.into_iter().collect();
                unitary.require(images == target, || format!("not onto at {s}, {t}"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assoc = CheckReport::new("associativity", &cfg.name).with_seed(seed);
    for _ in 0..60 {
        let pick = |rng: &mut ChaCha8Rng| {
            let g = grades[rng.random_range(0..grades.len())].clone();
            sample::vector(sys, &g, 2, rng)
        };
        let (x, y, z) = (pick(&mut rng)?, pick(&mut rng)?, pick(&mut rng)?);
        let left = sys.multiply_vectors(&sys.multiply_vectors(&x, &y), &z);
        let right = sys.multiply_vectors(&x, &sys.multiply_vectors(&y, &z));
        assoc.residual("max", vec_diff(&left, &right), MATRIX_TOL);
        let (x2, y2) = (sample::vector(sys, &x.grade, 2, &mut rng)?, sample::vector(sys, &y.grade, 2, &mut rng)?);
        let lhs = sys.multiply_vectors(&x, &y).inner(&sys.multiply_vectors(&x2, &y2));
        assoc.residual("inner-product", (lhs - x.inner(&x2) * y.inner(&y2)).norm(), MATRIX_TOL);
    }

    let mut factor = CheckReport::new("factorization", &cfg.name);
    for u in &grades {
        for s in grades.iter().filter(|s| m.leq(s, u)) {
            let q = m.left_quotient(s, u)?;
            for (label, (a, b)) in sys.factor_basis(u, s)? {
                factor.require(sys.multiply_labels(s, &a, &q, &b) == (u.clone(), label.clone()), || {
                    format!("{u}:{label} over {s}")
                });
            }
        }
    }

    let mut unit = CheckReport::new("vacuum-unit", &cfg.name);
    for s in &grades {
        for l in sys.basis(s)? {
            let x = FiberVector::basis(s.clone(), l.clone());
            unit.require(
                sys.multiply_vectors(&sys.vacuum(), &x) == x && sys.multiply_vectors(&x, &sys.vacuum()) == x,
                || format!("{s}:{l}"),
            );
        }
    }
    Ok(vec![unitary, assoc, factor, unit])
}

fn random_operator(n: usize, rng: &mut ChaCha8Rng) -> FockOperator {
    let triplets: Vec<_> =
        (0..3 * n).map(|_| (rng.random_range(0..n), rng.random_range(0..n), sample::coeff(rng))).collect();
    FockOperator::exact(SparseMatrix::from_triplets(n, triplets))
}

struct Compare {
    report: CheckReport,
    columns: usize,
}

impl Compare {
    fn new(check: &str, system: &str, seed: u64) -> Self {
        Compare { report: CheckReport::new(check, system).with_seed(seed), columns: 0 }
    }

    fn check(&mut self, lhs: &FockOperator, rhs: &FockOperator, mask: &[bool], tol: f64, input: impl FnOnce() -> String) {
        let dev = lhs.deviation(rhs, mask);
        self.columns += dev.columns;
        self.report.residual("max", dev.max, tol);
        if !(dev.max < tol) {
            self.report.fail(input());
        }
    }

    fn finish(mut self) -> CheckReport {
        self.report.residuals.entry("max".into()).or_insert(0.0);
        self.report.require(self.columns > 0, || "no fully trusted column was compared".into());
        self.report.residuals.insert("trusted-columns".into(), self.columns as f64);
        self.report
    }
}

fn lemma_1_1(cfg: &SystemConfig, seed: u64) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let m = sys.monoid();
    let rep = FockRep::new(sys, bound(cfg))?;
    let grades = rep.basis().grades().to_vec();
    let all = vec![true; rep.dim()];
    let id = FockOperator::identity(rep.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["phi-multiplicative", "phi-isometric", "lemma-1.1(1)", "lemma-1.1(2)", "lemma-1.1(3)", "lemma-1.1(4)", "lemma-1.1(5)"];
    let mut c: Vec<Compare> = names.iter().map(|n| Compare::new(n, &cfg.name, seed)).collect();
    for round in 0..30 {
        let s = grades[rng.random_range(0..grades.len())].clone();
        let t = grades[rng.random_range(0..grades.len())].clone();
        let tag = || format!("round {round}: s={s}, t={t}");
        let x = sample::vector(sys, &s, 2, &mut rng)?;
        let y = sample::vector(sys, &t, 2, &mut rng)?;
        let x2 = sample::vector(sys, &s, 2, &mut rng)?;
        let a = random_operator(rep.dim(), &mut rng);
        let op = sample::operator(sys, &s, 3, &mut rng)?;
        let st = m.multiply(&s, &t);
        let ts = m.multiply(&t, &s);
        let (px, py) = (rep.fock_phi(&x)?, rep.fock_phi(&y)?);
        if rep.basis().contains_grade(&st) {
            c[0].check(&rep.fock_phi(&sys.multiply_vectors(&x, &y))?, &px.mul(&py), &all, MATRIX_TOL, tag);
        }
        let lhs = rep.fock_phi(&x2)?.adjoint().mul(&px);
        c[1].check(&lhs, &id.scale(x.inner(&x2)), &all, MATRIX_TOL, tag);
        c[2].check(&rep.alpha(&t, &id)?, &rep.rho_proj(&t)?, &all, MATRIX_TOL, tag);
        if rep.basis().contains_grade(&st) {
            let lhs = px.mul(&rep.alpha(&t, &a)?);
            let rhs = rep.alpha(&st, &a)?.mul(&px);
            c[3].check(&lhs, &rhs, &all, MATRIX_TOL, tag);
        }
        let rho = rep.rho_op(&op)?;
        c[4].check(&rho.mul(&px), &rep.fock_phi(&op.apply(&x)?)?, &all, MATRIX_TOL, tag);
        if rep.basis().contains_grade(&st) {
            let promoted = rep.rho_op(&sys.promote(&op, &st)?)?;
            c[5].check(&promoted, &rep.rho_proj(&st)?.mul(&rho), &all, MATRIX_TOL, tag);
            c[5].check(&promoted, &rho.mul(&rep.rho_proj(&st)?), &all, MATRIX_TOL, tag);
        }
        if rep.basis().contains_grade(&ts) {
            let lhs = rep.rho_op(&sys.promote_left(&op, &t)?)?;
            c[6].check(&lhs, &rep.alpha(&t, &rho)?, &all, MATRIX_TOL, tag);
        }
    }
    Ok(c.into_iter().map(Compare::finish).collect())
}

fn rank_one(sys: &ProductSystem, s: &MonoidElement, rng: &mut ChaCha8Rng) -> prodsys_core::Result<FiberOperator> {
    let x = sample::vector(sys, s, 2, rng)?;
    let y = sample::vector(sys, s, 2, rng)?;
    FiberOperator::rank_one(&x, &y)
}

fn covariance(cfg: &SystemConfig, seed: u64) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let m = sys.monoid();
    let rep = FockRep::new(sys, bound(cfg))?;
    let grades = rep.basis().grades().to_vec();
    let all = vec![true; rep.dim()];
    let zero = FockOperator::zeros(rep.dim());

    let mut diag = Compare::new("covariance-projections", &cfg.name, seed);
    let mut infinite = 0usize;
    for s in &grades {
        for t in &grades {
            let lhs = rep.rho_proj(s)?.mul(&rep.rho_proj(t)?);
            let rhs = match m.join(s, t) {
                Join::Infinity => {
                    infinite += 1;
                    zero.clone()
                }
                Join::Finite(j) if rep.basis().contains_grade(&j) => rep.rho_proj(&j)?,
                Join::Finite(_) => continue,
            };
            diag.check(&lhs, &rhs, &all, EXACT_TOL, || format!("s={s}, t={t}"));
        }
    }
    diag.report.residuals.insert("infinite-joins".into(), infinite as f64);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = Compare::new("covariance-rank-ones", &cfg.name, seed);
    let mut symbolic = CheckReport::new("covariance-symbolic", &cfg.name).with_seed(seed);
    let small = small_grades(cfg)?;
    for _ in 0..60 {
        let s = small[rng.random_range(0..small.len())].clone();
        let t = grades[rng.random_range(0..grades.len())].clone();
        let (a, b) = (rank_one(sys, &s, &mut rng)?, rank_one(sys, &t, &mut rng)?);
        let lhs = rep.rho_op(&a)?.mul(&rep.rho_op(&b)?);
        let rhs = match sys.compact_align(&a, &b)? {
            Aligned::Zero => zero.clone(),
            Aligned::Operator(op) if rep.basis().contains_grade(&op.grade) => rep.rho_op(&op)?,
            Aligned::Operator(_) => continue,
        };
        ops.check(&lhs, &rhs, &all, MATRIX_TOL, || format!("rank-ones at s={s}, t={t}"));
        match covariance_check_symbolic(sys, &a, &b)? {
            Computed::Exact(true) => {}
            Computed::Exact(false) => symbolic.fail(format!("rank-ones at s={s}, t={t}")),
            Computed::Inexact { reason, .. } => symbolic.inexact(reason),
        }
    }
    Ok(vec![diag.finish(), ops.finish(), symbolic])
}

fn homomorphism(cfg: &SystemConfig, seed: u64) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let rep = FockRep::new(sys, bound(cfg))?;
    let grades = small_grades(cfg)?;
    let mask = rep.basis().interior_mask(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Compare::new("homomorphism-oracle", &cfg.name, seed);
    for _ in 0..120 {
        let a = WickElement::monomial(sample::monomial(sys, &grades, &mut rng)?, sample::coeff(&mut rng));
        let b = WickElement::monomial(sample::monomial(sys, &grades, &mut rng)?, sample::coeff(&mut rng));
        let ab = match wick_multiply(sys, &a, &b)? {
            Computed::Exact(v) => v,
            Computed::Inexact { reason, .. } => {
                c.report.inexact(reason);
                continue;
            }
        };
        let lhs = rep.represent(&ab)?;
        let rhs = rep.represent(&a)?.mul(&rep.represent(&b)?);
        c.check(&lhs, &rhs, &mask, MATRIX_TOL, || {
            format!("A = {}, B = {}", a.display(sys.monoid()), b.display(sys.monoid()))
        });
    }
    Ok(vec![c.finish()])
}

fn prop_1_6(cfg: &SystemConfig, seed: u64) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let m = sys.monoid();
    let grades = ideal(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = CheckReport::new("aligned-series", &cfg.name).with_seed(seed);
    let mut compared = 0usize;
    let mut attempts = 0usize;
    while compared < 60 && attempts < 600 {
        attempts += 1;
        let s = grades[rng.random_range(0..grades.len())].clone();
        let t = grades[rng.random_range(0..grades.len())].clone();
        let v = sample::vector(sys, &s, 2, &mut rng)?;
        let w = sample::vector(sys, &t, 2, &mut rng)?;
        let aligned = sys.compact_align(&FiberOperator::rank_one(&v, &v)?, &FiberOperator::rank_one(&w, &w)?)?;
        let Join::Finite(j) = m.join(&s, &t) else {
            r.require(aligned == Aligned::Zero, || format!("s={s}, t={t}: nonzero alignment with infinite join"));
            compared += 1;
            continue;
        };
        let (qv, qw) = (m.left_quotient(&s, &j)?, m.left_quotient(&t, &j)?);
        if sys.dim(&qv)?.infinite || sys.dim(&qw)?.infinite {
            continue;
        }
        let mut series = FiberOperator::zero(j.clone());
        for f in sys.basis(&qv)? {
            for g in sys.basis(&qw)? {
                let vf = sys.multiply_vectors(&v, &FiberVector::basis(qv.clone(), f.clone()));
                let wg = sys.multiply_vectors(&w, &FiberVector::basis(qw.clone(), g));
                series = series.add(&FiberOperator::rank_one(&vf, &wg)?.scale(wg.inner(&vf)))?;
            }
        }
        compared += 1;
        match aligned {
            Aligned::Operator(op) => r.residual("max", op.max_abs_diff(&series), EXACT_TOL),
            Aligned::Zero => r.fail(format!("s={s}, t={t}: zero alignment with finite join")),
        }
    }
    r.residuals.entry("max".into()).or_insert(0.0);
    r.residuals.insert("pairs".into(), compared as f64);
    r.require(compared >= 50, || format!("only {compared} pairs had finite quotient fibers"));
    Ok(vec![r])
}

fn expectation(cfg: &SystemConfig, seed: u64) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let rep = FockRep::new(sys, bound(cfg))?;
    let grades = small_grades(cfg)?;
    let mask = rep.basis().interior_mask(1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Compare::new("expectation-spatial", &cfg.name, seed);
    let mut idem = Compare::new("expectation-idempotent", &cfg.name, seed);
    let mut contract = CheckReport::new("expectation-contractive", &cfg.name).with_seed(seed);
    for round in 0..60 {
        let x = sample::element(sys, &grades, 4, &mut rng)?;
        let d = x.phi_delta();
        idem.report.require(d.phi_delta() == d, || format!("round {round}: phi_delta not idempotent"));
        let rx = rep.represent(&x)?;
        let lhs = rep.expectation_spatial(&rx);
        let tag = || format!("X = {}", x.display(sys.monoid()));
        c.check(&lhs, &rep.represent(&d)?, &mask, MATRIX_TOL, tag);
        idem.check(&rep.expectation_spatial(&lhs), &lhs, &mask, MATRIX_TOL, tag);
        let (nd, nx) = (lhs.norm(), rx.norm());
        contract.residual("excess", (nd - nx).max(0.0), NORM_TOL * nx.max(1.0));
    }
    contract.residuals.entry("excess".into()).or_insert(0.0);
    Ok(vec![c.finish(), idem.finish(), contract])
}

fn norm_diag(cfg: &SystemConfig, seed: u64) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let rep = FockRep::new(sys, bound(cfg))?;
    let grades: Vec<MonoidElement> =
        rep.basis().interior_grades(1)?.into_iter().filter(|g| !g.is_identity()).collect();
    let grades = if grades.is_empty() { small_grades(cfg)? } else { grades };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = CheckReport::new("norm-diagonal-vs-matrix", &cfg.name).with_seed(seed);
    let mut cstar = CheckReport::new("norm-diagonal-c-star", &cfg.name).with_seed(seed);
    let mut compared = 0usize;
    for _ in 0..40 {
        let x = sample::diagonal_element(sys, &grades, 3, &mut rng)?;
        let cert = match norm_diagonal(sys, &x)? {
            Computed::Exact(c) => c,
            Computed::Inexact { reason, .. } => {
                matrix.inexact(reason);
                continue;
            }
        };
        let tag = || format!("X = {}", x.display(sys.monoid()));
        if rep.basis().contains_grade(&cert.a) {
            compared += 1;
            let v = rep.represent(&x)?.norm();
            let rel = (v - cert.value).abs() / cert.value.max(1.0);
            matrix.residual("relative", rel, NORM_TOL);
            if !(rel < NORM_TOL) {
                matrix.fail(tag());
            }
        }
        let xx = match wick_multiply(sys, &x, &x.adjoint())? {
            Computed::Exact(v) => v,
            Computed::Inexact { reason, .. } => {
                cstar.inexact(reason);
                continue;
            }
        };
        if let Computed::Exact(c2) = norm_diagonal(sys, &xx)? {
            let rel = (c2.value - cert.value * cert.value).abs() / c2.value.max(1.0);
            cstar.residual("relative", rel, NORM_TOL);
            if !(rel < NORM_TOL) {
                cstar.fail(tag());
            }
        }
    }
    matrix.residuals.insert("compared".into(), compared as f64);
    matrix.require(compared >= 30, || format!("only {compared} certificates fell inside the truncation"));
    Ok(vec![matrix, cstar])
}

/// Nonempty subsets of `items`, all of them when there are at most 16,
/// otherwise those of size at most 3.
fn families(items: &[MonoidElement]) -> Vec<Vec<MonoidElement>> {
    let n = items.len();
    if n <= 16 {
        return (1u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| items[i].clone()).collect())
            .collect();
    }
    let mut out = Vec::new();
    for i in 0..n {
        out.push(vec![items[i].clone()]);
        for j in i + 1..n {
            out.push(vec![items[i].clone(), items[j].clone()]);
            for k in j + 1..n {
                out.push(vec![items[i].clone(), items[j].clone(), items[k].clone()]);
            }
        }
    }
    out
}

fn faithfulness(cfg: &SystemConfig) -> prodsys_core::Result<Vec<CheckReport>> {
    let sys = &cfg.system;
    let m = sys.monoid();
    let rep = FockRep::new(sys, bound(cfg))?;
    let omega = rep.basis().vector(&sys.vacuum())?;
    let grades: Vec<MonoidElement> = rep.basis().grades().iter().filter(|g| !g.is_identity()).cloned().collect();
    let mut r = CheckReport::new("faithfulness-vacuum", &cfg.name);
    let fams = families(&grades);
    for fam in &fams {
        let report = faithfulness_condition(&rep, fam)?;
        let fixed = report.product.apply(&omega) == omega;
        r.require(fixed && report.holds, || {
            format!("family {{{}}}", fam.iter().map(|g| m.format(g)).collect::<Vec<_>>().join(", "))
        });
    }
    r.residuals.insert("families".into(), fams.len() as f64);
    r.witness("vacuum");

    let mut kill = CheckReport::new("killing-projection", &cfg.name);
    let g = m.generator(0);
    let x = FiberVector::basis(g.clone(), sys.basis(&g)?.remove(0));
    match killing_witness_search(&rep, &MonoidElement::identity(), &[x], std::slice::from_ref(&g), MATRIX_TOL)? {
        KillingWitness::Projection { q, residual } => {
            let expected = FockOperator::identity(rep.dim()).sub(&rep.rho_proj(&g)?);
            let dev = q.deviation(&expected, &vec![true; rep.dim()]);
            kill.residual("projection", dev.max, EXACT_TOL);
            kill.residual("action", residual, EXACT_TOL);
            kill.witness(format!("Q = 1 - rho_proj({})", m.format(&g)));
        }
        KillingWitness::Vector { y, .. } => kill.fail(format!("expected a projection, got vector at {}", y.grade)),
    }
    Ok(vec![r, kill])
}
