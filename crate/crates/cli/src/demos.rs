//! Fixed scenarios that exhibit the covariance and faithfulness dichotomies.

use prodsys_core::{
    faithfulness_condition, killing_witness_search, CuntzFamilyRep, FamilyKind, FiberDim, FiberVector, FockOperator,
    FockRep, Join, KillingWitness, Monoid, MonoidElement, ProductSystem, Representation, Result, Truncation,
};

use crate::report::CheckReport;
use crate::suites::{error_report, EXACT_TOL};

pub const DEMOS: &[&str] = &["example-1.2", "oinfty-faithfulness", "free-product-kill"];

/// Matrix size of the Cuntz-family demo.
pub const CUNTZ_DIM: usize = 64;
/// Largest total degree `m + n` examined by the Cuntz-family demo.
pub const CUNTZ_DEGREE: i64 = 3;

/// Reports and narrative lines of one demo.
#[derive(Clone, Debug)]
pub struct DemoOutcome {
    pub reports: Vec<CheckReport>,
    pub narrative: Vec<String>,
}

/// Runs a named demo; `None` for an unknown name.
pub fn run_demo(name: &str) -> Option<DemoOutcome> {
    let result = match name {
        "example-1.2" => example_1_2(),
        "oinfty-faithfulness" => oinfty_faithfulness(),
        "free-product-kill" => free_product_kill(),
        _ => return None,
    };
    Some(result.unwrap_or_else(|e| DemoOutcome { reports: vec![error_report(name, "demo", e)], narrative: Vec::new() }))
}

fn exact_eq(a: &FockOperator, b: &FockOperator) -> bool {
    a.deviation(b, &vec![true; a.dim()]).max < EXACT_TOL
}

/// Rank of a diagonal 0/1 projection, or `None` if it is not one.
fn projection_rank(p: &FockOperator) -> Option<usize> {
    if p.truncated() || !exact_eq(&p.mul(p), p) || !exact_eq(&p.adjoint(), p) {
        return None;
    }
    let tr = p.matrix.trace();
    (tr.im == 0.0 && tr.re.fract() == 0.0).then_some(tr.re as usize)
}

/// `L_k` of one family: the projections `ρ_{(m,n)}(1)` with `m + n = k`.
struct FamilyProjections {
    kind: FamilyKind,
    ranks: Vec<usize>,
    depends_on_total: bool,
    covariant_pair: bool,
    exact: bool,
}

fn family_projections(sys: &ProductSystem, kind: FamilyKind) -> Result<FamilyProjections> {
    let m = sys.monoid();
    let rep = CuntzFamilyRep::new(sys, kind, CUNTZ_DIM, &Truncation::Length(CUNTZ_DEGREE as u32))?;
    let mut ranks = Vec::new();
    let mut depends_on_total = true;
    let mut exact = true;
    for k in 0..=CUNTZ_DEGREE {
        let projs: Vec<FockOperator> =
            (0..=k).map(|i| rep.rho_proj(&m.coords(&[i, k - i])?)).collect::<Result<_>>()?;
        depends_on_total &= projs.windows(2).all(|w| exact_eq(&w[0], &w[1]));
        match projection_rank(&projs[0]) {
            Some(r) => ranks.push(r),
            None => {
                exact = false;
                ranks.push(0);
            }
        }
    }
    let l10 = rep.rho_proj(&m.coords(&[1, 0])?)?;
    let l01 = rep.rho_proj(&m.coords(&[0, 1])?)?;
    let l11 = rep.rho_proj(&m.coords(&[1, 1])?)?;
    let covariant_pair = exact_eq(&l10.mul(&l01), &l11);
    Ok(FamilyProjections { kind, ranks, depends_on_total, covariant_pair, exact })
}

fn example_1_2() -> Result<DemoOutcome> {
    let sys = ProductSystem::concatenated(Monoid::direct_sum(2), FiberDim::Finite(2))?;
    let m = sys.monoid().clone();
    let d = 2usize;
    let mut narrative = vec![format!(
        "E_(m,n) = span of words of length m+n over {d} letters; phi^S sends a word to S_word on span{{e_0..e_{}}}",
        CUNTZ_DIM - 1
    )];
    let mut reports = Vec::new();
    for kind in [FamilyKind::Cuntz, FamilyKind::Defective] {
        let fam = family_projections(&sys, kind)?;
        let label = match fam.kind {
            FamilyKind::Cuntz => "example-1.2 full family",
            FamilyKind::Defective => "example-1.2 defective family",
        };
        let mut r = CheckReport::new(label, "concatenated N^2 d=2");
        r.require(fam.exact, || "a projection L_k was not exact on the truncation".into());
        r.require(fam.depends_on_total, || "L_(m,n) differs for equal m+n".into());
        for (k, rank) in fam.ranks.iter().enumerate() {
            r.residuals.insert(format!("rank L_{k}"), *rank as f64);
        }
        match fam.kind {
            FamilyKind::Cuntz => {
                let constant = fam.ranks.iter().all(|&x| x == CUNTZ_DIM);
                r.require(constant, || format!("ranks {:?} are not constantly {CUNTZ_DIM}", fam.ranks));
                r.require(fam.covariant_pair, || "L_(1,0) L_(0,1) != L_(1,1)".into());
                narrative.push(format!(
                    "sum S_k S_k* = 1: covariant on interior: L_{{m,n}} constant in m+n (ranks {:?})",
                    fam.ranks
                ));
            }
            FamilyKind::Defective => {
                let decreasing = fam.ranks.windows(2).all(|w| w[1] < w[0]);
                r.require(decreasing, || format!("ranks {:?} are not strictly decreasing", fam.ranks));
                for (k, rank) in fam.ranks.iter().enumerate() {
                    let defect = (d.pow(k as u32) - 1) / (d - 1);
                    r.require(*rank == CUNTZ_DIM - defect, || format!("rank L_{k} = {rank}, expected N - {defect}"));
                }
                r.require(!fam.covariant_pair, || "L_(1,0) L_(0,1) = L_(1,1) for the defective family".into());
                narrative.push(format!(
                    "sum S_k S_k* < 1: non-covariant: L_{{m,n}} strictly decreasing in m+n (ranks {:?})",
                    fam.ranks
                ));
            }
        }
        reports.push(r);
    }

    // Faithfulness condition fails for the full family; the search falls back to vectors.
    let rep = CuntzFamilyRep::new(&sys, FamilyKind::Cuntz, CUNTZ_DIM, &Truncation::Length(2))?;
    let c = [m.coords(&[1, 0])?];
    let mut r = CheckReport::new("example-1.2 killing search", "concatenated N^2 d=2");
    let cond = faithfulness_condition(&rep, &c)?;
    r.require(!cond.holds, || "R_C is nonzero for the full family".into());
    let x = FiberVector::basis(m.coords(&[0, 1])?, sys.basis(&m.coords(&[0, 1])?)?.remove(1));
    match killing_witness_search(&rep, &MonoidElement::identity(), &[x], &c, 1e-10) {
        Ok(KillingWitness::Vector { y, residual }) => {
            r.residual("residual", residual, 1e-10);
            r.witness(format!("y = {}:{}", m.format(&y.grade), y.coords.keys().next().expect("basis vector")));
            narrative.push("full family: R_C = 0 for C = {(1,0)}, vector search engaged and found a witness".into());
        }
        Ok(KillingWitness::Projection { .. }) => r.fail("R_C was nonzero"),
        Err(e) => r.fail(e.to_string()),
    }
    reports.push(r);
    Ok(DemoOutcome { reports, narrative })
}

fn oinfty_faithfulness() -> Result<DemoOutcome> {
    let n = Monoid::naturals();
    let sys = ProductSystem::free_product(&[
        ProductSystem::word_graded(n.clone(), vec![FiberDim::InfiniteTruncated(2)])?,
        ProductSystem::word_graded(n, vec![FiberDim::Finite(2)])?,
    ])?;
    let m = sys.monoid().clone();
    let bound = Truncation::Length(3);
    let rep = FockRep::new(&sys, &bound)?;
    let name = "(N,inf)*(N,2)";
    let mut narrative = vec![
        "factor a carries infinite-dimensional fibers, factor b two-dimensional ones".to_string(),
    ];

    let mut hyp = CheckReport::new("oinfty hypothesis", name);
    let a = m.generator(0);
    let mut power = MonoidElement::identity();
    for k in 1..=3 {
        power = m.multiply(&power, &a);
        let infinite = sys.dim(&power)?.infinite;
        hyp.require(infinite, || format!("E_a^{k} is finite-dimensional"));
    }
    narrative.push("E_s is infinite-dimensional for every s = a^k, k = 1..3".into());

    let finite: Vec<MonoidElement> = rep
        .basis()
        .grades()
        .iter()
        .filter(|g| !g.is_identity())
        .filter(|g| sys.dim(g).map(|d| !d.infinite).unwrap_or(false))
        .cloned()
        .collect();
    let mut absorb = CheckReport::new("oinfty absorption", name);
    for s in &finite {
        absorb.require(!m.leq(&a, s) && !m.leq(s, &a), || format!("a comparable with {s}"));
        absorb.require(m.join(&a, s) == Join::Infinity, || format!("a v {s} is finite"));
    }
    let id = FockOperator::identity(rep.dim());
    let pa = rep.rho_proj(&a)?;
    let mut prod = pa.clone();
    for s in &finite {
        prod = prod.mul(&id.sub(&rep.rho_proj(s)?));
    }
    absorb.require(exact_eq(&prod, &pa), || "rho_proj(a) prod(1 - rho_proj(s_k)) != rho_proj(a)".into());
    absorb.require(!pa.matrix.is_zero(), || "rho_proj(a) = 0".into());
    absorb.residuals.insert("finite grades".into(), finite.len() as f64);
    narrative.push(format!(
        "all {} finite-dimensional grades s_k in the ideal have a v s_k = inf, so rho_a(1) prod(1 - rho_s_k(1)) = rho_a(1) != 0",
        finite.len()
    ));
    narrative.push("the faithfulness condition therefore holds for these grades in any covariant representation".into());
    Ok(DemoOutcome { reports: vec![hyp, absorb], narrative })
}

fn free_product_kill() -> Result<DemoOutcome> {
    let m = Monoid::free_product(2);
    let sys = ProductSystem::trivial(m.clone());
    let rep = FockRep::new(&sys, &Truncation::Length(3))?;
    let (a, b) = (m.generator(0), m.generator(1));
    let id = FockOperator::identity(rep.dim());
    let pa = rep.rho_proj(&a)?;
    let pb = rep.rho_proj(&b)?;
    let lhs = pb.mul(&id.sub(&pa));
    let mut r = CheckReport::new("free-product-kill", "trivial N*N");
    r.require(m.join(&a, &b) == Join::Infinity, || "a v b is finite".into());
    r.require(exact_eq(&lhs, &pb), || "rho_proj(b)(1 - rho_proj(a)) != rho_proj(b)".into());
    r.require(!pb.matrix.is_zero(), || "rho_proj(b) = 0".into());
    let rank = pb.matrix.trace();
    r.residuals.insert("rank rho_proj(b)".into(), rank.re);
    r.residual("deviation", lhs.deviation(&pb, &vec![true; rep.dim()]).max, EXACT_TOL);
    let narrative = vec![
        "a v b = inf in N*N, so covariance forces rho_a(1) rho_b(1) = 0".to_string(),
        format!(
            "rho_proj(b)(1 - rho_proj(a)) = rho_proj(b), a nonzero projection of rank {} on the L=3 Fock space",
            rank.re
        ),
    ];
    Ok(DemoOutcome { reports: vec![r], narrative })
}
