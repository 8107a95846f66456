//! Executable law suites over a bilattice context. Each law reports its
//! first counterexample on failure.

use serde::Serialize;

use crate::bilattice::{
    annihilates, enlarge, in_bil, op_of, phi, psi1, psi2, random_annihilating_pair, theta,
    BilatticeContext, FiniteBilattice,
};
use crate::error::Result;
use crate::operator_space::LawCheck;
use crate::sampling::stream_rng;
use crate::subspace::{ProjectionPair, Subspace};

#[derive(Clone, Debug, Serialize)]
pub struct LawResult {
    pub law: String,
    #[serde(flatten)]
    pub check: LawCheck,
}

impl LawResult {
    fn new(law: &str, check: LawCheck) -> Self {
        LawResult {
            law: law.to_string(),
            check,
        }
    }
}

fn pass_unless(failure: Option<String>) -> LawCheck {
    match failure {
        None => LawCheck::Pass,
        Some(detail) => LawCheck::Fail(detail),
    }
}

/// Subsets of `items` with at most `max` elements, as index lists.
fn small_subsets(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&k| k + 1);
            for k in start..len {
                let mut t: Vec<usize> = s.clone();
                t.push(k);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn find_antitone(
    lattice: &[Subspace],
    map: impl Fn(&Subspace) -> Result<Subspace>,
    name: &str,
) -> Result<Option<String>> {
    let images: Vec<Subspace> = lattice.iter().map(&map).collect::<Result<_>>()?;
    for (a, fa) in lattice.iter().zip(&images) {
        for (b, fb) in lattice.iter().zip(&images) {
            if a.leq(b)? && !fb.leq(fa)? {
                return Ok(Some(format!(
                    "{} ≤ {} but {name}({}) = {} is not ≤ {name}({}) = {}",
                    a.label(),
                    b.label(),
                    b.label(),
                    fb.label(),
                    a.label(),
                    fa.label()
                )));
            }
        }
    }
    Ok(None)
}

fn find_join_reversal(
    lattice: &[Subspace],
    ambient_in: usize,
    ambient_out: usize,
    map: impl Fn(&Subspace) -> Result<Subspace>,
    name: &str,
) -> Result<Option<String>> {
    for subset in small_subsets(lattice.len(), 3) {
        let mut join = Subspace::zero(ambient_in);
        let mut meet = Subspace::full(ambient_out);
        for &k in &subset {
            join = join.sum(&lattice[k])?;
            meet = meet.intersect(&map(&lattice[k])?)?;
        }
        let lhs = map(&join)?;
        if lhs != meet {
            let labels: Vec<String> = subset.iter().map(|&k| lattice[k].label()).collect();
            return Ok(Some(format!(
                "{name}(∨{{{}}}) = {} but the meet of images is {}",
                labels.join(", "),
                lhs.label(),
                meet.label()
            )));
        }
    }
    Ok(None)
}

/// Galois-connection laws for `φ` and `θ` over the enumerated lattices:
/// antitone, gluing, join reversal on subsets of size ≤ 3, inflation and
/// `φθφ = φ`, `θφθ = θ`.
pub fn galois_laws(ctx: &BilatticeContext, bil: &FiniteBilattice) -> Result<Vec<LawResult>> {
    let (lat_a, lat_b) = (bil.lat_a(), bil.lat_b_perp());
    let phi_ = |p: &Subspace| phi(p, ctx);
    let theta_ = |q: &Subspace| theta(q, ctx);
    let mut out = Vec::new();

    let antitone = find_antitone(lat_a, phi_, "φ")?.or(find_antitone(lat_b, theta_, "θ")?);
    out.push(LawResult::new("antitone", pass_unless(antitone)));

    let mut gluing = None;
    for p in lat_a {
        let pair = ProjectionPair::new(p.clone(), phi(p, ctx)?);
        if !in_bil(&pair, ctx)? {
            gluing = Some(format!("(P, φ(P)) = {pair} is not in Bil(M)"));
            break;
        }
    }
    if gluing.is_none() {
        for q in lat_b {
            let pair = ProjectionPair::new(theta(q, ctx)?, q.clone());
            if !in_bil(&pair, ctx)? {
                gluing = Some(format!("(θ(Q), Q) = {pair} is not in Bil(M)"));
                break;
            }
        }
    }
    out.push(LawResult::new("gluing", pass_unless(gluing)));

    let reversal = find_join_reversal(lat_a, ctx.h1(), ctx.h2(), phi_, "φ")?
        .or(find_join_reversal(lat_b, ctx.h2(), ctx.h1(), theta_, "θ")?);
    out.push(LawResult::new("join_reversal", pass_unless(reversal)));

    let mut inflation = None;
    let mut triple = None;
    for p in lat_a {
        let fp = phi(p, ctx)?;
        let tfp = theta(&fp, ctx)?;
        if inflation.is_none() && !p.leq(&tfp)? {
            inflation = Some(format!(
                "P = {} is not ≤ θφ(P) = {}",
                p.label(),
                tfp.label()
            ));
        }
        let ftfp = phi(&tfp, ctx)?;
        if triple.is_none() && ftfp != fp {
            triple = Some(format!(
                "φθφ({}) = {} but φ = {}",
                p.label(),
                ftfp.label(),
                fp.label()
            ));
        }
    }
    for q in lat_b {
        let tq = theta(q, ctx)?;
        let ftq = phi(&tq, ctx)?;
        if inflation.is_none() && !q.leq(&ftq)? {
            inflation = Some(format!(
                "Q = {} is not ≤ φθ(Q) = {}",
                q.label(),
                ftq.label()
            ));
        }
        let tftq = theta(&ftq, ctx)?;
        if triple.is_none() && tftq != tq {
            triple = Some(format!(
                "θφθ({}) = {} but θ = {}",
                q.label(),
                tftq.label(),
                tq.label()
            ));
        }
    }
    out.push(LawResult::new("inflation", pass_unless(inflation)));
    out.push(LawResult::new("triple_composition", pass_unless(triple)));
    Ok(out)
}

/// `Ψ₁`, `Ψ₂` preserve `⪯`, land in `Bil(M)`, and have the same image.
pub fn psi_laws(ctx: &BilatticeContext, bil: &FiniteBilattice) -> Result<Vec<LawResult>> {
    let pairs = bil.pairs();
    let images1: Vec<ProjectionPair> = pairs.iter().map(|x| psi1(x, ctx)).collect::<Result<_>>()?;
    let images2: Vec<ProjectionPair> = pairs.iter().map(|x| psi2(x, ctx)).collect::<Result<_>>()?;
    let mut out = Vec::new();

    let mut in_range = None;
    for y in images1.iter().chain(&images2) {
        if !bil.contains(y) {
            in_range = Some(format!("{y} is not in Bil(M)"));
            break;
        }
    }
    out.push(LawResult::new("psi_in_bil", pass_unless(in_range)));

    let mut monotone = None;
    'outer: for (images, name) in [(&images1, "Ψ₁"), (&images2, "Ψ₂")] {
        for (x, fx) in pairs.iter().zip(images.iter()) {
            for (y, fy) in pairs.iter().zip(images.iter()) {
                if x.leq(y)? && !fx.leq(fy)? {
                    monotone = Some(format!("{x} ⪯ {y} but {name} gives {fx} and {fy}"));
                    break 'outer;
                }
            }
        }
    }
    out.push(LawResult::new("order_preserving", pass_unless(monotone)));

    let canonical = |v: &[ProjectionPair]| {
        let mut v = v.to_vec();
        v.sort();
        v.dedup();
        v
    };
    let (set1, set2) = (canonical(&images1), canonical(&images2));
    out.push(LawResult::new(
        "equal_images",
        LawCheck::from_bool(set1 == set2, || {
            format!(
                "Ψ₁ image has {} pairs, Ψ₂ image has {}",
                set1.len(),
                set2.len()
            )
        }),
    ));
    Ok(out)
}

/// `count` random pairs of `BIL(M)`, reproducible from `seed`.
pub fn random_bil_pairs(ctx: &BilatticeContext, count: usize, seed: u64) -> Vec<ProjectionPair> {
    (0..count)
        .map(|k| random_annihilating_pair(ctx, &mut stream_rng(seed, k as u64)))
        .collect()
}

/// Enlargement dominates and lands in `Bil(M)`; when `Bil(M)` is
/// enumerated, adding enlarged random pairs does not change `Op`.
pub fn enlargement_laws(
    ctx: &BilatticeContext,
    bil: Option<&FiniteBilattice>,
    count: usize,
    seed: u64,
) -> Result<Vec<LawResult>> {
    let samples = random_bil_pairs(ctx, count, seed);
    let mut enlarged = Vec::with_capacity(samples.len());
    let mut failure = None;
    for x in &samples {
        debug_assert!(annihilates(x, ctx)?);
        let y = enlarge(x, ctx)?;
        if failure.is_none() {
            if !in_bil(&y, ctx)? {
                failure = Some(format!("enlarge({x}) = {y} is not in Bil(M)"));
            } else if !(x.p.leq(&y.p)? && x.q.leq(&y.q)?) {
                failure = Some(format!("enlarge({x}) = {y} does not dominate the input"));
            }
        }
        enlarged.push(y);
    }
    let mut out = vec![LawResult::new(
        "enlarge_dominates_into_bil",
        pass_unless(failure),
    )];
    let op_stable = match bil {
        Some(bil) => {
            let base = op_of(ctx.h1(), ctx.h2(), bil.pairs())?;
            let mut all = bil.pairs().to_vec();
            all.extend(samples);
            all.extend(enlarged);
            let widened = op_of(ctx.h1(), ctx.h2(), &all)?;
            LawCheck::from_bool(base == widened, || {
                format!(
                    "Op(Bil) has dim {}, with random pairs added dim {}",
                    base.dim(),
                    widened.dim()
                )
            })
        }
        None => LawCheck::Skipped("bilattice not enumerable".into()),
    };
    out.push(LawResult::new("op_unchanged_by_big_pairs", op_stable));
    Ok(out)
}
