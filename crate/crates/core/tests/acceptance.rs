//! Acceptance criteria, one line each. Every comparison is exact; the only
//! tolerances are the wall-clock budgets below.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{corpus_presheaves, duality_holds, functors, lim, slices};
use isbell::completion::{
    cauchy_completion, cone_functor, enumerate_presheaves, enumerate_reflexive, kappa,
    rcn_lim_counterexample,
};
use isbell::conjugacy::{
    adjunction_bijection, conjugate, is_reflexive, iterate_conjugates, split_mono_check,
};
use isbell::corpus;
use isbell::fincat::{discrete, partial_bijections, FinCat, FinFunctor};
use isbell::metric::{
    completion_distance, conj_cost, double_conj_cost, is_isbell_point, is_tight_span_point,
    pointwise_le, yoneda_cost, CostVector, ExtNonnegRational as Q, GenMetric, RawMetric,
};
use isbell::order::{all_posets_up_to_iso, crosscheck_with_categorical, FinPoset};
use isbell::setfun::{
    coproduct, initial, is_isomorphic, nerve_presheaf, product, representable, terminal,
    SetFunctor, Variance,
};

const DEFAULT_BUDGET: Duration = Duration::from_secs(60);
const LONG_BUDGET: Duration = Duration::from_secs(300);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn iso(x: &SetFunctor, y: &SetFunctor) -> bool {
    is_isomorphic(x, y, lim()).unwrap().is_some()
}

fn contra_rep(c: &Arc<FinCat>, a: usize) -> SetFunctor {
    representable(c, a, Variance::Contravariant).unwrap()
}

fn copies(c: &Arc<FinCat>, n: usize) -> SetFunctor {
    coproduct(c, Variance::Contravariant, &vec![contra_rep(c, 0); n]).unwrap()
}

/// Checks that the classes are exactly the given functors, each hit once.
fn classes_are(classes: &[SetFunctor], expected: &[SetFunctor]) -> Result<(), String> {
    ensure(
        classes.len() == expected.len(),
        format!("{} classes, expected {}", classes.len(), expected.len()),
    )?;
    for e in expected {
        let hits = classes.iter().filter(|x| iso(x, e)).count();
        ensure(
            hits == 1,
            format!(
                "expected class with cards {:?} found {hits} times",
                e.cards()
            ),
        )?;
    }
    Ok(())
}

fn c1_group_of_order_two() -> Outcome {
    let c = corpus::category("c2").map_err(|e| e.to_string())?;
    let report = enumerate_reflexive(&c, 4, lim()).map_err(|e| e.to_string())?;
    let g = contra_rep(&c, 0);
    let gg = copies(&c, 2);
    let expected = [
        initial(&c, Variance::Contravariant),
        terminal(&c, Variance::Contravariant),
        g.clone(),
        gg.clone(),
    ];
    classes_are(&report.classes, &expected)?;
    let prod = product(&c, Variance::Contravariant, &[g.clone(), g]).map_err(|e| e.to_string())?;
    ensure(iso(&gg, &prod), "G+G is not isomorphic to GxG")?;
    Ok("4 classes: initial, terminal, G, G+G; G+G = GxG".into())
}

fn c2_larger_groups() -> Outcome {
    let mut counts = Vec::new();
    for name in ["c3", "c2xc2"] {
        let c = corpus::category(name).map_err(|e| e.to_string())?;
        let report = enumerate_reflexive(&c, 6, lim()).map_err(|e| e.to_string())?;
        ensure(
            report.complete_within_bound,
            format!("{name}: undecided candidates"),
        )?;
        let expected = [
            initial(&c, Variance::Contravariant),
            terminal(&c, Variance::Contravariant),
            contra_rep(&c, 0),
        ];
        classes_are(&report.classes, &expected).map_err(|e| format!("{name}: {e}"))?;
        counts.push(report.classes.len());
    }
    Ok(format!(
        "C3 and C2xC2 have {counts:?} classes against 4 for C2"
    ))
}

fn c3_idempotent_monoid() -> Outcome {
    let c = corpus::category("idempotent").map_err(|e| e.to_string())?;
    let report = enumerate_reflexive(&c, 4, lim()).map_err(|e| e.to_string())?;
    classes_are(
        &report.classes,
        &[contra_rep(&c, 0), terminal(&c, Variance::Contravariant)],
    )?;
    let cc = cauchy_completion(&c).map_err(|e| e.to_string())?;
    ensure(
        cc.category.num_objects() == 2,
        "Cauchy completion does not have 2 objects",
    )?;
    let again = enumerate_reflexive(&cc.category, 4, lim()).map_err(|e| e.to_string())?;
    ensure(
        again.classes.len() == 2,
        format!("{} classes on the Cauchy completion", again.classes.len()),
    )?;
    Ok("2 classes; Cauchy completion has 2 objects and 2 classes".into())
}

fn c4_conjugate_growth() -> Outcome {
    let c = corpus::category("c3").map_err(|e| e.to_string())?;
    let mut orbits = Vec::new();
    for n in 1..=3u32 {
        let conj = conjugate(&copies(&c, n as usize), lim())
            .map_err(|e| e.to_string())?
            .output;
        // Nat(nG, G) = G^n as a set, acted on freely.
        ensure(
            conj.total_size() == 3usize.pow(n),
            format!("n = {n}: conjugate has {} elements", conj.total_size()),
        )?;
        let k = conj.connected_components().len();
        ensure(k == 3usize.pow(n - 1), format!("n = {n}: {k} orbits"))?;
        orbits.push(k);
    }
    let steps = iterate_conjugates(&copies(&c, 2), 3, lim()).map_err(|e| e.to_string())?;
    let signature: Vec<usize> = steps.iter().map(|s| s.orbit_signature.len()).collect();
    ensure(
        signature == [2, 3, 9],
        format!("iterated orbit counts {signature:?}"),
    )?;
    ensure(
        steps.iter().all(|s| s.iso_to.is_none()),
        "an iterate repeats",
    )?;
    Ok(format!(
        "orbit counts {orbits:?}; iterates {signature:?} with no repetition"
    ))
}

fn c5_discrete() -> Outcome {
    for n in [2, 3] {
        let c = Arc::new(discrete(n));
        let report = enumerate_reflexive(&c, 3, lim()).map_err(|e| e.to_string())?;
        let mut expected: Vec<SetFunctor> = (0..n).map(|a| contra_rep(&c, a)).collect();
        expected.push(initial(&c, Variance::Contravariant));
        expected.push(terminal(&c, Variance::Contravariant));
        classes_are(&report.classes, &expected).map_err(|e| format!("discrete({n}): {e}"))?;
    }
    let empty = Arc::new(discrete(0));
    let k = enumerate_reflexive(&empty, 3, lim())
        .map_err(|e| e.to_string())?
        .classes
        .len();
    ensure(k == 1, format!("empty category has {k} classes"))?;
    let one = Arc::new(discrete(1));
    let k = enumerate_reflexive(&one, 3, lim())
        .map_err(|e| e.to_string())?
        .classes
        .len();
    ensure(k == 1, format!("terminal category has {k} classes"))?;
    let cert =
        is_reflexive(&initial(&one, Variance::Contravariant), lim()).map_err(|e| e.to_string())?;
    ensure(
        cert.failing_object == Some(0),
        "initial presheaf certificate does not fail at the object",
    )?;
    Ok("discrete(2), discrete(3): reps + initial + terminal; empty: 1; terminal: 1 with failing eta".into())
}

/// Cuts by brute force over all subsets: `X = lower(upper(X))`.
fn brute_force_cuts(p: &FinPoset) -> usize {
    let n = p.len();
    let upper = |s: u64| {
        (0..n)
            .filter(|&b| (0..n).all(|a| s >> a & 1 == 0 || p.leq(a, b)))
            .fold(0u64, |m, b| m | 1 << b)
    };
    let lower = |s: u64| {
        (0..n)
            .filter(|&a| (0..n).all(|b| s >> b & 1 == 0 || p.leq(a, b)))
            .fold(0u64, |m, a| m | 1 << a)
    };
    (0..1u64 << n).filter(|&s| lower(upper(s)) == s).count()
}

fn c6_posets() -> Outcome {
    let mut counts = Vec::new();
    for n in 0..=5 {
        let posets = all_posets_up_to_iso(n);
        counts.push(posets.len());
        for p in &posets {
            let cross = crosscheck_with_categorical(p, lim()).map_err(|e| e.to_string())?;
            ensure(cross.ok(), format!("crosscheck fails on {:?}", p.to_raw()))?;
            ensure(
                cross.cuts == brute_force_cuts(p),
                format!("cut count differs on {:?}", p.to_raw()),
            )?;
        }
    }
    ensure(
        counts == [1, 1, 2, 5, 16, 63],
        format!("poset counts {counts:?}"),
    )?;
    Ok(format!(
        "all {} posets on <= 5 elements agree (per size {counts:?})",
        counts.iter().sum::<usize>()
    ))
}

fn c7_cones() -> Outcome {
    let cats = corpus::categories();
    for (name, c) in &cats {
        let t = terminal(c, Variance::Contravariant);
        let conj = conjugate(&cone_functor(c), lim())
            .map_err(|e| e.to_string())?
            .output;
        ensure(
            iso(&conj, &t),
            format!("{name}: conjugate of the cone functor is not terminal"),
        )?;
        ensure(
            is_reflexive(&t, lim())
                .map_err(|e| e.to_string())?
                .reflexive,
            format!("{name}: terminal not reflexive"),
        )?;
    }
    Ok(format!("{} corpus categories", cats.len()))
}

fn c8_limit_counterexample() -> Outcome {
    let r = rcn_lim_counterexample(&Arc::new(discrete(2)), lim()).map_err(|e| e.to_string())?;
    ensure(r.s_size == 4, format!("|S| = {}", r.s_size))?;
    ensure(r.iso_to_copies, "L is not S copies of the representable")?;
    ensure(
        r.witness_natural && r.witness_not_projection && r.eta_not_surjective,
        "witness does not certify",
    )?;
    ensure(!r.reflexive, "L is reflexive")?;
    Ok("|S| = 4, L = S x J(-,z), L not reflexive".into())
}

fn c9_kappa() -> Outcome {
    let c = corpus::category("c2").map_err(|e| e.to_string())?;
    let g = contra_rep(&c, 0);
    let mut zs = enumerate_presheaves(&c, 5, lim()).map_err(|e| e.to_string())?;
    zs.truncate(10);
    ensure(zs.len() == 10, "fewer than 10 presheaves")?;
    for z in &zs {
        let k = kappa(&g, z, lim()).map_err(|e| e.to_string())?;
        // The coend of the left regular action with z is z, and Nat(G, z) = z(*).
        ensure(
            k.classes == z.total_size() && k.nat_count == z.total_size(),
            "class or Nat count off",
        )?;
        ensure(
            k.bijective,
            format!("not bijective at z with cards {:?}", z.cards()),
        )?;
    }
    let t = terminal(&c, Variance::Contravariant);
    let k = kappa(&t, &t, lim()).map_err(|e| e.to_string())?;
    ensure(
        k.classes == 0 && k.nat_count == 1 && !k.bijective,
        "terminal case is bijective",
    )?;
    Ok("bijective at 10 presheaves; not bijective for the terminal presheaf".into())
}

fn c10_two_point_grid() -> Outcome {
    let space = Arc::new(GenMetric::two_point(Q::int(1)));
    let (mut points, mut tight) = (0, 0);
    for i in 0..=8 {
        for j in 0..=8 {
            let v = [Q::ratio(i, 4), Q::ratio(j, 4)];
            let valid = (i - j).abs() <= 4;
            let inside = i <= 4 && j <= 4;
            let on_line = i + j == 4;
            let f = CostVector::new(space.clone(), Variance::Contravariant, v.to_vec());
            ensure(f.is_ok() == valid, format!("validity of ({i}/4, {j}/4)"))?;
            let Ok(f) = f else { continue };
            let isbell = is_isbell_point(&f).map_err(|e| e.to_string())?;
            ensure(
                isbell == inside,
                format!("Isbell point test at ({i}/4, {j}/4)"),
            )?;
            let t = is_tight_span_point(&f).map_err(|e| e.to_string())?;
            ensure(t == on_line, format!("tight span test at ({i}/4, {j}/4)"))?;
            points += isbell as usize;
            tight += t as usize;
        }
    }
    let d = completion_distance(&yoneda_cost(&space, 0), &yoneda_cost(&space, 1))
        .map_err(|e| e.to_string())?;
    ensure(
        d == Q::int(1),
        format!("distance between Yoneda images {d}"),
    )?;
    Ok(format!(
        "81 grid points: {points} Isbell points, {tight} tight span points, distance 1"
    ))
}

fn c11_partial_bijections() -> Outcome {
    let big = Arc::new(partial_bijections(3));
    let m = corpus::category("pbij7").map_err(|e| e.to_string())?;
    let j = FinFunctor::inclusion(m, big.clone()).map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for k in 1..=3usize {
        let x = nerve_presheaf(&j, big.object_id(&format!("s{k}")).unwrap())
            .map_err(|e| e.to_string())?;
        // Partial injections from 2 points into k points: 1 + 2k + k(k-1).
        ensure(
            x.total_size() == 1 + 2 * k + k * (k - 1),
            format!("nerve at s{k} has {} elements", x.total_size()),
        )?;
        ensure(
            is_reflexive(&x, lim())
                .map_err(|e| e.to_string())?
                .reflexive,
            format!("nerve at s{k} not reflexive"),
        )?;
        sizes.push(x.total_size());
    }
    Ok(format!("nerves of sizes {sizes:?} are reflexive"))
}

fn metric_spaces() -> Vec<Arc<GenMetric>> {
    let q = |s: &str| s.parse::<Q>().unwrap();
    let mut out: Vec<Arc<GenMetric>> = corpus::METRICS
        .iter()
        .map(|(n, _)| corpus::metric(n).unwrap())
        .collect();
    let asym = RawMetric {
        points: vec!["a".into(), "b".into(), "c".into()],
        d: vec![
            vec![q("0"), q("1"), q("2")],
            vec![q("inf"), q("0"), q("1")],
            vec![q("inf"), q("3/2"), q("0")],
        ],
        symmetric: false,
    };
    let line = RawMetric {
        points: vec!["a".into(), "b".into(), "c".into()],
        d: vec![
            vec![q("0"), q("1"), q("2")],
            vec![q("1"), q("0"), q("1")],
            vec![q("2"), q("1"), q("0")],
        ],
        symmetric: true,
    };
    out.push(Arc::new(GenMetric::new(asym).unwrap()));
    out.push(Arc::new(GenMetric::new(line).unwrap()));
    out
}

fn metric_invariants() -> Result<usize, String> {
    let grid: Vec<Q> = ["0", "1/2", "1", "3/2", "2", "inf"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mut checked = 0;
    for space in metric_spaces() {
        let n = space.len();
        for a in 0..n {
            for b in 0..n {
                let d =
                    completion_distance(&yoneda_cost(&space, a), &yoneda_cost(&space, b)).unwrap();
                ensure(&d == space.d(a, b), "Yoneda embedding is not an isometry")?;
            }
        }
        let mut tight = Vec::new();
        for code in 0..grid.len().pow(n as u32) {
            let v: Vec<Q> = (0..n)
                .map(|i| grid[code / grid.len().pow(i as u32) % grid.len()].clone())
                .collect();
            let Ok(f) = CostVector::new(space.clone(), Variance::Contravariant, v) else {
                continue;
            };
            let ff = double_conj_cost(&f).map_err(|e| e.to_string())?;
            ensure(pointwise_le(&ff, &f), "double conjugate exceeds f")?;
            ensure(
                conj_cost(&ff) == conj_cost(&f),
                "triple conjugate differs from single",
            )?;
            if space.is_symmetric() && is_tight_span_point(&f).unwrap() {
                ensure(
                    is_isbell_point(&f).unwrap(),
                    "tight span point outside the Isbell completion",
                )?;
                tight.push(f);
            }
            checked += 1;
        }
        for f in &tight {
            for g in &tight {
                ensure(
                    completion_distance(f, g).unwrap() == completion_distance(g, f).unwrap(),
                    "tight span is asymmetric",
                )?;
            }
        }
    }
    Ok(checked)
}

fn c12_property_suites() -> Outcome {
    let mut pairs = 0;
    for (name, c, bound) in slices() {
        let xs = functors(&c, Variance::Contravariant, bound);
        let ys = functors(&c, Variance::Covariant, bound);
        for x in &xs {
            for y in &ys {
                let adj = adjunction_bijection(x, y, lim()).map_err(|e| format!("{name}: {e}"))?;
                ensure(
                    adj.left.len() == adj.right.len(),
                    format!("{name}: adjunction sides differ"),
                )?;
                pairs += 1;
            }
        }
        duality_holds(&c, bound).map_err(|e| format!("{name}: {e}"))?;
    }
    let presheaves = corpus_presheaves();
    for w in &presheaves {
        ensure(
            split_mono_check(w, lim()).map_err(|e| e.to_string())?.holds,
            "eta on a conjugate is not split monic",
        )?;
    }
    let costs = metric_invariants()?;
    Ok(format!(
        "{pairs} adjunction pairs, {} split monos, duality on {} slices, {costs} cost vectors",
        presheaves.len(),
        slices().len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "reflexive completion of the group of order 2",
            c1_group_of_order_two,
            DEFAULT_BUDGET,
        ),
        (
            "groups of order 3 and 4 have three classes",
            c2_larger_groups,
            DEFAULT_BUDGET,
        ),
        (
            "idempotent monoid and its Cauchy completion",
            c3_idempotent_monoid,
            DEFAULT_BUDGET,
        ),
        (
            "conjugate orbit growth for free actions",
            c4_conjugate_growth,
            DEFAULT_BUDGET,
        ),
        (
            "discrete, empty and terminal categories",
            c5_discrete,
            DEFAULT_BUDGET,
        ),
        (
            "cut lattices agree with reflexive presheaves",
            c6_posets,
            LONG_BUDGET,
        ),
        (
            "cone functors and the terminal presheaf",
            c7_cones,
            DEFAULT_BUDGET,
        ),
        (
            "limit of representables that is not reflexive",
            c8_limit_counterexample,
            DEFAULT_BUDGET,
        ),
        ("comparison map from the coend", c9_kappa, DEFAULT_BUDGET),
        (
            "two-point metric space grid sweep",
            c10_two_point_grid,
            DEFAULT_BUDGET,
        ),
        (
            "partial bijection monoid nerves",
            c11_partial_bijections,
            LONG_BUDGET,
        ),
        (
            "property suites on the corpus",
            c12_property_suites,
            LONG_BUDGET,
        ),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > *budget => Err(format!("took {elapsed:.1?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
