//! Built-in example data: small categories, posets and metric spaces.

use std::sync::Arc;

use serde::Serialize;

use crate::completion::{
    cone_functor, enumerate_presheaves, enumerate_reflexive, kappa, rcn_lim_counterexample,
};
use crate::conjugacy::{conjugate, is_reflexive, iterate_conjugates};
use crate::error::{Error, Result};
use crate::fincat::{discrete, partial_bijections, FinCat, FinFunctor, RawCategory};
use crate::metric::{
    completion_distance, is_isbell_point, yoneda_cost, CostVector, ExtNonnegRational, GenMetric,
    RawMetric,
};
use crate::order::{crosscheck_with_categorical, dm_completion, FinPoset, RawPoset};
use crate::setfun::{
    coproduct, is_isomorphic, nerve_presheaf, representable, terminal, Limits, Variance,
};

pub const CATEGORIES: &[(&str, &str)] = &[
    ("c2", include_str!("../corpus/c2.json")),
    ("c3", include_str!("../corpus/c3.json")),
    ("c2xc2", include_str!("../corpus/c2xc2.json")),
    ("idempotent", include_str!("../corpus/idempotent.json")),
    ("pbij7", include_str!("../corpus/pbij7.json")),
    ("discrete0", include_str!("../corpus/discrete0.json")),
    ("discrete1", include_str!("../corpus/discrete1.json")),
    ("discrete2", include_str!("../corpus/discrete2.json")),
    ("discrete3", include_str!("../corpus/discrete3.json")),
];

pub const POSETS: &[(&str, &str)] = &[
    ("empty", include_str!("../corpus/poset_empty.json")),
    (
        "antichain2",
        include_str!("../corpus/poset_antichain2.json"),
    ),
    ("chain2", include_str!("../corpus/poset_chain2.json")),
    ("chain3", include_str!("../corpus/poset_chain3.json")),
    ("waist5", include_str!("../corpus/poset_waist5.json")),
];

pub const METRICS: &[(&str, &str)] = &[
    (
        "two_point_1",
        include_str!("../corpus/metric_two_point_1.json"),
    ),
    (
        "two_point_2",
        include_str!("../corpus/metric_two_point_2.json"),
    ),
];

fn lookup<'a>(table: &'a [(&str, &str)], kind: &str, name: &str) -> Result<&'a str> {
    table
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::Parse(format!("no built-in {kind} named `{name}`")))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn category(name: &str) -> Result<Arc<FinCat>> {
    let raw: RawCategory = parse(lookup(CATEGORIES, "category", name)?)?;
    Ok(Arc::new(FinCat::new(raw)?))
}

pub fn poset(name: &str) -> Result<FinPoset> {
    let raw: RawPoset = parse(lookup(POSETS, "poset", name)?)?;
    FinPoset::from_raw(&raw)
}

pub fn metric(name: &str) -> Result<Arc<GenMetric>> {
    let raw: RawMetric = parse(lookup(METRICS, "metric space", name)?)?;
    Ok(Arc::new(GenMetric::new(raw)?))
}

/// Every built-in category, in table order.
pub fn categories() -> Vec<(&'static str, Arc<FinCat>)> {
    CATEGORIES
        .iter()
        .map(|(name, _)| (*name, category(name).expect("built-in category is valid")))
        .collect()
}

/// Outcome of one built-in example.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn class_count(name: &str, bound: usize, limits: Limits) -> Result<usize> {
    Ok(enumerate_reflexive(&category(name)?, bound, limits)?
        .classes
        .len())
}

fn free_action(c: &Arc<FinCat>, generators: usize) -> Result<crate::setfun::SetFunctor> {
    let g = representable(c, 0, Variance::Contravariant)?;
    coproduct(c, Variance::Contravariant, &vec![g; generators])
}

fn expect_counts(found: Vec<usize>, expected: Vec<usize>) -> (bool, String) {
    (
        found == expected,
        format!("found {found:?}, expected {expected:?}"),
    )
}

type CheckFn = fn(Limits) -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("reflexive classes of the group of order 2", |l| {
        Ok(expect_counts(vec![class_count("c2", 4, l)?], vec![4]))
    }),
    ("reflexive classes of the groups of order 3 and 4", |l| {
        Ok(expect_counts(
            vec![class_count("c3", 6, l)?, class_count("c2xc2", 6, l)?],
            vec![3, 3],
        ))
    }),
    ("reflexive classes of the idempotent monoid", |l| {
        Ok(expect_counts(
            vec![class_count("idempotent", 4, l)?],
            vec![2],
        ))
    }),
    ("reflexive classes of small discrete categories", |l| {
        let found = (0..4)
            .map(|n| class_count(&format!("discrete{n}"), 3, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(expect_counts(found, vec![1, 1, 4, 5]))
    }),
    (
        "initial presheaf on the terminal category is not reflexive",
        |l| {
            let one = category("discrete1")?;
            let cert = is_reflexive(&crate::setfun::initial(&one, Variance::Contravariant), l)?;
            Ok((
                !cert.reflexive && cert.failing_object == Some(0),
                format!("failing object {:?}", cert.failing_object),
            ))
        },
    ),
    ("conjugates of free actions of the group of order 3", |l| {
        let c = category("c3")?;
        let mut found = Vec::new();
        for n in 1..=3 {
            found.push(
                conjugate(&free_action(&c, n)?, l)?
                    .output
                    .connected_components()
                    .len(),
            );
        }
        Ok(expect_counts(found, vec![1, 3, 9]))
    }),
    ("iterated conjugates never repeat", |l| {
        let c = category("c3")?;
        let steps = iterate_conjugates(&free_action(&c, 2)?, 3, l)?;
        let found: Vec<usize> = steps.iter().map(|s| s.orbit_signature.len()).collect();
        let (ok, detail) = expect_counts(found, vec![2, 3, 9]);
        Ok((ok && steps.iter().all(|s| s.iso_to.is_none()), detail))
    }),
    ("cone functors conjugate to the terminal presheaf", |l| {
        let mut bad = Vec::new();
        for (name, c) in categories() {
            let conj = conjugate(&cone_functor(&c), l)?.output;
            let t = terminal(&c, Variance::Contravariant);
            if is_isomorphic(&conj, &t, l)?.is_none() || !is_reflexive(&t, l)?.reflexive {
                bad.push(name);
            }
        }
        Ok((bad.is_empty(), format!("failures: {bad:?}")))
    }),
    ("limit of representables that is not reflexive", |l| {
        let r = rcn_lim_counterexample(&Arc::new(discrete(2)), l)?;
        Ok((
            r.s_size == 4 && r.iso_to_copies && !r.reflexive,
            format!("|S| = {}, reflexive = {}", r.s_size, r.reflexive),
        ))
    }),
    (
        "comparison map from the coend on the group of order 2",
        |l| {
            let c = category("c2")?;
            let g = representable(&c, 0, Variance::Contravariant)?;
            let mut zs = enumerate_presheaves(&c, 5, l)?;
            zs.truncate(10);
            let mut ok = true;
            for z in &zs {
                ok &= kappa(&g, z, l)?.bijective;
            }
            let t = terminal(&c, Variance::Contravariant);
            let tt = kappa(&t, &t, l)?;
            Ok((
                ok && !tt.bijective,
                format!(
                    "{} targets, terminal bijective = {}",
                    zs.len(),
                    tt.bijective
                ),
            ))
        },
    ),
    ("cut lattices of small posets", |l| {
        let mut found = Vec::new();
        let mut agree = true;
        for (name, _) in POSETS {
            let p = poset(name)?;
            found.push(dm_completion(&p).cuts.len());
            agree &= crosscheck_with_categorical(&p, l)?.ok();
        }
        let (ok, detail) = expect_counts(found, vec![1, 4, 2, 3, 7]);
        Ok((ok && agree, format!("{detail}, crosscheck {agree}")))
    }),
    ("Isbell points of the two-point space", |_| {
        let space = metric("two_point_1")?;
        let q = |s: &str| s.parse::<ExtNonnegRational>();
        let f = CostVector::new(
            space.clone(),
            Variance::Contravariant,
            vec![q("0.3")?, q("0.8")?],
        )?;
        let g = CostVector::new(
            space.clone(),
            Variance::Contravariant,
            vec![q("5")?, q("5")?],
        )?;
        let d = completion_distance(&yoneda_cost(&space, 0), &yoneda_cost(&space, 1))?;
        Ok((
            is_isbell_point(&f)? && !is_isbell_point(&g)? && d == ExtNonnegRational::int(1),
            format!("distance between points {d}"),
        ))
    }),
    (
        "nerves of the partial bijection monoid are reflexive",
        |l| {
            let big = Arc::new(partial_bijections(3));
            let j = FinFunctor::inclusion(category("pbij7")?, big.clone())?;
            let mut sizes = Vec::new();
            let mut ok = true;
            for k in 1..=3 {
                let x = nerve_presheaf(&j, big.object_id(&format!("s{k}"))?)?;
                sizes.push(x.total_size());
                ok &= is_reflexive(&x, l)?.reflexive;
            }
            let (sizes_ok, detail) = expect_counts(sizes, vec![3, 7, 13]);
            Ok((ok && sizes_ok, detail))
        },
    ),
];

/// Runs every built-in example. Errors count as failures.
pub fn run_checks(limits: Limits) -> Vec<Check> {
    CHECKS
        .iter()
        .map(|(name, check)| match check(limits) {
            Ok((passed, detail)) => Check {
                name,
                passed,
                detail,
            },
            Err(e) => Check {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}
