#![allow(dead_code)]

use std::sync::Arc;

use isbell::completion::{enumerate_functors, enumerate_reflexive, enumerate_reflexive_with};
use isbell::conjugacy::conjugate;
use isbell::corpus;
use isbell::fincat::{from_poset, FinCat};
use isbell::order::FinPoset;
use isbell::setfun::{is_isomorphic, Limits, SetFunctor, Variance};

pub fn lim() -> Limits {
    Limits::default()
}

/// Corpus categories with a per-object bound small enough for exhaustive checks.
pub fn slices() -> Vec<(String, Arc<FinCat>, usize)> {
    let mut out: Vec<(String, Arc<FinCat>, usize)> = [
        ("c2", 4),
        ("c3", 3),
        ("c2xc2", 4),
        ("idempotent", 3),
        ("pbij7", 2),
        ("discrete0", 2),
        ("discrete1", 2),
        ("discrete2", 2),
        ("discrete3", 1),
    ]
    .into_iter()
    .map(|(name, bound)| (name.to_string(), corpus::category(name).unwrap(), bound))
    .collect();
    for name in ["antichain2", "chain2", "chain3", "waist5"] {
        let p: FinPoset = corpus::poset(name).unwrap();
        out.push((format!("poset {name}"), Arc::new(from_poset(&p)), 1));
    }
    out
}

/// Functors of one variance on a slice, up to isomorphism.
pub fn functors(c: &Arc<FinCat>, variance: Variance, bound: usize) -> Vec<SetFunctor> {
    enumerate_functors(c, variance, bound, lim()).unwrap()
}

/// Every presheaf of every slice.
pub fn corpus_presheaves() -> Vec<SetFunctor> {
    slices()
        .into_iter()
        .flat_map(|(_, c, b)| functors(&c, Variance::Contravariant, b))
        .collect()
}

/// The same functor with the elements of each set listed in a different order.
pub fn relabel(x: &SetFunctor, perms: &[Vec<usize>]) -> SetFunctor {
    let base = &x.base;
    let mut inv = Vec::new();
    for p in perms {
        let mut q = vec![0; p.len()];
        for (i, &j) in p.iter().enumerate() {
            q[j] = i;
        }
        inv.push(q);
    }
    // New position of old element i at object a is perms[a][i].
    let sets = (0..base.num_objects())
        .map(|a| {
            let mut s = vec![String::new(); x.card(a)];
            for (i, name) in x.sets[a].iter().enumerate() {
                s[perms[a][i]] = name.clone();
            }
            s
        })
        .collect();
    let actions = (0..base.num_morphisms())
        .map(|f| {
            let (s, t) = x.endpoints(f);
            (0..x.card(s))
                .map(|new| perms[t][x.actions[f][inv[s][new]]])
                .collect()
        })
        .collect();
    SetFunctor::new(base.clone(), x.variance, sets, actions).unwrap()
}

/// Reflexive copresheaves on `c` agree with reflexive presheaves on its
/// opposite, and conjugation matches them with reflexive presheaves on `c`
/// one class to one class, wherever the conjugate fits within `bound`.
pub fn duality_holds(c: &Arc<FinCat>, bound: usize) -> Result<(), String> {
    let here = enumerate_reflexive(c, bound, lim()).map_err(|e| e.to_string())?;
    let op = Arc::new(c.opposite());
    let co = enumerate_reflexive_with(c, Variance::Covariant, bound, lim())
        .map_err(|e| e.to_string())?;
    let there = enumerate_reflexive(&op, bound, lim()).map_err(|e| e.to_string())?;
    if co.classes.len() != there.classes.len() {
        return Err(format!(
            "{} copresheaf classes but {} on the opposite",
            co.classes.len(),
            there.classes.len()
        ));
    }
    for x in &there.classes {
        let back = x.transport(c.clone()).map_err(|e| e.to_string())?;
        if !co
            .classes
            .iter()
            .any(|y| is_isomorphic(y, &back, lim()).unwrap().is_some())
        {
            return Err("class on the opposite has no copresheaf counterpart".into());
        }
    }
    let mut images: Vec<usize> = Vec::new();
    for x in &here.classes {
        let conj = conjugate(x, lim()).map_err(|e| e.to_string())?.output;
        if conj.cards().iter().any(|&k| k > bound) {
            continue;
        }
        let hit = co
            .classes
            .iter()
            .position(|y| is_isomorphic(y, &conj, lim()).unwrap().is_some())
            .ok_or("conjugate of a reflexive class is missing")?;
        if images.contains(&hit) {
            return Err("two reflexive classes share a conjugate".into());
        }
        images.push(hit);
    }
    for (k, y) in co.classes.iter().enumerate() {
        let conj = conjugate(y, lim()).map_err(|e| e.to_string())?.output;
        if conj.cards().iter().all(|&n| n <= bound) && !images.contains(&k) {
            return Err("copresheaf class not reached by conjugation".into());
        }
    }
    Ok(())
}
