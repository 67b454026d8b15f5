//! Bounded enumeration of reflexive functors, the Cauchy completion, the κ
//! comparison map, and diagnostics around limits.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::conjugacy::{conjugate, is_reflexive, ConjugateResult};
use crate::error::{Error, ResourceExceeded, Result};
use crate::fincat::{
    adjoin_pair_object, compatible_families, cones_on_identity, FinCat, FinFunctor, RawCategory,
    RawMorphism,
};
use crate::setfun::{
    coproduct, initial, is_isomorphic, is_natural, nat_transformations, product, representable,
    Limits, NatTransf, SetFunctor, Variance,
};
use crate::util::{padded, DisjointSets};

const UNSET: usize = usize::MAX;

/// Labelled search for action tables with fixed cardinalities. Composition
/// constraints are propagated to a fixpoint after every choice.
struct ActionSearch<'a> {
    base: &'a FinCat,
    variance: Variance,
    cards: &'a [usize],
    act: Vec<Vec<usize>>,
    vars: Vec<(usize, usize)>,
    triples: Vec<(usize, usize, usize)>,
    trail: Vec<(usize, usize)>,
    visited: u64,
    ceiling: u64,
}

impl<'a> ActionSearch<'a> {
    fn new(base: &'a FinCat, variance: Variance, cards: &'a [usize], limits: Limits) -> Self {
        let endpoints = |f: usize| match variance {
            Variance::Contravariant => (base.cod(f), base.dom(f)),
            Variance::Covariant => (base.dom(f), base.cod(f)),
        };
        let mut act = Vec::with_capacity(base.num_morphisms());
        let mut vars = Vec::new();
        for f in 0..base.num_morphisms() {
            let (s, _) = endpoints(f);
            if base.is_identity(f) {
                act.push((0..cards[s]).collect());
            } else {
                act.push(vec![UNSET; cards[s]]);
                vars.extend((0..cards[s]).map(|i| (f, i)));
            }
        }
        let mut triples = Vec::new();
        for f in 0..base.num_morphisms() {
            for g in 0..base.num_morphisms() {
                if let Some(h) = base.compose(g, f) {
                    let (first, second) = match variance {
                        Variance::Contravariant => (g, f),
                        Variance::Covariant => (f, g),
                    };
                    triples.push((first, second, h));
                }
            }
        }
        Self {
            base,
            variance,
            cards,
            act,
            vars,
            triples,
            trail: Vec::new(),
            visited: 0,
            ceiling: limits.ceiling,
        }
    }

    fn target(&self, f: usize) -> usize {
        match self.variance {
            Variance::Contravariant => self.base.dom(f),
            Variance::Covariant => self.base.cod(f),
        }
    }

    fn set(&mut self, f: usize, i: usize, v: usize, changed: &mut bool) -> bool {
        let cur = self.act[f][i];
        if cur != UNSET {
            return cur == v;
        }
        self.act[f][i] = v;
        self.trail.push((f, i));
        *changed = true;
        true
    }

    /// Enforces `act[second] ∘ act[first] = act[h]` until nothing changes.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for k in 0..self.triples.len() {
                let (first, second, h) = self.triples[k];
                for i in 0..self.act[first].len() {
                    let j = self.act[first][i];
                    if j == UNSET {
                        continue;
                    }
                    let via = self.act[second][j];
                    let direct = self.act[h][i];
                    let ok = match (via != UNSET, direct != UNSET) {
                        (true, _) => self.set(h, i, via, &mut changed),
                        (false, true) => self.set(second, j, direct, &mut changed),
                        (false, false) => true,
                    };
                    if !ok {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (f, i) = self.trail.pop().unwrap();
            self.act[f][i] = UNSET;
        }
    }

    fn run(&mut self, k: usize, visit: &mut dyn FnMut(&[Vec<usize>])) -> Result<()> {
        let Some(&(f, i)) = self.vars.get(k) else {
            visit(&self.act);
            return Ok(());
        };
        if self.act[f][i] != UNSET {
            return self.run(k + 1, visit);
        }
        for v in 0..self.cards[self.target(f)] {
            self.visited += 1;
            if self.visited > self.ceiling {
                return Err(Error::Resource(ResourceExceeded {
                    ceiling: self.ceiling,
                    context: "enumerating action tables".to_string(),
                    profile: self.cards.to_vec(),
                }));
            }
            let mark = self.trail.len();
            let mut changed = false;
            if self.set(f, i, v, &mut changed) && self.propagate() {
                self.run(k + 1, visit)?;
            }
            self.undo(mark);
        }
        Ok(())
    }
}

fn element_names(cards: &[usize]) -> Vec<Vec<String>> {
    cards
        .iter()
        .map(|&n| (0..n).map(|i| i.to_string()).collect())
        .collect()
}

/// Groups functors into isomorphism classes, keeping the first of each.
pub fn dedup_up_to_iso(xs: Vec<SetFunctor>, limits: Limits) -> Result<Vec<SetFunctor>> {
    let mut buckets: BTreeMap<Vec<(usize, usize)>, Vec<usize>> = BTreeMap::new();
    let mut kept: Vec<SetFunctor> = Vec::new();
    for x in xs {
        let bucket = buckets.entry(x.signature()).or_default();
        let mut duplicate = false;
        for &k in bucket.iter() {
            if is_isomorphic(&kept[k], &x, limits)?.is_some() {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            bucket.push(kept.len());
            kept.push(x);
        }
    }
    Ok(kept)
}

/// Connected functors with at most `bound` elements at each object, one per
/// isomorphism class, ordered by size.
pub fn enumerate_connected(
    c: &Arc<FinCat>,
    variance: Variance,
    bound: usize,
    limits: Limits,
) -> Result<(Vec<SetFunctor>, u64)> {
    let n = c.num_objects();
    let mut found = Vec::new();
    let mut labelled = 0u64;
    let mut cards = vec![0; n];
    loop {
        // Advance the cardinality vector like an odometer.
        let mut k = 0;
        while k < n && cards[k] == bound {
            cards[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        cards[k] += 1;
        let mut search = ActionSearch::new(c, variance, &cards, limits);
        let sets = element_names(&cards);
        search.run(0, &mut |act| {
            labelled += 1;
            let x = SetFunctor::new_unchecked(c.clone(), variance, sets.clone(), act.to_vec());
            if x.connected_components().len() == 1 {
                found.push(x);
            }
        })?;
    }
    let mut classes = dedup_up_to_iso(found, limits)?;
    classes.sort_by_key(|x| (x.total_size(), x.cards()));
    Ok((classes, labelled))
}

/// Every functor with at most `bound` elements per object, up to isomorphism,
/// as coproducts of connected ones.
pub fn enumerate_functors(
    c: &Arc<FinCat>,
    variance: Variance,
    bound: usize,
    limits: Limits,
) -> Result<Vec<SetFunctor>> {
    let (connected, _) = enumerate_connected(c, variance, bound, limits)?;
    multisets(c, variance, &connected, bound)
}

fn multisets(
    c: &Arc<FinCat>,
    variance: Variance,
    parts: &[SetFunctor],
    bound: usize,
) -> Result<Vec<SetFunctor>> {
    fn go(
        parts: &[SetFunctor],
        k: usize,
        room: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == parts.len() {
            out.push(chosen.clone());
            return;
        }
        go(parts, k + 1, room, chosen, out);
        let cards = parts[k].cards();
        let mut taken = 0;
        while cards.iter().zip(room.iter()).all(|(c, r)| c <= r) {
            for (r, c) in room.iter_mut().zip(&cards) {
                *r -= c;
            }
            chosen.push(k);
            taken += 1;
            go(parts, k + 1, room, chosen, out);
        }
        for _ in 0..taken {
            chosen.pop();
            for (r, c) in room.iter_mut().zip(&cards) {
                *r += c;
            }
        }
    }
    let mut choices = Vec::new();
    let mut room = vec![bound; c.num_objects()];
    go(parts, 0, &mut room, &mut Vec::new(), &mut choices);
    let mut out = Vec::with_capacity(choices.len());
    for choice in choices {
        let summands: Vec<SetFunctor> = choice.iter().map(|&k| parts[k].clone()).collect();
        out.push(if summands.len() == 1 {
            summands[0].clone()
        } else {
            coproduct(c, variance, &summands)?
        });
    }
    out.sort_by_key(|x| (x.total_size(), x.cards()));
    Ok(out)
}

/// Presheaves with at most `bound` elements per object, up to isomorphism.
pub fn enumerate_presheaves(
    c: &Arc<FinCat>,
    bound: usize,
    limits: Limits,
) -> Result<Vec<SetFunctor>> {
    enumerate_functors(c, Variance::Contravariant, bound, limits)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    pub labelled_tables: u64,
    pub connected_classes: usize,
    pub candidates: usize,
    pub reflexive: usize,
    /// Candidates whose reflexivity check exceeded the search ceiling.
    pub undecided: usize,
}

#[derive(Clone, Debug)]
pub struct ReflexiveCompletionReport {
    pub base: Arc<FinCat>,
    pub variance: Variance,
    pub bound: usize,
    pub classes: Vec<SetFunctor>,
    /// True when every candidate within the bound was decided.
    pub complete_within_bound: bool,
    /// True when every representable is isomorphic to a listed class.
    pub representables_covered: bool,
    pub stats: EnumerationStats,
}

/// Reflexive presheaves with at most `bound` elements per object, one per
/// isomorphism class.
pub fn enumerate_reflexive(
    c: &Arc<FinCat>,
    bound: usize,
    limits: Limits,
) -> Result<ReflexiveCompletionReport> {
    enumerate_reflexive_with(c, Variance::Contravariant, bound, limits)
}

pub fn enumerate_reflexive_with(
    c: &Arc<FinCat>,
    variance: Variance,
    bound: usize,
    limits: Limits,
) -> Result<ReflexiveCompletionReport> {
    let (connected, labelled) = enumerate_connected(c, variance, bound, limits)?;
    let candidates = multisets(c, variance, &connected, bound)?;
    let mut stats = EnumerationStats {
        labelled_tables: labelled,
        connected_classes: connected.len(),
        candidates: candidates.len(),
        ..Default::default()
    };
    let mut classes = Vec::new();
    for x in candidates {
        match is_reflexive(&x, limits) {
            Ok(cert) if cert.reflexive => classes.push(x),
            Ok(_) => {}
            Err(Error::Resource(_)) => stats.undecided += 1,
            Err(e) => return Err(e),
        }
    }
    stats.reflexive = classes.len();
    let mut representables_covered = true;
    for a in 0..c.num_objects() {
        let rep = representable(c, a, variance)?;
        let mut hit = false;
        for x in &classes {
            if is_isomorphic(&rep, x, limits)?.is_some() {
                hit = true;
                break;
            }
        }
        representables_covered &= hit;
    }
    Ok(ReflexiveCompletionReport {
        base: c.clone(),
        variance,
        bound,
        complete_within_bound: stats.undecided == 0,
        representables_covered,
        classes,
        stats,
    })
}

/// The full subcategory of the functor category on the listed classes,
/// with the Yoneda embedding of the base into it.
pub fn reflexive_completion_category(
    report: &ReflexiveCompletionReport,
    limits: Limits,
) -> Result<(Arc<FinCat>, FinFunctor)> {
    let classes = &report.classes;
    let k = classes.len();
    let names: Vec<String> = (0..k).map(|i| padded("r", i, k)).collect();
    let mut homs: Vec<Vec<Vec<NatTransf>>> = Vec::with_capacity(k);
    for x in classes {
        let mut row = Vec::with_capacity(k);
        for y in classes {
            row.push(nat_transformations(x, y, limits)?);
        }
        homs.push(row);
    }
    let mor_name = |i: usize, j: usize, t: usize| format!("{}>{}#{}", names[i], names[j], t);
    let mut raw = RawCategory {
        objects: names.clone(),
        ..Default::default()
    };
    for i in 0..k {
        let id = NatTransf::identity(&classes[i]);
        let t = homs[i][i]
            .binary_search(&id)
            .map_err(|_| Error::Internal("identity is missing".into()))?;
        raw.identities.insert(names[i].clone(), mor_name(i, i, t));
        for j in 0..k {
            for (t, alpha) in homs[i][j].iter().enumerate() {
                raw.morphisms.push(RawMorphism {
                    id: mor_name(i, j, t),
                    dom: names[i].clone(),
                    cod: names[j].clone(),
                });
                for l in 0..k {
                    for (s, beta) in homs[j][l].iter().enumerate() {
                        let composite = beta.after(alpha);
                        let r = homs[i][l]
                            .binary_search(&composite)
                            .map_err(|_| Error::Internal("composite is missing".into()))?;
                        raw.compose
                            .push([mor_name(j, l, s), mor_name(i, j, t), mor_name(i, l, r)]);
                    }
                }
            }
        }
    }
    let r = Arc::new(FinCat::new(raw)?);
    let c = &report.base;
    let mut object_map = Vec::with_capacity(c.num_objects());
    let mut isos = Vec::with_capacity(c.num_objects());
    for a in 0..c.num_objects() {
        let rep = representable(c, a, report.variance)?;
        let mut hit = None;
        for (i, x) in classes.iter().enumerate() {
            if let Some(iso) = is_isomorphic(&rep, x, limits)? {
                hit = Some((i, iso));
                break;
            }
        }
        let (i, iso) = hit.ok_or_else(|| {
            Error::Precondition(format!(
                "representable at `{}` is not among the classes",
                c.object_name(a)
            ))
        })?;
        object_map.push(i);
        isos.push(iso);
    }
    let mut morphism_map = Vec::with_capacity(c.num_morphisms());
    for f in 0..c.num_morphisms() {
        let (a, b) = (c.dom(f), c.cod(f));
        // Post- or precomposition with f between representables.
        let (from, to) = match report.variance {
            Variance::Contravariant => (a, b),
            Variance::Covariant => (b, a),
        };
        let yf = NatTransf {
            components: (0..c.num_objects())
                .map(|x| match report.variance {
                    Variance::Contravariant => c
                        .hom(x, a)
                        .iter()
                        .map(|&m| c.hom_position(c.comp(f, m)))
                        .collect(),
                    Variance::Covariant => c
                        .hom(b, x)
                        .iter()
                        .map(|&m| c.hom_position(c.comp(m, f)))
                        .collect(),
                })
                .collect(),
        };
        let alpha = isos[to].after(&yf).after(&isos[from].inverse());
        let (i, j) = (object_map[from], object_map[to]);
        let t = homs[i][j]
            .binary_search(&alpha)
            .map_err(|_| Error::Internal("embedded morphism is missing".into()))?;
        morphism_map.push(r.morphism_id(&mor_name(i, j, t))?);
    }
    // A covariant embedding is contravariant on the nose, so it lands in the opposite.
    let target = match report.variance {
        Variance::Contravariant => r.clone(),
        Variance::Covariant => Arc::new(r.opposite()),
    };
    let j = FinFunctor::new(c.clone(), target, object_map, morphism_map)?;
    Ok((r, j))
}

#[derive(Clone, Debug)]
pub struct CauchyCompletion {
    pub base: Arc<FinCat>,
    /// Pairs `(a, e)` with `e` an idempotent on `a`.
    pub objects: Vec<(usize, usize)>,
    pub category: Arc<FinCat>,
    /// `a ↦ (a, id_a)`.
    pub inclusion: FinFunctor,
}

/// All idempotent endomorphisms, as `(object, morphism)` pairs.
pub fn idempotents(c: &FinCat) -> Vec<(usize, usize)> {
    (0..c.num_objects())
        .flat_map(|a| c.hom(a, a).iter().map(move |&e| (a, e)))
        .filter(|&(_, e)| c.comp(e, e) == e)
        .collect()
}

/// Objects are idempotents `(a, e)`; maps `(a, e) → (a', e')` are the
/// `f: a → a'` with `e'∘f∘e = f`, and `e` is the identity on `(a, e)`.
pub fn cauchy_completion(c: &Arc<FinCat>) -> Result<CauchyCompletion> {
    let objects = idempotents(c);
    let name = |&(a, e): &(usize, usize)| format!("({},{})", c.object_name(a), c.morphism_name(e));
    let names: Vec<String> = objects.iter().map(name).collect();
    let mor =
        |s: usize, t: usize, f: usize| format!("{}:{}>{}", c.morphism_name(f), names[s], names[t]);
    let homs = |s: usize, t: usize| -> Vec<usize> {
        let ((a, e), (b, e2)) = (objects[s], objects[t]);
        c.hom(a, b)
            .iter()
            .copied()
            .filter(|&f| c.comp(e2, c.comp(f, e)) == f)
            .collect()
    };
    let mut raw = RawCategory {
        objects: names.clone(),
        ..Default::default()
    };
    for s in 0..objects.len() {
        raw.identities
            .insert(names[s].clone(), mor(s, s, objects[s].1));
        for t in 0..objects.len() {
            for f in homs(s, t) {
                raw.morphisms.push(RawMorphism {
                    id: mor(s, t, f),
                    dom: names[s].clone(),
                    cod: names[t].clone(),
                });
                for u in 0..objects.len() {
                    for g in homs(t, u) {
                        raw.compose
                            .push([mor(t, u, g), mor(s, t, f), mor(s, u, c.comp(g, f))]);
                    }
                }
            }
        }
    }
    let category = Arc::new(FinCat::new(raw)?);
    let object_of = |a: usize| {
        objects
            .iter()
            .position(|&(b, e)| b == a && e == c.identity(a))
            .unwrap()
    };
    let object_map: Vec<usize> = (0..c.num_objects())
        .map(|a| category.object_id(&names[object_of(a)]))
        .collect::<Result<_>>()?;
    let morphism_map: Vec<usize> = (0..c.num_morphisms())
        .map(|f| category.morphism_id(&mor(object_of(c.dom(f)), object_of(c.cod(f)), f)))
        .collect::<Result<_>>()?;
    let inclusion = FinFunctor::new(c.clone(), category.clone(), object_map, morphism_map)?;
    Ok(CauchyCompletion {
        base: c.clone(),
        objects,
        category,
        inclusion,
    })
}

/// The retract of `A(−,a)` cut out by an idempotent `e`: maps `m` with `e∘m = m`.
pub fn split_presheaf(c: &Arc<FinCat>, a: usize, e: usize) -> Result<SetFunctor> {
    let rep = representable(c, a, Variance::Contravariant)?;
    let keep: Vec<Vec<usize>> = (0..c.num_objects())
        .map(|x| {
            c.hom(x, a)
                .iter()
                .enumerate()
                .filter(|&(_, &m)| c.comp(e, m) == m)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let sets = keep
        .iter()
        .enumerate()
        .map(|(x, idx)| idx.iter().map(|&i| rep.sets[x][i].clone()).collect())
        .collect();
    let actions = (0..c.num_morphisms())
        .map(|f| {
            let (s, t) = rep.endpoints(f);
            keep[s]
                .iter()
                .map(|&i| keep[t].iter().position(|&j| j == rep.act(f, i)).unwrap())
                .collect()
        })
        .collect();
    SetFunctor::new(c.clone(), Variance::Contravariant, sets, actions)
}

#[derive(Clone, Debug)]
pub struct CauchyObjectReport {
    pub object: usize,
    pub idempotent: usize,
    pub split: SetFunctor,
    pub reflexive: bool,
}

/// Splits every idempotent on a representable and checks the result is reflexive.
pub fn cauchy_objects_are_reflexive(
    c: &Arc<FinCat>,
    limits: Limits,
) -> Result<Vec<CauchyObjectReport>> {
    idempotents(c)
        .into_iter()
        .map(|(a, e)| {
            let split = split_presheaf(c, a, e)?;
            let reflexive = is_reflexive(&split, limits)?.reflexive;
            Ok(CauchyObjectReport {
                object: a,
                idempotent: e,
                split,
                reflexive,
            })
        })
        .collect()
}

/// True if `x` is a retract of some representable.
pub fn is_retract_of_representable(x: &SetFunctor, limits: Limits) -> Result<bool> {
    let c = &x.base;
    for a in 0..c.num_objects() {
        let rep = representable(c, a, x.variance)?;
        let sections = nat_transformations(x, &rep, limits)?;
        let retractions = nat_transformations(&rep, x, limits)?;
        let id = NatTransf::identity(x);
        if sections
            .iter()
            .any(|s| retractions.iter().any(|r| r.after(s) == id))
        {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug)]
pub struct KappaReport {
    /// Number of classes in the coend of `x^∨` and `z`.
    pub classes: usize,
    /// Image of each class in `Nat(x, z)`, when well defined.
    pub map: Vec<usize>,
    pub nat_count: usize,
    pub well_defined: bool,
    pub bijective: bool,
}

/// The comparison map from the coend of `x^∨` and `z` to `Nat(x, z)`,
/// sending `(ξ, ζ)` to `e ↦ z(ξ(e))(ζ)`.
pub fn kappa(x: &SetFunctor, z: &SetFunctor, limits: Limits) -> Result<KappaReport> {
    if *x.base != *z.base {
        return Err(Error::BaseMismatch);
    }
    for f in [x, z] {
        if f.variance != Variance::Contravariant {
            return Err(Error::VarianceMismatch {
                expected: "contra",
                found: f.variance.name(),
            });
        }
    }
    let conj = conjugate(x, limits)?;
    kappa_with(&conj, z, limits)
}

pub fn kappa_with(conj: &ConjugateResult, z: &SetFunctor, limits: Limits) -> Result<KappaReport> {
    let x = &conj.input;
    let c = &*x.base;
    let xv = &conj.output;
    let n = c.num_objects();
    let mut offsets = Vec::with_capacity(n);
    let mut total = 0;
    for a in 0..n {
        offsets.push(total);
        total += xv.card(a) * z.card(a);
    }
    let index = |a: usize, k: usize, t: usize| offsets[a] + k * z.card(a) + t;
    let mut ds = DisjointSets::new(total);
    for f in 0..c.num_morphisms() {
        let (a, b) = (c.dom(f), c.cod(f));
        for k in 0..xv.card(a) {
            for t in 0..z.card(b) {
                ds.union(index(b, xv.act(f, k), t), index(a, k, z.act(f, t)));
            }
        }
    }
    let (labels, classes) = ds.labels();
    let nats = nat_transformations(x, z, limits)?;
    let mut map = vec![UNSET; classes];
    let mut well_defined = true;
    for a in 0..n {
        for k in 0..xv.card(a) {
            for t in 0..z.card(a) {
                let alpha = NatTransf {
                    components: (0..n)
                        .map(|b| {
                            (0..x.card(b))
                                .map(|e| z.act(conj.value(a, k, b, e), t))
                                .collect()
                        })
                        .collect(),
                };
                let image = nats
                    .binary_search(&alpha)
                    .map_err(|_| Error::Internal("comparison map leaves Nat(x, z)".into()))?;
                let slot = &mut map[labels[index(a, k, t)]];
                if *slot == UNSET {
                    *slot = image;
                } else if *slot != image {
                    well_defined = false;
                }
            }
        }
    }
    let bijective = well_defined && classes == nats.len() && {
        let mut seen = vec![false; nats.len()];
        map.iter().all(|&i| !std::mem::replace(&mut seen[i], true))
    };
    Ok(KappaReport {
        classes,
        map,
        nat_count: nats.len(),
        well_defined,
        bijective,
    })
}

/// The copresheaf `b ↦ Cone(id, b)`, acting by postcomposition.
pub fn cone_functor(c: &Arc<FinCat>) -> SetFunctor {
    let n = c.num_objects();
    let mut families = Vec::with_capacity(n);
    for b in 0..n {
        let candidates: Vec<Vec<usize>> = (0..n).map(|i| c.hom(i, b).to_vec()).collect();
        families.push(compatible_families(c, &candidates, |u, pi, pj| {
            c.compose(pj, u) == Some(pi)
        }));
    }
    let sets = families
        .iter()
        .map(|fs| {
            fs.iter()
                .map(|legs| {
                    let names: Vec<&str> = legs.iter().map(|&m| c.morphism_name(m)).collect();
                    format!("[{}]", names.join(","))
                })
                .collect()
        })
        .collect();
    let actions = (0..c.num_morphisms())
        .map(|u| {
            let (b, b1) = (c.dom(u), c.cod(u));
            families[b]
                .iter()
                .map(|legs| {
                    let moved: Vec<usize> = legs.iter().map(|&m| c.comp(u, m)).collect();
                    families[b1].iter().position(|l| *l == moved).unwrap()
                })
                .collect()
        })
        .collect();
    SetFunctor::new_unchecked(c.clone(), Variance::Covariant, sets, actions)
}

/// A cocone under a diagram in the base: `legs[j]: D(j) → vertex`.
#[derive(Clone, Debug)]
pub struct Cocone {
    pub diagram: FinFunctor,
    pub vertex: usize,
    pub legs: Vec<usize>,
}

fn cocones_from(d: &FinFunctor, w: usize) -> Vec<Vec<usize>> {
    let (j, c) = (&*d.source, &*d.target);
    let candidates: Vec<Vec<usize>> = (0..j.num_objects())
        .map(|i| c.hom(d.object_map[i], w).to_vec())
        .collect();
    compatible_families(j, &candidates, |u, mi, mj| {
        c.compose(mj, d.morphism_map[u]) == Some(mi)
    })
}

impl Cocone {
    pub fn is_cocone(&self) -> bool {
        cocones_from(&self.diagram, self.vertex).contains(&self.legs)
    }

    /// Checks the universal property against every cocone in the base.
    pub fn is_colimit(&self) -> bool {
        if !self.is_cocone() {
            return false;
        }
        let c = &*self.diagram.target;
        (0..c.num_objects()).all(|w| {
            cocones_from(&self.diagram, w).iter().all(|other| {
                c.hom(self.vertex, w)
                    .iter()
                    .filter(|&&h| {
                        self.legs
                            .iter()
                            .zip(other)
                            .all(|(&l, &m)| c.comp(h, l) == m)
                    })
                    .count()
                    == 1
            })
        })
    }
}

/// Whether the presheaf `x` turns a colimit cocone in the base into a limit
/// cone of sets.
pub fn limit_preservation_check(x: &SetFunctor, cocone: &Cocone) -> Result<bool> {
    if x.variance != Variance::Contravariant {
        return Err(Error::VarianceMismatch {
            expected: "contra",
            found: x.variance.name(),
        });
    }
    if *cocone.diagram.target != *x.base {
        return Err(Error::BaseMismatch);
    }
    if !cocone.is_colimit() {
        return Err(Error::Precondition("the cocone is not a colimit".into()));
    }
    let d = &cocone.diagram;
    let j = &*d.source;
    let candidates: Vec<Vec<usize>> = (0..j.num_objects())
        .map(|i| (0..x.card(d.object_map[i])).collect())
        .collect();
    // Compatible families: x(D u)(e_{j'}) = e_j for u: j → j'.
    let limit = compatible_families(j, &candidates, |u, ei, ej| {
        x.act(d.morphism_map[u], ej) == ei
    });
    let mut images: Vec<Vec<usize>> = (0..x.card(cocone.vertex))
        .map(|e| cocone.legs.iter().map(|&l| x.act(l, e)).collect())
        .collect();
    images.sort();
    let injective = images.windows(2).all(|w| w[0] != w[1]);
    Ok(injective && images.len() == limit.len())
}

#[derive(Clone, Debug)]
pub struct RcnLimReport {
    pub j: Arc<FinCat>,
    pub z: usize,
    /// The limit presheaf of the representables at the old objects.
    pub l: SetFunctor,
    pub s_size: usize,
    pub components: usize,
    pub iso_to_copies: bool,
    /// A transformation `J(z,−)^S → J(z,−)` taking the minimum of the
    /// exponents, which is not a projection.
    pub witness: NatTransf,
    pub witness_natural: bool,
    pub witness_not_projection: bool,
    /// The witness transported to `L^∨ → J(z,−)` lies outside the image of `η_L` at `z`.
    pub eta_not_surjective: bool,
    pub reflexive: bool,
}

/// Builds the limit of the representables over a shape with no cone on its
/// identity inside the category with a pair object adjoined, and certifies
/// that it is not reflexive.
pub fn rcn_lim_counterexample(i: &Arc<FinCat>, limits: Limits) -> Result<RcnLimReport> {
    if i.num_objects() == 0 {
        return Err(Error::Precondition("the shape must be nonempty".into()));
    }
    if !cones_on_identity(i).is_empty() {
        return Err(Error::Precondition(
            "the shape admits a cone on its identity".into(),
        ));
    }
    let j = Arc::new(adjoin_pair_object(i));
    let old: Vec<usize> = (0..i.num_objects())
        .map(|a| j.object_id(i.object_name(a)))
        .collect::<Result<_>>()?;
    let z = (0..j.num_objects()).find(|a| !old.contains(a)).unwrap();
    let inclusion_maps: Vec<usize> = (0..i.num_morphisms())
        .map(|u| j.morphism_id(i.morphism_name(u)))
        .collect::<Result<_>>()?;

    // L(x): families m_k: x → old k with u∘m_k = m_k' for u: k → k'.
    let n = j.num_objects();
    let families: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|x| {
            let candidates: Vec<Vec<usize>> = old.iter().map(|&k| j.hom(x, k).to_vec()).collect();
            compatible_families(i, &candidates, |u, mk, mk1| {
                j.compose(inclusion_maps[u], mk) == Some(mk1)
            })
        })
        .collect();
    let sets = families
        .iter()
        .map(|fs| {
            fs.iter()
                .map(|legs| {
                    let names: Vec<&str> = legs.iter().map(|&m| j.morphism_name(m)).collect();
                    format!("[{}]", names.join(","))
                })
                .collect()
        })
        .collect();
    let actions = (0..j.num_morphisms())
        .map(|f| {
            let (x, y) = (j.dom(f), j.cod(f));
            families[y]
                .iter()
                .map(|legs| {
                    let moved: Vec<usize> = legs.iter().map(|&m| j.comp(m, f)).collect();
                    families[x].iter().position(|l| *l == moved).unwrap()
                })
                .collect()
        })
        .collect();
    let l = SetFunctor::new(j.clone(), Variance::Contravariant, sets, actions)?;
    let s_size = l.card(z);
    let components = i.connected_components().len();

    let jz = representable(&j, z, Variance::Contravariant)?;
    let copies = coproduct(&j, Variance::Contravariant, &vec![jz; s_size])?;
    let iso_to_copies = is_isomorphic(&l, &copies, limits)?.is_some();

    // The witness on the explicit power J(z,−)^S.
    let corep = representable(&j, z, Variance::Covariant)?;
    let power = product(&j, Variance::Covariant, &vec![corep.clone(); s_size])?;
    // Legs out of z are named by their exponent first.
    let exponent = |m: usize| usize::from(!j.morphism_name(m).starts_with("p0"));
    let mut witness = NatTransf {
        components: Vec::with_capacity(n),
    };
    for x in 0..n {
        let hom = j.hom(z, x);
        let mut comp = Vec::with_capacity(power.card(x));
        for t in 0..power.card(x) {
            if x == z {
                comp.push(0);
                continue;
            }
            let mut digits = Vec::with_capacity(s_size);
            let mut rest = t;
            for _ in 0..s_size {
                digits.push(rest % hom.len());
                rest /= hom.len();
            }
            let min = digits.iter().map(|&d| exponent(hom[d])).min().unwrap_or(1);
            let target = hom.iter().copied().find(|&m| exponent(m) == min).unwrap();
            comp.push(j.hom_position(target));
        }
        witness.components.push(comp);
    }
    let witness_natural = is_natural(&power, &corep, &witness).is_ok();
    let witness_not_projection = (0..s_size).all(|s| {
        (0..n).any(|x| {
            (0..power.card(x)).any(|t| {
                let hom_len = j.hom(z, x).len();
                let digit = (t / hom_len.pow(s as u32)) % hom_len;
                x != z && witness.components[x][t] != digit
            })
        })
    });

    // Transport to L^∨ and compare with the evaluations at z.
    let l_conj = conjugate(&l, limits)?;
    let phi = is_isomorphic(&l_conj.output, &power, limits)?
        .ok_or_else(|| Error::Internal("conjugate of L is not the expected power".into()))?;
    let transported = witness.after(&phi);
    let transported_natural = is_natural(&l_conj.output, &corep, &transported).is_ok();
    let evaluations: Vec<NatTransf> = (0..s_size)
        .map(|s| NatTransf {
            components: (0..n)
                .map(|x| {
                    l_conj.witness[x]
                        .iter()
                        .map(|xi| xi.components[z][s])
                        .collect()
                })
                .collect(),
        })
        .collect();
    let eta_not_surjective = transported_natural && !evaluations.contains(&transported);

    Ok(RcnLimReport {
        j,
        z,
        l,
        s_size,
        components,
        iso_to_copies,
        witness,
        witness_natural,
        witness_not_projection,
        eta_not_surjective,
        reflexive: !eta_not_surjective,
    })
}

/// The limit over the elements of `x^∨` of the representables `A(−, b)`,
/// computed as sets of compatible families.
pub fn limit_of_representables(x: &SetFunctor, limits: Limits) -> Result<SetFunctor> {
    if x.variance != Variance::Contravariant {
        return Err(Error::VarianceMismatch {
            expected: "contra",
            found: x.variance.name(),
        });
    }
    let c = &x.base;
    let n = c.num_objects();
    let xv = conjugate(x, limits)?.output;
    let elements: Vec<(usize, usize)> = (0..n)
        .flat_map(|b| (0..xv.card(b)).map(move |k| (b, k)))
        .collect();
    let position = |b: usize, k: usize| elements.iter().position(|&p| p == (b, k)).unwrap();
    // Arrows of the category of elements: (b, k) → (b', Y(f) k).
    let arrows: Vec<(usize, usize, usize)> = (0..c.num_morphisms())
        .flat_map(|f| {
            let b = c.dom(f);
            (0..xv.card(b)).map(move |k| (f, b, k))
        })
        .map(|(f, b, k)| (position(b, k), position(c.cod(f), xv.act(f, k)), f))
        .collect();
    let mut families: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    for d in 0..n {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(elements.len());
        fn go(
            c: &FinCat,
            d: usize,
            elements: &[(usize, usize)],
            arrows: &[(usize, usize, usize)],
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let k = cur.len();
            if k == elements.len() {
                out.push(cur.clone());
                return;
            }
            for &m in c.hom(d, elements[k].0) {
                cur.push(m);
                let ok = arrows
                    .iter()
                    .filter(|&&(s, t, _)| s <= k && t <= k)
                    .all(|&(s, t, f)| c.comp(f, cur[s]) == cur[t]);
                if ok {
                    go(c, d, elements, arrows, cur, out);
                }
                cur.pop();
            }
        }
        go(c, d, &elements, &arrows, &mut cur, &mut out);
        families.push(out);
    }
    let sets = families
        .iter()
        .map(|fs| (0..fs.len()).map(|i| i.to_string()).collect())
        .collect();
    let actions = (0..c.num_morphisms())
        .map(|f| {
            let (a, b) = (c.dom(f), c.cod(f));
            families[b]
                .iter()
                .map(|fam| {
                    let moved: Vec<usize> = fam.iter().map(|&m| c.comp(m, f)).collect();
                    families[a].iter().position(|g| *g == moved).unwrap()
                })
                .collect()
        })
        .collect();
    SetFunctor::new(c.clone(), Variance::Contravariant, sets, actions)
}

/// The presheaves isomorphic to a representable, as class indices.
pub fn representable_classes(
    report: &ReflexiveCompletionReport,
    limits: Limits,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..report.base.num_objects() {
        let rep = representable(&report.base, a, report.variance)?;
        for (i, x) in report.classes.iter().enumerate() {
            if is_isomorphic(&rep, x, limits)?.is_some() {
                out.push(i);
                break;
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The empty presheaf, for callers that need it by name.
pub fn empty_presheaf(c: &Arc<FinCat>) -> SetFunctor {
    initial(c, Variance::Contravariant)
}
