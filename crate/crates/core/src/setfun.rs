//! Finite Set-valued functors, natural transformations between them, and the
//! usual pointwise constructions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ResourceExceeded, Result, ValidationReport};
use crate::fincat::{FinCat, FinFunctor};
use crate::util::DisjointSets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variance {
    /// A presheaf `A^op → Set`.
    #[serde(rename = "contra")]
    Contravariant,
    /// A copresheaf `A → Set`.
    #[serde(rename = "co")]
    Covariant,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Contravariant => Variance::Covariant,
            Variance::Covariant => Variance::Contravariant,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variance::Contravariant => "contra",
            Variance::Covariant => "co",
        }
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Search budget for enumerations, counted in visited partial assignments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub ceiling: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            ceiling: 10_000_000,
        }
    }
}

impl Limits {
    pub fn new(ceiling: u64) -> Self {
        Self { ceiling }
    }
}

/// Wire form of a functor without its base: element sets per object name and,
/// per morphism name, the action as an element-to-element map. Identity
/// actions may be omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFunctor {
    pub variance: Variance,
    pub sets: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub actions: BTreeMap<String, BTreeMap<String, String>>,
}

/// A Set-valued functor on a finite category.
///
/// `actions[f][i]` is the index of the image of element `i` under the action
/// of `f`. For a presheaf and `f: a → b` the action runs `X(b) → X(a)`; for a
/// copresheaf it runs `Y(a) → Y(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunctor {
    pub base: Arc<FinCat>,
    pub variance: Variance,
    pub sets: Vec<Vec<String>>,
    pub actions: Vec<Vec<usize>>,
}

/// Components of a natural transformation: `components[a][i]` is the image of
/// element `i` of the source at `a`, as an index into the target's set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NatTransf {
    pub components: Vec<Vec<usize>>,
}

fn action_endpoints(base: &FinCat, variance: Variance, f: usize) -> (usize, usize) {
    match variance {
        Variance::Contravariant => (base.cod(f), base.dom(f)),
        Variance::Covariant => (base.dom(f), base.cod(f)),
    }
}

/// Checks that `sets` and `actions` form a functor of the given variance.
pub fn check_tables(
    base: &FinCat,
    variance: Variance,
    sets: &[Vec<String>],
    actions: &[Vec<usize>],
) -> ValidationReport {
    let mut report = ValidationReport::ok();
    if sets.len() != base.num_objects() || actions.len() != base.num_morphisms() {
        report.push("structure", vec![], "tables do not match the base category");
        return report;
    }
    for f in 0..base.num_morphisms() {
        let (s, t) = action_endpoints(base, variance, f);
        if actions[f].len() != sets[s].len() {
            report.push(
                "totality",
                vec![base.morphism_name(f).to_string()],
                "action is not defined on every element",
            );
        } else if let Some(i) = actions[f].iter().position(|&j| j >= sets[t].len()) {
            report.push(
                "typing",
                vec![base.morphism_name(f).to_string(), sets[s][i].clone()],
                "action leaves the target set",
            );
        }
    }
    if !report.is_ok() {
        return report;
    }
    for a in 0..base.num_objects() {
        let id = base.identity(a);
        if let Some(i) = actions[id].iter().enumerate().position(|(i, &j)| i != j) {
            report.push(
                "identity",
                vec![base.morphism_name(id).to_string(), sets[a][i].clone()],
                "identity does not act as the identity",
            );
        }
    }
    for f in 0..base.num_morphisms() {
        for g in 0..base.num_morphisms() {
            let Some(gf) = base.compose(g, f) else {
                continue;
            };
            let (first, second) = match variance {
                Variance::Contravariant => (g, f),
                Variance::Covariant => (f, g),
            };
            let (s, _) = action_endpoints(base, variance, first);
            for i in 0..sets[s].len() {
                if actions[second][actions[first][i]] != actions[gf][i] {
                    report.push(
                        "composition",
                        vec![
                            base.morphism_name(g).to_string(),
                            base.morphism_name(f).to_string(),
                        ],
                        format!("action of the composite disagrees at `{}`", sets[s][i]),
                    );
                    break;
                }
            }
        }
    }
    report
}

/// Validates a functor given in wire form against a base category.
pub fn validate_functor(base: &FinCat, raw: &RawFunctor) -> ValidationReport {
    match tables_from_raw(base, raw) {
        Ok((sets, actions)) => check_tables(base, raw.variance, &sets, &actions),
        Err(report) => report,
    }
}

type Tables = (Vec<Vec<String>>, Vec<Vec<usize>>);

fn tables_from_raw(
    base: &FinCat,
    raw: &RawFunctor,
) -> std::result::Result<Tables, ValidationReport> {
    let mut report = ValidationReport::ok();
    let mut sets = vec![Vec::new(); base.num_objects()];
    for (o, elems) in &raw.sets {
        match base.object_id(o) {
            Ok(a) => {
                let mut sorted = elems.clone();
                sorted.sort();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    report.push("structure", vec![o.clone()], "duplicate element identifier");
                }
                sets[a] = elems.clone();
            }
            Err(_) => report.push("structure", vec![o.clone()], "set given for unknown object"),
        }
    }
    for m in raw.actions.keys() {
        if base.morphism_id(m).is_err() {
            report.push(
                "structure",
                vec![m.clone()],
                "action given for unknown morphism",
            );
        }
    }
    if !report.is_ok() {
        return Err(report);
    }
    let index: Vec<BTreeMap<&str, usize>> = sets
        .iter()
        .map(|s| s.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect())
        .collect();
    let mut actions = Vec::with_capacity(base.num_morphisms());
    for f in 0..base.num_morphisms() {
        let name = base.morphism_name(f);
        let (s, t) = action_endpoints(base, raw.variance, f);
        let table = match raw.actions.get(name) {
            Some(t) => t,
            None if base.is_identity(f) => {
                actions.push((0..sets[s].len()).collect());
                continue;
            }
            None => {
                if !sets[s].is_empty() {
                    report.push("totality", vec![name.to_string()], "missing action");
                }
                actions.push(Vec::new());
                continue;
            }
        };
        let mut act = Vec::with_capacity(sets[s].len());
        for e in &sets[s] {
            match table.get(e) {
                None => report.push(
                    "totality",
                    vec![name.to_string(), e.clone()],
                    "action undefined on element",
                ),
                Some(v) => match index[t].get(v.as_str()) {
                    Some(&j) => act.push(j),
                    None => report.push(
                        "typing",
                        vec![name.to_string(), e.clone(), v.clone()],
                        "image is not an element of the target set",
                    ),
                },
            }
        }
        for e in table.keys() {
            if !index[s].contains_key(e.as_str()) {
                report.push(
                    "typing",
                    vec![name.to_string(), e.clone()],
                    "action defined on an element outside the source set",
                );
            }
        }
        actions.push(act);
    }
    if report.is_ok() {
        Ok((sets, actions))
    } else {
        Err(report)
    }
}

impl SetFunctor {
    /// Builds and validates a functor from index tables.
    pub fn new(
        base: Arc<FinCat>,
        variance: Variance,
        sets: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let report = check_tables(&base, variance, &sets, &actions);
        report.into_result(
            Self {
                base,
                variance,
                sets,
                actions,
            },
            Error::InvalidFunctor,
        )
    }

    pub(crate) fn new_unchecked(
        base: Arc<FinCat>,
        variance: Variance,
        sets: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Self {
        debug_assert!(check_tables(&base, variance, &sets, &actions).is_ok());
        Self {
            base,
            variance,
            sets,
            actions,
        }
    }

    pub fn from_raw(base: Arc<FinCat>, raw: &RawFunctor) -> Result<Self> {
        let (sets, actions) = tables_from_raw(&base, raw).map_err(Error::InvalidFunctor)?;
        Self::new(base, raw.variance, sets, actions)
    }

    pub fn to_raw(&self) -> RawFunctor {
        let base = &*self.base;
        let sets = (0..base.num_objects())
            .map(|a| (base.object_name(a).to_string(), self.sets[a].clone()))
            .collect();
        let actions = (0..base.num_morphisms())
            .map(|f| {
                let (s, t) = self.endpoints(f);
                let table = self.actions[f]
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (self.sets[s][i].clone(), self.sets[t][j].clone()))
                    .collect();
                (base.morphism_name(f).to_string(), table)
            })
            .collect();
        RawFunctor {
            variance: self.variance,
            sets,
            actions,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        check_tables(&self.base, self.variance, &self.sets, &self.actions)
    }

    /// Objects `(source, target)` of the action of `f`.
    pub fn endpoints(&self, f: usize) -> (usize, usize) {
        action_endpoints(&self.base, self.variance, f)
    }

    pub fn card(&self, a: usize) -> usize {
        self.sets[a].len()
    }

    pub fn cards(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    pub fn total_size(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn act(&self, f: usize, i: usize) -> usize {
        self.actions[f][i]
    }

    pub fn element_id(&self, a: usize, name: &str) -> Result<usize> {
        self.sets[a]
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// Objects at which the functor is nonempty.
    pub fn supp(&self) -> Vec<usize> {
        (0..self.base.num_objects())
            .filter(|&a| !self.sets[a].is_empty())
            .collect()
    }

    /// True if every set has at most one element.
    pub fn is_subterminal(&self) -> bool {
        self.sets.iter().all(|s| s.len() <= 1)
    }

    /// The same tables read as a functor of the other variance on the
    /// opposite category. `op` must be the opposite of the base.
    pub fn transport(&self, op: Arc<FinCat>) -> Result<SetFunctor> {
        if *op != self.base.opposite() {
            return Err(Error::BaseMismatch);
        }
        Ok(SetFunctor {
            base: op,
            variance: self.variance.flip(),
            sets: self.sets.clone(),
            actions: self.actions.clone(),
        })
    }

    /// Copy with elements renamed `0, 1, ...` at every object.
    pub fn with_index_names(&self) -> SetFunctor {
        SetFunctor {
            sets: self
                .sets
                .iter()
                .map(|s| (0..s.len()).map(|i| i.to_string()).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// An isomorphism invariant: cardinalities, and per morphism the image size
    /// of its action together with the number of fixed points of endomorphisms.
    pub fn signature(&self) -> Vec<(usize, usize)> {
        let mut sig: Vec<(usize, usize)> = self.cards().into_iter().map(|c| (c, 0)).collect();
        for f in 0..self.base.num_morphisms() {
            let mut image = self.actions[f].clone();
            image.sort_unstable();
            image.dedup();
            let fixed = if self.base.dom(f) == self.base.cod(f) {
                self.actions[f]
                    .iter()
                    .enumerate()
                    .filter(|(i, j)| i == *j)
                    .count()
            } else {
                0
            };
            sig.push((image.len(), fixed));
        }
        sig
    }

    /// Splits the functor along the connected components of its category of
    /// elements. Components are listed in order of their first element.
    pub fn connected_components(&self) -> Vec<SetFunctor> {
        let offsets: Vec<usize> = self
            .sets
            .iter()
            .scan(0, |acc, s| {
                let o = *acc;
                *acc += s.len();
                Some(o)
            })
            .collect();
        let mut ds = DisjointSets::new(self.total_size());
        for f in 0..self.base.num_morphisms() {
            let (s, t) = self.endpoints(f);
            for (i, &j) in self.actions[f].iter().enumerate() {
                ds.union(offsets[s] + i, offsets[t] + j);
            }
        }
        let (labels, k) = ds.labels();
        let mut local = vec![vec![Vec::new(); self.sets.len()]; k];
        let mut new_index = vec![0; self.total_size()];
        for (a, set) in self.sets.iter().enumerate() {
            for i in 0..set.len() {
                let c = labels[offsets[a] + i];
                new_index[offsets[a] + i] = local[c][a].len();
                local[c][a].push(i);
            }
        }
        (0..k)
            .map(|c| {
                let sets = local[c]
                    .iter()
                    .enumerate()
                    .map(|(a, idx)| idx.iter().map(|&i| self.sets[a][i].clone()).collect())
                    .collect();
                let actions = (0..self.base.num_morphisms())
                    .map(|f| {
                        let (s, t) = self.endpoints(f);
                        local[c][s]
                            .iter()
                            .map(|&i| new_index[offsets[t] + self.actions[f][i]])
                            .collect()
                    })
                    .collect();
                SetFunctor::new_unchecked(self.base.clone(), self.variance, sets, actions)
            })
            .collect()
    }
}

/// `A(−,a)` for a presheaf, `A(a,−)` for a copresheaf; elements are morphism names.
pub fn representable(c: &Arc<FinCat>, a: usize, variance: Variance) -> Result<SetFunctor> {
    if a >= c.num_objects() {
        return Err(Error::UnknownObject(a.to_string()));
    }
    let n = c.num_objects();
    let hom = |b: usize| match variance {
        Variance::Contravariant => c.hom(b, a),
        Variance::Covariant => c.hom(a, b),
    };
    let sets = (0..n)
        .map(|b| {
            hom(b)
                .iter()
                .map(|&m| c.morphism_name(m).to_string())
                .collect()
        })
        .collect();
    let actions = (0..c.num_morphisms())
        .map(|f| {
            let (s, _) = action_endpoints(c, variance, f);
            hom(s)
                .iter()
                .map(|&m| match variance {
                    Variance::Contravariant => c.hom_position(c.comp(m, f)),
                    Variance::Covariant => c.hom_position(c.comp(f, m)),
                })
                .collect()
        })
        .collect();
    Ok(SetFunctor::new_unchecked(
        c.clone(),
        variance,
        sets,
        actions,
    ))
}

pub fn representable_named(c: &Arc<FinCat>, a: &str, variance: Variance) -> Result<SetFunctor> {
    representable(c, c.object_id(a)?, variance)
}

/// The constant one-point functor.
pub fn terminal(c: &Arc<FinCat>, variance: Variance) -> SetFunctor {
    SetFunctor::new_unchecked(
        c.clone(),
        variance,
        vec![vec!["*".to_string()]; c.num_objects()],
        vec![vec![0]; c.num_morphisms()],
    )
}

/// The constant empty functor.
pub fn initial(c: &Arc<FinCat>, variance: Variance) -> SetFunctor {
    SetFunctor::new_unchecked(
        c.clone(),
        variance,
        vec![Vec::new(); c.num_objects()],
        vec![Vec::new(); c.num_morphisms()],
    )
}

fn common_shape(c: &Arc<FinCat>, variance: Variance, xs: &[SetFunctor]) -> Result<()> {
    for x in xs {
        if *x.base != **c {
            return Err(Error::BaseMismatch);
        }
        if x.variance != variance {
            return Err(Error::VarianceMismatch {
                expected: variance.name(),
                found: x.variance.name(),
            });
        }
    }
    Ok(())
}

/// Pointwise disjoint union; element `e` of summand `k` is named `k:e`.
pub fn coproduct(c: &Arc<FinCat>, variance: Variance, xs: &[SetFunctor]) -> Result<SetFunctor> {
    common_shape(c, variance, xs)?;
    let sets = (0..c.num_objects())
        .map(|a| {
            xs.iter()
                .enumerate()
                .flat_map(|(k, x)| x.sets[a].iter().map(move |e| format!("{k}:{e}")))
                .collect()
        })
        .collect();
    let actions = (0..c.num_morphisms())
        .map(|f| {
            let (_, t) = action_endpoints(c, variance, f);
            let mut offset = 0;
            let mut act = Vec::new();
            for x in xs {
                act.extend(x.actions[f].iter().map(|&j| j + offset));
                offset += x.sets[t].len();
            }
            act
        })
        .collect();
    Ok(SetFunctor::new_unchecked(
        c.clone(),
        variance,
        sets,
        actions,
    ))
}

/// Pointwise cartesian product, with tuples in lexicographic order.
pub fn product(c: &Arc<FinCat>, variance: Variance, xs: &[SetFunctor]) -> Result<SetFunctor> {
    common_shape(c, variance, xs)?;
    let strides = |a: usize| -> Vec<usize> {
        let mut s = vec![1; xs.len()];
        for k in (0..xs.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * xs[k + 1].sets[a].len();
        }
        s
    };
    let tuples = |a: usize| -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for x in xs {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..x.sets[a].len()).map(move |i| {
                        let mut t = t.clone();
                        t.push(i);
                        t
                    })
                })
                .collect();
        }
        out
    };
    let sets = (0..c.num_objects())
        .map(|a| {
            tuples(a)
                .iter()
                .map(|t| {
                    let parts: Vec<&str> = t
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| xs[k].sets[a][i].as_str())
                        .collect();
                    format!("({})", parts.join(","))
                })
                .collect()
        })
        .collect();
    let actions = (0..c.num_morphisms())
        .map(|f| {
            let (s, t) = action_endpoints(c, variance, f);
            let st = strides(t);
            tuples(s)
                .iter()
                .map(|tup| {
                    tup.iter()
                        .enumerate()
                        .map(|(k, &i)| xs[k].actions[f][i] * st[k])
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(SetFunctor::new_unchecked(
        c.clone(),
        variance,
        sets,
        actions,
    ))
}

/// `z∘f`, for `z` on the target of `f`.
pub fn precompose(z: &SetFunctor, f: &FinFunctor) -> Result<SetFunctor> {
    if *f.target != *z.base {
        return Err(Error::BaseMismatch);
    }
    let sets = f.object_map.iter().map(|&b| z.sets[b].clone()).collect();
    let actions = f
        .morphism_map
        .iter()
        .map(|&g| z.actions[g].clone())
        .collect();
    Ok(SetFunctor::new_unchecked(
        f.source.clone(),
        z.variance,
        sets,
        actions,
    ))
}

/// `a ↦ B(f a, b)`.
pub fn nerve_presheaf(f: &FinFunctor, b: usize) -> Result<SetFunctor> {
    let y = representable(&f.target, b, Variance::Contravariant)?;
    precompose(&y, f)
}

fn check_pair(x: &SetFunctor, y: &SetFunctor) -> Result<()> {
    if x.base != y.base && *x.base != *y.base {
        return Err(Error::BaseMismatch);
    }
    if x.variance != y.variance {
        return Err(Error::VarianceMismatch {
            expected: x.variance.name(),
            found: y.variance.name(),
        });
    }
    Ok(())
}

const UNSET: usize = usize::MAX;

/// Backtracking search for natural transformations `x → y`.
///
/// Elements of `x` are assigned one at a time; each assignment forces the
/// images of all its translates, and those forced values are checked against
/// earlier ones. Translates of a translate are translates of the original, so
/// one level of forcing is complete.
struct NatSearch<'a> {
    x: &'a SetFunctor,
    y: &'a SetFunctor,
    order: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
    assign: Vec<Vec<usize>>,
    used: Option<Vec<Vec<bool>>>,
    trail: Vec<(usize, usize)>,
    visited: u64,
    ceiling: u64,
}

impl<'a> NatSearch<'a> {
    fn new(x: &'a SetFunctor, y: &'a SetFunctor, injective: bool, limits: Limits) -> Self {
        let n = x.base.num_objects();
        let mut objects: Vec<usize> = (0..n).collect();
        objects.sort_by_key(|&a| (x.card(a), a));
        let order = objects
            .iter()
            .flat_map(|&a| (0..x.card(a)).map(move |i| (a, i)))
            .collect();
        let mut outgoing = vec![Vec::new(); n];
        for f in 0..x.base.num_morphisms() {
            if !x.base.is_identity(f) {
                outgoing[x.endpoints(f).0].push(f);
            }
        }
        Self {
            x,
            y,
            order,
            outgoing,
            assign: x.sets.iter().map(|s| vec![UNSET; s.len()]).collect(),
            used: injective.then(|| y.sets.iter().map(|s| vec![false; s.len()]).collect()),
            trail: Vec::new(),
            visited: 0,
            ceiling: limits.ceiling,
        }
    }

    fn set(&mut self, a: usize, i: usize, v: usize) -> bool {
        let cur = self.assign[a][i];
        if cur != UNSET {
            return cur == v;
        }
        if let Some(used) = &mut self.used {
            if used[a][v] {
                return false;
            }
            used[a][v] = true;
        }
        self.assign[a][i] = v;
        self.trail.push((a, i));
        true
    }

    fn place(&mut self, a: usize, i: usize, v: usize) -> bool {
        if !self.set(a, i, v) {
            return false;
        }
        for k in 0..self.outgoing[a].len() {
            let f = self.outgoing[a][k];
            let t = self.x.endpoints(f).1;
            if !self.set(t, self.x.actions[f][i], self.y.actions[f][v]) {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (a, i) = self.trail.pop().unwrap();
            if let Some(used) = &mut self.used {
                used[a][self.assign[a][i]] = false;
            }
            self.assign[a][i] = UNSET;
        }
    }

    fn charge(&mut self, cost: u64) -> Result<()> {
        self.visited += cost;
        if self.visited > self.ceiling {
            return Err(Error::Resource(ResourceExceeded {
                ceiling: self.ceiling,
                context: "enumerating natural transformations".to_string(),
                profile: vec![self.x.total_size(), self.y.total_size()],
            }));
        }
        Ok(())
    }

    fn run(&mut self, k: usize, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> Result<bool> {
        let Some(&(a, i)) = self.order.get(k) else {
            // A complete assignment is charged for every entry it fixes.
            self.charge(self.order.len() as u64)?;
            return Ok(visit(&self.assign));
        };
        if self.assign[a][i] != UNSET {
            return self.run(k + 1, visit);
        }
        for v in 0..self.y.card(a) {
            self.charge(1)?;
            let mark = self.trail.len();
            if self.place(a, i, v) && !self.run(k + 1, visit)? {
                return Ok(false);
            }
            self.undo(mark);
        }
        Ok(true)
    }
}

/// Calls `visit` on every natural transformation `x → y` (every injective one
/// if `injective`) until it returns false.
pub fn for_each_nat(
    x: &SetFunctor,
    y: &SetFunctor,
    injective: bool,
    limits: Limits,
    visit: &mut dyn FnMut(&[Vec<usize>]) -> bool,
) -> Result<()> {
    check_pair(x, y)?;
    let mut search = NatSearch::new(x, y, injective, limits);
    search.run(0, visit)?;
    Ok(())
}

/// Every natural transformation `x → y`, sorted by components.
pub fn nat_transformations(
    x: &SetFunctor,
    y: &SetFunctor,
    limits: Limits,
) -> Result<Vec<NatTransf>> {
    let mut out = Vec::new();
    for_each_nat(x, y, false, limits, &mut |c| {
        out.push(NatTransf {
            components: c.to_vec(),
        });
        true
    })?;
    out.sort();
    Ok(out)
}

/// Number of natural transformations `x → y`.
pub fn count_nat(x: &SetFunctor, y: &SetFunctor, limits: Limits) -> Result<usize> {
    let mut n = 0;
    for_each_nat(x, y, false, limits, &mut |_| {
        n += 1;
        true
    })?;
    Ok(n)
}

/// Checks naturality of a component family, reporting a failing square.
pub fn is_natural(x: &SetFunctor, y: &SetFunctor, alpha: &NatTransf) -> ValidationReport {
    let mut report = ValidationReport::ok();
    if let Err(e) = check_pair(x, y) {
        report.push("structure", vec![], e.to_string());
        return report;
    }
    let base = &*x.base;
    let comps = &alpha.components;
    if comps.len() != base.num_objects()
        || (0..base.num_objects())
            .any(|a| comps[a].len() != x.card(a) || comps[a].iter().any(|&v| v >= y.card(a)))
    {
        report.push("structure", vec![], "components do not match the functors");
        return report;
    }
    for f in 0..base.num_morphisms() {
        let (s, t) = x.endpoints(f);
        for i in 0..x.card(s) {
            if comps[t][x.actions[f][i]] != y.actions[f][comps[s][i]] {
                report.push(
                    "naturality",
                    vec![base.morphism_name(f).to_string(), x.sets[s][i].clone()],
                    "square does not commute",
                );
            }
        }
    }
    report
}

impl NatTransf {
    pub fn identity(x: &SetFunctor) -> Self {
        Self {
            components: x.sets.iter().map(|s| (0..s.len()).collect()).collect(),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &NatTransf) -> NatTransf {
        NatTransf {
            components: first
                .components
                .iter()
                .zip(&self.components)
                .map(|(f, g)| f.iter().map(|&i| g[i]).collect())
                .collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.components.iter().all(|c| {
            let mut s = c.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        })
    }

    /// True if every component is a bijection onto the matching set of `target`.
    pub fn is_bijective_onto(&self, target: &SetFunctor) -> bool {
        self.components.iter().enumerate().all(|(a, c)| {
            c.len() == target.card(a) && {
                let mut seen = vec![false; c.len()];
                c.iter()
                    .all(|&v| v < seen.len() && !std::mem::replace(&mut seen[v], true))
            }
        })
    }

    /// Inverse of a bijective transformation.
    pub fn inverse(&self) -> NatTransf {
        NatTransf {
            components: self
                .components
                .iter()
                .map(|c| {
                    let mut inv = vec![0; c.len()];
                    for (i, &v) in c.iter().enumerate() {
                        inv[v] = i;
                    }
                    inv
                })
                .collect(),
        }
    }
}

/// Searches for a natural isomorphism `x → y`.
pub fn is_isomorphic(x: &SetFunctor, y: &SetFunctor, limits: Limits) -> Result<Option<NatTransf>> {
    check_pair(x, y)?;
    if x.signature() != y.signature() {
        return Ok(None);
    }
    let mut found = None;
    for_each_nat(x, y, true, limits, &mut |c| {
        found = Some(NatTransf {
            components: c.to_vec(),
        });
        false
    })?;
    Ok(found)
}

/// The element of `x(a)` corresponding under Yoneda to `alpha: A(−,a) → x`.
pub fn yoneda_element(c: &FinCat, a: usize, alpha: &NatTransf) -> usize {
    alpha.components[a][c.hom_position(c.identity(a))]
}
