//! Finite posets, the bounds Galois connection, and the Dedekind–MacNeille
//! completion by cuts.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::completion::{enumerate_reflexive, reflexive_completion_category};
use crate::error::{Error, Result, ValidationReport};
use crate::fincat::{from_order_matrix, FinCat, FinFunctor};
use crate::setfun::Limits;
use crate::util::padded;

/// Subsets of a poset's elements, as bitmasks over element indices.
pub type Subset = u64;

const MAX_ELEMENTS: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPoset {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPoset {
    elements: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl FinPoset {
    /// Builds the poset generated by `pairs` (as `a ≤ b`), taking the
    /// reflexive transitive closure and rejecting cycles.
    pub fn new(elements: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = elements.len();
        let mut report = ValidationReport::ok();
        if n > MAX_ELEMENTS {
            report.push(
                "structure",
                vec![],
                format!("at most {MAX_ELEMENTS} elements are supported"),
            );
        }
        let distinct: BTreeSet<&String> = elements.iter().collect();
        if distinct.len() != n {
            report.push("structure", vec![], "duplicate element identifier");
        }
        if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a >= n || b >= n) {
            report.push(
                "structure",
                vec![a.to_string(), b.to_string()],
                "relation names an unknown element",
            );
        }
        if !report.is_ok() {
            return Err(Error::InvalidPoset(report));
        }
        let mut leq = vec![vec![false; n]; n];
        for (a, row) in leq.iter_mut().enumerate() {
            row[a] = true;
        }
        for &(a, b) in pairs {
            leq[a][b] = true;
        }
        for k in 0..n {
            for a in 0..n {
                if leq[a][k] {
                    for b in 0..n {
                        if leq[k][b] {
                            leq[a][b] = true;
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if leq[a][b] && leq[b][a] {
                    report.push(
                        "antisymmetry",
                        vec![elements[a].clone(), elements[b].clone()],
                        "distinct elements below each other",
                    );
                }
            }
        }
        report.into_result(Self { elements, leq }, Error::InvalidPoset)
    }

    pub fn from_raw(raw: &RawPoset) -> Result<Self> {
        let index = |name: &str| {
            raw.elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| Error::UnknownElement(name.to_string()))
        };
        let pairs = raw
            .leq
            .iter()
            .map(|[a, b]| Ok((index(a)?, index(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.elements.clone(), &pairs)
    }

    /// Covering pairs only.
    pub fn to_raw(&self) -> RawPoset {
        let n = self.len();
        let mut leq = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let covers = a != b
                    && self.leq[a][b]
                    && !(0..n).any(|k| k != a && k != b && self.leq[a][k] && self.leq[k][b]);
                if covers {
                    leq.push([self.elements[a].clone(), self.elements[b].clone()]);
                }
            }
        }
        RawPoset {
            elements: self.elements.clone(),
            leq,
        }
    }

    /// Poset on `x0, x1, ...` generated by the given pairs.
    pub fn with_indices(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new((0..n).map(|i| padded("x", i, n)).collect(), pairs)
    }

    pub fn antichain(n: usize) -> Self {
        Self::with_indices(n, &[]).expect("antichain is a poset")
    }

    pub fn chain(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::with_indices(n, &pairs).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn full(&self) -> Subset {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// `↓a`.
    pub fn down(&self, a: usize) -> Subset {
        (0..self.len())
            .filter(|&b| self.leq[b][a])
            .fold(0, |s, b| s | 1 << b)
    }

    /// `↑a`.
    pub fn up(&self, a: usize) -> Subset {
        (0..self.len())
            .filter(|&b| self.leq[a][b])
            .fold(0, |s, b| s | 1 << b)
    }

    /// Elements above every member of `s`.
    pub fn upper_bounds(&self, s: Subset) -> Subset {
        members(s).fold(self.full(), |acc, a| acc & self.up(a))
    }

    /// Elements below every member of `s`.
    pub fn lower_bounds(&self, s: Subset) -> Subset {
        members(s).fold(self.full(), |acc, a| acc & self.down(a))
    }

    pub fn is_down_closed(&self, s: Subset) -> bool {
        members(s).all(|a| self.down(a) & !s == 0)
    }

    pub fn subset_names(&self, s: Subset) -> Vec<String> {
        members(s).map(|a| self.elements[a].clone()).collect()
    }

    pub fn subset_from_names(&self, names: &[&str]) -> Result<Subset> {
        names.iter().try_fold(0, |acc, name| {
            let a = self
                .elements
                .iter()
                .position(|e| e == name)
                .ok_or_else(|| Error::UnknownElement(name.to_string()))?;
            Ok(acc | 1 << a)
        })
    }

    pub fn opposite(&self) -> FinPoset {
        let n = self.len();
        FinPoset {
            elements: self.elements.clone(),
            leq: (0..n)
                .map(|a| (0..n).map(|b| self.leq[b][a]).collect())
                .collect(),
        }
    }

    /// Greatest lower bound of `s`, if it exists.
    pub fn meet(&self, s: Subset) -> Option<usize> {
        let lower = self.lower_bounds(s);
        members(lower).find(|&m| members(lower).all(|b| self.leq[b][m]))
    }

    /// Least upper bound of `s`, if it exists.
    pub fn join(&self, s: Subset) -> Option<usize> {
        let upper = self.upper_bounds(s);
        members(upper).find(|&m| members(upper).all(|b| self.leq[m][b]))
    }

    /// True if every subset has a meet and a join.
    pub fn is_lattice(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let n = self.len();
        (0..n).all(|a| {
            (0..n).all(|b| {
                self.meet(1 << a | 1 << b).is_some() && self.join(1 << a | 1 << b).is_some()
            })
        }) && self.meet(0).is_some()
            && self.join(0).is_some()
    }

    /// Thin category with a morphism `a<=b` for each comparable pair.
    pub fn to_category(&self) -> FinCat {
        from_order_matrix(&self.elements, &self.leq).expect("a poset is a category")
    }
}

/// Indices of the members of a subset, in increasing order.
pub fn members(s: Subset) -> impl Iterator<Item = usize> + Clone {
    (0..64).filter(move |&i| s >> i & 1 == 1)
}

#[derive(Clone, Debug)]
pub struct DmCompletion {
    /// Cuts in increasing order of size, then of bitmask.
    pub cuts: Vec<Subset>,
    /// Cuts ordered by inclusion.
    pub lattice: FinPoset,
    /// `embedding[a]` is the index of the cut `↓a`.
    pub embedding: Vec<usize>,
}

/// The cuts `X = ↓↑X`, obtained as all intersections of principal down-sets.
pub fn dm_completion(p: &FinPoset) -> DmCompletion {
    let mut cuts: BTreeSet<Subset> = BTreeSet::new();
    cuts.insert(p.full());
    let mut frontier: Vec<Subset> = vec![p.full()];
    let downs: Vec<Subset> = (0..p.len()).map(|a| p.down(a)).collect();
    while let Some(s) = frontier.pop() {
        for &d in &downs {
            if cuts.insert(s & d) {
                frontier.push(s & d);
            }
        }
    }
    let mut cuts: Vec<Subset> = cuts.into_iter().collect();
    cuts.sort_by_key(|&s| (s.count_ones(), s));
    let names: Vec<String> = cuts
        .iter()
        .map(|&s| format!("{{{}}}", p.subset_names(s).join(",")))
        .collect();
    let mut pairs = Vec::new();
    for (i, &x) in cuts.iter().enumerate() {
        for (j, &y) in cuts.iter().enumerate() {
            if i != j && x & !y == 0 {
                pairs.push((i, j));
            }
        }
    }
    let lattice = FinPoset::new(names, &pairs).expect("inclusion is a partial order");
    let embedding = downs
        .iter()
        .map(|d| cuts.iter().position(|c| c == d).unwrap())
        .collect();
    DmCompletion {
        cuts,
        lattice,
        embedding,
    }
}

impl DmCompletion {
    /// True if `a ≤ b` exactly when `↓a ⊆ ↓b`.
    pub fn is_order_embedding(&self, p: &FinPoset) -> bool {
        let n = p.len();
        (0..n).all(|a| {
            (0..n).all(|b| p.leq(a, b) == self.lattice.leq(self.embedding[a], self.embedding[b]))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityCertificate {
    pub join_dense: bool,
    pub meet_dense: bool,
    /// Cuts at which one of the two properties fails.
    pub failures: Vec<usize>,
}

/// Checks that every cut is the join of the embedded elements below it and
/// the meet of the embedded elements above it, computed in the lattice.
pub fn density_certificate(p: &FinPoset, dm: &DmCompletion) -> DensityCertificate {
    let l = &dm.lattice;
    let mut cert = DensityCertificate {
        join_dense: true,
        meet_dense: true,
        failures: Vec::new(),
    };
    for x in 0..l.len() {
        let below = (0..p.len())
            .filter(|&a| l.leq(dm.embedding[a], x))
            .fold(0, |s, a| s | 1 << dm.embedding[a]);
        let above = (0..p.len())
            .filter(|&a| l.leq(x, dm.embedding[a]))
            .fold(0, |s, a| s | 1 << dm.embedding[a]);
        let join_ok = l.join(below) == Some(x);
        let meet_ok = l.meet(above) == Some(x);
        cert.join_dense &= join_ok;
        cert.meet_dense &= meet_ok;
        if !(join_ok && meet_ok) {
            cert.failures.push(x);
        }
    }
    cert
}

#[derive(Clone, Debug)]
pub struct Crosscheck {
    pub cuts: usize,
    pub classes: usize,
    /// The supports of the reflexive classes are exactly the cuts.
    pub supports_match: bool,
    /// Sending each class to its support is an isomorphism onto the cut lattice.
    pub lattice_iso: bool,
}

impl Crosscheck {
    pub fn ok(&self) -> bool {
        self.supports_match && self.lattice_iso
    }
}

/// Compares the cut lattice with the bounded reflexive completion of the
/// poset seen as a category.
pub fn crosscheck_with_categorical(p: &FinPoset, limits: Limits) -> Result<Crosscheck> {
    let dm = dm_completion(p);
    let c = Arc::new(p.to_category());
    let report = enumerate_reflexive(&c, 1, limits)?;
    let supports: Vec<Subset> = report
        .classes
        .iter()
        .map(|x| {
            x.supp()
                .iter()
                .map(|&a| {
                    p.elements
                        .iter()
                        .position(|e| e == c.object_name(a))
                        .unwrap()
                })
                .fold(0, |s, a| s | 1 << a)
        })
        .collect();
    let mut sorted = supports.clone();
    sorted.sort_by_key(|&s| (s.count_ones(), s));
    let supports_match = sorted == dm.cuts && report.classes.iter().all(|x| x.is_subterminal());
    let mut lattice_iso = false;
    if supports_match {
        let (r, _) = reflexive_completion_category(&report, limits)?;
        let target = Arc::new(dm.lattice.to_category());
        let object_map: Vec<usize> = (0..r.num_objects())
            .map(|i| {
                let k = dm.cuts.iter().position(|&s| s == supports[i]).unwrap();
                target.object_id(dm.lattice.elements()[k].as_str())
            })
            .collect::<Result<_>>()?;
        let morphism_map: Option<Vec<usize>> = (0..r.num_morphisms())
            .map(|f| {
                target
                    .hom(object_map[r.dom(f)], object_map[r.cod(f)])
                    .first()
                    .copied()
            })
            .collect();
        if let Some(morphism_map) = morphism_map {
            lattice_iso = FinFunctor::new(r, target, object_map, morphism_map)
                .map(|f| f.is_isomorphism())
                .unwrap_or(false);
        }
    }
    Ok(Crosscheck {
        cuts: dm.cuts.len(),
        classes: report.classes.len(),
        supports_match,
        lattice_iso,
    })
}

/// Every poset on `n` elements up to isomorphism, each with a natural labelling.
pub fn all_posets_up_to_iso(n: usize) -> Vec<FinPoset> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let perms = permutations(n);
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let chosen: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let rel = |a: usize, b: usize| a == b || chosen.contains(&(a, b));
        let transitive = chosen
            .iter()
            .all(|&(a, b)| (0..n).all(|c| !rel(b, c) || rel(a, c)));
        if !transitive {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|perm| {
                let mut key = vec![false; n * n];
                for &(a, b) in &chosen {
                    key[perm[a] * n + perm[b]] = true;
                }
                key
            })
            .min()
            .unwrap_or_default();
        if seen.insert(canonical) {
            out.push(
                FinPoset::with_indices(n, &chosen).expect("naturally labelled relation is a poset"),
            );
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: down-closed subsets `X` with `X = ↓↑X`.
    fn cuts_by_brute_force(p: &FinPoset) -> Vec<Subset> {
        let mut out: Vec<Subset> = (0..=p.full())
            .filter(|&s| p.lower_bounds(p.upper_bounds(s)) == s)
            .collect();
        out.sort_by_key(|&s| (s.count_ones(), s));
        out
    }

    fn fig_two() -> FinPoset {
        let names = ["1", "2", "3", "4", "5"].map(String::from).to_vec();
        FinPoset::new(names, &[(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap()
    }

    #[test]
    fn bounds_examples() {
        let anti = FinPoset::antichain(2);
        assert_eq!(anti.upper_bounds(0b11), 0);
        let chain = FinPoset::chain(3);
        assert_eq!(chain.upper_bounds(0b011), 0b110);
        assert_eq!(chain.upper_bounds(0), chain.full());
    }

    #[test]
    fn cycles_are_rejected() {
        let err = FinPoset::with_indices(2, &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPoset(r) if r.has("antisymmetry")));
    }

    #[test]
    fn raw_round_trip_keeps_order() {
        let p = fig_two();
        assert_eq!(FinPoset::from_raw(&p.to_raw()).unwrap(), p);
        assert_eq!(p.to_raw().leq.len(), 4);
    }

    #[test]
    fn small_completions() {
        let dm = dm_completion(&FinPoset::antichain(2));
        assert_eq!(dm.cuts.len(), 4);
        assert!(dm.lattice.is_lattice());
        let dm = dm_completion(&FinPoset::antichain(0));
        assert_eq!(dm.cuts.len(), 1);
        let p = fig_two();
        let dm = dm_completion(&p);
        assert_eq!(dm.cuts.len(), 7);
        assert!(dm.is_order_embedding(&p));
    }

    #[test]
    fn completion_of_a_lattice_is_itself() {
        let square = FinPoset::with_indices(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(square.is_lattice());
        let dm = dm_completion(&square);
        assert_eq!(dm.cuts.len(), 4);
        let mut image = dm.embedding.clone();
        image.sort();
        assert_eq!(image, vec![0, 1, 2, 3]);
    }

    #[test]
    fn cuts_agree_with_brute_force_on_all_small_posets() {
        for n in 0..=4 {
            for p in all_posets_up_to_iso(n) {
                let dm = dm_completion(&p);
                assert_eq!(dm.cuts, cuts_by_brute_force(&p));
                assert!(dm.lattice.is_lattice());
                assert!(dm.is_order_embedding(&p));
                let cert = density_certificate(&p, &dm);
                assert!(cert.join_dense && cert.meet_dense);
            }
        }
    }

    #[test]
    fn poset_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| all_posets_up_to_iso(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn galois_connection_and_closure() {
        for n in 0..=4 {
            for p in all_posets_up_to_iso(n) {
                let full = p.full();
                for x in 0..=full {
                    let cl = p.lower_bounds(p.upper_bounds(x));
                    assert_eq!(x & !cl, 0);
                    assert_eq!(p.lower_bounds(p.upper_bounds(cl)), cl);
                    for y in 0..=full {
                        assert_eq!(x & !p.lower_bounds(y) == 0, y & !p.upper_bounds(x) == 0);
                        if x & !y == 0 {
                            let cly = p.lower_bounds(p.upper_bounds(y));
                            assert_eq!(cl & !cly, 0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn crosscheck_examples() {
        for p in [
            FinPoset::antichain(2),
            FinPoset::chain(3),
            FinPoset::antichain(0),
            fig_two(),
        ] {
            let check = crosscheck_with_categorical(&p, Limits::default()).unwrap();
            assert!(check.ok(), "{:?}", p.to_raw());
            assert_eq!(check.cuts, check.classes);
        }
    }

    #[test]
    fn fig_two_is_self_dual() {
        let p = fig_two();
        let c = Arc::new(p.to_category());
        let op = Arc::new(p.opposite().to_category());
        assert!(crate::fincat::find_isomorphism(&c, &op).is_some());
    }
}
