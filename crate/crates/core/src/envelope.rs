//! The Isbell envelope: triples `(X, Y, χ)` of a presheaf, a copresheaf and a
//! pairing `χ: X ⊠ Y → Hom`, with maps `(p: X → X', q: Y' → Y)` respecting
//! the pairings.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::completion::enumerate_functors;
use crate::conjugacy::{
    check_pairing, conjugate, copresheaf_side_from_pairing, is_reflexive,
    pairing_from_presheaf_side, presheaf_side_from_pairing, ConjugateResult, Pairing,
};
use crate::error::{Error, ResourceExceeded, Result, ValidationReport};
use crate::fincat::FinCat;
use crate::setfun::{
    is_isomorphic, nat_transformations, Limits, NatTransf, RawFunctor, SetFunctor, Variance,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeObject {
    pub x: SetFunctor,
    pub y: SetFunctor,
    pub chi: Pairing,
}

/// Wire form: the two functors plus `chi["(a,b)"]["(e,t)"]`, a morphism name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEnvelope {
    pub x: RawFunctor,
    pub y: RawFunctor,
    pub chi: BTreeMap<String, BTreeMap<String, String>>,
}

/// Checks variances, typing, and naturality of `chi` in both variables.
pub fn validate_envelope(x: &SetFunctor, y: &SetFunctor, chi: &Pairing) -> ValidationReport {
    check_pairing(x, y, chi)
}

impl EnvelopeObject {
    pub fn new(x: SetFunctor, y: SetFunctor, chi: Pairing) -> Result<Self> {
        validate_envelope(&x, &y, &chi).into_result(Self { x, y, chi }, Error::InvalidEnvelope)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_envelope(&self.x, &self.y, &self.chi)
    }

    pub fn base(&self) -> &Arc<FinCat> {
        &self.x.base
    }

    pub fn from_raw(base: Arc<FinCat>, raw: &RawEnvelope) -> Result<Self> {
        let x = SetFunctor::from_raw(base.clone(), &raw.x)?;
        let y = SetFunctor::from_raw(base.clone(), &raw.y)?;
        let n = base.num_objects();
        let mut values: Vec<Vec<Vec<Vec<Option<usize>>>>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| vec![vec![None; y.card(b)]; x.card(a)])
                    .collect()
            })
            .collect();
        for (key, entries) in &raw.chi {
            let (a, b) = split_pair(key)?;
            let (a, b) = (base.object_id(a)?, base.object_id(b)?);
            for (pair, mor) in entries {
                let (e, t) = split_pair(pair)?;
                let (e, t) = (x.element_id(a, e)?, y.element_id(b, t)?);
                values[a][b][e][t] = Some(base.morphism_id(mor)?);
            }
        }
        let mut missing = ValidationReport::ok();
        let values = values
            .into_iter()
            .enumerate()
            .map(|(a, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(b, table)| {
                        table
                            .into_iter()
                            .enumerate()
                            .map(|(e, cells)| {
                                cells
                                    .into_iter()
                                    .enumerate()
                                    .map(|(t, m)| {
                                        m.unwrap_or_else(|| {
                                            missing.push(
                                                "totality",
                                                vec![
                                                    base.object_name(a).to_string(),
                                                    base.object_name(b).to_string(),
                                                    x.sets[a][e].clone(),
                                                    y.sets[b][t].clone(),
                                                ],
                                                "pairing value missing",
                                            );
                                            usize::MAX
                                        })
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        if !missing.is_ok() {
            return Err(Error::InvalidEnvelope(missing));
        }
        Self::new(x, y, Pairing { values })
    }

    pub fn to_raw(&self) -> RawEnvelope {
        let base = &*self.x.base;
        let n = base.num_objects();
        let mut chi = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                let mut entries = BTreeMap::new();
                for e in 0..self.x.card(a) {
                    for t in 0..self.y.card(b) {
                        entries.insert(
                            format!("({},{})", self.x.sets[a][e], self.y.sets[b][t]),
                            base.morphism_name(self.chi.values[a][b][e][t]).to_string(),
                        );
                    }
                }
                if !entries.is_empty() {
                    chi.insert(
                        format!("({},{})", base.object_name(a), base.object_name(b)),
                        entries,
                    );
                }
            }
        }
        RawEnvelope {
            x: self.x.to_raw(),
            y: self.y.to_raw(),
            chi,
        }
    }
}

fn split_pair(s: &str) -> Result<(&str, &str)> {
    s.strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .and_then(|s| s.split_once(','))
        .ok_or_else(|| Error::Parse(format!("`{s}` is not of the form (u,v)")))
}

/// `(x, x^∨, ε)` with `ε(e, ξ) = ξ(e)`.
pub fn embed_presheaf(x: &SetFunctor, limits: Limits) -> Result<EnvelopeObject> {
    require(x, Variance::Contravariant)?;
    let conj = conjugate(x, limits)?;
    let n = x.base.num_objects();
    let values = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..x.card(a))
                        .map(|e| {
                            (0..conj.output.card(b))
                                .map(|k| conj.value(b, k, a, e))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(EnvelopeObject {
        x: x.clone(),
        y: conj.output,
        chi: Pairing { values },
    })
}

/// `(y^∨, y, ε)` with `ε(ξ, t) = ξ(t)`.
pub fn embed_copresheaf(y: &SetFunctor, limits: Limits) -> Result<EnvelopeObject> {
    require(y, Variance::Covariant)?;
    let conj = conjugate(y, limits)?;
    let n = y.base.num_objects();
    let values = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..conj.output.card(a))
                        .map(|k| (0..y.card(b)).map(|t| conj.value(a, k, b, t)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(EnvelopeObject {
        x: conj.output,
        y: y.clone(),
        chi: Pairing { values },
    })
}

fn require(x: &SetFunctor, variance: Variance) -> Result<()> {
    if x.variance != variance {
        return Err(Error::VarianceMismatch {
            expected: variance.name(),
            found: x.variance.name(),
        });
    }
    Ok(())
}

fn respects(e: &EnvelopeObject, e2: &EnvelopeObject, p: &NatTransf, q: &NatTransf) -> bool {
    let n = e.x.base.num_objects();
    (0..n).all(|a| {
        (0..n).all(|b| {
            (0..e.x.card(a)).all(|s| {
                (0..e2.y.card(b)).all(|t| {
                    e.chi.values[a][b][s][q.components[b][t]]
                        == e2.chi.values[a][b][p.components[a][s]][t]
                })
            })
        })
    })
}

/// All envelope maps `e → e2`, in lexicographic order of `(p, q)`.
pub fn envelope_homs(
    e: &EnvelopeObject,
    e2: &EnvelopeObject,
    limits: Limits,
) -> Result<Vec<(NatTransf, NatTransf)>> {
    if *e.x.base != *e2.x.base {
        return Err(Error::BaseMismatch);
    }
    let ps = nat_transformations(&e.x, &e2.x, limits)?;
    let qs = nat_transformations(&e2.y, &e.y, limits)?;
    let pairs = (ps.len() as u64).saturating_mul(qs.len() as u64);
    if pairs > limits.ceiling {
        return Err(Error::Resource(ResourceExceeded {
            ceiling: limits.ceiling,
            context: "enumerating envelope maps".to_string(),
            profile: vec![ps.len(), qs.len()],
        }));
    }
    let mut out = Vec::new();
    for p in &ps {
        for q in &qs {
            if respects(e, e2, p, q) {
                out.push((p.clone(), q.clone()));
            }
        }
    }
    Ok(out)
}

/// An envelope isomorphism `e → e2`, if there is one.
pub fn envelope_isomorphic(
    e: &EnvelopeObject,
    e2: &EnvelopeObject,
    limits: Limits,
) -> Result<Option<(NatTransf, NatTransf)>> {
    if e.x.signature() != e2.x.signature() || e.y.signature() != e2.y.signature() {
        return Ok(None);
    }
    Ok(envelope_homs(e, e2, limits)?
        .into_iter()
        .find(|(p, q)| p.is_bijective_onto(&e2.x) && q.is_bijective_onto(&e.y)))
}

#[derive(Clone, Debug)]
pub struct InvariantPartReport {
    pub in_invariant_part: bool,
    /// Transpose `x → y^∨`.
    pub phi: NatTransf,
    /// Transpose `y → x^∨`.
    pub psi: NatTransf,
    pub phi_iso: bool,
    pub psi_iso: bool,
    /// First object where a transpose fails to be bijective.
    pub witness: Option<String>,
    /// Whether `x` is reflexive and `y ≅ x^∨`, computed independently.
    pub reflexive_and_conjugate: bool,
}

/// Decides whether both transposes of `chi` are isomorphisms.
pub fn invariant_part_check(e: &EnvelopeObject, limits: Limits) -> Result<InvariantPartReport> {
    let report = e.validate();
    if !report.is_ok() {
        return Err(Error::InvalidEnvelope(report));
    }
    let x_conj = conjugate(&e.x, limits)?;
    let y_conj = conjugate(&e.y, limits)?;
    let phi = presheaf_side_from_pairing(&y_conj, &e.x, &e.chi)?;
    let psi = copresheaf_side_from_pairing(&x_conj, &e.y, &e.chi)?;
    let phi_iso = phi.is_bijective_onto(&y_conj.output);
    let psi_iso = psi.is_bijective_onto(&x_conj.output);
    let base = &e.x.base;
    let witness = (0..base.num_objects())
        .find(|&a| {
            !bijective_at(&phi, a, y_conj.output.card(a))
                || !bijective_at(&psi, a, x_conj.output.card(a))
        })
        .map(|a| base.object_name(a).to_string());
    let reflexive_and_conjugate = is_reflexive(&e.x, limits)?.reflexive
        && is_isomorphic(&e.y, &x_conj.output, limits)?.is_some();
    Ok(InvariantPartReport {
        in_invariant_part: phi_iso && psi_iso,
        phi,
        psi,
        phi_iso,
        psi_iso,
        witness,
        reflexive_and_conjugate,
    })
}

fn bijective_at(t: &NatTransf, a: usize, target: usize) -> bool {
    let c = &t.components[a];
    let mut seen = vec![false; target];
    c.len() == target
        && c.iter()
            .all(|&v| v < target && !std::mem::replace(&mut seen[v], true))
}

/// Rebuilds `chi` from its transpose `x → y^∨`; equal to `chi` for every valid object.
pub fn transpose_round_trip(e: &EnvelopeObject, y_conj: &ConjugateResult) -> Result<bool> {
    let phi = presheaf_side_from_pairing(y_conj, &e.x, &e.chi)?;
    Ok(pairing_from_presheaf_side(y_conj, &phi) == e.chi)
}

#[derive(Clone, Debug)]
pub struct EnvelopeEnumeration {
    pub bound: usize,
    /// One object per envelope isomorphism class.
    pub objects: Vec<EnvelopeObject>,
    pub invariant: Vec<bool>,
    pub pairings_examined: u64,
}

impl EnvelopeEnumeration {
    pub fn invariant_objects(&self) -> impl Iterator<Item = &EnvelopeObject> {
        self.objects
            .iter()
            .zip(&self.invariant)
            .filter(|(_, &i)| i)
            .map(|(o, _)| o)
    }
}

/// Envelope objects whose functors have at most `bound` elements per object,
/// up to isomorphism. Pairings are produced as transposes `x → y^∨`; more
/// than `pairing_ceiling` of them is a resource error.
pub fn enumerate_envelope(
    c: &Arc<FinCat>,
    bound: usize,
    pairing_ceiling: u64,
    limits: Limits,
) -> Result<EnvelopeEnumeration> {
    let xs = enumerate_functors(c, Variance::Contravariant, bound, limits)?;
    let ys = enumerate_functors(c, Variance::Covariant, bound, limits)?;
    let mut objects = Vec::new();
    let mut pairings_examined = 0u64;
    for y in &ys {
        let y_conj = conjugate(y, limits)?;
        for x in &xs {
            let mut kept: Vec<EnvelopeObject> = Vec::new();
            for alpha in nat_transformations(x, &y_conj.output, limits)? {
                pairings_examined += 1;
                if pairings_examined > pairing_ceiling {
                    return Err(Error::Resource(ResourceExceeded {
                        ceiling: pairing_ceiling,
                        context: "enumerating envelope pairings".to_string(),
                        profile: vec![objects.len()],
                    }));
                }
                let candidate = EnvelopeObject {
                    x: x.clone(),
                    y: y.clone(),
                    chi: pairing_from_presheaf_side(&y_conj, &alpha),
                };
                let mut duplicate = false;
                for k in &kept {
                    if envelope_isomorphic(k, &candidate, limits)?.is_some() {
                        duplicate = true;
                        break;
                    }
                }
                if !duplicate {
                    kept.push(candidate);
                }
            }
            objects.extend(kept);
        }
    }
    let invariant = objects
        .iter()
        .map(|o| invariant_part_check(o, limits).map(|r| r.in_invariant_part))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnvelopeEnumeration {
        bound,
        objects,
        invariant,
        pairings_examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::enumerate_reflexive;
    use crate::fincat::{discrete, from_monoid, from_poset};
    use crate::order::FinPoset;
    use crate::setfun::{coproduct, count_nat, initial, representable, terminal};

    fn c2() -> Arc<FinCat> {
        Arc::new(from_monoid(&[vec![0, 1], vec![1, 0]], 0).unwrap())
    }

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn embedded_regular_action() {
        let c = c2();
        let g = representable(&c, 0, Variance::Contravariant).unwrap();
        let e = embed_presheaf(&g, lim()).unwrap();
        assert!(e.validate().is_ok());
        assert_eq!(e.y.cards(), vec![2]);
        // The pairing is multiplication: χ(g, ξ) = ξ(g) = ξ(1)·g, so each row is a permutation.
        for row in &e.chi.values[0][0] {
            let mut r = row.clone();
            r.sort_unstable();
            assert_eq!(r, vec![0, 1]);
        }
        assert_eq!(envelope_homs(&e, &e, lim()).unwrap().len(), 2);
    }

    #[test]
    fn poset_representable_pairs_down_and_up_sets() {
        let p = FinPoset::chain(3);
        let c = Arc::new(from_poset(&p));
        let x = representable(&c, 1, Variance::Contravariant).unwrap();
        let e = embed_presheaf(&x, lim()).unwrap();
        assert_eq!(e.x.cards(), vec![1, 1, 0]);
        assert_eq!(e.y.cards(), vec![0, 1, 1]);
        for a in 0..3 {
            for b in 0..3 {
                for row in &e.chi.values[a][b] {
                    for &m in row {
                        assert_eq!((c.dom(m), c.cod(m)), (a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn initial_object_embedding() {
        let c = c2();
        let e = embed_presheaf(&initial(&c, Variance::Contravariant), lim()).unwrap();
        assert_eq!(e.y.cards(), vec![1]);
        assert!(e.chi.values[0][0].is_empty());
        assert!(e.validate().is_ok());
        let other =
            embed_copresheaf(&representable(&c, 0, Variance::Covariant).unwrap(), lim()).unwrap();
        let homs = envelope_homs(&e, &other, lim()).unwrap();
        let expected = count_nat(&other.y, &e.y, lim()).unwrap();
        assert_eq!(homs.len(), expected);
    }

    #[test]
    fn broken_square_is_reported() {
        let c = c2();
        let g = representable(&c, 0, Variance::Contravariant).unwrap();
        let mut e = embed_presheaf(&g, lim()).unwrap();
        let flip = 1 - e.chi.values[0][0][0][0];
        e.chi.values[0][0][0][0] = flip;
        assert!(e.validate().has("naturality"));
        assert!(matches!(
            EnvelopeObject::new(e.x.clone(), e.y.clone(), e.chi.clone()),
            Err(Error::InvalidEnvelope(_))
        ));
    }

    #[test]
    fn embeddings_are_full_and_faithful() {
        let c = Arc::new(from_monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap());
        let cats = [c2(), c, Arc::new(from_poset(&FinPoset::chain(2)))];
        for c in cats {
            let n = c.num_objects();
            for a in 0..n {
                for b in 0..n {
                    let ra = representable(&c, a, Variance::Contravariant).unwrap();
                    let rb = representable(&c, b, Variance::Contravariant).unwrap();
                    let homs = envelope_homs(
                        &embed_presheaf(&ra, lim()).unwrap(),
                        &embed_presheaf(&rb, lim()).unwrap(),
                        lim(),
                    )
                    .unwrap();
                    assert_eq!(homs.len(), c.hom(a, b).len());
                    let ca = representable(&c, a, Variance::Covariant).unwrap();
                    let cb = representable(&c, b, Variance::Covariant).unwrap();
                    let homs = envelope_homs(
                        &embed_copresheaf(&ca, lim()).unwrap(),
                        &embed_copresheaf(&cb, lim()).unwrap(),
                        lim(),
                    )
                    .unwrap();
                    assert_eq!(homs.len(), count_nat(&cb, &ca, lim()).unwrap());
                }
            }
        }
    }

    #[test]
    fn invariant_part_examples() {
        let c = c2();
        let g = representable(&c, 0, Variance::Contravariant).unwrap();
        let gg = coproduct(&c, Variance::Contravariant, &[g.clone(), g]).unwrap();
        let r = invariant_part_check(&embed_presheaf(&gg, lim()).unwrap(), lim()).unwrap();
        assert!(r.in_invariant_part && r.reflexive_and_conjugate);

        let t = embed_presheaf(&terminal(&c, Variance::Contravariant), lim()).unwrap();
        assert!(invariant_part_check(&t, lim()).unwrap().in_invariant_part);

        let empty = EnvelopeObject::new(
            initial(&c, Variance::Contravariant),
            initial(&c, Variance::Covariant),
            Pairing {
                values: vec![vec![vec![]]],
            },
        )
        .unwrap();
        let r = invariant_part_check(&empty, lim()).unwrap();
        assert!(!r.in_invariant_part && !r.phi_iso && !r.reflexive_and_conjugate);
        assert_eq!(r.witness.as_deref(), Some("*"));
    }

    #[test]
    fn json_round_trip() {
        let c = c2();
        let g = representable(&c, 0, Variance::Contravariant).unwrap();
        let e = embed_presheaf(&g, lim()).unwrap();
        let text = serde_json::to_string(&e.to_raw()).unwrap();
        let raw: RawEnvelope = serde_json::from_str(&text).unwrap();
        assert_eq!(EnvelopeObject::from_raw(c, &raw).unwrap(), e);
    }

    #[test]
    fn invariant_part_matches_reflexive_classes() {
        let idem = Arc::new(from_monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap());
        for (c, bound) in [(c2(), 4), (idem, 3), (Arc::new(discrete(2)), 2)] {
            let en = enumerate_envelope(&c, bound, 1_000_000, lim()).unwrap();
            for o in &en.objects {
                let y_conj = conjugate(&o.y, lim()).unwrap();
                assert!(transpose_round_trip(o, &y_conj).unwrap());
            }
            let reflexive = enumerate_reflexive(&c, bound, lim()).unwrap();
            let mut expected = 0;
            for x in &reflexive.classes {
                if conjugate(x, lim())
                    .unwrap()
                    .output
                    .cards()
                    .iter()
                    .all(|&k| k <= bound)
                {
                    expected += 1;
                }
            }
            let inv: Vec<&EnvelopeObject> = en.invariant_objects().collect();
            assert_eq!(inv.len(), expected);
            for o in inv {
                assert!(
                    invariant_part_check(o, lim())
                        .unwrap()
                        .reflexive_and_conjugate
                );
            }
        }
    }
}
