//! Isbell conjugation on Set-valued functors over a finite category.
//!
//! For a presheaf `X` the conjugate is the copresheaf `a ↦ Nat(X, A(−,a))`;
//! for a copresheaf `Y` it is the presheaf `a ↦ Nat(Y, A(a,−))`. Conjugate
//! elements are labelled `0, 1, ...` in the canonical order of the
//! transformations they name, so repeated computations agree on the nose.

use std::sync::Arc;

use crate::error::{Error, ResourceExceeded, Result, ValidationReport};
use crate::fincat::FinCat;
use crate::setfun::{
    is_isomorphic, nat_transformations, representable, Limits, NatTransf, SetFunctor, Variance,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateResult {
    pub input: SetFunctor,
    pub output: SetFunctor,
    /// `witness[a][k]` is the transformation named by element `k` of `output(a)`.
    /// Its components index into the hom-sets of the representable at `a`.
    pub witness: Vec<Vec<NatTransf>>,
}

/// The hom-set that the representable at `a`, of the variance matching
/// `variance`, assigns to `c`.
fn rep_hom(base: &FinCat, variance: Variance, a: usize, c: usize) -> &[usize] {
    match variance {
        Variance::Contravariant => base.hom(c, a),
        Variance::Covariant => base.hom(a, c),
    }
}

impl ConjugateResult {
    /// Label of `xi` in `output(a)`, if it is one of the witnesses there.
    pub fn label(&self, a: usize, xi: &NatTransf) -> Option<usize> {
        self.witness[a].binary_search(xi).ok()
    }

    fn label_or_internal(&self, a: usize, xi: &NatTransf) -> Result<usize> {
        self.label(a, xi).ok_or_else(|| {
            Error::Internal(format!(
                "transformation is missing from the conjugate at `{}`",
                self.input.base.object_name(a)
            ))
        })
    }

    /// The morphism that `witness[a][k]` assigns to element `e` of `input(c)`.
    pub fn value(&self, a: usize, k: usize, c: usize, e: usize) -> usize {
        let base = &*self.input.base;
        rep_hom(base, self.input.variance, a, c)[self.witness[a][k].components[c][e]]
    }
}

/// Computes the conjugate together with the transformations naming its elements.
pub fn conjugate(x: &SetFunctor, limits: Limits) -> Result<ConjugateResult> {
    let base = &x.base;
    let n = base.num_objects();
    let mut witness = Vec::with_capacity(n);
    for a in 0..n {
        let rep = representable(base, a, x.variance)?;
        witness.push(nat_transformations(x, &rep, limits)?);
    }
    let sets = witness
        .iter()
        .map(|w| (0..w.len()).map(|k| k.to_string()).collect())
        .collect();
    let out_variance = x.variance.flip();
    let mut partial = ConjugateResult {
        input: x.clone(),
        output: SetFunctor {
            base: base.clone(),
            variance: out_variance,
            sets,
            actions: Vec::new(),
        },
        witness,
    };
    let mut actions = Vec::with_capacity(base.num_morphisms());
    for f in 0..base.num_morphisms() {
        let (s, t) = partial.output.endpoints(f);
        let mut act = Vec::with_capacity(partial.witness[s].len());
        for xi in &partial.witness[s] {
            // Push ξ along f, pointwise on components.
            let components = (0..n)
                .map(|c| {
                    xi.components[c]
                        .iter()
                        .map(|&p| {
                            let m = rep_hom(base, x.variance, s, c)[p];
                            let moved = match x.variance {
                                Variance::Contravariant => base.comp(f, m),
                                Variance::Covariant => base.comp(m, f),
                            };
                            base.hom_position(moved)
                        })
                        .collect()
                })
                .collect();
            act.push(partial.label_or_internal(t, &NatTransf { components })?);
        }
        actions.push(act);
    }
    partial.output.actions = actions;
    let report = partial.output.validate();
    if !report.is_ok() {
        return Err(Error::Internal(format!(
            "conjugate is not a functor: {report}"
        )));
    }
    Ok(partial)
}

/// The conjugate of the conjugate, with both intermediate results.
pub fn double_conjugate(
    x: &SetFunctor,
    limits: Limits,
) -> Result<(ConjugateResult, ConjugateResult)> {
    let first = conjugate(x, limits)?;
    let second = conjugate(&first.output, limits)?;
    Ok((first, second))
}

/// The unit `η: x → x^∨∨`, together with the two conjugates it runs through.
#[derive(Clone, Debug)]
pub struct Unit {
    pub first: ConjugateResult,
    pub second: ConjugateResult,
    pub eta: NatTransf,
}

impl Unit {
    pub fn double(&self) -> &SetFunctor {
        &self.second.output
    }
}

/// `η_a(e)` is the transformation `ξ ↦ ξ_a(e)`.
pub fn unit(x: &SetFunctor, limits: Limits) -> Result<Unit> {
    let (first, second) = double_conjugate(x, limits)?;
    let eta = unit_between(&first, &second)?;
    Ok(Unit { first, second, eta })
}

fn unit_between(first: &ConjugateResult, second: &ConjugateResult) -> Result<NatTransf> {
    let x = &first.input;
    let n = x.base.num_objects();
    let mut components = Vec::with_capacity(n);
    for a in 0..n {
        let mut comp = Vec::with_capacity(x.card(a));
        for e in 0..x.card(a) {
            // The hom-set at `a` of the representable at `b` is the one the
            // double conjugate uses at `b` for the representable at `a`.
            let evaluated = NatTransf {
                components: first
                    .witness
                    .iter()
                    .map(|wb| wb.iter().map(|xi| xi.components[a][e]).collect())
                    .collect(),
            };
            comp.push(second.label_or_internal(a, &evaluated)?);
        }
        components.push(comp);
    }
    Ok(NatTransf { components })
}

#[derive(Clone, Debug)]
pub struct ReflexivityCertificate {
    pub reflexive: bool,
    pub unit: Unit,
    /// An object at which `η` fails to be bijective.
    pub failing_object: Option<usize>,
}

/// Decides whether `η` is bijective at every object.
pub fn is_reflexive(x: &SetFunctor, limits: Limits) -> Result<ReflexivityCertificate> {
    let unit = unit(x, limits)?;
    let failing_object = (0..x.base.num_objects()).find(|&a| {
        let comp = &unit.eta.components[a];
        let target = unit.double().card(a);
        let mut seen = vec![false; target];
        comp.len() != target || comp.iter().any(|&v| std::mem::replace(&mut seen[v], true))
    });
    Ok(ReflexivityCertificate {
        reflexive: failing_object.is_none(),
        unit,
        failing_object,
    })
}

/// A family `χ_{a,b}: X(a) × Y(b) → A(a,b)`, stored as `values[a][b][i][j]`
/// giving a morphism index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    pub values: Vec<Vec<Vec<Vec<usize>>>>,
}

/// Checks that `chi` is a pairing of the presheaf `x` with the copresheaf `y`
/// that is natural in both variables.
pub fn check_pairing(x: &SetFunctor, y: &SetFunctor, chi: &Pairing) -> ValidationReport {
    let mut report = ValidationReport::ok();
    let base = &*x.base;
    let n = base.num_objects();
    if x.variance != Variance::Contravariant
        || y.variance != Variance::Covariant
        || *y.base != *base
    {
        report.push(
            "structure",
            vec![],
            "pairing needs a presheaf and a copresheaf on one base",
        );
        return report;
    }
    let v = &chi.values;
    let shape_ok = v.len() == n
        && (0..n).all(|a| {
            v[a].len() == n
                && (0..n).all(|b| {
                    v[a][b].len() == x.card(a)
                        && v[a][b].iter().all(|row| {
                            row.len() == y.card(b)
                                && row.iter().all(|&m| {
                                    m < base.num_morphisms() && base.dom(m) == a && base.cod(m) == b
                                })
                        })
                })
        });
    if !shape_ok {
        report.push(
            "typing",
            vec![],
            "pairing values do not lie in the right hom-sets",
        );
        return report;
    }
    for u in 0..base.num_morphisms() {
        let (a0, a) = (base.dom(u), base.cod(u));
        for b in 0..n {
            for e in 0..x.card(a) {
                for t in 0..y.card(b) {
                    if v[a0][b][x.act(u, e)][t] != base.comp(v[a][b][e][t], u) {
                        report.push(
                            "naturality",
                            vec![
                                base.morphism_name(u).to_string(),
                                x.sets[a][e].clone(),
                                y.sets[b][t].clone(),
                            ],
                            "pairing is not natural in the presheaf variable",
                        );
                    }
                }
            }
        }
        let (b, b1) = (base.dom(u), base.cod(u));
        for a in 0..n {
            for e in 0..x.card(a) {
                for t in 0..y.card(b) {
                    if v[a][b1][e][y.act(u, t)] != base.comp(u, v[a][b][e][t]) {
                        report.push(
                            "naturality",
                            vec![
                                base.morphism_name(u).to_string(),
                                x.sets[a][e].clone(),
                                y.sets[b][t].clone(),
                            ],
                            "pairing is not natural in the copresheaf variable",
                        );
                    }
                }
            }
        }
    }
    report
}

/// The evaluation pairing `ε_{a,b}(e, ξ) = ξ_a(e)` of a presheaf with its conjugate.
pub fn counit_pairing(x: &SetFunctor, limits: Limits) -> Result<(ConjugateResult, Pairing)> {
    if x.variance != Variance::Contravariant {
        return Err(Error::VarianceMismatch {
            expected: "contra",
            found: x.variance.name(),
        });
    }
    let conj = conjugate(x, limits)?;
    let pairing = evaluation_pairing(&conj);
    Ok((conj, pairing))
}

pub(crate) fn evaluation_pairing(conj: &ConjugateResult) -> Pairing {
    let x = &conj.input;
    let n = x.base.num_objects();
    Pairing {
        values: (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..x.card(a))
                            .map(|e| {
                                (0..conj.witness[b].len())
                                    .map(|k| conj.value(b, k, a, e))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    }
}

/// The two sides of the conjugacy adjunction for a presheaf `x` and a
/// copresheaf `y`, with the bijection between them.
#[derive(Clone, Debug)]
pub struct AdjunctionBijection {
    /// `Nat(x, y^∨)`.
    pub left: Vec<NatTransf>,
    /// `Nat(y, x^∨)`.
    pub right: Vec<NatTransf>,
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
    pub x_conj: ConjugateResult,
    pub y_conj: ConjugateResult,
}

/// Pairing `x ⊠ y → Hom` transposed from `alpha: x → y^∨`.
pub fn pairing_from_presheaf_side(y_conj: &ConjugateResult, alpha: &NatTransf) -> Pairing {
    let n = y_conj.input.base.num_objects();
    Pairing {
        values: (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        alpha.components[a]
                            .iter()
                            .map(|&k| {
                                (0..y_conj.input.card(b))
                                    .map(|t| y_conj.value(a, k, b, t))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Pairing `x ⊠ y → Hom` transposed from `beta: y → x^∨`.
pub fn pairing_from_copresheaf_side(x_conj: &ConjugateResult, beta: &NatTransf) -> Pairing {
    let n = x_conj.input.base.num_objects();
    Pairing {
        values: (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..x_conj.input.card(a))
                            .map(|e| {
                                beta.components[b]
                                    .iter()
                                    .map(|&k| x_conj.value(b, k, a, e))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Transpose of a pairing into `y → x^∨`.
pub fn copresheaf_side_from_pairing(
    x_conj: &ConjugateResult,
    y: &SetFunctor,
    chi: &Pairing,
) -> Result<NatTransf> {
    let base = &*y.base;
    let n = base.num_objects();
    let mut components = Vec::with_capacity(n);
    for b in 0..n {
        let mut comp = Vec::with_capacity(y.card(b));
        for t in 0..y.card(b) {
            let xi = NatTransf {
                components: (0..n)
                    .map(|a| {
                        (0..x_conj.input.card(a))
                            .map(|e| base.hom_position(chi.values[a][b][e][t]))
                            .collect()
                    })
                    .collect(),
            };
            comp.push(x_conj.label_or_internal(b, &xi)?);
        }
        components.push(comp);
    }
    Ok(NatTransf { components })
}

/// Transpose of a pairing into `x → y^∨`.
pub fn presheaf_side_from_pairing(
    y_conj: &ConjugateResult,
    x: &SetFunctor,
    chi: &Pairing,
) -> Result<NatTransf> {
    let base = &*x.base;
    let n = base.num_objects();
    let mut components = Vec::with_capacity(n);
    for a in 0..n {
        let mut comp = Vec::with_capacity(x.card(a));
        for e in 0..x.card(a) {
            let xi = NatTransf {
                components: (0..n)
                    .map(|b| {
                        (0..y_conj.input.card(b))
                            .map(|t| base.hom_position(chi.values[a][b][e][t]))
                            .collect()
                    })
                    .collect(),
            };
            comp.push(y_conj.label_or_internal(a, &xi)?);
        }
        components.push(comp);
    }
    Ok(NatTransf { components })
}

/// Computes `Nat(x, y^∨) ≅ Nat(y, x^∨)` through the pairings `x ⊠ y → Hom`.
pub fn adjunction_bijection(
    x: &SetFunctor,
    y: &SetFunctor,
    limits: Limits,
) -> Result<AdjunctionBijection> {
    if *x.base != *y.base {
        return Err(Error::BaseMismatch);
    }
    if x.variance != Variance::Contravariant {
        return Err(Error::VarianceMismatch {
            expected: "contra",
            found: x.variance.name(),
        });
    }
    if y.variance != Variance::Covariant {
        return Err(Error::VarianceMismatch {
            expected: "co",
            found: y.variance.name(),
        });
    }
    let x_conj = conjugate(x, limits)?;
    let y_conj = conjugate(y, limits)?;
    let left = nat_transformations(x, &y_conj.output, limits)?;
    let right = nat_transformations(y, &x_conj.output, limits)?;
    let position = |list: &[NatTransf], t: &NatTransf| {
        list.binary_search(t)
            .map_err(|_| Error::Internal("transpose is not natural".to_string()))
    };
    let mut forward = Vec::with_capacity(left.len());
    for alpha in &left {
        let chi = pairing_from_presheaf_side(&y_conj, alpha);
        forward.push(position(
            &right,
            &copresheaf_side_from_pairing(&x_conj, y, &chi)?,
        )?);
    }
    let mut backward = Vec::with_capacity(right.len());
    for beta in &right {
        let chi = pairing_from_copresheaf_side(&x_conj, beta);
        backward.push(position(
            &left,
            &presheaf_side_from_pairing(&y_conj, x, &chi)?,
        )?);
    }
    let round_trip = forward.iter().enumerate().all(|(i, &j)| backward[j] == i)
        && backward.iter().enumerate().all(|(j, &i)| forward[i] == j);
    if !round_trip {
        return Err(Error::Internal(
            "transposition is not a bijection".to_string(),
        ));
    }
    Ok(AdjunctionBijection {
        left,
        right,
        forward,
        backward,
        x_conj,
        y_conj,
    })
}

/// The conjugate of `alpha: x → x'`, which runs `x'^∨ → x^∨` by precomposition.
pub fn conjugate_map(
    source: &ConjugateResult,
    target: &ConjugateResult,
    alpha: &NatTransf,
) -> Result<NatTransf> {
    let n = source.input.base.num_objects();
    let mut components = Vec::with_capacity(n);
    for a in 0..n {
        let mut comp = Vec::with_capacity(target.witness[a].len());
        for xi in &target.witness[a] {
            comp.push(source.label_or_internal(a, &xi.after(alpha))?);
        }
        components.push(comp);
    }
    Ok(NatTransf { components })
}

/// Checks that `(η_w)^∨ ∘ η_{w^∨}` is the identity of `w^∨`, so `η_{w^∨}` is split monic.
#[derive(Clone, Debug)]
pub struct SplitMonoCheck {
    /// `η_{w^∨}: w^∨ → w^∨∨∨`.
    pub eta_conj: NatTransf,
    /// `(η_w)^∨: w^∨∨∨ → w^∨`.
    pub retraction: NatTransf,
    pub holds: bool,
    /// True when `η_{w^∨}` is moreover bijective.
    pub is_iso: bool,
}

pub fn split_mono_check(w: &SetFunctor, limits: Limits) -> Result<SplitMonoCheck> {
    let u = unit(w, limits)?;
    let third = conjugate(u.double(), limits)?;
    let eta_conj = unit_between(&u.second, &third)?;
    let retraction = conjugate_map(&u.first, &third, &u.eta)?;
    let holds = retraction.after(&eta_conj) == NatTransf::identity(&u.first.output);
    let is_iso = eta_conj.is_bijective_onto(&third.output);
    Ok(SplitMonoCheck {
        eta_conj,
        retraction,
        holds,
        is_iso,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSummary {
    pub variance: Variance,
    pub cards: Vec<usize>,
    /// Sizes of the connected components of the category of elements, sorted.
    pub orbit_signature: Vec<usize>,
    /// First earlier step of the same variance to which this one is isomorphic.
    pub iso_to: Option<usize>,
}

/// Summaries of `x, x^∨, x^∨∨, ...`, `count` entries in all.
pub fn iterate_conjugates(
    x: &SetFunctor,
    count: usize,
    limits: Limits,
) -> Result<Vec<StepSummary>> {
    let mut steps: Vec<SetFunctor> = Vec::new();
    let mut out: Vec<StepSummary> = Vec::new();
    let mut current = x.clone();
    for k in 0..count {
        if k > 0 {
            current = match conjugate(&steps[k - 1], limits) {
                Ok(c) => c.output,
                Err(Error::Resource(r)) => {
                    return Err(Error::Resource(ResourceExceeded {
                        ceiling: r.ceiling,
                        context: format!("computing conjugate number {k}"),
                        profile: steps.iter().map(SetFunctor::total_size).collect(),
                    }))
                }
                Err(e) => return Err(e),
            };
        }
        let mut iso_to = None;
        for (j, earlier) in steps.iter().enumerate() {
            if earlier.variance == current.variance
                && is_isomorphic(earlier, &current, limits)?.is_some()
            {
                iso_to = Some(j);
                break;
            }
        }
        let mut orbit_signature: Vec<usize> = current
            .connected_components()
            .iter()
            .map(SetFunctor::total_size)
            .collect();
        orbit_signature.sort_unstable();
        out.push(StepSummary {
            variance: current.variance,
            cards: current.cards(),
            orbit_signature,
            iso_to,
        });
        steps.push(current.clone());
    }
    Ok(out)
}

/// The representable of the opposite variance at `a`, which the conjugate of
/// the representable at `a` should be isomorphic to.
pub fn dual_representable(c: &Arc<FinCat>, a: usize, variance: Variance) -> Result<SetFunctor> {
    representable(c, a, variance.flip())
}
