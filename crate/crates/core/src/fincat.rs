//! Finite categories given by explicit, total composition tables.
//!
//! Objects and morphisms carry opaque string identifiers. A [`FinCat`] stores
//! them sorted lexicographically and addresses them internally by index, so
//! two categories built from the same data are equal on the nose regardless of
//! the order in which the data was supplied.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationReport};
use crate::util::{fresh_name, padded, DisjointSets};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMorphism {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

/// Wire form of a category: `{"objects", "morphisms", "identities", "compose"}`.
/// Each `compose` entry is `[g, f, g∘f]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub id: String,
    pub dom: usize,
    pub cod: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    /// `compose[g * m + f]` is `g∘f` when `cod f = dom g`.
    compose: Vec<Option<usize>>,
    homs: Vec<Vec<Vec<usize>>>,
    hom_pos: Vec<usize>,
    object_index: HashMap<String, usize>,
    morphism_index: HashMap<String, usize>,
}

/// Checks every law of a finite category and reports each failure with the
/// morphisms that witness it.
pub fn validate_category(raw: &RawCategory) -> ValidationReport {
    let mut report = ValidationReport::ok();
    let mut objects = HashMap::new();
    for o in &raw.objects {
        if objects.insert(o.as_str(), ()).is_some() {
            report.push("structure", vec![o.clone()], "duplicate object identifier");
        }
    }
    let mut mors: HashMap<&str, (&str, &str)> = HashMap::new();
    for m in &raw.morphisms {
        if !objects.contains_key(m.dom.as_str()) || !objects.contains_key(m.cod.as_str()) {
            report.push(
                "structure",
                vec![m.id.clone()],
                format!(
                    "endpoint of morphism is not an object ({} -> {})",
                    m.dom, m.cod
                ),
            );
        }
        if mors
            .insert(m.id.as_str(), (m.dom.as_str(), m.cod.as_str()))
            .is_some()
        {
            report.push(
                "structure",
                vec![m.id.clone()],
                "duplicate morphism identifier",
            );
        }
    }
    if !report.is_ok() {
        return report;
    }

    let mut ids_ok = true;
    for o in &raw.objects {
        match raw.identities.get(o) {
            None => {
                ids_ok = false;
                report.push("identity", vec![o.clone()], "object has no identity");
            }
            Some(id) => match mors.get(id.as_str()) {
                Some((d, c)) if d == o && c == o => {}
                _ => {
                    ids_ok = false;
                    report.push(
                        "identity",
                        vec![o.clone(), id.clone()],
                        "identity is not an endomorphism of its object",
                    );
                }
            },
        }
    }
    for o in raw.identities.keys() {
        if !objects.contains_key(o.as_str()) {
            report.push(
                "structure",
                vec![o.clone()],
                "identity given for unknown object",
            );
        }
    }

    let mut table: HashMap<(&str, &str), &str> = HashMap::new();
    for [g, f, gf] in &raw.compose {
        let (Some(&(gd, gc)), Some(&(fd, fc)), Some(&(hd, hc))) = (
            mors.get(g.as_str()),
            mors.get(f.as_str()),
            mors.get(gf.as_str()),
        ) else {
            report.push(
                "structure",
                vec![g.clone(), f.clone(), gf.clone()],
                "composition entry names an unknown morphism",
            );
            continue;
        };
        if fc != gd {
            report.push(
                "typing",
                vec![g.clone(), f.clone()],
                "composition entry for a non-composable pair",
            );
            continue;
        }
        if hd != fd || hc != gc {
            report.push(
                "typing",
                vec![g.clone(), f.clone(), gf.clone()],
                "composite has the wrong domain or codomain",
            );
        }
        if table
            .insert((g.as_str(), f.as_str()), gf.as_str())
            .is_some()
        {
            report.push(
                "duplicate",
                vec![g.clone(), f.clone()],
                "composable pair listed more than once",
            );
        }
    }

    let mut by_dom: HashMap<&str, Vec<&str>> = HashMap::new();
    for m in &raw.morphisms {
        by_dom
            .entry(m.dom.as_str())
            .or_default()
            .push(m.id.as_str());
    }
    for f in &raw.morphisms {
        for g in by_dom
            .get(f.cod.as_str())
            .map(|v| v.as_slice())
            .unwrap_or(&[])
        {
            if !table.contains_key(&(*g, f.id.as_str())) {
                report.push(
                    "totality",
                    vec![g.to_string(), f.id.clone()],
                    "composable pair has no composite",
                );
            }
        }
    }
    if !report.is_ok() {
        return report;
    }

    if ids_ok {
        for f in &raw.morphisms {
            let id_a = raw.identities[&f.dom].as_str();
            let id_b = raw.identities[&f.cod].as_str();
            if table[&(id_b, f.id.as_str())] != f.id {
                report.push(
                    "identity",
                    vec![id_b.to_string(), f.id.clone()],
                    "left identity law fails",
                );
            }
            if table[&(f.id.as_str(), id_a)] != f.id {
                report.push(
                    "identity",
                    vec![f.id.clone(), id_a.to_string()],
                    "right identity law fails",
                );
            }
        }
    }

    for f in &raw.morphisms {
        for g in by_dom
            .get(f.cod.as_str())
            .map(|v| v.as_slice())
            .unwrap_or(&[])
        {
            let gf = table[&(*g, f.id.as_str())];
            let g_cod = mors[g].1;
            for h in by_dom.get(g_cod).map(|v| v.as_slice()).unwrap_or(&[]) {
                let left = table[&(*h, gf)];
                let hg = table[&(*h, *g)];
                let right = table[&(hg, f.id.as_str())];
                if left != right {
                    report.push(
                        "associativity",
                        vec![h.to_string(), g.to_string(), f.id.clone()],
                        format!("h(gf) = {left} but (hg)f = {right}"),
                    );
                }
            }
        }
    }
    report
}

impl FinCat {
    /// Validates `raw` and builds the category with identifiers sorted.
    pub fn new(raw: RawCategory) -> Result<Self> {
        let report = validate_category(&raw);
        if !report.is_ok() {
            return Err(Error::InvalidCategory(report));
        }
        let mut objects = raw.objects.clone();
        objects.sort();
        let object_index: HashMap<String, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        let mut raw_mors = raw.morphisms.clone();
        raw_mors.sort_by(|a, b| a.id.cmp(&b.id));
        let morphisms: Vec<Morphism> = raw_mors
            .iter()
            .map(|m| Morphism {
                id: m.id.clone(),
                dom: object_index[&m.dom],
                cod: object_index[&m.cod],
            })
            .collect();
        let morphism_index: HashMap<String, usize> = morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), i))
            .collect();
        let identities = objects
            .iter()
            .map(|o| morphism_index[&raw.identities[o]])
            .collect();
        let m = morphisms.len();
        let mut compose = vec![None; m * m];
        for [g, f, gf] in &raw.compose {
            compose[morphism_index[g] * m + morphism_index[f]] = Some(morphism_index[gf]);
        }
        Ok(Self::assemble(
            objects,
            morphisms,
            identities,
            compose,
            object_index,
            morphism_index,
        ))
    }

    fn assemble(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        compose: Vec<Option<usize>>,
        object_index: HashMap<String, usize>,
        morphism_index: HashMap<String, usize>,
    ) -> Self {
        let n = objects.len();
        let mut homs = vec![vec![Vec::new(); n]; n];
        let mut hom_pos = vec![0; morphisms.len()];
        for (i, mor) in morphisms.iter().enumerate() {
            hom_pos[i] = homs[mor.dom][mor.cod].len();
            homs[mor.dom][mor.cod].push(i);
        }
        Self {
            objects,
            morphisms,
            identities,
            compose,
            homs,
            hom_pos,
            object_index,
            morphism_index,
        }
    }

    /// The empty category.
    pub fn empty() -> Self {
        Self::assemble(
            Vec::new(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
            HashMap::new(),
            HashMap::new(),
        )
    }

    pub fn to_raw(&self) -> RawCategory {
        let mut compose = Vec::new();
        for f in 0..self.num_morphisms() {
            for &g in self.morphisms_from(self.cod(f)) {
                let gf = self.comp(g, f);
                compose.push([
                    self.morphism_name(g).to_string(),
                    self.morphism_name(f).to_string(),
                    self.morphism_name(gf).to_string(),
                ]);
            }
        }
        compose.sort();
        RawCategory {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| RawMorphism {
                    id: m.id.clone(),
                    dom: self.objects[m.dom].clone(),
                    cod: self.objects[m.cod].clone(),
                })
                .collect(),
            identities: self
                .objects
                .iter()
                .zip(&self.identities)
                .map(|(o, &i)| (o.clone(), self.morphisms[i].id.clone()))
                .collect(),
            compose,
        }
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_name(&self, a: usize) -> &str {
        &self.objects[a]
    }

    pub fn morphism_name(&self, f: usize) -> &str {
        &self.morphisms[f].id
    }

    pub fn object_id(&self, name: &str) -> Result<usize> {
        self.object_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn morphism_id(&self, name: &str) -> Result<usize> {
        self.morphism_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownMorphism(name.to_string()))
    }

    pub fn dom(&self, f: usize) -> usize {
        self.morphisms[f].dom
    }

    pub fn cod(&self, f: usize) -> usize {
        self.morphisms[f].cod
    }

    pub fn identity(&self, a: usize) -> usize {
        self.identities[a]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.dom(f)] == f
    }

    /// `g∘f`, or `None` when `cod f ≠ dom g`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g * self.morphisms.len() + f]
    }

    /// `g∘f` for a pair known to be composable.
    pub fn comp(&self, g: usize, f: usize) -> usize {
        self.compose(g, f).unwrap_or_else(|| {
            panic!(
                "{} and {} are not composable",
                self.morphism_name(g),
                self.morphism_name(f)
            )
        })
    }

    /// Morphisms `a → b`, in index order.
    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.homs[a][b]
    }

    /// Position of `f` inside `hom(dom f, cod f)`.
    pub fn hom_position(&self, f: usize) -> usize {
        self.hom_pos[f]
    }

    fn morphisms_from(&self, a: usize) -> impl Iterator<Item = &usize> {
        self.homs[a].iter().flatten()
    }

    /// Dual category: same identifiers, domain and codomain swapped.
    pub fn opposite(&self) -> FinCat {
        let m = self.morphisms.len();
        let morphisms = self
            .morphisms
            .iter()
            .map(|mor| Morphism {
                id: mor.id.clone(),
                dom: mor.cod,
                cod: mor.dom,
            })
            .collect();
        let mut compose = vec![None; m * m];
        for g in 0..m {
            for f in 0..m {
                compose[g * m + f] = self.compose[f * m + g];
            }
        }
        Self::assemble(
            self.objects.clone(),
            morphisms,
            self.identities.clone(),
            compose,
            self.object_index.clone(),
            self.morphism_index.clone(),
        )
    }

    /// Connected components of the underlying graph, as sorted object lists.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut ds = DisjointSets::new(self.num_objects());
        for mor in &self.morphisms {
            ds.union(mor.dom, mor.cod);
        }
        let (labels, k) = ds.labels();
        let mut comps = vec![Vec::new(); k];
        for (a, &l) in labels.iter().enumerate() {
            comps[l].push(a);
        }
        comps
    }

    /// Full subcategory on the named objects.
    pub fn full_subcategory(&self, objects: &[&str]) -> Result<FinCat> {
        let keep: Vec<usize> = objects
            .iter()
            .map(|o| self.object_id(o))
            .collect::<Result<_>>()?;
        let kept = |f: usize| keep.contains(&self.dom(f)) && keep.contains(&self.cod(f));
        let mut raw = RawCategory::default();
        for &a in &keep {
            raw.objects.push(self.objects[a].clone());
            raw.identities.insert(
                self.objects[a].clone(),
                self.morphism_name(self.identity(a)).to_string(),
            );
        }
        for f in (0..self.num_morphisms()).filter(|&f| kept(f)) {
            raw.morphisms.push(RawMorphism {
                id: self.morphism_name(f).to_string(),
                dom: self.objects[self.dom(f)].clone(),
                cod: self.objects[self.cod(f)].clone(),
            });
            for &g in self.morphisms_from(self.cod(f)) {
                if kept(g) {
                    raw.compose.push([
                        self.morphism_name(g).to_string(),
                        self.morphism_name(f).to_string(),
                        self.morphism_name(self.comp(g, f)).to_string(),
                    ]);
                }
            }
        }
        FinCat::new(raw)
    }
}

/// `n` objects and identities only.
pub fn discrete(n: usize) -> FinCat {
    let mut raw = RawCategory::default();
    for i in 0..n {
        let o = padded("x", i, n);
        let id = format!("id_{o}");
        raw.morphisms.push(RawMorphism {
            id: id.clone(),
            dom: o.clone(),
            cod: o.clone(),
        });
        raw.compose.push([id.clone(), id.clone(), id.clone()]);
        raw.identities.insert(o.clone(), id);
        raw.objects.push(o);
    }
    FinCat::new(raw).expect("discrete category is valid")
}

/// One-object category of a monoid given by its multiplication table, where
/// `table[g][f]` is the composite `g∘f`. Elements are named `m0, m1, ...`.
pub fn from_monoid(table: &[Vec<usize>], unit: usize) -> Result<FinCat> {
    let n = table.len();
    let names: Vec<String> = (0..n).map(|i| padded("m", i, n)).collect();
    from_monoid_named(&names, table, unit)
}

pub fn from_monoid_named(names: &[String], table: &[Vec<usize>], unit: usize) -> Result<FinCat> {
    let n = table.len();
    let mut report = ValidationReport::ok();
    if names.len() != n || table.iter().any(|row| row.len() != n) {
        report.push("structure", vec![], "multiplication table is not square");
    } else if unit >= n {
        report.push(
            "identity",
            vec![unit.to_string()],
            "unit index out of range",
        );
    } else if table.iter().flatten().any(|&x| x >= n) {
        report.push("totality", vec![], "table entry out of range");
    } else {
        for x in 0..n {
            if table[unit][x] != x || table[x][unit] != x {
                report.push("identity", vec![names[x].clone()], "unit law fails");
            }
        }
    }
    if !report.is_ok() {
        return Err(Error::InvalidCategory(report));
    }
    let obj = "*".to_string();
    let mut raw = RawCategory {
        objects: vec![obj.clone()],
        ..Default::default()
    };
    raw.identities.insert(obj.clone(), names[unit].clone());
    for (g, row) in table.iter().enumerate() {
        raw.morphisms.push(RawMorphism {
            id: names[g].clone(),
            dom: obj.clone(),
            cod: obj.clone(),
        });
        for (f, &gf) in row.iter().enumerate() {
            raw.compose
                .push([names[g].clone(), names[f].clone(), names[gf].clone()]);
        }
    }
    FinCat::new(raw)
}

/// Thin category of a preorder: one morphism `a<=b` exactly when `leq[a][b]`.
pub fn from_order_matrix(names: &[String], leq: &[Vec<bool>]) -> Result<FinCat> {
    let n = names.len();
    let mor = |a: usize, b: usize| format!("{}<={}", names[a], names[b]);
    let mut raw = RawCategory {
        objects: names.to_vec(),
        ..Default::default()
    };
    for a in 0..n {
        raw.identities.insert(names[a].clone(), mor(a, a));
        for b in 0..n {
            if !leq[a][b] {
                continue;
            }
            raw.morphisms.push(RawMorphism {
                id: mor(a, b),
                dom: names[a].clone(),
                cod: names[b].clone(),
            });
            for c in 0..n {
                if leq[b][c] {
                    raw.compose.push([mor(b, c), mor(a, b), mor(a, c)]);
                }
            }
        }
    }
    FinCat::new(raw)
}

/// The poset as a thin category.
pub fn from_poset(p: &crate::order::FinPoset) -> FinCat {
    p.to_category()
}

/// Poset on `x0, x1, ...` generated by the given strict relations.
pub fn from_poset_relation(n: usize, less: &[(usize, usize)]) -> Result<FinCat> {
    let names: Vec<String> = (0..n).map(|i| padded("x", i, n)).collect();
    let mut leq = vec![vec![false; n]; n];
    for (a, row) in leq.iter_mut().enumerate() {
        row[a] = true;
    }
    for &(a, b) in less {
        leq[a][b] = true;
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if leq[a][k] && leq[k][b] {
                    leq[a][b] = true;
                }
            }
        }
    }
    from_order_matrix(&names, &leq)
}

/// Adjoins an object `z` with two parallel families of maps `p0_i, p1_i: z → i`
/// compatible with every map of `i`; `z` has no endomorphisms but its identity.
pub fn adjoin_pair_object(base: &FinCat) -> FinCat {
    let taken = |s: &str| base.object_id(s).is_ok() || base.morphism_id(s).is_ok();
    let z = fresh_name("z", taken);
    let id_z = fresh_name(&format!("id_{z}"), taken);
    let leg = |eps: u8, i: usize| fresh_name(&format!("p{eps}_{}", base.object_name(i)), taken);
    let mut raw = base.to_raw();
    raw.objects.push(z.clone());
    raw.identities.insert(z.clone(), id_z.clone());
    raw.morphisms.push(RawMorphism {
        id: id_z.clone(),
        dom: z.clone(),
        cod: z.clone(),
    });
    raw.compose.push([id_z.clone(), id_z.clone(), id_z.clone()]);
    for i in 0..base.num_objects() {
        for eps in 0..2 {
            let p = leg(eps, i);
            raw.morphisms.push(RawMorphism {
                id: p.clone(),
                dom: z.clone(),
                cod: base.object_name(i).to_string(),
            });
            raw.compose.push([p.clone(), id_z.clone(), p.clone()]);
            for j in 0..base.num_objects() {
                for &u in base.hom(i, j) {
                    raw.compose
                        .push([base.morphism_name(u).to_string(), p.clone(), leg(eps, j)]);
                }
            }
        }
    }
    FinCat::new(raw).expect("adjoined pair object yields a valid category")
}

/// Adjoins a fresh initial object `bot` and a fresh terminal object `top`.
pub fn adjoin_initial_terminal(base: &FinCat) -> FinCat {
    let taken = |s: &str| base.object_id(s).is_ok() || base.morphism_id(s).is_ok();
    let bot = fresh_name("bot", taken);
    let top = fresh_name("top", taken);
    let from_bot = |o: &str| fresh_name(&format!("!{bot}_{o}"), taken);
    let to_top = |o: &str| fresh_name(&format!("!{o}_{top}"), taken);
    let mut raw = base.to_raw();
    let mut all_objects = raw.objects.clone();
    all_objects.push(bot.clone());
    all_objects.push(top.clone());
    // Morphism out of bot into o, and into top out of o, with bot -> top shared.
    let out_of_bot = |o: &str| {
        if o == bot {
            format!("id_{bot}")
        } else if o == top {
            format!("!{bot}_{top}")
        } else {
            from_bot(o)
        }
    };
    let into_top = |o: &str| {
        if o == top {
            format!("id_{top}")
        } else if o == bot {
            format!("!{bot}_{top}")
        } else {
            to_top(o)
        }
    };
    raw.objects.push(bot.clone());
    raw.objects.push(top.clone());
    raw.identities.insert(bot.clone(), out_of_bot(&bot));
    raw.identities.insert(top.clone(), into_top(&top));
    for o in &all_objects {
        raw.morphisms.push(RawMorphism {
            id: out_of_bot(o),
            dom: bot.clone(),
            cod: o.clone(),
        });
        if *o != bot {
            raw.morphisms.push(RawMorphism {
                id: into_top(o),
                dom: o.clone(),
                cod: top.clone(),
            });
        }
    }
    // Every composite through an adjoined object is forced.
    let mut entries = Vec::new();
    for o in &all_objects {
        let dom_is_new = |d: &str| d == bot || d == top;
        // g ∘ (bot -> o) for every g out of o.
        let outs: Vec<(String, String)> = if dom_is_new(o) {
            if *o == bot {
                all_objects
                    .iter()
                    .map(|t| (out_of_bot(t), t.clone()))
                    .collect()
            } else {
                vec![(into_top(&top), top.clone())]
            }
        } else {
            let a = base.object_id(o).unwrap();
            let mut v: Vec<(String, String)> = (0..base.num_objects())
                .flat_map(|b| {
                    base.hom(a, b).iter().map(move |&g| {
                        (
                            base.morphism_name(g).to_string(),
                            base.object_name(b).to_string(),
                        )
                    })
                })
                .collect();
            v.push((into_top(o), top.clone()));
            v
        };
        for (g, t) in &outs {
            entries.push([g.clone(), out_of_bot(o), out_of_bot(t)]);
        }
        // (o -> top) ∘ f for every f into o, other than those out of bot.
        if *o != bot {
            let ins: Vec<(String, String)> = if *o == top {
                all_objects
                    .iter()
                    .filter(|s| **s != bot)
                    .map(|s| (into_top(s), s.clone()))
                    .collect()
            } else {
                let b = base.object_id(o).unwrap();
                (0..base.num_objects())
                    .flat_map(|a| {
                        base.hom(a, b).iter().map(move |&f| {
                            (
                                base.morphism_name(f).to_string(),
                                base.object_name(a).to_string(),
                            )
                        })
                    })
                    .collect()
            };
            for (f, s) in &ins {
                entries.push([into_top(o), f.clone(), into_top(s)]);
            }
        }
    }
    entries.sort();
    entries.dedup();
    raw.compose.extend(entries);
    FinCat::new(raw).expect("adjoining initial and terminal objects yields a valid category")
}

/// A partial bijection between `{0..m}` and `{0..n}` as sorted (input, output) pairs.
pub type PartialBijection = Vec<(usize, usize)>;

pub fn partial_bijection_name(m: usize, n: usize, map: &PartialBijection) -> String {
    let pairs: Vec<String> = map.iter().map(|(i, j)| format!("{i}>{j}")).collect();
    format!("p{m}{n}[{}]", pairs.join(","))
}

/// All partial bijections from an `m`-element set to an `n`-element set.
pub fn partial_bijections_between(m: usize, n: usize) -> Vec<PartialBijection> {
    fn go(
        i: usize,
        m: usize,
        n: usize,
        used: &mut Vec<bool>,
        cur: &mut PartialBijection,
        out: &mut Vec<PartialBijection>,
    ) {
        if i == m {
            out.push(cur.clone());
            return;
        }
        go(i + 1, m, n, used, cur, out);
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push((i, j));
                go(i + 1, m, n, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, m, n, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// `g∘f` for partial bijections.
pub fn compose_partial(g: &PartialBijection, f: &PartialBijection) -> PartialBijection {
    let mut out: PartialBijection = f
        .iter()
        .filter_map(|&(i, j)| g.iter().find(|&&(k, _)| k == j).map(|&(_, l)| (i, l)))
        .collect();
    out.sort();
    out
}

/// The category of sets `s0, s1, ..., s{max}` (where `sK` has `K` elements)
/// and partial bijections between them.
pub fn partial_bijections(max: usize) -> FinCat {
    let obj = |k: usize| format!("s{k}");
    let mut raw = RawCategory::default();
    for m in 0..=max {
        raw.objects.push(obj(m));
        let id: PartialBijection = (0..m).map(|i| (i, i)).collect();
        raw.identities
            .insert(obj(m), partial_bijection_name(m, m, &id));
    }
    let all: Vec<Vec<Vec<PartialBijection>>> = (0..=max)
        .map(|m| {
            (0..=max)
                .map(|n| partial_bijections_between(m, n))
                .collect()
        })
        .collect();
    for m in 0..=max {
        for n in 0..=max {
            for f in &all[m][n] {
                raw.morphisms.push(RawMorphism {
                    id: partial_bijection_name(m, n, f),
                    dom: obj(m),
                    cod: obj(n),
                });
                for k in 0..=max {
                    for g in &all[n][k] {
                        raw.compose.push([
                            partial_bijection_name(n, k, g),
                            partial_bijection_name(m, n, f),
                            partial_bijection_name(m, k, &compose_partial(g, f)),
                        ]);
                    }
                }
            }
        }
    }
    FinCat::new(raw).expect("partial bijections form a category")
}

/// A functor between finite categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinFunctor {
    pub source: Arc<FinCat>,
    pub target: Arc<FinCat>,
    pub object_map: Vec<usize>,
    pub morphism_map: Vec<usize>,
}

impl FinFunctor {
    /// Builds and validates a functor from index maps.
    pub fn new(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        object_map: Vec<usize>,
        morphism_map: Vec<usize>,
    ) -> Result<Self> {
        let f = Self {
            source,
            target,
            object_map,
            morphism_map,
        };
        let report = f.validate();
        if report.is_ok() {
            Ok(f)
        } else {
            Err(Error::InvalidCategory(report))
        }
    }

    /// The functor sending every object and morphism of `source` to the
    /// one of the same name in `target`.
    pub fn inclusion(source: Arc<FinCat>, target: Arc<FinCat>) -> Result<Self> {
        let object_map = (0..source.num_objects())
            .map(|a| target.object_id(source.object_name(a)))
            .collect::<Result<Vec<_>>>()?;
        let morphism_map = (0..source.num_morphisms())
            .map(|f| target.morphism_id(source.morphism_name(f)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, object_map, morphism_map)
    }

    /// Builds a functor from name maps.
    pub fn from_names(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        objects: &BTreeMap<String, String>,
        morphisms: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut object_map = vec![usize::MAX; source.num_objects()];
        for (a, b) in objects {
            object_map[source.object_id(a)?] = target.object_id(b)?;
        }
        let mut morphism_map = vec![usize::MAX; source.num_morphisms()];
        for (f, g) in morphisms {
            morphism_map[source.morphism_id(f)?] = target.morphism_id(g)?;
        }
        // Identities may be left implicit.
        for a in 0..source.num_objects() {
            let id = source.identity(a);
            if morphism_map[id] == usize::MAX && object_map[a] != usize::MAX {
                morphism_map[id] = target.identity(object_map[a]);
            }
        }
        if let Some(a) = object_map.iter().position(|&x| x == usize::MAX) {
            return Err(Error::Precondition(format!(
                "object `{}` is not mapped",
                source.object_name(a)
            )));
        }
        if let Some(f) = morphism_map.iter().position(|&x| x == usize::MAX) {
            return Err(Error::Precondition(format!(
                "morphism `{}` is not mapped",
                source.morphism_name(f)
            )));
        }
        Self::new(source, target, object_map, morphism_map)
    }

    pub fn identity(c: Arc<FinCat>) -> Self {
        Self {
            object_map: (0..c.num_objects()).collect(),
            morphism_map: (0..c.num_morphisms()).collect(),
            source: c.clone(),
            target: c,
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FinFunctor) -> Result<FinFunctor> {
        if *first.target != *self.source {
            return Err(Error::BaseMismatch);
        }
        Ok(FinFunctor {
            source: first.source.clone(),
            target: self.target.clone(),
            object_map: first
                .object_map
                .iter()
                .map(|&a| self.object_map[a])
                .collect(),
            morphism_map: first
                .morphism_map
                .iter()
                .map(|&f| self.morphism_map[f])
                .collect(),
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let (s, t) = (&*self.source, &*self.target);
        let mut report = ValidationReport::ok();
        if self.object_map.len() != s.num_objects()
            || self.morphism_map.len() != s.num_morphisms()
            || self.object_map.iter().any(|&b| b >= t.num_objects())
            || self.morphism_map.iter().any(|&g| g >= t.num_morphisms())
        {
            report.push(
                "structure",
                vec![],
                "maps are not total or point outside the target",
            );
            return report;
        }
        for f in 0..s.num_morphisms() {
            let g = self.morphism_map[f];
            if t.dom(g) != self.object_map[s.dom(f)] || t.cod(g) != self.object_map[s.cod(f)] {
                report.push(
                    "typing",
                    vec![s.morphism_name(f).to_string()],
                    "image does not respect domain and codomain",
                );
            }
        }
        if !report.is_ok() {
            return report;
        }
        for a in 0..s.num_objects() {
            if self.morphism_map[s.identity(a)] != t.identity(self.object_map[a]) {
                report.push(
                    "identity",
                    vec![s.object_name(a).to_string()],
                    "identity not sent to identity",
                );
            }
        }
        for f in 0..s.num_morphisms() {
            for g in 0..s.num_morphisms() {
                if let Some(gf) = s.compose(g, f) {
                    if t.comp(self.morphism_map[g], self.morphism_map[f]) != self.morphism_map[gf] {
                        report.push(
                            "composition",
                            vec![
                                s.morphism_name(g).to_string(),
                                s.morphism_name(f).to_string(),
                            ],
                            "composite not preserved",
                        );
                    }
                }
            }
        }
        report
    }

    /// True if the functor is bijective on objects and on every hom-set.
    pub fn is_isomorphism(&self) -> bool {
        let (s, t) = (&*self.source, &*self.target);
        if s.num_objects() != t.num_objects() || s.num_morphisms() != t.num_morphisms() {
            return false;
        }
        let mut seen_o = vec![false; t.num_objects()];
        for &b in &self.object_map {
            if std::mem::replace(&mut seen_o[b], true) {
                return false;
            }
        }
        let mut seen_m = vec![false; t.num_morphisms()];
        for &g in &self.morphism_map {
            if std::mem::replace(&mut seen_m[g], true) {
                return false;
            }
        }
        true
    }
}

/// A cone with vertex `vertex` over the identity diagram: `legs[i]: vertex → i`
/// with `u∘legs[i] = legs[j]` for every `u: i → j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub vertex: usize,
    pub legs: Vec<usize>,
}

/// Enumerates families `(m_i)` with `m_i ∈ candidates[i]` such that
/// `compatible(u, m_dom(u), m_cod(u))` holds for every morphism `u`.
pub(crate) fn compatible_families(
    c: &FinCat,
    candidates: &[Vec<usize>],
    compatible: impl Fn(usize, usize, usize) -> bool,
) -> Vec<Vec<usize>> {
    fn go(
        c: &FinCat,
        candidates: &[Vec<usize>],
        compatible: &dyn Fn(usize, usize, usize) -> bool,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let k = cur.len();
        if k == candidates.len() {
            out.push(cur.clone());
            return;
        }
        for &m in &candidates[k] {
            cur.push(m);
            let ok = (0..=k).all(|j| {
                c.hom(j, k).iter().all(|&u| compatible(u, cur[j], cur[k]))
                    && c.hom(k, j).iter().all(|&u| compatible(u, cur[k], cur[j]))
            });
            if ok {
                go(c, candidates, compatible, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(c, candidates, &compatible, &mut Vec::new(), &mut out);
    out
}

/// Every cone over the identity functor, from every possible vertex.
pub fn cones_on_identity(c: &FinCat) -> Vec<Cone> {
    let mut cones = Vec::new();
    for k in 0..c.num_objects() {
        let candidates: Vec<Vec<usize>> =
            (0..c.num_objects()).map(|i| c.hom(k, i).to_vec()).collect();
        for legs in compatible_families(c, &candidates, |u, li, lj| c.compose(u, li) == Some(lj)) {
            cones.push(Cone { vertex: k, legs });
        }
    }
    cones
}

/// True if the category admits a cone on its identity functor.
pub fn is_absolute_limit_shape(c: &FinCat) -> bool {
    !cones_on_identity(c).is_empty()
}

/// Searches for an isomorphism of categories `c → d`.
pub fn find_isomorphism(c: &Arc<FinCat>, d: &Arc<FinCat>) -> Option<FinFunctor> {
    let n = c.num_objects();
    if n != d.num_objects() || c.num_morphisms() != d.num_morphisms() {
        return None;
    }
    let signature = |k: &FinCat, a: usize| {
        let mut outs: Vec<usize> = (0..n).map(|b| k.hom(a, b).len()).collect();
        let mut ins: Vec<usize> = (0..n).map(|b| k.hom(b, a).len()).collect();
        outs.sort();
        ins.sort();
        (k.hom(a, a).len(), outs, ins)
    };
    let sig_c: Vec<_> = (0..n).map(|a| signature(c, a)).collect();
    let sig_d: Vec<_> = (0..n).map(|a| signature(d, a)).collect();

    fn objects(
        c: &FinCat,
        d: &FinCat,
        sig_c: &[(usize, Vec<usize>, Vec<usize>)],
        sig_d: &[(usize, Vec<usize>, Vec<usize>)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        let a = map.len();
        if a == c.num_objects() {
            let mut mors = vec![usize::MAX; c.num_morphisms()];
            let mut used_m = vec![false; d.num_morphisms()];
            let order: Vec<usize> = (0..c.num_morphisms()).collect();
            if !morphisms(c, d, map, &order, 0, &mut mors, &mut used_m) {
                return None;
            }
            let mut full = map.clone();
            full.extend(mors);
            return Some(full);
        }
        for b in 0..d.num_objects() {
            if used[b] || sig_c[a] != sig_d[b] {
                continue;
            }
            let consistent = (0..a).all(|x| {
                c.hom(x, a).len() == d.hom(map[x], b).len()
                    && c.hom(a, x).len() == d.hom(b, map[x]).len()
            });
            if !consistent {
                continue;
            }
            used[b] = true;
            map.push(b);
            if let Some(full) = objects(c, d, sig_c, sig_d, map, used) {
                return Some(full);
            }
            map.pop();
            used[b] = false;
        }
        None
    }

    fn morphisms(
        c: &FinCat,
        d: &FinCat,
        omap: &[usize],
        order: &[usize],
        k: usize,
        mors: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let f = order[k];
        let candidates: Vec<usize> = if c.is_identity(f) {
            vec![d.identity(omap[c.dom(f)])]
        } else {
            d.hom(omap[c.dom(f)], omap[c.cod(f)])
                .iter()
                .copied()
                .filter(|&g| !d.is_identity(g))
                .collect()
        };
        for g in candidates {
            if used[g] {
                continue;
            }
            mors[f] = g;
            used[g] = true;
            let ok = (0..=k).all(|i| {
                let h = order[i];
                let a = match c.compose(f, h) {
                    Some(fh) if mors[fh] != usize::MAX => d.comp(mors[f], mors[h]) == mors[fh],
                    _ => true,
                };
                let b = match c.compose(h, f) {
                    Some(hf) if mors[hf] != usize::MAX => d.comp(mors[h], mors[f]) == mors[hf],
                    _ => true,
                };
                a && b
            }) && (0..=k).all(|i| {
                // Composites landing on f itself.
                (0..=k).all(|j| match c.compose(order[i], order[j]) {
                    Some(x) if x == f => d.compose(mors[order[i]], mors[order[j]]) == Some(g),
                    _ => true,
                })
            });
            if ok && morphisms(c, d, omap, order, k + 1, mors, used) {
                return true;
            }
            used[g] = false;
            mors[f] = usize::MAX;
        }
        false
    }

    let mut map = Vec::new();
    let mut used = vec![false; n];
    let full = objects(c, d, &sig_c, &sig_d, &mut map, &mut used)?;
    let (omap, mmap) = full.split_at(n);
    FinFunctor::new(c.clone(), d.clone(), omap.to_vec(), mmap.to_vec()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> FinCat {
        from_monoid(&[vec![0, 1], vec![1, 0]], 0).unwrap()
    }

    #[test]
    fn group_table_is_a_category() {
        let c = c2();
        assert_eq!(c.num_objects(), 1);
        assert_eq!(c.num_morphisms(), 2);
        assert!(validate_category(&c.to_raw()).is_ok());
    }

    #[test]
    fn non_associative_table_is_rejected_with_witness() {
        // Unit 0; 1·1 = 2, 2·2 = 1, 1·2 = 1, 2·1 = 2 breaks associativity.
        let table = vec![vec![0, 1, 2], vec![1, 2, 1], vec![2, 2, 1]];
        match from_monoid(&table, 0) {
            Err(Error::InvalidCategory(report)) => {
                assert!(report.has("associativity"));
                let v = report
                    .violations
                    .iter()
                    .find(|v| v.law == "associativity")
                    .unwrap();
                assert_eq!(v.witness.len(), 3);
            }
            other => panic!("expected associativity failure, got {other:?}"),
        }
    }

    #[test]
    fn missing_composite_is_a_totality_violation() {
        let mut raw = c2().to_raw();
        raw.compose.retain(|[g, f, _]| !(g == "m0" && f == "m1"));
        let report = validate_category(&raw);
        assert!(report.has("totality"));
        assert_eq!(
            report.violations[0].witness,
            vec!["m0".to_string(), "m1".to_string()]
        );
    }

    #[test]
    fn duplicate_and_ill_typed_entries_are_reported() {
        let mut raw = discrete(2).to_raw();
        raw.compose
            .push(["id_x0".into(), "id_x0".into(), "id_x0".into()]);
        raw.compose
            .push(["id_x0".into(), "id_x1".into(), "id_x0".into()]);
        let report = validate_category(&raw);
        assert!(report.has("duplicate"));
        assert!(report.has("typing"));
    }

    #[test]
    fn discrete_shapes() {
        assert_eq!(discrete(0).num_objects(), 0);
        assert_eq!(discrete(0), FinCat::empty());
        let one = discrete(1);
        assert_eq!((one.num_objects(), one.num_morphisms()), (1, 1));
        let three = discrete(3);
        assert_eq!(three.num_morphisms(), 3);
        assert!((0..3).all(|a| three.is_identity(three.identity(a))));
    }

    #[test]
    fn opposite_is_an_involution() {
        for c in [
            c2(),
            discrete(2),
            adjoin_pair_object(&discrete(2)),
            partial_bijections(2),
        ] {
            let op = c.opposite();
            assert!(validate_category(&op.to_raw()).is_ok());
            assert_eq!(op.opposite(), c);
        }
        assert_eq!(discrete(2).opposite(), discrete(2));
    }

    #[test]
    fn opposite_of_arrow_reverses_it() {
        let arrow = adjoin_initial_terminal(&FinCat::empty());
        let f = arrow.morphism_id("!bot_top").unwrap();
        let op = arrow.opposite();
        assert_eq!(op.object_name(op.dom(f)), "top");
        assert_eq!(op.object_name(op.cod(f)), "bot");
    }

    #[test]
    fn adjoined_pair_object_counts() {
        let j = adjoin_pair_object(&discrete(1));
        assert_eq!(j.num_objects(), 2);
        assert_eq!(j.num_morphisms(), 4);
        let j2 = adjoin_pair_object(&discrete(2));
        assert_eq!(j2.num_objects(), 3);
        assert_eq!(j2.num_morphisms(), 2 + 1 + 4);
        let z = j2.object_id("z").unwrap();
        assert_eq!(j2.hom(z, z).len(), 1);
        let j0 = adjoin_pair_object(&FinCat::empty());
        assert_eq!((j0.num_objects(), j0.num_morphisms()), (1, 1));
    }

    #[test]
    fn adjoined_pair_object_keeps_old_homs() {
        let base = c2();
        let j = adjoin_pair_object(&base);
        let old = base.object_id("*").unwrap();
        let new_old = j.object_id("*").unwrap();
        assert_eq!(base.hom(old, old).len(), j.hom(new_old, new_old).len());
        let sub = j.full_subcategory(&["*"]).unwrap();
        assert_eq!(sub, base);
    }

    #[test]
    fn cones_on_identity_examples() {
        assert_eq!(cones_on_identity(&discrete(1)).len(), 1);
        assert!(cones_on_identity(&c2()).is_empty());
        assert!(cones_on_identity(&FinCat::empty()).len() <= 1);
        let arrow = adjoin_initial_terminal(&FinCat::empty());
        let cones = cones_on_identity(&arrow);
        let bot = arrow.object_id("bot").unwrap();
        assert!(cones.iter().any(|k| k.vertex == bot));
    }

    #[test]
    fn partial_bijection_counts() {
        let b = partial_bijections(3);
        let s = |k: usize| b.object_id(&format!("s{k}")).unwrap();
        assert_eq!(b.hom(s(2), s(2)).len(), 7);
        for n in 0..=3 {
            assert_eq!(b.hom(s(2), s(n)).len(), n * n + n + 1);
        }
        assert_eq!(b.num_morphisms(), 90);
    }

    #[test]
    fn isomorphism_search_finds_relabelled_copies() {
        let a = Arc::new(c2());
        let names = vec!["e".to_string(), "t".to_string()];
        let b = Arc::new(from_monoid_named(&names, &[vec![0, 1], vec![1, 0]], 0).unwrap());
        let iso = find_isomorphism(&a, &b).unwrap();
        assert!(iso.is_isomorphism());
        let c3 = Arc::new(from_monoid(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]], 0).unwrap());
        assert!(find_isomorphism(&a, &c3).is_none());
        let idem = Arc::new(from_monoid(&[vec![0, 1], vec![1, 1]], 0).unwrap());
        assert!(find_isomorphism(&a, &idem).is_none());
    }

    #[test]
    fn initial_terminal_adjunction_shape() {
        let c = adjoin_initial_terminal(&discrete(2));
        assert_eq!(c.num_objects(), 4);
        let bot = c.object_id("bot").unwrap();
        let top = c.object_id("top").unwrap();
        for a in 0..4 {
            assert_eq!(c.hom(bot, a).len(), 1);
            assert_eq!(c.hom(a, top).len(), 1);
        }
    }
}
