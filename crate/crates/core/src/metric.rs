//! Conjugacy for finite generalized metric spaces, with exact arithmetic in
//! the extended nonnegative rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result, ValidationReport};
use crate::setfun::Variance;

/// A value in `[0, ∞]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNonnegRational {
    Finite(BigRational),
    Infinite,
}

use ExtNonnegRational::{Finite, Infinite};

impl ExtNonnegRational {
    pub fn zero() -> Self {
        Finite(BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    /// `n / d`; panics on a negative value or zero denominator.
    pub fn ratio(n: i64, d: i64) -> Self {
        let q = BigRational::new(BigInt::from(n), BigInt::from(d));
        assert!(!q.is_negative(), "value must be nonnegative");
        Finite(q)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Finite(q) if q.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Infinite,
        }
    }

    /// Truncated subtraction `self ∸ other`, with `∞ ∸ ∞ = 0`.
    pub fn monus(&self, other: &Self) -> Self {
        match (self, other) {
            (Finite(a), Finite(b)) => {
                if a > b {
                    Finite(a - b)
                } else {
                    Self::zero()
                }
            }
            (Infinite, Finite(_)) => Infinite,
            (_, Infinite) => Self::zero(),
        }
    }
}

impl fmt::Display for ExtNonnegRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infinite => f.write_str("inf"),
            Finite(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Finite(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl FromStr for ExtNonnegRational {
    type Err = Error;

    /// Accepts `inf`, integers, fractions `p/q` and decimals such as `0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not a nonnegative rational or `inf`"));
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Infinite);
        }
        let q = if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        } else if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
            BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()))
        } else {
            BigRational::from_integer(s.parse().map_err(|_| bad())?)
        };
        if q.is_negative() {
            return Err(bad());
        }
        Ok(Finite(q))
    }
}

impl Serialize for ExtNonnegRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtNonnegRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(u64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Finite(BigRational::from_integer(BigInt::from(n)))),
        }
    }
}

type Ext = ExtNonnegRational;

/// Wire form of a generalized metric space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMetric {
    pub points: Vec<String>,
    pub d: Vec<Vec<Ext>>,
    #[serde(default)]
    pub symmetric: bool,
}

/// A finite generalized metric space: distances may be asymmetric, infinite,
/// or zero between distinct points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenMetric {
    points: Vec<String>,
    d: Vec<Vec<Ext>>,
    symmetric: bool,
}

/// Checks zero self-distances, the triangle inequality, and symmetry if claimed.
pub fn validate_metric(raw: &RawMetric) -> ValidationReport {
    let mut report = ValidationReport::ok();
    let n = raw.points.len();
    if raw.d.len() != n || raw.d.iter().any(|row| row.len() != n) {
        report.push(
            "structure",
            vec![],
            "distance matrix is not square over the points",
        );
        return report;
    }
    let p = &raw.points;
    for a in 0..n {
        if !raw.d[a][a].is_zero() {
            report.push("zero", vec![p[a].clone()], "self-distance is not zero");
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if raw.d[a][c] > raw.d[a][b].add(&raw.d[b][c]) {
                    report.push(
                        "triangle",
                        vec![p[a].clone(), p[b].clone(), p[c].clone()],
                        format!("d(a,c) = {} exceeds d(a,b) + d(b,c)", raw.d[a][c]),
                    );
                }
            }
        }
    }
    if raw.symmetric {
        for a in 0..n {
            for b in (a + 1)..n {
                if raw.d[a][b] != raw.d[b][a] {
                    report.push(
                        "symmetry",
                        vec![p[a].clone(), p[b].clone()],
                        "d(a,b) differs from d(b,a)",
                    );
                }
            }
        }
    }
    report
}

impl GenMetric {
    pub fn new(raw: RawMetric) -> Result<Self> {
        validate_metric(&raw).into_result(
            Self {
                points: raw.points,
                d: raw.d,
                symmetric: raw.symmetric,
            },
            Error::InvalidMetric,
        )
    }

    /// The space `{0, D}` with both distances `D`.
    pub fn two_point(d: Ext) -> Self {
        Self::new(RawMetric {
            points: vec!["0".into(), "D".into()],
            d: vec![vec![Ext::zero(), d.clone()], vec![d, Ext::zero()]],
            symmetric: true,
        })
        .expect("two-point space is a metric space")
    }

    pub fn to_raw(&self) -> RawMetric {
        RawMetric {
            points: self.points.clone(),
            d: self.d.clone(),
            symmetric: self.symmetric,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn d(&self, a: usize, b: usize) -> &Ext {
        &self.d[a][b]
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn point_id(&self, name: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }
}

/// A `[0, ∞]`-valued functor on a metric space, as a vector over its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostVector {
    pub space: Arc<GenMetric>,
    pub variance: Variance,
    pub f: Vec<Ext>,
}

/// Wire form of a cost vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCost {
    pub variance: Variance,
    pub f: std::collections::BTreeMap<String, Ext>,
}

/// Contravariant: `f(a) ∸ f(b) ≤ d(a,b)`. Covariant: `f(b) ∸ f(a) ≤ d(a,b)`.
pub fn validate_cost(space: &GenMetric, variance: Variance, f: &[Ext]) -> ValidationReport {
    let mut report = ValidationReport::ok();
    let n = space.len();
    if f.len() != n {
        report.push(
            "structure",
            vec![],
            "vector length differs from the number of points",
        );
        return report;
    }
    for a in 0..n {
        for b in 0..n {
            let (hi, lo) = match variance {
                Variance::Contravariant => (a, b),
                Variance::Covariant => (b, a),
            };
            if f[hi].monus(&f[lo]) > space.d[a][b] {
                report.push(
                    "lipschitz",
                    vec![space.points[a].clone(), space.points[b].clone()],
                    format!("values {} and {} are too far apart", f[a], f[b]),
                );
            }
        }
    }
    report
}

impl CostVector {
    pub fn new(space: Arc<GenMetric>, variance: Variance, f: Vec<Ext>) -> Result<Self> {
        validate_cost(&space, variance, &f)
            .into_result(Self { space, variance, f }, Error::InvalidCost)
    }

    pub fn from_raw(space: Arc<GenMetric>, raw: &RawCost) -> Result<Self> {
        let mut f = vec![None; space.len()];
        for (p, v) in &raw.f {
            f[space.point_id(p)?] = Some(v.clone());
        }
        let f = f
            .into_iter()
            .enumerate()
            .map(|(a, v)| {
                v.ok_or_else(|| Error::Parse(format!("no value for point `{}`", space.points[a])))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, raw.variance, f)
    }

    pub fn to_raw(&self) -> RawCost {
        RawCost {
            variance: self.variance,
            f: self
                .space
                .points
                .iter()
                .cloned()
                .zip(self.f.iter().cloned())
                .collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_cost(&self.space, self.variance, &self.f)
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.f.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `d(−, a)` as a contravariant cost vector.
pub fn yoneda_cost(space: &Arc<GenMetric>, a: usize) -> CostVector {
    CostVector {
        space: space.clone(),
        variance: Variance::Contravariant,
        f: (0..space.len()).map(|b| space.d[b][a].clone()).collect(),
    }
}

/// `d(a, −)` as a covariant cost vector.
pub fn coyoneda_cost(space: &Arc<GenMetric>, a: usize) -> CostVector {
    CostVector {
        space: space.clone(),
        variance: Variance::Covariant,
        f: (0..space.len()).map(|b| space.d[a][b].clone()).collect(),
    }
}

fn max_of(values: impl Iterator<Item = Ext>) -> Ext {
    values.max().unwrap_or_else(Ext::zero)
}

/// `f^∨(a) = max_b d(b,a) ∸ f(b)` for contravariant `f`, and
/// `g^∨(a) = max_b d(a,b) ∸ g(b)` for covariant `g`.
pub fn conj_cost(f: &CostVector) -> CostVector {
    let m = &*f.space;
    let n = m.len();
    let out = (0..n)
        .map(|a| {
            max_of((0..n).map(|b| match f.variance {
                Variance::Contravariant => m.d[b][a].monus(&f.f[b]),
                Variance::Covariant => m.d[a][b].monus(&f.f[b]),
            }))
        })
        .collect();
    CostVector {
        space: f.space.clone(),
        variance: f.variance.flip(),
        f: out,
    }
}

fn require_contra(f: &CostVector) -> Result<()> {
    if f.variance != Variance::Contravariant {
        return Err(Error::VarianceMismatch {
            expected: "contra",
            found: f.variance.name(),
        });
    }
    let report = f.validate();
    if !report.is_ok() {
        return Err(Error::InvalidCost(report));
    }
    Ok(())
}

/// `f^∨∨(c) = max_b min_a d(c,b) ∸ (d(a,b) ∸ f(a))`, checked against two
/// applications of [`conj_cost`].
pub fn double_conj_cost(f: &CostVector) -> Result<CostVector> {
    require_contra(f)?;
    let m = &*f.space;
    let n = m.len();
    let direct: Vec<Ext> = (0..n)
        .map(|c| {
            max_of((0..n).map(|b| {
                (0..n)
                    .map(|a| m.d[c][b].monus(&m.d[a][b].monus(&f.f[a])))
                    .min()
                    .unwrap_or(Infinite)
            }))
        })
        .collect();
    let twice = conj_cost(&conj_cost(f));
    if twice.f != direct {
        return Err(Error::Internal(format!(
            "double conjugate formulas disagree: {} vs {}",
            CostVector {
                f: direct,
                ..f.clone()
            },
            twice
        )));
    }
    Ok(twice)
}

/// True if `f` is fixed by double conjugation.
pub fn is_isbell_point(f: &CostVector) -> Result<bool> {
    Ok(double_conj_cost(f)?.f == f.f)
}

/// True if `f` equals its own conjugate, the variances being identified on a
/// symmetric space.
pub fn is_tight_span_point(f: &CostVector) -> Result<bool> {
    if !f.space.symmetric {
        return Err(Error::NotSymmetric);
    }
    let report = f.validate();
    if !report.is_ok() {
        return Err(Error::InvalidCost(report));
    }
    Ok(conj_cost(f).f == f.f)
}

/// `d(f, g) = max_a g(a) ∸ f(a)`.
pub fn completion_distance(f: &CostVector, g: &CostVector) -> Result<Ext> {
    if *f.space != *g.space {
        return Err(Error::SpaceMismatch);
    }
    if f.variance != g.variance {
        return Err(Error::VarianceMismatch {
            expected: f.variance.name(),
            found: g.variance.name(),
        });
    }
    Ok(max_of(f.f.iter().zip(&g.f).map(|(x, y)| y.monus(x))))
}

/// Pointwise `f ≤ g`.
pub fn pointwise_le(f: &CostVector, g: &CostVector) -> bool {
    f.f.iter()
        .zip(&g.f)
        .all(|(x, y)| x.cmp(y) != Ordering::Greater)
}
