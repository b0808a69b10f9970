//! Sparse exact-rational multivariate polynomials with a base/fiber variable
//! split and fiber-jet truncation. These are the coefficient "functions" of
//! everything else in the crate: base dependence is fully polynomial, fiber
//! dependence is kept only up to total degree `jet_order`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

/// Exact rational scalar. Always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Build a rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Build a rational from numerator and denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Coordinate patch: ordered base variables (coordinates on L), ordered
/// fiber variables (linear fiber coordinates on NL) and the fiber-jet
/// truncation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchSplit {
    base_vars: Vec<String>,
    fiber_vars: Vec<String>,
    jet_order: u32,
}

impl PatchSplit {
    pub fn new<S: Into<String>>(
        base: Vec<S>,
        fiber: Vec<S>,
        jet_order: u32,
    ) -> Result<Arc<PatchSplit>> {
        let base_vars: Vec<String> = base.into_iter().map(Into::into).collect();
        let fiber_vars: Vec<String> = fiber.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for v in base_vars.iter().chain(fiber_vars.iter()) {
            if !seen.insert(v.clone()) {
                return Err(Error::Precondition(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Arc::new(PatchSplit {
            base_vars,
            fiber_vars,
            jet_order,
        }))
    }

    /// A purely base patch (no fiber variables, truncation inert).
    pub fn flat<S: Into<String>>(vars: Vec<S>) -> Arc<PatchSplit> {
        PatchSplit::new(vars, Vec::new(), 0).expect("flat patch")
    }

    pub fn n_base(&self) -> usize {
        self.base_vars.len()
    }

    pub fn n_fiber(&self) -> usize {
        self.fiber_vars.len()
    }

    pub fn n_vars(&self) -> usize {
        self.base_vars.len() + self.fiber_vars.len()
    }

    pub fn jet_order(&self) -> u32 {
        self.jet_order
    }

    pub fn is_fiber(&self, idx: usize) -> bool {
        idx >= self.base_vars.len()
    }

    /// All variable names, base first.
    pub fn var_names(&self) -> impl Iterator<Item = &str> {
        self.base_vars
            .iter()
            .chain(self.fiber_vars.iter())
            .map(|s| s.as_str())
    }

    pub fn var_name(&self, idx: usize) -> &str {
        if idx < self.base_vars.len() {
            &self.base_vars[idx]
        } else {
            &self.fiber_vars[idx - self.base_vars.len()]
        }
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.var_names()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn base_indices(&self) -> std::ops::Range<usize> {
        0..self.base_vars.len()
    }

    pub fn fiber_indices(&self) -> std::ops::Range<usize> {
        self.base_vars.len()..self.n_vars()
    }
}

/// Exponent vector, ordered graded-lexicographically in the declared
/// variable order. The dense array keeps canonical forms trivial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn fiber_degree(&self, split: &PatchSplit) -> u32 {
        self.0[split.base_indices().end..].iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over the patch, truncated in fiber degree. Stored
/// canonically: no zero coefficients, no term above the jet order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JetPoly {
    split: Arc<PatchSplit>,
    terms: BTreeMap<Monomial, Rational>,
}

impl JetPoly {
    pub fn zero(split: &Arc<PatchSplit>) -> JetPoly {
        JetPoly {
            split: split.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(split: &Arc<PatchSplit>, c: Rational) -> JetPoly {
        let mut p = JetPoly::zero(split);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; split.n_vars()]), c);
        }
        p
    }

    pub fn one(split: &Arc<PatchSplit>) -> JetPoly {
        JetPoly::constant(split, Rational::one())
    }

    /// The variable with index `idx`.
    pub fn var(split: &Arc<PatchSplit>, idx: usize) -> JetPoly {
        let mut exp = vec![0; split.n_vars()];
        exp[idx] = 1;
        JetPoly::from_terms(split, vec![(Monomial(exp), Rational::one())])
    }

    pub fn var_named(split: &Arc<PatchSplit>, name: &str) -> Result<JetPoly> {
        Ok(JetPoly::var(split, split.var_index(name)?))
    }

    /// Build from raw terms, normalizing: sums duplicates, drops zeros and
    /// everything above the fiber-jet order.
    pub fn from_terms(
        split: &Arc<PatchSplit>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> JetPoly {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            if split.n_fiber() > 0 && m.fiber_degree(split) > split.jet_order() {
                continue;
            }
            let entry = map.entry(m).or_insert_with(Rational::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        JetPoly {
            split: split.clone(),
            terms: map,
        }
    }

    pub fn split(&self) -> &Arc<PatchSplit> {
        &self.split
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial(vec![0; self.split.n_vars()]))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Largest total degree in base variables (0 for the zero polynomial).
    pub fn base_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.0[self.split.base_indices()].iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Largest total degree in fiber variables.
    pub fn fiber_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.fiber_degree(&self.split))
            .max()
            .unwrap_or(0)
    }

    /// True when no monomial involves a fiber variable.
    pub fn is_base_only(&self) -> bool {
        self.fiber_degree() == 0
    }

    fn check_split(&self, other: &JetPoly) -> Result<()> {
        if self.split == other.split {
            Ok(())
        } else {
            Err(Error::SplitMismatch)
        }
    }

    pub fn add(&self, other: &JetPoly) -> Result<JetPoly> {
        self.check_split(other)?;
        Ok(JetPoly::from_terms(
            &self.split,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(m, c)| (m.clone(), c.clone())),
        ))
    }

    pub fn neg(&self) -> JetPoly {
        JetPoly {
            split: self.split.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &JetPoly) -> Result<JetPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> JetPoly {
        if c.is_zero() {
            return JetPoly::zero(&self.split);
        }
        JetPoly {
            split: self.split.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Exact product followed by fiber-jet truncation.
    pub fn mul(&self, other: &JetPoly) -> Result<JetPoly> {
        self.check_split(other)?;
        let mut acc: Vec<(Monomial, Rational)> = Vec::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                acc.push((ma.mul(mb), ca * cb));
            }
        }
        Ok(JetPoly::from_terms(&self.split, acc))
    }

    pub fn pow(&self, n: u32) -> JetPoly {
        let mut acc = JetPoly::one(&self.split);
        for _ in 0..n {
            acc = acc.mul(self).expect("same split");
        }
        acc
    }

    /// Exact formal partial derivative. Differentiation never raises fiber
    /// degree, so truncation is preserved automatically.
    pub fn diff(&self, var: usize) -> Result<JetPoly> {
        if var >= self.split.n_vars() {
            return Err(Error::UnknownVariable(format!("#{var}")));
        }
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.0[var];
            if e == 0 {
                return None;
            }
            let mut exp = m.0.clone();
            exp[var] -= 1;
            Some((Monomial(exp), c * rat(e as i64)))
        });
        Ok(JetPoly::from_terms(&self.split, terms.collect::<Vec<_>>()))
    }

    pub fn diff_named(&self, name: &str) -> Result<JetPoly> {
        self.diff(self.split.var_index(name)?)
    }

    /// Exact evaluation at a point covering every variable.
    pub fn eval(&self, pt: &Point) -> Result<Rational> {
        if pt.split != self.split {
            return Err(Error::SplitMismatch);
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (idx, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    v *= &pt.coords[idx];
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Substitute variables by polynomials over the same split, then
    /// truncate. Variables missing from `map` stay themselves.
    pub fn subst(&self, map: &[(usize, JetPoly)]) -> Result<JetPoly> {
        for (_, img) in map {
            self.check_split(img)?;
        }
        let images: Vec<Option<&JetPoly>> = (0..self.split.n_vars())
            .map(|i| map.iter().find(|(v, _)| *v == i).map(|(_, p)| p))
            .collect();
        let mut total = JetPoly::zero(&self.split);
        for (m, c) in &self.terms {
            let mut term = JetPoly::constant(&self.split, c.clone());
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = match images[idx] {
                    Some(p) => p.pow(e),
                    None => JetPoly::var(&self.split, idx).pow(e),
                };
                term = term.mul(&factor)?;
            }
            total = total.add(&term)?;
        }
        Ok(total)
    }

    /// Restriction to the zero section: drop every monomial that involves a
    /// fiber variable.
    pub fn at_zero_section(&self) -> JetPoly {
        JetPoly {
            split: self.split.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.fiber_degree(&self.split) == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest grlex term first
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = self.split.var_name(i);
                    if e == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A rational point of the patch, covering every variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    split: Arc<PatchSplit>,
    coords: Vec<Rational>,
}

impl Point {
    pub fn new(split: &Arc<PatchSplit>, coords: Vec<Rational>) -> Result<Point> {
        if coords.len() != split.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: split.n_vars(),
                got: coords.len(),
            });
        }
        Ok(Point {
            split: split.clone(),
            coords,
        })
    }

    pub fn origin(split: &Arc<PatchSplit>) -> Point {
        Point {
            split: split.clone(),
            coords: vec![Rational::zero(); split.n_vars()],
        }
    }

    pub fn from_named(split: &Arc<PatchSplit>, coords: &[(String, Rational)]) -> Result<Point> {
        let mut vals = vec![None; split.n_vars()];
        for (name, v) in coords {
            vals[split.var_index(name)?] = Some(v.clone());
        }
        let coords = vals
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingCoordinate(split.var_name(i).to_string())))
            .collect::<Result<Vec<_>>>()?;
        Point::new(split, coords)
    }

    pub fn split(&self) -> &Arc<PatchSplit> {
        &self.split
    }

    pub fn coord(&self, idx: usize) -> &Rational {
        &self.coords[idx]
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// True when every fiber coordinate vanishes.
    pub fn on_zero_section(&self) -> bool {
        self.split
            .fiber_indices()
            .all(|i| self.coords[i].is_zero())
    }
}
