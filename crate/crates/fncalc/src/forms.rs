//! Graded exterior calculus on a patch: scalar forms, tangent-valued forms,
//! wedge, exterior derivative, insertions, the derivation L_K = [i_K, d],
//! the Frolicher-Nijenhuis bracket, metric contraction and pullback.
//!
//! The FN bracket is computed by applying the graded commutator of L_K and
//! L_L to the coordinate functions and reading the unique tangent-valued
//! form realizing that derivation, so every identity it satisfies is
//! inherited from the derivation algebra rather than from a transcribed
//! componentwise formula.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::Error;
use crate::linalg::{det, Mat};
use crate::poly::{JetPoly, PatchSplit, Point, Rational};
use crate::Result;

/// Strictly increasing list of variable indices; the empty index is the
/// 0-form slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn empty() -> MultiIndex {
        MultiIndex(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Sorted merge of two disjoint indices with the sign of the shuffle.
    /// Returns `None` when they intersect.
    pub fn merge(&self, other: &MultiIndex) -> Option<(MultiIndex, bool)> {
        let mut inversions = 0usize;
        for &j in &other.0 {
            if self.contains(j) {
                return None;
            }
            inversions += self.0.iter().filter(|&&i| i > j).count();
        }
        let mut merged: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        merged.sort_unstable();
        Some((MultiIndex(merged), inversions % 2 == 1))
    }

    /// Contraction with the coordinate vector `v`: position sign and the
    /// reduced index, or `None` if `v` does not occur.
    pub fn remove(&self, v: usize) -> Option<(MultiIndex, bool)> {
        let pos = self.0.binary_search(&v).ok()?;
        let mut rest = self.0.clone();
        rest.remove(pos);
        Some((MultiIndex(rest), pos % 2 == 1))
    }
}

fn signed(c: JetPoly, negate: bool) -> JetPoly {
    if negate {
        c.neg()
    } else {
        c
    }
}

/// Element of Omega^k(patch); sparse over strictly increasing multi-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarForm {
    split: Arc<PatchSplit>,
    degree: usize,
    terms: BTreeMap<MultiIndex, JetPoly>,
}

impl ScalarForm {
    pub fn zero(split: &Arc<PatchSplit>, degree: usize) -> ScalarForm {
        ScalarForm {
            split: split.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form from a polynomial.
    pub fn from_poly(p: JetPoly) -> ScalarForm {
        let split = p.split().clone();
        ScalarForm::from_terms(&split, 0, vec![(MultiIndex::empty(), p)])
    }

    pub fn from_terms(
        split: &Arc<PatchSplit>,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, JetPoly)>,
    ) -> ScalarForm {
        let mut map: BTreeMap<MultiIndex, JetPoly> = BTreeMap::new();
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "multi-index length != degree");
            if c.is_zero() {
                continue;
            }
            match map.entry(idx) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(&c).expect("same split");
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
        ScalarForm {
            split: split.clone(),
            degree,
            terms: map,
        }
    }

    pub fn split(&self) -> &Arc<PatchSplit> {
        &self.split
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &JetPoly)> {
        self.terms.iter()
    }

    /// Equality that refuses to compare forms of different declared degree.
    pub fn eq_checked(&self, other: &ScalarForm) -> Result<bool> {
        if self.split != other.split {
            return Err(Error::SplitMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(self.terms == other.terms)
    }

    pub fn add(&self, other: &ScalarForm) -> Result<ScalarForm> {
        if self.split != other.split {
            return Err(Error::SplitMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(ScalarForm::from_terms(
            &self.split,
            self.degree,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(i, c)| (i.clone(), c.clone())),
        ))
    }

    pub fn neg(&self) -> ScalarForm {
        ScalarForm {
            split: self.split.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(i, c)| (i.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &ScalarForm) -> Result<ScalarForm> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> ScalarForm {
        if c.is_zero() {
            return ScalarForm::zero(&self.split, self.degree);
        }
        ScalarForm {
            split: self.split.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(i, k)| (i.clone(), k.scale(c))).collect(),
        }
    }

    pub fn scale_poly(&self, p: &JetPoly) -> Result<ScalarForm> {
        let terms = self
            .terms
            .iter()
            .map(|(i, c)| Ok((i.clone(), c.mul(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScalarForm::from_terms(&self.split, self.degree, terms))
    }

    /// Exterior (wedge) product; graded commutative and associative.
    pub fn wedge(&self, other: &ScalarForm) -> Result<ScalarForm> {
        if self.split != other.split {
            return Err(Error::SplitMismatch);
        }
        let deg = self.degree + other.degree;
        let mut out = Vec::new();
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                if let Some((idx, neg)) = ia.merge(ib) {
                    out.push((idx, signed(ca.mul(cb)?, neg)));
                }
            }
        }
        Ok(ScalarForm::from_terms(&self.split, deg, out))
    }

    /// Exterior derivative; d o d = 0 exactly.
    pub fn ext_d(&self) -> ScalarForm {
        let mut out = Vec::new();
        for (idx, c) in &self.terms {
            for v in 0..self.split.n_vars() {
                let dc = c.diff(v).expect("valid var");
                if dc.is_zero() {
                    continue;
                }
                if let Some((merged, neg)) = MultiIndex(vec![v]).merge(idx) {
                    out.push((merged, signed(dc, neg)));
                }
            }
        }
        ScalarForm::from_terms(&self.split, self.degree + 1, out)
    }

    /// Evaluate on a tuple of coordinate vectors at a point.
    pub fn eval_on_vectors(&self, p: &Point, vectors: &[Vec<Rational>]) -> Result<Rational> {
        if vectors.len() != self.degree {
            return Err(Error::ArityMismatch {
                expected: self.degree,
                got: vectors.len(),
            });
        }
        let mut total = Rational::zero();
        for (idx, c) in &self.terms {
            let val = c.eval(p)?;
            if val.is_zero() {
                continue;
            }
            total += val * index_det(idx, vectors);
        }
        Ok(total)
    }
}

/// det of the k x k matrix dx^I applied to the vector tuple.
fn index_det(idx: &MultiIndex, vectors: &[Vec<Rational>]) -> Rational {
    let k = idx.len();
    if k == 0 {
        return Rational::from_integer(1.into());
    }
    let mut m = Mat::zeros(k, k);
    for (a, v) in vectors.iter().enumerate() {
        for (b, &i) in idx.0.iter().enumerate() {
            m[(a, b)] = v[i].clone();
        }
    }
    det(&m)
}

/// Element of Omega^k(patch, T patch): sparse over (multi-index, direction)
/// pairs. The parity of `degree` drives every graded sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorForm {
    split: Arc<PatchSplit>,
    degree: usize,
    terms: BTreeMap<(MultiIndex, usize), JetPoly>,
}

impl VectorForm {
    pub fn zero(split: &Arc<PatchSplit>, degree: usize) -> VectorForm {
        VectorForm {
            split: split.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        split: &Arc<PatchSplit>,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, usize, JetPoly)>,
    ) -> VectorForm {
        let mut map: BTreeMap<(MultiIndex, usize), JetPoly> = BTreeMap::new();
        for (idx, dir, c) in terms {
            assert_eq!(idx.len(), degree, "multi-index length != degree");
            if c.is_zero() {
                continue;
            }
            match map.entry((idx, dir)) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(&c).expect("same split");
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
        VectorForm {
            split: split.clone(),
            degree,
            terms: map,
        }
    }

    /// A coordinate vector field (degree-0 vector form).
    pub fn coordinate_field(split: &Arc<PatchSplit>, dir: usize) -> VectorForm {
        VectorForm::from_terms(
            split,
            0,
            vec![(MultiIndex::empty(), dir, JetPoly::one(split))],
        )
    }

    /// `form (x) direction` tensor term.
    pub fn tensor(form: &ScalarForm, dir: usize) -> VectorForm {
        VectorForm::from_terms(
            form.split(),
            form.degree(),
            form.terms().map(|(i, c)| (i.clone(), dir, c.clone())),
        )
    }

    pub fn split(&self) -> &Arc<PatchSplit> {
        &self.split
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(MultiIndex, usize), &JetPoly)> {
        self.terms.iter()
    }

    pub fn eq_checked(&self, other: &VectorForm) -> Result<bool> {
        if self.split != other.split {
            return Err(Error::SplitMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(self.terms == other.terms)
    }

    pub fn add(&self, other: &VectorForm) -> Result<VectorForm> {
        if self.split != other.split {
            return Err(Error::SplitMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(VectorForm::from_terms(
            &self.split,
            self.degree,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|((i, d), c)| (i.clone(), *d, c.clone())),
        ))
    }

    pub fn neg(&self) -> VectorForm {
        VectorForm {
            split: self.split.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &VectorForm) -> Result<VectorForm> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> VectorForm {
        if c.is_zero() {
            return VectorForm::zero(&self.split, self.degree);
        }
        VectorForm {
            split: self.split.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(k, p)| (k.clone(), p.scale(c)))
                .collect(),
        }
    }

    /// The scalar form picking out one value direction.
    pub fn component(&self, dir: usize) -> ScalarForm {
        ScalarForm::from_terms(
            &self.split,
            self.degree,
            self.terms
                .iter()
                .filter(|((_, d), _)| *d == dir)
                .map(|((i, _), c)| (i.clone(), c.clone())),
        )
    }

    /// Pointwise fully antisymmetric multilinear evaluation; the result is a
    /// tangent vector in coordinates.
    pub fn eval_on_vectors(
        &self,
        p: &Point,
        vectors: &[Vec<Rational>],
    ) -> Result<Vec<Rational>> {
        if vectors.len() != self.degree {
            return Err(Error::ArityMismatch {
                expected: self.degree,
                got: vectors.len(),
            });
        }
        let n = self.split.n_vars();
        let mut out = vec![Rational::zero(); n];
        for ((idx, dir), c) in &self.terms {
            let val = c.eval(p)?;
            if val.is_zero() {
                continue;
            }
            out[*dir] += val * index_det(idx, vectors);
        }
        Ok(out)
    }
}

/// Insertion derivation i_K applied to a scalar form:
/// i_{alpha (x) X} beta = alpha ^ (i_X beta), extended bilinearly. A
/// degree-0 K acts as classical contraction with a vector field.
pub fn insert(k: &VectorForm, b: &ScalarForm) -> Result<ScalarForm> {
    if k.split() != b.split() {
        return Err(Error::SplitMismatch);
    }
    let out_deg = (k.degree() + b.degree()).checked_sub(1);
    let Some(out_deg) = out_deg else {
        // both degree 0: i_X of a function is 0
        return Ok(ScalarForm::zero(b.split(), 0));
    };
    let mut out = Vec::new();
    for ((ik, dir), ck) in k.terms() {
        for (ib, cb) in b.terms() {
            let Some((reduced, neg_pos)) = ib.remove(*dir) else {
                continue;
            };
            let Some((merged, neg_merge)) = ik.merge(&reduced) else {
                continue;
            };
            out.push((merged, signed(ck.mul(cb)?, neg_pos ^ neg_merge)));
        }
    }
    Ok(ScalarForm::from_terms(b.split(), out_deg, out))
}

/// The derivation L_K = [i_K, d] on scalar forms:
/// L_K b = i_K(db) - (-1)^(deg K - 1) d(i_K b).
pub fn lie_deriv(k: &VectorForm, b: &ScalarForm) -> Result<ScalarForm> {
    let first = insert(k, &b.ext_d())?;
    if k.degree() == 0 && b.degree() == 0 {
        // i_X f = 0 identically; only the Cartan first term survives
        return Ok(first);
    }
    let second = insert(k, b)?.ext_d();
    // (-1)^(deg K - 1): negative exactly when deg K is even
    if k.degree() % 2 == 0 {
        first.add(&second)
    } else {
        first.sub(&second)
    }
}

/// Frolicher-Nijenhuis bracket. The graded commutator
/// D = L_K L_L - (-1)^(deg K deg L) L_L L_K commutes with d, so it is L_M
/// for a unique M; the j-th component of M is D(x^j).
pub fn fn_bracket(k: &VectorForm, l: &VectorForm) -> Result<VectorForm> {
    if k.split() != l.split() {
        return Err(Error::SplitMismatch);
    }
    let split = k.split();
    let deg = k.degree() + l.degree();
    let sign_neg = (k.degree() * l.degree()) % 2 == 1;
    let mut terms = Vec::new();
    for j in 0..split.n_vars() {
        let coord = ScalarForm::from_poly(JetPoly::var(split, j));
        let kl = lie_deriv(k, &lie_deriv(l, &coord)?)?;
        let lk = lie_deriv(l, &lie_deriv(k, &coord)?)?;
        let component = if sign_neg { kl.add(&lk)? } else { kl.sub(&lk)? };
        for (idx, c) in component.terms() {
            terms.push((idx.clone(), j, c.clone()));
        }
    }
    Ok(VectorForm::from_terms(split, deg, terms))
}

/// Constant-coefficient metric on the patch with its exact inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstMetric {
    g: Mat,
    ginv: Mat,
}

impl ConstMetric {
    pub fn new(g: Mat) -> Result<ConstMetric> {
        if g.n_rows() != g.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: g.n_rows(),
                got: g.n_cols(),
            });
        }
        let n = g.n_rows();
        for i in 0..n {
            for j in 0..i {
                if g[(i, j)] != g[(j, i)] {
                    return Err(Error::AsymmetricMetric);
                }
            }
        }
        let ginv = g.inverse().ok_or(Error::SingularMetric)?;
        Ok(ConstMetric { g, ginv })
    }

    pub fn euclidean(n: usize) -> ConstMetric {
        ConstMetric {
            g: Mat::identity(n),
            ginv: Mat::identity(n),
        }
    }

    pub fn diagonal(entries: Vec<Rational>) -> Result<ConstMetric> {
        let n = entries.len();
        let mut g = Mat::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            g[(i, i)] = e;
        }
        ConstMetric::new(g)
    }

    pub fn dim(&self) -> usize {
        self.g.n_rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.g[(i, j)]
    }

    pub fn inverse_entry(&self, i: usize, j: usize) -> &Rational {
        &self.ginv[(i, j)]
    }

    pub fn inner(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if !a[i].is_zero() && !b[j].is_zero() {
                    acc += &a[i] * &self.g[(i, j)] * &b[j];
                }
            }
        }
        acc
    }
}

/// Metric contraction: phi-hat = sum g^{ij} (i_{d/dx^i} phi) (x) d/dx^j,
/// dropping the degree by one.
pub fn hat(phi: &ScalarForm, g: &ConstMetric) -> Result<VectorForm> {
    let n = phi.split().n_vars();
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.dim(),
        });
    }
    let deg = phi
        .degree()
        .checked_sub(1)
        .ok_or_else(|| Error::Precondition("cannot contract a 0-form".into()))?;
    let mut terms = Vec::new();
    for (idx, c) in phi.terms() {
        for &i in &idx.0 {
            let (reduced, neg) = idx.remove(i).expect("member");
            for j in 0..n {
                let gij = g.inverse_entry(i, j);
                if gij.is_zero() {
                    continue;
                }
                terms.push((reduced.clone(), j, signed(c.scale(gij), neg)));
            }
        }
    }
    Ok(VectorForm::from_terms(phi.split(), deg, terms))
}

/// Invertible patch map in one of the two supported classes.
#[derive(Debug, Clone)]
pub enum PatchMap {
    /// x -> A x on all coordinates, with the exact inverse cached.
    Linear {
        split: Arc<PatchSplit>,
        matrix: Mat,
        inverse: Mat,
    },
    /// Vertical shear x -> x, y -> y + h(x) with base-only h.
    Shear {
        split: Arc<PatchSplit>,
        shift: Vec<JetPoly>,
    },
}

impl PatchMap {
    pub fn linear(split: &Arc<PatchSplit>, matrix: Mat) -> Result<PatchMap> {
        if matrix.n_rows() != split.n_vars() || matrix.n_cols() != split.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: split.n_vars(),
                got: matrix.n_rows(),
            });
        }
        let inverse = matrix.inverse().ok_or(Error::SingularMap)?;
        Ok(PatchMap::Linear {
            split: split.clone(),
            matrix,
            inverse,
        })
    }

    /// `shift[r]` is the base-only polynomial added to the r-th fiber
    /// variable.
    pub fn shear(split: &Arc<PatchSplit>, shift: Vec<JetPoly>) -> Result<PatchMap> {
        if shift.len() != split.n_fiber() {
            return Err(Error::DimensionMismatch {
                expected: split.n_fiber(),
                got: shift.len(),
            });
        }
        for h in &shift {
            if h.split() != split {
                return Err(Error::SplitMismatch);
            }
            if !h.is_base_only() {
                return Err(Error::Precondition(
                    "shear shift must be base-only".into(),
                ));
            }
        }
        Ok(PatchMap::Shear {
            split: split.clone(),
            shift,
        })
    }

    pub fn split(&self) -> &Arc<PatchSplit> {
        match self {
            PatchMap::Linear { split, .. } | PatchMap::Shear { split, .. } => split,
        }
    }

    pub fn inverse_map(&self) -> PatchMap {
        match self {
            PatchMap::Linear {
                split,
                matrix,
                inverse,
            } => PatchMap::Linear {
                split: split.clone(),
                matrix: inverse.clone(),
                inverse: matrix.clone(),
            },
            PatchMap::Shear { split, shift } => PatchMap::Shear {
                split: split.clone(),
                shift: shift.iter().map(JetPoly::neg).collect(),
            },
        }
    }

    /// Composition with the map applied to coefficient functions.
    fn substitute_coef(&self, p: &JetPoly) -> Result<JetPoly> {
        let split = self.split();
        match self {
            PatchMap::Linear { matrix, .. } => {
                let images: Vec<(usize, JetPoly)> = (0..split.n_vars())
                    .map(|t| {
                        let mut img = JetPoly::zero(split);
                        for s in 0..split.n_vars() {
                            let a = &matrix[(t, s)];
                            if !a.is_zero() {
                                img = img.add(&JetPoly::var(split, s).scale(a))?;
                            }
                        }
                        Ok((t, img))
                    })
                    .collect::<Result<Vec<_>>>()?;
                p.subst(&images)
            }
            PatchMap::Shear { shift, .. } => {
                let images: Vec<(usize, JetPoly)> = split
                    .fiber_indices()
                    .enumerate()
                    .map(|(r, fi)| {
                        Ok((fi, JetPoly::var(split, fi).add(&shift[r])?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                p.subst(&images)
            }
        }
    }

    /// Pullback of the coordinate 1-form `dx^v` as a degree-1 scalar form.
    fn pull_oneform(&self, v: usize) -> ScalarForm {
        let split = self.split();
        match self {
            PatchMap::Linear { matrix, .. } => ScalarForm::from_terms(
                split,
                1,
                (0..split.n_vars()).map(|s| {
                    (
                        MultiIndex(vec![s]),
                        JetPoly::constant(split, matrix[(v, s)].clone()),
                    )
                }),
            ),
            PatchMap::Shear { shift, .. } => {
                let mut terms = vec![(MultiIndex(vec![v]), JetPoly::one(split))];
                if split.is_fiber(v) {
                    let r = v - split.n_base();
                    for b in split.base_indices() {
                        let d = shift[r].diff(b).expect("valid var");
                        if !d.is_zero() {
                            terms.push((MultiIndex(vec![b]), d));
                        }
                    }
                }
                ScalarForm::from_terms(split, 1, terms)
            }
        }
    }

    /// Components of (T f)^{-1} applied to the coordinate direction `d`.
    fn pull_direction(&self, d: usize) -> Vec<JetPoly> {
        let split = self.split();
        match self {
            PatchMap::Linear { inverse, .. } => (0..split.n_vars())
                .map(|s| JetPoly::constant(split, inverse[(s, d)].clone()))
                .collect(),
            PatchMap::Shear { shift, .. } => {
                let mut out = vec![JetPoly::zero(split); split.n_vars()];
                out[d] = JetPoly::one(split);
                if d < split.n_base() {
                    for (r, fi) in split.fiber_indices().enumerate() {
                        let dh = shift[r].diff(d).expect("valid var");
                        if !dh.is_zero() {
                            out[fi] = dh.neg();
                        }
                    }
                }
                out
            }
        }
    }

    /// Usual pullback of a scalar form.
    pub fn pullback_scalar(&self, b: &ScalarForm) -> Result<ScalarForm> {
        if b.split() != self.split() {
            return Err(Error::SplitMismatch);
        }
        let split = self.split();
        let mut acc = ScalarForm::zero(split, b.degree());
        for (idx, c) in b.terms() {
            let mut form = ScalarForm::from_poly(self.substitute_coef(c)?);
            for &v in &idx.0 {
                form = form.wedge(&self.pull_oneform(v))?;
            }
            acc = acc.add(&form)?;
        }
        Ok(acc)
    }

    /// Pullback of a tangent-valued form: conjugation by the tangent map.
    pub fn pullback_vector(&self, k: &VectorForm) -> Result<VectorForm> {
        if k.split() != self.split() {
            return Err(Error::SplitMismatch);
        }
        let split = self.split();
        let mut acc = VectorForm::zero(split, k.degree());
        for ((idx, dir), c) in k.terms() {
            let mut form = ScalarForm::from_poly(self.substitute_coef(c)?);
            for &v in &idx.0 {
                form = form.wedge(&self.pull_oneform(v))?;
            }
            let dirs = self.pull_direction(*dir);
            for (s, comp) in dirs.iter().enumerate() {
                if comp.is_zero() {
                    continue;
                }
                acc = acc.add(&VectorForm::tensor(&form.scale_poly(comp)?, s))?;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    fn flat(n: usize) -> Arc<PatchSplit> {
        PatchSplit::flat((1..=n).map(|i| format!("x{i}")).collect())
    }

    fn dx(split: &Arc<PatchSplit>, idx: &[usize]) -> ScalarForm {
        ScalarForm::from_terms(
            split,
            idx.len(),
            vec![(MultiIndex(idx.to_vec()), JetPoly::one(split))],
        )
    }

    #[test]
    fn wedge_basics() {
        let s = flat(3);
        let d12 = dx(&s, &[0]).wedge(&dx(&s, &[1])).unwrap();
        assert_eq!(d12, dx(&s, &[0, 1]));
        assert!(dx(&s, &[0]).wedge(&dx(&s, &[0])).unwrap().is_zero());
        let x1 = JetPoly::var(&s, 0);
        let lhs = dx(&s, &[0]).scale_poly(&x1).unwrap().wedge(&dx(&s, &[1])).unwrap();
        assert_eq!(lhs, dx(&s, &[0, 1]).scale_poly(&x1).unwrap());
        // graded commutativity on 1-forms
        let ab = dx(&s, &[0]).wedge(&dx(&s, &[2])).unwrap();
        let ba = dx(&s, &[2]).wedge(&dx(&s, &[0])).unwrap();
        assert_eq!(ab, ba.neg());
    }

    #[test]
    fn ext_d_basics() {
        let s = flat(3);
        let x1 = JetPoly::var(&s, 0);
        let f = dx(&s, &[1]).scale_poly(&x1).unwrap();
        assert_eq!(f.ext_d(), dx(&s, &[0, 1]));
        assert!(ScalarForm::from_poly(JetPoly::constant(&s, rat(5)))
            .ext_d()
            .is_zero());
        let p = x1.pow(2).mul(&JetPoly::var(&s, 1)).unwrap();
        assert!(ScalarForm::from_poly(p).ext_d().ext_d().is_zero());
    }

    #[test]
    fn insertion_examples() {
        let s = flat(3);
        // i_{dx1 (x) d2}(dx2) = dx1
        let k = VectorForm::tensor(&dx(&s, &[0]), 1);
        assert_eq!(insert(&k, &dx(&s, &[1])).unwrap(), dx(&s, &[0]));
        // i_{dx1 (x) d2}(dx3) = 0
        assert!(insert(&k, &dx(&s, &[2])).unwrap().is_zero());
        // 0-form insertion vanishes for deg K >= 1
        let f = ScalarForm::from_poly(JetPoly::var(&s, 0));
        assert!(insert(&k, &f).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let s = flat(3);
        let d1 = VectorForm::coordinate_field(&s, 0);
        let x1 = JetPoly::var(&s, 0);
        let b = dx(&s, &[1]).scale_poly(&x1).unwrap();
        assert_eq!(lie_deriv(&d1, &b).unwrap(), dx(&s, &[1]));
        // L_K f = i_K df for 0-forms
        let k = VectorForm::tensor(&dx(&s, &[0]), 0);
        let f = ScalarForm::from_poly(x1.clone());
        assert_eq!(
            lie_deriv(&k, &f).unwrap(),
            insert(&k, &f.ext_d()).unwrap()
        );
        assert_eq!(lie_deriv(&k, &f).unwrap(), dx(&s, &[0]));
    }

    #[test]
    fn fn_bracket_is_vector_field_bracket_in_degree_zero() {
        let s = flat(2);
        let x1 = JetPoly::var(&s, 0);
        let x2 = JetPoly::var(&s, 1);
        // X = x1 d1, Y = x2 d1 + x1^2 d2
        let x_field = VectorForm::tensor(&ScalarForm::from_poly(x1.clone()), 0);
        let y_field = VectorForm::tensor(&ScalarForm::from_poly(x2.clone()), 0)
            .add(&VectorForm::tensor(&ScalarForm::from_poly(x1.pow(2)), 1))
            .unwrap();
        let bracket = fn_bracket(&x_field, &y_field).unwrap();
        // classical coordinate formula X^i d_i Y^j - Y^i d_i X^j
        let mut expect = VectorForm::zero(&s, 0);
        for j in 0..2 {
            let xc = [x1.clone(), JetPoly::zero(&s)];
            let yc = [x2.clone(), x1.pow(2)];
            let mut comp = JetPoly::zero(&s);
            for i in 0..2 {
                comp = comp
                    .add(&xc[i].mul(&yc[j].diff(i).unwrap()).unwrap())
                    .unwrap()
                    .sub(&yc[i].mul(&xc[j].diff(i).unwrap()).unwrap())
                    .unwrap();
            }
            expect = expect
                .add(&VectorForm::tensor(&ScalarForm::from_poly(comp), j))
                .unwrap();
        }
        assert_eq!(bracket, expect);
    }

    #[test]
    fn fn_bracket_constant_inputs_vanish() {
        let s = flat(4);
        let k = VectorForm::tensor(&dx(&s, &[0]), 1);
        let l = VectorForm::tensor(&dx(&s, &[1, 2]), 3);
        assert!(fn_bracket(&k, &l).unwrap().is_zero());
    }

    #[test]
    fn fn_bracket_tensor_lie_derivative() {
        let s = flat(3);
        let d1 = VectorForm::coordinate_field(&s, 0);
        let x1 = JetPoly::var(&s, 0);
        let l = VectorForm::tensor(&dx(&s, &[1]).scale_poly(&x1).unwrap(), 2);
        let expect = VectorForm::tensor(&dx(&s, &[1]), 2);
        assert_eq!(fn_bracket(&d1, &l).unwrap(), expect);
    }

    #[test]
    fn hat_examples() {
        let s = flat(4);
        let g = ConstMetric::euclidean(4);
        let h = hat(&dx(&s, &[0]), &g).unwrap();
        assert_eq!(h, VectorForm::coordinate_field(&s, 0));

        let omega = dx(&s, &[0, 1]).add(&dx(&s, &[2, 3])).unwrap();
        let h = hat(&omega, &g).unwrap();
        let expect = VectorForm::tensor(&dx(&s, &[1]), 0)
            .sub(&VectorForm::tensor(&dx(&s, &[0]), 1))
            .unwrap()
            .add(&VectorForm::tensor(&dx(&s, &[3]), 2))
            .unwrap()
            .sub(&VectorForm::tensor(&dx(&s, &[2]), 3))
            .unwrap();
        assert_eq!(h, expect);

        let mut entries = vec![rat(1); 4];
        entries[0] = rat(4);
        let g4 = ConstMetric::diagonal(entries).unwrap();
        let h = hat(&dx(&s, &[0]), &g4).unwrap();
        assert_eq!(
            h,
            VectorForm::coordinate_field(&s, 0).scale(&ratio(1, 4))
        );
    }

    #[test]
    fn pullback_scaling_field() {
        let s = flat(2);
        let two = Mat::from_rows(vec![
            vec![rat(2), rat(0)],
            vec![rat(0), rat(2)],
        ]);
        let f = PatchMap::linear(&s, two).unwrap();
        let d1 = VectorForm::coordinate_field(&s, 0);
        assert_eq!(
            f.pullback_vector(&d1).unwrap(),
            d1.scale(&ratio(1, 2))
        );
        let id = PatchMap::linear(&s, Mat::identity(2)).unwrap();
        let k = VectorForm::tensor(&dx(&s, &[1]), 0);
        assert_eq!(id.pullback_vector(&k).unwrap(), k);
    }

    #[test]
    fn eval_on_vectors_examples() {
        let s = flat(4);
        let k = VectorForm::tensor(&dx(&s, &[0]), 1);
        let p = Point::origin(&s);
        let e1 = vec![rat(1), rat(0), rat(0), rat(0)];
        let got = k.eval_on_vectors(&p, &[e1.clone()]).unwrap();
        assert_eq!(got, vec![rat(0), rat(1), rat(0), rat(0)]);
        // alternating: dependent tuple gives zero
        let w = dx(&s, &[0, 1]);
        let v = vec![rat(1), rat(2), rat(0), rat(0)];
        let got = w.eval_on_vectors(&p, &[v.clone(), v.clone()]).unwrap();
        assert!(got.is_zero());
        let kv = k.eval_on_vectors(&p, &[vec![rat(0), rat(0), rat(1), rat(0)]]).unwrap();
        assert!(kv.iter().all(|x| x.is_zero()));
    }
}
