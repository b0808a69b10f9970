//! V-data on a split patch (the zero section of a normal-bundle chart) and
//! the induced L-infinity multibrackets: the vertical lift iota_L, the
//! zero-section projection P_L, axiom validation, the multibrackets ell_n,
//! the exact matrix of ell_1 on truncated polynomial sections, and the
//! principal symbol.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;

use crate::error::Error;
use crate::forms::{fn_bracket, MultiIndex, VectorForm};
use crate::linalg::Mat;
use crate::poly::{rat, JetPoly, Monomial, PatchSplit, Point, Rational};
use crate::Result;

/// Element of Omega^k(L, NL): base-only multi-indices, base-only
/// coefficients, fiber-direction values. Degree 0 elements are the sections
/// of NL that parameterize deformations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalValuedForm {
    split: Arc<PatchSplit>,
    degree: usize,
    terms: BTreeMap<(MultiIndex, usize), JetPoly>,
}

impl NormalValuedForm {
    pub fn zero(split: &Arc<PatchSplit>, degree: usize) -> NormalValuedForm {
        NormalValuedForm {
            split: split.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        split: &Arc<PatchSplit>,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, usize, JetPoly)>,
    ) -> Result<NormalValuedForm> {
        let mut map: BTreeMap<(MultiIndex, usize), JetPoly> = BTreeMap::new();
        for (idx, dir, c) in terms {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch(idx.len(), degree));
            }
            if idx.0.iter().any(|&v| split.is_fiber(v)) {
                return Err(Error::Precondition(
                    "normal-valued form index must use base variables only".into(),
                ));
            }
            if !split.is_fiber(dir) {
                return Err(Error::Precondition(
                    "normal-valued form direction must be a fiber variable".into(),
                ));
            }
            if !c.is_base_only() {
                return Err(Error::Precondition(
                    "normal-valued form coefficient must be base-only".into(),
                ));
            }
            if c.is_zero() {
                continue;
            }
            match map.entry((idx, dir)) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(&c)?;
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
        Ok(NormalValuedForm {
            split: split.clone(),
            degree,
            terms: map,
        })
    }

    /// A degree-0 section `poly * d/dy^dir`.
    pub fn section(
        split: &Arc<PatchSplit>,
        dir: usize,
        poly: JetPoly,
    ) -> Result<NormalValuedForm> {
        NormalValuedForm::from_terms(split, 0, vec![(MultiIndex::empty(), dir, poly)])
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

    pub fn add(&self, other: &NormalValuedForm) -> Result<NormalValuedForm> {
        if self.split != other.split {
            return Err(Error::SplitMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        NormalValuedForm::from_terms(
            &self.split,
            self.degree,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|((i, d), c)| (i.clone(), *d, c.clone())),
        )
    }

    pub fn neg(&self) -> NormalValuedForm {
        NormalValuedForm {
            split: self.split.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &NormalValuedForm) -> Result<NormalValuedForm> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> NormalValuedForm {
        if c.is_zero() {
            return NormalValuedForm::zero(&self.split, self.degree);
        }
        NormalValuedForm {
            split: self.split.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(k, p)| (k.clone(), p.scale(c)))
                .collect(),
        }
    }

    /// Multiply every coefficient by a base-only polynomial.
    pub fn scale_poly(&self, p: &JetPoly) -> Result<NormalValuedForm> {
        if !p.is_base_only() {
            return Err(Error::Precondition(
                "scaling polynomial must be base-only".into(),
            ));
        }
        NormalValuedForm::from_terms(
            &self.split,
            self.degree,
            self.terms
                .iter()
                .map(|((i, d), c)| Ok((i.clone(), *d, c.mul(p)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// The base-only component polynomial of a degree-0 section in fiber
    /// direction `dir`.
    pub fn section_component(&self, dir: usize) -> JetPoly {
        self.terms
            .get(&(MultiIndex::empty(), dir))
            .cloned()
            .unwrap_or_else(|| JetPoly::zero(&self.split))
    }

    /// Largest base degree among coefficients.
    pub fn max_coeff_degree(&self) -> u32 {
        self.terms
            .values()
            .map(JetPoly::base_degree)
            .max()
            .unwrap_or(0)
    }

    /// Exact proportionality constant `c` with `self = c * other`, if one
    /// exists (`None` for incompatible shapes; `Some(0)` when self is zero).
    pub fn proportionality(&self, other: &NormalValuedForm) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if other.is_zero() || self.degree != other.degree {
            return None;
        }
        let (key, lhs) = self.terms.iter().next().expect("nonzero");
        let rhs = other.terms.get(key)?;
        let (mono, ca) = lhs.terms().next().expect("canonical nonzero");
        let cb = rhs
            .terms()
            .find(|(m, _)| *m == mono)
            .map(|(_, c)| c.clone())?;
        if cb.is_zero() {
            return None;
        }
        let ratio = ca / &cb;
        if self == &other.scale(&ratio) {
            Some(ratio)
        } else {
            None
        }
    }
}

/// Canonical vertical lift: read a normal-valued form as a vertical
/// tangent-valued form on the total patch. Left-inverted by `p_l`.
pub fn iota_l(a: &NormalValuedForm) -> VectorForm {
    VectorForm::from_terms(
        a.split(),
        a.degree(),
        a.terms().map(|((i, d), c)| (i.clone(), *d, c.clone())),
    )
}

/// Zero-section projection: pull the form part back along the zero section
/// (terms whose index touches a fiber variable die, coefficients are
/// restricted to y = 0) and keep only fiber-direction values.
pub fn p_l(w: &VectorForm) -> NormalValuedForm {
    let split = w.split();
    let terms: Vec<(MultiIndex, usize, JetPoly)> = w
        .terms()
        .filter(|((idx, dir), _)| {
            split.is_fiber(*dir) && idx.0.iter().all(|&v| !split.is_fiber(v))
        })
        .map(|((idx, dir), c)| (idx.clone(), *dir, c.at_zero_section()))
        .collect();
    NormalValuedForm::from_terms(split, w.degree(), terms).expect("projection is well-formed")
}

/// V-data on the split patch: the graded Lie algebra is Omega^*(patch, T
/// patch) with the FN bracket, the abelian algebra is Omega^*(L, NL), and
/// `delta` is the odd square-zero element in ker P_L.
#[derive(Debug, Clone)]
pub struct VData {
    split: Arc<PatchSplit>,
    delta: VectorForm,
}

impl VData {
    /// Structural checks only (odd degree, fiber variables present);
    /// the square-zero and ker-P axioms are checked by `vdata_validate`.
    pub fn new(delta: VectorForm) -> Result<VData> {
        if delta.degree() % 2 == 0 {
            return Err(Error::Precondition(format!(
                "V-data element must have odd degree, got {}",
                delta.degree()
            )));
        }
        if delta.split().n_fiber() == 0 {
            return Err(Error::Precondition(
                "V-data patch needs fiber variables".into(),
            ));
        }
        Ok(VData {
            split: delta.split().clone(),
            delta,
        })
    }

    pub fn split(&self) -> &Arc<PatchSplit> {
        &self.split
    }

    pub fn delta(&self) -> &VectorForm {
        &self.delta
    }
}

/// Per-axiom verdicts of `vdata_validate`, with the witnesses for the two
/// axioms about delta echoed back.
#[derive(Debug, Clone)]
pub struct VDataReport {
    /// (i) P o iota = id on sampled a.
    pub p_iota_identity: bool,
    /// (ii) [iota a, iota b]^FN = 0 on sampled pairs.
    pub abelian: bool,
    /// (iii) ker P_L closed under the FN bracket on sampled pairs.
    pub ker_p_closed: bool,
    /// (iv) [delta, delta]^FN = 0.
    pub square_zero: bool,
    /// (v) P_L(delta) = 0.
    pub delta_in_ker: bool,
    pub square: VectorForm,
    pub delta_projection: NormalValuedForm,
}

impl VDataReport {
    pub fn all_pass(&self) -> bool {
        self.p_iota_identity
            && self.abelian
            && self.ker_p_closed
            && self.square_zero
            && self.delta_in_ker
    }
}

/// Random base-only polynomial of total degree <= `deg`, small integer
/// coefficients, for sampling-based axiom checks.
pub fn random_base_poly<R: Rng>(split: &Arc<PatchSplit>, deg: u32, rng: &mut R) -> JetPoly {
    let mut terms: Vec<(Monomial, Rational)> = Vec::new();
    for m in base_monomials(split, deg) {
        if rng.gen_bool(0.6) {
            terms.push((Monomial(m), rat(rng.gen_range(-3..=3))));
        }
    }
    JetPoly::from_terms(split, terms)
}

/// Random polynomial allowed to involve fiber variables up to total fiber
/// degree `fiber_deg` (kept small so jet truncation never engages in the
/// sampled identities).
pub fn random_patch_poly<R: Rng>(
    split: &Arc<PatchSplit>,
    base_deg: u32,
    fiber_deg: u32,
    rng: &mut R,
) -> JetPoly {
    let base = base_monomials(split, base_deg);
    let fiber = fiber_monomials(split, fiber_deg);
    let mut terms = Vec::new();
    for b in &base {
        for f in &fiber {
            if !rng.gen_bool(0.3) {
                continue;
            }
            let exps: Vec<u32> = b.iter().zip(f).map(|(x, y)| x + y).collect();
            terms.push((Monomial(exps), rat(rng.gen_range(-3..=3))));
        }
    }
    JetPoly::from_terms(split, terms)
}

/// Random normal-valued form of the given degree with base degree <= `deg`.
pub fn random_nvform<R: Rng>(
    split: &Arc<PatchSplit>,
    degree: usize,
    deg: u32,
    rng: &mut R,
) -> NormalValuedForm {
    let mut terms = Vec::new();
    for idx in increasing_subsets(&split.base_indices().collect::<Vec<_>>(), degree) {
        for dir in split.fiber_indices() {
            if rng.gen_bool(0.5) {
                terms.push((MultiIndex(idx.clone()), dir, random_base_poly(split, deg, rng)));
            }
        }
    }
    NormalValuedForm::from_terms(split, degree, terms).expect("well-formed by construction")
}

/// Random tangent-valued form with bounded base and fiber coefficient
/// degrees; indices range over all patch variables.
pub fn random_vector_form<R: Rng>(
    split: &Arc<PatchSplit>,
    degree: usize,
    base_deg: u32,
    fiber_deg: u32,
    rng: &mut R,
) -> VectorForm {
    let all: Vec<usize> = (0..split.n_vars()).collect();
    let mut terms = Vec::new();
    for idx in increasing_subsets(&all, degree) {
        for dir in 0..split.n_vars() {
            if rng.gen_bool(0.3) {
                terms.push((
                    MultiIndex(idx.clone()),
                    dir,
                    random_patch_poly(split, base_deg, fiber_deg, rng),
                ));
            }
        }
    }
    VectorForm::from_terms(split, degree, terms)
}

/// Random element of ker P_L: a random form with its iota(P(-)) part
/// subtracted.
pub fn random_ker_p<R: Rng>(
    split: &Arc<PatchSplit>,
    degree: usize,
    base_deg: u32,
    fiber_deg: u32,
    rng: &mut R,
) -> VectorForm {
    let w = random_vector_form(split, degree, base_deg, fiber_deg, rng);
    w.sub(&iota_l(&p_l(&w))).expect("same shape")
}

/// Exact check of the five V-data axioms; (i)-(iii) on `samples` random
/// instances each, (iv)-(v) on delta itself.
pub fn vdata_validate<R: Rng>(v: &VData, samples: usize, rng: &mut R) -> Result<VDataReport> {
    let split = v.split();
    let max_nv_degree = split.n_base().min(2);

    let mut p_iota_identity = true;
    let mut abelian = true;
    let mut ker_p_closed = true;
    for _ in 0..samples {
        let da = rng.gen_range(0..=max_nv_degree);
        let db = rng.gen_range(0..=max_nv_degree);
        let a = random_nvform(split, da, 2, rng);
        let b = random_nvform(split, db, 2, rng);
        if p_l(&iota_l(&a)) != a {
            p_iota_identity = false;
        }
        if !fn_bracket(&iota_l(&a), &iota_l(&b))?.is_zero() {
            abelian = false;
        }
        let w1 = random_ker_p(split, rng.gen_range(0..=2), 2, 1, rng);
        let w2 = random_ker_p(split, rng.gen_range(0..=2), 2, 1, rng);
        if !p_l(&fn_bracket(&w1, &w2)?).is_zero() {
            ker_p_closed = false;
        }
    }

    let square = fn_bracket(&v.delta, &v.delta)?;
    let delta_projection = p_l(&v.delta);
    Ok(VDataReport {
        p_iota_identity,
        abelian,
        ker_p_closed,
        square_zero: square.is_zero(),
        delta_in_ker: delta_projection.is_zero(),
        square,
        delta_projection,
    })
}

/// Voronov multibracket ell_n(a_1..a_n) =
/// (-1)^star P[...[[delta, iota a_1], iota a_2], ..., iota a_n] with
/// star = sum_{i<n} (n-i)|a_i| + n(n+1)/2 and |a| the shifted degree
/// (form degree - 1).
pub fn ell_n(v: &VData, args: &[&NormalValuedForm]) -> Result<NormalValuedForm> {
    let n = args.len();
    if n == 0 {
        return Err(Error::ArityUnderflow { need: 1, got: 0 });
    }
    let mut star: i64 = (n as i64) * (n as i64 + 1) / 2;
    for (i, a) in args.iter().enumerate().take(n - 1) {
        star += (n as i64 - 1 - i as i64) * (a.degree() as i64 - 1);
    }
    let mut acc = v.delta().clone();
    for a in args {
        acc = fn_bracket(&acc, &iota_l(a))?;
    }
    let projected = p_l(&acc);
    Ok(if star.rem_euclid(2) == 1 {
        projected.neg()
    } else {
        projected
    })
}

/// ell_1 on a degree-0 section, the linearized deformation operator.
pub fn ell_1(v: &VData, s: &NormalValuedForm) -> Result<NormalValuedForm> {
    ell_n(v, &[s])
}

/// Exact matrix of ell_1 on the monomial basis of degree-0 sections with
/// base degree <= D, together with its kernel. The codomain allows base
/// degree up to D + E where E is the largest coefficient degree of delta,
/// so no output is ever silently truncated.
#[derive(Debug, Clone)]
pub struct Ell1Operator {
    split: Arc<PatchSplit>,
    /// Domain basis: (base exponent vector, fiber direction).
    pub domain: Vec<(Vec<u32>, usize)>,
    /// Codomain basis: (base multi-index, fiber direction, base exponents).
    pub codomain: Vec<(MultiIndex, usize, Vec<u32>)>,
    codomain_index: BTreeMap<(MultiIndex, usize, Vec<u32>), usize>,
    /// Rows = codomain, columns = domain.
    pub matrix: Mat,
    pub kernel: Vec<Vec<Rational>>,
}

impl Ell1Operator {
    pub fn kernel_dimension(&self) -> usize {
        self.kernel.len()
    }

    pub fn domain_dimension(&self) -> usize {
        self.domain.len()
    }

    /// Rebuild a section from domain coordinates.
    pub fn section_from_coords(&self, coords: &[Rational]) -> Result<NormalValuedForm> {
        if coords.len() != self.domain.len() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.len(),
                got: coords.len(),
            });
        }
        let mut terms = Vec::new();
        for (c, (exps, dir)) in coords.iter().zip(&self.domain) {
            if c.is_zero() {
                continue;
            }
            let poly = JetPoly::from_terms(&self.split, vec![(Monomial(exps.clone()), c.clone())]);
            terms.push((MultiIndex::empty(), *dir, poly));
        }
        NormalValuedForm::from_terms(&self.split, 0, terms)
    }

    /// Coordinates of a section in the domain basis; `None` when a monomial
    /// exceeds the degree bound.
    pub fn domain_coords(&self, s: &NormalValuedForm) -> Option<Vec<Rational>> {
        if s.degree() != 0 {
            return None;
        }
        let mut coords = vec![Rational::zero(); self.domain.len()];
        for ((_, dir), poly) in s.terms() {
            for (mono, c) in poly.terms() {
                let pos = self
                    .domain
                    .iter()
                    .position(|(e, d)| d == dir && *e == mono.0)?;
                coords[pos] = c.clone();
            }
        }
        Some(coords)
    }

    /// Coordinates of a target form in the codomain basis; `None` when a
    /// term falls outside the degree budget (degree overflow).
    pub fn codomain_coords(&self, f: &NormalValuedForm) -> Option<Vec<Rational>> {
        let mut coords = vec![Rational::zero(); self.codomain.len()];
        for ((idx, dir), poly) in f.terms() {
            for (mono, c) in poly.terms() {
                let key = (idx.clone(), *dir, mono.0.clone());
                let pos = *self.codomain_index.get(&key)?;
                coords[pos] = c.clone();
            }
        }
        Some(coords)
    }
}

/// Assemble the exact ell_1 matrix on base-degree-<=D sections.
pub fn ell1_operator(v: &VData, d_bound: u32) -> Result<Ell1Operator> {
    let split = v.split();
    let target_degree = v.delta().degree();
    let e_budget = v
        .delta()
        .terms()
        .map(|(_, c)| c.base_degree())
        .max()
        .unwrap_or(0);

    let mut domain = Vec::new();
    for exps in base_monomials(split, d_bound) {
        for dir in split.fiber_indices() {
            domain.push((exps.clone(), dir));
        }
    }

    let base: Vec<usize> = split.base_indices().collect();
    let mut codomain = Vec::new();
    let mut codomain_index = BTreeMap::new();
    for idx in increasing_subsets(&base, target_degree) {
        for dir in split.fiber_indices() {
            for exps in base_monomials(split, d_bound + e_budget) {
                let key = (MultiIndex(idx.clone()), dir, exps);
                codomain_index.insert(key.clone(), codomain.len());
                codomain.push(key);
            }
        }
    }

    let mut matrix = Mat::zeros(codomain.len(), domain.len());
    for (col, (exps, dir)) in domain.iter().enumerate() {
        let poly = JetPoly::from_terms(split, vec![(Monomial(exps.clone()), rat(1))]);
        let s = NormalValuedForm::section(split, *dir, poly)?;
        let image = ell_1(v, &s)?;
        for ((idx, d), c) in image.terms() {
            for (mono, coeff) in c.terms() {
                let key = (idx.clone(), *d, mono.0.clone());
                let row = *codomain_index.get(&key).ok_or_else(|| {
                    Error::Precondition("ell_1 image escaped the codomain budget".into())
                })?;
                matrix[(row, col)] = coeff.clone();
            }
        }
    }
    let kernel = matrix.kernel_basis();
    Ok(Ell1Operator {
        split: split.clone(),
        domain,
        codomain,
        codomain_index,
        matrix,
        kernel,
    })
}

/// Principal symbol of ell_1 at `p` paired with the base covector `xi`:
/// the exact linear map N_pL -> Lambda^(deg delta) T_p*L (x) N_pL in the
/// coordinate bases. Extracted by the commutator trick
/// A^i v = ell_1(x^i v) - x^i ell_1(v) evaluated at p.
#[derive(Debug, Clone)]
pub struct SymbolMap {
    /// Row labels: (base multi-index, fiber direction).
    pub slots: Vec<(MultiIndex, usize)>,
    /// Rows = slots, columns = fiber directions of the domain.
    pub matrix: Mat,
}

impl SymbolMap {
    pub fn is_injective(&self) -> bool {
        self.matrix.rank() == self.matrix.n_cols()
    }
}

pub fn symbol_at(v: &VData, p: &Point, xi: &[Rational]) -> Result<SymbolMap> {
    let split = v.split();
    if p.split() != split {
        return Err(Error::SplitMismatch);
    }
    if !p.on_zero_section() {
        return Err(Error::OffZeroSection);
    }
    if xi.len() != split.n_base() {
        return Err(Error::DimensionMismatch {
            expected: split.n_base(),
            got: xi.len(),
        });
    }
    let base: Vec<usize> = split.base_indices().collect();
    let slots: Vec<(MultiIndex, usize)> = increasing_subsets(&base, v.delta().degree())
        .into_iter()
        .flat_map(|idx| {
            split
                .fiber_indices()
                .map(move |dir| (MultiIndex(idx.clone()), dir))
        })
        .collect();
    let mut matrix = Mat::zeros(slots.len(), split.n_fiber());
    for (col, r) in split.fiber_indices().enumerate() {
        let v_r = NormalValuedForm::section(split, r, JetPoly::one(split))?;
        let base_image = ell_1(v, &v_r)?;
        for (i, xi_i) in xi.iter().enumerate() {
            if xi_i.is_zero() {
                continue;
            }
            let xv = v_r.scale_poly(&JetPoly::var(split, i))?;
            let principal = ell_1(v, &xv)?.sub(&base_image.scale_poly(&JetPoly::var(split, i))?)?;
            for ((idx, dir), c) in principal.terms() {
                let row = slots
                    .iter()
                    .position(|(si, sd)| si == idx && sd == dir)
                    .expect("slot enumeration is complete");
                let val = c.eval(p)?;
                matrix[(row, col)] += xi_i * val;
            }
        }
    }
    Ok(SymbolMap { slots, matrix })
}

/// All strictly increasing `k`-subsets of `pool`.
pub(crate) fn increasing_subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    if k > pool.len() {
        return Vec::new();
    }
    pool.iter().copied().combinations(k).collect()
}

/// Exponent vectors (over all patch variables, fiber entries zero) of base
/// monomials with total degree <= `max_deg`, in ascending grlex order.
pub(crate) fn base_monomials(split: &Arc<PatchSplit>, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; split.n_vars()];
    fill_monomials(split.n_base(), split.n_vars(), 0, max_deg, &mut current, &mut out);
    out.sort_by_key(|m| (m.iter().sum::<u32>(), m.clone()));
    out
}

fn fiber_monomials(split: &Arc<PatchSplit>, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; split.n_fiber()];
    fill_monomials(split.n_fiber(), split.n_fiber(), 0, max_deg, &mut current, &mut out);
    // widen to full exponent vectors with zero base entries
    out.into_iter()
        .map(|f| {
            let mut full = vec![0u32; split.n_vars()];
            full[split.n_base()..].copy_from_slice(&f);
            full
        })
        .collect()
}

fn fill_monomials(
    n_active: usize,
    width: usize,
    pos: usize,
    budget: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    debug_assert_eq!(current.len(), width);
    if pos == n_active {
        out.push(current.clone());
        return;
    }
    for d in 0..=budget {
        current[pos] = d;
        fill_monomials(n_active, width, pos + 1, budget - d, current, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ScalarForm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn j_split() -> Arc<PatchSplit> {
        PatchSplit::new(vec!["x1", "x2"], vec!["y1", "y2"], 6).unwrap()
    }

    fn dx(split: &Arc<PatchSplit>, idx: &[usize]) -> ScalarForm {
        ScalarForm::from_terms(
            split,
            idx.len(),
            vec![(MultiIndex(idx.to_vec()), JetPoly::one(split))],
        )
    }

    /// J on the split patch: base x-plane and fiber y-plane each a complex
    /// line.
    fn j_std(split: &Arc<PatchSplit>) -> VectorForm {
        VectorForm::tensor(&dx(split, &[0]), 1)
            .sub(&VectorForm::tensor(&dx(split, &[1]), 0))
            .unwrap()
            .add(&VectorForm::tensor(&dx(split, &[2]), 3))
            .unwrap()
            .sub(&VectorForm::tensor(&dx(split, &[3]), 2))
            .unwrap()
    }

    #[test]
    fn projection_inverts_lift() {
        let s = j_split();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for deg in 0..=2 {
            let a = random_nvform(&s, deg, 2, &mut rng);
            assert_eq!(p_l(&iota_l(&a)), a);
        }
    }

    #[test]
    fn projection_kills_tangential_and_fiber_indexed_terms() {
        let s = j_split();
        // d/dx1 as a degree-0 field
        assert!(p_l(&VectorForm::coordinate_field(&s, 0)).is_zero());
        // y1 * dx1 (x) d/dy1 vanishes at y = 0
        let y1 = JetPoly::var(&s, 2);
        let term = VectorForm::tensor(&dx(&s, &[0]).scale_poly(&y1).unwrap(), 2);
        assert!(p_l(&term).is_zero());
        // dy1 (x) d/dy2 has a fiber index
        assert!(p_l(&VectorForm::tensor(&dx(&s, &[2]), 3)).is_zero());
    }

    #[test]
    fn j_line_vdata_validates() {
        let s = j_split();
        let v = VData::new(j_std(&s)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let report = vdata_validate(&v, 8, &mut rng).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn constructed_violations_are_detected() {
        let s = j_split();
        // P delta != 0
        let bad = VData::new(VectorForm::tensor(&dx(&s, &[0]), 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = vdata_validate(&bad, 4, &mut rng).unwrap();
        assert!(!report.delta_in_ker);
        assert!(!report.delta_projection.is_zero());

        // [delta, delta] != 0: delta = x2 dx1 (x) dy1 + y1 dx2 (x) dy2
        let x2 = JetPoly::var(&s, 1);
        let y1 = JetPoly::var(&s, 2);
        let delta = VectorForm::tensor(&dx(&s, &[0]).scale_poly(&x2).unwrap(), 2)
            .add(&VectorForm::tensor(&dx(&s, &[1]).scale_poly(&y1).unwrap(), 3))
            .unwrap();
        let v = VData::new(delta.clone()).unwrap();
        let report = vdata_validate(&v, 4, &mut rng).unwrap();
        assert_eq!(report.square, fn_bracket(&delta, &delta).unwrap());
        assert!(!report.square_zero);
    }

    #[test]
    fn ell1_is_cauchy_riemann_on_j_line() {
        let s = j_split();
        let v = VData::new(j_std(&s)).unwrap();
        // s = x1 d/dy1 is not holomorphic: ell_1 nonzero
        let x1 = JetPoly::var(&s, 0);
        let sec = NormalValuedForm::section(&s, 2, x1.clone()).unwrap();
        let image = ell_1(&v, &sec).unwrap();
        assert!(!image.is_zero());
        // s = x1 d/dy1 + x2 d/dy2 is the graph of z -> z: holomorphic
        let x2 = JetPoly::var(&s, 1);
        let holo = sec
            .add(&NormalValuedForm::section(&s, 3, x2).unwrap())
            .unwrap();
        assert!(ell_1(&v, &holo).unwrap().is_zero());
    }

    #[test]
    fn ell1_kernel_dimension_matches_cr_oracle() {
        let s = j_split();
        let v = VData::new(j_std(&s)).unwrap();
        for d in 0..=3u32 {
            let op = ell1_operator(&v, d).unwrap();
            assert_eq!(op.kernel_dimension(), 2 * (d as usize + 1), "d = {d}");
            // kernel vectors really are annihilated
            for k in &op.kernel {
                let sec = op.section_from_coords(k).unwrap();
                assert!(ell_1(&v, &sec).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn ell2_of_constants_vanishes() {
        let s = j_split();
        let v = VData::new(j_std(&s)).unwrap();
        let a = NormalValuedForm::section(&s, 2, JetPoly::one(&s)).unwrap();
        let b = NormalValuedForm::section(&s, 3, JetPoly::one(&s)).unwrap();
        assert!(ell_n(&v, &[&a, &b]).unwrap().is_zero());
    }

    #[test]
    fn symbol_injective_on_j_line() {
        let s = j_split();
        let v = VData::new(j_std(&s)).unwrap();
        let p = Point::origin(&s);
        let sym = symbol_at(&v, &p, &[rat(1), rat(0)]).unwrap();
        assert!(sym.is_injective());
        assert_eq!(sym.matrix.rank(), 2);
        let zero = symbol_at(&v, &p, &[rat(0), rat(0)]).unwrap();
        assert!(!zero.is_injective());
        assert_eq!(zero.matrix.rank(), 0);

        let off = Point::new(&s, vec![rat(0), rat(0), rat(1), rat(0)]).unwrap();
        assert_eq!(
            symbol_at(&v, &off, &[rat(1), rat(0)]).unwrap_err(),
            Error::OffZeroSection
        );
    }
}
