//! Formal deformation theory on a validated split patch: the deformation
//! map F_Psi as an exponential of Lie derivatives, the pointwise graph
//! criterion, the Maurer-Cartan residual, the order-by-order solver with
//! exact obstruction certificates, and the diagonal P-Lie identity check.
//!
//! Conventions carried here (each pinned by an oracle test rather than
//! asserted): the exponent sign in F_Psi is +1, so that the order-1 graph
//! substitution is y -> y + s(x); the Maurer-Cartan series weights arity n
//! by (-1)^n/n!, which makes "f_psi(s) = mc_residual(-s)" an exact
//! identity.

use num_traits::{One, Zero};

use crate::calibration::{plane_condition, KVectorFrame};
use crate::error::Error;
use crate::forms::{fn_bracket, VectorForm};
use crate::poly::{PatchSplit, Point, Rational};
use crate::vdata::{ell_1, ell_n, iota_l, p_l, Ell1Operator, NormalValuedForm, VData};
use crate::Result;
use std::sync::Arc;

/// Truncated formal section s(eps) = sum_{i>=1} eps^i s_i (s_0 = 0 by
/// definition); every coefficient is a degree-0 normal-valued form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSection {
    split: Arc<PatchSplit>,
    coeffs: Vec<NormalValuedForm>,
}

impl FormalSection {
    pub fn new(split: &Arc<PatchSplit>, coeffs: Vec<NormalValuedForm>) -> Result<FormalSection> {
        for c in &coeffs {
            if c.split() != split {
                return Err(Error::SplitMismatch);
            }
            if c.degree() != 0 {
                return Err(Error::DegreeMismatch(c.degree(), 0));
            }
        }
        Ok(FormalSection {
            split: split.clone(),
            coeffs,
        })
    }

    pub fn zero(split: &Arc<PatchSplit>, order: usize) -> FormalSection {
        FormalSection {
            split: split.clone(),
            coeffs: vec![NormalValuedForm::zero(split, 0); order],
        }
    }

    /// From a single first-order coefficient: s(eps) = eps * s1.
    pub fn linear(s1: NormalValuedForm) -> FormalSection {
        FormalSection {
            split: s1.split().clone(),
            coeffs: vec![s1],
        }
    }

    pub fn split(&self) -> &Arc<PatchSplit> {
        &self.split
    }

    /// Highest stored order.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// s_k (k >= 1); zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> NormalValuedForm {
        assert!(k >= 1, "s_0 = 0 by definition");
        self.coeffs
            .get(k - 1)
            .cloned()
            .unwrap_or_else(|| NormalValuedForm::zero(&self.split, 0))
    }

    pub fn coeffs(&self) -> &[NormalValuedForm] {
        &self.coeffs
    }

    /// The section -s(eps).
    pub fn negated(&self) -> FormalSection {
        FormalSection {
            split: self.split.clone(),
            coeffs: self.coeffs.iter().map(NormalValuedForm::neg).collect(),
        }
    }
}

/// Truncated eps-series of normal-valued forms; index = power of eps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalNormalForm {
    coeffs: Vec<NormalValuedForm>,
}

impl FormalNormalForm {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of eps^k.
    pub fn coeff(&self, k: usize) -> &NormalValuedForm {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[NormalValuedForm] {
        &self.coeffs
    }

    pub fn is_zero_through(&self, order: usize) -> bool {
        self.coeffs[..=order.min(self.order())]
            .iter()
            .all(NormalValuedForm::is_zero)
    }
}

/// Ordered compositions of `k` into positive parts.
fn compositions(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=k {
        for mut rest in compositions(k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: usize) -> Rational {
    let mut f = Rational::one();
    for i in 2..=n {
        f *= Rational::from_integer(i.into());
    }
    f
}

fn check_jet_order(split: &PatchSplit, n: usize) -> Result<()> {
    if (split.jet_order() as usize) < n {
        return Err(Error::InsufficientJetOrder {
            need: n as u32,
            have: split.jet_order(),
        });
    }
    Ok(())
}

/// F_Psi on a formal section, truncated at eps^order:
/// P_L(exp(L_{iota_L(s(eps))}) delta), order-k coefficient assembled from
/// all compositions i_1 + ... + i_j = k weighted 1/j!.
pub fn f_psi(v: &VData, s: &FormalSection, order: usize) -> Result<FormalNormalForm> {
    check_jet_order(v.split(), order)?;
    if s.split() != v.split() {
        return Err(Error::SplitMismatch);
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = NormalValuedForm::zero(v.split(), v.delta().degree());
        for comp in compositions(k) {
            if comp.iter().any(|&i| i > s.order()) {
                continue;
            }
            // innermost Lie derivative is along the last part
            let mut w = v.delta().clone();
            for &i in comp.iter().rev() {
                w = fn_bracket(&iota_l(&s.coeff(i)), &w)?;
            }
            let weight = factorial(comp.len()).recip();
            acc = acc.add(&p_l(&w).scale(&weight))?;
        }
        coeffs.push(acc);
    }
    Ok(FormalNormalForm { coeffs })
}

/// Maurer-Cartan residual MC(s(eps)) = sum_n w_n * (n-ary bracket terms),
/// order-k coefficient = sum over compositions i_1+...+i_n = k of
/// w_n * ell_n(s_{i_1}, ..., s_{i_n}) with w_n = (-1)^n/n!.
pub fn mc_residual(v: &VData, s: &FormalSection, order: usize) -> Result<FormalNormalForm> {
    check_jet_order(v.split(), order)?;
    if s.split() != v.split() {
        return Err(Error::SplitMismatch);
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = NormalValuedForm::zero(v.split(), v.delta().degree());
        for comp in compositions(k) {
            if comp.is_empty() || comp.iter().any(|&i| i > s.order()) {
                continue;
            }
            let args: Vec<NormalValuedForm> = comp.iter().map(|&i| s.coeff(i)).collect();
            let refs: Vec<&NormalValuedForm> = args.iter().collect();
            let n = comp.len();
            let mut weight = factorial(n).recip();
            if n % 2 == 1 {
                weight = -weight;
            }
            acc = acc.add(&ell_n(v, &refs)?.scale(&weight))?;
        }
        coeffs.push(acc);
    }
    Ok(FormalNormalForm { coeffs })
}

/// Pointwise graph criterion: at each base sample, restrict Psi to the
/// graph point (x, s(x)) and test that the graph tangent plane is
/// Psi-invariant.
pub fn graph_check(
    psi: &VectorForm,
    s: &NormalValuedForm,
    base_samples: &[Vec<Rational>],
) -> Result<bool> {
    let split = psi.split();
    if s.split() != split {
        return Err(Error::SplitMismatch);
    }
    if s.degree() != 0 {
        return Err(Error::DegreeMismatch(s.degree(), 0));
    }
    let n_base = split.n_base();
    let n = split.n_vars();
    for base in base_samples {
        if base.len() != n_base {
            return Err(Error::DimensionMismatch {
                expected: n_base,
                got: base.len(),
            });
        }
        let mut coords = base.clone();
        coords.resize(n, Rational::zero());
        let base_point = Point::new(split, coords.clone())?;
        for fi in split.fiber_indices() {
            coords[fi] = s.section_component(fi).eval(&base_point)?;
        }
        let graph_point = Point::new(split, coords)?;
        let mut frame = Vec::with_capacity(n_base);
        for i in split.base_indices() {
            let mut vec = vec![Rational::zero(); n];
            vec[i] = Rational::one();
            for fi in split.fiber_indices() {
                vec[fi] = s.section_component(fi).diff(i)?.eval(&base_point)?;
            }
            frame.push(vec);
        }
        let frame = KVectorFrame::new(frame)?;
        if !plane_condition(psi, &graph_point, &frame)?.passed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact certificate that an order-k Maurer-Cartan residual lies outside
/// the image of the truncated ell_1 matrix.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub solved_through: usize,
    pub order: usize,
    pub residual: NormalValuedForm,
    pub operator_rank: usize,
    pub augmented_rank: usize,
}

/// Outcome of the order-by-order solver. A residual escaping the codomain
/// degree budget is inconclusive, never an obstruction.
#[derive(Debug, Clone)]
pub enum McOutcome {
    Solved(FormalSection),
    Obstructed(ObstructionReport),
    DegreeOverflow { order: usize },
}

/// Solve the formal Maurer-Cartan equation order-by-order with first
/// coefficient `s1`, through eps^order, on base-degree-<=d sections. Each
/// order's solution is the minimal-norm preimage in the monomial basis
/// (the component orthogonal to ker ell_1).
pub fn mc_solve(
    v: &VData,
    s1: &NormalValuedForm,
    order: usize,
    d_bound: u32,
) -> Result<McOutcome> {
    check_jet_order(v.split(), order)?;
    if !ell_1(v, s1)?.is_zero() {
        return Err(Error::Precondition(
            "first coefficient is not an infinitesimal deformation (ell_1(s1) != 0)".into(),
        ));
    }
    let op = crate::vdata::ell1_operator(v, d_bound)?;
    if op.domain_coords(s1).is_none() {
        return Err(Error::Precondition(format!(
            "first coefficient exceeds the degree bound {d_bound}"
        )));
    }
    let mut coeffs = vec![s1.clone()];
    for k in 2..=order {
        let partial = FormalSection::new(v.split(), coeffs.clone())?;
        // order-k residual with s_k = 0; the unknown contributes
        // w_1 * ell_1(s_k) = -ell_1(s_k), so we solve ell_1(s_k) = r_k.
        let r_k = mc_residual(v, &partial, k)?.coeff(k).clone();
        if r_k.is_zero() {
            coeffs.push(NormalValuedForm::zero(v.split(), 0));
            continue;
        }
        let Some(b) = op.codomain_coords(&r_k) else {
            return Ok(McOutcome::DegreeOverflow { order: k });
        };
        let Some(x0) = op.matrix.solve(&b) else {
            let mut aug = crate::linalg::Mat::zeros(op.matrix.n_rows(), op.matrix.n_cols() + 1);
            for i in 0..op.matrix.n_rows() {
                for j in 0..op.matrix.n_cols() {
                    aug[(i, j)] = op.matrix[(i, j)].clone();
                }
                aug[(i, op.matrix.n_cols())] = b[i].clone();
            }
            return Ok(McOutcome::Obstructed(ObstructionReport {
                solved_through: k - 1,
                order: k,
                residual: r_k,
                operator_rank: op.matrix.rank(),
                augmented_rank: aug.rank(),
            }));
        };
        let x = minimal_norm_representative(&op, x0);
        coeffs.push(op.section_from_coords(&x)?);
    }
    Ok(McOutcome::Solved(FormalSection::new(v.split(), coeffs)?))
}

/// Subtract the ker-projection: x - K (K^T K)^{-1} K^T x for K the kernel
/// basis matrix.
fn minimal_norm_representative(op: &Ell1Operator, x: Vec<Rational>) -> Vec<Rational> {
    if op.kernel.is_empty() {
        return x;
    }
    let n = x.len();
    let m = op.kernel.len();
    let mut k = crate::linalg::Mat::zeros(n, m);
    for (j, col) in op.kernel.iter().enumerate() {
        for i in 0..n {
            k[(i, j)] = col[i].clone();
        }
    }
    let kt = k.transpose();
    let gram = kt.mul(&k);
    let ktx = kt.mul_vec(&x);
    let c = gram
        .inverse()
        .expect("kernel basis is independent")
        .mul_vec(&ktx);
    let proj = k.mul_vec(&c);
    x.into_iter().zip(proj).map(|(a, b)| a - b).collect()
}

/// Per-arity verdict of the diagonal identity
/// P(L_{iota xi}^k delta) = +- ell_k(xi, ..., xi).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlieVerdict {
    BothZero,
    /// lhs = ratio * rhs with the exact scalar reported.
    Ratio(Rational),
    Mismatch,
}

pub fn plie_check(v: &VData, xi: &NormalValuedForm, kmax: usize) -> Result<Vec<PlieVerdict>> {
    if kmax < 1 {
        return Err(Error::ArityUnderflow { need: 1, got: kmax });
    }
    check_jet_order(v.split(), kmax)?;
    let mut out = Vec::with_capacity(kmax);
    let lift = iota_l(xi);
    let mut w = v.delta().clone();
    for k in 1..=kmax {
        w = fn_bracket(&lift, &w)?;
        let lhs = p_l(&w);
        let args: Vec<&NormalValuedForm> = std::iter::repeat(xi).take(k).collect();
        let rhs = ell_n(v, &args)?;
        out.push(if lhs.is_zero() && rhs.is_zero() {
            PlieVerdict::BothZero
        } else {
            match lhs.proportionality(&rhs) {
                Some(c) if !c.is_zero() => PlieVerdict::Ratio(c),
                _ => PlieVerdict::Mismatch,
            }
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{j_line_vdata, volume_vdata};
    use crate::forms::PatchMap;
    use crate::poly::{rat, JetPoly};
    use crate::vdata::random_base_poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn holomorphic_s1(v: &VData) -> NormalValuedForm {
        let s = v.split();
        let x1 = JetPoly::var(s, 0);
        let x2 = JetPoly::var(s, 1);
        NormalValuedForm::section(s, 2, x1)
            .unwrap()
            .add(&NormalValuedForm::section(s, 3, x2).unwrap())
            .unwrap()
    }

    #[test]
    fn f_psi_vanishes_on_zero_and_holomorphic_sections() {
        let v = j_line_vdata();
        let zero = FormalSection::zero(v.split(), 3);
        assert!(f_psi(&v, &zero, 3).unwrap().is_zero_through(3));

        let holo = FormalSection::linear(holomorphic_s1(&v));
        assert!(f_psi(&v, &holo, 4).unwrap().is_zero_through(4));

        let non_holo =
            FormalSection::linear(NormalValuedForm::section(v.split(), 2, JetPoly::var(v.split(), 0)).unwrap());
        let f = f_psi(&v, &non_holo, 2).unwrap();
        assert!(!f.coeff(1).is_zero());
        assert_eq!(f.coeff(1), &ell_1(&v, &non_holo.coeff(1)).unwrap());
    }

    #[test]
    fn exponential_matches_vertical_shear_pullback() {
        // P(exp(L_{iota s}) delta) summed over all orders equals the exact
        // pullback of delta by the shear y -> y + s(x).
        for v in [j_line_vdata(), volume_vdata()] {
            let split = v.split();
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            for _ in 0..5 {
                let mut shift = Vec::new();
                let mut terms = Vec::new();
                for fi in split.fiber_indices() {
                    let h = random_base_poly(split, 2, &mut rng);
                    shift.push(h.clone());
                    terms.push((crate::forms::MultiIndex::empty(), fi, h));
                }
                let s = NormalValuedForm::from_terms(split, 0, terms).unwrap();
                let family = FormalSection::linear(s);
                let order = split.jet_order() as usize;
                let series = f_psi(&v, &family, order).unwrap();
                let mut total = NormalValuedForm::zero(split, v.delta().degree());
                for k in 0..=order {
                    total = total.add(series.coeff(k)).unwrap();
                }
                let shear = PatchMap::shear(split, shift).unwrap();
                let direct = p_l(&shear.pullback_vector(v.delta()).unwrap());
                assert_eq!(total, direct);
            }
        }
    }

    #[test]
    fn graph_check_examples() {
        let v = j_line_vdata();
        let split = v.split();
        let samples: Vec<Vec<Rational>> = vec![
            vec![rat(0), rat(0)],
            vec![rat(1), rat(2)],
            vec![rat(-3), rat(5)],
        ];
        let zero = NormalValuedForm::zero(split, 0);
        assert!(graph_check(v.delta(), &zero, &samples).unwrap());
        assert!(graph_check(v.delta(), &holomorphic_s1(&v), &samples).unwrap());
        let bad = NormalValuedForm::section(split, 2, JetPoly::var(split, 0)).unwrap();
        assert!(!graph_check(v.delta(), &bad, &samples).unwrap());
    }

    #[test]
    fn prop_5_5_equivalence_is_an_identity() {
        let v = j_line_vdata();
        let split = v.split();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let coeffs: Vec<NormalValuedForm> = (0..3)
                .map(|_| {
                    let mut terms = Vec::new();
                    for fi in split.fiber_indices() {
                        terms.push((
                            crate::forms::MultiIndex::empty(),
                            fi,
                            random_base_poly(split, 2, &mut rng),
                        ));
                    }
                    NormalValuedForm::from_terms(split, 0, terms).unwrap()
                })
                .collect();
            let s = FormalSection::new(split, coeffs).unwrap();
            let lhs = f_psi(&v, &s, 4).unwrap();
            let rhs = mc_residual(&v, &s.negated(), 4).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn mc_solve_on_cr_kernel_and_precondition() {
        let v = j_line_vdata();
        let s1 = holomorphic_s1(&v);
        match mc_solve(&v, &s1, 4, 2).unwrap() {
            McOutcome::Solved(sec) => {
                assert!(mc_residual(&v, &sec, 4).unwrap().is_zero_through(4));
                for k in 2..=4 {
                    assert!(sec.coeff(k).is_zero());
                }
            }
            other => panic!("expected solved, got {other:?}"),
        }
        let bad = NormalValuedForm::section(v.split(), 2, JetPoly::var(v.split(), 0)).unwrap();
        assert!(matches!(
            mc_solve(&v, &bad, 3, 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn plie_signs_are_consistent() {
        let v = j_line_vdata();
        let split = v.split();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut terms = Vec::new();
            for fi in split.fiber_indices() {
                terms.push((
                    crate::forms::MultiIndex::empty(),
                    fi,
                    random_base_poly(split, 2, &mut rng),
                ));
            }
            let xi = NormalValuedForm::from_terms(split, 0, terms).unwrap();
            for (k, verdict) in plie_check(&v, &xi, 3).unwrap().into_iter().enumerate() {
                match verdict {
                    PlieVerdict::BothZero => {}
                    PlieVerdict::Ratio(c) => {
                        assert_eq!(c, rat(1), "arity {}", k + 1);
                    }
                    PlieVerdict::Mismatch => panic!("P-Lie mismatch at arity {}", k + 1),
                }
            }
        }
    }
}
