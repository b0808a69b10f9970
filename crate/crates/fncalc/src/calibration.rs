//! Pointwise linear-algebra checks on decomposable k-vectors: the
//! plane-invariance criterion for tangent-valued forms, the first-cousin
//! residual of a calibrated plane, and the Harvey-Lawson identity residual.
//!
//! Frames are unnormalized and all norms squared, so every check is a
//! rational identity.

use itertools::Itertools;
use num_traits::Zero;

use crate::error::Error;
use crate::forms::{ConstMetric, ScalarForm, VectorForm};
use crate::linalg::{dot, gram_det, Mat};
use crate::poly::{Point, Rational};
use crate::Result;

/// An ordered list of k rational vectors spanning (if non-degenerate) a
/// k-plane; `gram_sq` is the Gram determinant, the squared norm of the
/// associated decomposable k-vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KVectorFrame {
    vectors: Vec<Vec<Rational>>,
    gram_sq: Rational,
}

impl KVectorFrame {
    pub fn new(vectors: Vec<Vec<Rational>>) -> Result<KVectorFrame> {
        let dim = vectors.first().map_or(0, Vec::len);
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        let gram_sq = gram_det(&vectors);
        Ok(KVectorFrame { vectors, gram_sq })
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn gram_sq(&self) -> &Rational {
        &self.gram_sq
    }

    pub fn is_degenerate(&self) -> bool {
        self.gram_sq.is_zero()
    }
}

/// Outcome of `plane_condition`: one residual vector per evaluated index
/// subset; `passed` iff all residuals vanish.
#[derive(Debug, Clone)]
pub struct PlaneCheckReport {
    pub passed: bool,
    pub residuals: Vec<(Vec<usize>, Vec<Rational>)>,
}

/// Component of `v` orthogonal to the column span of `frame` (Euclidean),
/// via the exact normal-equations projector. Zero iff `v` is in the span.
fn span_residual(frame: &KVectorFrame, v: &[Rational]) -> Vec<Rational> {
    let k = frame.size();
    let mut gram = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = dot(&frame.vectors[i], &frame.vectors[j]);
        }
    }
    let rhs: Vec<Rational> = (0..k).map(|i| dot(&frame.vectors[i], v)).collect();
    let coeffs = gram.solve(&rhs).expect("non-degenerate frame Gram solve");
    let mut res = v.to_vec();
    for (c, w) in coeffs.iter().zip(&frame.vectors) {
        for (r, x) in res.iter_mut().zip(w) {
            *r -= c * x;
        }
    }
    res
}

/// Tests whether Psi_p maps every (deg Psi)-tuple drawn from the frame back
/// into the span of the frame.
pub fn plane_condition(
    psi: &VectorForm,
    p: &Point,
    frame: &KVectorFrame,
) -> Result<PlaneCheckReport> {
    if frame.is_degenerate() {
        return Err(Error::DegenerateFrame);
    }
    let k = psi.degree();
    if frame.size() < k {
        return Err(Error::ArityUnderflow {
            need: k,
            got: frame.size(),
        });
    }
    if frame.dim() != psi.split().n_vars() {
        return Err(Error::DimensionMismatch {
            expected: psi.split().n_vars(),
            got: frame.dim(),
        });
    }
    let mut residuals = Vec::new();
    let mut passed = true;
    for subset in (0..frame.size()).combinations(k) {
        let tuple: Vec<Vec<Rational>> = subset
            .iter()
            .map(|&i| frame.vectors[i].clone())
            .collect();
        let value = psi.eval_on_vectors(p, &tuple)?;
        let res = span_residual(frame, &value);
        if !res.iter().all(Rational::is_zero) {
            passed = false;
        }
        residuals.push((subset, res));
    }
    Ok(PlaneCheckReport { passed, residuals })
}

/// The k first-cousin values phi_p(normal, v_1, ..., v-hat-i, ..., v_k).
/// All zero iff the Grassmannian derivative of the calibration in the
/// normal-pairing directions vanishes.
pub fn first_cousin_residual(
    phi: &ScalarForm,
    g: &ConstMetric,
    p: &Point,
    frame: &KVectorFrame,
    normal: &[Rational],
) -> Result<Vec<Rational>> {
    if frame.is_degenerate() {
        return Err(Error::DegenerateFrame);
    }
    let k = phi.degree();
    if frame.size() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            got: frame.size(),
        });
    }
    if normal.len() != g.dim() || frame.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: normal.len(),
        });
    }
    for v in frame.vectors() {
        if !g.inner(normal, v).is_zero() {
            return Err(Error::NormalNotOrthogonal);
        }
    }
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let mut tuple = vec![normal.to_vec()];
        for (j, v) in frame.vectors().iter().enumerate() {
            if j != i {
                tuple.push(v.clone());
            }
        }
        out.push(phi.eval_on_vectors(p, &tuple)?);
    }
    Ok(out)
}

/// Harvey-Lawson identity residual phi(xi)^2 + c*|Psi_E(xi)|^2 - |xi|^2 on
/// the unnormalized decomposable k-vector of the frame, evaluated at `p`.
/// Norms are Euclidean (the fixtures all live on flat orthonormal patches).
pub fn hl_residual(
    phi: &ScalarForm,
    psi_e: &VectorForm,
    p: &Point,
    frame: &KVectorFrame,
    c: &Rational,
) -> Result<Rational> {
    let k = frame.size();
    if phi.degree() != k {
        return Err(Error::ArityMismatch {
            expected: phi.degree(),
            got: k,
        });
    }
    if psi_e.degree() != k {
        return Err(Error::ArityMismatch {
            expected: psi_e.degree(),
            got: k,
        });
    }
    let phi_val = phi.eval_on_vectors(p, frame.vectors())?;
    let psi_val = psi_e.eval_on_vectors(p, frame.vectors())?;
    let psi_sq = dot(&psi_val, &psi_val);
    Ok(&phi_val * &phi_val + c * psi_sq - frame.gram_sq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::MultiIndex;
    use crate::poly::{rat, JetPoly, PatchSplit};
    use std::sync::Arc;

    fn flat(n: usize) -> Arc<PatchSplit> {
        PatchSplit::flat((1..=n).map(|i| format!("x{i}")).collect())
    }

    fn e(n: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![rat(0); n];
        v[i] = rat(1);
        v
    }

    fn dx(split: &Arc<PatchSplit>, idx: &[usize]) -> ScalarForm {
        ScalarForm::from_terms(
            split,
            idx.len(),
            vec![(MultiIndex(idx.to_vec()), JetPoly::one(split))],
        )
    }

    #[test]
    fn plane_condition_complex_line() {
        let s = flat(4);
        // J e1 = e2, J e2 = -e1, J e3 = e4, J e4 = -e3
        let j = VectorForm::tensor(&dx(&s, &[0]), 1)
            .sub(&VectorForm::tensor(&dx(&s, &[1]), 0))
            .unwrap()
            .add(&VectorForm::tensor(&dx(&s, &[2]), 3))
            .unwrap()
            .sub(&VectorForm::tensor(&dx(&s, &[3]), 2))
            .unwrap();
        let p = Point::origin(&s);
        let complex = KVectorFrame::new(vec![e(4, 0), e(4, 1)]).unwrap();
        assert!(plane_condition(&j, &p, &complex).unwrap().passed);
        let not_complex = KVectorFrame::new(vec![e(4, 0), e(4, 2)]).unwrap();
        assert!(!plane_condition(&j, &p, &not_complex).unwrap().passed);
        let degenerate = KVectorFrame::new(vec![e(4, 0), e(4, 0)]).unwrap();
        assert_eq!(
            plane_condition(&j, &p, &degenerate).unwrap_err(),
            Error::DegenerateFrame
        );
    }

    #[test]
    fn cousin_residual_examples() {
        let s = flat(4);
        let g = ConstMetric::euclidean(4);
        let p = Point::origin(&s);
        let phi = dx(&s, &[0, 1]);
        let frame = KVectorFrame::new(vec![e(4, 0), e(4, 1)]).unwrap();
        let r = first_cousin_residual(&phi, &g, &p, &frame, &e(4, 2)).unwrap();
        assert!(r.iter().all(Rational::is_zero));

        // non-calibrated plane for omega = dx12 + dx34 fails
        let omega = dx(&s, &[0, 1]).add(&dx(&s, &[2, 3])).unwrap();
        let bad = KVectorFrame::new(vec![e(4, 0), e(4, 2)]).unwrap();
        let r = first_cousin_residual(&omega, &g, &p, &bad, &e(4, 1)).unwrap();
        assert!(r.iter().any(|x| !x.is_zero()));

        // a non-orthogonal normal is rejected
        assert_eq!(
            first_cousin_residual(&phi, &g, &p, &frame, &e(4, 0)).unwrap_err(),
            Error::NormalNotOrthogonal
        );
    }

    #[test]
    fn hl_degenerate_frame_gives_zero() {
        let s = flat(4);
        let p = Point::origin(&s);
        let phi = dx(&s, &[0, 1]);
        let psi = VectorForm::tensor(&dx(&s, &[0, 1]), 2);
        let frame = KVectorFrame::new(vec![e(4, 0), e(4, 0)]).unwrap();
        let r = hl_residual(&phi, &psi, &p, &frame, &rat(1)).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn plane_condition_frame_change_invariance() {
        let s = flat(4);
        let j = VectorForm::tensor(&dx(&s, &[0]), 1)
            .sub(&VectorForm::tensor(&dx(&s, &[1]), 0))
            .unwrap()
            .add(&VectorForm::tensor(&dx(&s, &[2]), 3))
            .unwrap()
            .sub(&VectorForm::tensor(&dx(&s, &[3]), 2))
            .unwrap();
        let p = Point::origin(&s);
        // same plane, different frame
        let v1 = vec![rat(2), rat(3), rat(0), rat(0)];
        let v2 = vec![rat(1), rat(-1), rat(0), rat(0)];
        let frame = KVectorFrame::new(vec![v1, v2]).unwrap();
        assert!(plane_condition(&j, &p, &frame).unwrap().passed);
    }
}
