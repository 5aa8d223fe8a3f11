//! Exact enumeration of integral points: definite shells and balls,
//! hyperplane fibers of a quadric cone, box scans and balanced shells of
//! indefinite binary norm forms.

mod boxscan;
mod fiber;
mod indefinite;
mod walker;

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::arith::linalg::{self, RMatrix};
use crate::arith::rational::{from_strings, to_strings, Rational, RationalString};
use crate::{Error, Result};

pub use boxscan::{box_scan, box_scan_levels};
pub use fiber::{affine_fiber, cone_section_points, unimodular_completion, AffineLatticeFiber, SectionLattice};
pub use indefinite::{indefinite_quadratic_shell, IndefiniteShell};
pub use walker::{Ldl, ShellWalker};

/// A rational symmetric Gram matrix: `q(x) = xᵀ·gram·x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GramDoc", try_from = "GramDoc")]
pub struct GramForm {
    pub gram: RMatrix,
    pub dim: usize,
}

impl GramForm {
    pub fn new(gram: RMatrix) -> Result<Self> {
        if !linalg::is_symmetric(&gram) {
            return Err(Error::Inconsistent("Gram matrix must be square and symmetric".into()));
        }
        let dim = gram.len();
        Ok(Self { gram, dim })
    }

    pub fn identity(n: usize) -> Self {
        Self { gram: linalg::identity(n), dim: n }
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(linalg::to_rational(&rows.to_vec()))
    }

    pub fn eval(&self, x: &[i64]) -> Rational {
        let v: Vec<Rational> = x.iter().map(|&c| Rational::from_integer(c.into())).collect();
        linalg::quad(&self.gram, &v)
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Rational {
        linalg::quad(&self.gram, x)
    }

    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> Rational {
        let xv: Vec<Rational> = x.iter().map(|&c| Rational::from_integer(c.into())).collect();
        let yv: Vec<Rational> = y.iter().map(|&c| Rational::from_integer(c.into())).collect();
        linalg::dot(&xv, &linalg::mat_vec(&self.gram, &yv))
    }

    pub fn determinant(&self) -> Rational {
        linalg::det(&self.gram)
    }

    /// Exact test by leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        linalg::is_positive_definite(&self.gram)
    }

    fn require_definite(&self) -> Result<Ldl> {
        if !self.is_positive_definite() {
            return Err(Error::NotDefinite("form is not positive definite".into()));
        }
        Ldl::new(&self.gram)
    }

    pub fn walker(&self) -> Result<ShellWalker> {
        ShellWalker::new(&self.require_definite()?, None)
    }
}

/// All `x ∈ Zⁿ` with `q(x) = m`, in lexicographic order.
pub fn definite_shell(form: &GramForm, m: &Rational) -> Result<Vec<Vec<i64>>> {
    if m.is_negative() {
        return Err(Error::OutOfRange("shell level must be nonnegative".into()));
    }
    let walker = form.walker()?;
    let mut out = Vec::new();
    if let Some(t) = walker.scaled_target(m)? {
        walker.shell(0, t, |x| out.push(x.to_vec()))?;
    }
    out.sort();
    Ok(out)
}

/// Shells `q(x) = m` for every integer `1 ≤ m ≤ r`, each in lexicographic
/// order. Fails if the form takes a non-integral value inside the ball.
pub fn definite_ball(form: &GramForm, r: &Rational) -> Result<Vec<(i64, Vec<Vec<i64>>)>> {
    let walker = form.walker()?;
    if !r.is_positive() {
        return Ok(Vec::new());
    }
    let top = r.floor().to_integer();
    let top: i64 = num_traits::ToPrimitive::to_i64(&top).ok_or(Error::Overflow("ball radius"))?;
    let bound = walker
        .scaled_target(&Rational::from_integer(top.into()))?
        .expect("integer radius scales to an integer");
    let e = num_traits::ToPrimitive::to_i128(walker.scale()).ok_or(Error::Overflow("ball scale"))?;
    let mut shells: BTreeMap<i64, Vec<Vec<i64>>> = (1..=top).map(|m| (m, Vec::new())).collect();
    let mut bad = false;
    walker.ball(0, bound, |x, s| {
        if s == 0 {
            return;
        }
        if s % e != 0 {
            bad = true;
            return;
        }
        shells.get_mut(&((s / e) as i64)).expect("level in range").push(x.to_vec());
    })?;
    if bad {
        return Err(Error::InvalidLevel("form takes non-integral values; scale the levels first".into()));
    }
    Ok(shells
        .into_iter()
        .map(|(m, mut v)| {
            v.sort();
            (m, v)
        })
        .collect())
}

#[derive(Serialize, Deserialize)]
struct GramDoc {
    gram: Vec<Vec<RationalString>>,
}

impl From<GramForm> for GramDoc {
    fn from(g: GramForm) -> Self {
        Self { gram: g.gram.iter().map(|r| to_strings(r)).collect() }
    }
}

impl TryFrom<GramDoc> for GramForm {
    type Error = Error;
    fn try_from(d: GramDoc) -> Result<Self> {
        GramForm::new(d.gram.into_iter().map(from_strings).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{rat, ratio};
    use crate::orders::{OrbitGroup, OrderSpec};
    use crate::presets;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        v.sort();
        v
    }

    #[test]
    fn shell_examples() {
        let i2 = GramForm::identity(2);
        let s5 = definite_shell(&i2, &rat(5)).unwrap();
        assert_eq!(
            s5,
            sorted(vec![
                vec![1, 2], vec![1, -2], vec![-1, 2], vec![-1, -2],
                vec![2, 1], vec![2, -1], vec![-2, 1], vec![-2, -1],
            ])
        );
        assert!(definite_shell(&i2, &rat(3)).unwrap().is_empty());
        assert_eq!(definite_shell(&GramForm::identity(4), &rat(1)).unwrap().len(), 8);
        assert_eq!(definite_shell(&i2, &rat(0)).unwrap(), vec![vec![0, 0]]);
        assert!(matches!(definite_shell(&i2, &rat(-1)), Err(Error::OutOfRange(_))));
        assert!(definite_shell(&i2, &ratio(1, 2)).unwrap().is_empty());
        let indefinite = GramForm::from_ints(&[vec![1, 0], vec![0, -1]]).unwrap();
        assert!(matches!(definite_shell(&indefinite, &rat(1)), Err(Error::NotDefinite(_))));
    }

    #[test]
    fn shell_with_rational_gram() {
        // x² + xy + y², the Eisenstein norm
        let f = GramForm::new(vec![vec![rat(1), ratio(1, 2)], vec![ratio(1, 2), rat(1)]]).unwrap();
        assert_eq!(definite_shell(&f, &rat(1)).unwrap().len(), 6);
        assert_eq!(definite_shell(&f, &rat(7)).unwrap().len(), 12);
        assert!(definite_shell(&f, &rat(2)).unwrap().is_empty());
    }

    #[test]
    fn ball_examples() {
        let b = definite_ball(&GramForm::identity(4), &rat(1)).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].1.len(), 8);
        let b2 = definite_ball(&GramForm::identity(2), &rat(2)).unwrap();
        assert_eq!(b2.iter().map(|(m, s)| (*m, s.len())).collect::<Vec<_>>(), vec![(1, 4), (2, 4)]);
        assert!(definite_ball(&GramForm::identity(2), &rat(0)).unwrap().is_empty());
        let half = GramForm::new(vec![vec![ratio(1, 2)]]).unwrap();
        assert!(matches!(definite_ball(&half, &rat(3)), Err(Error::InvalidLevel(_))));
    }

    #[test]
    fn ball_agrees_with_shells() {
        let f = GramForm::from_ints(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]).unwrap();
        for (m, shell) in definite_ball(&f, &rat(30)).unwrap() {
            assert_eq!(shell, definite_shell(&f, &rat(m)).unwrap());
        }
    }

    #[test]
    fn cone_section_examples() {
        let s = presets::model_quadric();
        assert_eq!(
            cone_section_points(&s, &rat(5)).unwrap(),
            vec![vec![1, -2, 4], vec![1, 2, 4], vec![4, -2, 1], vec![4, 2, 1]]
        );
        assert!(cone_section_points(&s, &rat(3)).unwrap().is_empty());
        assert_eq!(cone_section_points(&s, &rat(2)).unwrap(), vec![vec![1, -1, 1], vec![1, 1, 1]]);
        assert!(matches!(cone_section_points(&s, &rat(0)), Err(Error::InvalidLevel(_))));
        assert!(cone_section_points(&s, &ratio(1, 2)).unwrap().is_empty());
        for k in 1..200 {
            for x in cone_section_points(&s, &rat(k)).unwrap() {
                assert_eq!(s.q(&x), rat(0));
                assert_eq!(s.ell_value(&x), rat(k));
                assert_eq!(crate::arith::intmath::gcd_slice(&x), 1);
            }
        }
    }

    #[test]
    fn fiber_points_lie_on_the_hyperplane() {
        let ell = vec![rat(3), ratio(3, 2), rat(6)];
        let fib = affine_fiber(&ell, &ratio(9, 2)).unwrap().unwrap();
        for t in [[0, 0], [1, -2], [5, 7]] {
            let x = fib.point(&t);
            let v: Rational = x.iter().zip(&ell).map(|(&c, l)| l * rat(c)).sum();
            assert_eq!(v, ratio(9, 2));
        }
        assert!(affine_fiber(&ell, &rat(1)).unwrap().is_none());
        let u = unimodular_completion(&[6, 10, 15]).unwrap();
        assert_eq!(crate::arith::linalg::det_int(&u).abs(), 1.into());
        assert!(unimodular_completion(&[2, 4]).is_err());
    }

    #[test]
    fn box_scan_examples() {
        let z2 = presets::zsqrt2_order();
        let got = box_scan(&z2, &rat(1), 3).unwrap();
        assert_eq!(got, vec![vec![-3, -2], vec![-3, 2], vec![-1, 0], vec![1, 0], vec![3, -2], vec![3, 2]]);
        assert!(box_scan(&z2, &rat(3), 5).unwrap().is_empty());
        assert!(box_scan(&z2, &rat(1), 0).is_err());
        let levels = box_scan_levels(&z2, 2, 3).unwrap();
        assert_eq!(levels[&1].len(), 6 + 4);
    }

    #[test]
    fn indefinite_shell_examples() {
        let z2 = presets::zsqrt2_order();
        assert_eq!(indefinite_quadratic_shell(&z2, 1).unwrap().len(), 1);
        assert_eq!(indefinite_quadratic_shell(&z2, 2).unwrap().len(), 1);
        assert!(indefinite_quadratic_shell(&z2, 3).unwrap().is_empty());
        assert!(indefinite_quadratic_shell(&z2, 0).is_err());
        assert!(indefinite_quadratic_shell(&presets::gauss_order(), 1).is_err());
        // −1 is a norm in Z[√2], so the negative shell mirrors the positive one
        assert_eq!(indefinite_quadratic_shell(&z2, -7).unwrap().len(), 2);
    }

    #[test]
    fn indefinite_shell_saturates() {
        for d in [2, 3, 6, 7] {
            let order = OrderSpec::new(presets::zsqrt_algebra(d).unwrap(), None).unwrap();
            let units = crate::orders::unit_group(&order).unwrap();
            let shell = IndefiniteShell::new(&order, &units, OrbitGroup::NormOne).unwrap();
            for k in 1..60 {
                assert_eq!(shell.orbit_reps(&order, k, 1).unwrap(), shell.orbit_reps(&order, k, 2).unwrap(), "d={d} k={k}");
            }
        }
    }

    fn pd_gram(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(-2i64..=2, n * n).prop_map(move |a| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| a[k * n + i] * a[k * n + j]).sum::<i64>() + i64::from(i == j))
                        .collect()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn shells_are_symmetric_exact_and_permutation_stable(g in pd_gram(3), m in 0i64..25, p in 0usize..6) {
            let f = GramForm::from_ints(&g).unwrap();
            let shell = definite_shell(&f, &rat(m)).unwrap();
            for x in &shell {
                prop_assert_eq!(f.eval(x), rat(m));
                let neg: Vec<i64> = x.iter().map(|v| -v).collect();
                prop_assert!(shell.binary_search(&neg).is_ok());
            }
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let pi = perms[p];
            let gp: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| g[pi[i]][pi[j]]).collect()).collect();
            let permuted = definite_shell(&GramForm::from_ints(&gp).unwrap(), &rat(m)).unwrap();
            let mut back: Vec<Vec<i64>> = permuted
                .iter()
                .map(|y| {
                    let mut x = vec![0; 3];
                    for i in 0..3 {
                        x[pi[i]] = y[i];
                    }
                    x
                })
                .collect();
            back.sort();
            prop_assert_eq!(back, shell);
        }
    }
}
