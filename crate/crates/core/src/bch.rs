//! Commutator algebra and truncated series used as independent test
//! oracles: the Baker–Campbell–Hausdorff expansion of `log(exp X · exp Y)`
//! and the commutator series for the time derivative of exponential
//! coordinates along a spatial-velocity flow.

use crate::error::{LieError, Result};
use crate::group::AlgebraElement;
use crate::matrix::Mat;

/// Highest total commutator degree retained by the truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BchOrder(u8);

impl BchOrder {
    pub const MAX: u8 = 4;

    pub fn new(order: u8) -> Result<BchOrder> {
        if (1..=Self::MAX).contains(&order) {
            Ok(BchOrder(order))
        } else {
            Err(LieError::InvalidScenario(format!(
                "series order must be in 1..={}, got {order}",
                Self::MAX
            )))
        }
    }

    pub fn get(&self) -> u8 {
        self.0
    }
}

fn comm(a: &Mat, b: &Mat) -> Mat {
    a.mul(b).sub(&b.mul(a))
}

fn check_pair(a: &AlgebraElement, b: &AlgebraElement) -> Result<()> {
    if a.tag != b.tag {
        return Err(LieError::TagMismatch { left: a.tag, right: b.tag });
    }
    if a.frame != b.frame {
        return Err(LieError::FrameMismatch {
            expected: a.frame.to_string(),
            found: b.frame.to_string(),
        });
    }
    Ok(())
}

/// Matrix commutator `[A, B] = AB − BA`. The algebra is closed under it.
pub fn commutator(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    check_pair(a, b)?;
    Ok(AlgebraElement::new_unchecked(
        a.tag,
        a.frame.clone(),
        comm(&a.matrix, &b.matrix),
    ))
}

/// Truncated series for `Z = log(exp X · exp Y)` in nested commutators:
///
/// `Z = X + Y + ½[X,Y] + 1/12[X,[X,Y]] − 1/12[Y,[X,Y]] − 1/24[Y,[X,[X,Y]]] + …`
///
/// `order` counts the total degree in X and Y, so truncating at order k
/// leaves a residual of size O((‖X‖+‖Y‖)^{k+1}).
pub fn bch_truncated(x: &AlgebraElement, y: &AlgebraElement, order: BchOrder) -> Result<AlgebraElement> {
    check_pair(x, y)?;
    let mut z = x.matrix.add(&y.matrix);
    // Exactly-zero brackets are skipped rather than added: adding a zero
    // matrix would still rewrite -0.0 entries, and commuting arguments
    // must reduce to the plain sum bit for bit.
    if order.get() >= 2 {
        let c = comm(&x.matrix, &y.matrix);
        if !c.is_exactly_zero() {
            z = z.add(&c.scale(0.5));
        }
        if order.get() >= 3 {
            let xc = comm(&x.matrix, &c);
            let yc = comm(&y.matrix, &c);
            if !xc.is_exactly_zero() {
                z = z.add(&xc.scale(1.0 / 12.0));
            }
            if !yc.is_exactly_zero() {
                z = z.add(&yc.scale(-1.0 / 12.0));
            }
            if order.get() >= 4 {
                let yxc = comm(&y.matrix, &xc);
                if !yxc.is_exactly_zero() {
                    z = z.add(&yxc.scale(-1.0 / 24.0));
                }
            }
        }
    }
    Ok(AlgebraElement::new_unchecked(x.tag, x.frame.clone(), z))
}

/// Truncated commutator series for `ξ̂̇ = d/dt log(g)` along the flow
/// `ġ = V̂ˢ g`:
///
/// `ξ̂̇ = V̂ˢ + ½[V̂ˢ, ξ̂] + 1/12[ξ̂, [ξ̂, V̂ˢ]] + 0·(degree 4) + …`
///
/// The degree-4 coefficient vanishes (it is the third Bernoulli number),
/// so orders 3 and 4 return the same value. When `V̂ˢ` commutes with `ξ̂`
/// every bracket is the zero matrix; those terms are skipped entirely so
/// the input velocity comes back bit for bit.
pub fn xi_dot_series(
    xi: &AlgebraElement,
    vs: &AlgebraElement,
    order: BchOrder,
) -> Result<AlgebraElement> {
    check_pair(xi, vs)?;
    let mut out = vs.matrix.clone();
    if order.get() >= 2 {
        let c = comm(&vs.matrix, &xi.matrix);
        if !c.is_exactly_zero() {
            out = out.add(&c.scale(0.5));
        }
    }
    if order.get() >= 3 {
        let inner = comm(&xi.matrix, &vs.matrix);
        let c = comm(&xi.matrix, &inner);
        if !c.is_exactly_zero() {
            out = out.add(&c.scale(1.0 / 12.0));
        }
    }
    Ok(AlgebraElement::new_unchecked(xi.tag, xi.frame.clone(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explog::{exp_generic, log_generic};
    use crate::group::{
        check_algebra_membership, compose, hat, random_algebra, Frame, GroupTag, Twist,
    };
    use nalgebra::{DMatrix, Vector3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame() -> Frame {
        Frame::new("A")
    }

    #[test]
    fn order_bounds_enforced() {
        assert!(BchOrder::new(0).is_err());
        assert!(BchOrder::new(5).is_err());
        assert_eq!(BchOrder::new(4).unwrap().get(), 4);
    }

    #[test]
    fn self_commutator_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let a = random_algebra(&GroupTag::gl0(4), frame(), 1.0, &mut rng);
        assert_eq!(commutator(&a, &a).unwrap().norm(), 0.0);
    }

    #[test]
    fn commutator_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let a = random_algebra(&GroupTag::su(4), frame(), 1.0, &mut rng);
            let b = random_algebra(&GroupTag::su(4), frame(), 1.0, &mut rng);
            let ab = commutator(&a, &b).unwrap();
            let ba = commutator(&b, &a).unwrap();
            let sum = ab.matrix.add(&ba.matrix).frobenius_norm();
            assert!(sum < 1e-12, "antisymmetry residual {sum}");
        }
    }

    #[test]
    fn so3_commutator_is_cross_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let w1 = Vector3::from_fn(|_, _| rng.random_range(-2.0..=2.0));
            let w2 = Vector3::from_fn(|_, _| rng.random_range(-2.0..=2.0));
            let a = hat(&GroupTag::so(3), &Twist::rotation(w1), frame()).unwrap();
            let b = hat(&GroupTag::so(3), &Twist::rotation(w2), frame()).unwrap();
            let c = commutator(&a, &b).unwrap();
            let expected = hat(&GroupTag::so(3), &Twist::rotation(w1.cross(&w2)), frame()).unwrap();
            let diff = c.matrix.sub(&expected.matrix).frobenius_norm();
            assert!(diff < 1e-13, "cross-product residual {diff}");
        }
    }

    #[test]
    fn commutator_stays_in_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for tag in [GroupTag::so(3), GroupTag::se(3), GroupTag::su(4), GroupTag::gl0(4)] {
            for _ in 0..20 {
                let a = random_algebra(&tag, frame(), 1.0, &mut rng);
                let b = random_algebra(&tag, frame(), 1.0, &mut rng);
                let c = commutator(&a, &b).unwrap();
                assert!(
                    check_algebra_membership(&c.matrix, &tag, 1e-10),
                    "bracket escaped the algebra of {tag}"
                );
            }
        }
    }

    #[test]
    fn jacobi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..20 {
            let a = random_algebra(&GroupTag::gl0(3), frame(), 1.0, &mut rng);
            let b = random_algebra(&GroupTag::gl0(3), frame(), 1.0, &mut rng);
            let c = random_algebra(&GroupTag::gl0(3), frame(), 1.0, &mut rng);
            let t1 = commutator(&a, &commutator(&b, &c).unwrap()).unwrap();
            let t2 = commutator(&b, &commutator(&c, &a).unwrap()).unwrap();
            let t3 = commutator(&c, &commutator(&a, &b).unwrap()).unwrap();
            let total = t1.matrix.add(&t2.matrix).add(&t3.matrix).frobenius_norm();
            assert!(total < 1e-12, "Jacobi residual {total}");
        }
    }

    #[test]
    fn commuting_arguments_reduce_to_the_sum() {
        // Diagonal matrices commute, so every bracket is exactly zero.
        let d1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.3, -0.1, 0.7, 0.2]));
        let d2 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-0.2, 0.5, 0.1, -0.4]));
        let x = AlgebraElement::new(GroupTag::gl0(4), frame(), Mat::Real(d1)).unwrap();
        let y = AlgebraElement::new(GroupTag::gl0(4), frame(), Mat::Real(d2)).unwrap();
        let sum = x.add(&y).unwrap();
        for order in 1..=4 {
            let z = bch_truncated(&x, &y, BchOrder::new(order).unwrap()).unwrap();
            assert_eq!(z.matrix, sum.matrix, "order {order}");
        }
    }

    #[test]
    fn zero_second_argument_returns_the_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let x = random_algebra(&GroupTag::se(3), frame(), 1.0, &mut rng);
        let zero = AlgebraElement::zero(GroupTag::se(3), frame());
        for order in 1..=4 {
            let z = bch_truncated(&x, &zero, BchOrder::new(order).unwrap()).unwrap();
            assert_eq!(z.matrix, x.matrix, "order {order}");
        }
    }

    /// Residual of the order-4 truncation against the exact
    /// `log(exp X · exp Y)` at a given argument scale.
    fn bch_residual(x: &AlgebraElement, y: &AlgebraElement, scale: f64) -> f64 {
        let xs = x.scale(scale);
        let ys = y.scale(scale);
        let gx = exp_generic(&xs).unwrap();
        let gy = exp_generic(&ys).unwrap();
        let exact = log_generic(&compose(&gx, &gy).unwrap()).unwrap();
        let series = bch_truncated(&xs, &ys, BchOrder::new(4).unwrap()).unwrap();
        exact.matrix.sub(&series.matrix).frobenius_norm()
    }

    #[test]
    fn order_four_residual_scales_as_fifth_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..5 {
            let x = random_algebra(&GroupTag::so(3), frame(), 1.0, &mut rng);
            let y = random_algebra(&GroupTag::so(3), frame(), 1.0, &mut rng);
            let r1 = bch_residual(&x, &y, 0.2);
            let r2 = bch_residual(&x, &y, 0.1);
            let r3 = bch_residual(&x, &y, 0.05);
            assert!(r1 / r2 >= 30.0, "halving shrank residual only {}x", r1 / r2);
            assert!(r2 / r3 >= 30.0, "halving shrank residual only {}x", r2 / r3);
        }
    }

    #[test]
    fn proportional_velocity_comes_back_exactly() {
        // Power-of-two gains keep V̂ˢ = −k ξ̂ exactly proportional in
        // floating point, so the stored matrices commute bit for bit.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for k in [1.0, 2.0] {
            for tag in [GroupTag::se(3), GroupTag::su(4)] {
                let xi = random_algebra(&tag, frame(), 1.0, &mut rng);
                let vs = xi.scale(-k);
                for order in 1..=4 {
                    let out = xi_dot_series(&xi, &vs, BchOrder::new(order).unwrap()).unwrap();
                    assert_eq!(out.matrix, vs.matrix, "order {order}, k {k}");
                }
            }
        }
    }

    #[test]
    fn zero_coordinate_passes_velocity_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let vs = random_algebra(&GroupTag::gl0(4), frame(), 1.0, &mut rng);
        let zero = AlgebraElement::zero(GroupTag::gl0(4), frame());
        let out = xi_dot_series(&zero, &vs, BchOrder::new(4).unwrap()).unwrap();
        assert_eq!(out.matrix, vs.matrix);
    }

    #[test]
    fn orders_three_and_four_coincide() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let xi = random_algebra(&GroupTag::so(3), frame(), 0.5, &mut rng);
        let vs = random_algebra(&GroupTag::so(3), frame(), 0.5, &mut rng);
        let o3 = xi_dot_series(&xi, &vs, BchOrder::new(3).unwrap()).unwrap();
        let o4 = xi_dot_series(&xi, &vs, BchOrder::new(4).unwrap()).unwrap();
        assert_eq!(o3.matrix, o4.matrix);
    }

    #[test]
    fn series_matches_central_difference_along_the_flow() {
        // Flow g(t) = exp(t V̂ˢ) g₀ has spatial velocity V̂ˢ; compare the
        // series for d/dt log(g) against central differences of the log.
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let vs = random_algebra(&GroupTag::so(3), frame(), 0.05, &mut rng);
        let xi0 = random_algebra(&GroupTag::so(3), frame(), 0.05, &mut rng);
        let g0 = exp_generic(&xi0).unwrap();

        let log_at = |t: f64| {
            let step = exp_generic(&vs.scale(t)).unwrap();
            let g = compose(&step, &g0).unwrap();
            log_generic(&g).unwrap()
        };
        let dt = 1e-5;
        let before = log_at(-dt);
        let after = log_at(dt);
        let fd = after.matrix.sub(&before.matrix).scale(1.0 / (2.0 * dt));
        let xi = log_at(0.0);

        let mut residuals = Vec::new();
        for order in 1..=3 {
            let series = xi_dot_series(&xi, &vs, BchOrder::new(order).unwrap()).unwrap();
            residuals.push(series.matrix.sub(&fd).frobenius_norm());
        }
        assert!(residuals[1] < residuals[0] / 10.0, "residuals {residuals:?}");
        assert!(residuals[2] < residuals[1] / 10.0, "residuals {residuals:?}");
        assert!(residuals[2] < 1e-8, "residuals {residuals:?}");
    }
}
