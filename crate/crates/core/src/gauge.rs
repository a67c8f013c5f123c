//! Vector-bundle connections: curvature, currents, coupled derivatives, and
//! the second-order operator on closed endomorphism-valued two-forms.
//!
//! Conventions: `F_ab = ∂_a A_b − ∂_b A_a + [A_a, A_b]`, the current is
//! `j_a = g^{bc} ∇_b F_{ca}` with the gauge- and Levi-Civita-coupled
//! derivative, and `|F|²_g = −Tr(g^{ac} g^{bd} F_ab F_cd)`.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::{ChartPoint, ConnectionField, MetricField, ScalarField};
use crate::geometry::{covd, GeometryJet};
use crate::jet::Jet;
use crate::num::{Coeff, Real, Scalar};
use crate::tensor::{Slot, Tensor};

type CJet<F> = Jet<Complex<F>>;

/// Curvature `F_ab` of a connection from its component jets
/// (metric-independent). The result order is one lower than `order`.
pub fn curvature<F: Real>(
    c: &ConnectionField<F>,
    p: &ChartPoint<F>,
    order: usize,
) -> Result<Tensor<CJet<F>>> {
    let a = c.components(p, order)?;
    curvature_from_components(&a, c.fiber_dim, p.chart().dim())
}

pub(crate) fn curvature_from_components<F: Real>(
    a: &Tensor<CJet<F>>,
    k: usize,
    dim: usize,
) -> Result<Tensor<CJet<F>>> {
    let a0 = a.get(&[0, 0, 0]);
    let sub = a0
        .order()
        .checked_sub(1)
        .ok_or_else(|| Error::Order("curvature needs connection jets of order >= 1".into()))?;
    let proto = a0.zero_like().truncated(sub);
    let slots = vec![
        Slot::st_down(),
        Slot::st_down(),
        Slot::fiber_up(),
        Slot::fiber_down(),
    ];
    let mut f = Tensor::zeros(slots, vec![dim, dim, k, k], &proto);
    for x in 0..dim {
        for y in x + 1..dim {
            for i in 0..k {
                for j in 0..k {
                    let mut acc = &a.get(&[y, i, j]).partial(x)? - &a.get(&[x, i, j]).partial(y)?;
                    for e in 0..k {
                        acc = &acc + &a.get(&[x, i, e]).mul(a.get(&[y, e, j]));
                        acc = &acc - &a.get(&[y, i, e]).mul(a.get(&[x, e, j]));
                    }
                    f.set(&[x, y, i, j], acc.clone());
                    f.set(&[y, x, i, j], acc.neg());
                }
            }
        }
    }
    Ok(f)
}

/// Connection data at a point: curvature, its coupled first derivative, the
/// current and its gradient, and the curvature norm, all jet-valued in the
/// supplied metric geometry.
pub struct GaugeJet<F: Real> {
    pub at: ChartPoint<F>,
    pub fiber_dim: usize,
    /// Connection components `A_a` as `[dn, fu, fd]`.
    pub conn: Tensor<CJet<F>>,
    /// `F_ab` as `[dn, dn, fu, fd]`.
    pub f: Tensor<CJet<F>>,
    /// `F^{ab}`.
    pub f_up: Tensor<CJet<F>>,
    /// `∇_c F_ab` as `[dn(c), dn(a), dn(b), fu, fd]`.
    pub nabla_f: Tensor<CJet<F>>,
    /// Current `j_a = g^{bc} ∇_b F_{ca}` as `[dn, fu, fd]`.
    pub j: Tensor<CJet<F>>,
    /// `∇_a j_b` as `[dn(a), dn(b), fu, fd]`.
    pub nabla_j: Tensor<CJet<F>>,
    /// `|F|²_g = −Tr F^{ab} F_ab` (real part; the imaginary part cancels).
    pub fsq: Jet<F>,
}

impl<F: Real> GaugeJet<F> {
    /// Assemble the stack with connection jets of order `order` in the
    /// given geometry (whose metric jets must be at least that order).
    pub fn compute(
        c: &ConnectionField<F>,
        geo: &GeometryJet<F>,
        order: usize,
    ) -> Result<GaugeJet<F>> {
        let k = c.fiber_dim;
        let dim = geo.dim;
        let a = c.components(&geo.at, order)?;
        let f = curvature_from_components(&a, k, dim)?;
        let ginv_c = geo.g_inv_complex();
        let gamma_c = geo.gamma_complex();
        let f_up = f.raise_lower(0, &ginv_c)?.raise_lower(1, &ginv_c)?;
        let nabla_f = covd(&f, &gamma_c, Some(&a))?;
        // j_a = g^{ce} ∇_e F_{ca}: raise the derivative slot, contract with
        // the first form slot.
        let j = nabla_f.raise_lower(0, &ginv_c)?.contract(0, 1)?;
        let nabla_j = covd(&j, &gamma_c, Some(&a))?;
        // |F|² = −Σ_ab Tr(F^{ab} F_ab)
        let mut fsq_c = f.get(&[0, 0, 0, 0]).zero_like();
        for x in 0..dim {
            for y in 0..dim {
                for i in 0..k {
                    for e in 0..k {
                        fsq_c = &fsq_c - &f_up.get(&[x, y, i, e]).mul(f.get(&[x, y, e, i]));
                    }
                }
            }
        }
        let fsq = fsq_c.re_jet();
        Ok(GaugeJet {
            at: geo.at,
            fiber_dim: k,
            conn: a,
            f,
            f_up,
            nabla_f,
            j,
            nabla_j,
            fsq,
        })
    }

    /// Residual of the Bianchi identity `∇_[a F_bc] = 0` (values).
    pub fn bianchi_residual(&self) -> Result<F> {
        let alt = self.nabla_f.antisymmetrize(&[0, 1, 2])?;
        Ok(alt.max_modulus())
    }

    /// `|F|_g = sqrt(|F|²_g)`; errors where the norm vanishes.
    pub fn f_norm(&self) -> Result<Jet<F>> {
        if self.fsq.value() <= F::zero() {
            return Err(Error::ZeroCurvature);
        }
        self.fsq.sqrt()
    }
}

/// `|F|²_g` at a point from first-order connection jets and metric values
/// only. This is the hot path for the regulated-energy quadrature; it avoids
/// the full curvature stack.
pub fn fsq_value<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<F> {
    let dim = p.chart().dim();
    let g = m.components(p, 0)?;
    let (ginv, _) = crate::geometry::invert_jet_matrix(&g)?;
    let f = curvature(c, p, 1)?;
    let k = c.fiber_dim;
    let mut acc = F::zero();
    for a in 0..dim {
        for b in 0..dim {
            if a == b {
                continue;
            }
            for cc in 0..dim {
                for d in 0..dim {
                    if cc == d {
                        continue;
                    }
                    let w = ginv.get(&[a, cc]).value() * ginv.get(&[b, d]).value();
                    if w == F::zero() {
                        continue;
                    }
                    let mut tr = F::zero();
                    for i in 0..k {
                        for e in 0..k {
                            let prod =
                                f.get(&[a, b, i, e]).value() * f.get(&[cc, d, e, i]).value();
                            tr = tr + prod.re();
                        }
                    }
                    acc = acc - w * tr;
                }
            }
        }
    }
    Ok(acc)
}

/// Current of a connection at a point in a given metric (values).
pub fn current<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<Tensor<Complex<F>>> {
    let geo = GeometryJet::compute(m, p, 3)?;
    let gj = GaugeJet::compute(c, &geo, 3.min(c.max_order()))?;
    Ok(gj.j.map(|j| j.value()))
}

/// Coupled gradient of the current, `∇_a j_b` (values).
pub fn coupled_grad_current<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<Tensor<Complex<F>>> {
    let geo = GeometryJet::compute(m, p, 3)?;
    let gj = GaugeJet::compute(c, &geo, 3.min(c.max_order()))?;
    Ok(gj.nabla_j.map(|j| j.value()))
}

/// Residual of the compactified rewriting of the current:
/// `j[A, g/σ²]_a − σ(σ g^{bc} ∇_b F_{ca} − (d−4) n^b F_{ba})`,
/// an identity for any connection (not only Yang-Mills ones). All
/// right-hand quantities use the compactified metric `g` and `n = dσ`.
pub fn compactified_current_residual<F: Real>(
    c: &ConnectionField<F>,
    sigma: &ScalarField<F>,
    m_compact: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<Tensor<Complex<F>>> {
    let dim = p.chart().dim();
    let g_plus = m_compact.rescale_by_inverse(sigma);
    let j_plus = current(c, &g_plus, p)?;

    let geo = GeometryJet::compute(m_compact, p, 3)?;
    let gj = GaugeJet::compute(c, &geo, 3.min(c.max_order()))?;
    let s = sigma.jet(p, 1)?;
    let sv = s.value();
    let mut n_up = vec![F::zero(); dim];
    for b in 0..dim {
        for e in 0..dim {
            n_up[b] = n_up[b] + geo.g_inv.get(&[b, e]).value() * s.d1(e);
        }
    }
    let k = c.fiber_dim;
    let jc = gj.j.map(|x| x.value());
    let fv = gj.f.map(|x| x.value());
    let dm4 = crate::num::lit::<F>(dim as f64 - 4.0);
    let mut rhs = Tensor::zeros(
        vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()],
        vec![dim, k, k],
        &<Complex<F> as Scalar>::from_real(F::zero()),
    );
    for a in 0..dim {
        for i in 0..k {
            for jj in 0..k {
                let mut nf = <Complex<F> as Scalar>::from_real(F::zero());
                for b in 0..dim {
                    nf = nf + fv.get(&[b, a, i, jj]).scale(n_up[b]);
                }
                let v = (jc.get(&[a, i, jj]).scale(sv) - nf.scale(dm4)).scale(sv);
                rhs.set(&[a, i, jj], v);
            }
        }
    }
    j_plus.sub(&rhs)
}

type TwoFormEval<F> =
    Arc<dyn Fn(&ChartPoint<F>, usize) -> Result<Tensor<Jet<Complex<F>>>> + Send + Sync>;

/// Endomorphism-valued two-form field (components `[dn,dn,fu,fd]`).
#[derive(Clone)]
pub struct EndoTwoFormField<F: Real> {
    pub name: String,
    pub fiber_dim: usize,
    max_order: usize,
    eval: TwoFormEval<F>,
}

impl<F: Real> EndoTwoFormField<F> {
    pub fn new(
        name: impl Into<String>,
        fiber_dim: usize,
        max_order: usize,
        eval: impl Fn(&ChartPoint<F>, usize) -> Result<Tensor<Jet<Complex<F>>>>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        EndoTwoFormField {
            name: name.into(),
            fiber_dim,
            max_order,
            eval: Arc::new(eval),
        }
    }

    /// The curvature two-form of a connection.
    pub fn from_connection(c: &ConnectionField<F>) -> Self {
        let cc = c.clone();
        EndoTwoFormField::new(
            format!("F[{}]", c.name),
            c.fiber_dim,
            c.max_order().saturating_sub(1),
            move |p, order| curvature(&cc, p, order + 1),
        )
    }

    pub fn jets(&self, p: &ChartPoint<F>, order: usize) -> Result<Tensor<Jet<Complex<F>>>> {
        if order > self.max_order {
            return Err(Error::Order(format!(
                "two-form `{}` supports order {}, requested {}",
                self.name, self.max_order, order
            )));
        }
        (self.eval)(p, order)
    }
}

/// Closedness tolerance for [`q2_apply`]: curvature inputs are exactly
/// closed analytically, so a violation flags a construction bug rather than
/// noise.
pub const CLOSEDNESS_TOL: f64 = 1e-8;

/// Apply the second-order conformal operator
/// `Q₂ X_ab = ∇_[a ∇^c X_b]c + 4 P_[a^c X_b]c + J X_ab`
/// to a closed two-form at a point (values). `coupling` supplies the gauge
/// coupling used in the covariant derivatives.
pub fn q2_apply<F: Real>(
    x: &EndoTwoFormField<F>,
    coupling: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<Tensor<Complex<F>>> {
    let geo = GeometryJet::compute(m, p, 3)?;
    let a = coupling.components(p, 2)?;
    let xj = x.jets(p, 2)?;
    let gamma_c = geo.gamma_complex();
    let ginv_c = geo.g_inv_complex();

    let dx = covd(&xj, &gamma_c, Some(&a))?;
    let closed = dx.antisymmetrize(&[0, 1, 2])?;
    let resid = closed.max_modulus();
    if resid.to_f64().unwrap_or(f64::INFINITY) > CLOSEDNESS_TOL {
        return Err(Error::NotClosed(resid.to_f64().unwrap_or(f64::NAN)));
    }

    // Y_b = ∇^c X_bc
    let y = dx.raise_lower(0, &ginv_c)?.contract(0, 2)?;
    let dy = covd(&y, &gamma_c, Some(&a))?;
    let term1 = dy.antisymmetrize(&[0, 1])?;

    let dim = geo.dim;
    let k = x.fiber_dim;
    let proto = xj.get(&[0, 0, 0, 0]).zero_like().truncated(0);
    let mut pterm = Tensor::zeros(xj.slots().to_vec(), xj.dims().to_vec(), &proto);
    for aa in 0..dim {
        for b in 0..dim {
            for i in 0..k {
                for jj in 0..k {
                    let mut acc = proto.clone();
                    for cc in 0..dim {
                        let pm = geo.schouten_mixed.get(&[aa, cc]).complexify();
                        acc = &acc + &pm.mul(xj.get(&[b, cc, i, jj]));
                    }
                    pterm.set(&[aa, b, i, jj], acc);
                }
            }
        }
    }
    let pterm = pterm
        .antisymmetrize(&[0, 1])?
        .scale(crate::num::lit::<F>(4.0));
    let jterm = xj.map(|v| v.mul(&geo.j_trace.complexify()));

    let total = term1.add(&pterm)?.add(&jterm)?;
    Ok(total.map(|v| v.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{coord_jets, Chart, Domain};
    use crate::geometry::euclidean_metric;

    fn pt(c: [f64; 6]) -> ChartPoint<f64> {
        ChartPoint::euclidean(c)
    }

    /// Abelian connection `A = i x_1 dx^0` (so `A_0 = i x_1`).
    fn abelian_linear() -> ConnectionField<f64> {
        ConnectionField::new("i*x1*dx0", 1, Chart::Euclidean6, Domain::All, 5, |p, order| {
            let x = coord_jets(p, order);
            let proto = x[0].complexify().zero_like();
            let mut a = Tensor::zeros(
                vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()],
                vec![6, 1, 1],
                &proto,
            );
            a.set(
                &[0, 0, 0],
                x[1].complexify().scaled_by(Complex::new(0.0, 1.0)),
            );
            Ok(a)
        })
    }

    fn constant_matrix_connection() -> ConnectionField<f64> {
        ConnectionField::new("const*dx0", 2, Chart::Euclidean6, Domain::All, 5, |p, order| {
            let dim = p.chart().dim();
            let proto = Jet::<Complex<f64>>::constant(dim, order, Complex::new(0.0, 0.0));
            let mut a = Tensor::zeros(
                vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()],
                vec![6, 2, 2],
                &proto,
            );
            a.set(&[0, 0, 0], Jet::constant(dim, order, Complex::new(0.0, 0.7)));
            a.set(&[0, 0, 1], Jet::constant(dim, order, Complex::new(0.3, 0.1)));
            a.set(&[0, 1, 0], Jet::constant(dim, order, Complex::new(-0.3, 0.1)));
            a.set(&[0, 1, 1], Jet::constant(dim, order, Complex::new(0.0, -0.2)));
            Ok(a)
        })
    }

    use crate::testkit::wavy_su2;

    #[test]
    fn abelian_linear_curvature_components() {
        let c = abelian_linear();
        let f = curvature(&c, &pt([0.3, 0.2, 0.0, -0.1, 0.4, 0.1]), 2).unwrap();
        let i = Complex::new(0.0, 1.0);
        assert_eq!(f.get(&[1, 0, 0, 0]).value(), i);
        assert_eq!(f.get(&[0, 1, 0, 0]).value(), -i);
        for a in 0..6 {
            for b in 0..6 {
                if (a, b) != (0, 1) && (a, b) != (1, 0) {
                    assert_eq!(f.get(&[a, b, 0, 0]).value(), Complex::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn constant_matrix_connection_is_flat() {
        let c = constant_matrix_connection();
        let m = euclidean_metric::<f64>();
        let p = pt([0.1, -0.2, 0.3, 0.0, 0.2, -0.1]);
        let geo = GeometryJet::compute(&m, &p, 3).unwrap();
        let gj = GaugeJet::compute(&c, &geo, 3).unwrap();
        assert!(gj.f.frob_norm() < 1e-15);
        assert!(gj.j.frob_norm() < 1e-15);
        assert!(gj.nabla_j.frob_norm() < 1e-15);
        assert!(gj.fsq.value().abs() < 1e-15);
    }

    #[test]
    fn bianchi_identity_for_nonabelian_connection() {
        let c = wavy_su2();
        let m = crate::testkit::bumpy_metric();
        for coords in [
            [0.2, -0.1, 0.3, 0.15, -0.25, 0.05],
            [-0.3, 0.2, 0.1, -0.05, 0.3, 0.25],
        ] {
            let p = pt(coords);
            let geo = GeometryJet::compute(&m, &p, 3).unwrap();
            let gj = GaugeJet::compute(&c, &geo, 3).unwrap();
            assert!(
                gj.bianchi_residual().unwrap() < 1e-10,
                "Bianchi residual too large"
            );
        }
    }

    #[test]
    fn commutator_on_bundle_vector_matches_curvatures() {
        // [∇_a, ∇_b] v^c = R_ab^c_d v^d + F_ab v^c for bundle-valued v.
        let c = wavy_su2();
        let m = crate::testkit::bumpy_metric();
        let p = pt([0.12, -0.08, 0.21, 0.17, -0.19, 0.04]);
        let geo = GeometryJet::compute(&m, &p, 4).unwrap();
        let a = c.components(&p, 3).unwrap();
        let x = coord_jets(&p, 3);
        let proto = x[0].complexify().zero_like();
        let mut v = Tensor::zeros(vec![Slot::st_up(), Slot::fiber_up()], vec![6, 2], &proto);
        for cc in 0..6 {
            for i in 0..2 {
                let f = &(&x[cc] * &x[(cc + i + 1) % 6]).scale(0.5)
                    + &x[(cc + 2 * i) % 6].sin().scale(0.3);
                v.set(&[cc, i], f.complexify());
            }
        }
        let gamma_c = geo.gamma_complex();
        let dv = covd(&v, &gamma_c, Some(&a)).unwrap();
        let ddv = covd(&dv, &gamma_c, Some(&a)).unwrap(); // [a, b, c(up), i]
        let f = curvature_from_components(&a, 2, 6).unwrap();
        let mut max_resid = 0.0f64;
        for aa in 0..6 {
            for b in 0..6 {
                for cc in 0..6 {
                    for i in 0..2 {
                        let comm =
                            ddv.get(&[aa, b, cc, i]).value() - ddv.get(&[b, aa, cc, i]).value();
                        let mut rhs = Complex::new(0.0, 0.0);
                        for d in 0..6 {
                            rhs += Complex::new(geo.riemann.get(&[aa, b, cc, d]).value(), 0.0)
                                * v.get(&[d, i]).value();
                        }
                        for e in 0..2 {
                            rhs += f.get(&[aa, b, i, e]).value() * v.get(&[cc, e]).value();
                        }
                        max_resid = max_resid.max((comm - rhs).norm());
                    }
                }
            }
        }
        assert!(max_resid < 1e-9, "commutator residual {max_resid}");
    }

    #[test]
    fn fsq_is_nonnegative_and_conformally_covariant() {
        let c = wavy_su2();
        let m = crate::testkit::bumpy_metric();
        let omega = ScalarField::new("omega", Chart::Euclidean6, Domain::All, 5, |p, order| {
            let x = coord_jets(p, order);
            Ok((&x[1].scale(0.3) + &x[4].scale(-0.15)).cos().scale(0.4).exp())
        });
        let mw = m.conformal_rescale(&omega);
        for coords in [
            [0.2, -0.1, 0.3, 0.15, -0.25, 0.05],
            [0.05, 0.33, -0.21, 0.12, 0.04, -0.4],
        ] {
            let p = pt(coords);
            let geo = GeometryJet::compute(&m, &p, 3).unwrap();
            let gj = GaugeJet::compute(&c, &geo, 3).unwrap();
            assert!(gj.fsq.value() >= 0.0);
            let geow = GeometryJet::compute(&mw, &p, 3).unwrap();
            let gjw = GaugeJet::compute(&c, &geow, 3).unwrap();
            let w = omega.value(&p).unwrap();
            let lhs = gjw.fsq.value();
            let rhs = gj.fsq.value() * w.powi(-4);
            assert!(
                (lhs - rhs).abs() / rhs.abs().max(1e-12) < 1e-10,
                "conformal weight of |F|² violated"
            );
        }
    }

    fn zero_coupling() -> ConnectionField<f64> {
        ConnectionField::new("zero", 1, Chart::Euclidean6, Domain::All, 5, |p, order| {
            let proto =
                Jet::<Complex<f64>>::constant(p.chart().dim(), order, Complex::new(0.0, 0.0));
            Ok(Tensor::zeros(
                vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()],
                vec![6, 1, 1],
                &proto,
            ))
        })
    }

    #[test]
    fn q2_of_constant_abelian_two_form_on_flat_space_vanishes() {
        let m = euclidean_metric::<f64>();
        let x = EndoTwoFormField::new("const-phi", 1, 4, |p, order| {
            let dim = p.chart().dim();
            let proto = Jet::<Complex<f64>>::constant(dim, order, Complex::new(0.0, 0.0));
            let mut t = Tensor::zeros(
                vec![
                    Slot::st_down(),
                    Slot::st_down(),
                    Slot::fiber_up(),
                    Slot::fiber_down(),
                ],
                vec![6, 6, 1, 1],
                &proto,
            );
            let i = Complex::new(0.0, 1.0);
            t.set(&[0, 1, 0, 0], Jet::constant(dim, order, i));
            t.set(&[1, 0, 0, 0], Jet::constant(dim, order, -i));
            Ok(t)
        });
        let out = q2_apply(
            &x,
            &zero_coupling(),
            &m,
            &pt([0.2, 0.1, -0.3, 0.0, 0.25, -0.15]),
        )
        .unwrap();
        assert!(out.frob_norm() < 1e-14);
    }

    #[test]
    fn q2_rejects_non_closed_two_form() {
        let m = euclidean_metric::<f64>();
        let x = EndoTwoFormField::new("not-closed", 1, 4, |p, order| {
            let x = coord_jets(p, order);
            let proto = x[0].complexify().zero_like();
            let mut t = Tensor::zeros(
                vec![
                    Slot::st_down(),
                    Slot::st_down(),
                    Slot::fiber_up(),
                    Slot::fiber_down(),
                ],
                vec![6, 6, 1, 1],
                &proto,
            );
            t.set(&[0, 1, 0, 0], x[2].complexify());
            t.set(&[1, 0, 0, 0], x[2].complexify().neg());
            Ok(t)
        });
        match q2_apply(
            &x,
            &zero_coupling(),
            &m,
            &pt([0.1, 0.0, 0.2, 0.0, 0.0, 0.0]),
        ) {
            Err(Error::NotClosed(r)) => assert!(r > 1e-3),
            other => panic!("expected NotClosed, got {other:?}"),
        }
    }

    #[test]
    fn grad_current_via_finite_difference_cross_check() {
        // ∇_a j_b vs finite differences of j plus the connection terms.
        let c = wavy_su2();
        let m = crate::testkit::bumpy_metric();
        let p = pt([0.15, -0.22, 0.08, 0.19, -0.11, 0.27]);
        let geo = GeometryJet::compute(&m, &p, 3).unwrap();
        let gj = GaugeJet::compute(&c, &geo, 3).unwrap();
        let a_vals = gj.conn.map(|x| x.value());
        let j_vals = gj.j.map(|x| x.value());
        for (aa, b, i, jj) in [(0usize, 1usize, 0usize, 1usize), (3, 2, 1, 0), (5, 4, 0, 0)] {
            let re = crate::fields::fd_oracle_fn(
                &|q: &ChartPoint<f64>| Ok(current(&c, &m, q)?.get(&[b, i, jj]).re),
                &p,
                &[aa],
                Some(1e-4),
            )
            .unwrap();
            let im = crate::fields::fd_oracle_fn(
                &|q: &ChartPoint<f64>| Ok(current(&c, &m, q)?.get(&[b, i, jj]).im),
                &p,
                &[aa],
                Some(1e-4),
            )
            .unwrap();
            let mut dj = Complex::new(re, im);
            for e in 0..6 {
                dj -= Complex::new(geo.gamma.get(&[e, aa, b]).value(), 0.0)
                    * j_vals.get(&[e, i, jj]);
            }
            for e in 0..2 {
                dj += a_vals.get(&[aa, i, e]) * j_vals.get(&[b, e, jj]);
                dj -= j_vals.get(&[b, i, e]) * a_vals.get(&[aa, e, jj]);
            }
            let exact = gj.nabla_j.get(&[aa, b, i, jj]).value();
            assert!(
                (dj - exact).norm() / exact.norm().max(1e-8) < 1e-6,
                "component ({aa},{b},{i},{jj}): fd {dj} exact {exact}"
            );
        }
    }
}
