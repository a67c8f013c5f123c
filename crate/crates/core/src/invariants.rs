//! Scalar invariants and operator identities of the renormalized-energy
//! construction: the Branson-Gover Q-curvature, the anomaly integrand, the
//! renormalized-energy integrand, the Weitzenboeck identity, conformal shift
//! laws, the curvature-weighted Schrodinger operator with its short-range
//! potential, and near-boundary asymptotics.
//!
//! All operations are pointwise; each evaluates the full geometry and gauge
//! stacks at the point and contracts. Complex traces of the anti-Hermitian
//! catalog are real up to roundoff; the real part is returned.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::{ChartPoint, ConnectionField, MetricField, ScalarField};
use crate::gauge::{self, GaugeJet};
use crate::geometry::{covd, defining_data, GeometryJet};
use crate::jet::Jet;
use crate::num::{extrapolate_to_zero, lit, rel_residual, Coeff, Real, Scalar};
use crate::tensor::{Slot, Tensor};

/// Absolute floor used in relative residuals.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// One pointwise identity evaluation.
#[derive(Clone, Debug)]
pub struct InvariantReport<F: Real> {
    pub identity: String,
    pub case: String,
    pub point_index: usize,
    pub point: Vec<F>,
    /// Left-hand scalar (or norm for tensor-valued identities).
    pub lhs: F,
    /// Right-hand scalar (or norm).
    pub rhs: F,
    /// `|lhs − rhs| / max(|lhs|, |rhs|, floor)`.
    pub residual: F,
    pub tolerance: F,
    pub pass: bool,
}

impl<F: Real> InvariantReport<F> {
    pub fn new(
        identity: impl Into<String>,
        case: impl Into<String>,
        point_index: usize,
        point: &ChartPoint<F>,
        lhs: F,
        rhs: F,
        tolerance: F,
    ) -> InvariantReport<F> {
        let residual = rel_residual(lhs, rhs, lit::<F>(RESIDUAL_FLOOR));
        InvariantReport {
            identity: identity.into(),
            case: case.into(),
            point_index,
            point: point.coords().to_vec(),
            lhs,
            rhs,
            residual,
            tolerance,
            pass: residual < tolerance,
        }
    }

    /// Report from a pre-computed residual of a tensor identity.
    pub fn from_norms(
        identity: impl Into<String>,
        case: impl Into<String>,
        point_index: usize,
        point: &ChartPoint<F>,
        diff_norm: F,
        scale: F,
        tolerance: F,
    ) -> InvariantReport<F> {
        let residual = diff_norm / scale.max(lit::<F>(RESIDUAL_FLOOR));
        InvariantReport {
            identity: identity.into(),
            case: case.into(),
            point_index,
            point: point.coords().to_vec(),
            lhs: diff_norm,
            rhs: scale,
            residual,
            tolerance,
            pass: residual < tolerance,
        }
    }
}

/// Geometry and gauge stacks at one point, shared by the scalar invariants.
pub struct PointStack<F: Real> {
    pub geo: GeometryJet<F>,
    pub gauge: GaugeJet<F>,
}

impl<F: Real> PointStack<F> {
    pub fn build(
        c: &ConnectionField<F>,
        m: &MetricField<F>,
        p: &ChartPoint<F>,
    ) -> Result<PointStack<F>> {
        let geo = GeometryJet::compute(m, p, 3)?;
        let gauge = GaugeJet::compute(c, &geo, 3.min(c.max_order()))?;
        Ok(PointStack { geo, gauge })
    }

    /// `Tr F^{ab} F_ab` as a real jet (equals `−|F|²`).
    fn f2_jet(&self) -> Jet<F> {
        self.gauge.fsq.scale(-F::one())
    }

    /// `Tr j^a j_a`.
    fn tr_j_sq(&self) -> F {
        let dim = self.geo.dim;
        let k = self.gauge.fiber_dim;
        let ginv = &self.geo.g_inv;
        let j = &self.gauge.j;
        let mut acc = Complex::<F>::from_real(F::zero());
        for a in 0..dim {
            for b in 0..dim {
                let w = ginv.get(&[a, b]).value();
                if w == F::zero() {
                    continue;
                }
                for i in 0..k {
                    for e in 0..k {
                        acc = acc + (j.get(&[a, i, e]).value() * j.get(&[b, e, i]).value()).scale(w);
                    }
                }
            }
        }
        acc.re()
    }

    /// `Tr F^{ab} ∇_a j_b`.
    fn tr_f_nabla_j(&self) -> F {
        let dim = self.geo.dim;
        let k = self.gauge.fiber_dim;
        let mut acc = Complex::<F>::from_real(F::zero());
        for a in 0..dim {
            for b in 0..dim {
                for i in 0..k {
                    for e in 0..k {
                        acc = acc
                            + self.gauge.f_up.get(&[a, b, i, e]).value()
                                * self.gauge.nabla_j.get(&[a, b, e, i]).value();
                    }
                }
            }
        }
        acc.re()
    }

    /// `Tr F^{ab} P_a^c F_bc`.
    fn tr_fpf(&self) -> F {
        let dim = self.geo.dim;
        let k = self.gauge.fiber_dim;
        let mut acc = Complex::<F>::from_real(F::zero());
        for a in 0..dim {
            for c in 0..dim {
                let pm = self.geo.schouten_mixed.get(&[a, c]).value();
                if pm == F::zero() {
                    continue;
                }
                for b in 0..dim {
                    for i in 0..k {
                        for e in 0..k {
                            acc = acc
                                + (self.gauge.f_up.get(&[a, b, i, e]).value()
                                    * self.gauge.f.get(&[b, c, e, i]).value())
                                .scale(pm);
                        }
                    }
                }
            }
        }
        acc.re()
    }

    /// `Tr (∇^c F^{ab}) ∇_c F_ab`.
    fn tr_nabla_f_sq(&self) -> Result<F> {
        let ginv_c = self.geo.g_inv_complex();
        let nf = &self.gauge.nabla_f;
        let nf_up = nf
            .raise_lower(0, &ginv_c)?
            .raise_lower(1, &ginv_c)?
            .raise_lower(2, &ginv_c)?;
        let dim = self.geo.dim;
        let k = self.gauge.fiber_dim;
        let mut acc = Complex::<F>::from_real(F::zero());
        for e in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    for i in 0..k {
                        for m in 0..k {
                            acc = acc
                                + nf_up.get(&[e, a, b, i, m]).value()
                                    * nf.get(&[e, a, b, m, i]).value();
                        }
                    }
                }
            }
        }
        Ok(acc.re())
    }

    /// `Tr F^{ab} W^c_ab^d F_dc`.
    fn tr_fwf(&self) -> Result<F> {
        // W^c_ab^d = g^{ce} g^{df} W_eabf from the all-lowered Weyl tensor
        let wl = self.geo.weyl.raise_lower(2, &self.geo.g)?;
        let wr = wl
            .raise_lower(0, &self.geo.g_inv)?
            .raise_lower(3, &self.geo.g_inv)?;
        let dim = self.geo.dim;
        let k = self.gauge.fiber_dim;
        let mut acc = Complex::<F>::from_real(F::zero());
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let w = wr.get(&[c, a, b, d]).value();
                        if w == F::zero() {
                            continue;
                        }
                        for i in 0..k {
                            for e in 0..k {
                                acc = acc
                                    + (self.gauge.f_up.get(&[a, b, i, e]).value()
                                        * self.gauge.f.get(&[d, c, e, i]).value())
                                    .scale(w);
                            }
                        }
                    }
                }
            }
        }
        Ok(acc.re())
    }

    /// `Tr F^{ab} F^c_a F_bc`.
    fn tr_fff(&self) -> Result<F> {
        let fm = self.gauge.f.raise_lower(0, &self.geo.g_inv_complex())?;
        let dim = self.geo.dim;
        let k = self.gauge.fiber_dim;
        let mut acc = Complex::<F>::from_real(F::zero());
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for i in 0..k {
                        for e1 in 0..k {
                            let x = self.gauge.f_up.get(&[a, b, i, e1]).value();
                            if x == Complex::from_real(F::zero()) {
                                continue;
                            }
                            for e2 in 0..k {
                                acc = acc
                                    + x * fm.get(&[c, a, e1, e2]).value()
                                        * self.gauge.f.get(&[b, c, e2, i]).value();
                            }
                        }
                    }
                }
            }
        }
        Ok(acc.re())
    }

    /// `Tr ∇_a (F^{ab} j_b)`: divergence of the fiber-traced vector.
    fn tr_div_fj(&self) -> Result<F> {
        let dim = self.geo.dim;
        let k = self.gauge.fiber_dim;
        let proto = self.gauge.j.get(&[0, 0, 0]).zero_like();
        let mut y = Tensor::zeros(
            vec![Slot::st_up(), Slot::fiber_up(), Slot::fiber_down()],
            vec![dim, k, k],
            &proto,
        );
        for a in 0..dim {
            for i in 0..k {
                for m in 0..k {
                    let mut acc = proto.clone();
                    for b in 0..dim {
                        for e in 0..k {
                            acc = &acc
                                + &self
                                    .gauge
                                    .f_up
                                    .get(&[a, b, i, e])
                                    .mul(self.gauge.j.get(&[b, e, m]));
                        }
                    }
                    y.set(&[a, i, m], acc);
                }
            }
        }
        let dy = covd(&y, &self.geo.gamma_complex(), Some(&self.gauge.conn))?;
        let div = dy.contract(0, 1)?; // ∇_a Y^a, still fiber-valued
        let tr = div.contract(0, 1)?;
        Ok(tr.scalar_value().value().re())
    }
}

/// Branson-Gover Q-curvature, expanded form:
/// `Q[g,A] = Tr(−F^{ab} ∇_a j_b + 4 F^{ab} P_a^c F_bc + J F^{ab} F_ab)`.
pub fn q_curvature<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<F> {
    let st = PointStack::build(c, m, p)?;
    Ok(q_curvature_stack(&st))
}

pub fn q_curvature_stack<F: Real>(st: &PointStack<F>) -> F {
    let f2 = st.f2_jet().value();
    -st.tr_f_nabla_j() + lit::<F>(4.0) * st.tr_fpf() + st.geo.j_trace.value() * f2
}

/// Q-curvature through the two-form operator: `Tr(F^{ab} Q₂F_ab)`.
pub fn q_curvature_via_operator<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<F> {
    let x = gauge::EndoTwoFormField::from_connection(c);
    let q2f = gauge::q2_apply(&x, c, m, p)?;
    let st = PointStack::build(c, m, p)?;
    let dim = st.geo.dim;
    let k = st.gauge.fiber_dim;
    let mut acc = Complex::<F>::from_real(F::zero());
    for a in 0..dim {
        for b in 0..dim {
            for i in 0..k {
                for e in 0..k {
                    acc = acc + st.gauge.f_up.get(&[a, b, i, e]).value() * *q2f.get(&[a, b, e, i]);
                }
            }
        }
    }
    Ok(acc.re())
}

/// Anomaly integrand:
/// `Tr(−¼ Δ(F^{ab}F_ab) − j^a j_a − 2 F^{ab} ∇_a j_b + 4 F^{ab} P_a^c F_bc
///    + J F^{ab} F_ab)`.
pub fn anomaly_integrand<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<F> {
    let st = PointStack::build(c, m, p)?;
    anomaly_integrand_stack(&st)
}

pub fn anomaly_integrand_stack<F: Real>(st: &PointStack<F>) -> Result<F> {
    let f2 = st.f2_jet();
    let lap = st.geo.laplacian(&f2)?.value();
    Ok(-lap.scale(lit::<F>(0.25)) - st.tr_j_sq() - lit::<F>(2.0) * st.tr_f_nabla_j()
        + lit::<F>(4.0) * st.tr_fpf()
        + st.geo.j_trace.value() * f2.value())
}

/// Renormalized-energy integrand (the six-term trace):
/// `Tr(−j^a j_a − ½ (∇^c F^{ab}) ∇_c F_ab + 6 F^{ab} P_a^c F_bc
///    − 3 F^{ab} ∇_a j_b + F^{ab} W^c_ab^d F_dc + 2 F^{ab} F^c_a F_bc)`.
pub fn eren_integrand<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<F> {
    let st = PointStack::build(c, m, p)?;
    eren_integrand_stack(&st)
}

pub fn eren_integrand_stack<F: Real>(st: &PointStack<F>) -> Result<F> {
    Ok(-st.tr_j_sq() - st.tr_nabla_f_sq()?.scale(lit::<F>(0.5))
        + lit::<F>(6.0) * st.tr_fpf()
        - lit::<F>(3.0) * st.tr_f_nabla_j()
        + st.tr_fwf()?
        + st.tr_fff()?.scale(lit::<F>(2.0)))
}

/// Both sides of the Weitzenboeck-type identity
/// `Tr(F W F + 2 F F F) =
///  Tr(−¼ Δ(F²) + ½ (∇F)² + F ∇j − 2 F P F + J F²)`.
pub fn weitzenboeck_sides<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<(F, F)> {
    let st = PointStack::build(c, m, p)?;
    weitzenboeck_sides_stack(&st)
}

pub fn weitzenboeck_sides_stack<F: Real>(st: &PointStack<F>) -> Result<(F, F)> {
    let lhs = st.tr_fwf()? + lit::<F>(2.0) * st.tr_fff()?;
    let f2 = st.f2_jet();
    let lap = st.geo.laplacian(&f2)?.value();
    let rhs = -lap.scale(lit::<F>(0.25)) + st.tr_nabla_f_sq()?.scale(lit::<F>(0.5))
        + st.tr_f_nabla_j()
        - lit::<F>(2.0) * st.tr_fpf()
        + st.geo.j_trace.value() * f2.value();
    Ok((lhs, rhs))
}

/// Both sides of the divergence identity relating the anomaly integrand to
/// the Q-curvature:
/// `𝒜 = Q + Tr(−¼ Δ(F²) − ∇_a (F^{ab} j_b))`.
pub fn anomaly_q_divergence_sides<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<(F, F)> {
    let st = PointStack::build(c, m, p)?;
    let lhs = anomaly_integrand_stack(&st)?;
    let f2 = st.f2_jet();
    let lap = st.geo.laplacian(&f2)?.value();
    let rhs = q_curvature_stack(&st) - lap.scale(lit::<F>(0.25)) - st.tr_div_fj()?;
    Ok((lhs, rhs))
}

/// Both sides of the conformal shift law of the Q-curvature:
/// `Ω⁶ Q[Ω²g, A] = Q[g, A] − 3 Tr F^{ab} ∇^c ∇_[c (F_ab] log Ω)`,
/// with all derivatives in the metric `g`.
pub fn q_shift_sides<F: Real>(
    c: &ConnectionField<F>,
    m: &MetricField<F>,
    omega: &ScalarField<F>,
    p: &ChartPoint<F>,
) -> Result<(F, F)> {
    let mw = m.conformal_rescale(omega);
    let w = omega.value(p)?;
    let lhs = w.powi(6) * q_curvature(c, &mw, p)?;

    let st = PointStack::build(c, m, p)?;
    let logw = omega.jet(p, 3)?.ln()?.complexify();
    // U_ab = F_ab log Ω, three-slot alternation of ∇_c U_ab, then ∇^c
    let u = st.gauge.f.map(|x| x.mul(&logw));
    let gamma_c = st.geo.gamma_complex();
    let du = covd(&u, &gamma_c, Some(&st.gauge.conn))?;
    let alt = du.antisymmetrize(&[0, 1, 2])?;
    let dalt = covd(&alt, &gamma_c, Some(&st.gauge.conn))?;
    let div = dalt
        .raise_lower(0, &st.geo.g_inv_complex())?
        .contract(0, 1)?; // [a, b, fu, fd]
    let dim = st.geo.dim;
    let k = st.gauge.fiber_dim;
    let mut shift = Complex::<F>::from_real(F::zero());
    for a in 0..dim {
        for b in 0..dim {
            for i in 0..k {
                for e in 0..k {
                    shift = shift
                        + st.gauge.f_up.get(&[a, b, i, e]).value() * div.get(&[a, b, e, i]).value();
                }
            }
        }
    }
    let rhs = q_curvature_stack(&st) - lit::<F>(3.0) * shift.re();
    Ok((lhs, rhs))
}

/// Both sides of the interior shift law specialized to an Einstein metric
/// `g₊` and Yang-Mills connection:
/// `e^{6f} Q[e^{2f} g₊, A] = |F|² (1 + Δf) + (∇^a |F|²) ∇_a f
///  − 2 Tr ∇^c (F^{ab} F_ca ∇_b f)`, everything in `g₊`.
pub fn pe_shift_sides<F: Real>(
    c: &ConnectionField<F>,
    g_plus: &MetricField<F>,
    f_field: &ScalarField<F>,
    p: &ChartPoint<F>,
) -> Result<(F, F)> {
    let ff = f_field.clone();
    let omega = ScalarField::new(
        format!("exp[{}]", f_field.name),
        f_field.chart(),
        crate::fields::Domain::All,
        f_field.max_order(),
        move |q, order| Ok(ff.jet(q, order)?.exp()),
    );
    let mw = g_plus.conformal_rescale(&omega);
    let fv = f_field.jet(p, 3)?;
    let lhs = (fv.value() * lit::<F>(6.0)).exp() * q_curvature(c, &mw, p)?;

    let st = PointStack::build(c, g_plus, p)?;
    let fsq = st.gauge.fsq.clone();
    let lap_f = st.geo.laplacian(&fv)?.value();
    let t1 = fsq.value() * (F::one() + lap_f);
    let grad_fsq = st.geo.gradient_up(&fsq)?;
    let mut t2 = F::zero();
    for a in 0..st.geo.dim {
        t2 = t2 + grad_fsq.get(&[a]).value() * fv.d1(a);
    }
    // X_c = Tr(F^{ab} F_ca) ∇_b f as a complex jet vector, then ∇^c X_c
    let dim = st.geo.dim;
    let k = st.gauge.fiber_dim;
    let df: Vec<Jet<Complex<F>>> = (0..dim)
        .map(|b| fv.partial(b).map(|j| j.complexify()))
        .collect::<Result<_>>()?;
    let proto = st.gauge.j.get(&[0, 0, 0]).zero_like();
    let mut x = Tensor::zeros(
        vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()],
        vec![dim, k, k],
        &proto,
    );
    for cc in 0..dim {
        for i in 0..k {
            for m in 0..k {
                let mut acc = proto.clone();
                for a in 0..dim {
                    for b in 0..dim {
                        for e in 0..k {
                            let t = st
                                .gauge
                                .f_up
                                .get(&[a, b, i, e])
                                .mul(st.gauge.f.get(&[cc, a, e, m]));
                            acc = &acc + &t.mul(&df[b]);
                        }
                    }
                }
                x.set(&[cc, i, m], acc);
            }
        }
    }
    let dx = covd(&x, &st.geo.gamma_complex(), Some(&st.gauge.conn))?;
    let div = dx.raise_lower(0, &st.geo.g_inv_complex())?.contract(0, 1)?;
    let tr = div.contract(0, 1)?.scalar_value().value().re();
    let rhs = t1 + t2 - lit::<F>(2.0) * tr;
    Ok((lhs, rhs))
}

/// The curvature-weighted Laplacian
/// `Δ^{g₊,A} f = |F|⁻¹ ∇·(|F|² ∇(f/|F|))` evaluated two ways: the
/// self-adjoint form and the potential form `Δ f − f Δ|F|/|F|`
/// (all in the interior metric `g₊ = g/σ²`).
pub fn schrodinger_apply<F: Real>(
    c: &ConnectionField<F>,
    m_compact: &MetricField<F>,
    sigma: &ScalarField<F>,
    f_field: &ScalarField<F>,
    p: &ChartPoint<F>,
) -> Result<(F, F)> {
    let g_plus = m_compact.rescale_by_inverse(sigma);
    let st = PointStack::build(c, &g_plus, p)?;
    let f_jet = f_field.jet(p, 3)?;
    schrodinger_apply_jet(&st, &f_jet)
}

/// Same, with the scalar argument already evaluated as a jet at the point.
pub fn schrodinger_apply_jet<F: Real>(
    st: &PointStack<F>,
    f_jet: &Jet<F>,
) -> Result<(F, F)> {
    let fnorm = st.gauge.f_norm()?;
    // self-adjoint route
    let u = f_jet.try_div(&fnorm)?;
    let grad_u = st.geo.gradient_up(&u)?;
    let x = grad_u.map(|c| c.mul(&st.gauge.fsq));
    let div = st.geo.divergence(&x)?;
    let selfadj = div.value() / fnorm.value();
    // potential route
    let lap_f = st.geo.laplacian(f_jet)?.value();
    let lap_norm = st.geo.laplacian(&fnorm)?.value();
    let pot = lap_f - f_jet.value() * lap_norm / fnorm.value();
    Ok((selfadj, pot))
}

/// Short-range potential `V = Δ_{g₊}|F|_{g₊} / |F|_{g₊} + 2(d−3)` through
/// its boundary-smooth compactified form
/// `V = σ² (Δ^g Φ − 2 J^g Φ)/Φ` with `Φ = |F|_g`, valid up to the boundary.
pub fn potential_v<F: Real>(
    c: &ConnectionField<F>,
    m_compact: &MetricField<F>,
    sigma: &ScalarField<F>,
    p: &ChartPoint<F>,
) -> Result<F> {
    let st = PointStack::build(c, m_compact, p)?;
    let phi = st.gauge.f_norm()?;
    let lap_phi = st.geo.laplacian(&phi)?.value();
    let s = sigma.value(p)?;
    Ok(s * s * (lap_phi - lit::<F>(2.0) * st.geo.j_trace.value() * phi.value()) / phi.value())
}

/// The same potential computed directly in the interior metric,
/// `Δ_{g₊}|F|_{g₊}/|F|_{g₊} + 2(d−3)`; only valid away from the boundary.
pub fn potential_v_interior<F: Real>(
    c: &ConnectionField<F>,
    m_compact: &MetricField<F>,
    sigma: &ScalarField<F>,
    p: &ChartPoint<F>,
) -> Result<F> {
    let g_plus = m_compact.rescale_by_inverse(sigma);
    let st = PointStack::build(c, &g_plus, p)?;
    let fnorm = st.gauge.f_norm()?;
    let lap = st.geo.laplacian(&fnorm)?.value();
    Ok(lap / fnorm.value() + lit::<F>(2.0 * 3.0))
}

/// Fit of the decay order of the asymptotic-solution residual.
pub struct AsymFit<F: Real> {
    /// Fitted exponent of `σ` in the relative residual (with a logarithmic
    /// correction term in the fit basis).
    pub exponent: F,
    /// `(σ, residual)` samples along the ray.
    pub samples: Vec<(F, F)>,
}

/// Evaluate `Δ^{g₊,A} f + |F|_{g₊}` for `f = |F|_{g₊}((1+Kσ) log σ + G σ)`
/// along the radial ray `r_k = 1 − 2^{−k}`, divide by `|F|_{g₊}`, and fit
/// the decay exponent of the relative residual in `σ`.
///
/// `k_const` is the constant extension of the log-coefficient correction
/// (zero for the true asymptotic solution) and `g_field` the smooth
/// next-order coefficient (`None` for zero).
pub fn asym_residual_order<F: Real>(
    c: &ConnectionField<F>,
    m_compact: &MetricField<F>,
    sigma: &ScalarField<F>,
    direction: &[F; 6],
    k_range: std::ops::RangeInclusive<u32>,
    k_const: F,
    g_field: Option<&ScalarField<F>>,
) -> Result<AsymFit<F>> {
    let g_plus = m_compact.rescale_by_inverse(sigma);
    let mut norm = F::zero();
    for d in direction.iter() {
        norm = norm + *d * *d;
    }
    let norm = norm.sqrt();
    let mut samples = Vec::new();
    for k in k_range {
        let r = F::one() - lit::<F>(0.5).powi(k as i32);
        let coords: Vec<F> = direction.iter().map(|&d| d / norm * r).collect();
        let p = ChartPoint::new(crate::fields::Chart::Euclidean6, &coords)?;
        let st = PointStack::build(c, &g_plus, &p)?;
        let s_jet = sigma.jet(&p, 3)?;
        let fnorm = st.gauge.f_norm()?;
        // f = |F| ((1 + K σ) log σ + G σ)
        let log_s = s_jet.ln()?;
        let mut inner = (&Jet::constant(6, s_jet.order(), F::one()) + &s_jet.scale(k_const)).mul(&log_s);
        if let Some(gf) = g_field {
            inner = &inner + &gf.jet(&p, 3)?.mul(&s_jet);
        }
        let f_jet = fnorm.mul(&inner);
        let (apply, _) = schrodinger_apply_jet(&st, &f_jet)?;
        let resid = (apply + fnorm.value()) / fnorm.value();
        samples.push((s_jet.value(), resid));
    }
    // monotone decay of |residual| toward the boundary (small tolerance for
    // the leading-order transition)
    for w in samples.windows(2) {
        let (s0, r0) = w[0];
        let (s1, r1) = w[1];
        if s1 < s0 && r1.abs() > r0.abs() * lit::<F>(1.2) {
            return Err(Error::Fit(format!(
                "residual sequence not decaying: |r({s0:e})| = {:e}, |r({s1:e})| = {:e}",
                r0.abs(),
                r1.abs()
            )));
        }
    }
    // Fit the decay exponent on the asymptotic tail (the largest shells
    // carry higher-order transients). Two models are compared: a pure power
    // `log|r| = α log σ + β` and the log-corrected
    // `log|r| = α log σ + β + log(−log σ)`; the basis `{log σ, 1,
    // log(−log σ)}` is too collinear over the sampled window to fit the
    // correction freely, so its presence is model-selected instead.
    let tail = samples.len().saturating_sub(8);
    let fit2 = |with_log: bool| -> Result<(F, F)> {
        let mut ata = vec![F::zero(); 4];
        let mut atb = vec![F::zero(); 2];
        let mut rows = Vec::new();
        for &(s, r) in &samples[tail..] {
            let x = s.ln();
            let mut y = r.abs().max(lit::<F>(1e-300)).ln();
            if with_log {
                y = y - (-x).ln();
            }
            rows.push((x, y));
            let row = [x, F::one()];
            for i in 0..2 {
                for j in 0..2 {
                    ata[i * 2 + j] = ata[i * 2 + j] + row[i] * row[j];
                }
                atb[i] = atb[i] + row[i] * y;
            }
        }
        crate::num::solve_linear(&mut ata, &mut atb)?;
        let mut sse = F::zero();
        for (x, y) in rows {
            let e = y - (atb[0] * x + atb[1]);
            sse = sse + e * e;
        }
        Ok((atb[0], sse))
    };
    let (a0, e0) = fit2(false)?;
    let (a1, e1) = fit2(true)?;
    let exponent = if e1 < e0 { a1 } else { a0 };
    Ok(AsymFit { exponent, samples })
}

/// Boundary combination `(∇_n̂ + 4 H) |F|²_g`, sampled on shells
/// `σ ∈ {1e-2, 5e-3, 2.5e-3}` along a radial direction and extrapolated to
/// the boundary.
pub fn blue_boundary_check<F: Real>(
    c: &ConnectionField<F>,
    m_compact: &MetricField<F>,
    sigma: &ScalarField<F>,
    direction: &[F; 6],
) -> Result<F> {
    let mut norm = F::zero();
    for d in direction.iter() {
        norm = norm + *d * *d;
    }
    let norm = norm.sqrt();
    let mut samples = Vec::new();
    for shell in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let s = lit::<F>(shell);
        // on the ball chart σ = (1−r²)/2 so r = sqrt(1−2σ)
        let r = (F::one() - s - s).sqrt();
        let coords: Vec<F> = direction.iter().map(|&d| d / norm * r).collect();
        let p = ChartPoint::new(crate::fields::Chart::Euclidean6, &coords)?;
        let st = PointStack::build(c, m_compact, &p)?;
        let dd = defining_data(m_compact, sigma, &p)?;
        let fsq = &st.gauge.fsq;
        // unit normal n̂^a = g^{ab} n_b / |n|_g
        let nlen = dd.n_sq.sqrt();
        let mut dn = F::zero();
        for a in 0..st.geo.dim {
            dn = dn + *dd.n_up.get(&[a]) * fsq.d1(a);
        }
        let value = dn / nlen + lit::<F>(4.0) * dd.mean_curvature * fsq.value();
        samples.push((s, value));
    }
    Ok(extrapolate_to_zero(&samples))
}

// ---------------------------------------------------------------------------
// Tractor-connection trace identities
// ---------------------------------------------------------------------------

/// Scalar curvature contractions entering the tractor trace identities.
pub struct WeylScalars<F: Real> {
    /// `C_abc C^{abc}`.
    pub cotton_sq: F,
    /// `W^{abcd} ∇_d C_abc`.
    pub weyl_grad_cotton: F,
    /// `W^{abce} P_ef W_abc^f`.
    pub weyl_p_weyl: F,
    /// `(∇^e W^{abcd})(∇_e W_abcd)`.
    pub grad_weyl_sq: F,
    /// `W^{ab}{}^{ef} W_{abcd} W^{cd}_{ef}` (pair-chained cube).
    pub weyl_cube_chain: F,
    /// `W^{abcd} W_{aecf} W_b^e_d^f` (interlocked cube).
    pub weyl_cube_linked: F,
    /// `|W|² = W_abcd W^{abcd}`.
    pub weyl_sq: F,
}

pub fn weyl_scalars<F: Real>(m: &MetricField<F>, p: &ChartPoint<F>) -> Result<WeylScalars<F>> {
    let geo = GeometryJet::compute(m, p, 4)?;
    let dim = geo.dim;
    let wl = geo.weyl.raise_lower(2, &geo.g)?; // W_abcd
    let wu = wl
        .raise_lower(0, &geo.g_inv)?
        .raise_lower(1, &geo.g_inv)?
        .raise_lower(2, &geo.g_inv)?
        .raise_lower(3, &geo.g_inv)?; // W^{abcd}
    let cot = geo.cotton()?;
    let cotu = cot
        .raise_lower(0, &geo.g_inv)?
        .raise_lower(1, &geo.g_inv)?
        .raise_lower(2, &geo.g_inv)?;
    let mut cotton_sq = F::zero();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                cotton_sq = cotton_sq + cot.get(&[a, b, c]).value() * cotu.get(&[a, b, c]).value();
            }
        }
    }
    let dc = covd(cot, &geo.gamma, None)?; // ∇_e C_abc
    let mut weyl_grad_cotton = F::zero();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    weyl_grad_cotton = weyl_grad_cotton
                        + wu.get(&[a, b, c, d]).value() * dc.get(&[d, a, b, c]).value();
                }
            }
        }
    }
    // W^{abce} P_ef W_abc^f
    let w_last_up = wl.raise_lower(3, &geo.g_inv)?; // W_abc^f
    let mut weyl_p_weyl = F::zero();
    for e in 0..dim {
        for f in 0..dim {
            let pv = geo.schouten.get(&[e, f]).value();
            if pv == F::zero() {
                continue;
            }
            let mut m_ef = F::zero();
            for a in 0..dim {
                for b in 0..dim {
                    for c in 0..dim {
                        m_ef = m_ef
                            + wu.get(&[a, b, c, e]).value() * w_last_up.get(&[a, b, c, f]).value();
                    }
                }
            }
            weyl_p_weyl = weyl_p_weyl + pv * m_ef;
        }
    }
    // (∇W)²
    let dwl = covd(&wl, &geo.gamma, None)?;
    let mut dwu = dwl.raise_lower(0, &geo.g_inv)?;
    for s in 1..5 {
        dwu = dwu.raise_lower(s, &geo.g_inv)?;
    }
    let mut grad_weyl_sq = F::zero();
    for e in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        grad_weyl_sq = grad_weyl_sq
                            + dwu.get(&[e, a, b, c, d]).value() * dwl.get(&[e, a, b, c, d]).value();
                    }
                }
            }
        }
    }
    // cubes
    let w_pair_up = wl.raise_lower(0, &geo.g_inv)?.raise_lower(1, &geo.g_inv)?; // W^{ab}_{cd}
    let mut weyl_cube_chain = F::zero();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    let m1 = wl.get(&[a, b, c, d]).value();
                    if m1 == F::zero() {
                        continue;
                    }
                    for e in 0..dim {
                        for f in 0..dim {
                            weyl_cube_chain = weyl_cube_chain
                                + wu.get(&[a, b, e, f]).value()
                                    * m1
                                    * w_pair_up.get(&[c, d, e, f]).value();
                        }
                    }
                }
            }
        }
    }
    // W^{abcd} W_aecf W_b^e_d^f
    let w_24_up = wl.raise_lower(1, &geo.g_inv)?.raise_lower(3, &geo.g_inv)?; // W_a^e_c^f
    let mut weyl_cube_linked = F::zero();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    let m1 = wu.get(&[a, b, c, d]).value();
                    if m1 == F::zero() {
                        continue;
                    }
                    for e in 0..dim {
                        for f in 0..dim {
                            weyl_cube_linked = weyl_cube_linked
                                + m1 * wl.get(&[a, e, c, f]).value()
                                    * w_24_up.get(&[b, e, d, f]).value();
                        }
                    }
                }
            }
        }
    }
    let mut weyl_sq = F::zero();
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    weyl_sq = weyl_sq + wl.get(&[a, b, c, d]).value() * wu.get(&[a, b, c, d]).value();
                }
            }
        }
    }
    Ok(WeylScalars {
        cotton_sq,
        weyl_grad_cotton,
        weyl_p_weyl,
        grad_weyl_sq,
        weyl_cube_chain,
        weyl_cube_linked,
        weyl_sq,
    })
}

/// The trace identities satisfied by the tractor connection of `g` in the
/// metric `g` itself (d = 6), each returned as `(label, lhs, rhs)`:
///
/// * `Tr j^a j_a = −(d−4)² C²`
/// * `Tr F^{ab} ∇_a j_b = −(d−4)(C² − W·∇C)`
/// * `Tr (∇^c F^{ab})(∇_c F_ab) = −(∇W)² + 2(d−4) C² + 4 W·∇C − 4 W P W`
/// * the renormalized-energy integrand of the tractor connection against
///   its curvature-scalar expansion (see [`weyl_expansion_rhs`]).
pub fn tractor_trace_identities<F: Real>(
    g: &MetricField<F>,
    p: &ChartPoint<F>,
) -> Result<Vec<(String, F, F)>> {
    let tr = crate::models::tractor_connection(g);
    let st = PointStack::build(&tr, g, p)?;
    let ws = weyl_scalars(g, p)?;
    let dm4 = lit::<F>(2.0); // d − 4
    let mut out = Vec::new();
    out.push((
        "tractor-current-square".to_string(),
        st.tr_j_sq(),
        -dm4 * dm4 * ws.cotton_sq,
    ));
    out.push((
        "tractor-f-grad-current".to_string(),
        st.tr_f_nabla_j(),
        -dm4 * (ws.cotton_sq - ws.weyl_grad_cotton),
    ));
    out.push((
        "tractor-grad-f-square".to_string(),
        st.tr_nabla_f_sq()?,
        -ws.grad_weyl_sq + lit::<F>(2.0) * dm4 * ws.cotton_sq
            + lit::<F>(4.0) * ws.weyl_grad_cotton
            - lit::<F>(4.0) * ws.weyl_p_weyl,
    ));
    out.push((
        "tractor-renorm-integrand".to_string(),
        eren_integrand_stack(&st)?,
        weyl_expansion_rhs(&ws),
    ));
    Ok(out)
}

/// Curvature-scalar expansion of the renormalized-energy integrand of the
/// tractor connection:
/// `½(∇W)² − 8 W·∇C + 8 C² + 8 W P W − ½ W³(chain) − 2 W³(linked)`.
///
/// The overall sign is fixed by agreement with the directly computed
/// integrand on random (non-Einstein) metrics; the first three trace
/// identities pin every quadratic scalar individually, leaving no other
/// freedom.
pub fn weyl_expansion_rhs<F: Real>(ws: &WeylScalars<F>) -> F {
    ws.grad_weyl_sq.scale(lit::<F>(0.5)) - lit::<F>(8.0) * ws.weyl_grad_cotton
        + lit::<F>(8.0) * ws.cotton_sq
        + lit::<F>(8.0) * ws.weyl_p_weyl
        - ws.weyl_cube_chain.scale(lit::<F>(0.5))
        - lit::<F>(2.0) * ws.weyl_cube_linked
}
