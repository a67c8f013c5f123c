//! Riemannian data of a metric at a point.
//!
//! Curvature conventions: the Riemann tensor is defined by
//! `[∇_a, ∇_b] v^c = R_ab^c_d v^d`, the Ricci tensor by
//! `Ric_ab = -R_ac^c_b`, the Schouten tensor `P` and its trace `J` by
//! `Ric = (d-2) P + g J`, the Weyl tensor by
//! `R_abcd = W_abcd + g_ac P_bd - g_bc P_ad + g_bd P_ac - g_ad P_bc`
//! (third slot lowered), and the Cotton tensor by
//! `C_abc = ∇_a P_bc - ∇_b P_ac`. The divergence of Weyl then satisfies
//! `∇^a W_abcd = (d-3) C_cdb`, which the test suite checks numerically.
//!
//! Everything at a point is jet-valued, so derived quantities remain
//! differentiable within the remaining order budget.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::{coord_jets, ChartPoint, MetricField, ScalarField};
use crate::jet::Jet;
use crate::num::{is_positive_definite, lit, Coeff, Real, Scalar};
use crate::tensor::{for_each_index, Position, Slot, SlotKind, Tensor};

/// Invert a rank-2 all-down jet matrix by Gauss-Jordan elimination with
/// value-magnitude pivoting. Returns the `[up,up]` inverse and the
/// determinant jet.
pub fn invert_jet_matrix<F: Real>(g: &Tensor<Jet<F>>) -> Result<(Tensor<Jet<F>>, Jet<F>)> {
    let dim = g.dims()[0];
    let proto = g.get(&[0, 0]).zero_like();
    let one = &proto + &Jet::constant(proto.nvars(), proto.order(), F::one());
    let mut a: Vec<Vec<Jet<F>>> = (0..dim)
        .map(|i| (0..dim).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();
    let mut inv: Vec<Vec<Jet<F>>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { one.clone() } else { proto.clone() })
                .collect()
        })
        .collect();
    let mut det = one.clone();
    let mut sign = F::one();
    for col in 0..dim {
        let mut piv = col;
        let mut best = a[col][col].value().abs();
        for r in col + 1..dim {
            let v = a[r][col].value().abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > F::zero()) {
            return Err(Error::SingularMetric(
                "pivot vanished during inversion".to_string(),
            ));
        }
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            sign = -sign;
        }
        let pivot = a[col][col].clone();
        det = det.mul(&pivot);
        let pinv = pivot.try_recip()?;
        for c in 0..dim {
            a[col][c] = a[col][c].mul(&pinv);
            inv[col][c] = inv[col][c].mul(&pinv);
        }
        for r in 0..dim {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..dim {
                a[r][c] = &a[r][c] - &f.mul(&a[col][c]);
                inv[r][c] = &inv[r][c] - &f.mul(&inv[col][c]);
            }
        }
    }
    let up = Slot::st_up();
    let out = Tensor::from_fn(vec![up, up], vec![dim, dim], |idx| {
        inv[idx[0]][idx[1]].clone()
    });
    Ok((out, det.scale(sign)))
}

/// Levi-Civita covariant derivative of a jet tensor, optionally coupled to a
/// connection on the fiber slots. The derivative slot is prepended.
///
/// `gamma` carries `Γ^c_ab` as `[up,dn,dn]`; `conn`, when present, carries
/// `A_a` as `[dn, fiber_up, fiber_down]`. Fiber-up slots receive `+A·t`,
/// fiber-down slots `-t·A`, so endomorphism-valued tensors are coupled by
/// the commutator.
pub fn covd<S: Scalar>(
    t: &Tensor<Jet<S>>,
    gamma: &Tensor<Jet<S>>,
    conn: Option<&Tensor<Jet<S>>>,
) -> Result<Tensor<Jet<S>>> {
    let dim = gamma.dims()[0];
    let proto = if t.rank() == 0 {
        t.scalar_value().zero_like()
    } else {
        t.get(&vec![0; t.rank()]).zero_like()
    };
    if proto.order() == 0 {
        return Err(Error::Order(
            "covariant derivative exhausts the jet order budget".to_string(),
        ));
    }
    let mut slots = vec![Slot::st_down()];
    slots.extend_from_slice(t.slots());
    let mut dims = vec![dim];
    dims.extend_from_slice(t.dims());
    let st_slots: Vec<(usize, Position)> = t
        .slots()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.kind == SlotKind::Spacetime)
        .map(|(i, s)| (i, s.pos))
        .collect();
    let fib_slots: Vec<(usize, Position)> = t
        .slots()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.kind == SlotKind::Fiber)
        .map(|(i, s)| (i, s.pos))
        .collect();
    if !fib_slots.is_empty() && conn.is_none() {
        return Err(Error::Slot(
            "fiber-valued tensor needs a connection coupling".to_string(),
        ));
    }
    let sub = proto.truncated(proto.order() - 1);
    let mut out = Tensor::zeros(slots, dims, &sub);
    let out_dims = out.dims().to_vec();
    let mut scratch = vec![0usize; t.rank()];
    let mut failed: Option<Error> = None;
    for_each_index(&out_dims, |full| {
        if failed.is_some() {
            return;
        }
        let a = full[0];
        let idx = &full[1..];
        let mut acc = match t.get(idx).partial(a) {
            Ok(v) => v,
            Err(e) => {
                failed = Some(e);
                return;
            }
        };
        for &(s, pos) in &st_slots {
            scratch.copy_from_slice(idx);
            match pos {
                Position::Up => {
                    for e in 0..dim {
                        scratch[s] = e;
                        acc = &acc + &gamma.get(&[idx[s], a, e]).mul(t.get(&scratch));
                    }
                }
                Position::Down => {
                    for e in 0..dim {
                        scratch[s] = e;
                        acc = &acc - &gamma.get(&[e, a, idx[s]]).mul(t.get(&scratch));
                    }
                }
            }
        }
        if let Some(aa) = conn {
            let k = aa.dims()[1];
            for &(s, pos) in &fib_slots {
                scratch.copy_from_slice(idx);
                match pos {
                    Position::Up => {
                        for e in 0..k {
                            scratch[s] = e;
                            acc = &acc + &aa.get(&[a, idx[s], e]).mul(t.get(&scratch));
                        }
                    }
                    Position::Down => {
                        for e in 0..k {
                            scratch[s] = e;
                            acc = &acc - &t.get(&scratch).mul(aa.get(&[a, e, idx[s]]));
                        }
                    }
                }
            }
        }
        out.set(full, acc);
    });
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(out)
}

/// All Riemannian data of a metric at a point, jet-valued.
pub struct GeometryJet<F: Real> {
    pub at: ChartPoint<F>,
    pub order: usize,
    pub dim: usize,
    /// Metric components `g_ab`.
    pub g: Tensor<Jet<F>>,
    /// Inverse metric `g^ab`.
    pub g_inv: Tensor<Jet<F>>,
    /// Christoffel symbols `Γ^c_ab` as `[up,dn,dn]`.
    pub gamma: Tensor<Jet<F>>,
    /// `∂_d Γ^c_ab` as `[dn,up,dn,dn]`.
    pub dgamma: Tensor<Jet<F>>,
    /// Riemann tensor `R_ab^c_d` as `[dn,dn,up,dn]`.
    pub riemann: Tensor<Jet<F>>,
    /// Ricci tensor `Ric_ab`.
    pub ricci: Tensor<Jet<F>>,
    /// Schouten tensor `P_ab`.
    pub schouten: Tensor<Jet<F>>,
    /// Schouten with one index raised, `P_a^c` as `[dn,up]`.
    pub schouten_mixed: Tensor<Jet<F>>,
    /// Schouten trace `J`.
    pub j_trace: Jet<F>,
    /// Weyl tensor `W_ab^c_d` as `[dn,dn,up,dn]`.
    pub weyl: Tensor<Jet<F>>,
    /// Cotton tensor `C_abc` (needs metric jets of order >= 3).
    pub cotton: Option<Tensor<Jet<F>>>,
    /// Volume density `sqrt(det g)`.
    pub vol_density: Jet<F>,
}

impl<F: Real> GeometryJet<F> {
    /// Compute the full stack from metric jets of the given order
    /// (`order >= 2`; the Cotton tensor additionally needs `order >= 3`).
    pub fn compute(m: &MetricField<F>, p: &ChartPoint<F>, order: usize) -> Result<GeometryJet<F>> {
        if order < 2 {
            return Err(Error::Order(
                "curvature needs metric jets of order >= 2".to_string(),
            ));
        }
        let dim = p.chart().dim();
        let g = m.components(p, order)?;
        let vals: Vec<F> = (0..dim * dim)
            .map(|t| g.get(&[t / dim, t % dim]).value())
            .collect();
        if !is_positive_definite(&vals, dim) {
            return Err(Error::SingularMetric(format!(
                "metric `{}` not positive definite at {:?}",
                m.name,
                p.coords()
            )));
        }
        let (g_inv, det) = invert_jet_matrix(&g)?;
        let vol_density = det.sqrt()?;

        let up = Slot::st_up();
        let dn = Slot::st_down();

        // dg[d][a][b] = ∂_d g_ab
        let mut dg = Tensor::zeros(
            vec![dn, dn, dn],
            vec![dim, dim, dim],
            &g.get(&[0, 0]).truncated(order - 1),
        );
        for d in 0..dim {
            for a in 0..dim {
                for b in a..dim {
                    let v = g.get(&[a, b]).partial(d)?;
                    dg.set(&[d, a, b], v.clone());
                    if a != b {
                        dg.set(&[d, b, a], v);
                    }
                }
            }
        }

        // Γ^c_ab = ½ g^{cd}(∂_a g_db + ∂_b g_da − ∂_d g_ab)
        let proto1 = dg.get(&[0, 0, 0]).zero_like();
        let mut gamma = Tensor::zeros(vec![up, dn, dn], vec![dim, dim, dim], &proto1);
        for a in 0..dim {
            for b in a..dim {
                for c in 0..dim {
                    let mut acc = proto1.clone();
                    for d in 0..dim {
                        let sym = &(dg.get(&[a, d, b]) + dg.get(&[b, d, a])) - dg.get(&[d, a, b]);
                        acc = &acc + &g_inv.get(&[c, d]).mul(&sym);
                    }
                    let v = acc.scale(lit::<F>(0.5));
                    gamma.set(&[c, a, b], v.clone());
                    if a != b {
                        gamma.set(&[c, b, a], v);
                    }
                }
            }
        }

        // ∂Γ
        let proto2 = proto1.truncated(order - 2);
        let mut dgamma = Tensor::zeros(vec![dn, up, dn, dn], vec![dim; 4], &proto2);
        for d in 0..dim {
            for c in 0..dim {
                for a in 0..dim {
                    for b in a..dim {
                        let v = gamma.get(&[c, a, b]).partial(d)?;
                        dgamma.set(&[d, c, a, b], v.clone());
                        if a != b {
                            dgamma.set(&[d, c, b, a], v);
                        }
                    }
                }
            }
        }

        // R_ab^c_d = ∂_a Γ^c_bd − ∂_b Γ^c_ad + Γ^c_ae Γ^e_bd − Γ^c_be Γ^e_ad
        let mut riemann = Tensor::zeros(vec![dn, dn, up, dn], vec![dim; 4], &proto2);
        for a in 0..dim {
            for b in a + 1..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let mut acc = dgamma.get(&[a, c, b, d]) - dgamma.get(&[b, c, a, d]);
                        for e in 0..dim {
                            acc = &acc + &gamma.get(&[c, a, e]).mul(gamma.get(&[e, b, d]));
                            acc = &acc - &gamma.get(&[c, b, e]).mul(gamma.get(&[e, a, d]));
                        }
                        riemann.set(&[a, b, c, d], acc.clone());
                        riemann.set(&[b, a, c, d], acc.neg());
                    }
                }
            }
        }

        // Ric_ab = −R_ac^c_b
        let mut ricci = Tensor::zeros(vec![dn, dn], vec![dim, dim], &proto2);
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = proto2.clone();
                for c in 0..dim {
                    acc = &acc + riemann.get(&[a, c, c, b]);
                }
                ricci.set(&[a, b], acc.neg());
            }
        }

        // scalar curvature, J, Schouten
        let mut scal = proto2.clone();
        for a in 0..dim {
            for b in 0..dim {
                scal = &scal + &g_inv.get(&[a, b]).mul(ricci.get(&[a, b]));
            }
        }
        let j_trace = scal.scale(lit::<F>(1.0 / (2.0 * (dim as f64 - 1.0))));
        let inv_dm2 = lit::<F>(1.0 / (dim as f64 - 2.0));
        let mut schouten = Tensor::zeros(vec![dn, dn], vec![dim, dim], &proto2);
        for a in 0..dim {
            for b in 0..dim {
                let v = (ricci.get(&[a, b]) - &g.get(&[a, b]).mul(&j_trace)).scale(inv_dm2);
                schouten.set(&[a, b], v);
            }
        }
        let mut schouten_mixed = Tensor::zeros(vec![dn, up], vec![dim, dim], &proto2);
        for a in 0..dim {
            for c in 0..dim {
                let mut acc = proto2.clone();
                for e in 0..dim {
                    acc = &acc + &g_inv.get(&[c, e]).mul(schouten.get(&[a, e]));
                }
                schouten_mixed.set(&[a, c], acc);
            }
        }

        // W_ab^c_d = R_ab^c_d − δ_a^c P_bd + δ_b^c P_ad − P_a^c g_bd + P_b^c g_ad
        let mut weyl = Tensor::zeros(vec![dn, dn, up, dn], vec![dim; 4], &proto2);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let mut acc = riemann.get(&[a, b, c, d]).clone();
                        if a == c {
                            acc = &acc - schouten.get(&[b, d]);
                        }
                        if b == c {
                            acc = &acc + schouten.get(&[a, d]);
                        }
                        acc = &acc - &schouten_mixed.get(&[a, c]).mul(g.get(&[b, d]));
                        acc = &acc + &schouten_mixed.get(&[b, c]).mul(g.get(&[a, d]));
                        weyl.set(&[a, b, c, d], acc);
                    }
                }
            }
        }

        // Cotton C_abc = ∇_a P_bc − ∇_b P_ac
        let cotton = if order >= 3 {
            let dp = covd(&schouten, &gamma, None)?;
            let mut c = Tensor::zeros(
                vec![dn, dn, dn],
                vec![dim; 3],
                &proto2.truncated(order - 3),
            );
            for a in 0..dim {
                for b in a + 1..dim {
                    for cc in 0..dim {
                        let v = dp.get(&[a, b, cc]) - dp.get(&[b, a, cc]);
                        c.set(&[a, b, cc], v.clone());
                        c.set(&[b, a, cc], v.neg());
                    }
                }
            }
            Some(c)
        } else {
            None
        };

        Ok(GeometryJet {
            at: *p,
            order,
            dim,
            g,
            g_inv,
            gamma,
            dgamma,
            riemann,
            ricci,
            schouten,
            schouten_mixed,
            j_trace,
            weyl,
            cotton,
            vol_density,
        })
    }

    pub fn cotton(&self) -> Result<&Tensor<Jet<F>>> {
        self.cotton.as_ref().ok_or_else(|| {
            Error::Order("Cotton tensor needs metric jets of order >= 3".to_string())
        })
    }

    /// Rough Laplacian of a scalar jet: `g^ab (∂_a∂_b f − Γ^c_ab ∂_c f)`.
    pub fn laplacian(&self, f: &Jet<F>) -> Result<Jet<F>> {
        if f.order() < 2 {
            return Err(Error::Order(
                "scalar Laplacian needs a jet of order >= 2".to_string(),
            ));
        }
        let d1: Vec<Jet<F>> = (0..self.dim)
            .map(|a| f.partial(a))
            .collect::<Result<_>>()?;
        let mut acc = f.truncated(f.order() - 2).zero_like();
        for a in 0..self.dim {
            let da = d1[a].clone();
            for b in 0..self.dim {
                let mut term = da.partial(b)?;
                for c in 0..self.dim {
                    term = &term - &self.gamma.get(&[c, a, b]).mul(&d1[c]);
                }
                acc = &acc + &self.g_inv.get(&[a, b]).mul(&term);
            }
        }
        Ok(acc)
    }

    /// Gradient with the index raised: `(grad f)^a = g^ab ∂_b f`.
    pub fn gradient_up(&self, f: &Jet<F>) -> Result<Tensor<Jet<F>>> {
        let d1: Vec<Jet<F>> = (0..self.dim)
            .map(|a| f.partial(a))
            .collect::<Result<_>>()?;
        let proto = d1[0].zero_like();
        let mut out = Tensor::zeros(vec![Slot::st_up()], vec![self.dim], &proto);
        for a in 0..self.dim {
            let mut acc = proto.clone();
            for b in 0..self.dim {
                acc = &acc + &self.g_inv.get(&[a, b]).mul(&d1[b]);
            }
            out.set(&[a], acc);
        }
        Ok(out)
    }

    /// Divergence of an all-up vector of jets: `∇_a X^a`.
    pub fn divergence(&self, x: &Tensor<Jet<F>>) -> Result<Jet<F>> {
        let dx = covd(x, &self.gamma, None)?;
        let tr = dx.contract(0, 1)?;
        Ok(tr.scalar_value().clone())
    }

    /// Christoffels promoted to complex coefficients (for gauge coupling).
    pub fn gamma_complex(&self) -> Tensor<Jet<Complex<F>>> {
        self.gamma.map(|j| j.complexify())
    }

    /// Inverse metric promoted to complex coefficients.
    pub fn g_inv_complex(&self) -> Tensor<Jet<Complex<F>>> {
        self.g_inv.map(|j| j.complexify())
    }

    /// Metric promoted to complex coefficients.
    pub fn g_complex(&self) -> Tensor<Jet<Complex<F>>> {
        self.g.map(|j| j.complexify())
    }
}

/// Defining-function data at a point for a compactified metric `g` and
/// defining function `sigma`.
///
/// The conormal is `n = dσ` (inward-pointing on the unit ball). The scalar
/// `rho = -(∇·n + σ J)/d` extends the negative of the boundary mean
/// curvature into the interior: with this orientation the unit ball in the
/// flat compactified metric has `rho = 1` and `H = -1`, the sign forced by
/// the boundary identity `(∇_n̂ + 4H)|F|²|_∂M = 0` for Yang-Mills fields.
pub struct DefiningData<F: Real> {
    /// `n_a = ∂_a σ`.
    pub n_down: Tensor<F>,
    /// `n^a = g^{ab} n_b`.
    pub n_up: Tensor<F>,
    /// `|n|²_g`.
    pub n_sq: F,
    /// `ρ = -(∇·n + σ J^g)/d`.
    pub rho: F,
    /// Boundary mean curvature extension, `H = -ρ`.
    pub mean_curvature: F,
    /// `∇·n = Δ^g σ`.
    pub div_n: F,
}

pub fn defining_data<F: Real>(
    m_compact: &MetricField<F>,
    sigma: &ScalarField<F>,
    p: &ChartPoint<F>,
) -> Result<DefiningData<F>> {
    let geo = GeometryJet::compute(m_compact, p, 2)?;
    let s = sigma.jet(p, 2)?;
    let dim = geo.dim;
    let n_down = Tensor::from_fn(vec![Slot::st_down()], vec![dim], |idx| s.d1(idx[0]));
    let mut n_up = Tensor::zeros(vec![Slot::st_up()], vec![dim], &F::zero());
    for a in 0..dim {
        let mut acc = F::zero();
        for b in 0..dim {
            acc = acc + geo.g_inv.get(&[a, b]).value() * *n_down.get(&[b]);
        }
        n_up.set(&[a], acc);
    }
    let mut n_sq = F::zero();
    for a in 0..dim {
        n_sq = n_sq + *n_up.get(&[a]) * *n_down.get(&[a]);
    }
    let div_n = geo.laplacian(&s)?.value();
    let rho = -(div_n + s.value() * geo.j_trace.value()) / lit::<F>(dim as f64);
    Ok(DefiningData {
        n_down,
        n_up,
        n_sq,
        rho,
        mean_curvature: -rho,
        div_n,
    })
}

// ---------------------------------------------------------------------------
// Basic chart fields used throughout (flat metric, ball defining function);
// the model catalog proper lives in `models`.
// ---------------------------------------------------------------------------

/// Flat Euclidean metric on the 6-chart.
pub fn euclidean_metric<F: Real>() -> MetricField<F> {
    MetricField::new(
        "euclidean",
        crate::fields::Chart::Euclidean6,
        crate::fields::Domain::All,
        crate::jet::MAX_ORDER,
        |p, order| {
            let dim = p.chart().dim();
            let proto = Jet::<F>::constant(dim, order, F::zero());
            let one = Jet::constant(dim, order, F::one());
            let dn = Slot::st_down();
            let mut g = Tensor::zeros(vec![dn, dn], vec![dim, dim], &proto);
            for a in 0..dim {
                g.set(&[a, a], one.clone());
            }
            Ok(g)
        },
    )
}

/// Ball defining function `σ = (1 - r²)/2` on the Euclidean chart.
pub fn ball_sigma<F: Real>() -> ScalarField<F> {
    ScalarField::new(
        "sigma",
        crate::fields::Chart::Euclidean6,
        crate::fields::Domain::All,
        crate::jet::MAX_ORDER,
        |p, order| {
            let x = coord_jets(p, order);
            let mut r2 = x[0].zero_like();
            for xi in &x {
                r2 = &r2 + &(xi * xi);
            }
            Ok((&Jet::constant(p.chart().dim(), order, F::one()) - &r2).scale(lit::<F>(0.5)))
        },
    )
}
