//! Chart points and smooth fields.
//!
//! A [`SmoothField`]-style object is a closure from a chart point to jets of
//! its components; evaluation at a point with a requested derivative order is
//! the only operation. Three concrete shapes cover everything the engine
//! needs: scalar fields, metric fields (symmetric rank-2, real) and
//! connection fields (endomorphism-valued one-forms, complex).
//!
//! The finite-difference oracle at the bottom is used only as an independent
//! cross-check of the jet engine in tests; production paths never touch it.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::num::{lit, Real, Scalar};
use crate::tensor::{Slot, Tensor};

/// Coordinate chart identifier. `Euclidean6` covers both the plain chart and
/// the unit-ball models (domains restrict the radius); `Schwarzschild6` is
/// the static Einstein chart `(t, r, angles)`; `Sphere5` holds the five
/// sphere angles used by quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Euclidean6,
    Schwarzschild6,
    Sphere5,
}

impl Chart {
    pub fn dim(self) -> usize {
        match self {
            Chart::Euclidean6 | Chart::Schwarzschild6 => 6,
            Chart::Sphere5 => 5,
        }
    }
}

/// A point of a chart; the locus of all pointwise evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint<F: Real> {
    chart: Chart,
    coords: [F; 6],
}

impl<F: Real> ChartPoint<F> {
    pub fn new(chart: Chart, coords: &[F]) -> Result<ChartPoint<F>> {
        if coords.len() != chart.dim() {
            return Err(Error::Domain(format!(
                "chart {:?} expects {} coordinates, got {}",
                chart,
                chart.dim(),
                coords.len()
            )));
        }
        let mut c = [F::zero(); 6];
        c[..coords.len()].copy_from_slice(coords);
        Ok(ChartPoint { chart, coords: c })
    }

    pub fn euclidean(coords: [F; 6]) -> ChartPoint<F> {
        ChartPoint { chart: Chart::Euclidean6, coords }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn coords(&self) -> &[F] {
        &self.coords[..self.chart.dim()]
    }

    /// Euclidean radius of the coordinate tuple.
    pub fn radius(&self) -> F {
        self.coords()
            .iter()
            .fold(F::zero(), |acc, &x| acc + x * x)
            .sqrt()
    }

    /// Shift one coordinate (used by the finite-difference stencils).
    pub fn shifted(&self, var: usize, delta: F) -> ChartPoint<F> {
        let mut c = self.coords;
        c[var] = c[var] + delta;
        ChartPoint { chart: self.chart, coords: c }
    }
}

/// Where a field may be evaluated.
#[derive(Clone, Copy, Debug)]
pub enum Domain<F: Real> {
    All,
    /// Euclidean radius strictly below the bound.
    BallInterior(F),
    /// Euclidean radius at most the bound.
    ClosedBall(F),
    /// Schwarzschild chart shell: radial coordinate within the range and
    /// polar angles at least `angle_margin` away from the axes.
    Shell { r_min: F, r_max: F, angle_margin: F },
}

impl<F: Real> Domain<F> {
    pub fn contains(&self, p: &ChartPoint<F>) -> bool {
        match *self {
            Domain::All => true,
            Domain::BallInterior(r) => p.radius() < r,
            Domain::ClosedBall(r) => p.radius() <= r,
            Domain::Shell { r_min, r_max, angle_margin } => {
                let c = p.coords();
                let r = c[1];
                if r < r_min || r > r_max {
                    return false;
                }
                let pi = lit::<F>(std::f64::consts::PI);
                // polar angles theta_1..theta_3 live in (0, pi)
                for &th in &c[2..5] {
                    if th < angle_margin || th > pi - angle_margin {
                        return false;
                    }
                }
                true
            }
        }
    }
}

/// Seeded coordinate jets at a point.
pub fn coord_jets<F: Real>(p: &ChartPoint<F>, order: usize) -> Vec<Jet<F>> {
    let n = p.chart().dim();
    p.coords()
        .iter()
        .enumerate()
        .map(|(v, &x)| Jet::coordinate(n, order, v, x))
        .collect()
}

type ScalarEval<S> =
    Arc<dyn Fn(&ChartPoint<<S as Scalar>::R>, usize) -> Result<Jet<S>> + Send + Sync>;

/// Scalar-valued smooth field on a chart.
#[derive(Clone)]
pub struct ScalarField<S: Scalar> {
    pub name: String,
    chart: Chart,
    domain: Domain<S::R>,
    max_order: usize,
    eval: ScalarEval<S>,
}

impl<S: Scalar> ScalarField<S> {
    pub fn new(
        name: impl Into<String>,
        chart: Chart,
        domain: Domain<S::R>,
        max_order: usize,
        eval: impl Fn(&ChartPoint<S::R>, usize) -> Result<Jet<S>> + Send + Sync + 'static,
    ) -> ScalarField<S> {
        ScalarField {
            name: name.into(),
            chart,
            domain,
            max_order,
            eval: Arc::new(eval),
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn check_point(&self, p: &ChartPoint<S::R>) -> Result<()> {
        if p.chart() != self.chart {
            return Err(Error::Domain(format!(
                "field `{}` lives on chart {:?}, point is on {:?}",
                self.name,
                self.chart,
                p.chart()
            )));
        }
        if !self.domain.contains(p) {
            return Err(Error::Domain(format!(
                "point {:?} outside domain of field `{}`",
                p.coords(),
                self.name
            )));
        }
        Ok(())
    }

    /// Evaluate the jet of the field at `p` up to `order` derivatives.
    pub fn jet(&self, p: &ChartPoint<S::R>, order: usize) -> Result<Jet<S>> {
        self.check_point(p)?;
        if order > self.max_order {
            return Err(Error::Order(format!(
                "field `{}` supports order {}, requested {}",
                self.name, self.max_order, order
            )));
        }
        (self.eval)(p, order)
    }

    pub fn value(&self, p: &ChartPoint<S::R>) -> Result<S> {
        Ok(self.jet(p, 0)?.value())
    }
}

type MetricEval<F> = Arc<dyn Fn(&ChartPoint<F>, usize) -> Result<Tensor<Jet<F>>> + Send + Sync>;

/// Symmetric rank-2 metric field. The evaluator returns the full `[dn,dn]`
/// component tensor as jets; evaluators must produce exactly symmetric
/// components.
#[derive(Clone)]
pub struct MetricField<F: Real> {
    pub name: String,
    chart: Chart,
    domain: Domain<F>,
    max_order: usize,
    eval: MetricEval<F>,
}

impl<F: Real> MetricField<F> {
    pub fn new(
        name: impl Into<String>,
        chart: Chart,
        domain: Domain<F>,
        max_order: usize,
        eval: impl Fn(&ChartPoint<F>, usize) -> Result<Tensor<Jet<F>>> + Send + Sync + 'static,
    ) -> MetricField<F> {
        MetricField {
            name: name.into(),
            chart,
            domain,
            max_order,
            eval: Arc::new(eval),
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn domain(&self) -> Domain<F> {
        self.domain
    }

    pub fn components(&self, p: &ChartPoint<F>, order: usize) -> Result<Tensor<Jet<F>>> {
        if p.chart() != self.chart {
            return Err(Error::Domain(format!(
                "metric `{}` lives on chart {:?}, point is on {:?}",
                self.name,
                self.chart,
                p.chart()
            )));
        }
        if !self.domain.contains(p) {
            return Err(Error::Domain(format!(
                "point {:?} outside domain of metric `{}`",
                p.coords(),
                self.name
            )));
        }
        if order > self.max_order {
            return Err(Error::Order(format!(
                "metric `{}` supports order {}, requested {}",
                self.name, self.max_order, order
            )));
        }
        (self.eval)(p, order)
    }

    /// The rescaled metric `Omega^2 g`, with jets composed exactly.
    pub fn conformal_rescale(&self, omega: &ScalarField<F>) -> MetricField<F> {
        let base = self.clone();
        let om = omega.clone();
        MetricField::new(
            format!("{}*conf[{}]", self.name, omega.name),
            self.chart,
            self.domain,
            self.max_order.min(omega.max_order()),
            move |p, order| {
                let w = om.jet(p, order)?;
                if w.value() <= F::zero() {
                    return Err(Error::Domain(format!(
                        "conformal factor `{}` non-positive at {:?}",
                        om.name,
                        p.coords()
                    )));
                }
                let w2 = w.mul(&w);
                let g = base.components(p, order)?;
                Ok(g.map(|c| c.mul(&w2)))
            },
        )
    }

    /// The metric `g / sigma^2` (interior rescaling by an inverse defining
    /// function).
    pub fn rescale_by_inverse(&self, sigma: &ScalarField<F>) -> MetricField<F> {
        let base = self.clone();
        let sf = sigma.clone();
        MetricField::new(
            format!("{}/sq[{}]", self.name, sigma.name),
            self.chart,
            self.domain,
            self.max_order.min(sigma.max_order()),
            move |p, order| {
                let s = sf.jet(p, order)?;
                if s.value() <= F::zero() {
                    return Err(Error::Domain(format!(
                        "defining function `{}` non-positive at {:?}",
                        sf.name,
                        p.coords()
                    )));
                }
                let w = s.try_recip()?;
                let w2 = w.mul(&w);
                let g = base.components(p, order)?;
                Ok(g.map(|c| c.mul(&w2)))
            },
        )
    }
}

type ConnEval<F> =
    Arc<dyn Fn(&ChartPoint<F>, usize) -> Result<Tensor<Jet<Complex<F>>>> + Send + Sync>;

/// Endomorphism-valued connection one-form `A_a` with complex `k x k` fiber.
/// Component tensor slots: `[st_down, fiber_up, fiber_down]`.
#[derive(Clone)]
pub struct ConnectionField<F: Real> {
    pub name: String,
    pub fiber_dim: usize,
    chart: Chart,
    domain: Domain<F>,
    max_order: usize,
    eval: ConnEval<F>,
}

impl<F: Real> ConnectionField<F> {
    pub fn new(
        name: impl Into<String>,
        fiber_dim: usize,
        chart: Chart,
        domain: Domain<F>,
        max_order: usize,
        eval: impl Fn(&ChartPoint<F>, usize) -> Result<Tensor<Jet<Complex<F>>>> + Send + Sync + 'static,
    ) -> ConnectionField<F> {
        ConnectionField {
            name: name.into(),
            fiber_dim,
            chart,
            domain,
            max_order,
            eval: Arc::new(eval),
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn components(&self, p: &ChartPoint<F>, order: usize) -> Result<Tensor<Jet<Complex<F>>>> {
        if p.chart() != self.chart {
            return Err(Error::Domain(format!(
                "connection `{}` lives on chart {:?}, point is on {:?}",
                self.name,
                self.chart,
                p.chart()
            )));
        }
        if !self.domain.contains(p) {
            return Err(Error::Domain(format!(
                "point {:?} outside domain of connection `{}`",
                p.coords(),
                self.name
            )));
        }
        if order > self.max_order {
            return Err(Error::Order(format!(
                "connection `{}` supports order {}, requested {}",
                self.name, self.max_order, order
            )));
        }
        (self.eval)(p, order)
    }

    /// Valence of the component tensor.
    pub fn slots(&self) -> Vec<Slot> {
        vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()]
    }
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

/// Default step for first and second derivatives.
pub const FD_STEP_LOW: f64 = 1e-4;
/// Third derivatives divide by `h^3`; a larger step keeps the cancellation
/// error below the documented 1e-6 agreement target.
pub const FD_STEP_THIRD: f64 = 8e-3;

fn stencil_1d<F: Real>(mult: usize, h: F) -> Vec<(F, F)> {
    let two = lit::<F>(2.0);
    match mult {
        1 => vec![(h, (two * h).recip()), (-h, -(two * h).recip())],
        2 => {
            let w = (h * h).recip();
            vec![(h, w), (F::zero(), -two * w), (-h, w)]
        }
        3 => {
            let w = (two * h * h * h).recip();
            vec![(two * h, w), (h, -two * w), (-h, two * w), (-two * h, -w)]
        }
        _ => unreachable!("stencil multiplicity out of range"),
    }
}

fn fd_estimate<F: Real>(
    f: &dyn Fn(&ChartPoint<F>) -> Result<F>,
    p: &ChartPoint<F>,
    mults: &[(usize, usize)],
    h: F,
) -> Result<F> {
    // Tensor product of one-dimensional stencils over the distinct variables.
    let mut acc = vec![(p.clone(), F::one())];
    for &(var, m) in mults {
        let st = stencil_1d(m, h);
        let mut next = Vec::with_capacity(acc.len() * st.len());
        for (q, w) in &acc {
            for &(dx, sw) in &st {
                next.push((q.shifted(var, dx), *w * sw));
            }
        }
        acc = next;
    }
    let mut sum = F::zero();
    for (q, w) in &acc {
        sum = sum + *w * f(q)?;
    }
    Ok(sum)
}

/// Central finite-difference estimate of a mixed partial derivative, refined
/// once by Richardson extrapolation. Used only as an independent test oracle.
///
/// `multi_index` lists the variables to differentiate (repeats allowed),
/// with at most three entries. The step defaults to [`FD_STEP_LOW`] for
/// orders one and two and [`FD_STEP_THIRD`] for order three.
pub fn fd_oracle<F: Real>(
    field: &ScalarField<F>,
    p: &ChartPoint<F>,
    multi_index: &[usize],
    step: Option<F>,
) -> Result<F> {
    if multi_index.len() > 3 {
        return Err(Error::Order(format!(
            "finite differences support order <= 3, requested {}",
            multi_index.len()
        )));
    }
    if multi_index.is_empty() {
        return field.value(p);
    }
    let f = |q: &ChartPoint<F>| field.value(q);
    fd_oracle_fn(&f, p, multi_index, step)
}

/// Same as [`fd_oracle`] but for an arbitrary pointwise closure.
pub fn fd_oracle_fn<F: Real>(
    f: &dyn Fn(&ChartPoint<F>) -> Result<F>,
    p: &ChartPoint<F>,
    multi_index: &[usize],
    step: Option<F>,
) -> Result<F> {
    if multi_index.len() > 3 {
        return Err(Error::Order(format!(
            "finite differences support order <= 3, requested {}",
            multi_index.len()
        )));
    }
    let mut mults: Vec<(usize, usize)> = Vec::new();
    for &v in multi_index {
        match mults.iter_mut().find(|(var, _)| *var == v) {
            Some((_, m)) => *m += 1,
            None => mults.push((v, 1)),
        }
    }
    let h = step.unwrap_or_else(|| {
        if multi_index.len() == 3 {
            lit::<F>(FD_STEP_THIRD)
        } else {
            lit::<F>(FD_STEP_LOW)
        }
    });
    let coarse = fd_estimate(f, p, &mults, h)?;
    let fine = fd_estimate(f, p, &mults, h.scale(lit::<F>(0.5)))?;
    // stencils are second-order accurate: one Richardson pass
    Ok((fine.scale(lit::<F>(4.0)) - coarse).scale(lit::<F>(1.0 / 3.0)))
}
