//! Regulated-energy quadrature, sphere and bulk integrals, and finite-part
//! extraction from a regulator grid.
//!
//! The cut-off ball integrals use geometric radial panels accumulating
//! toward the outer radius (the regulated integrand grows like `1/σ²`
//! there) with Gauss-Legendre nodes per panel, and a product rule on the
//! five-sphere: Gauss-Legendre in each polar cosine and a uniform trapezoid
//! in the azimuth. That rule integrates the quadratic-in-direction
//! integrands of the energy stack exactly.
//!
//! Node evaluation is an ordered map (parallelizable without changing the
//! result) followed by pairwise summation, so results are bitwise
//! reproducible for a fixed spec.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{Chart, ChartPoint, ConnectionField, MetricField};
use crate::gauge;
use crate::geometry::invert_jet_matrix;
use crate::models::hyperbolic_ball;
use crate::num::{lit, pairwise_sum, Real};

/// Quadrature configuration.
#[derive(Clone, Debug)]
pub struct QuadratureSpec<F: Real> {
    /// Number of radial panels.
    pub radial_panels: usize,
    /// Width ratio of successive panels toward the outer radius, in (0, 1].
    pub panel_ratio: F,
    /// Gauss-Legendre points per radial panel.
    pub radial_order: usize,
    /// Gauss-Legendre points per polar sphere angle.
    pub sphere_polar_order: usize,
    /// Uniform azimuth points.
    pub sphere_azimuth_order: usize,
    /// Monte Carlo sample count for the optional sphere cross-check.
    pub mc_samples: usize,
    pub seed: u64,
}

impl<F: Real> QuadratureSpec<F> {
    pub fn validate(&self) -> Result<()> {
        if self.radial_panels < 1
            || self.radial_order < 2
            || self.sphere_polar_order < 2
            || self.sphere_azimuth_order < 2
        {
            return Err(Error::Config(
                "quadrature orders must be at least 2 with one panel".to_string(),
            ));
        }
        if !(self.panel_ratio > F::zero() && self.panel_ratio <= F::one()) {
            return Err(Error::Config("panel ratio must lie in (0, 1]".to_string()));
        }
        Ok(())
    }

    /// Doubled-resolution copy, for refinement checks.
    pub fn refined(&self) -> QuadratureSpec<F> {
        QuadratureSpec {
            radial_panels: self.radial_panels + 2,
            panel_ratio: self.panel_ratio,
            radial_order: self.radial_order * 2,
            sphere_polar_order: self.sphere_polar_order * 2,
            sphere_azimuth_order: self.sphere_azimuth_order * 2,
            mc_samples: self.mc_samples,
            seed: self.seed,
        }
    }
}

impl<F: Real> Default for QuadratureSpec<F> {
    fn default() -> Self {
        QuadratureSpec {
            radial_panels: 12,
            panel_ratio: lit::<F>(0.5),
            radial_order: 32,
            sphere_polar_order: 3,
            sphere_azimuth_order: 8,
            mc_samples: 20_000,
            seed: 0,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<F: Real>(n: usize) -> Vec<(F, F)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for k in 0..n {
        // Chebyshev-based initial guess, then Newton iteration
        let mut x = lit::<F>((std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos());
        let mut dp = F::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x = x - step;
            if step.abs() <= F::epsilon() * lit::<F>(4.0) {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        let w = lit::<F>(2.0) / ((F::one() - x * x) * dp * dp);
        out.push((x, w));
    }
    out.reverse();
    out
}

fn legendre_with_derivative<F: Real>(n: usize, x: F) -> (F, F) {
    let mut p0 = F::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, F::zero());
    }
    for k in 2..=n {
        let kf = lit::<F>(k as f64);
        let p2 = ((lit::<F>(2.0 * k as f64 - 1.0) * x * p1) - lit::<F>(k as f64 - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = lit::<F>(n as f64) * (x * p1 - p0) / (x * x - F::one());
    (p1, d)
}

/// Panel boundaries of geometric widths shrinking by `ratio` toward `r_max`.
fn radial_panels<F: Real>(r_max: F, panels: usize, ratio: F) -> Vec<(F, F)> {
    let mut widths = Vec::with_capacity(panels);
    let mut w = F::one();
    let mut total = F::zero();
    for _ in 0..panels {
        widths.push(w);
        total = total + w;
        w = w * ratio;
    }
    let scale = r_max / total;
    let mut out = Vec::with_capacity(panels);
    let mut left = F::zero();
    for w in widths {
        let right = left + w * scale;
        out.push((left, right));
        left = right;
    }
    if let Some(last) = out.last_mut() {
        last.1 = r_max;
    }
    out
}

/// Product quadrature rule on the unit five-sphere: unit vectors and weights
/// whose sum is `Vol(S⁵) = π³`.
pub struct SphereRule<F: Real> {
    pub nodes: Vec<([F; 6], F)>,
}

/// Gauss-Gegenbauer nodes and weights on `[-1, 1]` for the weight
/// `(1 - x²)^{(k-1)/2}`, the polar-cosine measure of `sin^k θ dθ`. Nodes
/// are the roots of the Gegenbauer polynomial `C_n^{k/2}` (sign scan plus
/// bisection); weights are matched to the exact moments, making the rule
/// exact for polynomial integrands of degree `2n - 1`. Plain
/// Gauss-Legendre in the cosine is not exact for the half-integer weights
/// of the even polar angles.
pub fn gauss_gegenbauer<F: Real>(n: usize, sin_exponent: usize) -> Vec<(F, F)> {
    assert!(n >= 1);
    let lambda = sin_exponent as f64 / 2.0;
    let eval = |x: F| -> F {
        // C_0 = 1, C_1 = 2λx, m C_m = 2x(m+λ-1)C_{m-1} - (m+2λ-2)C_{m-2}
        let mut c0 = F::one();
        let mut c1 = lit::<F>(2.0 * lambda) * x;
        if n == 0 {
            return c0;
        }
        for m in 2..=n {
            let mf = m as f64;
            let c2 = (lit::<F>(2.0 * (mf + lambda - 1.0)) * x * c1
                - lit::<F>(mf + 2.0 * lambda - 2.0) * c0)
                / lit::<F>(mf);
            c0 = c1;
            c1 = c2;
        }
        c1
    };
    let grid = 64 * n.max(4);
    let mut nodes: Vec<F> = Vec::with_capacity(n);
    let mut prev_x = lit::<F>(-1.0 + 1e-9);
    let mut prev_v = eval(prev_x);
    for i in 1..=grid {
        let x = lit::<F>(-1.0 + 2.0 * i as f64 / grid as f64 - 1e-9);
        let v = eval(x);
        if (prev_v <= F::zero() && v > F::zero()) || (prev_v >= F::zero() && v < F::zero()) {
            let (mut lo, mut hi) = (prev_x, x);
            let mut flo = prev_v;
            for _ in 0..80 {
                let mid = (lo + hi).scale(lit::<F>(0.5));
                let fm = eval(mid);
                if (flo <= F::zero()) == (fm <= F::zero()) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            nodes.push((lo + hi).scale(lit::<F>(0.5)));
        }
        prev_x = x;
        prev_v = v;
    }
    assert_eq!(nodes.len(), n, "failed to bracket all Gegenbauer roots");
    // weights from the exact moments of (1 - x²)^{(k-1)/2}:
    // μ_j = μ_{j-2} (j-1)/(j+2α+1) with 2α = k-1
    let mu0 = match sin_exponent {
        1 => 2.0,
        2 => std::f64::consts::PI / 2.0,
        3 => 4.0 / 3.0,
        4 => 3.0 * std::f64::consts::PI / 8.0,
        _ => panic!("unsupported sine exponent"),
    };
    let alpha2 = sin_exponent as f64 - 1.0;
    let mut moments = vec![F::zero(); n];
    moments[0] = lit::<F>(mu0);
    let mut even = mu0;
    for j in (2..n).step_by(2) {
        even *= (j as f64 - 1.0) / (j as f64 + alpha2 + 1.0);
        moments[j] = lit::<F>(even);
    }
    let mut vander = vec![F::zero(); n * n];
    for (col, x) in nodes.iter().enumerate() {
        let mut pw = F::one();
        for row in 0..n {
            vander[row * n + col] = pw;
            pw = pw * *x;
        }
    }
    crate::num::solve_linear(&mut vander, &mut moments).expect("moment system");
    nodes.into_iter().zip(moments).collect()
}

impl<F: Real> SphereRule<F> {
    pub fn build(polar_order: usize, azimuth_order: usize) -> SphereRule<F> {
        // polar measure exponents sin^4, sin^3, sin^2, sin^1
        let mut partial: Vec<(Vec<F>, F)> = vec![(vec![], F::one())];
        for k_exp in [4usize, 3, 2, 1] {
            let rule = gauss_gegenbauer::<F>(polar_order, k_exp);
            let mut next = Vec::with_capacity(partial.len() * rule.len());
            for (angles, w) in &partial {
                for &(c, wc) in &rule {
                    let mut a = angles.clone();
                    a.push(c);
                    next.push((a, *w * wc));
                }
            }
            partial = next;
        }
        let two_pi = lit::<F>(2.0 * std::f64::consts::PI);
        let az_w = two_pi / lit::<F>(azimuth_order as f64);
        let mut nodes = Vec::with_capacity(partial.len() * azimuth_order);
        for (cs, w) in &partial {
            for m in 0..azimuth_order {
                let phi = two_pi * lit::<F>(m as f64) / lit::<F>(azimuth_order as f64);
                let mut n = [F::zero(); 6];
                let mut sin_prod = F::one();
                for (i, &c) in cs.iter().enumerate() {
                    n[i] = sin_prod * c;
                    sin_prod = sin_prod * (F::one() - c * c).sqrt();
                }
                n[4] = sin_prod * phi.cos();
                n[5] = sin_prod * phi.sin();
                nodes.push((n, *w * az_w));
            }
        }
        SphereRule { nodes }
    }

    pub fn integrate(&self, f: impl Fn(&[F; 6]) -> F + Sync) -> F {
        let vals: Vec<F> = self
            .nodes
            .par_iter()
            .map(|(n, w)| f(n) * *w)
            .collect();
        pairwise_sum(&vals)
    }
}

/// Integral of a continuous function over the unit five-sphere.
pub fn sphere_integral<F: Real>(
    f: impl Fn(&[F; 6]) -> F + Sync,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    spec.validate()?;
    let rule = SphereRule::build(spec.sphere_polar_order, spec.sphere_azimuth_order);
    Ok(rule.integrate(f))
}

/// Seeded Monte Carlo estimate of a sphere integral (cross-check only).
pub fn sphere_integral_mc<F: Real>(
    f: impl Fn(&[F; 6]) -> F,
    samples: usize,
    seed: u64,
) -> F {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Vec::with_capacity(samples);
    let vol = lit::<F>(std::f64::consts::PI.powi(3));
    for _ in 0..samples {
        // Gaussian direction via Box-Muller
        let mut n = [F::zero(); 6];
        let mut norm = F::zero();
        for pair in 0..3 {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let r = (-2.0 * u1.ln()).sqrt();
            let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
            n[2 * pair] = lit::<F>(r * c);
            n[2 * pair + 1] = lit::<F>(r * s);
        }
        for v in &n {
            norm = norm + *v * *v;
        }
        let norm = norm.sqrt();
        for v in n.iter_mut() {
            *v = *v / norm;
        }
        acc.push(f(&n));
    }
    pairwise_sum(&acc) / lit::<F>(samples as f64) * vol
}

/// Cut-off radius of the regulated ball: `r = (1 − ε)/(1 + ε)`.
pub fn cutoff_radius<F: Real>(eps: F) -> F {
    (F::one() - eps) / (F::one() + eps)
}

/// `|F|² = −g^{ac} g^{bd} Tr(F_ab F_cd)` from curvature value jets and a
/// cached inverse metric.
fn fsq_from_values<F: Real>(
    f: &crate::tensor::Tensor<crate::jet::Jet<num_complex::Complex<F>>>,
    ginv: &[[F; 6]; 6],
    k: usize,
) -> F {
    let mut vals = vec![num_complex::Complex::new(F::zero(), F::zero()); 36 * k * k];
    for a in 0..6 {
        for b in 0..6 {
            for i in 0..k {
                for j in 0..k {
                    vals[((a * 6 + b) * k + i) * k + j] = f.get(&[a, b, i, j]).value();
                }
            }
        }
    }
    let mut acc = F::zero();
    for a in 0..6 {
        for b in 0..6 {
            if a == b {
                continue;
            }
            for cc in 0..6 {
                for d in 0..6 {
                    let w = ginv[a][cc] * ginv[b][d];
                    if w == F::zero() || cc == d {
                        continue;
                    }
                    let mut tr = F::zero();
                    for i in 0..k {
                        for e in 0..k {
                            let prod = vals[((a * 6 + b) * k + i) * k + e]
                                * vals[((cc * 6 + d) * k + e) * k + i];
                            tr = tr + prod.re;
                        }
                    }
                    acc = acc - w * tr;
                }
            }
        }
    }
    acc
}

/// Regulated energy `¼ ∫_{B_ε} dVol(g₊) |F|²_{g₊}` on the hyperbolic ball,
/// by product quadrature of the generic curvature-norm integrand (not a
/// closed form). `B_ε` is the Euclidean ball of radius `(1−ε)/(1+ε)`.
pub fn regulated_energy<F: Real>(
    c: &ConnectionField<F>,
    eps: F,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    spec.validate()?;
    if !(eps > F::zero() && eps <= lit::<F>(0.3)) {
        return Err(Error::Domain(format!(
            "regulator {eps} outside (0, 0.3]"
        )));
    }
    let (g_plus, sigma) = hyperbolic_ball::<F>();
    let r_max = cutoff_radius(eps);
    let rule = SphereRule::build(spec.sphere_polar_order, spec.sphere_azimuth_order);
    let panels = radial_panels(r_max, spec.radial_panels, spec.panel_ratio);
    let gl = gauss_legendre::<F>(spec.radial_order);
    // all (radial, sphere) nodes in deterministic order
    let mut tasks = Vec::new();
    for (a, b) in &panels {
        let half = (*b - *a).scale(lit::<F>(0.5));
        let mid = (*a + *b).scale(lit::<F>(0.5));
        for &(x, w) in &gl {
            tasks.push((mid + half * x, half * w));
        }
    }
    let quarter = lit::<F>(0.25);
    let k = c.fiber_dim;
    let vals: Vec<F> = tasks
        .par_iter()
        .map(|&(r, wr)| {
            // The ball model's metric and defining function are radially
            // symmetric, so the inverse metric and volume factor are cached
            // once per radial ring; only the curvature is evaluated per node.
            let probe = ChartPoint::euclidean([r, F::zero(), F::zero(), F::zero(), F::zero(), F::zero()]);
            let g = g_plus.components(&probe, 0).expect("interior ring");
            let (ginv_j, _) = invert_jet_matrix(&g).expect("interior ring");
            let mut ginv = [[F::zero(); 6]; 6];
            for a in 0..6 {
                for b in 0..6 {
                    ginv[a][b] = ginv_j.get(&[a, b]).value();
                }
            }
            let s = sigma.value(&probe).expect("ball point");
            // dVol(g₊) = r⁵/σ⁶ dr dΩ
            let jac = r.powi(5) / s.powi(6);
            let mut inner = Vec::with_capacity(rule.nodes.len());
            for (n, wn) in &rule.nodes {
                let mut coords = [F::zero(); 6];
                for i in 0..6 {
                    coords[i] = n[i] * r;
                }
                let p = ChartPoint::euclidean(coords);
                let f = gauge::curvature(c, &p, 1).expect("interior point");
                let fsq = fsq_from_values(&f, &ginv, k);
                inner.push(fsq * jac * *wn);
            }
            pairwise_sum(&inner) * wr
        })
        .collect();
    Ok(pairwise_sum(&vals) * quarter)
}

/// Regulated energy with an internal refinement check; errors if the
/// refined rule disagrees beyond `tol` relative.
pub fn regulated_energy_checked<F: Real>(
    c: &ConnectionField<F>,
    eps: F,
    spec: &QuadratureSpec<F>,
    tol: F,
) -> Result<F> {
    let coarse = regulated_energy(c, eps, spec)?;
    let fine = regulated_energy(c, eps, &spec.refined())?;
    let rel = (coarse - fine).abs() / fine.abs().max(lit::<F>(1e-12));
    if rel > tol {
        return Err(Error::Tolerance(format!(
            "regulated energy refinement moved by {rel:e} (> {tol:e})"
        )));
    }
    Ok(fine)
}

/// Bulk integral `¼ ∫_ball dVol(g) f` of a pointwise integrand over the
/// closed unit ball in the compactified metric `g`.
pub fn bulk_invariant_integral<F: Real>(
    integrand: impl Fn(&ChartPoint<F>) -> Result<F> + Sync,
    m: &MetricField<F>,
    spec: &QuadratureSpec<F>,
) -> Result<F> {
    spec.validate()?;
    let rule = SphereRule::build(spec.sphere_polar_order, spec.sphere_azimuth_order);
    let panels = radial_panels(F::one(), spec.radial_panels, spec.panel_ratio);
    let gl = gauss_legendre::<F>(spec.radial_order);
    let mut tasks = Vec::new();
    for (a, b) in &panels {
        let half = (*b - *a).scale(lit::<F>(0.5));
        let mid = (*a + *b).scale(lit::<F>(0.5));
        for &(x, w) in &gl {
            tasks.push((mid + half * x, half * w));
        }
    }
    let vals: Vec<Result<F>> = tasks
        .par_iter()
        .map(|&(r, wr)| {
            let mut inner = Vec::with_capacity(rule.nodes.len());
            for (n, wn) in &rule.nodes {
                let mut coords = [F::zero(); 6];
                for i in 0..6 {
                    coords[i] = n[i] * r;
                }
                let p = ChartPoint::euclidean(coords);
                let g = m.components(&p, 0)?;
                let (_, det) = invert_jet_matrix(&g)?;
                let vol = det.value().sqrt();
                inner.push(integrand(&p)? * vol * r.powi(5) * *wn);
            }
            Ok(pairwise_sum(&inner) * wr)
        })
        .collect();
    let mut flat = Vec::with_capacity(vals.len());
    for v in vals {
        flat.push(v?);
    }
    Ok(pairwise_sum(&flat) * lit::<F>(0.25))
}

// ---------------------------------------------------------------------------
// Finite-part extraction
// ---------------------------------------------------------------------------

/// Divergent-plus-finite decomposition of a regulated quantity fitted on an
/// `ε`-grid: `E_ε ≈ a/ε + b + c ε + d ε² (+ higher tail terms)`, with `b`
/// the finite part. The tail beyond `d` is carried internally as a
/// Chebyshev polynomial of `h(ε) = ε E_ε`; no `log ε` term enters the
/// model, matching the even-dimensional structure of the regulated energy.
#[derive(Clone, Debug)]
pub struct RenormFit<F: Real> {
    pub eps_grid: Vec<F>,
    pub values: Vec<F>,
    /// Coefficient of `1/ε`.
    pub a: F,
    /// Finite part.
    pub b: F,
    /// Coefficient of `ε`.
    pub c: F,
    /// Coefficient of `ε²`.
    pub d: F,
    /// Root-mean-square residual of the fit in energy units.
    pub rms_residual: F,
    /// Polynomial degree used for `h(ε) = ε E_ε`.
    pub degree: usize,
}

fn cheb_t<F: Real>(t: F, deg: usize) -> Vec<F> {
    let mut row = Vec::with_capacity(deg + 1);
    let mut t0 = F::one();
    let mut t1 = t;
    row.push(t0);
    if deg >= 1 {
        row.push(t1);
    }
    for _ in 2..=deg {
        let t2 = lit::<F>(2.0) * t * t1 - t0;
        row.push(t2);
        t0 = t1;
        t1 = t2;
    }
    row
}

fn cheb_eval<F: Real>(coef: &[F], t: F) -> F {
    let row = cheb_t(t, coef.len() - 1);
    let mut s = F::zero();
    for (c, b) in coef.iter().zip(row) {
        s = s + *c * b;
    }
    s
}

/// Derivative of a Chebyshev series (coefficients on the mapped variable).
fn cheb_der<F: Real>(coef: &[F]) -> Vec<F> {
    let n = coef.len();
    if n <= 1 {
        return vec![F::zero()];
    }
    let mut d = vec![F::zero(); n - 1];
    // standard backward recurrence
    let mut work = vec![F::zero(); n + 1];
    for k in (1..n).rev() {
        work[k - 1] = work[k + 1] + lit::<F>(2.0 * k as f64) * coef[k];
    }
    for (k, slot) in d.iter_mut().enumerate() {
        *slot = work[k];
        if k == 0 {
            *slot = work[0].scale(lit::<F>(0.5));
        }
    }
    d
}

/// Weighted least-squares fit of the finite-part model to `(ε, E_ε)`
/// samples (at least four). `degree` overrides the polynomial degree of
/// `h(ε) = ε E_ε`; the default `min(n − 3, 10)` reproduces the four-term
/// model `a/ε + b + cε + dε²` on a six-point grid and extends the tail on
/// denser grids, which the extraction accuracy of the finite part requires.
pub fn extract_finite_part<F: Real>(
    samples: &[(F, F)],
    degree: Option<usize>,
) -> Result<RenormFit<F>> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::Fit(format!("need at least 4 samples, got {n}")));
    }
    let deg = degree.unwrap_or_else(|| (n - 3).min(10)).max(1);
    if deg + 1 > n {
        return Err(Error::Fit(format!(
            "degree {deg} needs at least {} samples, got {n}",
            deg + 1
        )));
    }
    let emin = samples
        .iter()
        .map(|s| s.0)
        .fold(F::infinity(), |a, b| a.min(b));
    let emax = samples
        .iter()
        .map(|s| s.0)
        .fold(F::neg_infinity(), |a, b| a.max(b));
    if !(emin > F::zero()) || emin == emax {
        return Err(Error::Fit("degenerate epsilon grid".to_string()));
    }
    let map = |e: F| (lit::<F>(2.0) * e - (emin + emax)) / (emax - emin);
    // normal equations for the Chebyshev fit of h = εE
    let m = deg + 1;
    let mut ata = vec![F::zero(); m * m];
    let mut atb = vec![F::zero(); m];
    for &(e, v) in samples {
        let h = e * v;
        let row = cheb_t(map(e), deg);
        for i in 0..m {
            for j in 0..m {
                ata[i * m + j] = ata[i * m + j] + row[i] * row[j];
            }
            atb[i] = atb[i] + row[i] * h;
        }
    }
    solve_or_fit_err(&mut ata, &mut atb)?;
    let coef = atb;
    // h(0), h'(0), h''(0)/2, h'''(0)/6 at the mapped origin
    let t0 = map(F::zero());
    let scale = lit::<F>(2.0) / (emax - emin);
    let d1 = cheb_der(&coef);
    let d2 = cheb_der(&d1);
    let d3 = cheb_der(&d2);
    let a = cheb_eval(&coef, t0);
    let b = cheb_eval(&d1, t0) * scale;
    let c = cheb_eval(&d2, t0) * scale * scale / lit::<F>(2.0);
    let d = cheb_eval(&d3, t0) * scale * scale * scale / lit::<F>(6.0);
    let mut rms = F::zero();
    for &(e, v) in samples {
        let resid = (cheb_eval(&coef, map(e)) / e) - v;
        rms = rms + resid * resid;
    }
    let rms_residual = (rms / lit::<F>(n as f64)).sqrt();
    Ok(RenormFit {
        eps_grid: samples.iter().map(|s| s.0).collect(),
        values: samples.iter().map(|s| s.1).collect(),
        a,
        b,
        c,
        d,
        rms_residual,
        degree: deg,
    })
}

fn solve_or_fit_err<F: Real>(ata: &mut [F], atb: &mut [F]) -> Result<()> {
    crate::num::solve_linear(ata, atb)
        .map_err(|_| Error::Fit("rank-deficient finite-part fit".to_string()))
}

/// Diagnostic refit including a `log ε` column; returns the fitted log
/// coefficient (in energy units). A clean regulated family yields a value
/// far below the finite part.
pub fn log_coefficient_diagnostic<F: Real>(samples: &[(F, F)], degree: Option<usize>) -> Result<F> {
    let n = samples.len();
    if n < 5 {
        return Err(Error::Fit("need at least 5 samples".to_string()));
    }
    let deg = degree.unwrap_or_else(|| (n - 4).min(10)).max(1);
    let emin = samples
        .iter()
        .map(|s| s.0)
        .fold(F::infinity(), |a, b| a.min(b));
    let emax = samples
        .iter()
        .map(|s| s.0)
        .fold(F::neg_infinity(), |a, b| a.max(b));
    let map = |e: F| (lit::<F>(2.0) * e - (emin + emax)) / (emax - emin);
    let m = deg + 2; // chebyshev block + ε log ε column in h-space
    let mut ata = vec![F::zero(); m * m];
    let mut atb = vec![F::zero(); m];
    for &(e, v) in samples {
        let h = e * v;
        let mut row = cheb_t(map(e), deg);
        row.push(e * e.ln());
        for i in 0..m {
            for j in 0..m {
                ata[i * m + j] = ata[i * m + j] + row[i] * row[j];
            }
            atb[i] = atb[i] + row[i] * h;
        }
    }
    solve_or_fit_err(&mut ata, &mut atb)?;
    Ok(atb[m - 1])
}

/// Default regulator grid: Chebyshev-spaced points in `[0.02, 0.12]`. The
/// density controls the attainable accuracy of the finite part; thirteen
/// points resolve it to a few parts in `1e6`.
pub fn default_eps_grid<F: Real>(n: usize) -> Vec<F> {
    let (lo, hi) = (0.02f64, 0.12f64);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut out: Vec<F> = (0..n)
        .map(|k| {
            let t = (std::f64::consts::PI * k as f64 / (n as f64 - 1.0)).cos();
            lit::<F>(mid + half * t)
        })
        .collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

/// The six-point uniform grid `{0.02, 0.04, ..., 0.12}`.
pub fn uniform_eps_grid<F: Real>() -> Vec<F> {
    (1..=6).map(|k| lit::<F>(0.02 * k as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        maxwell_energy_expansion, maxwell_regulated_energy_closed_form, maxwell_solution,
        MaxwellConfig,
    };
    use crate::num::rel_residual;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = gauss_legendre::<f64>(6);
        // degree 11 exactness: ∫_{-1}^{1} x^10 = 2/11
        let s: f64 = gl.iter().map(|&(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let w_sum: f64 = gl.iter().map(|&(_, w)| w).sum();
        assert!((w_sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_rule_volume_and_parity() {
        let spec = QuadratureSpec::<f64>::default();
        let vol = sphere_integral(|_| 1.0, &spec).unwrap();
        assert!((vol - std::f64::consts::PI.powi(3)).abs() < 1e-12);
        // odd integrand vanishes by symmetry of the rule
        let odd = sphere_integral(|n| n[2], &spec).unwrap();
        assert!(odd.abs() < 1e-14);
        let odd2 = sphere_integral(|n| n[0] * n[1] * n[4], &spec).unwrap();
        assert!(odd2.abs() < 1e-14);
    }

    #[test]
    fn sphere_identity_for_parallel_form() {
        // ∫ φ^{n̂a} φ_{n̂a} = Vol(S⁵) |φ|² / 6
        let spec = QuadratureSpec::<f64>::default();
        for cfg in [
            MaxwellConfig::standard(),
            MaxwellConfig::from_pairs(&[(0, 1), (2, 3)]).unwrap(),
            MaxwellConfig::from_pairs(&[(1, 4)]).unwrap(),
        ] {
            let c = cfg.clone();
            let got = sphere_integral(
                move |n: &[f64; 6]| {
                    let coords: [f64; 6] = [-n[0], -n[1], -n[2], -n[3], -n[4], -n[5]];
                    c.phi_n_sq(&coords)
                },
                &spec,
            )
            .unwrap();
            let want = std::f64::consts::PI.powi(3) * cfg.phi_norm_sq() / 6.0;
            assert!(
                rel_residual(got, want, 1e-12) < 1e-12,
                "{got} vs {want}"
            );
            // Monte Carlo cross-check (loose)
            let c2 = cfg.clone();
            let mc = sphere_integral_mc(
                move |n: &[f64; 6]| {
                    let coords: [f64; 6] = [-n[0], -n[1], -n[2], -n[3], -n[4], -n[5]];
                    c2.phi_n_sq(&coords)
                },
                20_000,
                7,
            );
            assert!(rel_residual(mc, want, 1e-12) < 0.05, "mc {mc} vs {want}");
        }
    }

    #[test]
    fn sphere_rule_stable_under_doubling() {
        let cfg = MaxwellConfig::standard();
        let spec = QuadratureSpec::<f64>::default();
        let refined = spec.refined();
        let f = |n: &[f64; 6]| {
            let coords: [f64; 6] = [-n[0], -n[1], -n[2], -n[3], -n[4], -n[5]];
            cfg.phi_n_sq(&coords) + 0.3
        };
        let a = sphere_integral(f, &spec).unwrap();
        let b = sphere_integral(f, &refined).unwrap();
        assert!(rel_residual(a, b, 1e-12) < 1e-13);
    }

    #[test]
    fn regulated_energy_matches_closed_form() {
        let spec = QuadratureSpec::<f64>::default();
        for (pairs, eps) in [
            (vec![(0usize, 1usize)], 0.1),
            (vec![(0, 1), (2, 3)], 0.2),
        ] {
            let cfg = MaxwellConfig::from_pairs(&pairs).unwrap();
            let conn = maxwell_solution::<f64>(&cfg);
            let quad = regulated_energy(&conn, eps, &spec).unwrap();
            let closed = maxwell_regulated_energy_closed_form(&cfg, eps).unwrap();
            assert!(
                rel_residual(quad, closed, 1e-12) < 1e-6,
                "eps {eps}: quadrature {quad} vs closed {closed}"
            );
        }
    }

    #[test]
    fn regulated_energy_is_deterministic() {
        let cfg = MaxwellConfig::standard();
        let conn = maxwell_solution::<f64>(&cfg);
        let spec = QuadratureSpec::<f64>::default();
        let a = regulated_energy(&conn, 0.1, &spec).unwrap();
        let b = regulated_energy(&conn, 0.1, &spec).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn bulk_integral_of_unit_integrand_is_ball_volume_quarter() {
        let m = crate::geometry::euclidean_metric::<f64>();
        let spec = QuadratureSpec::<f64>::default();
        let got = bulk_invariant_integral(|_| Ok(1.0), &m, &spec).unwrap();
        let want = std::f64::consts::PI.powi(3) / 6.0 / 4.0;
        assert!(rel_residual(got, want, 1e-12) < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn bulk_integral_of_closed_form_integrand_gives_renormalized_energy() {
        let cfg = MaxwellConfig::standard();
        let m = crate::geometry::euclidean_metric::<f64>();
        let spec = QuadratureSpec::<f64>::default();
        let got = bulk_invariant_integral(
            |p| Ok(crate::models::maxwell_eren_integrand_flat(&cfg, p)),
            &m,
            &spec,
        )
        .unwrap();
        let want = -std::f64::consts::PI.powi(3);
        assert!(rel_residual(got, want, 1e-12) < 1e-11, "{got} vs {want}");
    }

    #[test]
    fn finite_part_recovers_synthetic_model() {
        // E = 3/ε + 7 + ε sampled on the uniform grid
        let grid = uniform_eps_grid::<f64>();
        let samples: Vec<(f64, f64)> = grid.iter().map(|&e| (e, 3.0 / e + 7.0 + e)).collect();
        let fit = extract_finite_part(&samples, None).unwrap();
        assert!((fit.a - 3.0).abs() < 1e-10);
        assert!((fit.b - 7.0).abs() < 1e-10);
        assert!((fit.c - 1.0).abs() < 1e-9);
        assert!(fit.d.abs() < 1e-8);
        assert!(fit.rms_residual < 1e-11);
        assert_eq!(fit.degree, 3);
    }

    #[test]
    fn finite_part_of_closed_form_energy() {
        let cfg = MaxwellConfig::standard();
        let (a_exact, b_exact) = maxwell_energy_expansion(&cfg);
        let grid = default_eps_grid::<f64>(13);
        let samples: Vec<(f64, f64)> = grid
            .iter()
            .map(|&e| (e, maxwell_regulated_energy_closed_form(&cfg, e).unwrap()))
            .collect();
        let fit = extract_finite_part(&samples, None).unwrap();
        assert!(
            (fit.b - b_exact).abs() < 1e-6 * b_exact.abs(),
            "finite part {} vs exact {b_exact}",
            fit.b
        );
        assert!(
            (fit.a - a_exact).abs() < 1e-4 * a_exact.abs(),
            "divergent coefficient {} vs exact {a_exact}",
            fit.a
        );
        // no-log diagnostic
        let logc = log_coefficient_diagnostic(&samples, None).unwrap();
        assert!(
            logc.abs() < 1e-3 * b_exact.abs(),
            "log coefficient {logc}"
        );
    }

    #[test]
    fn finite_part_requires_enough_samples() {
        let samples = [(0.02, 1.0), (0.04, 2.0), (0.06, 1.5)];
        assert!(matches!(
            extract_finite_part(&samples, None),
            Err(Error::Fit(_))
        ));
    }
}
