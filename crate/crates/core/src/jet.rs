//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] stores the Taylor coefficients `c_α = ∂^α f / α!` of a smooth
//! function at a point, for all multi-indices `|α| <= order` in `nvars`
//! variables. Arithmetic on jets propagates exact derivatives: products are
//! truncated convolutions, and composition with a univariate function uses
//! the derivative sequence of the outer function at the inner value. Every
//! chart-local curvature or gauge quantity in this crate is assembled from
//! jet arithmetic, so all derivatives are exact to machine precision rather
//! than finite-difference approximations.
//!
//! Coefficient layouts are interned per `(nvars, order)` in a global table
//! registry. Layouts are graded (degree by degree), so the coefficients of a
//! lower-order jet are a prefix of a higher-order one and truncation is a
//! prefix copy.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{lit, Real, Scalar};

/// Hard cap on the jet order; order 5 is needed internally when building
/// connections whose components already contain two metric derivatives.
pub const MAX_ORDER: usize = 6;
/// Hard cap on chart dimension.
pub const MAX_VARS: usize = 6;

type Mono = [u8; MAX_VARS];

/// Interned coefficient layout and operation tables for one `(nvars, order)`.
pub struct JetSpace {
    pub nvars: usize,
    pub order: usize,
    monomials: Vec<Mono>,
    pos: HashMap<Mono, u32>,
    /// Flattened multiplication table: for result position `k`, the factor
    /// pairs are `mul_pairs[mul_seg[k]..mul_seg[k+1]]`.
    mul_seg: Vec<u32>,
    mul_pairs: Vec<(u32, u32)>,
    /// For each variable v, `partial[v][t] = (src, factor)` maps a position
    /// `t` of the order-1-lower layout to the source coefficient.
    partial: Vec<Vec<(u32, u8)>>,
    /// `α!` per monomial, as f64 (exact for the small factorials involved).
    factorial: Vec<f64>,
}

fn monos_of_degree(nvars: usize, degree: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut cur: Mono = [0; MAX_VARS];
    fn rec(out: &mut Vec<Mono>, cur: &mut Mono, var: usize, nvars: usize, left: usize) {
        if var == nvars - 1 {
            cur[var] = left as u8;
            out.push(*cur);
            cur[var] = 0;
            return;
        }
        for take in (0..=left).rev() {
            cur[var] = take as u8;
            rec(out, cur, var + 1, nvars, left - take);
        }
        cur[var] = 0;
    }
    rec(&mut out, &mut cur, 0, nvars, degree);
    out
}

impl JetSpace {
    fn build(nvars: usize, order: usize) -> JetSpace {
        assert!(nvars >= 1 && nvars <= MAX_VARS);
        assert!(order <= MAX_ORDER);
        let mut monomials = Vec::new();
        let mut degree_end = vec![0usize];
        for d in 0..=order {
            monomials.extend(monos_of_degree(nvars, d));
            degree_end.push(monomials.len());
        }
        let mut pos = HashMap::with_capacity(monomials.len());
        for (i, m) in monomials.iter().enumerate() {
            pos.insert(*m, i as u32);
        }

        let mut mul_seg = Vec::with_capacity(monomials.len() + 1);
        let mut mul_pairs = Vec::new();
        mul_seg.push(0u32);
        for gamma in &monomials {
            // All componentwise splits gamma = alpha + beta.
            let mut alphas = vec![[0u8; MAX_VARS]];
            for v in 0..nvars {
                let mut next = Vec::with_capacity(alphas.len() * (gamma[v] as usize + 1));
                for a in &alphas {
                    for take in 0..=gamma[v] {
                        let mut b = *a;
                        b[v] = take;
                        next.push(b);
                    }
                }
                alphas = next;
            }
            for a in alphas {
                let mut b: Mono = [0; MAX_VARS];
                for v in 0..nvars {
                    b[v] = gamma[v] - a[v];
                }
                mul_pairs.push((pos[&a], pos[&b]));
            }
            mul_seg.push(mul_pairs.len() as u32);
        }

        let sub_len = degree_end[order];
        let mut partial = Vec::with_capacity(nvars);
        for v in 0..nvars {
            let mut tab = Vec::new();
            if order > 0 {
                for t in 0..sub_len {
                    let beta = monomials[t];
                    let mut src = beta;
                    src[v] += 1;
                    tab.push((pos[&src], beta[v] + 1));
                }
            }
            partial.push(tab);
        }

        let factorial = monomials
            .iter()
            .map(|m| {
                m[..nvars]
                    .iter()
                    .map(|&e| (1..=e as u64).product::<u64>().max(1) as f64)
                    .product()
            })
            .collect();

        JetSpace {
            nvars,
            order,
            monomials,
            pos,
            mul_seg,
            mul_pairs,
            partial,
            factorial,
        }
    }

    /// Fetch (building and interning on first use) the layout for
    /// `(nvars, order)`. The fast path is a single atomic load.
    pub fn get(nvars: usize, order: usize) -> &'static JetSpace {
        const NONE: OnceLock<&'static JetSpace> = OnceLock::new();
        const ROW: [OnceLock<&'static JetSpace>; MAX_ORDER + 1] = [NONE; MAX_ORDER + 1];
        static TABLE: [[OnceLock<&'static JetSpace>; MAX_ORDER + 1]; MAX_VARS + 1] =
            [ROW; MAX_VARS + 1];
        assert!(nvars <= MAX_VARS && order <= MAX_ORDER);
        TABLE[nvars][order].get_or_init(|| Box::leak(Box::new(JetSpace::build(nvars, order))))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    fn position(&self, idx: &[usize]) -> u32 {
        let mut m: Mono = [0; MAX_VARS];
        for &i in idx {
            assert!(i < self.nvars, "variable index out of range");
            m[i] += 1;
        }
        self.pos[&m]
    }
}

/// A truncated Taylor expansion with coefficients in the scalar ring `S`.
#[derive(Clone)]
pub struct Jet<S: Scalar> {
    space: &'static JetSpace,
    c: Vec<S>,
}

impl<S: Scalar> std::fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.space.nvars)
            .field("order", &self.space.order)
            .field("coeffs", &self.c)
            .finish()
    }
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.space.nvars == other.space.nvars
            && self.space.order == other.space.order
            && self.c == other.c
    }
}

impl<S: Scalar> Jet<S> {
    pub fn constant(nvars: usize, order: usize, value: S) -> Jet<S> {
        let space = JetSpace::get(nvars, order);
        let mut c = vec![S::zero(); space.len()];
        c[0] = value;
        Jet { space, c }
    }

    /// The coordinate function `x_var` seeded at `value`.
    pub fn coordinate(nvars: usize, order: usize, var: usize, value: S) -> Jet<S> {
        let space = JetSpace::get(nvars, order);
        let mut c = vec![S::zero(); space.len()];
        c[0] = value;
        if order >= 1 {
            c[1 + var] = S::one();
        }
        Jet { space, c }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.space.order
    }

    #[inline]
    pub fn value(&self) -> S {
        self.c[0]
    }

    /// Partial derivative `∂^idx f` (indices may repeat, order arbitrary).
    pub fn derivative(&self, idx: &[usize]) -> S {
        assert!(
            idx.len() <= self.order(),
            "requested derivative order {} exceeds jet order {}",
            idx.len(),
            self.order()
        );
        let p = self.space.position(idx) as usize;
        self.c[p].scale(lit::<S::R>(self.space.factorial[p]))
    }

    pub fn d1(&self, i: usize) -> S {
        self.derivative(&[i])
    }

    pub fn d2(&self, i: usize, j: usize) -> S {
        self.derivative(&[i, j])
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> S {
        self.derivative(&[i, j, k])
    }

    /// Truncate to a lower order (prefix copy).
    pub fn truncated(&self, order: usize) -> Jet<S> {
        if order >= self.order() {
            return self.clone();
        }
        let space = JetSpace::get(self.nvars(), order);
        Jet {
            space,
            c: self.c[..space.len()].to_vec(),
        }
    }

    pub fn zero_like(&self) -> Jet<S> {
        Jet {
            space: self.space,
            c: vec![S::zero(); self.space.len()],
        }
    }

    pub fn scale(&self, r: S::R) -> Jet<S> {
        Jet {
            space: self.space,
            c: self.c.iter().map(|&x| x.scale(r)).collect(),
        }
    }

    pub fn scaled_by(&self, s: S) -> Jet<S> {
        Jet {
            space: self.space,
            c: self.c.iter().map(|&x| x * s).collect(),
        }
    }

    /// Jet of `∂_var f`, one order lower.
    pub fn partial(&self, var: usize) -> Result<Jet<S>> {
        if self.order() == 0 {
            return Err(Error::Order(
                "cannot differentiate an order-0 jet".to_string(),
            ));
        }
        let space = JetSpace::get(self.nvars(), self.order() - 1);
        let tab = &self.space.partial[var];
        let c = tab
            .iter()
            .map(|&(src, factor)| self.c[src as usize].scale(lit::<S::R>(factor as f64)))
            .collect();
        Ok(Jet { space, c })
    }

    /// Truncated product. The result order is the minimum of the operands'.
    pub fn mul(&self, rhs: &Jet<S>) -> Jet<S> {
        assert_eq!(self.nvars(), rhs.nvars(), "jet variable count mismatch");
        let space = if self.order() <= rhs.order() {
            self.space
        } else {
            rhs.space
        };
        let n = space.len();
        let a = &self.c[..n];
        let b = &rhs.c[..n];
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = S::zero();
            let lo = space.mul_seg[k] as usize;
            let hi = space.mul_seg[k + 1] as usize;
            for &(i, j) in &space.mul_pairs[lo..hi] {
                acc = acc + a[i as usize] * b[j as usize];
            }
            c.push(acc);
        }
        Jet { space, c }
    }

    /// Compose with a univariate function whose derivative sequence at
    /// `self.value()` is `derivs[k] = h^{(k)}(value)`, `k = 0..=order`.
    pub fn compose(&self, derivs: &[S]) -> Jet<S> {
        let m = self.order();
        assert!(derivs.len() > m, "need {} outer derivatives", m + 1);
        // Horner in the truncated ring: the fluctuation part has zero value.
        let mut fluct = self.clone();
        fluct.c[0] = S::zero();
        let inv_fact = |k: usize| lit::<S::R>(1.0 / (1..=k).map(|i| i as f64).product::<f64>().max(1.0));
        let mut r = Jet::constant(self.nvars(), m, derivs[m].scale(inv_fact(m)));
        for k in (0..m).rev() {
            r = r.mul(&fluct);
            r.c[0] = r.c[0] + derivs[k].scale(inv_fact(k));
        }
        r
    }

    /// Multiplicative inverse; errors when the value vanishes.
    pub fn try_recip(&self) -> Result<Jet<S>> {
        let u = self.value();
        let inv = u
            .try_inv()
            .ok_or_else(|| Error::Domain("jet reciprocal at zero value".to_string()))?;
        // h(u) = 1/u, h^{(k)} = (-1)^k k! u^{-(k+1)}
        let mut derivs = Vec::with_capacity(self.order() + 1);
        let mut cur = inv;
        derivs.push(cur);
        for k in 1..=self.order() {
            cur = cur * inv;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            derivs.push(cur.scale(lit::<S::R>(sign * fact)));
        }
        Ok(self.compose(&derivs))
    }

    pub fn try_div(&self, rhs: &Jet<S>) -> Result<Jet<S>> {
        Ok(self.mul(&rhs.try_recip()?))
    }

    pub fn powi(&self, n: usize) -> Jet<S> {
        let mut r = Jet::constant(self.nvars(), self.order(), S::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
}

impl<F: Real> Jet<F> {
    /// Natural logarithm; requires a strictly positive value.
    pub fn ln(&self) -> Result<Jet<F>> {
        let u = self.value();
        if u <= F::zero() {
            return Err(Error::Domain(format!("log of non-positive value {u}")));
        }
        let m = self.order();
        let mut derivs = Vec::with_capacity(m + 1);
        derivs.push(u.ln());
        let inv = F::one() / u;
        let mut cur = F::one();
        for k in 1..=m {
            cur = cur * inv;
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            let fact: f64 = (1..k).map(|i| i as f64).product();
            derivs.push(cur * lit::<F>(sign * fact.max(1.0)));
        }
        Ok(self.compose(&derivs))
    }

    /// Square root; requires a strictly positive value.
    pub fn sqrt(&self) -> Result<Jet<F>> {
        let u = self.value();
        if u <= F::zero() {
            return Err(Error::Domain(format!("sqrt of non-positive value {u}")));
        }
        let m = self.order();
        let root = u.sqrt();
        let mut derivs = Vec::with_capacity(m + 1);
        derivs.push(root);
        // h^{(k)} = (1/2)(1/2-1)...(1/2-k+1) u^{1/2-k}
        let mut coef = 1.0f64;
        let mut cur = root;
        let inv = F::one() / u;
        for k in 1..=m {
            coef *= 0.5 - (k as f64 - 1.0);
            cur = cur * inv;
            derivs.push(cur * lit::<F>(coef));
        }
        Ok(self.compose(&derivs))
    }

    pub fn exp(&self) -> Jet<F> {
        let e = self.value().exp();
        let derivs = vec![e; self.order() + 1];
        self.compose(&derivs)
    }

    pub fn sin(&self) -> Jet<F> {
        let (s, c) = (self.value().sin(), self.value().cos());
        let cycle = [s, c, -s, -c];
        let derivs: Vec<F> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    pub fn cos(&self) -> Jet<F> {
        let (s, c) = (self.value().sin(), self.value().cos());
        let cycle = [c, -s, -c, s];
        let derivs: Vec<F> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    /// Promote a real jet to a complex one.
    pub fn complexify(&self) -> Jet<Complex<F>> {
        Jet {
            space: self.space,
            c: self.c.iter().map(|&x| Complex::new(x, F::zero())).collect(),
        }
    }
}

impl<F: Real> Jet<Complex<F>> {
    pub fn re_jet(&self) -> Jet<F> {
        Jet {
            space: self.space,
            c: self.c.iter().map(|z| z.re).collect(),
        }
    }

    pub fn im_jet(&self) -> Jet<F> {
        Jet {
            space: self.space,
            c: self.c.iter().map(|z| z.im).collect(),
        }
    }

    pub fn conj_jet(&self) -> Jet<Complex<F>> {
        Jet {
            space: self.space,
            c: self.c.iter().map(|z| z.conj()).collect(),
        }
    }
}

impl<S: Scalar> crate::num::Coeff for Jet<S> {
    type R = S::R;

    fn zero_like(&self) -> Self {
        Jet::zero_like(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: S::R) -> Self {
        Jet::scale(self, r)
    }
    fn value_modulus(&self) -> S::R {
        self.value().modulus()
    }
}

macro_rules! binop {
    ($trait:ident, $fn:ident, $op:tt) => {
        impl<'a, S: Scalar> std::ops::$trait<&'a Jet<S>> for &'a Jet<S> {
            type Output = Jet<S>;
            fn $fn(self, rhs: &'a Jet<S>) -> Jet<S> {
                assert_eq!(self.nvars(), rhs.nvars(), "jet variable count mismatch");
                let space = if self.order() <= rhs.order() {
                    self.space
                } else {
                    rhs.space
                };
                let n = space.len();
                let c = (0..n).map(|i| self.c[i] $op rhs.c[i]).collect();
                Jet { space, c }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl<'a, S: Scalar> std::ops::Mul<&'a Jet<S>> for &'a Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &'a Jet<S>) -> Jet<S> {
        Jet::mul(self, rhs)
    }
}

impl<S: Scalar> std::ops::Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet {
            space: self.space,
            c: self.c.iter().map(|&x| -x).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coords6(p: [f64; 6], order: usize) -> Vec<Jet<f64>> {
        (0..6).map(|v| Jet::coordinate(6, order, v, p[v])).collect()
    }

    #[test]
    fn polynomial_jet_matches_hand_calculus() {
        // f = (x1)^2 x2 at (1, 2, 0, 0, 0, 0)
        let x = coords6([1.0, 2.0, 0.0, 0.0, 0.0, 0.0], 2);
        let f = &(&x[0] * &x[0]) * &x[1];
        assert_eq!(f.value(), 2.0);
        assert_eq!(f.d1(0), 4.0);
        assert_eq!(f.d1(1), 1.0);
        assert_eq!(f.d2(0, 0), 4.0);
        assert_eq!(f.d2(0, 1), 2.0);
        assert_eq!(f.d2(1, 1), 0.0);
        assert_eq!(f.d1(2), 0.0);
    }

    fn sigma_jet(p: [f64; 6], order: usize) -> Jet<f64> {
        let x = coords6(p, order);
        let mut r2 = x[0].zero_like();
        for xi in &x {
            r2 = &r2 + &(xi * xi);
        }
        (&Jet::constant(6, order, 1.0) - &r2).scale(0.5)
    }

    #[test]
    fn sigma_field_jet() {
        let s = sigma_jet([0.3, 0.4, 0.0, 0.0, 0.0, 0.0], 3);
        assert!((s.value() - 0.375).abs() < 1e-15);
        assert!((s.d1(0) + 0.3).abs() < 1e-15);
        assert!((s.d2(0, 0) + 1.0).abs() < 1e-15);
        assert!((s.d3(0, 0, 0)).abs() < 1e-15);
    }

    #[test]
    fn log_sigma_at_origin() {
        let s = sigma_jet([0.0; 6], 3);
        let l = s.ln().unwrap();
        assert!((l.value() - 0.5f64.ln()).abs() < 1e-15);
        for i in 0..6 {
            assert_eq!(l.d1(i), 0.0);
        }
    }

    #[test]
    fn log_rejects_nonpositive() {
        let s = sigma_jet([1.2, 0.0, 0.0, 0.0, 0.0, 0.0], 2);
        assert!(s.ln().is_err());
    }

    #[test]
    fn partial_symmetry_is_exact_by_storage() {
        let x = coords6([0.2, -0.4, 0.1, 0.7, -0.3, 0.5], 3);
        let f = &(&x[0].sin() * &x[3]) * &(&x[1] + &x[4].cos());
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(f.d2(i, j).to_bits(), f.d2(j, i).to_bits());
                for k in 0..6 {
                    let a = f.d3(i, j, k);
                    assert_eq!(a.to_bits(), f.d3(k, j, i).to_bits());
                    assert_eq!(a.to_bits(), f.d3(j, i, k).to_bits());
                }
            }
        }
    }

    #[test]
    fn product_jet_equals_manual_leibniz() {
        let x = coords6([0.3, -0.2, 0.15, 0.4, -0.35, 0.25], 3);
        let a = &x[0].sin() + &(&x[1] * &x[2]);
        let b = &x[3].cos() * &(&x[4] + &x[5]);
        let p = &a * &b;
        let (i, j, k) = (0, 3, 4);
        let manual3 = a.d3(i, j, k) * b.value()
            + a.d2(i, j) * b.d1(k)
            + a.d2(i, k) * b.d1(j)
            + a.d2(j, k) * b.d1(i)
            + a.d1(i) * b.d2(j, k)
            + a.d1(j) * b.d2(i, k)
            + a.d1(k) * b.d2(i, j)
            + a.value() * b.d3(i, j, k);
        assert!((p.d3(i, j, k) - manual3).abs() < 1e-13);
        let manual2 = a.d2(i, j) * b.value()
            + a.d1(i) * b.d1(j)
            + a.d1(j) * b.d1(i)
            + a.value() * b.d2(i, j);
        assert!((p.d2(i, j) - manual2).abs() < 1e-13);
    }

    #[test]
    fn partial_extraction_shifts_derivatives() {
        let x = coords6([0.3, -0.2, 0.15, 0.4, -0.35, 0.25], 3);
        let f = &(&x[0] * &x[0]) * &x[1].sin();
        let df = f.partial(0).unwrap();
        assert_eq!(df.order(), 2);
        assert!((df.value() - f.d1(0)).abs() < 1e-15);
        assert!((df.d1(1) - f.d2(0, 1)).abs() < 1e-15);
        assert!((df.d2(1, 1) - f.d3(0, 1, 1)).abs() < 1e-15);
        assert!(df.partial(0).unwrap().partial(1).unwrap().partial(0).is_err());
    }

    #[test]
    fn transcendental_identities() {
        let x = coords6([0.4, 0.1, -0.2, 0.3, 0.0, -0.1], 3);
        let f = &x[0] + &(&x[1] * &x[2]);
        let one = &f.sin().powi(2) + &f.cos().powi(2);
        assert!((one.value() - 1.0).abs() < 1e-14);
        for i in 0..6 {
            assert!(one.d1(i).abs() < 1e-14);
            assert!(one.d3(i, 0, 1).abs() < 1e-13);
        }
        // exp(ln u) = u for positive u
        let u = &Jet::constant(6, 3, 2.0) + &(&x[3] * &x[3]);
        let back = u.ln().unwrap().exp();
        assert!((back.value() - u.value()).abs() < 1e-14);
        assert!((back.d2(3, 3) - u.d2(3, 3)).abs() < 1e-13);
        // sqrt(u)^2 = u
        let sq = u.sqrt().unwrap().powi(2);
        assert!((sq.d2(3, 3) - u.d2(3, 3)).abs() < 1e-13);
    }

    #[test]
    fn reciprocal_and_div() {
        let x = coords6([0.4, 0.1, -0.2, 0.3, 0.0, -0.1], 3);
        let u = &Jet::constant(6, 3, 1.5) + &x[0].sin();
        let r = u.try_recip().unwrap();
        let prod = &u * &r;
        assert!((prod.value() - 1.0).abs() < 1e-14);
        for i in 0..6 {
            assert!(prod.d1(i).abs() < 1e-14);
            assert!(prod.d3(i, i, 0).abs() < 1e-12);
        }
        assert!(Jet::constant(6, 2, 0.0f64).try_recip().is_err());
    }

    #[test]
    fn complex_jets_multiply() {
        use num_complex::Complex;
        let z = Complex::new(0.0, 1.0);
        let x: Vec<Jet<Complex<f64>>> = (0..6)
            .map(|v| Jet::coordinate(6, 2, v, Complex::new([0.2, 0.3, 0.1, 0.0, 0.4, 0.5][v], 0.0)))
            .collect();
        // f = i * x0 * x1
        let f = (&x[0] * &x[1]).scaled_by(z);
        assert_eq!(f.d2(0, 1), z);
        assert_eq!(f.d1(0), z.scale(0.3));
    }

    #[test]
    fn higher_order_spaces_are_prefixes() {
        let s3 = JetSpace::get(6, 3);
        let s5 = JetSpace::get(6, 5);
        assert_eq!(s3.len(), 84);
        assert_eq!(s5.len(), 462);
        for i in 0..s3.len() {
            assert_eq!(s3.monomials[i], s5.monomials[i]);
        }
        let x5 = Jet::coordinate(6, 5, 0, 0.7f64);
        let t = x5.powi(4).truncated(3);
        assert_eq!(t.order(), 3);
        assert!((t.d3(0, 0, 0) - 24.0 * 0.7).abs() < 1e-12);
    }
}
