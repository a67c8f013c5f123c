//! Shared fixtures for unit tests across modules.

use num_complex::Complex;

use crate::fields::{coord_jets, Chart, ConnectionField, Domain, MetricField};
use crate::jet::Jet;
use crate::tensor::{Slot, Tensor};

/// A fixed non-flat perturbed metric `δ + 0.05 S(x)` with trig entries.
pub fn bumpy_metric() -> MetricField<f64> {
    MetricField::new("bumpy", Chart::Euclidean6, Domain::All, 5, |p, order| {
        let x = coord_jets(p, order);
        let dim = 6;
        let dn = Slot::st_down();
        let proto = x[0].zero_like();
        let mut g = Tensor::zeros(vec![dn, dn], vec![dim, dim], &proto);
        for a in 0..dim {
            for b in a..dim {
                let phase = 0.3 * (a as f64) + 0.7 * (b as f64);
                let wave = (&x[(a + 1) % 6].scale(1.3) + &x[(b + 2) % 6].scale(0.7)).sin();
                let poly = &x[a] * &x[b];
                let mut v = (&wave.scale((phase + 0.5).cos()) + &poly.scale(0.4)).scale(0.05);
                if a == b {
                    v = &v + &Jet::constant(6, order, 1.0);
                }
                g.set(&[a, b], v.clone());
                if a != b {
                    g.set(&[b, a], v);
                }
            }
        }
        Ok(g)
    })
}

/// Non-abelian anti-Hermitian connection with polynomial/trig entries.
pub fn wavy_su2() -> ConnectionField<f64> {
    ConnectionField::new("wavy-su2", 2, Chart::Euclidean6, Domain::All, 5, |p, order| {
        let x = coord_jets(p, order);
        let i = Complex::new(0.0, 1.0);
        let proto = x[0].complexify().zero_like();
        let mut a = Tensor::zeros(
            vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()],
            vec![6, 2, 2],
            &proto,
        );
        for s in 0..6 {
            let h00 = (&x[s] + &x[(s + 1) % 6].sin()).scale(0.4);
            let h11 = (&x[(s + 2) % 6] * &x[(s + 3) % 6]).scale(0.3);
            let re01 = x[(s + 4) % 6].cos().scale(0.25);
            let im01 = x[(s + 5) % 6].scale(0.35);
            let h01 = &re01.complexify() + &im01.complexify().scaled_by(i);
            let h10 = h01.conj_jet();
            a.set(&[s, 0, 0], h00.complexify().scaled_by(i));
            a.set(&[s, 0, 1], h01.scaled_by(i));
            a.set(&[s, 1, 0], h10.scaled_by(i));
            a.set(&[s, 1, 1], h11.complexify().scaled_by(i));
        }
        Ok(a)
    })
}

/// Zero abelian connection (trivial coupling).
pub fn zero_connection(k: usize) -> ConnectionField<f64> {
    ConnectionField::new("zero", k, Chart::Euclidean6, Domain::All, 5, move |p, order| {
        let proto = Jet::<Complex<f64>>::constant(p.chart().dim(), order, Complex::new(0.0, 0.0));
        Ok(Tensor::zeros(
            vec![Slot::st_down(), Slot::fiber_up(), Slot::fiber_down()],
            vec![6, k, k],
            &proto,
        ))
    })
}
