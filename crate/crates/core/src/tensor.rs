//! Dense point tensors with abstract-index bookkeeping.
//!
//! A [`Tensor`] holds the components of a tensor at a single point together
//! with its valence: an ordered list of slots, each either a spacetime index
//! (dimension = chart dimension) or a fiber index (dimension = bundle rank).
//! Fiber-up slots act as endomorphism columns, fiber-down slots as rows, so
//! matrix composition and traces are ordinary contractions.
//!
//! Components may be plain scalars or whole jets; everything is generic over
//! the element ring [`Coeff`].

use crate::error::{Error, Result};
use crate::num::Coeff;
use num_traits::{Float, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Spacetime,
    Fiber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub kind: SlotKind,
    pub pos: Position,
}

impl Slot {
    pub const fn st_up() -> Slot {
        Slot { kind: SlotKind::Spacetime, pos: Position::Up }
    }
    pub const fn st_down() -> Slot {
        Slot { kind: SlotKind::Spacetime, pos: Position::Down }
    }
    pub const fn fiber_up() -> Slot {
        Slot { kind: SlotKind::Fiber, pos: Position::Up }
    }
    pub const fn fiber_down() -> Slot {
        Slot { kind: SlotKind::Fiber, pos: Position::Down }
    }

    fn flipped(self) -> Slot {
        Slot {
            kind: self.kind,
            pos: match self.pos {
                Position::Up => Position::Down,
                Position::Down => Position::Up,
            },
        }
    }
}

/// Dense component tensor at a point.
#[derive(Clone, Debug)]
pub struct Tensor<A: Coeff> {
    slots: Vec<Slot>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<A>,
}

fn strides_for(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Odometer iteration over a multi-index range.
pub(crate) fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    let rank = dims.len();
    if rank == 0 {
        f(&[]);
        return;
    }
    if dims.iter().any(|&d| d == 0) {
        return;
    }
    let mut idx = vec![0usize; rank];
    loop {
        f(&idx);
        let mut k = rank;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl<A: Coeff> Tensor<A> {
    /// All-zero tensor; `proto` supplies the zero element (jets carry their
    /// layout with them).
    pub fn zeros(slots: Vec<Slot>, dims: Vec<usize>, proto: &A) -> Tensor<A> {
        assert_eq!(slots.len(), dims.len());
        let n: usize = dims.iter().product();
        let strides = strides_for(&dims);
        Tensor {
            slots,
            dims,
            strides,
            data: vec![proto.zero_like(); n.max(1)],
        }
    }

    pub fn scalar(value: A) -> Tensor<A> {
        Tensor {
            slots: vec![],
            dims: vec![],
            strides: vec![],
            data: vec![value],
        }
    }

    pub fn from_fn(
        slots: Vec<Slot>,
        dims: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> A,
    ) -> Tensor<A> {
        assert_eq!(slots.len(), dims.len());
        let mut data = Vec::with_capacity(dims.iter().product::<usize>().max(1));
        for_each_index(&dims, |idx| data.push(f(idx)));
        let strides = strides_for(&dims);
        Tensor { slots, dims, strides, data }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    #[inline]
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut o = 0;
        for (i, &v) in idx.iter().enumerate() {
            debug_assert!(v < self.dims[i]);
            o += v * self.strides[i];
        }
        o
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> &A {
        &self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: A) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn update(&mut self, idx: &[usize], f: impl FnOnce(&A) -> A) {
        let o = self.offset(idx);
        self.data[o] = f(&self.data[o]);
    }

    pub fn map<B: Coeff>(&self, f: impl Fn(&A) -> B) -> Tensor<B> {
        Tensor {
            slots: self.slots.clone(),
            dims: self.dims.clone(),
            strides: self.strides.clone(),
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scalar_value(&self) -> &A {
        assert_eq!(self.rank(), 0, "not a rank-0 tensor");
        &self.data[0]
    }

    pub fn add(&self, o: &Tensor<A>) -> Result<Tensor<A>> {
        if self.slots != o.slots || self.dims != o.dims {
            return Err(Error::Slot("addition valence mismatch".to_string()));
        }
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(Tensor {
            slots: self.slots.clone(),
            dims: self.dims.clone(),
            strides: self.strides.clone(),
            data,
        })
    }

    pub fn sub(&self, o: &Tensor<A>) -> Result<Tensor<A>> {
        if self.slots != o.slots || self.dims != o.dims {
            return Err(Error::Slot("subtraction valence mismatch".to_string()));
        }
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        Ok(Tensor {
            slots: self.slots.clone(),
            dims: self.dims.clone(),
            strides: self.strides.clone(),
            data,
        })
    }

    pub fn neg(&self) -> Tensor<A> {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, r: A::R) -> Tensor<A> {
        self.map(|a| a.scale(r))
    }

    pub fn scale_elem(&self, s: &A) -> Tensor<A> {
        self.map(|a| a.mul(s))
    }

    /// Tensor product; the result carries `self`'s slots followed by `o`'s.
    pub fn outer(&self, o: &Tensor<A>) -> Tensor<A> {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&o.slots);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&o.dims);
        let mut data = Vec::with_capacity(self.data.len() * o.data.len());
        for a in &self.data {
            for b in &o.data {
                data.push(a.mul(b));
            }
        }
        let strides = strides_for(&dims);
        Tensor { slots, dims, strides, data }
    }

    /// Contract slots `i` and `j`: same kind and dimension, opposite
    /// positions.
    pub fn contract(&self, i: usize, j: usize) -> Result<Tensor<A>> {
        if i == j || i >= self.rank() || j >= self.rank() {
            return Err(Error::Slot(format!("bad contraction pair ({i},{j})")));
        }
        let (si, sj) = (self.slots[i], self.slots[j]);
        if si.kind != sj.kind {
            return Err(Error::Slot("contraction across index kinds".to_string()));
        }
        if si.pos == sj.pos {
            return Err(Error::Slot(
                "contraction needs one up and one down slot".to_string(),
            ));
        }
        if self.dims[i] != self.dims[j] {
            return Err(Error::Slot("contraction dimension mismatch".to_string()));
        }
        let d = self.dims[i];
        let (lo, hi) = (i.min(j), i.max(j));
        let mut slots = self.slots.clone();
        let mut dims = self.dims.clone();
        slots.remove(hi);
        slots.remove(lo);
        dims.remove(hi);
        dims.remove(lo);
        let proto = self.data[0].zero_like();
        let mut out = Tensor::zeros(slots, dims, &proto);
        let rank = self.rank();
        let mut full = vec![0usize; rank];
        let out_dims = out.dims.clone();
        for_each_index(&out_dims, |idx| {
            for (pos, &v) in idx.iter().enumerate() {
                let src = if pos < lo {
                    pos
                } else if pos + 1 < hi {
                    pos + 1
                } else {
                    pos + 2
                };
                full[src] = v;
            }
            let mut acc = proto.zero_like();
            for e in 0..d {
                full[lo] = e;
                full[hi] = e;
                acc = acc.add(self.get(&full));
            }
            out.set(idx, acc);
        });
        Ok(out)
    }

    /// Flip a spacetime slot's position by contracting with `metric`
    /// (rank 2, both slots opposite to the slot's current position). The slot
    /// stays in place.
    pub fn raise_lower(&self, slot: usize, metric: &Tensor<A>) -> Result<Tensor<A>> {
        if slot >= self.rank() {
            return Err(Error::Slot(format!("slot {slot} out of range")));
        }
        if self.slots[slot].kind != SlotKind::Spacetime {
            return Err(Error::Slot(
                "raise/lower applies to spacetime slots".to_string(),
            ));
        }
        if metric.rank() != 2
            || metric.slots[0] != metric.slots[1]
            || metric.slots[0].kind != SlotKind::Spacetime
            || metric.slots[0].pos == self.slots[slot].pos
        {
            return Err(Error::Slot(
                "metric valence incompatible with raise/lower".to_string(),
            ));
        }
        let d = self.dims[slot];
        let mut slots = self.slots.clone();
        slots[slot] = slots[slot].flipped();
        let proto = self.data[0].zero_like();
        let mut out = Tensor::zeros(slots, self.dims.clone(), &proto);
        let mut src = vec![0usize; self.rank()];
        let dims = self.dims.clone();
        for_each_index(&dims, |idx| {
            let mut acc = proto.zero_like();
            src.copy_from_slice(idx);
            for e in 0..d {
                src[slot] = e;
                acc = acc.add(&metric.get(&[idx[slot], e]).mul(self.get(&src)));
            }
            out.set(idx, acc);
        });
        Ok(out)
    }

    /// Unit-weight antisymmetrization over the listed slots (all of the same
    /// kind and position).
    pub fn antisymmetrize(&self, slots: &[usize]) -> Result<Tensor<A>> {
        if slots.len() < 2 {
            return Err(Error::Slot(
                "antisymmetrization needs at least two slots".to_string(),
            ));
        }
        let s0 = self.slots[slots[0]];
        for &s in slots {
            if s >= self.rank() {
                return Err(Error::Slot(format!("slot {s} out of range")));
            }
            if self.slots[s] != s0 {
                return Err(Error::Slot(
                    "antisymmetrization slots must share kind and position".to_string(),
                ));
            }
            if self.dims[s] != self.dims[slots[0]] {
                return Err(Error::Slot(
                    "antisymmetrization dimension mismatch".to_string(),
                ));
            }
        }
        let k = slots.len();
        let perms = permutations_with_sign(k);
        let weight = 1.0 / (1..=k).map(|i| i as f64).product::<f64>();
        let proto = self.data[0].zero_like();
        let mut out = Tensor::zeros(self.slots.clone(), self.dims.clone(), &proto);
        let mut src = vec![0usize; self.rank()];
        let dims = self.dims.clone();
        for_each_index(&dims, |idx| {
            let mut acc = proto.zero_like();
            for (perm, sign) in &perms {
                src.copy_from_slice(idx);
                for (a, &pa) in perm.iter().enumerate() {
                    src[slots[a]] = idx[slots[pa]];
                }
                let term = self.get(&src);
                acc = if *sign > 0 { acc.add(term) } else { acc.sub(term) };
            }
            out.set(idx, acc.scale(crate::num::lit::<A::R>(weight)));
        });
        Ok(out)
    }

    /// Swap two slots (metadata and data layout).
    pub fn swap_slots(&self, i: usize, j: usize) -> Tensor<A> {
        if i == j {
            return self.clone();
        }
        let mut slots = self.slots.clone();
        let mut dims = self.dims.clone();
        slots.swap(i, j);
        dims.swap(i, j);
        let proto = self.data[0].zero_like();
        let mut out = Tensor::zeros(slots, dims, &proto);
        let mut src = vec![0usize; self.rank()];
        let out_dims = out.dims.clone();
        for_each_index(&out_dims, |idx| {
            src.copy_from_slice(idx);
            src.swap(i, j);
            out.set(idx, self.get(&src).clone());
        });
        out
    }

    /// Frobenius norm of the component values.
    pub fn frob_norm(&self) -> A::R {
        let mut acc = A::R::zero();
        for a in &self.data {
            let m = a.value_modulus();
            acc = acc + m * m;
        }
        acc.sqrt()
    }

    pub fn max_modulus(&self) -> A::R {
        let mut acc = A::R::zero();
        for a in &self.data {
            acc = acc.max(a.value_modulus());
        }
        acc
    }

    pub fn data(&self) -> &[A] {
        &self.data
    }
}

fn permutations_with_sign(k: usize) -> Vec<(Vec<usize>, i8)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, k: usize, out: &mut Vec<(Vec<usize>, i8)>) {
        if prefix.len() == k {
            let mut inversions = 0;
            for i in 0..k {
                for j in i + 1..k {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, k, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], k, &mut out);
    out
}

/// Rank-2 spacetime tensor from a row-major matrix closure.
pub fn matrix_tensor<A: Coeff>(
    dim: usize,
    pos: Position,
    mut f: impl FnMut(usize, usize) -> A,
) -> Tensor<A> {
    let slot = Slot { kind: SlotKind::Spacetime, pos };
    Tensor::from_fn(vec![slot, slot], vec![dim, dim], |idx| f(idx[0], idx[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta6() -> Tensor<f64> {
        Tensor::from_fn(vec![Slot::st_up(), Slot::st_down()], vec![6, 6], |idx| {
            if idx[0] == idx[1] {
                1.0
            } else {
                0.0
            }
        })
    }

    fn invert6(g: &Tensor<f64>) -> Tensor<f64> {
        let mut inv = [[0.0f64; 6]; 6];
        for col in 0..6 {
            let mut a: Vec<f64> = (0..36).map(|t| *g.get(&[t / 6, t % 6])).collect();
            let mut b = vec![0.0; 6];
            b[col] = 1.0;
            crate::num::solve_linear(&mut a, &mut b).unwrap();
            for r in 0..6 {
                inv[r][col] = b[r];
            }
        }
        matrix_tensor(6, Position::Up, |i, j| inv[i][j])
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        let t = delta6().contract(0, 1).unwrap();
        assert_eq!(*t.scalar_value(), 6.0);
    }

    #[test]
    fn metric_times_inverse_is_identity() {
        let g = matrix_tensor(6, Position::Down, |i, j| {
            if i == j {
                1.5 + 0.2 * i as f64
            } else {
                0.05 * ((i + 2 * j) as f64).sin()
            }
        });
        let g = g.add(&g.swap_slots(0, 1)).unwrap().scale(0.5);
        let gi = invert6(&g);
        let prod = gi.outer(&g).contract(1, 2).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(&[i, j]) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contraction_requires_opposite_positions() {
        let g = matrix_tensor(6, Position::Down, |i, j| (i + j) as f64);
        assert!(matches!(g.contract(0, 1), Err(crate::Error::Slot(_))));
        let mixed = Tensor::from_fn(
            vec![Slot::st_up(), Slot::fiber_down()],
            vec![6, 6],
            |_| 1.0f64,
        );
        assert!(matches!(mixed.contract(0, 1), Err(crate::Error::Slot(_))));
    }

    #[test]
    fn six_term_antisymmetrization_formula() {
        let x = matrix_tensor(6, Position::Down, |i, j| ((2 * i + 3 * j + i * j) as f64).sin());
        let y = Tensor::from_fn(vec![Slot::st_down()], vec![6], |idx| (idx[0] as f64 + 0.7).cos());
        let anti = x.outer(&y).antisymmetrize(&[0, 1, 2]).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let manual = (x.get(&[a, b]) * y.get(&[c])
                        + x.get(&[b, c]) * y.get(&[a])
                        + x.get(&[c, a]) * y.get(&[b])
                        - x.get(&[b, a]) * y.get(&[c])
                        - x.get(&[a, c]) * y.get(&[b])
                        - x.get(&[c, b]) * y.get(&[a]))
                        / 6.0;
                    assert!((anti.get(&[a, b, c]) - manual).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn antisymmetrize_kills_symmetric_and_is_idempotent() {
        let sym = matrix_tensor(6, Position::Down, |i, j| ((i * j) as f64).cos());
        let sym = sym.add(&sym.swap_slots(0, 1)).unwrap();
        assert!(sym.antisymmetrize(&[0, 1]).unwrap().frob_norm() < 1e-14);

        let skew = matrix_tensor(6, Position::Down, |i, j| i as f64 - j as f64 + ((i + j) as f64).sin());
        let once = skew.antisymmetrize(&[0, 1]).unwrap();
        let twice = once.antisymmetrize(&[0, 1]).unwrap();
        assert!(once.sub(&twice).unwrap().frob_norm() < 1e-14);
    }

    #[test]
    fn fiber_trace_counts_rank() {
        let k = 8;
        let idm = Tensor::from_fn(vec![Slot::fiber_up(), Slot::fiber_down()], vec![k, k], |idx| {
            if idx[0] == idx[1] {
                1.0f64
            } else {
                0.0
            }
        });
        assert_eq!(*idm.contract(0, 1).unwrap().scalar_value(), k as f64);
    }

    #[test]
    fn raise_then_lower_roundtrip() {
        let g = matrix_tensor(6, Position::Down, |i, j| {
            if i == j {
                1.5 + 0.1 * i as f64
            } else {
                0.05
            }
        });
        let gi = invert6(&g);
        let v = Tensor::from_fn(vec![Slot::st_down()], vec![6], |idx| (idx[0] as f64).sin() + 0.3);
        let up = v.raise_lower(0, &gi).unwrap();
        assert_eq!(up.slots()[0], Slot::st_up());
        let back = up.raise_lower(0, &g).unwrap();
        for i in 0..6 {
            assert!((back.get(&[i]) - v.get(&[i])).abs() < 1e-12);
        }
    }
}
