//! Compensated summation and block-ordered parallel reduction.
//!
//! Every floating-point reduction in the crate goes through [`Neumaier`] (or
//! its complex counterpart), and parallel reductions split the index range
//! into fixed-size blocks whose partial sums are merged in block order. The
//! block size never depends on the thread count, so results are bit-identical
//! whether the rayon pool has one thread or sixty-four.

use num_complex::Complex64;
use rayon::prelude::*;

/// Indices per reduction block.
pub const BLOCK: usize = 256;

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both compensation terms.
    #[inline]
    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated accumulator over complex values (independent re/im lanes).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub const fn new() -> Self {
        Self {
            re: Neumaier::new(),
            im: Neumaier::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn merge(&mut self, other: &ComplexNeumaier) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexNeumaier {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexNeumaier::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Sum of `f(i)` for `i` in `0..len`, computed in parallel over fixed blocks
/// and merged in ascending block order.
pub fn block_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let nblocks = len.div_ceil(BLOCK);
    let partials: Vec<Neumaier> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(len);
            (start..end).map(&f).collect()
        })
        .collect();
    let mut total = Neumaier::new();
    for p in &partials {
        total.merge(p);
    }
    total.value()
}

/// Complex analogue of [`block_sum`].
pub fn block_sum_complex<F>(len: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let nblocks = len.div_ceil(BLOCK);
    let partials: Vec<ComplexNeumaier> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(len);
            (start..end).map(&f).collect()
        })
        .collect();
    let mut total = ComplexNeumaier::new();
    for p in &partials {
        total.merge(p);
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let acc: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn block_sum_is_thread_count_invariant() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| block_sum(100_003, f));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| block_sum(100_003, f));
        assert_eq!(one.to_bits(), four.to_bits());
    }

    #[test]
    fn complex_block_sum_matches_sequential() {
        let f = |i: usize| Complex64::new(i as f64, -(i as f64));
        let s = block_sum_complex(1000, f);
        assert_eq!(s, Complex64::new(499_500.0, -499_500.0));
    }
}
