use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::group::{CharacterGroup, CharacterIndex};
use crate::numerics::unit_root;

/// Fourier analysis on (ℤ/N)* in discrete-log coordinates.
///
/// A character χ_e pairs with the unit a(l) = Π lift_i^{l_i} through
/// e(Σ e_i l_i / o_i), so sums over the group become multidimensional DFTs
/// with one axis per cyclic component.
#[derive(Debug, Clone)]
pub struct GroupSpectrum<'a> {
    group: &'a CharacterGroup,
    dims: Vec<usize>,
    /// Unit residue at each mixed-radix log position.
    units: Vec<u64>,
}

impl<'a> GroupSpectrum<'a> {
    pub fn new(group: &'a CharacterGroup) -> Self {
        let n = group.modulus();
        let comps = group.components();
        let dims: Vec<usize> = comps.iter().map(|c| c.order as usize).collect();
        let size = group.order() as usize;
        let mut units = Vec::with_capacity(size);
        let mut logs = vec![0usize; dims.len()];
        let mut a = 1 % n;
        for _ in 0..size {
            units.push(a);
            for i in 0..dims.len() {
                logs[i] += 1;
                a = (a as u128 * comps[i].lift as u128 % n as u128) as u64;
                if logs[i] < dims[i] {
                    break;
                }
                logs[i] = 0;
            }
        }
        Self { group, dims, units }
    }

    /// τ(χ) for every character, indexed by [`CharacterGroup::position`].
    pub fn gauss_sums(&self) -> Vec<Complex64> {
        let n = self.group.modulus();
        let mut data: Vec<Complex64> = self.units.iter().map(|&a| unit_root(a, n)).collect();
        inverse_dft_nd(&mut data, &self.dims);
        data
    }

    /// F(r) = Σ_χ coeffs[pos(χ)]·χ(r) for every residue r mod N.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.units.len());
        let mut data = coeffs.to_vec();
        inverse_dft_nd(&mut data, &self.dims);
        let mut out = vec![Complex64::new(0.0, 0.0); self.group.modulus() as usize];
        for (pos, &a) in self.units.iter().enumerate() {
            out[a as usize] = data[pos];
        }
        out
    }

    pub fn character_at(&self, pos: usize) -> CharacterIndex {
        self.group.character(pos as u64)
    }
}

/// Unnormalized e^{+2πi} DFT along every axis of a mixed-radix array whose
/// first axis is contiguous.
fn inverse_dft_nd(data: &mut [Complex64], dims: &[usize]) {
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = 1usize;
    let total = data.len();
    let mut fiber = Vec::new();
    for &len in dims {
        if len > 1 {
            let fft = planner.plan_fft(len, FftDirection::Inverse);
            fiber.resize(len, Complex64::new(0.0, 0.0));
            let block = stride * len;
            for base in (0..total).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (k, slot) in fiber.iter_mut().enumerate() {
                        *slot = data[start + k * stride];
                    }
                    fft.process(&mut fiber);
                    for (k, v) in fiber.iter().enumerate() {
                        data[start + k * stride] = *v;
                    }
                }
            }
        }
        stride *= len;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::gauss_sum;

    #[test]
    fn spectral_gauss_sums_match_direct() {
        for n in [1u64, 2, 5, 8, 24, 45, 64, 97, 120, 343] {
            let g = CharacterGroup::new(n).unwrap();
            let s = GroupSpectrum::new(&g);
            let taus = s.gauss_sums();
            for (pos, tau) in taus.iter().enumerate() {
                let chi = g.character(pos as u64);
                assert!((tau - gauss_sum(&g, &chi)).norm() < 1e-10, "n={n} pos={pos}");
            }
        }
    }

    #[test]
    fn synthesis_matches_direct_combination() {
        let g = CharacterGroup::new(180).unwrap();
        let s = GroupSpectrum::new(&g);
        let coeffs: Vec<Complex64> = (0..g.order())
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let f = s.synthesize(&coeffs);
        for r in 0..180i64 {
            let direct: Complex64 = g
                .characters()
                .enumerate()
                .map(|(k, chi)| coeffs[k] * g.evaluate(&chi, r))
                .sum();
            assert!((f[r as usize] - direct).norm() < 1e-10);
        }
    }
}
