//! Floating-point building blocks shared by the number-theoretic modules.

pub mod quad;
pub mod sum;

use num_complex::Complex64;
use std::f64::consts::TAU;

pub use quad::{adaptive_simpson, midpoint, trapezoid, GaussLegendre};
pub use sum::{block_sum, block_sum_complex, ComplexNeumaier, Neumaier};

/// e^(2πi·num/den), exact at multiples of a quarter turn.
///
/// The fraction is reduced modulo one and folded into (-1/2, 1/2] before the
/// trig call, so equal rationals always give identical bits.
pub fn unit_root(num: u64, den: u64) -> Complex64 {
    debug_assert!(den > 0);
    let r = num % den;
    if (4 * r as u128) % den as u128 == 0 {
        return match (4 * r as u128 / den as u128) as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let t = if 2 * r > den {
        -((den - r) as f64) / den as f64
    } else {
        r as f64 / den as f64
    };
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_root_quarters_are_exact() {
        assert_eq!(unit_root(1, 4), Complex64::new(0.0, 1.0));
        assert_eq!(unit_root(6, 4), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_root(9, 12), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn unit_root_matches_cis() {
        for den in 1..40u64 {
            for num in 0..2 * den {
                let z = unit_root(num, den);
                let (s, c) = (TAU * num as f64 / den as f64).sin_cos();
                assert!((z.re - c).abs() < 1e-14 && (z.im - s).abs() < 1e-14);
            }
        }
    }
}
