use crate::arith::MultiplicativeTable;

/// Whether `d` is the discriminant of a quadratic field (or 1).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    let squarefree = |m: u64| crate::arith::Factorization::new(m).is_squarefree();
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Fundamental discriminants D with lo <= |D| < hi, ordered by |D| then sign
/// (positive first).
pub fn fundamental_discriminants(lo: u64, hi: u64) -> Vec<i64> {
    if hi <= lo {
        return Vec::new();
    }
    let table = MultiplicativeTable::new(hi as usize);
    let sqf = |m: u64| m >= 1 && table.mu(m as usize) != 0;
    let mut out = Vec::new();
    for n in lo.max(1)..hi {
        for d in [n as i64, -(n as i64)] {
            let ok = match d.rem_euclid(4) {
                1 => sqf(n),
                0 => {
                    let m = d / 4;
                    matches!(m.rem_euclid(4), 2 | 3) && sqf(m.unsigned_abs())
                }
                _ => false,
            };
            if ok {
                out.push(d);
            }
        }
    }
    out
}

/// Quadratic-residue bitmap modulo an odd prime p.
///
/// Construction walks the squares 1, 4, 9, … by the increments 2k + 1, so it
/// costs p/2 additions and no multiplications.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    p: u64,
    bits: Vec<u64>,
}

impl ResidueTable {
    pub fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1);
        let mut bits = vec![0u64; (p / 64 + 1) as usize];
        let mut sq = 0u64;
        let mut inc = 1u64;
        for _ in 1..=p / 2 {
            sq += inc;
            if sq >= p {
                sq -= p;
                // Increments stay below 2p, so one more wrap is enough.
                if sq >= p {
                    sq -= p;
                }
            }
            inc += 2;
            if inc >= p {
                inc -= p;
            }
            bits[(sq / 64) as usize] |= 1 << (sq % 64);
        }
        Self { p, bits }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Legendre symbol of a residue r in 0..p.
    #[inline]
    pub fn legendre_residue(&self, r: u64) -> i8 {
        if r == 0 {
            0
        } else if self.bits[(r / 64) as usize] >> (r % 64) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn legendre(&self, a: i64) -> i8 {
        self.legendre_residue(a.rem_euclid(self.p as i64) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{kronecker_symbol, PrimeSieve};

    #[test]
    fn residue_table_matches_kronecker() {
        for p in PrimeSieve::new(800).primes().filter(|&p| p > 2) {
            let t = ResidueTable::new(p);
            for a in -(p as i64)..(2 * p as i64) {
                assert_eq!(t.legendre(a), kronecker_symbol(a, p as i64).unwrap());
            }
        }
    }

    #[test]
    fn discriminant_list() {
        assert_eq!(fundamental_discriminants(3, 13), vec![-3, -4, 5, -7, 8, -8, -11, 12]);
        for d in fundamental_discriminants(1, 500) {
            assert!(is_fundamental_discriminant(d));
        }
        assert!(!is_fundamental_discriminant(-1));
        assert!(is_fundamental_discriminant(1));
    }
}
