//! Acceptance checks with pass/fail verdicts and margins.
//!
//! Each check compares two independently computed quantities (or a computed
//! quantity and a known constant) and reports the worst deviation next to its
//! tolerance. `Scale::Quick` halves X twice in the convergence checks.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::arith::{kronecker_symbol, mobius, MultiplicativeTable, PrimeSieve};
use crate::characters::{
    closed_form_primitive_sum, enumerate_family, gauss_sum, imprimitive_gauss_sum,
    twisted_quadratic_gauss_sum, CharacterGroup, FamilySelector, GaussKernel, Parity,
};
use crate::complex_family::{
    limit_p, limit_t, CompositeConductorSum, ComputeMode, LimitWindow, PrimeConductorSum,
    WindowSpec,
};
use crate::error::Result;
use crate::numerics::{trapezoid, GaussLegendre};
use crate::real_family::{
    b_coefficient, empirical_m_naive, soundararajan_identity_with, AnalyticDensity,
    SquarefreeWeights, TildeTable, TruncationPolicy, Variant, WeightFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    /// log₂ X after halving twice in quick mode.
    fn log2(self, k: u32) -> u32 {
        match self {
            Scale::Full => k,
            Scale::Quick => k - 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

pub const CHECKS: [(u8, &str); 15] = [
    (1, "prime-conductor closed forms vs brute force"),
    (2, "Gauss sum modulus and inversion"),
    (3, "imprimitive Gauss sums"),
    (4, "T closed form vs brute force"),
    (5, "squarefree indicator and b-coefficients"),
    (6, "Poisson identity for odd d"),
    (7, "twisted quadratic Gauss sums"),
    (8, "average of phi(N)/N over N != 2 mod 4"),
    (9, "odd squarefree weight mass"),
    (10, "density endpoint limits"),
    (11, "primal vs dual density"),
    (12, "limit_P by two quadrature rules"),
    (13, "P+ convergence to its limit"),
    (14, "T+ convergence to its limit"),
    (15, "empirical M vs dual density"),
];

/// Outcome of a check body: pass flag and a margin description.
type Verdict = (bool, String);

fn within(err: f64, tol: f64) -> Verdict {
    (err <= tol, format!("max |diff| = {err:.3e} (tol {tol:.0e})"))
}

pub fn run_check(id: u8, scale: Scale) -> CheckResult {
    let (_, title) = CHECKS
        .iter()
        .copied()
        .find(|c| c.0 == id)
        .unwrap_or((id, "unknown check"));
    let start = Instant::now();
    let outcome: Result<Verdict> = match id {
        1 => check_prime_closed_forms(),
        2 => check_gauss_inversion(),
        3 => check_imprimitive(),
        4 => check_t_closed(),
        5 => check_squarefree_and_b(),
        6 => check_poisson_identity(),
        7 => check_twisted(),
        8 => check_phi_average(),
        9 => check_weight_mass(),
        10 => check_endpoints(),
        11 => check_primal_dual(),
        12 => check_limit_quadrature(),
        13 => check_p_convergence(scale),
        14 => check_t_convergence(scale),
        15 => check_empirical(scale),
        _ => Ok((false, "no such check".into())),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckResult {
        id,
        title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(scale: Scale) -> Vec<CheckResult> {
    CHECKS.iter().map(|&(id, _)| run_check(id, scale)).collect()
}

fn max_of(it: impl ParallelIterator<Item = Result<f64>>) -> Result<f64> {
    it.try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn check_prime_closed_forms() -> Result<Verdict> {
    let primes: Vec<u64> = PrimeSieve::new(503).primes().collect();
    let err = max_of(primes.par_iter().map(|&n| {
        let g = CharacterGroup::new(n)?;
        let kernel = GaussKernel::new(&g);
        let mut worst = 0.0f64;
        for parity in [Parity::Even, Parity::Odd] {
            let family: Vec<_> = enumerate_family(&g, FamilySelector::primitive(parity))
                .into_iter()
                .map(|chi| {
                    let tau = kernel.gauss_sum(&g, &chi);
                    (chi, tau)
                })
                .collect();
            for &p in primes.iter().take_while(|&&p| p < n) {
                let brute: Complex64 = family
                    .iter()
                    .map(|(chi, tau)| {
                        let t = g.phase(chi, p as i64).expect("p is a unit");
                        kernel.phase(t) / tau
                    })
                    .sum();
                let closed = closed_form_primitive_sum(n, p, parity)?;
                worst = worst.max((brute - closed).norm());
            }
        }
        Ok(worst)
    }))?;
    Ok(within(err, 1e-9))
}

fn check_gauss_inversion() -> Result<Verdict> {
    let err = max_of((3..=500u64).into_par_iter().filter(|n| n % 4 != 2).map(|n| {
        let g = CharacterGroup::new(n)?;
        let kernel = GaussKernel::new(&g);
        let nf = n as f64;
        let mut worst = 0.0f64;
        for chi in g.characters().filter(|c| g.is_primitive(c)) {
            let tau = kernel.gauss_sum(&g, &chi);
            let tau_bar = kernel.gauss_sum(&g, &g.conjugate(&chi));
            let sign = g.parity(&chi) as f64;
            worst = worst
                .max((tau.norm() - nf.sqrt()).abs())
                .max((1.0 / tau - sign / nf * tau_bar).norm());
        }
        Ok(worst)
    }))?;
    Ok(within(err, 1e-9))
}

fn check_imprimitive() -> Result<Verdict> {
    let err = max_of((2..=300u64).into_par_iter().map(|n| {
        let g = CharacterGroup::new(n)?;
        let mut worst = 0.0f64;
        for chi in g.characters().filter(|c| !g.is_primitive(c)) {
            let (g1, chi1) = g.inducing_character(&chi)?;
            let formula = imprimitive_gauss_sum(&g, &chi, &g1, &chi1)?;
            let direct = gauss_sum(&g, &g.conjugate(&chi));
            worst = worst.max((formula - direct).norm());
        }
        Ok(worst)
    }))?;
    Ok(within(err, 1e-9))
}

fn check_t_closed() -> Result<Verdict> {
    let mut rng = StdRng::seed_from_u64(0x6d75_726d);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..10 {
        let x = rng.gen_range(20..=250u64);
        let window = if rng.gen_bool(0.5) {
            WindowSpec::geometric(x, rng.gen_range(1.2..2.0))?
        } else {
            WindowSpec::short(x, rng.gen_range(0.5..0.95))?
        };
        let parity = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let brute = CompositeConductorSum::new(window, parity, ComputeMode::Brute)?;
        let closed = CompositeConductorSum::new(window, parity, ComputeMode::Closed)?;
        for _ in 0..4 {
            let y = rng.gen_range(0.0..5.0);
            worst = worst.max((brute.eval(y)?.t - closed.eval(y)?.t).norm());
            cases += 1;
        }
    }
    let (ok, d) = within(worst, 1e-9);
    Ok((ok, format!("{d} over {cases} random cases")))
}

fn check_squarefree_and_b() -> Result<Verdict> {
    let mut bad = 0usize;
    for d in 1..=10_000i64 {
        let mu = mobius(d)? as i64;
        let mut s = 0i64;
        let mut a = 1i64;
        while a * a <= d {
            if d % (a * a) == 0 {
                s += mobius(a)? as i64;
            }
            a += 1;
        }
        bad += (mu * mu != s) as usize;
    }
    let r = |a, b| Ratio::new(a, b);
    let mut b_ok = b_coefficient(1, Variant::EightD)? == r(1, 1)
        && b_coefficient(2, Variant::EightD)? == r(0, 1)
        && b_coefficient(3, Variant::EightD)? == r(2, 3);
    for k in 0..20 {
        b_ok &= b_coefficient(1 << k, Variant::Dagger)? == r(1, 1);
    }
    Ok((
        bad == 0 && b_ok,
        format!("{bad} mismatches for d <= 10^4, b values {}", if b_ok { "exact" } else { "WRONG" }),
    ))
}

fn check_poisson_identity() -> Result<Verdict> {
    let policy = TruncationPolicy::default();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for w in [WeightFunction::bump(1.0, 2.0)?, WeightFunction::bump(-2.0, -1.0)?] {
        let table = TildeTable::new(&w, &policy)?;
        for p in [3u64, 5, 7, 11, 13] {
            for x in [40u64, 50, 64, 101] {
                for a in 1..=3u64 {
                    let c = soundararajan_identity_with(&table, p, x, a)?;
                    worst = worst.max(c.gap());
                    cases += 1;
                }
            }
        }
    }
    let (ok, d) = within(worst, 1e-8);
    Ok((ok, format!("{d} over {cases} (p, X, A, weight) cases")))
}

fn check_twisted() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for p in PrimeSieve::new(101).primes().filter(|&p| p > 2) {
        let pi = p as i64;
        let eps = kronecker_symbol(-1, pi)? as f64;
        let back = Complex64::new(0.5, 0.5) + eps * Complex64::new(0.5, -0.5);
        for k in -2 * pi..=2 * pi {
            let t = twisted_quadratic_gauss_sum(k, pi)?;
            let want = kronecker_symbol(k, pi)? as f64 * (p as f64).sqrt();
            worst = worst
                .max((t.g - want).norm())
                .max((t.tau - back * t.g).norm());
        }
    }
    Ok(within(worst, 1e-9))
}

fn check_phi_average() -> Result<Verdict> {
    let x = 1_000_000usize;
    let t = MultiplicativeTable::new(x);
    let s: f64 = (1..=x)
        .filter(|n| n % 4 != 2)
        .map(|n| t.phi(n) as f64 / n as f64)
        .sum();
    let err = (s / x as f64 - 5.0 / (PI * PI)).abs();
    Ok(within(err, 0.003))
}

fn check_weight_mass() -> Result<Verdict> {
    let w = WeightFunction::bump(1.0, 2.0)?;
    let integral = trapezoid(|x| w.eval(x), 1.0, 2.0, 1_000_000);
    let s = SquarefreeWeights::new(1_000_000, &w)?;
    let err = (s.mass() / 1e6 - 4.0 / (PI * PI) * integral).abs();
    Ok(within(err, 0.002))
}

fn check_endpoints() -> Result<Verdict> {
    let w = WeightFunction::bump(1.0, 2.0)?;
    let d = AnalyticDensity::new(&w, &TruncationPolicy::default())?.with_caps(1_000, 1_000_000);
    let lim = d.large_y_limit();
    let mut rel = 0.0f64;
    let mut monotone = true;
    let mut smallest = 0.0f64;
    for v in [Variant::EightD, Variant::Dagger] {
        rel = rel.max((d.dual(1e4, v)?.value - lim).abs() / lim.abs());
        let vals = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&y| Ok(d.dual(y, v)?.value.abs()))
            .collect::<Result<Vec<f64>>>()?;
        monotone &= vals[0] > vals[1] && vals[1] > vals[2];
        smallest = smallest.max(vals[2]);
    }
    Ok((
        rel <= 1e-3 && monotone,
        format!(
            "relative gap at y = 1e4: {rel:.3e} (tol 1e-3); |M| decreasing toward 0: {monotone}, |M(1e-6)| = {smallest:.3e}"
        ),
    ))
}

fn check_primal_dual() -> Result<Verdict> {
    let w = WeightFunction::bump(1.0, 2.0)?;
    let d = AnalyticDensity::new(&w, &TruncationPolicy::default())?;
    let dagger = d.clone().with_caps(10_000, d.policy().n_max);
    let ys = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0];
    let mut e8 = 0.0f64;
    let mut ed = 0.0f64;
    for &y in &ys {
        e8 = e8.max((d.primal(y, Variant::EightD)?.value - d.dual(y, Variant::EightD)?.value).abs());
        ed = ed.max(
            (dagger.primal(y, Variant::Dagger)?.value - dagger.dual(y, Variant::Dagger)?.value).abs(),
        );
    }
    Ok((
        e8 <= 1e-5 && ed <= 1e-4,
        format!("eight_d {e8:.3e} (tol 1e-5), dagger {ed:.3e} (tol 1e-4)"),
    ))
}

fn check_limit_quadrature() -> Result<Verdict> {
    let gl = GaussLegendre::g16();
    let mut worst = 0.0f64;
    for k in 0..=100 {
        let y = 0.1 * k as f64;
        let c = gl.composite(|x| (TAU * y / x).cos(), 1.0, 2.0, 200);
        let s = gl.composite(|x| (TAU * y / x).sin(), 1.0, 2.0, 200);
        worst = worst
            .max((limit_p(y, 2.0, Parity::Even).re - c).abs())
            .max((limit_p(y, 2.0, Parity::Odd).im + s).abs());
    }
    Ok(within(worst, 1e-8))
}

fn y_grid() -> impl Iterator<Item = f64> {
    (0..=50).map(|k| 0.1 * k as f64)
}

fn convergence_verdict(lo_k: u32, hi_k: u32, e_lo: f64, e_hi: f64) -> Verdict {
    (
        e_lo <= 0.2 && e_hi < e_lo,
        format!("max gap {e_lo:.4} at X = 2^{lo_k} (tol 0.2), {e_hi:.4} at X = 2^{hi_k}"),
    )
}

fn check_p_convergence(scale: Scale) -> Result<Verdict> {
    let gap = |k: u32| -> Result<f64> {
        let s = PrimeConductorSum::new(
            WindowSpec::geometric(1 << k, 2.0)?,
            Parity::Even,
            ComputeMode::Closed,
        )?;
        let mut worst = 0.0f64;
        for y in y_grid() {
            worst = worst.max((s.eval(y)?.re - limit_p(y, 2.0, Parity::Even).re).abs());
        }
        Ok(worst)
    };
    let (lo, hi) = (scale.log2(10), scale.log2(13));
    Ok(convergence_verdict(lo, hi, gap(lo)?, gap(hi)?))
}

fn check_t_convergence(scale: Scale) -> Result<Verdict> {
    // At y = 0 the family prime is 2, which kills every N ≡ 0 (mod 4): the
    // sum tends to 4/π² instead of 5/π². The limit holds for y > 0 only, so
    // that point is reported but not judged.
    let gaps = |k: u32| -> Result<(f64, f64)> {
        let s = CompositeConductorSum::new(
            WindowSpec::geometric(1 << k, 2.0)?,
            Parity::Even,
            ComputeMode::Closed,
        )?;
        let gap = |y: f64| -> Result<f64> {
            let lim = limit_t(y, LimitWindow::Geometric(2.0), Parity::Even).re;
            Ok((s.eval(y)?.t.re - lim).abs())
        };
        let mut worst = 0.0f64;
        for y in y_grid().skip(1) {
            worst = worst.max(gap(y)?);
        }
        Ok((worst, gap(0.0)?))
    };
    let (lo, hi) = (scale.log2(10), scale.log2(12));
    let ((e_lo, z_lo), (e_hi, z_hi)) = (gaps(lo)?, gaps(hi)?);
    let (ok, detail) = convergence_verdict(lo, hi, e_lo, e_hi);
    Ok((
        ok,
        format!("{detail} over y in (0, 5]; y = 0 gap {z_lo:.4} and {z_hi:.4}"),
    ))
}

fn check_empirical(scale: Scale) -> Result<Verdict> {
    let w = WeightFunction::bump(1.0, 2.0)?;
    let delta = 2.0 / 3.0;
    let d = AnalyticDensity::new(&w, &TruncationPolicy::default())?;
    let (lo, hi) = (scale.log2(16), scale.log2(19));
    let ys = [0.5, 1.0, 1.5];
    let gaps = |k: u32| -> Result<Vec<f64>> {
        let s = SquarefreeWeights::new(1 << k, &w)?;
        ys.iter()
            .map(|&y| Ok((s.murmuration(y, delta, Variant::EightD)? - d.dual(y, Variant::EightD)?.value).abs()))
            .collect()
    };
    let g_lo = gaps(lo)?;
    let g_hi = gaps(hi)?;
    // The residue-table path against per-(p, d) symbol evaluation.
    let fast = SquarefreeWeights::new(1 << lo, &w)?.murmuration(1.0, delta, Variant::EightD)?;
    let naive = empirical_m_naive(1.0, 1 << lo, delta, &w, Variant::EightD)?;
    let oracle_gap = (fast - naive).abs();
    let bounded = g_hi.iter().all(|&g| g <= 0.1);
    let not_growing = g_lo.iter().zip(&g_hi).all(|(a, b)| b <= a);
    let fmt = |v: &[f64]| v.iter().map(|g| format!("{g:.5}")).collect::<Vec<_>>().join(", ");
    Ok((
        bounded && not_growing && oracle_gap <= 1e-9,
        format!(
            "gaps at y = 0.5, 1, 1.5: [{}] at X = 2^{lo}, [{}] at X = 2^{hi} (tol 0.1, non-increasing); naive oracle diff {oracle_gap:.1e}",
            fmt(&g_lo),
            fmt(&g_hi)
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_exact_checks_pass() {
        for id in [5, 7, 12] {
            let r = run_check(id, Scale::Quick);
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn unknown_check_fails() {
        let r = run_check(99, Scale::Quick);
        assert!(!r.passed);
        assert!(r.to_string().starts_with("[FAIL]"));
    }
}
