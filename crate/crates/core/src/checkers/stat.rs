//! Goodness-of-fit machinery: chi-square with small-bin pooling, the exact
//! binomial test for two-outcome checks, and the special functions backing
//! their p-values.

use alloc::string::String;
use alloc::vec::Vec;

/// ln Gamma(x) for x > 0 (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, c) in COEF.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (x + 0.5) * libm::log(t) - t + libm::log(acc)
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // Series representation.
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..500 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if libm::fabs(del) < libm::fabs(sum) * 1e-15 {
                break;
            }
        }
        sum * libm::exp(-x + a * libm::log(x) - ln_gamma(a))
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

// Continued fraction (Lentz) for Q(a, x), valid for x >= a + 1.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < tiny {
            d = tiny;
        }
        c = b + an / c;
        if libm::fabs(c) < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < 1e-15 {
            break;
        }
    }
    libm::exp(-x + a * libm::log(x) - ln_gamma(a)) * h
}

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom: P(X >= x).
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(df / 2.0, x / 2.0)
}

/// Chi-square goodness-of-fit against expected probabilities, pooling bins
/// whose expected count falls below 5. Returns (statistic, df, p_value); a
/// zero-df comparison yields p = 1.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> (f64, usize, f64) {
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new(); // (observed, expected count)
    let mut pool = (0.0f64, 0.0f64);
    for (&o, &p) in observed.iter().zip(expected) {
        let e = n * p;
        if e < 5.0 {
            pool.0 += o as f64;
            pool.1 += e;
        } else {
            bins.push((o as f64, e));
        }
    }
    if pool.1 > 0.0 || pool.0 > 0.0 {
        bins.push(pool);
    }
    let mut stat = 0.0;
    for &(o, e) in &bins {
        if e > 0.0 {
            stat += (o - e) * (o - e) / e;
        } else if o > 0.0 {
            stat = f64::INFINITY;
        }
    }
    let df = bins.len().saturating_sub(1);
    let p = if df == 0 {
        1.0
    } else if stat.is_infinite() {
        0.0
    } else {
        chi_square_sf(stat, df as f64)
    };
    (stat, df, p)
}

/// Two-sided exact binomial test of `k` successes in `n` trials against
/// success probability `p`: sums the probabilities of all outcomes no more
/// likely than the observed one.
pub fn exact_binomial_p(k: u64, n: u64, p: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_pmf = |j: u64| -> f64 {
        let n_f = n as f64;
        let j_f = j as f64;
        ln_gamma(n_f + 1.0) - ln_gamma(j_f + 1.0) - ln_gamma(n_f - j_f + 1.0)
            + j_f * libm::log(p)
            + (n_f - j_f) * libm::log(1.0 - p)
    };
    let threshold = ln_pmf(k) + 1e-9;
    let mut total = 0.0;
    for j in 0..=n {
        let lp = ln_pmf(j);
        if lp <= threshold {
            total += libm::exp(lp);
        }
    }
    total.min(1.0)
}

/// Two-sample chi-square comparing two outcome-count tables of equal
/// length. Pools bins whose combined count is below 10. Returns
/// (statistic, df, p_value).
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> (f64, usize, f64) {
    debug_assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return (0.0, 0, 1.0);
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        if x + y < 10 {
            pool.0 += x as f64;
            pool.1 += y as f64;
        } else {
            bins.push((x as f64, y as f64));
        }
    }
    if pool.0 + pool.1 > 0.0 {
        bins.push(pool);
    }
    let (na, nb) = (na as f64, nb as f64);
    let mut stat = 0.0;
    for &(x, y) in &bins {
        let p_hat = (x + y) / (na + nb);
        let (ea, eb) = (na * p_hat, nb * p_hat);
        if ea > 0.0 {
            stat += (x - ea) * (x - ea) / ea;
        }
        if eb > 0.0 {
            stat += (y - eb) * (y - eb) / eb;
        }
    }
    let df = bins.len().saturating_sub(1);
    let p = if df == 0 {
        1.0
    } else {
        chi_square_sf(stat, df as f64)
    };
    (stat, df, p)
}

/// Minimal JSON string escaping for report records.
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                out.push_str(&alloc::format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-12);
        assert!((ln_gamma(5.0) - libm::log(24.0)).abs() < 1e-12);
        // ln Gamma(0.5) = ln sqrt(pi)
        assert!((ln_gamma(0.5) - 0.5 * libm::log(core::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn chi_square_sf_known_values() {
        // Cross-checked against an independent implementation:
        // P(chi2_3 >= 2.417910447761194) = 0.4903093069653883.
        let p = chi_square_sf(2.417_910_447_761_194, 3.0);
        assert!((p - 0.490_309_306_965_388_3).abs() < 1e-12, "{p}");
        // P(chi2_1 >= 1) = erfc(1/sqrt(2)) = 0.31731050786291415.
        let p = chi_square_sf(1.0, 1.0);
        assert!((p - 0.317_310_507_862_914_15).abs() < 1e-12, "{p}");
        assert!((chi_square_sf(0.0, 4.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_pq_complement() {
        for &(a, x) in &[(0.5, 0.3), (2.0, 1.0), (3.5, 7.0), (10.0, 3.0)] {
            let s = gamma_p(a, x) + gamma_q(a, x);
            assert!((s - 1.0).abs() < 1e-12, "a={a} x={x}: {s}");
        }
    }

    #[test]
    fn gof_detects_bias() {
        // Clearly uniform data passes.
        let (_, _, p) = chi_square_gof(&[250, 248, 252, 250], &[0.25; 4]);
        assert!(p > 0.5, "{p}");
        // Heavily skewed data fails.
        let (_, _, p) = chi_square_gof(&[500, 100, 200, 200], &[0.25; 4]);
        assert!(p < 1e-6, "{p}");
    }

    #[test]
    fn gof_pools_small_bins() {
        // Expected counts of the last two bins are < 5, so they pool; the
        // statistic stays finite and sane.
        let obs = [96, 98, 3, 3];
        let exp = [0.48, 0.48, 0.02, 0.02];
        let (stat, df, p) = chi_square_gof(&obs, &exp);
        assert_eq!(df, 2);
        assert!(stat.is_finite());
        assert!(p > 0.1);
    }

    #[test]
    fn exact_binomial_behaviour() {
        // Dead-centre observation is unsurprising.
        assert!(exact_binomial_p(50, 100, 0.5) > 0.9);
        // Extreme observation is essentially impossible.
        assert!(exact_binomial_p(100, 100, 0.5) < 1e-20);
        // Symmetric distribution gives a symmetric test.
        let lo = exact_binomial_p(40, 100, 0.5);
        let hi = exact_binomial_p(60, 100, 0.5);
        assert!((lo - hi).abs() < 1e-9);
    }

    #[test]
    fn two_sample_agreement_and_difference() {
        let (_, _, p) = two_sample_chi_square(&[500, 500], &[510, 490]);
        assert!(p > 0.1);
        let (_, _, p) = two_sample_chi_square(&[900, 100], &[500, 500]);
        assert!(p < 1e-10);
    }

    #[test]
    fn json_escape_specials() {
        assert_eq!(json_escape("a\"b\\c\nd"), "a\\\"b\\\\c\\nd");
    }
}
