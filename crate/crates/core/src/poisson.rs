//! Poisson variates: inversion for small means, Hörmann's PTRS transformed
//! rejection for large ones.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

const INVERSION_LIMIT: f64 = 30.0;

/// Draws from `Po(lambda)`. `lambda` must be finite and non-negative.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    debug_assert!(lambda.is_finite() && lambda >= 0.0);
    if lambda <= 0.0 {
        0
    } else if lambda < INVERSION_LIMIT {
        inversion(rng, lambda)
    } else {
        ptrs(rng, lambda)
    }
}

fn inversion<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    while u > cdf {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
        // Rounding can leave cdf a hair below 1.
        if pmf < f64::MIN_POSITIVE && k as f64 > lambda {
            break;
        }
    }
    k
}

fn ptrs<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= -lambda + k * loglam - ln_gamma(k + 1.0)
        {
            return k as u64;
        }
    }
}
