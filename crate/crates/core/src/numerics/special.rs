//! Standard normal CDF and quantile.

use crate::error::{Error, Result};

use super::rng::RngStream;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Spacing of the `next_unit` grid; the clamp margin for quantile sampling.
const UNIT_ULP: f64 = 1.0 / 9_007_199_254_740_992.0;

// Rational approximation coefficients (P. J. Acklam), relative error ~1.15e-9
// before refinement.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.024_25;

/// Φ(x), via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Φ⁻¹(p) for `0 < p < 1`.
///
/// Rational approximation (central and tail branches) followed by one Halley
/// step against [`normal_cdf`]. The upper half is computed as `-Φ⁻¹(1 - p)`,
/// which is exact in `1 - p` for `p >= 0.5`, so the result is antisymmetric
/// bit for bit there.
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "inverse_normal_cdf requires 0 < p < 1, got {p}"
        )));
    }
    Ok(quantile(p))
}

#[inline]
fn quantile(p: f64) -> f64 {
    if p > 0.5 {
        -lower_quantile(1.0 - p)
    } else {
        lower_quantile(p)
    }
}

/// Quantile for p in (0, 0.5].
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Halley refinement.
    let e = normal_cdf(x) - p;
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// One Gaussian draw by inverse-CDF sampling; consumes exactly one `next_u64`.
pub fn sample_gaussian(rng: &mut RngStream, mean: f64, sd: f64) -> f64 {
    let u = rng.next_unit().clamp(UNIT_ULP, 1.0 - UNIT_ULP);
    if sd == 0.0 {
        return mean;
    }
    mean + sd * quantile(u)
}
