//! Univariate and bivariate standard normal distribution functions.
#![allow(clippy::excessive_precision)]

use crate::{Error, Real, Result};

/// Standard normal density.
pub fn norm_pdf<T: Real>(x: T) -> T {
    (-(x * x) * T::lit(0.5)).exp() / T::lit(2.5066282746310002)
}

/// Standard normal cumulative distribution.
///
/// Hart's double-precision rational approximation (algorithm 5666 as
/// popularised by West); absolute error below 2e-16 in `f64`.
pub fn norm_cdf<T: Real>(x: T) -> T {
    let z = x.abs();
    let tail = if z > T::lit(37.0) {
        T::zero()
    } else {
        let e = (-(z * z) * T::lit(0.5)).exp();
        if z < T::lit(7.07106781186547) {
            let mut num = T::lit(3.52624965998911e-02) * z + T::lit(0.700383064443688);
            for c in [
                6.37396220353165,
                33.912866078383,
                112.079291497871,
                221.213596169931,
                220.206867912376,
            ] {
                num = num * z + T::lit(c);
            }
            let mut den = T::lit(8.83883476483184e-02) * z + T::lit(1.75566716318264);
            for c in [
                16.064177579207,
                86.7807322029461,
                296.564248779674,
                637.333633378831,
                793.826512519948,
                440.413735824752,
            ] {
                den = den * z + T::lit(c);
            }
            e * num / den
        } else {
            let mut b = z + T::lit(0.65);
            for c in [4.0, 3.0, 2.0, 1.0] {
                b = z + T::lit(c) / b;
            }
            e / b / T::lit(2.5066282746310002)
        }
    };
    if x > T::zero() {
        T::one() - tail
    } else {
        tail
    }
}

/// `P(X <= x, Y <= y)` for standard normals with correlation `rho`.
///
/// Errors when `|rho| > 1`. Infinite limits are accepted.
pub fn bivariate_normal_cdf<T: Real>(x: T, y: T, rho: T) -> Result<T> {
    if rho.is_nan() || rho.abs() > T::one() {
        return Err(Error::Argument(format!(
            "correlation {} outside [-1, 1]",
            rho.as_f64()
        )));
    }
    Ok(phi2(x, y, rho))
}

/// Unchecked bivariate normal CDF; `rho` must lie in `[-1, 1]`.
pub(crate) fn phi2<T: Real>(x: T, y: T, rho: T) -> T {
    upper_orthant(-x, -y, rho)
}

// Gauss-Legendre half-rules (weight, abscissa) for n = 6, 12, 20.
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705, 0.9324695142031522),
    (0.3607615730481384, 0.6612093864662647),
    (0.4679139345726904, 0.2386191860831970),
];
const GL12: [(f64, f64); 6] = [
    (0.04717533638651177, 0.9815606342467191),
    (0.1069393259953183, 0.9041172563704750),
    (0.1600783285433464, 0.7699026741943050),
    (0.2031674267230659, 0.5873179542866171),
    (0.2334925365383547, 0.3678314989981802),
    (0.2491470458134029, 0.1252334085114692),
];
const GL20: [(f64, f64); 10] = [
    (0.01761400713915212, 0.9931285991850949),
    (0.04060142980038694, 0.9639719272779138),
    (0.06267204833410906, 0.9122344282513259),
    (0.08327674157670475, 0.8391169718222188),
    (0.1019301198172404, 0.7463319064601508),
    (0.1181945319615184, 0.6360536807265150),
    (0.1316886384491766, 0.5108670019508271),
    (0.1420961093183821, 0.3737060887154196),
    (0.1491729864726037, 0.2277858511416451),
    (0.1527533871307259, 0.07652652113349733),
];

/// `P(X > h, Y > k)` by Genz's reduction of the Drezner-Wesolowsky
/// correlation integral to Gauss-Legendre quadrature.
fn upper_orthant<T: Real>(h: T, k: T, r: T) -> T {
    let inf = T::infinity();
    if h == inf || k == inf {
        return T::zero();
    }
    if h == -inf {
        return if k == -inf { T::one() } else { norm_cdf(-k) };
    }
    if k == -inf {
        return norm_cdf(-h);
    }
    if r == T::zero() {
        return norm_cdf(-h) * norm_cdf(-k);
    }

    let two_pi = T::TAU();
    let rule: &[(f64, f64)] = if r.abs() < T::lit(0.3) {
        &GL6
    } else if r.abs() < T::lit(0.75) {
        &GL12
    } else {
        &GL20
    };
    // Nodes at 1 - x and 1 + x of the half rule.
    let nodes = || {
        rule.iter().flat_map(|&(w, x)| {
            [
                (T::lit(w), T::one() - T::lit(x)),
                (T::lit(w), T::one() + T::lit(x)),
            ]
        })
    };

    let mut k = k;
    let mut hk = h * k;
    let half = T::lit(0.5);

    if r.abs() < T::lit(0.925) {
        let hs = (h * h + k * k) * half;
        let asr = r.asin() * half;
        let mut sum = T::zero();
        for (w, x) in nodes() {
            let sn = (asr * x).sin();
            sum += w * ((sn * hk - hs) / (T::one() - sn * sn)).exp();
        }
        let v = sum * asr / two_pi + norm_cdf(-h) * norm_cdf(-k);
        return v.max(T::zero()).min(T::one());
    }

    if r < T::zero() {
        k = -k;
        hk = -hk;
    }
    let mut bvn = T::zero();
    if r.abs() < T::one() {
        let a2 = (T::one() - r) * (T::one() + r);
        let mut a = a2.sqrt();
        let b2 = (h - k) * (h - k);
        let asr = -(b2 / a2 + hk) * half;
        let c = (T::lit(4.0) - hk) / T::lit(8.0);
        let d = (T::lit(12.0) - hk) / T::lit(80.0);
        if asr > T::lit(-100.0) {
            bvn = a
                * asr.exp()
                * (T::one() - c * (b2 - a2) * (T::one() - d * b2) / T::lit(3.0)
                    + c * d * a2 * a2);
        }
        if hk > T::lit(-100.0) {
            let b = b2.sqrt();
            let sp = two_pi.sqrt() * norm_cdf(-b / a);
            bvn -= (-hk * half).exp()
                * sp
                * b
                * (T::one() - c * b2 * (T::one() - d * b2) / T::lit(3.0));
        }
        a *= half;
        let mut sum = T::zero();
        for (w, x) in nodes() {
            let xs = (a * x) * (a * x);
            let asr = -(b2 / xs + hk) * half;
            if asr > T::lit(-100.0) {
                let sp = T::one() + c * xs * (T::one() + T::lit(5.0) * d * xs);
                let rs = (T::one() - xs).sqrt();
                let ep = (-(hk * half) * xs / ((T::one() + rs) * (T::one() + rs))).exp() / rs;
                sum += w * asr.exp() * (sp - ep);
            }
        }
        bvn = (a * sum - bvn) / two_pi;
    }
    let v = if r > T::zero() {
        bvn + norm_cdf(-h.max(k))
    } else if h >= k {
        -bvn
    } else {
        let l = if h < T::zero() {
            norm_cdf(k) - norm_cdf(h)
        } else {
            norm_cdf(-h) - norm_cdf(-k)
        };
        l - bvn
    };
    v.max(T::zero()).min(T::one())
}
