//! Reference values computed without the library: quadrature, series and
//! closed forms written from scratch.
#![allow(dead_code)]

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn gk_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: (f64, f64), tol: f64, floor: f64, depth: u32) -> f64 {
    let (val, err) = whole;
    if err <= tol.max(floor) || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    gk_rec(f, a, m, left, 0.5 * tol, floor, depth - 1) + gk_rec(f, m, b, right, 0.5 * tol, floor, depth - 1)
}

/// Adaptive Gauss–Kronrod (7/15) on a finite interval, absolute tolerance `tol`.
pub fn gauss_kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let f: &dyn Fn(f64) -> f64 = &f;
    let whole = gk15(f, a, b);
    // below this a panel's error estimate is rounding noise
    let floor = 1e-17 * whole.0.abs();
    gk_rec(f, a, b, whole, tol, floor, 30)
}

fn logistic(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Tanh-sinh quadrature on `[a, b]`; tolerates integrable endpoint singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let w = b - a;
    let node = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let (lo, hi) = (logistic(2.0 * u), logistic(-2.0 * u));
        // measure from the nearer endpoint so x − a and b − x stay exact
        let x = if t < 0.0 { a + w * lo } else { b - w * hi };
        let dxdt = w * PI * t.cosh() * lo * hi;
        if dxdt == 0.0 || x <= a || x >= b {
            0.0
        } else {
            f(x) * dxdt
        }
    };
    de_sum(node, 4.0, rel_tol)
}

/// Exp-sinh quadrature on `[a, ∞)`.
pub fn exp_sinh(f: impl Fn(f64) -> f64, a: f64, rel_tol: f64) -> f64 {
    let node = |t: f64| -> f64 {
        let e = (0.5 * PI * t.sinh()).exp();
        let dxdt = 0.5 * PI * t.cosh() * e;
        if !e.is_finite() || dxdt == 0.0 {
            0.0
        } else {
            let v = f(a + e) * dxdt;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        }
    };
    de_sum(node, 4.5, rel_tol)
}

// Trapezoid sums in t with step halving until two levels agree.
fn de_sum(node: impl Fn(f64) -> f64, tmax: f64, rel_tol: f64) -> f64 {
    let mut h = 0.5;
    let n = (tmax / h) as i64;
    let mut sum: f64 = (-n..=n).map(|k| node(k as f64 * h)).sum();
    let mut prev = sum * h;
    for _ in 0..8 {
        h *= 0.5;
        let n = (tmax / h) as i64;
        sum += (-n..=n).filter(|k| k % 2 != 0).map(|k| node(k as f64 * h)).sum::<f64>();
        let cur = sum * h;
        if (cur - prev).abs() <= rel_tol * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `∫_a^∞ f`, with `[a, a + split]` done by Gauss–Kronrod so a peak near `a` is resolved.
pub fn half_line(f: impl Fn(f64) -> f64 + Copy, a: f64, split: f64, rel_tol: f64) -> f64 {
    let tail = exp_sinh(f, a + split, rel_tol);
    let head = if split > 0.0 {
        let rough = gk15(&f, a, a + split).0;
        gauss_kronrod(f, a, a + split, rel_tol * (rough.abs() + tail.abs()).max(1e-300))
    } else {
        0.0
    };
    head + tail
}

/// ln Γ(x), x > 0: upward shift to x ≥ 20, then Stirling's series.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut z = x;
    let mut prod = 1.0;
    while z < 20.0 {
        prod *= z;
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2)
        + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - prod.ln()
}

pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Density of `σ T(ν)`.
pub fn t_pdf(sigma: f64, nu: f64, x: f64) -> f64 {
    let ln_a = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
    let y = x / sigma;
    (ln_a - 0.5 * (nu + 1.0) * (y * y / nu).ln_1p()).exp() / sigma
}

/// `P(σT ≤ x)` by integrating the density from the nearer side.
pub fn t_cdf(sigma: f64, nu: f64, x: f64) -> f64 {
    let half = gauss_kronrod(|u| t_pdf(sigma, nu, u), 0.0, x.abs(), 1e-15);
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// CDF of T(3), which has the elementary form ½ + (1/π)(y/(√3(1+y²/3)) + atan(y/√3)).
pub fn t3_cdf(sigma: f64, x: f64) -> f64 {
    let y = x / sigma;
    let s3 = 3f64.sqrt();
    0.5 + (y / (s3 * (1.0 + y * y / 3.0)) + (y / s3).atan()) / PI
}

/// `E[(σT)^m]` or `E|σT|^m` by quadrature (symmetric density, so even powers only).
pub fn t_abs_moment(sigma: f64, nu: f64, m: f64) -> f64 {
    2.0 * half_line(|x| x.powf(m) * t_pdf(sigma, nu, x), 0.0, sigma, 1e-13)
}

/// `K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt`.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    ln_bessel_k(nu, x).exp()
}

/// `ln K_ν(x)` from the same integral, scaled by its peak.
pub fn ln_bessel_k(nu: f64, x: f64) -> f64 {
    let ln_f = |t: f64| -x * t.cosh() + (nu * t).cosh().ln();
    let peak = if nu > x { (nu / x).asinh() } else { 0.0 };
    let ln_peak = ln_f(peak);
    let mut tmax = peak + 1.0;
    while ln_f(tmax) > ln_peak - 60.0 {
        tmax += 0.5;
    }
    let scale = ln_peak;
    let v = gauss_kronrod(|t| (ln_f(t) - scale).exp(), 0.0, tmax, 1e-16);
    v.ln() + scale
}

/// `₂F₁(a,b;c;z)` from Euler's integral; needs `c > b > 0`, `z < 1`.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let v = tanh_sinh(
        |t| t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a),
        0.0,
        1.0,
        1e-14,
    );
    v / beta(b, c - b)
}

/// Plain power series of `₂F₁`, for `|z| ≤ 0.5`.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..10_000 {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `I_x(a,b)` by quadrature of the beta density.
pub fn inc_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let f = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
    tanh_sinh(f, 0.0, x, 1e-14) / beta(a, b)
}

/// `E|σ₁T₁ + c| = |c| + 2∫₀^∞ u f₁(u + |c|) du`.
pub fn abs_shifted(s1: f64, n1: f64, c: f64) -> f64 {
    let c = c.abs();
    c + 2.0 * half_line(|u| u * t_pdf(s1, n1, u + c), 0.0, s1, 1e-13)
}

/// `E|σ₁T₁ + σ₂T₂|` by nested quadrature over both densities.
pub fn abs_moment_2d(s1: f64, n1: f64, s2: f64, n2: f64) -> f64 {
    2.0 * half_line(|t| t_pdf(s2, n2, t) * abs_shifted(s1, n1, t), 0.0, s2, 1e-11)
}

/// `E[(σ₁T₁ + σ₂T₂)^4]` by nested quadrature.
pub fn fourth_moment_2d(s1: f64, n1: f64, s2: f64, n2: f64) -> f64 {
    let inner = |c: f64| half_line(|x| ((x + c).powi(4) + (c - x).powi(4)) * t_pdf(s1, n1, x), 0.0, s1, 1e-12);
    2.0 * half_line(|t| t_pdf(s2, n2, t) * inner(t), 0.0, s2, 1e-11)
}

/// `∫ cos(rx) f_{σT}(x) dx`, summed over half periods with repeated averaging of the partial sums.
pub fn t_cf_oscillatory(sigma: f64, nu: f64, r: f64) -> f64 {
    let r = r.abs();
    if r == 0.0 {
        return 1.0;
    }
    let step = PI / r;
    let mut partial = Vec::new();
    let mut s = 0.0;
    for k in 0..400 {
        let (a, b) = (k as f64 * step, (k + 1) as f64 * step);
        s += gauss_kronrod(|x| (r * x).cos() * t_pdf(sigma, nu, x), a, b, 1e-17);
        partial.push(s);
    }
    let mut tail: Vec<f64> = partial[partial.len() - 40..].to_vec();
    while tail.len() > 1 {
        tail = tail.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    2.0 * tail[0]
}

/// `P(σ₁T₁ + σ₂T₂ ≤ z)` for `ν₁ = ν₂ = 3` from the elementary T(3) CDF.
pub fn t3_pair_cdf(s1: f64, s2: f64, z: f64) -> f64 {
    let g = |t: f64| t_pdf(s2, 3.0, t) * (t3_cdf(s1, z - t) + t3_cdf(s1, z + t));
    half_line(g, 0.0, s2.max(z.abs()), 1e-12)
}

/// Least-squares slope of `y` on `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}
