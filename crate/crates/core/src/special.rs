//! Log-gamma, log-factorials and log-scale summation.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)| by the Lanczos approximation (g = 7, nine terms).
///
/// Returns `+inf` at the poles x = 0, -1, -2, ...
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        return (PI / s.abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (i, &p) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += p / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// ln n!, exact up to rounding of the final logarithm for n ≤ 170.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 170 {
        let mut p = 1.0f64;
        for k in 2..=n {
            p *= k as f64;
        }
        p.ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// ln of the rising factorial (a)_n = Γ(a+n)/Γ(a) for a > 0.
pub fn ln_rising(a: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 32 {
        let mut s = 0.0;
        for i in 0..n {
            s += (a + i as f64).ln();
        }
        s
    } else {
        ln_gamma(a + n as f64) - ln_gamma(a)
    }
}

/// Signed rising factorial (a)_n as a plain product; valid for any real a.
pub fn rising(a: f64, n: u64) -> f64 {
    (0..n).fold(1.0, |p, i| p * (a + i as f64))
}

/// ln of the binomial coefficient C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// ln Σ exp(x_i); empty input gives -inf.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        LogSum { max: f64::NEG_INFINITY, scaled: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

impl FromIterator<f64> for LogSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Neumaier-compensated sum of a slice.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Unevaluated sum hi + lo carrying about 106 bits; used where cancellation
/// would otherwise consume the f64 mantissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        fast_two_sum(p, e)
    }

    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        fast_two_sum(s, e + self.lo + other.lo)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn fast_two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    DoubleDouble { hi: s, lo: b - (s - a) }
}

/// |ln a - ln b| scaled to a relative difference of the linear values.
pub fn log_rel_diff(log_a: f64, log_b: f64) -> f64 {
    if log_a == log_b {
        return 0.0;
    }
    (log_a - log_b).exp_m1().abs()
}
