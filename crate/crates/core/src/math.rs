//! Small numeric helpers shared by the ensemble and statistics code.

use std::sync::OnceLock;

const LN_FACT_TABLE: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        t.push(0.0);
        let mut acc = 0.0f64;
        for i in 1..LN_FACT_TABLE {
            acc += (i as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// ln(n!). Exact summation below 4096, Stirling series above.
pub fn ln_factorial(n: usize) -> f64 {
    if n < LN_FACT_TABLE {
        return ln_fact_table()[n];
    }
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x * x)
}

pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Binomial coefficient as f64 (exact for results below 2^53).
pub fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Binomial(trials, prob) mass at `hits`, evaluated in log space.
pub fn binomial_pmf(trials: usize, prob: f64, hits: usize) -> f64 {
    if hits > trials {
        return 0.0;
    }
    if prob <= 0.0 {
        return if hits == 0 { 1.0 } else { 0.0 };
    }
    if prob >= 1.0 {
        return if hits == trials { 1.0 } else { 0.0 };
    }
    let lp = ln_choose(trials, hits)
        + hits as f64 * prob.ln()
        + (trials - hits) as f64 * (-prob).ln_1p();
    lp.exp()
}

/// Full Binomial(trials, prob) pmf over 0..=trials.
pub fn binomial_law(trials: usize, prob: f64) -> Vec<f64> {
    (0..=trials).map(|h| binomial_pmf(trials, prob, h)).collect()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Discrete convolution of two mass functions, compensated per output cell.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    (0..len)
        .map(|out| {
            let lo = out.saturating_sub(b.len() - 1);
            let hi = out.min(a.len() - 1);
            (lo..=hi)
                .map(|i| a[i] * b[out - i])
                .collect::<CompensatedSum>()
                .value()
        })
        .collect()
}
