use std::str::FromStr;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Lin,
    Log,
}

/// `lo:hi:n`, an inclusive range of `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n: usize = n.trim().parse().map_err(|e| format!("bad point count {n:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(format!("need finite lo <= hi (got {lo}, {hi})"));
        }
        if n == 0 || (n == 1 && lo != hi) {
            return Err("need n >= 1, and n = 1 only when lo = hi".into());
        }
        Ok(Self { lo, hi, n })
    }
}

impl Range {
    pub fn points(&self, scale: Scale) -> Result<Vec<f64>, String> {
        if self.n == 1 {
            return Ok(vec![self.lo]);
        }
        let last = (self.n - 1) as f64;
        let pts = match scale {
            Scale::Lin => (0..self.n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / last)
                .collect::<Vec<_>>(),
            Scale::Log => {
                if self.lo <= 0.0 {
                    return Err(format!("a log grid needs lo > 0 (got {})", self.lo));
                }
                let r = self.hi / self.lo;
                (0..self.n).map(|i| self.lo * r.powf(i as f64 / last)).collect()
            }
        };
        let mut pts = pts;
        pts[self.n - 1] = self.hi;
        Ok(pts)
    }
}
