//! Integrals that may span hundreds of orders of magnitude, kept as logs.

/// A real number stored as `sign * exp(log_abs)`, together with a truncation
/// diagnostic.
///
/// `tail_ratio` is the largest integrand value on the outer face of the grid
/// divided by the largest interior value. A value of `+inf` marks a result
/// produced by an analytically divergent step rather than by quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogQuad {
    pub log_abs: f64,
    pub sign: i8,
    pub tail_ratio: f64,
}

/// Default threshold above which a quadrature is reported as suspect.
pub const TAIL_WARN: f64 = 1e-8;

impl LogQuad {
    pub fn positive(log_abs: f64, tail_ratio: f64) -> Self {
        if log_abs == f64::NEG_INFINITY {
            return Self::zero();
        }
        Self {
            log_abs,
            sign: 1,
            tail_ratio: tail_ratio.max(0.0),
        }
    }

    pub fn exact(log_abs: f64) -> Self {
        Self::positive(log_abs, 0.0)
    }

    pub fn zero() -> Self {
        Self {
            log_abs: f64::NEG_INFINITY,
            sign: 0,
            tail_ratio: 0.0,
        }
    }

    /// Value `0` reached because an intermediate integral diverged.
    pub fn divergent_zero() -> Self {
        Self {
            log_abs: f64::NEG_INFINITY,
            sign: 0,
            tail_ratio: f64::INFINITY,
        }
    }

    /// Value `+inf` (a divergent integral).
    pub fn infinite() -> Self {
        Self {
            log_abs: f64::INFINITY,
            sign: 1,
            tail_ratio: f64::INFINITY,
        }
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_abs.exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_infinite(&self) -> bool {
        self.sign != 0 && self.log_abs == f64::INFINITY
    }

    /// True when the value came out of a divergent closed-form step.
    pub fn is_divergent(&self) -> bool {
        self.tail_ratio == f64::INFINITY
    }

    pub fn is_flagged(&self, threshold: f64) -> bool {
        self.tail_ratio > threshold
    }

    /// Product of two positive quantities; tail ratios combine by max.
    pub fn mul(&self, other: &LogQuad) -> LogQuad {
        if self.sign == 0 || other.sign == 0 {
            let mut z = LogQuad::zero();
            z.tail_ratio = self.tail_ratio.max(other.tail_ratio);
            return z;
        }
        LogQuad {
            log_abs: self.log_abs + other.log_abs,
            sign: self.sign * other.sign,
            tail_ratio: self.tail_ratio.max(other.tail_ratio),
        }
    }

    /// `self^e` for a positive quantity.
    pub fn powf(&self, e: f64) -> LogQuad {
        match self.sign {
            0 if e < 0.0 => LogQuad {
                log_abs: f64::INFINITY,
                sign: 1,
                tail_ratio: self.tail_ratio,
            },
            0 => *self,
            _ => {
                let l = e * self.log_abs;
                if l == f64::NEG_INFINITY {
                    LogQuad {
                        tail_ratio: self.tail_ratio,
                        ..LogQuad::zero()
                    }
                } else {
                    LogQuad {
                        log_abs: l,
                        sign: if self.sign < 0 && e.fract() != 0.0 { 0 } else { 1 },
                        tail_ratio: self.tail_ratio,
                    }
                }
            }
        }
    }
}

/// Numerically stable `log(sum(exp(v)))` with a single max shift. Entries
/// equal to `-inf` are skipped; an empty or all-`-inf` input yields `-inf`.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    log_sum_exp_slice(&v)
}

pub fn log_sum_exp_slice(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    let s: f64 = v.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}
