use crate::{Error, Real, Result};

/// Right-continuous step function of time on `[0, inf)`.
///
/// `values[0]` applies on `[0, breaks[0])`, `values[i]` on
/// `[breaks[i-1], breaks[i])`, and the last value beyond the last break.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseConstant<T> {
    breaks: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> PiecewiseConstant<T> {
    pub fn constant(value: T) -> Self {
        Self {
            breaks: Vec::new(),
            values: vec![value],
        }
    }

    pub fn new(breaks: Vec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::Argument(format!(
                "step function needs {} values for {} breaks, got {}",
                breaks.len() + 1,
                breaks.len(),
                values.len()
            )));
        }
        if breaks.iter().any(|b| !(b.is_finite() && *b > T::zero())) {
            return Err(Error::Argument("step breaks must be finite and positive".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Argument("step breaks must be strictly ascending".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("step values must be finite".into()));
        }
        Ok(Self { breaks, values })
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.breaks.is_empty()
    }

    pub fn value_at(&self, t: T) -> T {
        let idx = self.breaks.partition_point(|b| *b <= t);
        self.values[idx]
    }

    /// `∫_0^t value(s) ds` for `t >= 0`.
    pub fn integral(&self, t: T) -> T {
        let mut total = T::zero();
        let mut start = T::zero();
        for (i, &v) in self.values.iter().enumerate() {
            let end = self.breaks.get(i).copied().unwrap_or_else(T::infinity);
            if t <= start {
                break;
            }
            let stop = if t < end { t } else { end };
            total += v * (stop - start);
            start = end;
        }
        total
    }

    /// `∫_a^b value(s) ds` for `0 <= a <= b`.
    pub fn integral_between(&self, a: T, b: T) -> T {
        self.integral(b) - self.integral(a)
    }

    /// Constant pieces intersected with `[a, b]`, as `(start, end, value)`.
    pub fn segments(&self, a: T, b: T) -> Vec<(T, T, T)> {
        let mut out = Vec::new();
        let mut start = T::zero();
        for (i, &v) in self.values.iter().enumerate() {
            let end = self.breaks.get(i).copied().unwrap_or_else(T::infinity);
            let lo = start.max(a);
            let hi = end.min(b);
            if hi > lo {
                out.push((lo, hi, v));
            }
            start = end;
        }
        out
    }

    pub fn all(&self, pred: impl Fn(T) -> bool) -> bool {
        self.values.iter().all(|v| pred(*v))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_integral() {
        let p = PiecewiseConstant::new(vec![1.0_f64, 3.0], vec![0.01, 0.02, 0.05]).unwrap();
        assert_eq!(p.value_at(0.0), 0.01);
        assert_eq!(p.value_at(1.0), 0.02);
        assert_eq!(p.value_at(10.0), 0.05);
        assert!((p.integral(4.0) - (0.01 + 0.04 + 0.05)).abs() < 1e-15);
        assert!((p.integral_between(0.5, 2.0) - (0.005 + 0.02)).abs() < 1e-15);
        assert_eq!(p.segments(0.5, 2.0), vec![(0.5, 1.0, 0.01), (1.0, 2.0, 0.02)]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(PiecewiseConstant::new(vec![1.0], vec![0.1]).is_err());
        assert!(PiecewiseConstant::new(vec![2.0, 1.0], vec![0.1, 0.2, 0.3]).is_err());
        assert!(PiecewiseConstant::new(vec![0.0], vec![0.1, 0.2]).is_err());
    }
}
