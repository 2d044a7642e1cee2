//! Discount and forward-rate curves, with CSV persistence.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::{Error, Real, Result};

/// OIS discount curve `P(0, T)`, log-linear in the discount factor.
///
/// The point `(0, 1)` is implicit. Beyond the last pillar the last log-slope
/// (the last piecewise-constant forward rate) is extended.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscountCurve<T> {
    tenors: Vec<T>,
    log_dfs: Vec<T>,
    dfs: Vec<T>,
}

impl<T: Real> DiscountCurve<T> {
    pub fn new(pillars: &[(T, T)]) -> Result<Self> {
        if pillars.is_empty() {
            return Err(Error::Argument("discount curve needs at least one pillar".into()));
        }
        let mut prev_t = T::zero();
        let mut prev_df = T::one();
        for (i, &(t, df)) in pillars.iter().enumerate() {
            if !t.is_finite() || t <= prev_t {
                return Err(Error::Argument(format!(
                    "pillar {i}: tenor {t} not strictly above the previous tenor {prev_t}"
                )));
            }
            if !(df.is_finite() && df > T::zero()) {
                return Err(Error::Argument(format!(
                    "pillar {i}: discount factor {df} must be positive"
                )));
            }
            if df > prev_df {
                return Err(Error::Argument(format!(
                    "pillar {i}: discount factor {df} exceeds the previous value {prev_df}"
                )));
            }
            prev_t = t;
            prev_df = df;
        }
        Ok(Self {
            tenors: pillars.iter().map(|p| p.0).collect(),
            log_dfs: pillars.iter().map(|p| p.1.ln()).collect(),
            dfs: pillars.iter().map(|p| p.1).collect(),
        })
    }

    /// Curve of a flat continuously-compounded rate, sampled at `tenors`.
    pub fn flat(rate: T, tenors: &[T]) -> Result<Self> {
        let pillars: Vec<_> = tenors.iter().map(|&t| (t, (-rate * t).exp())).collect();
        Self::new(&pillars)
    }

    pub fn pillars(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.tenors.iter().copied().zip(self.dfs.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.tenors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tenors.is_empty()
    }

    pub fn last_tenor(&self) -> T {
        self.tenors[self.tenors.len() - 1]
    }

    /// `ln P(0, t)`; `t <= 0` gives 0.
    pub fn log_discount(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        let i = self.tenors.partition_point(|&x| x < t);
        if i < self.tenors.len() && self.tenors[i] == t {
            return self.log_dfs[i];
        }
        let (t0, l0, t1, l1) = if i == 0 {
            (T::zero(), T::zero(), self.tenors[0], self.log_dfs[0])
        } else if i < self.tenors.len() {
            (self.tenors[i - 1], self.log_dfs[i - 1], self.tenors[i], self.log_dfs[i])
        } else if self.tenors.len() == 1 {
            (T::zero(), T::zero(), self.tenors[0], self.log_dfs[0])
        } else {
            let n = self.tenors.len();
            (self.tenors[n - 2], self.log_dfs[n - 2], self.tenors[n - 1], self.log_dfs[n - 1])
        };
        l0 + (l1 - l0) * (t - t0) / (t1 - t0)
    }

    pub fn discount_factor(&self, t: T) -> T {
        if t <= T::zero() {
            return T::one();
        }
        let i = self.tenors.partition_point(|&x| x < t);
        if i < self.tenors.len() && self.tenors[i] == t {
            return self.dfs[i];
        }
        self.log_discount(t).exp()
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let rows = read_rows(reader, &["tenor_years", "discount_factor"])?;
        let mut pillars = Vec::with_capacity(rows.len());
        let mut prev: Option<(T, T)> = None;
        for (line, v) in rows {
            let (t, df) = (v[0], v[1]);
            if let Some((pt, pdf)) = prev {
                if t <= pt {
                    return Err(Error::Curve {
                        line,
                        reason: format!("tenor {t} not strictly above previous tenor {pt}"),
                    });
                }
                if df > pdf {
                    return Err(Error::Curve {
                        line,
                        reason: format!("discount factor {df} increases from {pdf}"),
                    });
                }
            }
            if t <= T::zero() {
                return Err(Error::Curve { line, reason: format!("tenor {t} must be positive") });
            }
            if df <= T::zero() {
                return Err(Error::Curve {
                    line,
                    reason: format!("discount factor {df} must be positive"),
                });
            }
            if df > T::one() && prev.is_none() {
                return Err(Error::Curve {
                    line,
                    reason: format!("discount factor {df} exceeds P(0,0) = 1"),
                });
            }
            prev = Some((t, df));
            pillars.push((t, df));
        }
        Self::new(&pillars).map_err(|e| Error::Curve { line: 1, reason: e.to_string() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_reader(open(path)?)
    }

    pub fn write_to<W: Write>(&self, writer: W) -> Result<()> {
        let rows = self.pillars().map(|(t, df)| vec![t.to_string(), df.to_string()]);
        write_rows(writer, &["tenor_years", "discount_factor"], rows)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.write_to(create(path)?)
    }
}

/// Forward rates `E^{Q_{j+1}}[f_j(T_j)]` on contiguous accrual periods.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardCurve<T> {
    periods: Vec<(T, T, T)>,
}

/// Pillar dates closer than this are treated as equal.
const DATE_TOL: f64 = 1e-8;

impl<T: Real> ForwardCurve<T> {
    pub fn new(periods: Vec<(T, T, T)>) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::Argument("forward curve needs at least one period".into()));
        }
        for (i, &(s, e, f)) in periods.iter().enumerate() {
            if !(s.is_finite() && e.is_finite() && s >= T::zero() && e > s) {
                return Err(Error::Argument(format!("period {i}: need 0 <= start < end, got ({s}, {e})")));
            }
            if !f.is_finite() {
                return Err(Error::Argument(format!("period {i}: forward rate must be finite")));
            }
            if i > 0 && (s - periods[i - 1].1).abs() > T::lit(DATE_TOL) {
                return Err(Error::Argument(format!(
                    "period {i} starts at {s} but the previous period ends at {}",
                    periods[i - 1].1
                )));
            }
        }
        Ok(Self { periods })
    }

    pub fn periods(&self) -> &[(T, T, T)] {
        &self.periods
    }

    /// Forward rate for the accrual period `(start, end)`.
    pub fn forward(&self, start: T, end: T) -> Result<T> {
        let tol = T::lit(DATE_TOL);
        self.periods
            .iter()
            .find(|(s, e, _)| (*s - start).abs() <= tol && (*e - end).abs() <= tol)
            .map(|p| p.2)
            .ok_or_else(|| Error::Argument(format!("no forward rate for period ({start}, {end})")))
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let rows: Vec<(usize, Vec<T>)> = read_rows(reader, &["start", "end", "forward_rate"])?;
        let mut periods: Vec<(T, T, T)> = Vec::with_capacity(rows.len());
        for (line, v) in rows {
            let (s, e) = (v[0], v[1]);
            if !(e > s && s >= T::zero()) {
                return Err(Error::Curve { line, reason: format!("need 0 <= start < end, got ({s}, {e})") });
            }
            if let Some(&(_, pe, _)) = periods.last() {
                if (s - pe).abs() > T::lit(DATE_TOL) {
                    return Err(Error::Curve {
                        line,
                        reason: format!("period starts at {s} but the previous one ends at {pe}"),
                    });
                }
            }
            periods.push((s, e, v[2]));
        }
        Self::new(periods).map_err(|e| Error::Curve { line: 1, reason: e.to_string() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_reader(open(path)?)
    }

    pub fn write_to<W: Write>(&self, writer: W) -> Result<()> {
        let rows = self
            .periods
            .iter()
            .map(|(s, e, f)| vec![s.to_string(), e.to_string(), f.to_string()]);
        write_rows(writer, &["start", "end", "forward_rate"], rows)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.write_to(create(path)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Discount,
    Forward,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Curve<T> {
    Discount(DiscountCurve<T>),
    Forward(ForwardCurve<T>),
}

pub fn load_curve<T: Real>(path: impl AsRef<Path>, kind: CurveKind) -> Result<Curve<T>> {
    Ok(match kind {
        CurveKind::Discount => Curve::Discount(DiscountCurve::load(path)?),
        CurveKind::Forward => Curve::Forward(ForwardCurve::load(path)?),
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Curve { line, reason: e.to_string() }
}

/// Reads numeric rows, returning `(line number, values)` pairs.
fn read_rows<T: Real, R: Read>(reader: R, header: &[&str]) -> Result<Vec<(usize, Vec<T>)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let found: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::Curve {
            line: 1,
            reason: format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let mut vals = Vec::with_capacity(header.len());
        for (field, name) in rec.iter().zip(header) {
            let v: T = field.parse().map_err(|_| Error::Curve {
                line,
                reason: format!("column `{name}`: cannot parse `{field}` as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Curve { line, reason: format!("column `{name}`: value must be finite") });
            }
            vals.push(v);
        }
        out.push((line, vals));
    }
    if out.is_empty() {
        return Err(Error::Curve { line: 1, reason: "no data rows".into() });
    }
    Ok(out)
}

fn write_rows<W: Write>(
    writer: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Curve { line: 0, reason: e.to_string() };
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Curve { line: 0, reason: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_linear_interpolation() {
        let c = DiscountCurve::new(&[(0.5, 0.999), (1.0, 0.997)]).unwrap();
        assert_eq!(c.discount_factor(0.0), 1.0);
        assert_eq!(c.discount_factor(0.5), 0.999);
        assert_eq!(c.discount_factor(1.0), 0.997);
        let mid = (0.999f64 * 0.997).sqrt();
        assert!((c.discount_factor(0.75) - mid).abs() < 1e-15);
        // Extrapolation continues the last forward rate.
        let f = (0.999f64 / 0.997).ln() / 0.5;
        assert!((c.discount_factor(2.0) - 0.997 * (-f).exp()).abs() < 1e-15);
    }

    #[test]
    fn single_pillar_extrapolates_from_origin() {
        let c = DiscountCurve::new(&[(10.0, 0.8)]).unwrap();
        let r = -0.8f64.ln() / 10.0;
        assert!((c.discount_factor(5.0) - (-r * 5.0).exp()).abs() < 1e-15);
        assert!((c.discount_factor(20.0) - 0.64).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_pillars() {
        assert!(DiscountCurve::new(&[(1.0, 0.99), (0.5, 0.995)]).is_err());
        assert!(DiscountCurve::new(&[(1.0, 0.0)]).is_err());
        assert!(DiscountCurve::new(&[(1.0, 0.99), (2.0, 0.995)]).is_err());
        assert!(DiscountCurve::<f64>::new(&[]).is_err());
    }

    #[test]
    fn csv_errors_name_the_line() {
        let text = "tenor_years,discount_factor\n1.0,0.99\n0.5,0.995\n";
        match DiscountCurve::<f64>::from_reader(text.as_bytes()) {
            Err(Error::Curve { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "tenor_years,discount_factor\n1.0,-0.5\n";
        assert!(DiscountCurve::<f64>::from_reader(text.as_bytes()).is_err());
        let text = "tenor,df\n1.0,0.9\n";
        assert!(DiscountCurve::<f64>::from_reader(text.as_bytes()).is_err());
    }

    #[test]
    fn forward_curve_lookup() {
        let f = ForwardCurve::new(vec![(0.0, 0.5, 0.01), (0.5, 1.0, 0.012)]).unwrap();
        assert_eq!(f.forward(0.5, 1.0).unwrap(), 0.012);
        assert!(f.forward(1.0, 1.5).is_err());
        assert!(ForwardCurve::new(vec![(0.0, 0.5, 0.01), (0.6, 1.0, 0.012)]).is_err());
    }
}
