//! Real scalar coefficient functions of one real parameter.
//!
//! Every family carries an exact derivative and an exact antiderivative, so
//! quantities such as the phase rate in the solvability condition never go
//! through numerical differentiation.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples used when a family has no closed-form minimum.
const MIN_SEARCH_SAMPLES: usize = 4096;

/// Piecewise-linear interpolant over a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    t: Vec<f64>,
    v: Vec<f64>,
}

impl Table {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidCoefficient {
            name: "table".into(),
            reason: reason.into(),
        };
        if t.len() != v.len() {
            return Err(invalid("grid and value arrays differ in length"));
        }
        if t.len() < 2 {
            return Err(invalid("a table needs at least two samples"));
        }
        if t.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(invalid("non-finite sample"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid must be strictly increasing"));
        }
        Ok(Self { t, v })
    }

    pub fn grid(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    fn domain(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    /// Index `i` of the segment `[t_i, t_{i+1}]` holding `x` (right-continuous,
    /// the last knot belongs to the last segment).
    fn segment(&self, x: f64) -> usize {
        let n = self.t.len();
        match self.t.partition_point(|&ti| ti <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    fn slope(&self, i: usize) -> f64 {
        (self.v[i + 1] - self.v[i]) / (self.t[i + 1] - self.t[i])
    }

    fn value(&self, x: f64) -> f64 {
        let i = self.segment(x);
        self.v[i] + self.slope(i) * (x - self.t[i])
    }

    /// Cumulative trapezoid areas from the first knot, exact for the interpolant.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = Vec::with_capacity(self.t.len());
        acc.push(0.0);
        for i in 0..self.t.len() - 1 {
            let area = 0.5 * (self.v[i] + self.v[i + 1]) * (self.t[i + 1] - self.t[i]);
            acc.push(acc[i] + area);
        }
        acc
    }

    fn area_from_start(&self, cumulative: &[f64], x: f64) -> f64 {
        let i = self.segment(x);
        let dx = x - self.t[i];
        cumulative[i] + self.v[i] * dx + 0.5 * self.slope(i) * dx * dx
    }
}

/// Antiderivative of a [`Table`], anchored so that it equals `offset` at the
/// origin of the parameter axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TableIntegral {
    table: Table,
    offset: f64,
    cumulative: Vec<f64>,
    origin_area: f64,
}

impl TableIntegral {
    fn new(table: Table, offset: f64) -> Result<Self> {
        let (lo, hi) = table.domain();
        if !(lo..=hi).contains(&0.0) {
            return Err(Error::InvalidCoefficient {
                name: "table".into(),
                reason: format!("cannot anchor an antiderivative at 0 outside [{lo}, {hi}]"),
            });
        }
        let cumulative = table.cumulative();
        let origin_area = table.area_from_start(&cumulative, 0.0);
        Ok(Self {
            table,
            offset,
            cumulative,
            origin_area,
        })
    }

    fn value(&self, x: f64) -> f64 {
        self.offset + self.table.area_from_start(&self.cumulative, x) - self.origin_area
    }
}

/// A real coefficient such as Ω(t), |ω(t)| or φ_ω(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoefficient", into = "RawCoefficient")]
pub enum CoefficientFn {
    Constant(f64),
    /// `offset + amplitude * sin(freq * t + phase)`.
    Sinusoid {
        offset: f64,
        amplitude: f64,
        freq: f64,
        phase: f64,
    },
    /// Coefficients in ascending powers of t.
    Polynomial(Vec<f64>),
    Table(Table),
    TableIntegral(TableIntegral),
    Sum(Vec<CoefficientFn>),
}

impl CoefficientFn {
    pub fn constant(c: f64) -> Self {
        CoefficientFn::Constant(c)
    }

    pub fn sinusoid(offset: f64, amplitude: f64, freq: f64, phase: f64) -> Self {
        CoefficientFn::Sinusoid {
            offset,
            amplitude,
            freq,
            phase,
        }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        CoefficientFn::Polynomial(coeffs)
    }

    pub fn table(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Table::new(t, v).map(CoefficientFn::Table)
    }

    pub fn sum(terms: Vec<CoefficientFn>) -> Self {
        CoefficientFn::Sum(terms)
    }

    /// Interval on which the function may be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            CoefficientFn::Table(tab) => tab.domain(),
            CoefficientFn::TableIntegral(ti) => ti.table.domain(),
            CoefficientFn::Sum(terms) => {
                terms
                    .iter()
                    .fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), f| {
                        let (a, b) = f.domain();
                        (lo.max(a), hi.min(b))
                    })
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if t.is_nan() || t < lo || t > hi {
            return Err(Error::Domain {
                name: "coefficient".into(),
                t,
                lo,
                hi,
            });
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.value_unchecked(t))
    }

    /// Exact first derivative.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.derivative_unchecked(t))
    }

    fn value_unchecked(&self, t: f64) -> f64 {
        match self {
            CoefficientFn::Constant(c) => *c,
            CoefficientFn::Sinusoid {
                offset,
                amplitude,
                freq,
                phase,
            } => offset + amplitude * (freq * t + phase).sin(),
            CoefficientFn::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci),
            CoefficientFn::Table(tab) => tab.value(t),
            CoefficientFn::TableIntegral(ti) => ti.value(t),
            CoefficientFn::Sum(terms) => terms.iter().map(|f| f.value_unchecked(t)).sum(),
        }
    }

    fn derivative_unchecked(&self, t: f64) -> f64 {
        match self {
            CoefficientFn::Constant(_) => 0.0,
            CoefficientFn::Sinusoid {
                amplitude,
                freq,
                phase,
                ..
            } => amplitude * freq * (freq * t + phase).cos(),
            CoefficientFn::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * t + k as f64 * ck),
            CoefficientFn::Table(tab) => tab.slope(tab.segment(t)),
            CoefficientFn::TableIntegral(ti) => ti.table.value(t),
            CoefficientFn::Sum(terms) => terms.iter().map(|f| f.derivative_unchecked(t)).sum(),
        }
    }

    /// The function `t ↦ ∫₀ᵗ f(τ) dτ`, in closed form.
    pub fn integral_from_zero(&self) -> Result<CoefficientFn> {
        Ok(match self {
            CoefficientFn::Constant(c) => CoefficientFn::Polynomial(vec![0.0, *c]),
            CoefficientFn::Sinusoid {
                offset,
                amplitude,
                freq,
                phase,
            } => {
                if *freq == 0.0 {
                    CoefficientFn::Polynomial(vec![0.0, offset + amplitude * phase.sin()])
                } else {
                    let k = amplitude / freq;
                    // -k cos(wt + p) = k sin(wt + p - pi/2)
                    CoefficientFn::Sum(vec![
                        CoefficientFn::Polynomial(vec![k * phase.cos(), *offset]),
                        CoefficientFn::sinusoid(0.0, k, *freq, phase - FRAC_PI_2),
                    ])
                }
            }
            CoefficientFn::Polynomial(c) => {
                let mut out = Vec::with_capacity(c.len() + 1);
                out.push(0.0);
                out.extend(c.iter().enumerate().map(|(k, ck)| ck / (k + 1) as f64));
                CoefficientFn::Polynomial(out)
            }
            CoefficientFn::Table(tab) => {
                CoefficientFn::TableIntegral(TableIntegral::new(tab.clone(), 0.0)?)
            }
            CoefficientFn::TableIntegral(_) => {
                return Err(Error::InvalidCoefficient {
                    name: "table_integral".into(),
                    reason: "second antiderivatives of tables are not supported".into(),
                })
            }
            CoefficientFn::Sum(terms) => CoefficientFn::Sum(
                terms
                    .iter()
                    .map(CoefficientFn::integral_from_zero)
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// `k · f`.
    pub fn scaled(&self, k: f64) -> CoefficientFn {
        match self {
            CoefficientFn::Constant(c) => CoefficientFn::Constant(k * c),
            CoefficientFn::Sinusoid {
                offset,
                amplitude,
                freq,
                phase,
            } => CoefficientFn::sinusoid(k * offset, k * amplitude, *freq, *phase),
            CoefficientFn::Polynomial(c) => {
                CoefficientFn::Polynomial(c.iter().map(|x| k * x).collect())
            }
            CoefficientFn::Table(tab) => CoefficientFn::Table(Table {
                t: tab.t.clone(),
                v: tab.v.iter().map(|x| k * x).collect(),
            }),
            CoefficientFn::TableIntegral(ti) => CoefficientFn::TableIntegral(TableIntegral {
                table: Table {
                    t: ti.table.t.clone(),
                    v: ti.table.v.iter().map(|x| k * x).collect(),
                },
                offset: k * ti.offset,
                cumulative: ti.cumulative.iter().map(|x| k * x).collect(),
                origin_area: k * ti.origin_area,
            }),
            CoefficientFn::Sum(terms) => {
                CoefficientFn::Sum(terms.iter().map(|f| f.scaled(k)).collect())
            }
        }
    }

    /// True when the function does not vary with its argument.
    pub fn is_constant(&self) -> bool {
        match self {
            CoefficientFn::Constant(_) => true,
            CoefficientFn::Sinusoid {
                amplitude, freq, ..
            } => *amplitude == 0.0 || *freq == 0.0,
            CoefficientFn::Polynomial(c) => c.iter().skip(1).all(|&x| x == 0.0),
            CoefficientFn::Table(tab) => tab.v.windows(2).all(|w| w[0] == w[1]),
            CoefficientFn::TableIntegral(ti) => ti.table.v.iter().all(|&x| x == 0.0),
            CoefficientFn::Sum(terms) => terms.iter().all(CoefficientFn::is_constant),
        }
    }

    /// The value of a constant function, `None` otherwise.
    pub fn constant_value(&self) -> Option<f64> {
        if !self.is_constant() {
            return None;
        }
        let (lo, hi) = self.domain();
        let at = 0.0f64.clamp(lo, hi);
        Some(self.value_unchecked(at))
    }

    /// Minimum over `[lo, hi]` (exact for constants, sinusoids and tables,
    /// dense sampling otherwise).
    pub fn min_on(&self, lo: f64, hi: f64) -> Result<f64> {
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        let mut candidates = vec![lo, hi];
        match self {
            CoefficientFn::Constant(c) => return Ok(*c),
            CoefficientFn::Sinusoid { freq, phase, .. } if *freq != 0.0 => {
                // extrema where freq * t + phase = pi/2 + k pi
                let period = std::f64::consts::PI / freq.abs();
                let first = ((FRAC_PI_2 - phase) / freq).rem_euclid(period);
                let mut t = lo + (first - lo).rem_euclid(period);
                while t <= hi {
                    candidates.push(t);
                    t += period;
                }
            }
            CoefficientFn::Table(tab) => {
                candidates.extend(tab.t.iter().copied().filter(|t| (lo..=hi).contains(t)));
            }
            _ => {
                let n = MIN_SEARCH_SAMPLES;
                candidates.extend((0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64));
            }
        }
        Ok(candidates
            .into_iter()
            .map(|t| self.value_unchecked(t))
            .fold(f64::INFINITY, f64::min))
    }

    /// Rejects functions that become negative on `[lo, hi]`.
    pub fn ensure_nonnegative(&self, lo: f64, hi: f64) -> Result<()> {
        let m = self.min_on(lo, hi)?;
        if m < 0.0 {
            return Err(Error::InvalidCoefficient {
                name: "coefficient".into(),
                reason: format!("must be non-negative on [{lo}, {hi}], minimum is {m}"),
            });
        }
        Ok(())
    }
}

impl From<f64> for CoefficientFn {
    fn from(c: f64) -> Self {
        CoefficientFn::Constant(c)
    }
}

/// Wire form: `{family, params}` for analytic families, `{family: "table", t, v}`
/// for tables and `{family: "sum", terms}` for sums.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficient {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<CoefficientFn>>,
}

impl TryFrom<RawCoefficient> for CoefficientFn {
    type Error = String;

    fn try_from(raw: RawCoefficient) -> std::result::Result<Self, String> {
        let params = |n: Option<usize>| -> std::result::Result<Vec<f64>, String> {
            let p = raw
                .params
                .clone()
                .ok_or_else(|| format!("family `{}` requires `params`", raw.family))?;
            if let Some(n) = n {
                if p.len() != n {
                    return Err(format!(
                        "family `{}` expects {n} params, got {}",
                        raw.family,
                        p.len()
                    ));
                }
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(format!("family `{}` has non-finite params", raw.family));
            }
            Ok(p)
        };
        let table = || -> std::result::Result<Table, String> {
            match (raw.t.clone(), raw.v.clone()) {
                (Some(t), Some(v)) => Table::new(t, v).map_err(|e| e.to_string()),
                _ => Err(format!("family `{}` requires `t` and `v`", raw.family)),
            }
        };
        match raw.family.as_str() {
            "constant" => Ok(CoefficientFn::Constant(params(Some(1))?[0])),
            "sinusoid" => {
                let p = params(Some(4))?;
                Ok(CoefficientFn::sinusoid(p[0], p[1], p[2], p[3]))
            }
            "polynomial" => {
                let p = params(None)?;
                if p.is_empty() {
                    return Err("family `polynomial` needs at least one coefficient".into());
                }
                Ok(CoefficientFn::Polynomial(p))
            }
            "table" => Ok(CoefficientFn::Table(table()?)),
            "table_integral" => {
                let offset = params(Some(1))?[0];
                TableIntegral::new(table()?, offset)
                    .map(CoefficientFn::TableIntegral)
                    .map_err(|e| e.to_string())
            }
            "sum" => raw
                .terms
                .clone()
                .map(CoefficientFn::Sum)
                .ok_or_else(|| "family `sum` requires `terms`".into()),
            other => Err(format!("unknown coefficient family `{other}`")),
        }
    }
}

impl From<CoefficientFn> for RawCoefficient {
    fn from(f: CoefficientFn) -> Self {
        let with_params = |family: &str, p: Vec<f64>| RawCoefficient {
            family: family.into(),
            params: Some(p),
            t: None,
            v: None,
            terms: None,
        };
        match f {
            CoefficientFn::Constant(c) => with_params("constant", vec![c]),
            CoefficientFn::Sinusoid {
                offset,
                amplitude,
                freq,
                phase,
            } => with_params("sinusoid", vec![offset, amplitude, freq, phase]),
            CoefficientFn::Polynomial(c) => with_params("polynomial", c),
            CoefficientFn::Table(tab) => RawCoefficient {
                family: "table".into(),
                params: None,
                t: Some(tab.t),
                v: Some(tab.v),
                terms: None,
            },
            CoefficientFn::TableIntegral(ti) => RawCoefficient {
                family: "table_integral".into(),
                params: Some(vec![ti.offset]),
                t: Some(ti.table.t),
                v: Some(ti.table.v),
                terms: None,
            },
            CoefficientFn::Sum(terms) => RawCoefficient {
                family: "sum".into(),
                params: None,
                t: None,
                v: None,
                terms: Some(terms),
            },
        }
    }
}
