use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationPoint<T> {
    pub r: T,
    pub value: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<T>,
}

/// Expectation estimates at increasing noise amplification, starting from `r = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtrapolationSeries<T> {
    points: Vec<ExtrapolationPoint<T>>,
}

impl<T: Real> ExtrapolationSeries<T> {
    pub fn new(points: Vec<ExtrapolationPoint<T>>) -> QResult<Self> {
        let first = points.first().ok_or_else(|| QError::InvalidSeries("no points".into()))?;
        if (first.r.clone() - T::one()).abs() > T::eps() * T::of(16.0) {
            return Err(QError::InvalidSeries(format!("first node must be r = 1, got {}", first.r)));
        }
        for w in points.windows(2) {
            if w[1].r == w[0].r {
                return Err(QError::DuplicateNodes);
            }
            if w[1].r < w[0].r {
                return Err(QError::InvalidSeries("nodes must be strictly increasing".into()));
            }
        }
        Ok(ExtrapolationSeries { points })
    }

    pub fn from_values(rs: &[T], values: &[T]) -> QResult<Self> {
        if rs.len() != values.len() {
            return Err(QError::InvalidSeries(format!("{} nodes but {} values", rs.len(), values.len())));
        }
        Self::new(
            rs.iter()
                .zip(values)
                .map(|(r, v)| ExtrapolationPoint { r: r.clone(), value: v.clone(), stderr: None })
                .collect(),
        )
    }

    pub fn points(&self) -> &[ExtrapolationPoint<T>] {
        &self.points
    }

    pub fn nodes(&self) -> Vec<T> {
        self.points.iter().map(|p| p.r.clone()).collect()
    }

    pub fn coefficients(&self) -> QResult<Vec<T>> {
        richardson_coefficients(&self.nodes())
    }

    /// Zero-noise estimate `Σ c_i E_{r_i}`.
    pub fn extrapolate(&self) -> QResult<T> {
        let c = self.coefficients()?;
        Ok(c.iter().zip(&self.points).fold(T::zero(), |acc, (c, p)| acc + c.clone() * p.value.clone()))
    }

    /// `sqrt(Σ c_i² σ_i²)` when every point carries a standard error.
    pub fn extrapolated_stderr(&self) -> QResult<Option<T>> {
        let c = self.coefficients()?;
        let mut acc = T::zero();
        for (c, p) in c.iter().zip(&self.points) {
            let Some(s) = &p.stderr else { return Ok(None) };
            acc += c.clone() * c.clone() * s.clone() * s.clone();
        }
        Ok(Some(acc.sqrt()))
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for ExtrapolationSeries<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<T> {
            points: Vec<ExtrapolationPoint<T>>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        ExtrapolationSeries::new(raw.points).map_err(serde::de::Error::custom)
    }
}

/// Weights `c_i` with `Σ c_i = 1` and `Σ c_i r_i^k = 0` for `k = 1..m−1`.
///
/// These are the Lagrange basis polynomials through the nodes evaluated at zero,
/// `c_i = Π_{j≠i} r_j / (r_j − r_i)`.
pub fn richardson_coefficients<T: Real>(rs: &[T]) -> QResult<Vec<T>> {
    if rs.is_empty() {
        return Err(QError::InvalidSeries("no points".into()));
    }
    for (i, a) in rs.iter().enumerate() {
        if rs[..i].contains(a) {
            return Err(QError::DuplicateNodes);
        }
    }
    Ok((0..rs.len())
        .map(|i| {
            rs.iter().enumerate().filter(|&(j, _)| j != i).fold(T::one(), |acc, (_, rj)| {
                acc * rj.clone() / (rj.clone() - rs[i].clone())
            })
        })
        .collect())
}

/// Zero-noise extrapolation of a series.
pub fn richardson<T: Real>(series: &ExtrapolationSeries<T>) -> QResult<T> {
    series.extrapolate()
}
