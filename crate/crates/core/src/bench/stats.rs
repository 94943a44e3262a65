use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{param_keys, Experiment, RunRecord};
use crate::error::{Error, Result};

/// Per-cell sample statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub cell: usize,
    pub params: Vec<(String, Value)>,
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
}

impl SummaryRow {
    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).and_then(|(_, v)| v.as_f64())
    }
}

/// The scalar summarized for each experiment, and its CSV column name.
fn scalar(exp: Experiment) -> (&'static str, fn(&RunRecord) -> Option<f64>) {
    match exp {
        Experiment::Mag => ("m_hat", |r| Some(0.5 * (r.number("m_plus")? - r.number("m_minus")?))),
        Experiment::Psi => ("psi", |r| match r.fields.get("psi")? {
            Value::String(s) if s == "exceeded" => Some(f64::INFINITY),
            v => v.as_f64(),
        }),
        Experiment::AnimalScan => ("value", |r| r.number("value")),
        Experiment::GrowScan => ("ratio", |r| r.number("ratio")),
        Experiment::CurveSuite => ("violations", |r| r.number("violations")),
    }
}

/// Mean and standard error (unbiased variance over `√n`) per cell, skipping error records.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    let Some(first) = records.first() else {
        return Err(Error::InvalidArgument("no records to summarize".into()));
    };
    let exp = first.exp;
    if records.iter().any(|r| r.exp != exp) {
        return Err(Error::InvalidArgument("records mix several experiments".into()));
    }
    let (_, value) = scalar(exp);
    let mut cells: BTreeMap<usize, (Vec<(String, Value)>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let entry = cells.entry(r.cell).or_insert_with(|| {
            let params = param_keys(exp)
                .iter()
                .map(|k| (k.to_string(), r.fields.get(*k).cloned().unwrap_or(Value::Null)))
                .collect();
            (params, Vec::new())
        });
        if r.error.is_none() {
            if let Some(x) = value(r) {
                entry.1.push(x);
            }
        }
    }
    cells
        .into_iter()
        .map(|(cell, (params, xs))| {
            if xs.is_empty() {
                return Err(Error::Domain(format!("cell {cell} has no successful samples")));
            }
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let stderr = if xs.len() < 2 {
                0.0
            } else if !mean.is_finite() {
                f64::INFINITY
            } else {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
            };
            Ok(SummaryRow { cell, params, n: xs.len(), mean, stderr })
        })
        .collect()
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        v => v.to_string(),
    }
}

/// `params…,samples,<value>,stderr` with one row per cell.
pub fn write_summary_csv<W: Write>(exp: Experiment, rows: &[SummaryRow], mut out: W) -> Result<()> {
    let (name, _) = scalar(exp);
    let mut header: Vec<&str> = param_keys(exp).to_vec();
    header.extend(["samples", name, "stderr"]);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let mut cols: Vec<String> = row.params.iter().map(|(_, v)| csv_field(v)).collect();
        cols.push(row.n.to_string());
        cols.push(row.mean.to_string());
        cols.push(row.stderr.to_string());
        writeln!(out, "{}", cols.join(","))?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    /// `y = a·(log N)^{3/4}`.
    LogPowerThreeQuarters,
    /// `log ψ = a·ε^{−4/3} + b`.
    PsiFourThirds,
    /// `log ψ = a·ε^{−2} + b`.
    PsiSquare,
}

impl FitModel {
    pub fn label(self) -> &'static str {
        match self {
            FitModel::LogPowerThreeQuarters => "a*(logN)^(3/4)",
            FitModel::PsiFourThirds => "log psi = a*eps^(-4/3)+b",
            FitModel::PsiSquare => "log psi = a*eps^(-2)+b",
        }
    }

    /// Grid key holding the abscissa.
    pub fn abscissa(self) -> &'static str {
        match self {
            FitModel::LogPowerThreeQuarters => "N",
            _ => "eps",
        }
    }

    fn transform(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            FitModel::LogPowerThreeQuarters => (x.ln().powf(0.75), y),
            FitModel::PsiFourThirds => (x.powf(-4.0 / 3.0), y.ln()),
            FitModel::PsiSquare => (x.powi(-2), y.ln()),
        }
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FitModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logn34" | "animal" => Ok(FitModel::LogPowerThreeQuarters),
            "psi43" => Ok(FitModel::PsiFourThirds),
            "psi2" => Ok(FitModel::PsiSquare),
            _ => Err(Error::InvalidArgument(format!("unknown model {s:?} (logn34, psi43, psi2)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

/// Ordinary least squares on the model's transformed coordinates.
///
/// Points whose transform is not finite (for instance an exceeded ψ) are dropped first.
pub fn fit_points(points: &[(f64, f64)], model: FitModel) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> =
        points.iter().map(|&(x, y)| model.transform(x, y)).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    if pts.len() < 3 {
        return Err(Error::InvalidArgument(format!("fit needs at least 3 usable cells, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let coefficients = match model {
        FitModel::LogPowerThreeQuarters => {
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            if sxx == 0.0 {
                return Err(Error::Domain("rank-deficient design: all abscissae vanish".into()));
            }
            vec![pts.iter().map(|p| p.0 * p.1).sum::<f64>() / sxx]
        }
        FitModel::PsiFourThirds | FitModel::PsiSquare => {
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            if sxx == 0.0 {
                return Err(Error::Domain("rank-deficient design: all abscissae coincide".into()));
            }
            let a = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
            vec![a, my - a * mx]
        }
    };
    let predict = |x: f64| coefficients[0] * x + coefficients.get(1).copied().unwrap_or(0.0);
    let residuals: Vec<f64> = pts.iter().map(|&(x, y)| y - predict(x)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        if ss_res == 0.0 { 1.0 } else { 0.0 }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult { model, coefficients, r_squared, residuals })
}

/// Fits cell means against the model's grid key.
pub fn fit_scaling(summary: &[SummaryRow], model: FitModel) -> Result<FitResult> {
    let key = model.abscissa();
    let points = summary
        .iter()
        .map(|r| {
            r.param_f64(key)
                .map(|x| (x, r.mean))
                .ok_or_else(|| Error::InvalidArgument(format!("summary rows lack the {key:?} column")))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_points(&points, model)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for &t in &idx[i..=j] {
            r[t] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties; `None` when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_generating_coefficients() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&n: &f64| (n, 2.0 * n.ln().powf(0.75))).collect();
        let f = fit_points(&pts, FitModel::LogPowerThreeQuarters).unwrap();
        assert!((f.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);

        let pts: Vec<(f64, f64)> = [1.5, 1.25, 1.0, 0.8].iter().map(|&e: &f64| (e, (3.0 * e.powf(-4.0 / 3.0)).exp())).collect();
        let f = fit_points(&pts, FitModel::PsiFourThirds).unwrap();
        assert!((f.coefficients[0] - 3.0).abs() < 1e-9 && f.coefficients[1].abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let g = fit_points(&pts, FitModel::PsiSquare).unwrap();
        assert!(g.r_squared < 1.0 && g.r_squared >= 0.0);
    }

    #[test]
    fn degenerate_fits_are_errors() {
        assert!(fit_points(&[(2.0, 1.0), (3.0, 1.0)], FitModel::PsiSquare).is_err());
        assert!(fit_points(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)], FitModel::PsiSquare).is_err());
        assert!(fit_points(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)], FitModel::LogPowerThreeQuarters).is_err());
        // Exceeded ψ values drop out before counting.
        assert!(fit_points(&[(1.0, 2.0), (1.2, 3.0), (1.5, f64::INFINITY)], FitModel::PsiFourThirds).is_err());
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1., 2., 3., 4.], &[10., 20., 25., 100.]), Some(1.0));
        assert_eq!(spearman(&[1., 2., 3.], &[3., 2., 1.]), Some(-1.0));
        assert_eq!(spearman(&[1., 2., 3.], &[1., 1., 1.]), None);
        assert!((spearman(&[1., 2., 3., 4.], &[1., 3., 2., 4.]).unwrap() - 0.8).abs() < 1e-12);
    }
}
