//! Aggregation across runs and the Wilcoxon rank-sum test.

use std::fmt;

use crate::conll::Corpus;
use crate::error::{Error, Result};
use crate::labels::Scheme;
use crate::repair::RepairMethod;
use crate::score::{score_pair, ScoreOptions, ScoreReport};

/// Mean and sample standard deviation of a set of run scores.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample (n - 1) standard deviation; `None` for a single run.
    pub std: Option<f64>,
}

impl RunSummary {
    pub fn n(&self) -> usize {
        self.values.len()
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.std {
            Some(std) => write!(f, "{:.2} ± {:.2}", self.mean, std),
            None => write!(f, "{:.2}", self.mean),
        }
    }
}

pub fn summarize_runs(values: &[f64]) -> Result<RunSummary> {
    if values.is_empty() {
        return Err(Error::Contract(
            "cannot summarize an empty list of runs".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("run scores must be finite".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() > 1).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    });
    Ok(RunSummary {
        values: values.to_vec(),
        mean,
        std,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumResult {
    /// Sum of the pooled ranks of group A.
    pub statistic: f64,
    pub z: f64,
    /// Two-sided p-value from the normal approximation.
    pub p_value: f64,
    /// Set when every pooled value is identical, so the variance is zero.
    pub degenerate: bool,
}

/// 1-based ranks of `values`, with tied values sharing their mid-rank.
/// Also returns the tie-correction sum of `t^3 - t` over tie groups.
fn mid_ranks(values: &[f64]) -> (Vec<f64>, u128) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0u128;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Ranks i+1 ..= j share their average.
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        let t = (j - i) as u128;
        ties += t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

/// Wilcoxon rank-sum test with the normal approximation.
///
/// Ties get mid-ranks and the variance is tie-corrected. No continuity
/// correction is applied.
pub fn rank_sum_test(group_a: &[f64], group_b: &[f64]) -> Result<RankSumResult> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(Error::Contract(
            "both groups need at least one value".into(),
        ));
    }
    if group_a.iter().chain(group_b).any(|v| v.is_nan()) {
        return Err(Error::Contract(
            "rank-sum test values must not be NaN".into(),
        ));
    }
    let pooled: Vec<f64> = group_a.iter().chain(group_b).copied().collect();
    let (ranks, ties) = mid_ranks(&pooled);
    let statistic: f64 = ranks[..group_a.len()].iter().sum();

    let n1 = group_a.len() as f64;
    let n2 = group_b.len() as f64;
    let total = pooled.len() as u128;
    let n = total as f64;
    let mean = n1 * (n + 1.0) / 2.0;

    if ties == total * total * total - total {
        return Ok(RankSumResult {
            statistic,
            z: 0.0,
            p_value: 1.0,
            degenerate: true,
        });
    }
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - ties as f64 / (n * (n - 1.0)));
    let z = (statistic - mean) / variance.sqrt();
    Ok(RankSumResult {
        statistic,
        z,
        p_value: two_sided_p(z),
        degenerate: false,
    })
}

/// `2 * (1 - Phi(|z|))`, computed as `erfc(|z| / sqrt 2)`.
pub fn two_sided_p(z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Complementary error function: power series below 2.5, continued fraction
/// above. Absolute error is far below 1e-7 everywhere.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.5 {
        return 1.0 - erf_series(x);
    }
    // erfc(x) = exp(-x^2) / sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut f = x;
    for k in (1..=80).rev() {
        f = x + (k as f64 / 2.0) / f;
    }
    (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^(2n+1) / (n! (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        let n = n as f64;
        term *= -x2 / n;
        let contribution = term / (2.0 * n + 1.0);
        sum += contribution;
        if contribution.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// Two groups of runs scored against one reference and compared.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub method_a: RepairMethod,
    pub method_b: RepairMethod,
    pub scores_a: Vec<ScoreReport>,
    pub scores_b: Vec<ScoreReport>,
    pub summary_a: RunSummary,
    pub summary_b: RunSummary,
    /// `|mean_a - mean_b|` in F1 points.
    pub delta: f64,
    pub test: RankSumResult,
}

impl ComparisonReport {
    /// Header plus one row: mean ± std for each group, Δ to two decimals
    /// and the p-value to four.
    pub fn format_table(&self) -> String {
        let head_a = format!("A ({})", self.method_a);
        let head_b = format!("B ({})", self.method_b);
        let mut out = format!(
            "{:<16}  {:<16}  {:>6}  {:>7}\n",
            head_a, head_b, "Δ", "p-value"
        );
        out.push_str(&format!(
            "{:<16}  {:<16}  {:>6.2}  {:>7.4}\n",
            self.summary_a.to_string(),
            self.summary_b.to_string(),
            self.delta,
            self.test.p_value
        ));
        out
    }
}

/// Micro F1 of one run in percentage points.
pub fn f1_points(report: &ScoreReport) -> f64 {
    let micro = report.micro();
    let den = micro.predicted + micro.reference;
    if den == 0 {
        0.0
    } else {
        (200 * micro.true_positives) as f64 / den as f64
    }
}

/// Scores each run of both groups with its group's repair method, then
/// summarizes and compares the two F1 distributions.
pub fn compare_groups(
    reference: &Corpus,
    scheme: Scheme,
    options: &ScoreOptions,
    method_a: RepairMethod,
    preds_a: &[Corpus],
    method_b: RepairMethod,
    preds_b: &[Corpus],
) -> Result<ComparisonReport> {
    let score_all = |method, preds: &[Corpus]| -> Result<Vec<ScoreReport>> {
        preds
            .iter()
            .map(|p| score_pair(reference, p, scheme, method, options))
            .collect()
    };
    let scores_a = score_all(method_a, preds_a)?;
    let scores_b = score_all(method_b, preds_b)?;
    let f1_a: Vec<f64> = scores_a.iter().map(f1_points).collect();
    let f1_b: Vec<f64> = scores_b.iter().map(f1_points).collect();
    let summary_a = summarize_runs(&f1_a)?;
    let summary_b = summarize_runs(&f1_b)?;
    let test = rank_sum_test(&f1_a, &f1_b)?;
    Ok(ComparisonReport {
        method_a,
        method_b,
        delta: (summary_a.mean - summary_b.mean).abs(),
        scores_a,
        scores_b,
        summary_a,
        summary_b,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn summary_examples() {
        let s = summarize_runs(&[71.0, 72.0, 73.0]).unwrap();
        assert_eq!(s.to_string(), "72.00 ± 1.00");
        assert_eq!(s.std, Some(1.0));

        let single = summarize_runs(&[80.0]).unwrap();
        assert_eq!(single.std, None);
        assert_eq!(single.to_string(), "80.00");

        let flat = summarize_runs(&[50.0; 10]).unwrap();
        assert_eq!(flat.to_string(), "50.00 ± 0.00");

        assert!(summarize_runs(&[]).is_err());
        assert!(summarize_runs(&[f64::NAN]).is_err());
    }

    #[test]
    fn mid_ranks_with_ties() {
        let (ranks, ties) = mid_ranks(&[1.0, 2.0, 2.0, 4.0, 5.0]);
        assert_eq!(ranks, vec![1.0, 2.5, 2.5, 4.0, 5.0]);
        assert_eq!(ties, 6);
    }

    #[test]
    fn complete_separation_n10() {
        let a: Vec<f64> = (11..=20).map(f64::from).collect();
        let b: Vec<f64> = (1..=10).map(f64::from).collect();
        let r = rank_sum_test(&a, &b).unwrap();
        assert_eq!(r.statistic, 155.0);
        let expected_z = 50.0 / 175f64.sqrt();
        assert!(close(r.z, expected_z, 1e-12));
        assert!(close(r.p_value, 0.000157, 1e-6), "{}", r.p_value);
        assert_eq!(format!("{:.4}", r.p_value), "0.0002");
    }

    #[test]
    fn three_versus_three() {
        // W = 6, mu = 10.5, var = 3*3*7/12 = 5.25.
        let r = rank_sum_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.statistic, 6.0);
        assert!(close(r.z, -4.5 / 5.25f64.sqrt(), 1e-12));
        assert!(
            close(r.p_value, 0.049534613435626706, 1e-9),
            "{}",
            r.p_value
        );
    }

    #[test]
    fn identical_groups() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let r = rank_sum_test(&a, &a).unwrap();
        assert_eq!(r.z, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn all_values_equal_is_degenerate() {
        let r = rank_sum_test(&[3.0, 3.0], &[3.0, 3.0, 3.0]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn empty_group_is_an_error() {
        assert!(rank_sum_test(&[], &[1.0]).is_err());
        assert!(rank_sum_test(&[1.0], &[]).is_err());
    }

    #[test]
    fn erfc_reference_points() {
        assert_eq!(erfc(0.0), 1.0);
        assert!(close(erfc(1.0), 0.157_299_207_050_285_1, 1e-14));
        assert!(close(erfc(2.0), 0.004_677_734_981_047_266, 1e-15));
        assert!(close(erfc(3.0), 2.209_049_699_858_544e-5, 1e-17));
        assert!(close(erfc(-1.0), 1.842_700_792_949_715, 1e-14));
        assert!(close(normal_cdf(1.959_963_984_540_054), 0.975, 1e-12));
    }

    #[test]
    fn table_row_layout() {
        let summary_a = summarize_runs(&[89.5, 90.0, 89.84]).unwrap();
        let summary_b = summarize_runs(&[87.0, 87.5, 87.58]).unwrap();
        let test = rank_sum_test(&summary_a.values, &summary_b.values).unwrap();
        let report = ComparisonReport {
            method_a: RepairMethod::Begin,
            method_b: RepairMethod::Discard,
            scores_a: vec![],
            scores_b: vec![],
            delta: (summary_a.mean - summary_b.mean).abs(),
            summary_a,
            summary_b,
            test,
        };
        let table = report.format_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "89.78 ± 0.26      87.36 ± 0.31        2.42   0.0495"
        );
    }
}
