//! Monte-Carlo study of the five uplift-comparison methods.
//!
//! A scenario fixes the four group sizes and the four true response
//! probabilities. Each replicate draws the four response counts from
//! their binomial distributions, assembles a [`CampaignPair`] and
//! records the p-values of all five methods. Sorting the replicates by
//! the net chi-square p-value gives the probability-plot table: under a
//! true null each p-value column should scatter around the diagonal,
//! deviations expose type I or type II error.
//!
//! Replicate sub-seeds are derived from the master seed with a counter,
//! so a study is a pure function of (scenario, replicates, seed) and the
//! replicates could be evaluated in any order or in parallel.

use crate::domain::CampaignPair;
use crate::methods::{
    contrast_test, net_chi_sq, net_chi_sq_v1, net_chi_sq_v2, t_net_sq, ApplicabilityPolicy, Method,
};
use crate::rng::{splitmix_stream, Rng};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// One simulation scenario: group sizes and true response probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    label: String,
    target_sizes: [u64; 2],
    control_sizes: [u64; 2],
    target_rates: [f64; 2],
    control_rates: [f64; 2],
}

impl ScenarioParams {
    /// Validates sizes (>= 1) and probabilities (strictly inside (0, 1)).
    pub fn new(
        label: impl Into<String>,
        target_sizes: [u64; 2],
        control_sizes: [u64; 2],
        target_rates: [f64; 2],
        control_rates: [f64; 2],
    ) -> Result<Self> {
        for &size in target_sizes.iter().chain(control_sizes.iter()) {
            if size == 0 {
                return Err(Error::InvalidArgument(
                    "scenario group sizes must be at least 1".into(),
                ));
            }
        }
        for &p in target_rates.iter().chain(control_rates.iter()) {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "scenario probabilities must lie strictly inside (0, 1), got {p}"
                )));
            }
        }
        Ok(ScenarioParams {
            label: label.into(),
            target_sizes,
            control_sizes,
            target_rates,
            control_rates,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn target_sizes(&self) -> [u64; 2] {
        self.target_sizes
    }

    pub fn control_sizes(&self) -> [u64; 2] {
        self.control_sizes
    }

    pub fn target_rates(&self) -> [f64; 2] {
        self.target_rates
    }

    pub fn control_rates(&self) -> [f64; 2] {
        self.control_rates
    }

    /// True uplift of each subgroup.
    pub fn uplifts(&self) -> [f64; 2] {
        [
            self.target_rates[0] - self.control_rates[0],
            self.target_rates[1] - self.control_rates[1],
        ]
    }
}

/// The seven built-in scenarios of the calibration study. The first four
/// have equal uplifts in both subgroups (type I error checks), the last
/// three different uplifts (type II error checks); labels `fig1`..`fig7`.
pub fn builtin_scenarios() -> Vec<ScenarioParams> {
    #[allow(clippy::type_complexity)]
    let rows: [(&str, [u64; 2], [u64; 2], [f64; 2], [f64; 2]); 7] = [
        (
            "fig1",
            [50_000, 50_000],
            [5_000, 5_000],
            [0.10, 0.10],
            [0.09, 0.09],
        ),
        (
            "fig2",
            [50_000, 50_000],
            [5_000, 5_000],
            [0.05, 0.51],
            [0.04, 0.50],
        ),
        (
            "fig3",
            [100_000, 20_000],
            [10_000, 2_000],
            [0.05, 0.51],
            [0.04, 0.50],
        ),
        (
            "fig4",
            [100_000, 20_000],
            [10_000, 2_000],
            [0.51, 0.05],
            [0.50, 0.04],
        ),
        (
            "fig5",
            [50_000, 50_000],
            [5_000, 5_000],
            [0.11, 0.10],
            [0.09, 0.09],
        ),
        (
            "fig6",
            [50_000, 50_000],
            [5_000, 5_000],
            [0.06, 0.51],
            [0.04, 0.50],
        ),
        (
            "fig7",
            [50_000, 50_000],
            [5_000, 10_000],
            [0.05, 0.52],
            [0.04, 0.50],
        ),
    ];
    rows.into_iter()
        .map(|(label, n, k, pt, pc)| {
            ScenarioParams::new(label, n, k, pt, pc).expect("built-in scenarios are valid")
        })
        .collect()
}

/// P-values of the five comparison methods for one replicate. A missing
/// value means the method could not be evaluated on that draw (an
/// estimated rate hit 0 or 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicatePValues {
    pub net_chi_sq: Option<f64>,
    pub net_chi_sq_1: Option<f64>,
    pub net_chi_sq_2: Option<f64>,
    pub contrast: Option<f64>,
    pub t_net_sq: Option<f64>,
}

impl ReplicatePValues {
    /// P-value of `method`; `None` for [`Method::ClassicalChiSq`], which
    /// the study does not cover.
    pub fn get(&self, method: Method) -> Option<f64> {
        match method {
            Method::NetChiSq => self.net_chi_sq,
            Method::NetChiSq1 => self.net_chi_sq_1,
            Method::NetChiSq2 => self.net_chi_sq_2,
            Method::Contrast => self.contrast,
            Method::TNetSq => self.t_net_sq,
            Method::ClassicalChiSq => None,
        }
    }
}

/// Draws one replicate of `sc` and evaluates all five methods.
///
/// The four response counts are drawn in the order target 1, target 2,
/// control 1, control 2. Degenerate draws yield missing p-values, never
/// an error.
pub fn run_replicate(rng: &mut Rng, sc: &ScenarioParams) -> ReplicatePValues {
    let [n1, n2] = sc.target_sizes;
    let [k1, k2] = sc.control_sizes;
    let a_t1 = rng
        .sample_binomial(n1, sc.target_rates[0])
        .expect("valid p");
    let a_t2 = rng
        .sample_binomial(n2, sc.target_rates[1])
        .expect("valid p");
    let a_c1 = rng
        .sample_binomial(k1, sc.control_rates[0])
        .expect("valid p");
    let a_c2 = rng
        .sample_binomial(k2, sc.control_rates[1])
        .expect("valid p");
    let pair = CampaignPair::from_counts([n1, a_t1, k1, a_c1, n2, a_t2, k2, a_c2])
        .expect("draws are within their group sizes");
    let policy = ApplicabilityPolicy::default();
    ReplicatePValues {
        net_chi_sq: net_chi_sq(&pair).ok().map(|o| o.p_value),
        net_chi_sq_1: net_chi_sq_v1(&pair, &policy).ok().map(|o| o.p_value),
        net_chi_sq_2: net_chi_sq_v2(&pair, &policy).ok().map(|o| o.p_value),
        contrast: contrast_test(&pair).ok().map(|o| o.p_value),
        t_net_sq: t_net_sq(&pair).ok().map(|o| o.p_value),
    }
}

/// One row of the probability-plot table.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    /// 1-based rank after sorting by the net chi-square p-value.
    pub rank: usize,
    /// rank / replicates, the diagonal reference.
    pub frac: f64,
    pub p_values: ReplicatePValues,
}

/// Ranked replicate p-values of a study, sorted ascending by the net
/// chi-square p-value. Only that column is guaranteed to ascend.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityPlotTable {
    pub rows: Vec<PlotRow>,
    pub replicates: usize,
    pub seed: u64,
}

/// Runs `replicates` independent replicates of `sc` and returns the
/// sorted probability-plot table. Deterministic in (sc, replicates,
/// seed): each replicate gets its own generator seeded from the master
/// seed and its index.
pub fn run_study(sc: &ScenarioParams, replicates: usize, seed: u64) -> ProbabilityPlotTable {
    let mut p_values: Vec<ReplicatePValues> = (0..replicates)
        .map(|i| {
            let mut rng = Rng::new(splitmix_stream(seed, i as u64));
            run_replicate(&mut rng, sc)
        })
        .collect();
    // missing net chi-square p-values sort to the end
    p_values.sort_by(|a, b| match (a.net_chi_sq, b.net_chi_sq) {
        (Some(x), Some(y)) => x.partial_cmp(&y).expect("p-values are never NaN"),
        (Some(_), None) => core::cmp::Ordering::Less,
        (None, Some(_)) => core::cmp::Ordering::Greater,
        (None, None) => core::cmp::Ordering::Equal,
    });
    let rows = p_values
        .into_iter()
        .enumerate()
        .map(|(i, p)| PlotRow {
            rank: i + 1,
            frac: (i + 1) as f64 / replicates as f64,
            p_values: p,
        })
        .collect();
    ProbabilityPlotTable {
        rows,
        replicates,
        seed,
    }
}

/// Rejection rate and uniformity diagnostics of one method over a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    /// Fraction of evaluated replicates with p < alpha.
    pub rejection_rate: f64,
    /// Replicates the method could be evaluated on.
    pub evaluated: usize,
    /// Replicates with a missing p-value.
    pub missing: usize,
    /// Kolmogorov-Smirnov sup-distance between the empirical p-value
    /// distribution and Uniform(0, 1).
    pub ks_distance: f64,
}

/// Per-method rejection rates and KS distances of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySummary {
    pub alpha: f64,
    pub methods: Vec<MethodSummary>,
}

impl StudySummary {
    pub fn method(&self, method: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// Summarises a probability-plot table at significance level `alpha`.
///
/// Missing p-values are excluded from the rates and reported in
/// [`MethodSummary::missing`]. Errors on an empty table or an `alpha`
/// outside (0, 1).
pub fn summarize(table: &ProbabilityPlotTable, alpha: f64) -> Result<StudySummary> {
    if table.rows.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot summarise an empty study".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie strictly inside (0, 1), got {alpha}"
        )));
    }
    let methods = Method::SIMULATED
        .iter()
        .map(|&method| {
            let mut p: Vec<f64> = table
                .rows
                .iter()
                .filter_map(|row| row.p_values.get(method))
                .collect();
            p.sort_by(|a, b| a.partial_cmp(b).expect("p-values are never NaN"));
            let evaluated = p.len();
            let missing = table.rows.len() - evaluated;
            let rejections = p.iter().filter(|&&x| x < alpha).count();
            let rejection_rate = if evaluated > 0 {
                rejections as f64 / evaluated as f64
            } else {
                0.0
            };
            let ks_distance = if evaluated > 0 {
                let n = evaluated as f64;
                p.iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        let lo = x - i as f64 / n;
                        let hi = (i + 1) as f64 / n - x;
                        lo.max(hi)
                    })
                    .fold(0.0f64, f64::max)
            } else {
                1.0
            };
            MethodSummary {
                method,
                rejection_rate,
                evaluated,
                missing,
                ks_distance,
            }
        })
        .collect();
    Ok(StudySummary { alpha, methods })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_rows_match_study_design() {
        let scenarios = builtin_scenarios();
        assert_eq!(scenarios.len(), 7);

        let fig1 = &scenarios[0];
        assert_eq!(fig1.label(), "fig1");
        assert_eq!(fig1.target_sizes(), [50_000, 50_000]);
        assert_eq!(fig1.control_sizes(), [5_000, 5_000]);
        assert_eq!(fig1.target_rates(), [0.10, 0.10]);
        assert_eq!(fig1.control_rates(), [0.09, 0.09]);
        // 1% uplift in both subgroups
        for u in fig1.uplifts() {
            assert!((u - 0.01).abs() < 1e-12);
        }

        assert_eq!(scenarios[2].target_sizes(), [100_000, 20_000]);
        assert_eq!(scenarios[3].target_rates(), [0.51, 0.05]);
        assert_eq!(scenarios[6].control_sizes()[1], 10_000);
        assert_eq!(scenarios[6].target_rates(), [0.05, 0.52]);
    }

    #[test]
    fn scenario_validation() {
        assert!(ScenarioParams::new("x", [0, 1], [1, 1], [0.5, 0.5], [0.4, 0.4]).is_err());
        assert!(ScenarioParams::new("x", [1, 1], [1, 1], [0.0, 0.5], [0.4, 0.4]).is_err());
        assert!(ScenarioParams::new("x", [1, 1], [1, 1], [0.5, 1.0], [0.4, 0.4]).is_err());
        assert!(ScenarioParams::new("x", [1, 1], [1, 1], [0.5, 0.5], [0.4, 0.4]).is_ok());
    }

    #[test]
    fn study_shape_and_determinism() {
        let sc = &builtin_scenarios()[0];
        let a = run_study(sc, 100, 42);
        let b = run_study(sc, 100, 42);
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 100);
        for (i, row) in a.rows.iter().enumerate() {
            assert_eq!(row.rank, i + 1);
            assert_eq!(row.frac, (i + 1) as f64 / 100.0);
        }
        // the net chi-square column ascends after sorting
        for pair in a.rows.windows(2) {
            let x = pair[0].p_values.net_chi_sq.unwrap();
            let y = pair[1].p_values.net_chi_sq.unwrap();
            assert!(x <= y);
        }
        let c = run_study(sc, 100, 43);
        assert_ne!(a, c, "different seeds give different draws");
    }

    #[test]
    fn summarize_rejects_bad_input() {
        let sc = &builtin_scenarios()[0];
        let table = run_study(sc, 10, 1);
        assert!(summarize(&table, 0.0).is_err());
        assert!(summarize(&table, 1.0).is_err());
        let empty = ProbabilityPlotTable {
            rows: alloc::vec::Vec::new(),
            replicates: 0,
            seed: 0,
        };
        assert!(summarize(&empty, 0.05).is_err());
    }

    #[test]
    fn summarize_all_ones_never_rejects() {
        let rows = (0..20)
            .map(|i| PlotRow {
                rank: i + 1,
                frac: (i + 1) as f64 / 20.0,
                p_values: ReplicatePValues {
                    net_chi_sq: Some(1.0),
                    net_chi_sq_1: Some(1.0),
                    net_chi_sq_2: Some(1.0),
                    contrast: Some(1.0),
                    t_net_sq: Some(1.0),
                },
            })
            .collect();
        let table = ProbabilityPlotTable {
            rows,
            replicates: 20,
            seed: 0,
        };
        let summary = summarize(&table, 0.5).unwrap();
        for m in &summary.methods {
            assert_eq!(m.rejection_rate, 0.0);
            assert_eq!(m.missing, 0);
        }
    }

    #[test]
    fn contrast_and_t_net_columns_coincide() {
        let sc = &builtin_scenarios()[1];
        let table = run_study(sc, 50, 7);
        for row in &table.rows {
            let c = row.p_values.contrast.unwrap();
            let t = row.p_values.t_net_sq.unwrap();
            assert!((c - t).abs() <= 1e-12);
        }
    }

    #[test]
    fn pooled_variance_variant_loses_power_under_unequal_noise() {
        // fig6: unequal control noise (4% vs 50%) with different uplifts;
        // the pooled-variance variant rejects notably less often
        let sc = &builtin_scenarios()[5];
        let summary = summarize(&run_study(sc, 1000, 77_777), 0.05).unwrap();
        let net = summary.method(Method::NetChiSq).unwrap().rejection_rate;
        let net2 = summary.method(Method::NetChiSq2).unwrap().rejection_rate;
        assert!(
            net2 + 0.04 < net,
            "expected a clear power gap, got net = {net}, variant 2 = {net2}"
        );
    }

    #[test]
    fn different_uplifts_detected_by_all_methods() {
        // fig5 has uplifts of 2% and 1%: every method's rejection rate
        // must sit far above the nominal 5% (the true power of this
        // scenario is around 0.38, well short of a majority)
        let sc = &builtin_scenarios()[4];
        let table = run_study(sc, 400, 11);
        let summary = summarize(&table, 0.05).unwrap();
        for m in &summary.methods {
            assert!(
                m.rejection_rate > 0.2,
                "{:?} rejected only {}",
                m.method,
                m.rejection_rate
            );
        }
    }
}
