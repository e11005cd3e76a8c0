//! The significance tests for comparing two uplifts, plus the classical
//! 2x2 homogeneity test of a single uplift against zero.
//!
//! All comparison tests share the null hypothesis that both subgroups
//! have the same uplift; all refer their statistic to the chi-square
//! distribution with one degree of freedom (the squared standard
//! normal), which also covers the t-style statistic because its degrees
//! of freedom are huge at campaign scale.
//!
//! * [`net_chi_sq`] normalises the centered uplift-based responses with
//!   subgroup-specific variances and the two norming terms. It makes no
//!   assumption about the target-control rates and is therefore valid
//!   both for two independent campaigns and for a split campaign.
//! * [`net_chi_sq_v1`] pools the control rate over the whole control
//!   group instead of target-weighting it. Valid only when the two
//!   target-control rates are (approximately) equal.
//! * [`net_chi_sq_v2`] additionally estimates the variances from the
//!   pooled sample and drops the norming terms; its null also assumes
//!   equal control response rates.
//! * [`t_net_sq`] / [`contrast_test`] come from linear-model reasoning
//!   over the four cell means. They coincide numerically; both labels
//!   are kept because both appear in practice.
//! * [`classical_chi_sq`] is the textbook homogeneity test of target
//!   versus control response rates within one campaign.

use crate::dist::chi_sq1_sf_raw;
use crate::domain::{CampaignPair, SubgroupCounts};
use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Identifies which test produced a [`TestOutcome`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    NetChiSq,
    NetChiSq1,
    NetChiSq2,
    TNetSq,
    Contrast,
    ClassicalChiSq,
}

impl Method {
    /// All methods, in reporting order.
    pub const ALL: [Method; 6] = [
        Method::NetChiSq,
        Method::NetChiSq1,
        Method::NetChiSq2,
        Method::TNetSq,
        Method::Contrast,
        Method::ClassicalChiSq,
    ];

    /// The five uplift-comparison methods covered by the simulation
    /// study, in its column order.
    pub const SIMULATED: [Method; 5] = [
        Method::NetChiSq,
        Method::NetChiSq1,
        Method::NetChiSq2,
        Method::Contrast,
        Method::TNetSq,
    ];

    /// Stable identifier used in command lines and output files.
    pub fn id(&self) -> &'static str {
        match self {
            Method::NetChiSq => "netchisq",
            Method::NetChiSq1 => "netchisq1",
            Method::NetChiSq2 => "netchisq2",
            Method::TNetSq => "tnetsq",
            Method::Contrast => "contrast",
            Method::ClassicalChiSq => "classical",
        }
    }

    /// Inverse of [`Method::id`], case-insensitive.
    pub fn from_id(id: &str) -> Option<Method> {
        let lower = id.trim().to_ascii_lowercase();
        Method::ALL.into_iter().find(|m| m.id() == lower)
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.id())
    }
}

/// Result of one significance test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    pub method: Method,
    /// Nonnegative test statistic.
    pub statistic: f64,
    /// Upper-tail probability of the reference distribution at the
    /// statistic.
    pub p_value: f64,
    /// Degrees of freedom of the reference distribution.
    pub dof: u32,
    /// Whether the method's assumptions hold for this input. Inapplicable
    /// outcomes still carry numbers plus a warning note.
    pub applicable: bool,
    /// Diagnostics accumulated while computing the outcome.
    pub notes: Vec<String>,
}

impl TestOutcome {
    fn new(method: Method, statistic: f64) -> Self {
        TestOutcome {
            method,
            statistic,
            p_value: chi_sq1_sf_raw(statistic),
            dof: 1,
            applicable: true,
            notes: Vec::new(),
        }
    }
}

/// When the rate-matched variants may be applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApplicabilityPolicy {
    /// Largest tolerated relative difference between the two
    /// target-control rates.
    pub max_rate_mismatch: f64,
}

impl Default for ApplicabilityPolicy {
    fn default() -> Self {
        // the scenarios are only distinguished qualitatively; 5% is the
        // adopted default and callers may tighten or relax it
        ApplicabilityPolicy {
            max_rate_mismatch: 0.05,
        }
    }
}

fn require_interior_rates(est: &crate::DerivedEstimates) -> Result<()> {
    if est.boundary_rate {
        return Err(Error::VarianceDegenerate(
            "an estimated response rate is exactly 0 or 1".into(),
        ));
    }
    Ok(())
}

fn rate_match_note(
    pair: &CampaignPair,
    policy: &ApplicabilityPolicy,
) -> Result<(bool, Option<String>)> {
    let mismatch = pair.rate_mismatch()?;
    if mismatch <= policy.max_rate_mismatch {
        Ok((true, None))
    } else {
        let r1 = pair.sub1().target_control_rate()?;
        let r2 = pair.sub2().target_control_rate()?;
        Ok((
            false,
            Some(format!(
                "target-control rates differ by {:.1}% ({:.2} vs {:.2}); result reported for reference only",
                100.0 * mismatch,
                r1,
                r2
            )),
        ))
    }
}

/// Net chi-square test of equal uplifts. Applicable to any valid pair;
/// no assumption on the target-control rates.
pub fn net_chi_sq(pair: &CampaignPair) -> Result<TestOutcome> {
    let est = pair.derive_estimates()?;
    require_interior_rates(&est)?;
    let [c1, c2] = est.centered();
    let statistic = (c1 * c1 / est.variances[0] + c2 * c2 / est.variances[1])
        / (est.weight_norm * est.precision_norm);
    Ok(TestOutcome::new(Method::NetChiSq, statistic))
}

/// Variant of [`net_chi_sq`] whose null expectations use the control
/// rate pooled over the whole control group. Only applicable when the
/// target-control rates of the two subgroups are roughly equal.
pub fn net_chi_sq_v1(pair: &CampaignPair, policy: &ApplicabilityPolicy) -> Result<TestOutcome> {
    let est = pair.derive_estimates()?;
    require_interior_rates(&est)?;
    let diff = est.pooled_target_rate - est.natural_control_rate;
    let n1 = pair.sub1().target_size() as f64;
    let n2 = pair.sub2().target_size() as f64;
    let c1 = est.uplift_responses[0] - n1 * diff;
    let c2 = est.uplift_responses[1] - n2 * diff;
    let statistic = (c1 * c1 / est.variances[0] + c2 * c2 / est.variances[1])
        / (est.weight_norm * est.precision_norm);
    let mut out = TestOutcome::new(Method::NetChiSq1, statistic);
    let (applicable, note) = rate_match_note(pair, policy)?;
    out.applicable = applicable;
    out.notes.extend(note);
    Ok(out)
}

/// Variant with pooled-sample variance estimates and no norming terms.
/// Its null hypothesis additionally assumes equal control response
/// rates; applicability is gated like [`net_chi_sq_v1`].
pub fn net_chi_sq_v2(pair: &CampaignPair, policy: &ApplicabilityPolicy) -> Result<TestOutcome> {
    let est = pair.derive_estimates()?;
    require_interior_rates(&est)?;
    let pt = est.pooled_target_rate;
    let pc = est.natural_control_rate;
    let diff = pt - pc;
    let n1 = pair.sub1().target_size() as f64;
    let n2 = pair.sub2().target_size() as f64;
    let k1 = pair.sub1().control_size() as f64;
    let k2 = pair.sub2().control_size() as f64;
    let c1 = est.uplift_responses[0] - n1 * diff;
    let c2 = est.uplift_responses[1] - n2 * diff;
    let v1 = n1 * pt * (1.0 - pt) + n1 * n1 / k1 * pc * (1.0 - pc);
    let v2 = n2 * pt * (1.0 - pt) + n2 * n2 / k2 * pc * (1.0 - pc);
    let statistic = c1 * c1 / v1 + c2 * c2 / v2;
    let mut out = TestOutcome::new(Method::NetChiSq2, statistic);
    out.notes.push(
        "null hypothesis additionally assumes equal control response rates in both subgroups"
            .into(),
    );
    let (applicable, note) = rate_match_note(pair, policy)?;
    out.applicable = applicable;
    out.notes.extend(note);
    Ok(out)
}

fn t_net_sq_statistic(pair: &CampaignPair) -> Result<f64> {
    let est = pair.derive_estimates()?;
    let n1 = pair.sub1().target_size() as f64;
    let n2 = pair.sub2().target_size() as f64;
    let k1 = pair.sub1().control_size() as f64;
    let k2 = pair.sub2().control_size() as f64;
    let total = n1 + n2 + k1 + k2;
    if total <= 4.0 {
        return Err(Error::DegenerateGroup(
            "t-style statistic needs more than 4 observations in total".into(),
        ));
    }
    let [pt1, pt2] = est.target_rates;
    let [pc1, pc2] = est.control_rates;
    let c44 = 1.0 / n1 + 1.0 / n2 + 1.0 / k1 + 1.0 / k2;
    let sse = n1 * pt1 * (1.0 - pt1)
        + n2 * pt2 * (1.0 - pt2)
        + k1 * pc1 * (1.0 - pc1)
        + k2 * pc2 * (1.0 - pc2);
    if sse == 0.0 {
        return Err(Error::VarianceDegenerate(
            "pooled error sum of squares is zero".into(),
        ));
    }
    let contrast = pt1 - pc1 - (pt2 - pc2);
    Ok((total - 4.0) * contrast * contrast / (c44 * sse))
}

/// Squared t-style statistic from linear-model reasoning over the four
/// cell means, referred to chi-square(1) via the normal approximation of
/// the t distribution with `n + k - 4` degrees of freedom.
pub fn t_net_sq(pair: &CampaignPair) -> Result<TestOutcome> {
    Ok(TestOutcome::new(Method::TNetSq, t_net_sq_statistic(pair)?))
}

/// Cell-means contrast (+1, -1, -1, +1) on the four estimated rates with
/// the pooled error variance. The closed form coincides with
/// [`t_net_sq`]; the outcome differs only in its method label.
pub fn contrast_test(pair: &CampaignPair) -> Result<TestOutcome> {
    Ok(TestOutcome::new(
        Method::Contrast,
        t_net_sq_statistic(pair)?,
    ))
}

/// Classical 2x2 homogeneity test: is the uplift of a single campaign
/// (target versus control response rate) different from zero?
pub fn classical_chi_sq(sub: &SubgroupCounts) -> Result<TestOutcome> {
    let n = sub.target_size() as f64;
    let k = sub.control_size() as f64;
    if sub.target_size() == 0 || sub.control_size() == 0 {
        return Err(Error::DegenerateGroup(
            "homogeneity test needs nonempty target and control groups".into(),
        ));
    }
    let a_t = sub.target_responses() as f64;
    let a_c = sub.control_responses() as f64;
    let grand = n + k;
    let responses = a_t + a_c;
    let non_responses = grand - responses;
    if responses == 0.0 || non_responses == 0.0 {
        return Err(Error::DegenerateGroup(
            "a column of the 2x2 table is empty, expected cell counts are zero".into(),
        ));
    }
    let observed = [a_t, n - a_t, a_c, k - a_c];
    let expected = [
        n * responses / grand,
        n * non_responses / grand,
        k * responses / grand,
        k * non_responses / grand,
    ];
    let statistic: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o - e) * (o - e) / e)
        .sum();
    let mut out = TestOutcome::new(Method::ClassicalChiSq, statistic);
    if a_t == 0.0 || a_t == n || a_c == 0.0 || a_c == k {
        out.notes
            .push("a response rate is exactly 0 or 1; the approximation may be poor".into());
    }
    Ok(out)
}
