//! Count data model for campaign comparisons and the derived estimates
//! every test consumes.
//!
//! A campaign (or a subgroup of one) is four whole numbers: how many
//! people were targeted, how many of those responded, how many were held
//! back as a control, and how many of the controls responded anyway. Two
//! such subgroups form a [`CampaignPair`], the unit all comparison tests
//! operate on.
//!
//! All types are immutable after construction and every operation is a
//! pure function, so values can be shared freely across threads.

use crate::{Error, Result};
use alloc::format;

/// Response rate: responses per targeted person.
///
/// Errors with [`Error::DegenerateGroup`] when `persons` is zero.
pub fn response_rate(responses: u64, persons: u64) -> Result<f64> {
    if persons == 0 {
        return Err(Error::DegenerateGroup(
            "response rate of an empty group".into(),
        ));
    }
    Ok(responses as f64 / persons as f64)
}

/// Target and control counts of one subgroup (one campaign, or one half
/// of a split campaign).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgroupCounts {
    target_size: u64,
    target_responses: u64,
    control_size: u64,
    control_responses: u64,
}

impl SubgroupCounts {
    /// Validates that responses do not exceed group sizes. Zero-sized
    /// groups are representable; tests reject them when they need the
    /// group.
    pub fn new(
        target_size: u64,
        target_responses: u64,
        control_size: u64,
        control_responses: u64,
    ) -> Result<Self> {
        if target_responses > target_size {
            return Err(Error::InvalidArgument(format!(
                "target responses ({target_responses}) exceed target size ({target_size})"
            )));
        }
        if control_responses > control_size {
            return Err(Error::InvalidArgument(format!(
                "control responses ({control_responses}) exceed control size ({control_size})"
            )));
        }
        Ok(SubgroupCounts {
            target_size,
            target_responses,
            control_size,
            control_responses,
        })
    }

    pub fn target_size(&self) -> u64 {
        self.target_size
    }

    pub fn target_responses(&self) -> u64 {
        self.target_responses
    }

    pub fn control_size(&self) -> u64 {
        self.control_size
    }

    pub fn control_responses(&self) -> u64 {
        self.control_responses
    }

    /// Response rate within the target group.
    pub fn target_rate(&self) -> Result<f64> {
        response_rate(self.target_responses, self.target_size)
    }

    /// Response rate within the control group.
    pub fn control_rate(&self) -> Result<f64> {
        response_rate(self.control_responses, self.control_size)
    }

    /// Target-control rate: target size over control size.
    pub fn target_control_rate(&self) -> Result<f64> {
        if self.control_size == 0 {
            return Err(Error::DegenerateGroup("empty control group".into()));
        }
        Ok(self.target_size as f64 / self.control_size as f64)
    }

    /// Uplift: target response rate minus control response rate.
    pub fn uplift(&self) -> Result<f64> {
        Ok(self.target_rate()? - self.control_rate()?)
    }

    /// Uplift-based responses: target responses minus control responses
    /// scaled to the target-group size. May be negative or fractional.
    pub fn uplift_responses(&self) -> Result<f64> {
        if self.control_size == 0 {
            return Err(Error::DegenerateGroup("empty control group".into()));
        }
        Ok(self.target_responses as f64
            - self.target_size as f64 / self.control_size as f64 * self.control_responses as f64)
    }

    fn scaled(&self, m: u64) -> Self {
        SubgroupCounts {
            target_size: self.target_size * m,
            target_responses: self.target_responses * m,
            control_size: self.control_size * m,
            control_responses: self.control_responses * m,
        }
    }
}

/// Two subgroups whose uplifts are to be compared. Totals are always the
/// sums of the subgroup counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CampaignPair {
    sub1: SubgroupCounts,
    sub2: SubgroupCounts,
}

impl CampaignPair {
    pub fn new(sub1: SubgroupCounts, sub2: SubgroupCounts) -> Self {
        CampaignPair { sub1, sub2 }
    }

    /// Builds a pair from the flat count order
    /// `[n1, aT1, k1, aC1, n2, aT2, k2, aC2]` (sizes and responses of
    /// subgroup 1's target and control, then the same for subgroup 2).
    pub fn from_counts(c: [u64; 8]) -> Result<Self> {
        Ok(CampaignPair {
            sub1: SubgroupCounts::new(c[0], c[1], c[2], c[3])?,
            sub2: SubgroupCounts::new(c[4], c[5], c[6], c[7])?,
        })
    }

    pub fn sub1(&self) -> &SubgroupCounts {
        &self.sub1
    }

    pub fn sub2(&self) -> &SubgroupCounts {
        &self.sub2
    }

    /// Pair with the subgroups exchanged.
    pub fn swapped(&self) -> Self {
        CampaignPair {
            sub1: self.sub2,
            sub2: self.sub1,
        }
    }

    /// Total size of the unified target group.
    pub fn target_total(&self) -> u64 {
        self.sub1.target_size + self.sub2.target_size
    }

    /// Total size of the unified control group.
    pub fn control_total(&self) -> u64 {
        self.sub1.control_size + self.sub2.control_size
    }

    /// Responses in the unified target group.
    pub fn target_responses_total(&self) -> u64 {
        self.sub1.target_responses + self.sub2.target_responses
    }

    /// Responses in the unified control group.
    pub fn control_responses_total(&self) -> u64 {
        self.sub1.control_responses + self.sub2.control_responses
    }

    /// Sum of the two subgroup uplift-based responses.
    ///
    /// Provided as a convenience only: with unequal target-control rates
    /// the unified control group is not representative of the unified
    /// target group, so this sum has no per-subgroup interpretation.
    pub fn uplift_responses_total(&self) -> Result<f64> {
        Ok(self.sub1.uplift_responses()? + self.sub2.uplift_responses()?)
    }

    /// Relative mismatch of the two target-control rates:
    /// `|r1 - r2| / max(r1, r2)`.
    pub fn rate_mismatch(&self) -> Result<f64> {
        let r1 = self.sub1.target_control_rate()?;
        let r2 = self.sub2.target_control_rate()?;
        let hi = if r1 > r2 { r1 } else { r2 };
        Ok(libm::fabs(r1 - r2) / hi)
    }

    /// Pair with every count multiplied by `m`.
    pub fn scaled(&self, m: u64) -> Self {
        CampaignPair {
            sub1: self.sub1.scaled(m),
            sub2: self.sub2.scaled(m),
        }
    }

    /// Computes all derived estimates; see [`DerivedEstimates`].
    ///
    /// Errors with [`Error::DegenerateGroup`] if any of the four groups
    /// is empty. Boundary response rates (0 or 1) are allowed here and
    /// only flagged; the tests decide whether they are fatal.
    pub fn derive_estimates(&self) -> Result<DerivedEstimates> {
        DerivedEstimates::from_pair(self)
    }
}

/// Estimates derived from a [`CampaignPair`]: per-subgroup and pooled
/// response rates, uplift-based responses `l_i` with their expectation
/// and variance estimates under the equal-uplift null, and the two
/// norming terms of the net chi-square statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedEstimates {
    /// Estimated target response probabilities per subgroup.
    pub target_rates: [f64; 2],
    /// Estimated control response probabilities per subgroup.
    pub control_rates: [f64; 2],
    /// Response rate of the unified target group.
    pub pooled_target_rate: f64,
    /// Control response rate pooled with target-group weights
    /// (`n_i / n`), which keeps the estimate unbiased when the
    /// target-control rates of the subgroups differ.
    pub weighted_control_rate: f64,
    /// Control response rate pooled with its own group sizes
    /// (`a_C / k`); only meaningful under equal target-control rates.
    pub natural_control_rate: f64,
    /// Uplift-based responses `l_i`.
    pub uplift_responses: [f64; 2],
    /// Estimated expectation of `l_i` under the equal-uplift null,
    /// `n_i (pooled_target_rate - weighted_control_rate)`.
    pub null_expectations: [f64; 2],
    /// Estimated variance of `l_i` from subgroup-specific rates.
    pub variances: [f64; 2],
    /// Cross-weighted average of the per-subgroup variance brackets.
    pub weight_norm: f64,
    /// Cross-weighted average of their reciprocals.
    pub precision_norm: f64,
    /// True when any estimated rate is exactly 0 or 1.
    pub boundary_rate: bool,
}

impl DerivedEstimates {
    fn from_pair(pair: &CampaignPair) -> Result<Self> {
        let (s1, s2) = (pair.sub1(), pair.sub2());
        for (label, size) in [
            ("target group 1", s1.target_size),
            ("control group 1", s1.control_size),
            ("target group 2", s2.target_size),
            ("control group 2", s2.control_size),
        ] {
            if size == 0 {
                return Err(Error::DegenerateGroup(format!("{label} is empty")));
            }
        }

        let n1 = s1.target_size as f64;
        let n2 = s2.target_size as f64;
        let k1 = s1.control_size as f64;
        let k2 = s2.control_size as f64;
        let n = n1 + n2;
        let k = k1 + k2;

        let pt = [
            s1.target_responses as f64 / n1,
            s2.target_responses as f64 / n2,
        ];
        let pc = [
            s1.control_responses as f64 / k1,
            s2.control_responses as f64 / k2,
        ];
        let pooled_target_rate = pair.target_responses_total() as f64 / n;
        let weighted_control_rate = n1 / n * pc[0] + n2 / n * pc[1];
        let natural_control_rate = pair.control_responses_total() as f64 / k;

        let uplift_responses = [s1.uplift_responses()?, s2.uplift_responses()?];
        let diff = pooled_target_rate - weighted_control_rate;
        let null_expectations = [n1 * diff, n2 * diff];

        let bracket1 = pt[0] * (1.0 - pt[0]) + n1 / k1 * pc[0] * (1.0 - pc[0]);
        let bracket2 = pt[1] * (1.0 - pt[1]) + n2 / k2 * pc[1] * (1.0 - pc[1]);
        let variances = [n1 * bracket1, n2 * bracket2];
        let weight_norm = n2 / n * bracket1 + n1 / n * bracket2;
        let precision_norm = (n2 / n) / bracket1 + (n1 / n) / bracket2;

        let boundary_rate = pt.iter().chain(pc.iter()).any(|&p| p == 0.0 || p == 1.0);

        Ok(DerivedEstimates {
            target_rates: pt,
            control_rates: pc,
            pooled_target_rate,
            weighted_control_rate,
            natural_control_rate,
            uplift_responses,
            null_expectations,
            variances,
            weight_norm,
            precision_norm,
            boundary_rate,
        })
    }

    /// Centered uplift-based responses `l_i - e_i`.
    pub fn centered(&self) -> [f64; 2] {
        [
            self.uplift_responses[0] - self.null_expectations[0],
            self.uplift_responses[1] - self.null_expectations[1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Gender split of the appointment campaign: women / men rows.
    pub(crate) fn gender_pair() -> CampaignPair {
        CampaignPair::from_counts([81770, 5656, 6391, 373, 85257, 6231, 6699, 443]).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn response_rate_examples() {
        close(response_rate(5656, 81770).unwrap(), 0.0692, 5e-5);
        close(response_rate(443, 6699).unwrap(), 0.0661, 5e-5);
        assert_eq!(response_rate(0, 100).unwrap(), 0.0);
        assert!(matches!(
            response_rate(1, 0),
            Err(Error::DegenerateGroup(_))
        ));
    }

    #[test]
    fn uplift_examples() {
        let women = SubgroupCounts::new(81770, 5656, 6391, 373).unwrap();
        close(women.uplift().unwrap(), 0.0108, 5e-5);
        let same = SubgroupCounts::new(100, 10, 100, 10).unwrap();
        assert_eq!(same.uplift().unwrap(), 0.0);
        let campaign2 = SubgroupCounts::new(44356, 3447, 7987, 492).unwrap();
        close(campaign2.uplift().unwrap(), 0.0161, 5e-5);
    }

    #[test]
    fn uplift_responses_examples() {
        let sub = SubgroupCounts::new(100, 20, 50, 5).unwrap();
        assert_eq!(sub.uplift_responses().unwrap(), 10.0);
        let flat = SubgroupCounts::new(100, 10, 50, 5).unwrap();
        assert_eq!(flat.uplift_responses().unwrap(), 0.0);

        // exact rational value: (5656 * 6391 - 81770 * 373) / 6391
        let women = SubgroupCounts::new(81770, 5656, 6391, 373).unwrap();
        let num = (5656i128 * 6391 - 81770i128 * 373) as f64;
        let oracle = num / 6391.0;
        let got = women.uplift_responses().unwrap();
        close(got, oracle, 1e-9 * oracle.abs());
    }

    #[test]
    fn counts_validated() {
        assert!(SubgroupCounts::new(10, 11, 5, 0).is_err());
        assert!(SubgroupCounts::new(10, 10, 5, 6).is_err());
        assert!(SubgroupCounts::new(0, 0, 0, 0).is_ok());
    }

    #[test]
    fn totals_are_sums() {
        let pair = gender_pair();
        assert_eq!(pair.target_total(), 167_027);
        assert_eq!(pair.control_total(), 13_090);
        assert_eq!(pair.target_responses_total(), 11_887);
        assert_eq!(pair.control_responses_total(), 816);
    }

    #[test]
    fn total_uplift_responses_is_the_sum() {
        let pair = gender_pair();
        let total = pair.uplift_responses_total().unwrap();
        let l1 = pair.sub1().uplift_responses().unwrap();
        let l2 = pair.sub2().uplift_responses().unwrap();
        assert_eq!(total, l1 + l2);
    }

    #[test]
    fn antisymmetry_of_centered_responses() {
        let est = gender_pair().derive_estimates().unwrap();
        let [c1, c2] = est.centered();
        let tol = 1e-9 * c1.abs().max(1.0);
        assert!((c1 + c2).abs() <= tol, "{c1} + {c2}");
    }

    #[test]
    fn symmetric_pair_centers_to_zero() {
        // dyadic counts: every rate is exact in binary, so the centering
        // cancels without round-off
        let sub = SubgroupCounts::new(2048, 128, 256, 8).unwrap();
        let est = CampaignPair::new(sub, sub).derive_estimates().unwrap();
        let [c1, c2] = est.centered();
        assert_eq!(c1, 0.0);
        assert_eq!(c2, 0.0);

        // arbitrary counts still cancel to round-off level
        let sub = SubgroupCounts::new(1000, 100, 100, 8).unwrap();
        let est = CampaignPair::new(sub, sub).derive_estimates().unwrap();
        let [c1, c2] = est.centered();
        assert!(c1.abs() < 1e-9 && c2.abs() < 1e-9);
    }

    #[test]
    fn control_weighting_uses_target_sizes() {
        // equal control rates pool to that rate no matter how lopsided
        // the control sizes are
        let s1 = SubgroupCounts::new(1000, 100, 20, 1).unwrap();
        let s2 = SubgroupCounts::new(3000, 200, 4000, 200).unwrap();
        let est = CampaignPair::new(s1, s2).derive_estimates().unwrap();
        assert_eq!(est.control_rates[0], 0.05);
        assert_eq!(est.control_rates[1], 0.05);
        assert_eq!(est.weighted_control_rate, 0.05);
    }

    #[test]
    fn pooled_target_rate_matches_weighted_form() {
        let est = gender_pair().derive_estimates().unwrap();
        let n1 = 81770.0;
        let n2 = 85257.0;
        let n = n1 + n2;
        let weighted = n1 / n * est.target_rates[0] + n2 / n * est.target_rates[1];
        close(est.pooled_target_rate, weighted, 1e-15);
    }

    #[test]
    fn scaling_counts_scales_linear_quantities() {
        let pair = CampaignPair::from_counts([400, 37, 50, 3, 300, 21, 40, 2]).unwrap();
        let est = pair.derive_estimates().unwrap();
        let est4 = pair.scaled(4).derive_estimates().unwrap();
        for i in 0..2 {
            close(est4.target_rates[i], est.target_rates[i], 1e-12);
            close(est4.control_rates[i], est.control_rates[i], 1e-12);
            close(
                est4.uplift_responses[i],
                4.0 * est.uplift_responses[i],
                1e-9,
            );
            close(
                est4.null_expectations[i],
                4.0 * est.null_expectations[i],
                1e-9,
            );
            close(est4.variances[i], 4.0 * est.variances[i], 1e-9);
        }
        close(est4.weight_norm, est.weight_norm, 1e-12);
        close(est4.precision_norm, est.precision_norm, 1e-12);
    }

    #[test]
    fn boundary_rates_flagged_not_fatal() {
        let sub = SubgroupCounts::new(10, 0, 10, 5).unwrap();
        let other = SubgroupCounts::new(10, 5, 10, 5).unwrap();
        let est = CampaignPair::new(sub, other).derive_estimates().unwrap();
        assert!(est.boundary_rate);
        // target bracket vanishes, control bracket survives: 10 * 0.25
        assert_eq!(est.variances[0], 2.5);
    }

    #[test]
    fn empty_groups_rejected() {
        let sub = SubgroupCounts::new(0, 0, 10, 5).unwrap();
        let other = SubgroupCounts::new(10, 5, 10, 5).unwrap();
        assert!(matches!(
            CampaignPair::new(sub, other).derive_estimates(),
            Err(Error::DegenerateGroup(_))
        ));
    }
}
