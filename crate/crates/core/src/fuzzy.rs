//! Zero-order Takagi–Sugeno–Kang inference over a single input.
//!
//! Each rule reads "if û is U_r then d̂ = D_r". The output is the normalized
//! weighted average of the rule outputs, `d̂(û) = Dᵀ Ψ(û)` with
//! `Ψ_r = w_r / Σ w_s`.

use crate::error::{invalid, Error, Result};

/// Triangular membership degree with corners `a < b < c`.
pub fn mu_tri(u: f64, a: f64, b: f64, c: f64) -> f64 {
    ((u - a) / (b - a)).min((c - u) / (c - b)).max(0.0)
}

/// Trapezoidal membership degree with corners `a < b <= c < d`.
pub fn mu_trap(u: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    ((u - a) / (b - a)).min(1.0).min((d - u) / (d - c)).max(0.0)
}

/// Antecedent fuzzy set of one rule.
///
/// The shoulder variants are trapezoids whose plateau runs off to infinity on
/// one side, so the outermost rules saturate instead of dropping to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
    /// Membership 1 for `u <= c`, ramping to 0 at `d`.
    LeftShoulder { c: f64, d: f64 },
    /// Membership 0 for `u <= a`, ramping to 1 at `b` and beyond.
    RightShoulder { a: f64, b: f64 },
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self> {
        check_corners(&[a, b, c], &[true, true])?;
        Ok(Self::Triangular { a, b, c })
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        check_corners(&[a, b, c, d], &[true, false, true])?;
        Ok(Self::Trapezoidal { a, b, c, d })
    }

    pub fn left_shoulder(c: f64, d: f64) -> Result<Self> {
        check_corners(&[c, d], &[true])?;
        Ok(Self::LeftShoulder { c, d })
    }

    pub fn right_shoulder(a: f64, b: f64) -> Result<Self> {
        check_corners(&[a, b], &[true])?;
        Ok(Self::RightShoulder { a, b })
    }

    pub fn degree(&self, u: f64) -> f64 {
        match *self {
            Self::Triangular { a, b, c } => mu_tri(u, a, b, c),
            Self::Trapezoidal { a, b, c, d } => mu_trap(u, a, b, c, d),
            Self::LeftShoulder { c, d } => ((d - u) / (d - c)).min(1.0).max(0.0),
            Self::RightShoulder { a, b } => ((u - a) / (b - a)).min(1.0).max(0.0),
        }
    }

    /// Abscissa where the membership first reaches 1 (the apex for triangles).
    pub fn modal_point(&self) -> f64 {
        match *self {
            Self::Triangular { b, .. } | Self::Trapezoidal { b, .. } => b,
            Self::LeftShoulder { c, .. } => c,
            Self::RightShoulder { b, .. } => b,
        }
    }
}

// `strict[i]` says whether corners i and i+1 must differ.
fn check_corners(corners: &[f64], strict: &[bool]) -> Result<()> {
    if corners.iter().any(|c| !c.is_finite()) {
        return Err(invalid("corners", "membership corners must be finite"));
    }
    for (pair, &strict) in corners.windows(2).zip(strict) {
        let ok = if strict { pair[0] < pair[1] } else { pair[0] <= pair[1] };
        if !ok {
            return Err(invalid(
                "corners",
                format!("degenerate or unordered corners {corners:?}"),
            ));
        }
    }
    Ok(())
}

/// Ordered set of membership functions over the û universe.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPartition {
    members: Vec<MembershipFunction>,
    centers: Vec<f64>,
}

/// Modal points of the reference rule base.
pub const DEFAULT_CENTERS: [f64; 7] = [-0.5, -0.1, -0.05, 0.0, 0.05, 0.1, 0.5];

/// Seven-rule partition centred on [`DEFAULT_CENTERS`].
pub fn default_partition() -> FuzzyPartition {
    FuzzyPartition::from_centers(&DEFAULT_CENTERS).expect("default centers are valid")
}

impl FuzzyPartition {
    /// Builds the standard overlapping partition: interior triangles with
    /// feet at the neighbouring centers and shoulders on both ends.
    pub fn from_centers(centers: &[f64]) -> Result<Self> {
        check_centers(centers)?;
        let n = centers.len();
        let members = (0..n)
            .map(|r| {
                if r == 0 {
                    MembershipFunction::left_shoulder(centers[0], centers[1])
                } else if r == n - 1 {
                    MembershipFunction::right_shoulder(centers[n - 2], centers[n - 1])
                } else {
                    MembershipFunction::triangular(centers[r - 1], centers[r], centers[r + 1])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            members,
            centers: centers.to_vec(),
        })
    }

    /// Arbitrary members. Coverage is not checked here; see
    /// [`FuzzyPartition::check_coverage`].
    pub fn from_members(members: Vec<MembershipFunction>) -> Result<Self> {
        let centers: Vec<f64> = members.iter().map(|m| m.modal_point()).collect();
        check_centers(&centers)?;
        Ok(Self { members, centers })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn members(&self) -> &[MembershipFunction] {
        &self.members
    }

    pub fn firing_strengths(&self, u: f64) -> Vec<f64> {
        self.members.iter().map(|m| m.degree(u)).collect()
    }

    /// Normalized basis `Ψ(û)`.
    pub fn basis(&self, u: f64) -> Result<Vec<f64>> {
        let mut w = self.firing_strengths(u);
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Coverage(u));
        }
        for wr in &mut w {
            *wr /= total;
        }
        Ok(w)
    }

    /// `d̂(û)` for the given rule outputs.
    pub fn estimate(&self, outputs: &RuleOutputs, u: f64) -> Result<f64> {
        outputs.infer(&self.basis(u)?)
    }

    /// Checks that every sample in `[lo, hi]` fires at least one rule.
    pub fn check_coverage(&self, lo: f64, hi: f64, samples: usize) -> Result<()> {
        let samples = samples.max(2);
        for i in 0..samples {
            let u = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            self.basis(u)?;
        }
        Ok(())
    }
}

fn check_centers(centers: &[f64]) -> Result<()> {
    if centers.len() < 2 {
        return Err(invalid("centers", "at least two rules are required"));
    }
    if centers.iter().any(|c| !c.is_finite()) {
        return Err(invalid("centers", "centers must be finite"));
    }
    if centers.windows(2).any(|p| p[0] >= p[1]) {
        return Err(invalid("centers", "centers must be strictly increasing"));
    }
    Ok(())
}

/// Adjustable rule outputs `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleOutputs(Vec<f64>);

impl RuleOutputs {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("rule outputs"));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    /// Inner product `Dᵀ Ψ`.
    pub fn infer(&self, psi: &[f64]) -> Result<f64> {
        if psi.len() != self.0.len() {
            return Err(Error::LengthMismatch {
                what: "basis",
                expected: self.0.len(),
                got: psi.len(),
            });
        }
        Ok(self.0.iter().zip(psi).map(|(d, p)| d * p).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle_examples() {
        assert_eq!(mu_tri(0.0, -0.05, 0.0, 0.05), 1.0);
        assert_eq!(mu_tri(0.2, -0.05, 0.0, 0.05), 0.0);
        assert!((mu_tri(0.025, -0.05, 0.0, 0.05) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_examples() {
        let shoulder = MembershipFunction::left_shoulder(-0.5, -0.1).unwrap();
        assert_eq!(shoulder.degree(-0.7), 1.0);
        assert_eq!(shoulder.degree(-0.1), 0.0);
        assert!((shoulder.degree(-0.3) - 0.5).abs() < 1e-15);

        assert_eq!(mu_trap(0.5, 0.0, 0.25, 0.75, 1.0), 1.0);
        assert!((mu_trap(0.125, 0.0, 0.25, 0.75, 1.0) - 0.5).abs() < 1e-15);
        assert!((mu_trap(0.875, 0.0, 0.25, 0.75, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(mu_trap(1.5, 0.0, 0.25, 0.75, 1.0), 0.0);
        // b == c collapses to a triangle
        let t = MembershipFunction::trapezoidal(0.0, 0.5, 0.5, 1.0).unwrap();
        assert_eq!(t.degree(0.5), 1.0);
    }

    #[test]
    fn degenerate_corners_rejected() {
        assert!(MembershipFunction::triangular(0.0, 0.0, 1.0).is_err());
        assert!(MembershipFunction::triangular(0.0, 1.0, 1.0).is_err());
        assert!(MembershipFunction::trapezoidal(0.0, 0.0, 0.5, 1.0).is_err());
        assert!(MembershipFunction::trapezoidal(0.0, 0.5, 1.0, 1.0).is_err());
        assert!(MembershipFunction::trapezoidal(0.0, 0.6, 0.5, 1.0).is_err());
        assert!(MembershipFunction::left_shoulder(1.0, 1.0).is_err());
        assert!(MembershipFunction::right_shoulder(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn default_partition_layout() {
        let p = default_partition();
        assert_eq!(p.centers(), &[-0.5, -0.1, -0.05, 0.0, 0.05, 0.1, 0.5]);
        assert_eq!(p.len(), 7);
        assert!(matches!(p.members()[0], MembershipFunction::LeftShoulder { .. }));
        assert!(matches!(p.members()[6], MembershipFunction::RightShoulder { .. }));
    }

    #[test]
    fn firing_and_basis_examples() {
        let p = default_partition();
        assert_eq!(p.firing_strengths(0.0), vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.basis(0.0).unwrap(), vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);

        let w = p.firing_strengths(0.025);
        for (r, wr) in w.iter().enumerate() {
            match r {
                3 | 4 => assert!((wr - 0.5).abs() < 1e-12),
                _ => assert_eq!(*wr, 0.0),
            }
        }
        let psi = p.basis(0.025).unwrap();
        assert!((psi[3] - 0.5).abs() < 1e-12 && (psi[4] - 0.5).abs() < 1e-12);

        for (r, &c) in p.centers().iter().enumerate() {
            assert_eq!(p.firing_strengths(c)[r], 1.0);
        }
        for u in [-10.0, 10.0] {
            let psi = p.basis(u).unwrap();
            let hot = if u < 0.0 { 0 } else { 6 };
            for (r, v) in psi.iter().enumerate() {
                assert_eq!(*v, if r == hot { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn basis_sums_to_one_on_dense_grid() {
        let p = default_partition();
        for i in 0..100_000 {
            let u = -1.0 + 2.0 * i as f64 / 99_999.0;
            let s: f64 = p.basis(u).unwrap().iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn uncovered_input_is_a_coverage_error() {
        let members = vec![
            MembershipFunction::triangular(-1.0, -0.5, 0.0).unwrap(),
            MembershipFunction::triangular(0.5, 1.0, 1.5).unwrap(),
        ];
        let p = FuzzyPartition::from_members(members).unwrap();
        assert_eq!(p.basis(0.25), Err(Error::Coverage(0.25)));
        assert!(p.check_coverage(-1.0, 1.0, 101).is_err());
        assert!(default_partition().check_coverage(-100.0, 100.0, 10_001).is_ok());
    }

    #[test]
    fn bad_centers_rejected() {
        assert!(FuzzyPartition::from_centers(&[0.0]).is_err());
        assert!(FuzzyPartition::from_centers(&[0.0, 0.0, 1.0]).is_err());
        assert!(FuzzyPartition::from_centers(&[0.0, 1.0, f64::NAN]).is_err());
    }

    #[test]
    fn infer_examples() {
        let p = default_partition();
        let zero = RuleOutputs::zeros(7);
        assert_eq!(zero.infer(&p.basis(0.37).unwrap()).unwrap(), 0.0);

        let d = RuleOutputs::from_vec(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]).unwrap();
        let mut onehot = vec![0.0; 7];
        onehot[2] = 1.0;
        assert_eq!(d.infer(&onehot).unwrap(), 0.3);
        let psi = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!((d.infer(&psi).unwrap() - 0.15).abs() < 1e-15);

        assert!(matches!(
            d.infer(&[1.0]),
            Err(Error::LengthMismatch { expected: 7, got: 1, .. })
        ));
        assert!(RuleOutputs::from_vec(vec![f64::NAN]).is_err());
    }

    #[test]
    fn interpolates_exactly_at_centers() {
        let p = default_partition();
        let d = RuleOutputs::from_vec(vec![-0.4, -0.3, 0.2, 0.05, -0.11, 0.9, 0.3]).unwrap();
        for (r, &c) in p.centers().iter().enumerate() {
            assert_eq!(p.estimate(&d, c).unwrap(), d.as_slice()[r]);
        }
    }

    proptest! {
        #[test]
        fn at_most_two_rules_fire(u in -3.0f64..3.0) {
            let p = default_partition();
            let fired = p.firing_strengths(u).iter().filter(|w| **w > 0.0).count();
            prop_assert!((1..=2).contains(&fired));
        }

        #[test]
        fn output_is_convex_combination(
            u in -3.0f64..3.0,
            d in proptest::collection::vec(-1.0f64..1.0, 7),
        ) {
            let p = default_partition();
            let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let y = p.estimate(&RuleOutputs::from_vec(d).unwrap(), u).unwrap();
            prop_assert!(lo - 1e-12 <= y && y <= hi + 1e-12);
        }

        #[test]
        fn reproduces_constants(u in -3.0f64..3.0, k in -2.0f64..2.0) {
            let p = default_partition();
            let y = p.estimate(&RuleOutputs::from_vec(vec![k; 7]).unwrap(), u).unwrap();
            prop_assert!((y - k).abs() <= 1e-12);
        }
    }
}
