use rayon::prelude::*;

use super::family::{MemberKind, TestFamily};
use super::report::ConstantReport;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::functionals::j_functional_1d;
use crate::measures::GridMeasure;
use crate::transport::w2_exact_1d;

/// Members closer than this to the reference in `W₂` are rejected.
pub const MIN_W2: f64 = 1e-12;

/// `J(μ | (ν, A)) / W₂²(ν, μ)` for one family member.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberRatio {
    pub kind: MemberKind,
    pub description: String,
    pub parameter: f64,
    pub w2_squared: f64,
    pub j: f64,
    pub ratio: f64,
    /// Smallest value of the J integrand on the grid.
    pub integrand_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WjEstimate {
    pub report: ConstantReport,
    pub members: Vec<MemberRatio>,
}

impl WjEstimate {
    pub fn minimizer(&self) -> &MemberRatio {
        self.members
            .iter()
            .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .expect("estimates are built from nonempty families")
    }
}

/// Ratios of every member of `family` against `nu`.
pub fn family_ratios(nu: &GridMeasure, a: &VectorField, family: &TestFamily) -> Result<Vec<MemberRatio>> {
    family.check_nonempty()?;
    family
        .members
        .par_iter()
        .map(|m| {
            if !m.measure.same_grid(nu) {
                return Err(Error::GridMismatch);
            }
            let w = w2_exact_1d(nu, &m.measure);
            if !(w > MIN_W2) {
                return Err(Error::InvalidParameter(format!("`{}` is at W2 distance {w:e}", m.description)));
            }
            let j = j_functional_1d(&m.measure, nu, a)?;
            Ok(MemberRatio {
                kind: m.kind,
                description: m.description.clone(),
                parameter: m.parameter,
                w2_squared: w * w,
                j: j.value,
                ratio: j.value / (w * w),
                integrand_min: j.integrand_min,
            })
        })
        .collect()
}

/// Infimum of `J/W₂²` over the family: an upper bound on the best constant
/// `C` in `W₂²(ν, μ) ≤ J(μ | (ν, A))/C`.
pub fn wj_constant_estimate(nu: &GridMeasure, a: &VectorField, family: &TestFamily) -> Result<WjEstimate> {
    let members = family_ratios(nu, a, family)?;
    let best = members.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio)).expect("nonempty");
    let mut report = ConstantReport::estimated(
        "WJ",
        best.ratio,
        format!("upper bound over family {} ({} members)", family.name, members.len()),
    );
    report.minimizer = Some(best.description.clone());
    Ok(WjEstimate { report, members })
}

/// One coordinate of a product measure `ν₁ ⊗ … ⊗ ν_d` with drift
/// `A(x) = (A₁(x₁), …, A_d(x_d))`.
#[derive(Debug, Clone, Copy)]
pub struct ProductFactor<'a> {
    pub nu: &'a GridMeasure,
    pub drift: &'a VectorField,
    pub family: &'a TestFamily,
}

/// Infimum of `J/W₂²` over product members `μ₁ ⊗ … ⊗ μ_d`, where each `μᵢ`
/// is a member of the `i`-th family or `νᵢ` itself. Both `J` and `W₂²` add
/// over coordinates for such pairs.
pub fn wj_product_estimate(factors: &[ProductFactor]) -> Result<WjEstimate> {
    if factors.is_empty() {
        return Err(Error::InvalidParameter("no factors".into()));
    }
    let per_factor = factors
        .iter()
        .map(|f| family_ratios(f.nu, f.drift, f.family))
        .collect::<Result<Vec<_>>>()?;
    let sizes: Vec<usize> = per_factor.iter().map(|m| m.len() + 1).collect();
    let total: usize = sizes.iter().product();
    let members: Vec<MemberRatio> = (1..total)
        .into_par_iter()
        .map(|mut code| {
            let (mut w2, mut j, mut jmin) = (0.0, 0.0, f64::INFINITY);
            let mut parts = Vec::with_capacity(sizes.len());
            let mut first: Option<&MemberRatio> = None;
            for (ratios, size) in per_factor.iter().zip(&sizes) {
                let pick = code % size;
                code /= size;
                if pick == 0 {
                    parts.push("identity".to_string());
                    continue;
                }
                let m = &ratios[pick - 1];
                first.get_or_insert(m);
                w2 += m.w2_squared;
                j += m.j;
                jmin = jmin.min(m.integrand_min);
                parts.push(m.description.clone());
            }
            let first = first.expect("code > 0 selects a member");
            MemberRatio {
                kind: first.kind,
                description: parts.join(" x "),
                parameter: first.parameter,
                w2_squared: w2,
                j,
                ratio: j / w2,
                integrand_min: jmin,
            }
        })
        .collect();
    let best = members.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio)).expect("nonempty");
    let names: Vec<&str> = factors.iter().map(|f| f.family.name.as_str()).collect();
    let mut report = ConstantReport::estimated(
        "WJ",
        best.ratio,
        format!("upper bound over product family {} ({} members)", names.join(" x "), members.len()),
    );
    report.minimizer = Some(best.description.clone());
    Ok(WjEstimate { report, members })
}
