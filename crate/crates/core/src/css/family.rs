//! Code families, hypergraph products and rate adjustment.

use num::rational::Ratio;
use thiserror::Error;

use super::{CodeError, CssCode, ValidationReport};
use crate::gf2::BitMatrix;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("family has no levels")]
    Empty,
    #[error("hypothesis violated: {}", .0.join("; "))]
    Hypothesis(Vec<String>),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// A sequence of CSS codes indexed by level `r = 1, 2, …`.
#[derive(Debug, Clone)]
pub struct CodeFamily {
    pub name: String,
    pub levels: Vec<CssCode>,
    /// Rate constant: `m_r ≥ alpha · n_r`.
    pub alpha: f64,
    /// Distance fraction: `d_r ≥ beta · n_r` where the distance is known exactly.
    pub beta: f64,
    /// Doubling `m_r = 2 m_{r−1}` is required only for `r > r0`.
    pub r0: usize,
    pub provenance: String,
}

impl CodeFamily {
    /// Builds a family and fills `alpha` and `beta` with the smallest ratios seen.
    pub fn from_levels(name: impl Into<String>, levels: Vec<CssCode>, r0: usize, provenance: impl Into<String>) -> Self {
        let alpha = levels.iter().map(|c| c.m() as f64 / c.n() as f64).fold(f64::INFINITY, f64::min);
        let beta = levels
            .iter()
            .map(|c| c.distance())
            .zip(&levels)
            .map(|(d, c)| d.value.min(c.n()) as f64 / c.n() as f64)
            .fold(f64::INFINITY, f64::min);
        Self { name: name.into(), levels, alpha, beta, r0, provenance: provenance.into() }
    }

    /// Code at level `r` (1-based).
    pub fn level(&self, r: usize) -> &CssCode {
        assert!(r >= 1 && r <= self.levels.len(), "level {r} out of range 1..={}", self.levels.len());
        &self.levels[r - 1]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Logical qubit count at level `r`.
    pub fn m(&self, r: usize) -> usize {
        self.level(r).m()
    }

    /// Per-level code checks plus the family invariants.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (i, code) in self.levels.iter().enumerate() {
            for c in code.validate().checks {
                report.push(format!("level{}/{}", i + 1, c.name), c.passed, c.detail);
            }
        }
        let Some(first) = self.levels.first() else {
            report.push("nonempty", false, "no levels");
            return report;
        };
        report.push(
            "level1_trivial",
            first.n() == 1 && first.m() == 1 && first.is_trivial(),
            format!("level 1 is [[{},{}]]", first.n(), first.m()),
        );
        for r in 2..=self.depth() {
            if r > self.r0 {
                let ok = self.m(r) == 2 * self.m(r - 1);
                report.push(format!("doubling/r{r}"), ok, format!("m_{r} = {}, m_{} = {}", self.m(r), r - 1, self.m(r - 1)));
            }
        }
        for r in 1..=self.depth() {
            let c = self.level(r);
            let ok = c.m() as f64 >= self.alpha * c.n() as f64 - 1e-12;
            report.push(format!("rate/r{r}"), ok, format!("m = {}, alpha n = {:.6}", c.m(), self.alpha * c.n() as f64));
            let d = c.distance();
            if d.exact {
                let ok = d.value as f64 >= self.beta * c.n() as f64 - 1e-12;
                report.push(format!("distance/r{r}"), ok, format!("d = {} (exact), beta n = {:.6}", d.value, self.beta * c.n() as f64));
            }
        }
        report
    }

    /// Built-in families by name: `toy` and `steane`.
    pub fn builtin(name: &str) -> Option<CodeFamily> {
        match name {
            "toy" => Some(Self::toy()),
            "steane" => Some(Self::steane_variant()),
            _ => None,
        }
    }

    /// `[[1,1,1]]`, `[[4,2,2]]`, a frozen hypergraph product with `m = 4` and one with `m = 8`.
    pub fn toy() -> CodeFamily {
        let h5 = hamming_like_checks(5);
        let h6 = hamming_like_checks(6);
        let h7 = hamming_like_checks(7);
        let base = CodeFamily::from_levels(
            "toy-base",
            vec![
                CssCode::trivial(),
                CssCode::four_two_two(),
                build_hgp(&h5, &h6).expect("hgp(5,6)"),
                build_hgp(&h7, &h5).expect("hgp(7,5)"),
            ],
            4,
            "trivial, [[4,2,2]], HGP([5,2,3],[6,3,3]), HGP([7,4,3],[5,2,3])",
        );
        let mut fam = build_family_rate_adjusted(&base).expect("toy base satisfies the rate hypotheses");
        fam.name = "toy".into();
        fam
    }

    /// `[[1,1,1]]` followed by Steane `[[7,1,3]]`; doubling is not claimed.
    pub fn steane_variant() -> CodeFamily {
        CodeFamily::from_levels("steane", vec![CssCode::trivial(), CssCode::steane()], 2, "trivial, Steane [[7,1,3]]")
    }
}

/// Parity checks with 3 rows whose columns are the first `k` nonzero 3-bit
/// words in the order 1, 2, 4, 3, 5, 6, 7. Distinct nonzero columns give distance ≥ 3.
pub fn hamming_like_checks(k: usize) -> BitMatrix {
    const ORDER: [u8; 7] = [1, 2, 4, 3, 5, 6, 7];
    assert!((1..=7).contains(&k));
    let mut h = BitMatrix::zeros(3, k);
    for (j, &c) in ORDER[..k].iter().enumerate() {
        for i in 0..3 {
            if (c >> i) & 1 == 1 {
                h.set(i, j, true);
            }
        }
    }
    h
}

/// Hypergraph product: `H_X = [h1 ⊗ I | I ⊗ h2ᵀ]`, `H_Z = [I ⊗ h2 | h1ᵀ ⊗ I]`.
pub fn build_hgp(h1: &BitMatrix, h2: &BitMatrix) -> Result<CssCode, CodeError> {
    let (r1, n1) = (h1.nrows(), h1.ncols());
    let (r2, n2) = (h2.nrows(), h2.ncols());
    let hx = h1.kron(&BitMatrix::identity(n2)).hstack(&BitMatrix::identity(r1).kron(&h2.transpose()))?;
    let hz = BitMatrix::identity(n1).kron(h2).hstack(&h1.transpose().kron(&BitMatrix::identity(r2)))?;
    CssCode::new(format!("hgp({r1}x{n1},{r2}x{n2})"), hx, hz)
}

/// Keeps the first `keep` logical qubits and freezes the rest to `|0⟩` by
/// promoting their `L_Z` rows to Z-checks.
pub fn freeze_logicals(code: &CssCode, keep: usize) -> Result<CssCode, CodeError> {
    assert!(keep <= code.m());
    let frozen: Vec<usize> = (keep..code.m()).collect();
    let kept: Vec<usize> = (0..keep).collect();
    let hz = code.hz().vstack(&code.lz().select_rows(&frozen))?;
    let out = CssCode::from_parts(
        format!("{}/m{keep}", code.name()),
        code.hx().clone(),
        hz,
        code.lx().select_rows(&kept),
        code.lz().select_rows(&kept),
    );
    Ok(out)
}

/// Re-derives a family with exactly `2^s` logical qubits at level `s + 1`.
///
/// For each `s`, the first base level with `m_r ≥ 2^s` is used, freezing its
/// highest-index logical qubits. The returned `alpha` is `alpha / C1` with
/// `C1 = max n_r / n_{r−1}`.
pub fn build_family_rate_adjusted(base: &CodeFamily) -> Result<CodeFamily, FamilyError> {
    if base.levels.is_empty() {
        return Err(FamilyError::Empty);
    }
    let mut violations = Vec::new();
    for r in 1..=base.depth() {
        let c = base.level(r);
        if (c.m() as f64) < base.alpha * c.n() as f64 - 1e-12 {
            violations.push(format!("level {r}: m = {} < alpha n = {}", c.m(), base.alpha * c.n() as f64));
        }
        if r > 1 && c.m() <= base.m(r - 1) {
            violations.push(format!("level {r}: m = {} does not grow past m_{} = {}", c.m(), r - 1, base.m(r - 1)));
        }
    }
    if base.level(1).m() == 0 {
        violations.push("level 1 encodes no logical qubit".into());
    }
    if !violations.is_empty() {
        return Err(FamilyError::Hypothesis(violations));
    }
    let c1 = (2..=base.depth())
        .map(|r| Ratio::new(base.level(r).n(), base.level(r - 1).n()))
        .max()
        .unwrap_or_else(|| Ratio::from_integer(1))
        .max(Ratio::from_integer(1));
    let c1f = *c1.numer() as f64 / *c1.denom() as f64;

    let mut levels = Vec::new();
    for s in 0.. {
        let target = 1usize << s;
        let Some(r) = (1..=base.depth()).find(|&r| base.m(r) >= target) else {
            break;
        };
        let code = base.level(r);
        let code = if code.m() == target { code.clone() } else { freeze_logicals(code, target)? };
        levels.push(code);
        if s >= 62 {
            break;
        }
    }
    Ok(CodeFamily {
        name: format!("{}-adjusted", base.name),
        levels,
        alpha: base.alpha / c1f,
        beta: base.beta,
        r0: 1,
        provenance: format!("rate-adjusted from: {}", base.provenance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hgp_small_cases_validate() {
        let rep2 = BitMatrix::from_strs(2, &["11"]);
        let c = build_hgp(&rep2, &rep2).unwrap();
        assert!(c.validate().all_passed());
        let rep3 = BitMatrix::from_strs(3, &["110", "011"]);
        let c = build_hgp(&rep3, &rep3).unwrap();
        assert!(c.validate().all_passed());
        assert_eq!(c.n(), 13);
        assert_eq!(c.m(), c.n() - c.hx().rank() - c.hz().rank());
        assert_eq!(c.min_distance(5).value, 3);
    }

    #[test]
    fn toy_family_shape() {
        let f = CodeFamily::toy();
        let shape: Vec<(usize, usize)> = f.levels.iter().map(|c| (c.n(), c.m())).collect();
        assert_eq!(shape, vec![(1, 1), (4, 2), (39, 4), (44, 8)]);
        let report = f.validate();
        assert!(report.all_passed(), "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(f.level(3).distance().value, 3);
        assert_eq!(f.level(4).distance().value, 3);
    }

    #[test]
    fn powers_of_two_pass_through() {
        let base = CodeFamily::from_levels(
            "p2",
            vec![CssCode::trivial(), CssCode::four_two_two(), build_hgp(&hamming_like_checks(7), &hamming_like_checks(4)).unwrap()],
            1,
            "test",
        );
        assert_eq!(base.level(3).m(), 4);
        let out = build_family_rate_adjusted(&base).unwrap();
        assert_eq!(out.depth(), 3);
        for r in 1..=3 {
            assert_eq!(out.level(r).hx(), base.level(r).hx());
            assert_eq!(out.level(r).hz(), base.level(r).hz());
        }
    }

    #[test]
    fn freezing_from_three_logicals() {
        // Base m = (3, 18).
        let rep3 = BitMatrix::from_strs(3, &["110", "011"]);
        let a = build_hgp(&rep3, &hamming_like_checks(6)).unwrap();
        assert_eq!(a.m(), 3);
        let spc7 = BitMatrix::from_strs(7, &["1111111"]);
        let b = build_hgp(&hamming_like_checks(6), &spc7).unwrap();
        assert_eq!(b.m(), 18);
        let base = CodeFamily::from_levels("m3", vec![a.clone(), b], 2, "test");
        let out = build_family_rate_adjusted(&base).unwrap();
        let ms: Vec<usize> = out.levels.iter().map(|c| c.m()).collect();
        assert_eq!(ms, vec![1, 2, 4, 8, 16]);
        assert_eq!(out.level(2).n(), a.n());
        for c in &out.levels {
            assert!(c.validate().all_passed());
            assert!(c.hx().mul_transpose(c.hz()).unwrap().is_zero());
        }
    }

    #[test]
    fn hypothesis_violation_reported() {
        let base = CodeFamily::from_levels("bad", vec![CssCode::four_two_two(), CssCode::steane()], 1, "test");
        match build_family_rate_adjusted(&base) {
            Err(FamilyError::Hypothesis(v)) => assert_eq!(v.len(), 1),
            other => panic!("expected hypothesis violation, got {other:?}"),
        }
    }
}
