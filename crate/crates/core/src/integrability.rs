//! Finite classifiers for the published integrability criteria.
//!
//! None of these run a Painlevé expansion; they apply closed criteria to
//! coefficient data.

use serde::{Deserialize, Serialize};

use crate::equations::DnlsCoefficients;
use crate::error::{Error, Result};

/// Default relative tolerance of the Clarkson–Cosgrove equality.
pub const CC_DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcReport {
    pub integrable: bool,
    pub coefficients: DnlsCoefficients,
    /// `½ b (2b - a)`.
    pub required_c: f64,
    pub mismatch: f64,
}

/// `c = ½ b (2b - a)`, compared with a relative tolerance floored at 1.
pub fn clarkson_cosgrove(coeffs: DnlsCoefficients, tol: f64) -> CcReport {
    let DnlsCoefficients { a, b, c } = coeffs;
    let required_c = 0.5 * b * (2.0 * b - a);
    let mismatch = (c - required_c).abs();
    let scale = 1f64.max(c.abs()).max(required_c.abs());
    CcReport {
        integrable: mismatch <= tol * scale,
        coefficients: coeffs,
        required_c,
        mismatch,
    }
}

/// Time dependence of the cubic coupling `F` of the variable-coefficient NLS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "value", rename_all = "kebab-case")]
pub enum CoefficientFamily {
    Constant(f64),
    /// `F = 1/(a + b t)`.
    InverseLinear { a: f64, b: f64 },
    Other(String),
}

impl CoefficientFamily {
    pub fn inverse_linear(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 && b == 0.0 {
            return Err(Error::InvalidParameter("(a, b) must not both vanish".into()));
        }
        Ok(Self::InverseLinear { a, b })
    }
}

/// Painlevé criterion for `i ψ_t + ½ ψ_xx + F |ψ|² ψ = 0`.
pub fn painleve_vnls(family: &CoefficientFamily) -> bool {
    match family {
        CoefficientFamily::Constant(_) => true,
        CoefficientFamily::InverseLinear { a, b } => !(*a == 0.0 && *b == 0.0),
        CoefficientFamily::Other(_) => false,
    }
}

/// Structural tag for a coefficient of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientTag {
    Zero,
    Constant,
    TimeDependent,
}

/// Largest polynomial degree a [`PotentialSpec`] may carry.
pub const MAX_POTENTIAL_DEGREE: u32 = 6;

/// `V(t, x) = Σ c_n(t) x^n` plus an optional driving term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub degree: u32,
    pub c0: CoefficientTag,
    pub c1: CoefficientTag,
    pub c2: CoefficientTag,
    pub driving: bool,
}

impl PotentialSpec {
    pub fn new(
        degree: u32,
        c0: CoefficientTag,
        c1: CoefficientTag,
        c2: CoefficientTag,
        driving: bool,
    ) -> Result<Self> {
        if degree > MAX_POTENTIAL_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "potential degree {degree} exceeds {MAX_POTENTIAL_DEGREE}"
            )));
        }
        let spec = Self {
            degree,
            c0,
            c1,
            c2,
            driving,
        };
        // Tags above the declared degree must vanish.
        let tags = [c0, c1, c2];
        if tags
            .iter()
            .enumerate()
            .any(|(n, t)| n as u32 > degree && *t != CoefficientTag::Zero)
        {
            return Err(Error::InvalidParameter(format!(
                "non-zero coefficient above declared degree {degree}"
            )));
        }
        Ok(spec)
    }

    pub fn zero() -> Self {
        Self {
            degree: 0,
            c0: CoefficientTag::Zero,
            c1: CoefficientTag::Zero,
            c2: CoefficientTag::Zero,
            driving: false,
        }
    }

    /// The `2αx` potential of the non-uniform-medium equation.
    pub fn linear(tag: CoefficientTag) -> Self {
        Self {
            degree: 1,
            c1: tag,
            ..Self::zero()
        }
    }

    /// `ω²(t) x² / 4`.
    pub fn quadratic(tag: CoefficientTag) -> Self {
        Self {
            degree: 2,
            c2: tag,
            ..Self::zero()
        }
    }

    /// Parses `deg=2,c0=zero,c1=const,c2=time,drive=0`.
    pub fn parse(text: &str) -> Result<Self> {
        let p = crate::params::ParamMap::parse(text)?;
        p.ensure_only("potential", &["deg", "degree", "c0", "c1", "c2", "drive", "driving"])?;
        let tag = |key: &str| -> Result<CoefficientTag> {
            match p.get_str(&[key]) {
                None | Some("zero") | Some("0") => Ok(CoefficientTag::Zero),
                Some("const") | Some("constant") => Ok(CoefficientTag::Constant),
                Some("time") | Some("time-dependent") => Ok(CoefficientTag::TimeDependent),
                Some(other) => Err(Error::Parse(format!("bad coefficient tag '{other}' for {key}"))),
            }
        };
        let (c0, c1, c2) = (tag("c0")?, tag("c1")?, tag("c2")?);
        let inferred = if c2 != CoefficientTag::Zero {
            2
        } else if c1 != CoefficientTag::Zero {
            1
        } else {
            0
        };
        let degree = match p.get_str(&["deg", "degree"]) {
            Some(d) => d
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad degree '{d}'")))?,
            None => inferred,
        };
        let driving = match p.get_str(&["drive", "driving"]) {
            None | Some("0") | Some("zero") | Some("false") => false,
            Some("1") | Some("nonzero") | Some("true") => true,
            Some(other) => return Err(Error::Parse(format!("bad driving flag '{other}'"))),
        };
        Self::new(degree, c0, c1, c2, driving)
    }
}

/// Which frame change removes the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapHint {
    Identity,
    AcceleratedFrame,
    Niederer,
    Composite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PotentialVerdict {
    Transformable { hint: MapHint },
    NotTransformable { reason: String },
}

/// A potential can be transformed away iff it is at most quadratic in x and
/// undriven.
pub fn classify_potential(v: &PotentialSpec) -> PotentialVerdict {
    if v.driving {
        return PotentialVerdict::NotTransformable {
            reason: "driving term b(t, x) is non-zero".into(),
        };
    }
    if v.degree > 2 {
        return PotentialVerdict::NotTransformable {
            reason: format!("degree {} in x exceeds 2", v.degree),
        };
    }
    let linear = v.c1 != CoefficientTag::Zero;
    let quadratic = v.c2 != CoefficientTag::Zero;
    let hint = match (linear, quadratic) {
        (false, false) => MapHint::Identity,
        (true, false) => MapHint::AcceleratedFrame,
        (false, true) => MapHint::Niederer,
        (true, true) => MapHint::Composite,
    };
    PotentialVerdict::Transformable { hint }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::EquationSpec;
    use proptest::prelude::*;

    fn cc(a: f64, b: f64, c: f64) -> bool {
        clarkson_cosgrove(DnlsCoefficients::new(a, b, c).unwrap(), CC_DEFAULT_TOL).integrable
    }

    #[test]
    fn current_nls_is_not_integrable() {
        assert!(!cc(-1.0, 1.0, 0.0));
        let r = clarkson_cosgrove(DnlsCoefficients::new(-1.0, 1.0, 0.0).unwrap(), CC_DEFAULT_TOL);
        assert_eq!(r.required_c, 1.5);
    }

    #[test]
    fn sextic_extension_is_integrable() {
        assert!(cc(-1.0, 1.0, 1.5));
    }

    #[test]
    fn b_zero_forces_c_zero() {
        for a in [-3.0, 0.0, 0.5, 7.0] {
            assert!(cc(a, 0.0, 0.0));
            assert!(!cc(a, 0.0, 0.1));
        }
    }

    #[test]
    fn catalog_metadata_agrees_with_classifier() {
        for kappa in [0.5, 1.0, 2.0] {
            for eq in [
                EquationSpec::current(kappa).unwrap(),
                EquationSpec::extended_current(kappa).unwrap(),
                EquationSpec::dnls2(kappa).unwrap(),
            ] {
                let verdict = clarkson_cosgrove(eq.dnls_coefficients().unwrap(), CC_DEFAULT_TOL);
                assert_eq!(Some(verdict.integrable), eq.claimed_integrable(), "{eq}");
            }
        }
        let tnls = EquationSpec::variable_coeff(0.0, 1.0).unwrap();
        assert!(painleve_vnls(&tnls.coefficient_family().unwrap()));
    }

    #[test]
    fn painleve_families() {
        assert!(painleve_vnls(&CoefficientFamily::Constant(4.0)));
        assert!(painleve_vnls(&CoefficientFamily::inverse_linear(0.0, 1.0).unwrap()));
        assert!(!painleve_vnls(&CoefficientFamily::Other(
            "F = 2 kappa^2 d_x theta with x-dependent theta".into()
        )));
        assert!(CoefficientFamily::inverse_linear(0.0, 0.0).is_err());
        for f in [
            CoefficientFamily::Constant(4.0),
            CoefficientFamily::InverseLinear { a: 0.0, b: 1.0 },
            CoefficientFamily::Other("x-dependent".into()),
        ] {
            let text = serde_json::to_string(&f).unwrap();
            assert_eq!(serde_json::from_str::<CoefficientFamily>(&text).unwrap(), f);
        }
    }

    #[test]
    fn potentials() {
        assert_eq!(
            classify_potential(&PotentialSpec::zero()),
            PotentialVerdict::Transformable { hint: MapHint::Identity }
        );
        assert_eq!(
            classify_potential(&PotentialSpec::linear(CoefficientTag::Constant)),
            PotentialVerdict::Transformable {
                hint: MapHint::AcceleratedFrame
            }
        );
        assert_eq!(
            classify_potential(&PotentialSpec::quadratic(CoefficientTag::TimeDependent)),
            PotentialVerdict::Transformable { hint: MapHint::Niederer }
        );
        let both = PotentialSpec::parse("c1=time,c2=const").unwrap();
        assert_eq!(
            classify_potential(&both),
            PotentialVerdict::Transformable {
                hint: MapHint::Composite
            }
        );
        let cubic = PotentialSpec::parse("deg=3,c1=const").unwrap();
        assert!(matches!(
            classify_potential(&cubic),
            PotentialVerdict::NotTransformable { .. }
        ));
        let driven = PotentialSpec::parse("c2=const,drive=1").unwrap();
        assert!(matches!(
            classify_potential(&driven),
            PotentialVerdict::NotTransformable { .. }
        ));
        assert!(PotentialSpec::parse("deg=7").is_err());
        assert!(PotentialSpec::parse("deg=1,c2=const").is_err());
        assert!(PotentialSpec::parse("c3=const").is_err());
    }

    proptest! {
        #[test]
        fn cc_scale_consistency(a in -5.0f64..5.0, b in -5.0f64..5.0, lambda in 0.01f64..50.0,
                                integrable in any::<bool>(), offset in 0.01f64..3.0) {
            let c_req = 0.5 * b * (2.0 * b - a);
            let c = if integrable { c_req } else { c_req + offset };
            let base = cc(a, b, c);
            let scaled = cc(lambda * a, lambda * b, lambda * lambda * c);
            prop_assert_eq!(base, integrable);
            prop_assert_eq!(base, scaled);
        }
    }
}
