//! Maintainability Index variants and the Red/Yellow/Green banding.
//!
//! | variant         | logarithm | comment term            | range      |
//! |-----------------|-----------|-------------------------|------------|
//! | `Coleman`       | ln        | none                    | unbounded  |
//! | `Sei`           | log2      | `50 sin(sqrt(2.4 C))`   | unbounded  |
//! | `Radon`         | ln        | `50 sin(sqrt(2.4 C))`   | `[0, 100]` |
//! | `VisualStudio`  | ln        | none                    | `[0, 100]` |
//!
//! The clamped variants rescale the raw body by `100 / 171` before clamping.
//! `C` is the comment-line fraction in `[0, 1]`; the sine argument is in radians.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MiError {
    #[error("Halstead volume must be positive and finite, got {0}")]
    NonPositiveVolume(f64),
    #[error("lines of code must be positive and finite, got {0}")]
    NonPositiveLoc(f64),
    #[error("cyclomatic complexity must be non-negative and finite, got {0}")]
    NegativeComplexity(f64),
    #[error("variant {0} requires the comment fraction")]
    MissingComments(MiVariant),
    #[error("comment fraction must lie in [0, 1], got {0}")]
    CommentOutOfRange(f64),
    #[error("variant {0} is unclamped and cannot be banded")]
    UnclampedVariant(MiVariant),
    #[error("score {0} is outside [0, 100]")]
    ScoreOutOfRange(f64),
    #[error("unknown MI variant `{0}`")]
    UnknownVariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiVariant {
    Coleman,
    Sei,
    Radon,
    VisualStudio,
}

impl MiVariant {
    pub const ALL: [MiVariant; 4] = [
        MiVariant::Coleman,
        MiVariant::Sei,
        MiVariant::Radon,
        MiVariant::VisualStudio,
    ];

    pub fn is_clamped(self) -> bool {
        matches!(self, MiVariant::Radon | MiVariant::VisualStudio)
    }

    pub fn needs_comments(self) -> bool {
        matches!(self, MiVariant::Sei | MiVariant::Radon)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MiVariant::Coleman => "coleman",
            MiVariant::Sei => "sei",
            MiVariant::Radon => "radon",
            MiVariant::VisualStudio => "visual_studio",
        }
    }
}

impl fmt::Display for MiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MiVariant {
    type Err = MiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "coleman" | "original" | "eq1" => Ok(MiVariant::Coleman),
            "sei" | "eq2" => Ok(MiVariant::Sei),
            "radon" | "eq3" => Ok(MiVariant::Radon),
            "visual_studio" | "vs" | "eq4" => Ok(MiVariant::VisualStudio),
            _ => Err(MiError::UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    Red,
    Yellow,
    Green,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Band::Red => "Red",
            Band::Yellow => "Yellow",
            Band::Green => "Green",
        };
        f.write_str(s)
    }
}

/// Inputs to every MI formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiInputs {
    /// Halstead volume `V`.
    pub volume: f64,
    /// Cyclomatic complexity `G`.
    pub cyclomatic: f64,
    /// Lines of code `L`.
    pub loc: f64,
    /// Comment-line fraction `C` in `[0, 1]`.
    pub comments: Option<f64>,
}

impl MiInputs {
    pub fn new(volume: f64, cyclomatic: f64, loc: f64) -> Self {
        Self {
            volume,
            cyclomatic,
            loc,
            comments: None,
        }
    }

    pub fn with_comments(mut self, c: f64) -> Self {
        self.comments = Some(c);
        self
    }

    fn check_vgl(&self) -> Result<(), MiError> {
        if !(self.volume > 0.0 && self.volume.is_finite()) {
            return Err(MiError::NonPositiveVolume(self.volume));
        }
        if !(self.loc > 0.0 && self.loc.is_finite()) {
            return Err(MiError::NonPositiveLoc(self.loc));
        }
        if !(self.cyclomatic >= 0.0 && self.cyclomatic.is_finite()) {
            return Err(MiError::NegativeComplexity(self.cyclomatic));
        }
        Ok(())
    }

    fn comment_fraction(&self, variant: MiVariant) -> Result<f64, MiError> {
        let c = self.comments.ok_or(MiError::MissingComments(variant))?;
        if !(0.0..=1.0).contains(&c) {
            return Err(MiError::CommentOutOfRange(c));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiScore {
    pub value: f64,
    pub variant: MiVariant,
    /// Present only for the clamped variants.
    pub band: Option<Band>,
}

fn comment_bonus(c: f64) -> f64 {
    50.0 * (2.4 * c).sqrt().sin()
}

fn coleman_body(i: &MiInputs) -> f64 {
    171.0 - 5.2 * i.volume.ln() - 0.23 * i.cyclomatic - 16.2 * i.loc.ln()
}

fn normalize_clamp(body: f64) -> f64 {
    (body * 100.0 / 171.0).clamp(0.0, 100.0)
}

/// `171 - 5.2 ln V - 0.23 G - 16.2 ln L`. May be negative.
pub fn mi_coleman(inputs: &MiInputs) -> Result<MiScore, MiError> {
    inputs.check_vgl()?;
    Ok(MiScore {
        value: coleman_body(inputs),
        variant: MiVariant::Coleman,
        band: None,
    })
}

/// SEI derivative with base-2 logarithms and the comment bonus. Unclamped.
pub fn mi_sei(inputs: &MiInputs) -> Result<MiScore, MiError> {
    inputs.check_vgl()?;
    let c = inputs.comment_fraction(MiVariant::Sei)?;
    let value = 171.0 - 5.2 * inputs.volume.log2() - 0.23 * inputs.cyclomatic
        - 16.2 * inputs.loc.log2()
        + comment_bonus(c);
    Ok(MiScore {
        value,
        variant: MiVariant::Sei,
        band: None,
    })
}

/// Rescaled-and-clamped variants (`Radon`, `VisualStudio`), banded.
pub fn mi_clamped(inputs: &MiInputs, variant: MiVariant) -> Result<MiScore, MiError> {
    inputs.check_vgl()?;
    let body = match variant {
        MiVariant::VisualStudio => coleman_body(inputs),
        MiVariant::Radon => {
            let c = inputs.comment_fraction(variant)?;
            coleman_body(inputs) + comment_bonus(c)
        }
        other => return Err(MiError::UnclampedVariant(other)),
    };
    let value = normalize_clamp(body);
    Ok(MiScore {
        value,
        variant,
        band: Some(classify_band(value)?),
    })
}

/// Dispatches to the formula for `variant`.
pub fn mi_score(inputs: &MiInputs, variant: MiVariant) -> Result<MiScore, MiError> {
    match variant {
        MiVariant::Coleman => mi_coleman(inputs),
        MiVariant::Sei => mi_sei(inputs),
        MiVariant::Radon | MiVariant::VisualStudio => mi_clamped(inputs, variant),
    }
}

/// `[0,10)` Red, `[10,20)` Yellow, `[20,100]` Green.
pub fn classify_band(score: f64) -> Result<Band, MiError> {
    if !(0.0..=100.0).contains(&score) {
        return Err(MiError::ScoreOutOfRange(score));
    }
    Ok(if score < 10.0 {
        Band::Red
    } else if score < 20.0 {
        Band::Yellow
    } else {
        Band::Green
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent evaluation with literal constants, written out term by term.
    fn eq1(v: f64, g: f64, l: f64) -> f64 {
        let ln_v = v.ln();
        let ln_l = l.ln();
        171.0 - (5.2 * ln_v) - (0.23 * g) - (16.2 * ln_l)
    }

    #[test]
    fn coleman_fixtures() {
        let s = mi_coleman(&MiInputs::new(1.0, 0.0, 1.0)).unwrap();
        assert_eq!(s.value, 171.0);
        assert!(s.band.is_none());
        let s = mi_coleman(&MiInputs::new(100.0, 10.0, 1000.0)).unwrap();
        assert!((s.value - 32.8475).abs() < 1e-4, "{}", s.value);
        assert!((s.value - eq1(100.0, 10.0, 1000.0)).abs() < 1e-12);
        assert_eq!(
            mi_coleman(&MiInputs::new(0.0, 1.0, 1.0)),
            Err(MiError::NonPositiveVolume(0.0))
        );
        assert!(matches!(
            mi_coleman(&MiInputs::new(1.0, 1.0, 0.0)),
            Err(MiError::NonPositiveLoc(_))
        ));
    }

    #[test]
    fn sei_fixtures() {
        let s = mi_sei(&MiInputs::new(1.0, 0.0, 1.0).with_comments(0.0)).unwrap();
        assert_eq!(s.value, 171.0);
        let s = mi_sei(&MiInputs::new(100.0, 10.0, 1000.0).with_comments(0.0)).unwrap();
        assert!((s.value + 27.2938).abs() < 1e-4, "{}", s.value);
        assert_eq!(
            mi_sei(&MiInputs::new(100.0, 10.0, 1000.0)),
            Err(MiError::MissingComments(MiVariant::Sei))
        );
        assert!(matches!(
            mi_sei(&MiInputs::new(1.0, 0.0, 1.0).with_comments(1.5)),
            Err(MiError::CommentOutOfRange(_))
        ));
    }

    #[test]
    fn clamped_fixtures() {
        let s = mi_clamped(&MiInputs::new(1.0, 0.0, 1.0), MiVariant::VisualStudio).unwrap();
        assert_eq!(s.value, 100.0);
        assert_eq!(s.band, Some(Band::Green));

        let s = mi_clamped(&MiInputs::new(100.0, 10.0, 1000.0), MiVariant::VisualStudio).unwrap();
        assert!((s.value - 19.2091).abs() < 1e-4, "{}", s.value);
        assert_eq!(s.band, Some(Band::Yellow));

        let s = mi_clamped(&MiInputs::new(100.0, 10.0, 1e12), MiVariant::VisualStudio).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.band, Some(Band::Red));

        assert_eq!(
            mi_clamped(&MiInputs::new(1.0, 0.0, 1.0), MiVariant::Radon),
            Err(MiError::MissingComments(MiVariant::Radon))
        );
        assert_eq!(
            mi_clamped(&MiInputs::new(1.0, 0.0, 1.0), MiVariant::Coleman),
            Err(MiError::UnclampedVariant(MiVariant::Coleman))
        );
    }

    #[test]
    fn radon_includes_comment_bonus() {
        let base = MiInputs::new(500.0, 5.0, 200.0);
        let vs = mi_clamped(&base, MiVariant::VisualStudio).unwrap().value;
        let r0 = mi_clamped(&base.with_comments(0.0), MiVariant::Radon).unwrap().value;
        let r = mi_clamped(&base.with_comments(0.25), MiVariant::Radon).unwrap().value;
        assert!((vs - r0).abs() < 1e-12);
        let expected = (eq1(500.0, 5.0, 200.0) + 50.0 * (0.6f64).sqrt().sin()) * 100.0 / 171.0;
        assert!((r - expected).abs() < 1e-12);
    }

    #[test]
    fn bands() {
        assert_eq!(classify_band(15.0), Ok(Band::Yellow));
        assert_eq!(classify_band(20.0), Ok(Band::Green));
        assert_eq!(classify_band(0.0), Ok(Band::Red));
        assert_eq!(classify_band(9.999), Ok(Band::Red));
        assert_eq!(classify_band(10.0), Ok(Band::Yellow));
        assert_eq!(classify_band(100.0), Ok(Band::Green));
        assert!(classify_band(-0.1).is_err());
        assert!(classify_band(100.5).is_err());
        assert!(classify_band(f64::NAN).is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("visual-studio".parse::<MiVariant>(), Ok(MiVariant::VisualStudio));
        assert_eq!("eq1".parse::<MiVariant>(), Ok(MiVariant::Coleman));
        assert!("foo".parse::<MiVariant>().is_err());
    }

    fn inputs() -> impl Strategy<Value = (f64, f64, f64, f64)> {
        (1e-3f64..1e6, 0.0f64..500.0, 1.0f64..1e6, 0.0f64..=1.0)
    }

    proptest! {
        #[test]
        fn visual_studio_is_rescaled_coleman((v, g, l, _c) in inputs()) {
            let i = MiInputs::new(v, g, l);
            let vs = mi_clamped(&i, MiVariant::VisualStudio).unwrap().value;
            let col = mi_coleman(&i).unwrap().value;
            prop_assert!((vs - (col * 100.0 / 171.0).clamp(0.0, 100.0)).abs() <= 1e-12);
        }

        #[test]
        fn clamped_in_range((v, g, l, c) in inputs()) {
            let i = MiInputs::new(v, g, l).with_comments(c);
            for variant in [MiVariant::Radon, MiVariant::VisualStudio] {
                let s = mi_clamped(&i, variant).unwrap();
                prop_assert!((0.0..=100.0).contains(&s.value));
                prop_assert_eq!(s.band, Some(classify_band(s.value).unwrap()));
            }
        }

        #[test]
        fn monotone_in_each_input((v, g, l, c) in inputs(), dv in 0.0f64..1e3, dg in 0.0f64..50.0, dl in 0.0f64..1e3, dc in 0.0f64..0.5) {
            let base = MiInputs::new(v, g, l).with_comments(c);
            let c2 = (c + dc).min(1.0);
            for variant in MiVariant::ALL {
                let s = mi_score(&base, variant).unwrap().value;
                let sv = mi_score(&MiInputs { volume: v + dv, ..base }, variant).unwrap().value;
                let sg = mi_score(&MiInputs { cyclomatic: g + dg, ..base }, variant).unwrap().value;
                let sl = mi_score(&MiInputs { loc: l + dl, ..base }, variant).unwrap().value;
                let sc = mi_score(&base.with_comments(c2), variant).unwrap().value;
                prop_assert!(sv <= s + 1e-9);
                prop_assert!(sg <= s + 1e-9);
                prop_assert!(sl <= s + 1e-9);
                prop_assert!(sc >= s - 1e-9);
            }
        }
    }
}
