//! Three-term Sellmeier glasses loaded from versioned data files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FUSED_SILICA_JSON: &str = include_str!("../../data/sellmeier/fused_silica_malitson.json");
const GERMANIA_JSON: &str = include_str!("../../data/sellmeier/germania_fleming.json");
const GEO2_FAMILY_JSON: &str = include_str!("../../data/sellmeier/geo2_silica_family.json");

/// `n^2(λ) = 1 + Σ b_i λ² / (λ² - l_i)` with λ in micrometres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierMaterial {
    pub name: String,
    pub b: [f64; 3],
    /// Resonance wavelengths squared, μm².
    pub l_um2: [f64; 3],
    pub valid_um: [f64; 2],
    #[serde(default)]
    pub citation: String,
}

impl SellmeierMaterial {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn fused_silica() -> Self {
        Self::from_json(FUSED_SILICA_JSON).expect("bundled silica data is valid")
    }

    pub fn germania() -> Self {
        Self::from_json(GERMANIA_JSON).expect("bundled germania data is valid")
    }

    fn validate(&self) -> Result<()> {
        let [lo, hi] = self.valid_um;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::InvalidDispersion(format!(
                "{}: invalid validity window [{lo}, {hi}] um",
                self.name
            )));
        }
        if self.b.iter().chain(&self.l_um2).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDispersion(format!(
                "{}: non-finite coefficient",
                self.name
            )));
        }
        Ok(())
    }

    /// `n²` without range checks.
    fn index_squared(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        1.0 + self
            .b
            .iter()
            .zip(&self.l_um2)
            .map(|(b, l)| b * l2 / (l2 - l))
            .sum::<f64>()
    }

    /// Refractive index at a vacuum wavelength in micrometres.
    pub fn index(&self, lambda_um: f64) -> Result<f64> {
        let [lo, hi] = self.valid_um;
        if !(lambda_um >= lo && lambda_um <= hi) {
            return Err(Error::OutOfRange {
                value: lambda_um,
                min: lo,
                max: hi,
            });
        }
        let n2 = self.index_squared(lambda_um);
        if n2 <= 0.0 {
            return Err(Error::NegativeRadicand(n2));
        }
        Ok(n2.sqrt())
    }
}

/// Free-function form of [`SellmeierMaterial::index`].
pub fn sellmeier_index(mat: &SellmeierMaterial, lambda_um: f64) -> Result<f64> {
    mat.index(lambda_um)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    pub mole_fraction: f64,
    pub b: [f64; 3],
    pub l_um2: [f64; 3],
}

/// Binary glass family tabulated at several compositions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierFamily {
    pub name: String,
    pub citation: String,
    pub valid_um: [f64; 2],
    pub compositions: Vec<Composition>,
}

impl SellmeierFamily {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if f.compositions.len() < 2
            || f
                .compositions
                .windows(2)
                .any(|w| w[1].mole_fraction <= w[0].mole_fraction)
        {
            return Err(Error::InvalidDispersion(format!(
                "{}: need >= 2 compositions in increasing molar fraction",
                f.name
            )));
        }
        Ok(f)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// GeO₂–SiO₂ binary glasses.
    pub fn geo2_silica() -> Self {
        Self::from_json(GEO2_FAMILY_JSON).expect("bundled GeO2 family data is valid")
    }

    /// Material at molar fraction `x`, coefficients interpolated linearly
    /// between the bracketing tabulated compositions.
    pub fn at_fraction(&self, x: f64) -> Result<SellmeierMaterial> {
        let first = self.compositions[0].mole_fraction;
        let last = self.compositions[self.compositions.len() - 1].mole_fraction;
        if !(x >= first && x <= last) {
            return Err(Error::OutOfRange {
                value: x,
                min: first,
                max: last,
            });
        }
        let hi = self
            .compositions
            .iter()
            .position(|c| c.mole_fraction >= x)
            .unwrap_or(self.compositions.len() - 1)
            .max(1);
        let (a, b) = (&self.compositions[hi - 1], &self.compositions[hi]);
        let t = (x - a.mole_fraction) / (b.mole_fraction - a.mole_fraction);
        let lerp = |p: &[f64; 3], q: &[f64; 3]| -> [f64; 3] {
            [0, 1, 2].map(|i| p[i] + t * (q[i] - p[i]))
        };
        Ok(SellmeierMaterial {
            name: format!("{} ({:.1} mol%)", self.name, 100.0 * x),
            b: lerp(&a.b, &b.b),
            l_um2: lerp(&a.l_um2, &b.l_um2),
            valid_um: self.valid_um,
            citation: self.citation.clone(),
        })
    }
}
