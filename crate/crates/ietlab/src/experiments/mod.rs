//! Experiment pipelines: correlation decay, model fits, the rotation-class
//! dichotomy, special-flow representations and lower-bound certificates.

pub mod correlation;
pub mod fit;
pub mod fixtures;
pub mod lower_bound;
pub mod rotation;

pub use correlation::{cesaro_decay, Correlator, DecaySeries, DEFAULT_PIECE_BUDGET};
pub use fit::{compare_models, fit_decay, DecayFit, DecayModel, ModelComparison};
pub use fixtures::{fixture, fixture_path, golden_interval, golden_rotation, Fixture};
pub use lower_bound::{lower_bound_construct, LowerBoundCertificate, LowerBoundConfig};
pub use rotation::{denjoy_koksma_check, from_tower, golden_tower, rotation_representation, DeviationTable, RotationRepresentation};

use num_rational::BigRational;
use serde::{Deserialize, Serialize, Serializer};

use crate::combinatorics::is_rotation_class;
use crate::error::{Error, Result};
use crate::iet::Iet;
use crate::observable::Observable;
use crate::scalar::{format_rational, parse_rational};

pub(crate) fn ser_q<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub(crate) fn ser_qs<S: Serializer>(xs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(format_rational))
}

pub(crate) fn ser_iet<S: Serializer>(t: &Iet, s: S) -> std::result::Result<S::Ok, S::Error> {
    let lengths: Vec<String> = t.lengths().iter().map(|l| l.to_string()).collect();
    serde_json::json!({ "permutation": t.perm().to_string(), "lengths": lengths }).serialize(s)
}

/// Outcome of the ordering test between the two arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DichotomyConfig {
    pub rotation_fixture: String,
    pub other_fixture: String,
    pub seed: u64,
    pub n_grid: Vec<usize>,
    /// Left ends of the bumps for `f` and `g`, and their common width.
    pub f_at: String,
    pub g_at: String,
    pub width: String,
    pub piece_budget: usize,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        DichotomyConfig {
            rotation_fixture: "rev3".into(),
            other_fixture: "sym4".into(),
            seed: 7,
            n_grid: (8..=16).map(|k| 1usize << k).collect(),
            f_at: "1/8".into(),
            g_at: "9/16".into(),
            width: "1/16".into(),
            piece_budget: DEFAULT_PIECE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Arm {
    pub fixture: Fixture,
    pub rotation_class: bool,
    pub series: DecaySeries,
    pub fits: ModelComparison,
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub config: DichotomyConfig,
    pub rotation_arm: Arm,
    pub other_arm: Arm,
    /// The non-rotation arm has the larger power-law exponent.
    pub ordering: Verdict,
    /// Rotation arm prefers the logarithmic model, the other arm the power law.
    pub model_preference: Verdict,
}

impl DichotomyReport {
    pub fn verdict(&self) -> Verdict {
        match (self.ordering, self.model_preference) {
            (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Fail,
        }
    }
}

fn run_arm(name: &str, cfg: &DichotomyConfig, f: &Observable, g: &Observable) -> Result<Arm> {
    let fx = fixture(name, cfg.seed)?;
    let series = cesaro_decay(&fx.iet, name, f, g, &cfg.n_grid, cfg.seed, cfg.piece_budget)?;
    let fits = compare_models(&series.n_grid, &series.c)?;
    Ok(Arm { rotation_class: is_rotation_class(fx.iet.perm())?, fixture: fx, series, fits })
}

/// Runs both arms with the same bumps and grid.
pub fn dichotomy_run(cfg: &DichotomyConfig) -> Result<DichotomyReport> {
    let width = parse_rational(&cfg.width)?;
    let f = Observable::trapezoid(&parse_rational(&cfg.f_at)?, &width)?;
    let g = Observable::trapezoid(&parse_rational(&cfg.g_at)?, &width)?;
    // fail on unknown names before any heavy work
    fixture(&cfg.rotation_fixture, cfg.seed)?;
    fixture(&cfg.other_fixture, cfg.seed)?;
    let (rot, other) = rayon::join(
        || run_arm(&cfg.rotation_fixture, cfg, &f, &g),
        || run_arm(&cfg.other_fixture, cfg, &f, &g),
    );
    let (rot, other) = (rot?, other?);
    if !rot.rotation_class {
        return Err(Error::InvalidArgument(format!("fixture {} is not of rotation class", cfg.rotation_fixture)));
    }
    let same = rot.fixture.iet == other.fixture.iet;
    let ordering = if same {
        Verdict::Inconclusive
    } else if other.fits.power_law.exponent > rot.fits.power_law.exponent {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let model_preference = if same {
        Verdict::Inconclusive
    } else if rot.fits.preferred == DecayModel::LogPower && other.fits.preferred == DecayModel::PowerLaw {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(DichotomyReport { config: cfg.clone(), rotation_arm: rot, other_arm: other, ordering, model_preference })
}
