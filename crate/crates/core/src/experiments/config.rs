//! Declarative scenario files (TOML). Rationals are written `[num, den]`;
//! integers are accepted where a rational is expected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::capacity::{Capacity, WeightVector};
use crate::finite_space::{FiniteMetricSpace, Interval, Rational, SetDescriptor};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// An exact rational read from `[num, den]` or a bare integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Q {
    pub fn new(n: i64, d: i64) -> Self {
        Q(Rational::new(n, d))
    }

    pub fn to_f64(self) -> f64 {
        crate::numeric::to_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([i64; 2]),
            Int(i64),
        }
        match Raw::deserialize(d).map_err(|_| serde::de::Error::custom("expected a rational [num, den] or an integer"))? {
            Raw::Int(n) => Ok(Q(Rational::from_integer(n))),
            Raw::Pair([_, 0]) => Err(serde::de::Error::custom("zero denominator")),
            Raw::Pair([n, d]) => Ok(Q(Rational::new(n, d))),
        }
    }
}

impl Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [*self.0.numer(), *self.0.denom()].serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    pub run: RunSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunSpec {
    ChainProbe(ChainProbeSpec),
    Counterexample(CounterexampleSpec),
    PositiveCase(PositiveCaseSpec),
    LusinSweep(LusinSweepSpec),
    PropertySweep(PropertySweepSpec),
    SetEquality(SetEqualitySpec),
}

impl RunSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            RunSpec::ChainProbe(_) => "chain-probe",
            RunSpec::Counterexample(_) => "counterexample",
            RunSpec::PositiveCase(_) => "positive-case",
            RunSpec::LusinSweep(_) => "lusin-sweep",
            RunSpec::PropertySweep(_) => "property-sweep",
            RunSpec::SetEquality(_) => "set-equality",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureSpec {
    Uniform,
    /// Weights proportional to `n - i`, heaviest at the first point.
    Triangular,
    /// Integer weights, one per point; the grid size must match.
    Proportional(Vec<i64>),
}

impl MeasureSpec {
    pub fn build(&self, n: usize) -> Result<WeightVector> {
        match self {
            MeasureSpec::Uniform => Ok(WeightVector::uniform(n)),
            MeasureSpec::Triangular => Ok(WeightVector::triangular(n)),
            MeasureSpec::Proportional(w) if w.len() == n => WeightVector::proportional(w),
            MeasureSpec::Proportional(w) => Err(Error::ScenarioInvalid(format!(
                "proportional measure has {} weights for {n} points",
                w.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CapacitySpec {
    Measure { mu: MeasureSpec },
    SupOfMeasures { measures: Vec<MeasureSpec> },
    Huber { mu: MeasureSpec, eps: Q, delta: Q },
}

impl CapacitySpec {
    pub fn build(&self, space: Arc<FiniteMetricSpace>) -> Result<Capacity> {
        let n = space.len();
        match self {
            CapacitySpec::Measure { mu } => Capacity::measure(space, mu.build(n)?),
            CapacitySpec::SupOfMeasures { measures } => Capacity::sup_of_measures(
                space,
                measures.iter().map(|m| m.build(n)).collect::<Result<_>>()?,
            ),
            CapacitySpec::Huber { mu, eps, delta } => Capacity::huber(space, mu.build(n)?, eps.0, delta.0),
        }
    }

    pub fn measures(&self) -> Vec<&MeasureSpec> {
        match self {
            CapacitySpec::Measure { mu } | CapacitySpec::Huber { mu, .. } => vec![mu],
            CapacitySpec::SupOfMeasures { measures } => measures.iter().collect(),
        }
    }

    pub fn huber_eps(&self) -> Option<Q> {
        match self {
            CapacitySpec::Huber { eps, .. } => Some(*eps),
            _ => None,
        }
    }
}

/// Chain depth: a fixed count, or the string `"resolution"` for one set per
/// grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Fixed(usize),
    Resolution,
}

impl Default for Depth {
    fn default() -> Self {
        Depth::Fixed(16)
    }
}

impl Depth {
    pub fn at(self, resolution: usize) -> usize {
        match self {
            Depth::Fixed(k) => k,
            Depth::Resolution => resolution,
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(0) => Err(serde::de::Error::custom("depth must be positive")),
            Raw::Int(k) => Ok(Depth::Fixed(k)),
            Raw::Word(w) if w == "resolution" => Ok(Depth::Resolution),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("unknown depth {w:?}"))),
        }
    }
}

/// `O_k = interval(lo, lo + span / k)` with the given endpoint flags.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harmonic {
    pub lo: Q,
    pub span: Q,
    #[serde(default)]
    pub lo_closed: bool,
    #[serde(default)]
    pub hi_closed: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainSpec {
    Harmonic(Harmonic),
    /// Fixed list; its length is the depth.
    Explicit(Vec<SetDescriptor>),
}

impl ChainSpec {
    pub fn descriptors(&self, depth: usize) -> Result<Vec<SetDescriptor>> {
        match self {
            ChainSpec::Explicit(list) => Ok(list.clone()),
            ChainSpec::Harmonic(h) => (1..=depth)
                .map(|k| {
                    let hi = h.lo.0 + h.span.0 / Rational::from_integer(k as i64);
                    Interval::new(h.lo.0, hi, h.lo_closed, h.hi_closed).map(SetDescriptor::interval)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub resolutions: Vec<usize>,
    #[serde(default = "unit_interval")]
    pub interval: [Q; 2],
}

fn unit_interval() -> [Q; 2] {
    [Q::new(0, 1), Q::new(1, 1)]
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() {
            return Err(Error::Config("resolutions must be nonempty".into()));
        }
        if self.resolutions.iter().any(|&r| r < 2) {
            return Err(Error::Config("every resolution must be at least 2".into()));
        }
        if self.resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("resolutions must be strictly increasing".into()));
        }
        if self.interval[0] >= self.interval[1] {
            return Err(Error::Config("interval must have a < b".into()));
        }
        Ok(())
    }

    pub fn space(&self, resolution: usize) -> Result<Arc<FiniteMetricSpace>> {
        Ok(Arc::new(FiniteMetricSpace::interval_grid(
            resolution,
            self.interval[0].0,
            self.interval[1].0,
        )?))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UFunctionSpec {
    /// 1 at the grid point with this coordinate, 0 elsewhere.
    Indicator(Q),
    /// 1 on coordinates `>= at`, 0 below.
    Step(Q),
    Identity,
    /// Values `k / levels`, drawn from the scenario seed.
    Random { levels: u32 },
}

impl UFunctionSpec {
    pub fn build(&self, space: &FiniteMetricSpace, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let coords = space
            .coordinates()
            .ok_or_else(|| Error::ScenarioInvalid("u needs a space with coordinates".into()))?;
        Ok(match self {
            UFunctionSpec::Indicator(at) => {
                if !coords.contains(&at.0) {
                    return Err(Error::ScenarioInvalid(format!("{} is not a grid point", at.0)));
                }
                coords.iter().map(|&c| if c == at.0 { 1.0 } else { 0.0 }).collect()
            }
            UFunctionSpec::Step(at) => coords.iter().map(|&c| if c >= at.0 { 1.0 } else { 0.0 }).collect(),
            UFunctionSpec::Identity => coords.iter().map(|&c| crate::numeric::to_f64(c)).collect(),
            UFunctionSpec::Random { levels } => {
                if *levels == 0 {
                    return Err(Error::Config("random u needs levels >= 1".into()));
                }
                (0..coords.len())
                    .map(|_| f64::from(rng.gen_range(0..=*levels)) / f64::from(*levels))
                    .collect()
            }
        })
    }

    /// Grid index of the indicator point, if any.
    pub fn indicator_point(&self, space: &FiniteMetricSpace) -> Option<usize> {
        match self {
            UFunctionSpec::Indicator(at) => (0..space.len()).find(|&i| space.coordinate(i) == Some(at.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleSpec {
    /// Multiple of the grid step.
    Steps(i64),
    Absolute(Q),
}

impl ScaleSpec {
    pub fn at(self, space: &FiniteMetricSpace) -> Result<Rational> {
        let r = match self {
            ScaleSpec::Steps(k) => {
                let h = space
                    .step()
                    .ok_or_else(|| Error::ScenarioInvalid("scale in steps needs a grid".into()))?;
                h * Rational::from_integer(k)
            }
            ScaleSpec::Absolute(q) => q.0,
        };
        if r <= Rational::from_integer(0) {
            return Err(Error::Config("scale must be positive".into()));
        }
        Ok(r)
    }

    pub fn label(self) -> String {
        match self {
            ScaleSpec::Steps(k) => format!("{k}h"),
            ScaleSpec::Absolute(q) => q.0.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainProbeSpec {
    pub grid: GridSpec,
    pub capacity: CapacitySpec,
    pub chain: ChainSpec,
    #[serde(default = "empty_descriptor")]
    pub limit: SetDescriptor,
    #[serde(default)]
    pub depth: Depth,
    /// Upper bound on the finest-resolution infimum gap before collapse.
    pub max_gap: Option<Q>,
    /// Lower bound on every gap with a nonempty realized set.
    pub min_gap: Option<Q>,
}

fn empty_descriptor() -> SetDescriptor {
    SetDescriptor::Empty
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSpec {
    pub grid: GridSpec,
    pub capacity: CapacitySpec,
    pub u: UFunctionSpec,
    pub eta: Q,
    pub scale: ScaleSpec,
    /// Lower bound asserted on the Lusin optimum and on the chain gaps;
    /// defaults to the contamination level of a Huber capacity.
    pub floor: Option<Q>,
    pub chain: ChainSpec,
    #[serde(default = "empty_descriptor")]
    pub limit: SetDescriptor,
    #[serde(default)]
    pub depth: Depth,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositiveCaseSpec {
    pub grid: GridSpec,
    pub capacity: CapacitySpec,
    pub u: UFunctionSpec,
    pub eta: Q,
    pub scale: ScaleSpec,
    /// Bound on the Lusin optimum at the finest resolution.
    pub target: Q,
    /// Bound on the finest-resolution gap infimum before collapse.
    pub gap_target: Q,
    pub chain: ChainSpec,
    #[serde(default = "empty_descriptor")]
    pub limit: SetDescriptor,
    #[serde(default)]
    pub depth: Depth,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LusinSweepSpec {
    pub grid: GridSpec,
    pub capacity: CapacitySpec,
    pub u: UFunctionSpec,
    pub etas: Vec<Q>,
    pub scales: Vec<ScaleSpec>,
    /// Independent draws of `u` per resolution (only differs for random u).
    #[serde(default = "one")]
    pub instances: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedProperties {
    pub subadditive: Option<bool>,
    pub two_alternating: Option<bool>,
    pub core_nonempty: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZooEntry {
    pub name: String,
    pub capacity: CapacitySpec,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub expect: ExpectedProperties,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertySweepSpec {
    #[serde(default)]
    pub zoo: Vec<ZooEntry>,
    #[serde(default = "default_trials")]
    pub trials: u64,
}

fn default_trials() -> u64 {
    crate::axioms::DEFAULT_TRIALS
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetEqualitySpec {
    pub grid: GridSpec,
    pub chain: ChainSpec,
    #[serde(default)]
    pub depth: Depth,
    pub delta: Q,
    /// Expected common value of both sides at every resolution.
    pub expect: Option<SetDescriptor>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::Config("name must be nonempty [A-Za-z0-9_-]".into()));
        }
        let nonneg = |q: &Q, what: &str| {
            if q.0 < Rational::from_integer(0) {
                Err(Error::Config(format!("{what} must be nonnegative")))
            } else {
                Ok(())
            }
        };
        match &self.run {
            RunSpec::ChainProbe(s) => s.grid.validate(),
            RunSpec::Counterexample(s) => {
                s.grid.validate()?;
                nonneg(&s.eta, "eta")?;
                if s.floor.is_none() && s.capacity.huber_eps().is_none() {
                    return Err(Error::Config("floor is required for non-Huber capacities".into()));
                }
                Ok(())
            }
            RunSpec::PositiveCase(s) => {
                s.grid.validate()?;
                nonneg(&s.eta, "eta")
            }
            RunSpec::LusinSweep(s) => {
                s.grid.validate()?;
                if s.etas.is_empty() || s.scales.is_empty() {
                    return Err(Error::Config("etas and scales must be nonempty".into()));
                }
                s.etas.iter().try_for_each(|e| nonneg(e, "eta"))
            }
            RunSpec::PropertySweep(s) => {
                for e in &s.zoo {
                    if e.sizes.iter().any(|&n| !(2..=crate::capacity::DENSE_CAP).contains(&n)) {
                        return Err(Error::Config(format!(
                            "zoo entry {}: sizes must lie in 2..={}",
                            e.name,
                            crate::capacity::DENSE_CAP
                        )));
                    }
                }
                Ok(())
            }
            RunSpec::SetEquality(s) => {
                s.grid.validate()?;
                if s.delta.0 < Rational::from_integer(0) {
                    return Err(Error::Config("delta must be nonnegative".into()));
                }
                Ok(())
            }
        }
    }
}

/// A parsed, validated scenario together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub config: ScenarioConfig,
    pub source_sha256: String,
}

impl LoadedScenario {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(Self {
            config,
            source_sha256: hex_digest(text.as_bytes()),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Hash of the source text plus the effective seed.
    pub fn config_hash(&self) -> String {
        hex_digest(format!("{}\nseed={}", self.source_sha256, self.config.seed).as_bytes())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed)
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
