//! Synthetic cohorts with planted ground truth.
//!
//! Every day of every consumer is one of a small set of prototype shapes
//! drawn from a season-dependent mixture, plus truncated Gaussian noise,
//! then scaled to a consumer-specific kWh magnitude. Shift rules move part
//! of a season's mixture onto another prototype for consumers whose socio
//! attribute clears a level, which fixes the true variation labels.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingestion::{
    ConsumerId, Dataset, HourlyReading, LoadFormatConfig, Season, SeasonCalendar, SeasonChange, SocioFormatConfig,
    SocioProfile,
};
use crate::{io, HOURS};

pub const LOAD_FILE: &str = "synthetic_load.csv";
pub const SOCIO_FILE: &str = "synthetic_socio.csv";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

pub const DEFAULT_NOISE_SIGMA: f64 = 0.05;
/// Noise draws are truncated to this many standard deviations.
const NOISE_TRUNCATION: f64 = 3.0;
/// Mixtures whose entries all differ by less than this count as equal.
const MIXTURE_TOLERANCE: f64 = 1e-9;

/// One mixture over prototypes per season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalMixture {
    pub spring: Vec<f64>,
    pub summer: Vec<f64>,
    pub fall: Vec<f64>,
    pub winter: Vec<f64>,
}

impl SeasonalMixture {
    /// Same mixture in all seasons.
    pub fn constant(mix: Vec<f64>) -> Self {
        SeasonalMixture {
            spring: mix.clone(),
            summer: mix.clone(),
            fall: mix.clone(),
            winter: mix,
        }
    }

    pub fn get(&self, season: Season) -> &[f64] {
        match season {
            Season::Spring => &self.spring,
            Season::Summer => &self.summer,
            Season::Fall => &self.fall,
            Season::Winter => &self.winter,
        }
    }

    fn get_mut(&mut self, season: Season) -> &mut Vec<f64> {
        match season {
            Season::Spring => &mut self.spring,
            Season::Summer => &mut self.summer,
            Season::Fall => &mut self.fall,
            Season::Winter => &mut self.winter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Archetype {
    pub name: String,
    /// Relative frequency in the cohort.
    pub weight: f64,
    pub mixtures: SeasonalMixture,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SocioAttribute {
    Income,
    Education,
    AgeBand(String),
}

/// Consumers with `attribute >= min_value` move `fraction` of their
/// `season` mixture onto prototype `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRule {
    pub attribute: SocioAttribute,
    pub min_value: u32,
    pub season: Season,
    pub fraction: f64,
    pub target: usize,
}

/// Socio attributes are drawn uniformly: income and education from
/// `1..=levels`, each age band's resident count from `0..=max_residents`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SocioSpec {
    pub income_levels: u32,
    pub education_levels: u32,
    pub age_bands: Vec<String>,
    pub max_residents: u32,
}

impl Default for SocioSpec {
    fn default() -> Self {
        SocioSpec {
            income_levels: 10,
            education_levels: 5,
            age_bands: vec!["age_0_17".into(), "age_18_64".into(), "age_65_plus".into()],
            max_residents: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub n_consumers: usize,
    pub years: u32,
    #[serde(default = "default_start_year")]
    pub start_year: i32,
    pub prototypes: Vec<Vec<f64>>,
    pub archetypes: Vec<Archetype>,
    #[serde(default)]
    pub socio: SocioSpec,
    #[serde(default)]
    pub shift_rules: Vec<ShiftRule>,
    pub noise_sigma: f64,
    pub seed: u64,
    #[serde(default)]
    pub calendar: SeasonCalendar,
}

fn default_start_year() -> i32 {
    2015
}

fn bump(hour: usize, center: f64, width: f64) -> f64 {
    let d = (hour as f64 - center).abs();
    let d = d.min(HOURS as f64 - d);
    (-d * d / (2.0 * width * width)).exp()
}

fn rescale_unit(v: [f64; HOURS]) -> Vec<f64> {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.iter().map(|x| (x - min) / (max - min)).collect()
}

/// Six well-separated day shapes on [0, 1]: morning, evening, midday and
/// night peaks, a morning+evening double peak and a daytime plateau.
pub fn prototype_bank() -> Vec<Vec<f64>> {
    let shape = |f: &dyn Fn(usize) -> f64| rescale_unit(std::array::from_fn(f));
    vec![
        shape(&|h| bump(h, 7.0, 1.5)),
        shape(&|h| bump(h, 19.0, 1.5)),
        shape(&|h| bump(h, 13.0, 1.5)),
        shape(&|h| bump(h, 2.0, 1.5)),
        shape(&|h| bump(h, 7.0, 1.5).max(bump(h, 19.0, 1.5))),
        shape(&|h| {
            let x = h as f64;
            1.0 / (1.0 + (-(x - 8.5) * 2.0).exp()) - 1.0 / (1.0 + (-(x - 17.5) * 2.0).exp())
        }),
    ]
}

impl CohortSpec {
    /// `n_prototypes` shapes from [`prototype_bank`] (1..=6), season-invariant
    /// mixtures and no socio effect. Archetype `j` mixes prototypes `j` and
    /// `j+1` so every prototype is used and no consumer uses more than two.
    pub fn planted(n_prototypes: usize, n_consumers: usize, years: u32, seed: u64) -> Result<Self> {
        let bank = prototype_bank();
        if !(1..=bank.len()).contains(&n_prototypes) {
            return Err(Error::Config(format!(
                "planted cohorts support 1..={} prototypes, got {n_prototypes}",
                bank.len()
            )));
        }
        let archetypes = if n_prototypes == 1 {
            vec![Archetype {
                name: "single".into(),
                weight: 1.0,
                mixtures: SeasonalMixture::constant(vec![1.0]),
            }]
        } else {
            (0..n_prototypes)
                .map(|j| {
                    let mut mix = vec![0.0; n_prototypes];
                    mix[j] = 0.6;
                    mix[(j + 1) % n_prototypes] += 0.4;
                    Archetype {
                        name: format!("pair_{j}"),
                        weight: 1.0,
                        mixtures: SeasonalMixture::constant(mix),
                    }
                })
                .collect()
        };
        Ok(CohortSpec {
            n_consumers,
            years,
            start_year: default_start_year(),
            prototypes: bank[..n_prototypes].to_vec(),
            archetypes,
            socio: SocioSpec::default(),
            shift_rules: Vec::new(),
            noise_sigma: DEFAULT_NOISE_SIGMA,
            seed,
            calendar: SeasonCalendar::default(),
        })
    }

    /// Four prototypes; base mixtures over the first three are the same in
    /// every season, and consumers with income level 5 or above move 60% of
    /// their summer mass onto the fourth.
    pub fn income_shift(n_consumers: usize, years: u32, seed: u64) -> Self {
        let archetypes = [
            ("morning", [0.6, 0.2, 0.2]),
            ("evening", [0.2, 0.6, 0.2]),
            ("midday", [0.2, 0.2, 0.6]),
        ]
        .into_iter()
        .map(|(name, m)| Archetype {
            name: name.into(),
            weight: 1.0,
            mixtures: SeasonalMixture::constant(vec![m[0], m[1], m[2], 0.0]),
        })
        .collect();
        CohortSpec {
            n_consumers,
            years,
            start_year: default_start_year(),
            prototypes: prototype_bank()[..4].to_vec(),
            archetypes,
            socio: SocioSpec::default(),
            shift_rules: vec![ShiftRule {
                attribute: SocioAttribute::Income,
                min_value: 5,
                season: Season::Summer,
                fraction: 0.6,
                target: 3,
            }],
            noise_sigma: DEFAULT_NOISE_SIGMA,
            seed,
            calendar: SeasonCalendar::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_consumers == 0 || self.years == 0 {
            return bad("cohort needs at least one consumer and one year".into());
        }
        let p = self.prototypes.len();
        if p == 0 || p > u8::MAX as usize {
            return bad(format!("need 1..=255 prototypes, got {p}"));
        }
        if let Some(i) = self
            .prototypes
            .iter()
            .position(|v| v.len() != HOURS || v.iter().any(|x| !x.is_finite()))
        {
            return bad(format!("prototype {i} must have {HOURS} finite values"));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be finite and non-negative, got {}", self.noise_sigma));
        }
        let min_sep = 4.0 * self.noise_sigma * (HOURS as f64).sqrt();
        for i in 0..p {
            for j in i + 1..p {
                let d = l2(&self.prototypes[i], &self.prototypes[j]);
                if d < min_sep || d == 0.0 {
                    return bad(format!(
                        "prototypes {i} and {j} are {d:.4} apart; separability needs at least {min_sep:.4}"
                    ));
                }
            }
        }
        if self.archetypes.is_empty() {
            return bad("at least one archetype is required".into());
        }
        for a in &self.archetypes {
            if !(a.weight > 0.0 && a.weight.is_finite()) {
                return bad(format!("archetype '{}' needs a positive weight", a.name));
            }
            for s in Season::ALL {
                check_mixture(a.mixtures.get(s), p).map_err(|m| Error::Config(format!("archetype '{}' {s}: {m}", a.name)))?;
            }
        }
        let s = &self.socio;
        if s.income_levels == 0 || s.education_levels == 0 {
            return bad("income and education need at least one level".into());
        }
        for r in &self.shift_rules {
            if r.target >= p {
                return bad(format!("shift target {} out of range", r.target));
            }
            if !(0.0..=1.0).contains(&r.fraction) {
                return bad(format!("shift fraction {} outside [0, 1]", r.fraction));
            }
            if let SocioAttribute::AgeBand(b) = &r.attribute {
                if !s.age_bands.contains(b) {
                    return bad(format!("shift rule references unknown age band '{b}'"));
                }
            }
        }
        Ok(())
    }

    fn first_day(&self) -> Result<NaiveDate> {
        NaiveDate::from_ymd_opt(self.start_year, 1, 1)
            .ok_or_else(|| Error::Config(format!("start year {} out of range", self.start_year)))
    }

    fn day_count(&self) -> Result<usize> {
        let end = NaiveDate::from_ymd_opt(self.start_year + self.years as i32, 1, 1)
            .ok_or_else(|| Error::Config("cohort span out of range".into()))?;
        Ok((end - self.first_day()?).num_days() as usize)
    }
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_mixture(m: &[f64], p: usize) -> std::result::Result<(), String> {
    if m.len() != p {
        return Err(format!("mixture has {} entries for {p} prototypes", m.len()));
    }
    if m.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err("mixture entries must be non-negative".into());
    }
    let sum: f64 = m.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(format!("mixture sums to {sum}"));
    }
    Ok(())
}

fn mixtures_differ(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).any(|(x, y)| (x - y).abs() > MIXTURE_TOLERANCE)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumerTruth {
    pub consumer: ConsumerId,
    pub archetype: String,
    /// Mixtures after shift rules.
    pub mixtures: SeasonalMixture,
    /// True when the two seasons of a change have different mixtures.
    pub variation: BTreeMap<SeasonChange, bool>,
    pub kwh_scale: f64,
    pub kwh_base: f64,
    /// Prototype of each day, starting at [`GroundTruth::start`].
    pub day_prototypes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub n_prototypes: usize,
    pub start: NaiveDate,
    pub days: usize,
    /// Share of consumers with a planted variation, per change.
    pub variation_rate: BTreeMap<SeasonChange, f64>,
    pub consumers: Vec<ConsumerTruth>,
}

impl GroundTruth {
    pub fn consumer(&self, id: &ConsumerId) -> Option<&ConsumerTruth> {
        self.consumers
            .binary_search_by(|c| c.consumer.cmp(id))
            .ok()
            .map(|i| &self.consumers[i])
    }

    /// True prototype of one consumer-day.
    pub fn prototype_of(&self, id: &ConsumerId, date: NaiveDate) -> Option<u8> {
        let offset = (date - self.start).num_days();
        let c = self.consumer(id)?;
        usize::try_from(offset).ok().and_then(|i| c.day_prototypes.get(i).copied())
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCohort {
    pub dataset: Dataset,
    pub truth: GroundTruth,
    pub age_bands: Vec<String>,
}

fn attribute_value(profile: &SocioProfile, attr: &SocioAttribute) -> u32 {
    match attr {
        SocioAttribute::Income => profile.income_level,
        SocioAttribute::Education => profile.education_level,
        SocioAttribute::AgeBand(b) => profile.residents_by_age.get(b).copied().unwrap_or(0),
    }
}

/// Generates the cohort. The same spec always yields the same cohort.
pub fn generate(spec: &CohortSpec) -> Result<SyntheticCohort> {
    spec.validate()?;
    let start = spec.first_day()?;
    let days = spec.day_count()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let archetype_pick = WeightedIndex::new(spec.archetypes.iter().map(|a| a.weight))
        .map_err(|e| Error::Config(format!("archetype weights: {e}")))?;
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::Config(format!("noise: {e}")))?;
    let width = (spec.n_consumers.max(1) - 1).to_string().len().max(4);

    let mut readings = Vec::with_capacity(spec.n_consumers * days * HOURS);
    let mut socio = Vec::with_capacity(spec.n_consumers);
    let mut truths = Vec::with_capacity(spec.n_consumers);
    for i in 0..spec.n_consumers {
        let consumer = ConsumerId::new(format!("h{i:0width$}"))?;
        let profile = SocioProfile {
            consumer: consumer.clone(),
            residents_by_age: spec
                .socio
                .age_bands
                .iter()
                .map(|b| (b.clone(), rng.random_range(0..=spec.socio.max_residents)))
                .collect(),
            income_level: rng.random_range(1..=spec.socio.income_levels),
            education_level: rng.random_range(1..=spec.socio.education_levels),
        };
        let archetype = &spec.archetypes[archetype_pick.sample(&mut rng)];
        let mut mixtures = archetype.mixtures.clone();
        for rule in &spec.shift_rules {
            if attribute_value(&profile, &rule.attribute) >= rule.min_value {
                let mix = mixtures.get_mut(rule.season);
                mix.iter_mut().for_each(|x| *x *= 1.0 - rule.fraction);
                mix[rule.target] += rule.fraction;
            }
        }
        let kwh_scale = rng.random_range(0.5..3.0);
        let kwh_base = rng.random_range(0.2..0.6);

        let pickers = Season::ALL
            .iter()
            .map(|s| WeightedIndex::new(mixtures.get(*s)).map_err(|e| Error::Config(format!("{s} mixture: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut day_prototypes = Vec::with_capacity(days);
        for date in start.iter_days().take(days) {
            let season = spec.calendar.season_of(date);
            let proto = pickers[season.value() as usize - 1].sample(&mut rng);
            day_prototypes.push(proto as u8);
            for (hour, &shape) in spec.prototypes[proto].iter().enumerate() {
                let e = truncated(&noise, spec.noise_sigma, &mut rng);
                readings.push(HourlyReading {
                    consumer: consumer.clone(),
                    date,
                    hour: hour as u8,
                    load_kwh: (kwh_scale * (kwh_base + shape + e)).max(0.0),
                });
            }
        }
        let variation = SeasonChange::ALL
            .into_iter()
            .map(|c| {
                (
                    c,
                    mixtures_differ(mixtures.get(c.from_season()), mixtures.get(c.to_season())),
                )
            })
            .collect();
        truths.push(ConsumerTruth {
            consumer,
            archetype: archetype.name.clone(),
            mixtures,
            variation,
            kwh_scale,
            kwh_base,
            day_prototypes,
        });
        socio.push(profile);
    }
    let variation_rate = SeasonChange::ALL
        .into_iter()
        .map(|c| {
            let n = truths.iter().filter(|t| t.variation[&c]).count();
            (c, n as f64 / truths.len() as f64)
        })
        .collect();
    let dataset = Dataset::new(readings, socio)?;
    Ok(SyntheticCohort {
        dataset,
        truth: GroundTruth {
            seed: spec.seed,
            n_prototypes: spec.prototypes.len(),
            start,
            days,
            variation_rate,
            consumers: truths,
        },
        age_bands: spec.socio.age_bands.clone(),
    })
}

fn truncated(noise: &Normal<f64>, sigma: f64, rng: &mut ChaCha8Rng) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    loop {
        let e = noise.sample(rng);
        if e.abs() <= NOISE_TRUNCATION * sigma {
            return e;
        }
    }
}

pub const INCOME_COLUMN: &str = "income_level";
pub const EDUCATION_COLUMN: &str = "education_level";

/// Column binding for [`LOAD_FILE`].
pub fn load_format() -> LoadFormatConfig {
    LoadFormatConfig::default()
}

/// Column binding for [`SOCIO_FILE`].
pub fn socio_format(age_bands: &[String]) -> SocioFormatConfig {
    SocioFormatConfig {
        consumer_col: "dataid".into(),
        age_band_cols: age_bands.iter().map(|b| (b.clone(), b.clone())).collect(),
        income_col: INCOME_COLUMN.into(),
        education_col: EDUCATION_COLUMN.into(),
        income_order: None,
        education_order: None,
        blank_count_as_zero: false,
    }
}

impl SyntheticCohort {
    /// Writes the load CSV, socio CSV and ground-truth manifest into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let fmt = load_format();
        let path = dir.join(LOAD_FILE);
        let mut w = io::csv_writer(&path)?;
        w.write_record([&fmt.consumer_col, &fmt.timestamp_col, &fmt.kwh_col])
            .map_err(|e| Error::csv(&path, e))?;
        for r in &self.dataset.readings {
            let d = r.date;
            let ts = format!("{:04}-{:02}-{:02} {:02}:00:00", d.year(), d.month(), d.day(), r.hour);
            w.write_record([r.consumer.as_str(), &ts, &format!("{:.4}", r.load_kwh)])
                .map_err(|e| Error::csv(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        let path = dir.join(SOCIO_FILE);
        let mut w = io::csv_writer(&path)?;
        let mut header = vec!["dataid".to_string()];
        header.extend(self.age_bands.iter().cloned());
        header.extend([INCOME_COLUMN.to_string(), EDUCATION_COLUMN.to_string()]);
        w.write_record(&header).map_err(|e| Error::csv(&path, e))?;
        for p in &self.dataset.socio {
            let mut row = vec![p.consumer.to_string()];
            row.extend(self.age_bands.iter().map(|b| p.residents_by_age[b].to_string()));
            row.extend([p.income_level.to_string(), p.education_level.to_string()]);
            w.write_record(&row).map_err(|e| Error::csv(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        io::write_json(&dir.join(GROUND_TRUTH_FILE), &self.truth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingestion::{parse_load_csv, parse_socio_csv};

    #[test]
    fn bank_is_separable_at_default_noise() {
        let bank = prototype_bank();
        let min_sep = 4.0 * DEFAULT_NOISE_SIGMA * (HOURS as f64).sqrt();
        for i in 0..bank.len() {
            let lo = bank[i].iter().copied().fold(f64::INFINITY, f64::min);
            let hi = bank[i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!((lo, hi), (0.0, 1.0));
            for j in i + 1..bank.len() {
                assert!(l2(&bank[i], &bank[j]) >= min_sep, "{i} {j}");
            }
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut s = CohortSpec::planted(3, 5, 1, 0).unwrap();
        s.noise_sigma = 0.5;
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        let mut s = CohortSpec::planted(3, 5, 1, 0).unwrap();
        s.archetypes[0].mixtures.summer = vec![0.5, 0.4, 0.0];
        assert!(s.validate().is_err());
        let mut s = CohortSpec::income_shift(5, 1, 0);
        s.shift_rules[0].target = 9;
        assert!(s.validate().is_err());
        assert!(CohortSpec::planted(7, 5, 1, 0).is_err());
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let spec = CohortSpec::income_shift(4, 1, 11);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.truth, b.truth);
        let c = generate(&CohortSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.dataset, c.dataset);
    }

    #[test]
    fn shift_rule_sets_truth() {
        let spec = CohortSpec::income_shift(40, 1, 3);
        let cohort = generate(&spec).unwrap();
        for t in &cohort.truth.consumers {
            let income = cohort.dataset.socio_for(&t.consumer).unwrap().income_level;
            let shifted = income >= 5;
            assert_eq!(t.variation[&SeasonChange::SpringToSummer], shifted);
            assert_eq!(t.variation[&SeasonChange::SummerToFall], shifted);
            assert!(!t.variation[&SeasonChange::FallToWinter]);
            assert!(!t.variation[&SeasonChange::WinterToSpring]);
            if shifted {
                assert!((t.mixtures.summer[3] - 0.6).abs() < 1e-12);
                assert!((t.mixtures.summer.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(cohort.truth.days, 365);
        assert_eq!(cohort.dataset.readings.len(), 40 * 365 * 24);
    }

    #[test]
    fn readings_are_physical() {
        let cohort = generate(&CohortSpec::planted(6, 6, 1, 5).unwrap()).unwrap();
        assert!(cohort.dataset.readings.iter().all(|r| r.load_kwh > 0.0));
    }

    #[test]
    fn written_files_parse_back() {
        let dir = tempfile::tempdir().unwrap();
        let cohort = generate(&CohortSpec::income_shift(3, 1, 8)).unwrap();
        cohort.write(dir.path()).unwrap();
        let load = parse_load_csv(&dir.path().join(LOAD_FILE), &load_format()).unwrap();
        assert_eq!(load.stats.rows_skipped, 0);
        assert_eq!(load.dataset.readings.len(), cohort.dataset.readings.len());
        for (a, b) in load.dataset.readings.iter().zip(&cohort.dataset.readings) {
            assert_eq!((&a.consumer, a.date, a.hour), (&b.consumer, b.date, b.hour));
            assert!((a.load_kwh - b.load_kwh).abs() <= 5e-5);
        }
        let socio = parse_socio_csv(&dir.path().join(SOCIO_FILE), &socio_format(&cohort.age_bands)).unwrap();
        assert!(socio.errors.is_empty());
        assert_eq!(socio.profiles, cohort.dataset.socio);
        let truth: GroundTruth = io::read_json(&dir.path().join(GROUND_TRUTH_FILE)).unwrap();
        assert_eq!(truth, cohort.truth);
    }

    #[test]
    fn zero_noise_single_prototype_days_are_scaled_copies() {
        let mut spec = CohortSpec::planted(1, 2, 1, 1).unwrap();
        spec.noise_sigma = 0.0;
        let cohort = generate(&spec).unwrap();
        let id = &cohort.truth.consumers[0].consumer;
        assert_eq!(cohort.truth.prototype_of(id, spec.first_day().unwrap()), Some(0));
        assert!(cohort.truth.consumers.iter().all(|c| c.day_prototypes.iter().all(|p| *p == 0)));
    }
}
