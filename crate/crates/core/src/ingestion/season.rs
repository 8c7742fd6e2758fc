use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Season index: 1 spring, 2 summer, 3 fall, 4 winter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Season {
    Spring = 1,
    Summer = 2,
    Fall = 3,
    Winter = 4,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Spring, Season::Summer, Season::Fall, Season::Winter];

    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Fall => "fall",
            Season::Winter => "winter",
        }
    }

    /// The season that follows this one in the yearly cycle.
    pub fn next(self) -> Season {
        match self {
            Season::Spring => Season::Summer,
            Season::Summer => Season::Fall,
            Season::Fall => Season::Winter,
            Season::Winter => Season::Spring,
        }
    }
}

impl TryFrom<u8> for Season {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Season::Spring),
            2 => Ok(Season::Summer),
            3 => Ok(Season::Fall),
            4 => Ok(Season::Winter),
            _ => Err(Error::InvalidInput(format!("season must be 1..=4, got {v}"))),
        }
    }
}

impl From<Season> for u8 {
    fn from(s: Season) -> u8 {
        s.value()
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Transition between adjacent seasons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeasonChange {
    SpringToSummer,
    SummerToFall,
    FallToWinter,
    WinterToSpring,
}

impl SeasonChange {
    pub const ALL: [SeasonChange; 4] = [
        SeasonChange::SpringToSummer,
        SeasonChange::SummerToFall,
        SeasonChange::FallToWinter,
        SeasonChange::WinterToSpring,
    ];

    pub fn from_season(self) -> Season {
        match self {
            SeasonChange::SpringToSummer => Season::Spring,
            SeasonChange::SummerToFall => Season::Summer,
            SeasonChange::FallToWinter => Season::Fall,
            SeasonChange::WinterToSpring => Season::Winter,
        }
    }

    pub fn to_season(self) -> Season {
        self.from_season().next()
    }

    /// Adjacent change starting at `from`.
    pub fn starting_at(from: Season) -> SeasonChange {
        match from {
            Season::Spring => SeasonChange::SpringToSummer,
            Season::Summer => SeasonChange::SummerToFall,
            Season::Fall => SeasonChange::FallToWinter,
            Season::Winter => SeasonChange::WinterToSpring,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SeasonChange::SpringToSummer => "spring_to_summer",
            SeasonChange::SummerToFall => "summer_to_fall",
            SeasonChange::FallToWinter => "fall_to_winter",
            SeasonChange::WinterToSpring => "winter_to_spring",
        }
    }
}

impl fmt::Display for SeasonChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SeasonChange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeasonChange::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown season change '{s}'")))
    }
}

/// Month → season mapping. Defaults to meteorological seasons
/// (Mar–May, Jun–Aug, Sep–Nov, Dec–Feb).
///
/// Serialized as `{"spring": [3,4,5], "summer": [6,7,8], ...}`; every month
/// must appear exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeasonMonths", into = "SeasonMonths")]
pub struct SeasonCalendar {
    by_month: [Season; 12],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeasonMonths {
    spring: Vec<u32>,
    summer: Vec<u32>,
    fall: Vec<u32>,
    winter: Vec<u32>,
}

impl Default for SeasonCalendar {
    fn default() -> Self {
        use Season::*;
        SeasonCalendar {
            by_month: [
                Winter, Winter, Spring, Spring, Spring, Summer, Summer, Summer, Fall, Fall, Fall,
                Winter,
            ],
        }
    }
}

impl SeasonCalendar {
    pub fn season_of(&self, date: NaiveDate) -> Season {
        self.by_month[date.month0() as usize]
    }

    pub fn months_of(&self, season: Season) -> Vec<u32> {
        (1..=12)
            .filter(|m| self.by_month[(*m - 1) as usize] == season)
            .collect()
    }
}

impl TryFrom<SeasonMonths> for SeasonCalendar {
    type Error = Error;

    fn try_from(m: SeasonMonths) -> Result<Self> {
        let mut slots: [Option<Season>; 12] = [None; 12];
        for (season, months) in [
            (Season::Spring, &m.spring),
            (Season::Summer, &m.summer),
            (Season::Fall, &m.fall),
            (Season::Winter, &m.winter),
        ] {
            for &month in months {
                if !(1..=12).contains(&month) {
                    return Err(Error::Config(format!("month {month} out of range")));
                }
                let slot = &mut slots[(month - 1) as usize];
                if slot.is_some() {
                    return Err(Error::Config(format!("month {month} assigned twice")));
                }
                *slot = Some(season);
            }
        }
        let mut by_month = [Season::Spring; 12];
        for (i, s) in slots.iter().enumerate() {
            by_month[i] = s.ok_or_else(|| Error::Config(format!("month {} has no season", i + 1)))?;
        }
        Ok(SeasonCalendar { by_month })
    }
}

impl From<SeasonCalendar> for SeasonMonths {
    fn from(c: SeasonCalendar) -> Self {
        SeasonMonths {
            spring: c.months_of(Season::Spring),
            summer: c.months_of(Season::Summer),
            fall: c.months_of(Season::Fall),
            winter: c.months_of(Season::Winter),
        }
    }
}

/// Season of `date` under the default meteorological calendar.
pub fn season_of(date: NaiveDate) -> Season {
    SeasonCalendar::default().season_of(date)
}
