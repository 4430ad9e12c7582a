//! Platform-to-converter budget cascade.
//!
//! A chip's area and thermal budget is split per core, then per subsystem,
//! then down to the wireless interface and finally the data converters. The
//! cascade is evaluated in exact rational arithmetic and rounded once, so
//! round-number inputs give round-number outputs (0.35 W / 100 Gb/s is
//! exactly `3.5e-12`, not `3.4999999999999996e-12`).

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::dataset::{Dataset, TransceiverRecord};
use crate::error::{Error, Result};

/// An exact fraction in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fraction(BigRational);

impl Fraction {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::domain("fraction", "zero denominator"));
        }
        Self::checked(BigRational::new(numer.into(), denom.into()))
    }

    fn checked(r: BigRational) -> Result<Self> {
        if r.is_negative() || r > BigRational::one() {
            return Err(Error::domain("fraction", format!("{r} is outside [0, 1]")));
        }
        Ok(Fraction(r))
    }

    pub fn one() -> Self {
        Fraction(BigRational::one())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts `n/d` or an exact decimal such as `0.1` or `2.5e-1`.
    fn from_str(s: &str) -> Result<Self> {
        Self::checked(parse_exact(s)?)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses `n/d` or a decimal literal into an exact rational. Decimal input is
/// taken at face value, so `0.1` is one tenth rather than the nearest double.
pub(crate) fn parse_exact(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Config(format!("`{s}` is not an exact number"));
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_exact(n)?;
        let d = parse_exact(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = BigRational::from_integer(10.into());
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= num::pow(ten, scale as usize);
    } else {
        r /= num::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -r } else { r })
}

fn exact(v: f64, quantity: &'static str) -> Result<BigRational> {
    BigRational::from_f64(v).ok_or_else(|| Error::domain(quantity, format!("{v} is not finite")))
}

fn round(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatformSpec {
    pub chip_area_mm2: f64,
    /// Thermal design power, W.
    pub tdp_w: f64,
    pub core_count: u32,
}

impl PlatformSpec {
    /// 100-core, 450 mm², 210 W manycore.
    pub fn reference_manycore() -> Self {
        PlatformSpec {
            chip_area_mm2: 450.0,
            tdp_w: 210.0,
            core_count: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.core_count == 0 {
            return Err(Error::domain("core count", "must be at least 1"));
        }
        if !(self.chip_area_mm2 > 0.0 && self.chip_area_mm2.is_finite()) {
            return Err(Error::domain("chip area", "must be positive"));
        }
        if !(self.tdp_w > 0.0 && self.tdp_w.is_finite()) {
            return Err(Error::domain("TDP", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPolicy {
    pub compute_fraction: Fraction,
    pub memory_fraction: Fraction,
    pub noc_fraction: Fraction,
    pub wireless_share_of_noc: Fraction,
    pub conversion_share_of_wireless: Fraction,
    /// bits/s.
    pub target_datarate: f64,
}

impl Default for AllocationPolicy {
    /// Equal thirds per core, half of the NoC to the wireless part, a tenth of
    /// the transceiver to data conversion, 100 Gb/s.
    fn default() -> Self {
        let third = Fraction::new(1, 3).expect("valid");
        AllocationPolicy {
            compute_fraction: third.clone(),
            memory_fraction: third.clone(),
            noc_fraction: third,
            wireless_share_of_noc: Fraction::new(1, 2).expect("valid"),
            conversion_share_of_wireless: Fraction::new(1, 10).expect("valid"),
            target_datarate: 100e9,
        }
    }
}

impl AllocationPolicy {
    pub fn validate(&self) -> Result<()> {
        let sum = self.compute_fraction.0.clone() + self.memory_fraction.0.clone() + self.noc_fraction.0.clone();
        if sum > BigRational::one() {
            return Err(Error::domain(
                "subsystem fractions",
                format!("sum to {sum}, exceeding 1"),
            ));
        }
        for (name, f) in [
            ("NoC fraction", &self.noc_fraction),
            ("wireless share", &self.wireless_share_of_noc),
            ("conversion share", &self.conversion_share_of_wireless),
        ] {
            if f.0.is_zero() {
                return Err(Error::domain(name, "must be non-zero"));
            }
        }
        if !(self.target_datarate > 0.0 && self.target_datarate.is_finite()) {
            return Err(Error::domain("target datarate", "must be positive"));
        }
        Ok(())
    }
}

/// Area and power at every level of the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetCascade {
    pub per_core_area: f64,
    pub per_core_power: f64,
    pub noc_area: f64,
    pub noc_power: f64,
    pub wireless_area: f64,
    pub wireless_power: f64,
    pub wireless_energy_per_bit: f64,
    pub converter_area_target: f64,
    pub converter_power_target: f64,
    pub converter_energy_per_bit_target: f64,
    pub target_datarate: f64,
}

pub fn cascade(platform: &PlatformSpec, policy: &AllocationPolicy) -> Result<BudgetCascade> {
    platform.validate()?;
    policy.validate()?;
    let cores = BigRational::from_integer(platform.core_count.into());
    let rate = exact(policy.target_datarate, "target datarate")?;

    let core_area = exact(platform.chip_area_mm2, "chip area")? / &cores;
    let core_power = exact(platform.tdp_w, "TDP")? / &cores;
    let noc_area = &core_area * policy.noc_fraction.as_ratio();
    let noc_power = &core_power * policy.noc_fraction.as_ratio();
    let wl_area = &noc_area * policy.wireless_share_of_noc.as_ratio();
    let wl_power = &noc_power * policy.wireless_share_of_noc.as_ratio();
    let conv_area = &wl_area * policy.conversion_share_of_wireless.as_ratio();
    let conv_power = &wl_power * policy.conversion_share_of_wireless.as_ratio();

    Ok(BudgetCascade {
        per_core_area: round(&core_area),
        per_core_power: round(&core_power),
        noc_area: round(&noc_area),
        noc_power: round(&noc_power),
        wireless_area: round(&wl_area),
        wireless_power: round(&wl_power),
        wireless_energy_per_bit: round(&(&wl_power / &rate)),
        converter_area_target: round(&conv_area),
        converter_power_target: round(&conv_power),
        converter_energy_per_bit_target: round(&(&conv_power / &rate)),
        target_datarate: policy.target_datarate,
    })
}

/// `power / datarate`, J/bit.
pub fn energy_per_bit(power: f64, datarate: f64) -> Result<f64> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::domain("power", format!("must be positive, got {power}")));
    }
    if !(datarate > 0.0 && datarate.is_finite()) {
        return Err(Error::domain("datarate", format!("must be positive, got {datarate}")));
    }
    Ok(power / datarate)
}

pub fn transceiver_energy_per_bit(record: &TransceiverRecord) -> f64 {
    record.power / record.bitrate
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityComparison {
    pub converter_id: String,
    /// Best converter Nyquist rate per mm², Hz/mm².
    pub converter_density: f64,
    pub transceiver_id: String,
    /// Best transceiver bitrate per mm², (bits/s)/mm².
    pub transceiver_density: f64,
    pub ratio: f64,
}

/// Compares the densest converter (Nyquist sampling, OSR 1) with the densest
/// transceiver. Ties go to the lexicographically first id.
pub fn density_comparison(converters: &Dataset, transceivers: &Dataset) -> Result<DensityComparison> {
    let (cid, cd) = converters
        .records()
        .iter()
        .filter_map(|r| r.area.map(|a| (r.id.as_str(), r.sample_rate / a)))
        .fold(None, best_of)
        .ok_or_else(|| Error::EmptyInput("no converter record with an area".into()))?;
    let (tid, td) = transceivers
        .transceivers()
        .iter()
        .map(|t| (t.id.as_str(), t.bitrate_density()))
        .fold(None, best_of)
        .ok_or_else(|| Error::EmptyInput("no transceiver records".into()))?;
    Ok(DensityComparison {
        converter_id: cid.to_string(),
        converter_density: cd,
        transceiver_id: tid.to_string(),
        transceiver_density: td,
        ratio: cd / td,
    })
}

fn best_of<'a>(acc: Option<(&'a str, f64)>, x: (&'a str, f64)) -> Option<(&'a str, f64)> {
    match acc {
        Some(a) if a.1 > x.1 || (a.1 == x.1 && a.0 <= x.0) => Some(a),
        _ => Some(x),
    }
}
