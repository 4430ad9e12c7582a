//! Converter figures of merit and physical bounds.
//!
//! All quantities are in canonical SI units: hertz, watts, joules, dB, with
//! area in mm². Every function here is pure.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dataset::SurveyRecord;
use crate::error::{Error, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Default temperature for the thermal-noise energy floor, K.
pub const DEFAULT_TEMPERATURE: f64 = 300.0;

/// dB per effective bit in the ideal quantiser SNR relation.
const DB_PER_BIT: f64 = 6.02;
/// Full-scale sine offset in the same relation.
const SINE_OFFSET_DB: f64 = 1.76;

/// SNDR implied by an effective number of bits: `6.02·ENOB + 1.76`.
pub fn sndr_from_enob(enob: f64) -> Result<f64> {
    if !(enob >= 0.0) {
        return Err(Error::domain("enob", format!("must be non-negative, got {enob}")));
    }
    Ok(sndr_from_enob_unchecked(enob))
}

pub(crate) fn sndr_from_enob_unchecked(enob: f64) -> f64 {
    DB_PER_BIT * enob + SINE_OFFSET_DB
}

/// Inverse of [`sndr_from_enob`]. Negative results (SNDR below 1.76 dB) are
/// returned as-is.
pub fn enob_from_sndr(sndr: f64) -> f64 {
    (sndr - SINE_OFFSET_DB) / DB_PER_BIT
}

fn check_osr(osr: f64) -> Result<()> {
    if osr >= 1.0 && osr.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("oversampling ratio", format!("must be >= 1, got {osr}")))
    }
}

fn check_positive(quantity: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(quantity, format!("must be positive, got {v}")))
    }
}

/// Nyquist-equivalent rate `f_s / OSR`.
pub fn nyquist_rate(sample_rate: f64, osr: f64) -> Result<f64> {
    check_positive("sample rate", sample_rate)?;
    check_osr(osr)?;
    Ok(sample_rate / osr)
}

/// Signal bandwidth `f_s / (2·OSR)`.
pub fn signal_bandwidth(sample_rate: f64, osr: f64) -> Result<f64> {
    Ok(nyquist_rate(sample_rate, osr)? / 2.0)
}

/// Energy per modulated bit at one bit per hertz: `P / BW`.
pub fn single_bit_energy(power: f64, sample_rate: f64, osr: f64) -> Result<f64> {
    check_positive("power", power)?;
    Ok(power / signal_bandwidth(sample_rate, osr)?)
}

/// Nyquist rate per unit area, Hz/mm².
pub fn sampling_density(nyquist_rate: f64, area: f64) -> Result<f64> {
    check_positive("nyquist rate", nyquist_rate)?;
    check_positive("area", area)?;
    Ok(nyquist_rate / area)
}

/// Schreier figure of merit `SNDR + 10·log10((f_s/2)/P)`, in dB.
pub fn schreier_fom(sndr: f64, sample_rate: f64, power: f64) -> Result<f64> {
    check_positive("sample rate", sample_rate)?;
    check_positive("power", power)?;
    Ok(sndr + 10.0 * (sample_rate / (2.0 * power)).log10())
}

/// Aperture-jitter SNR ceiling `−20·log10(2π·f·σ)` for a full-scale sine at
/// `input_frequency` sampled with RMS clock jitter `jitter_rms`.
pub fn jitter_snr_limit(input_frequency: f64, jitter_rms: f64) -> Result<f64> {
    check_positive("input frequency", input_frequency)?;
    check_positive("jitter", jitter_rms)?;
    Ok(-20.0 * (2.0 * PI * input_frequency * jitter_rms).log10())
}

/// Maximum ENOB permitted by the jitter ceiling.
pub fn jitter_enob_limit(input_frequency: f64, jitter_rms: f64) -> Result<f64> {
    jitter_snr_limit(input_frequency, jitter_rms).map(enob_from_sndr)
}

/// Thermal-noise floor on energy per sample, `8kT·SNR`, with SNR taken as a
/// linear power ratio `10^(SNDR/10)`.
pub fn min_energy_per_sample(sndr: f64, temperature: f64) -> Result<f64> {
    check_positive("temperature", temperature)?;
    Ok(8.0 * BOLTZMANN * temperature * 10f64.powf(sndr / 10.0))
}

/// Floor on single-bit energy at Nyquist rate: two samples per bit of
/// bandwidth, so twice the per-sample floor.
pub fn min_single_bit_energy(sndr: f64, temperature: f64) -> Result<f64> {
    Ok(2.0 * min_energy_per_sample(sndr, temperature)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricWarning {
    /// Neither SNDR nor ENOB was reported; resolution-dependent metrics are absent.
    NoResolution,
    /// ENOB derived from SNDR came out negative.
    NegativeEnob(f64),
}

/// Per-record derived quantities. Fields whose inputs are missing are `None`;
/// nothing is imputed.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedMetrics {
    pub osr: f64,
    pub enob: Option<f64>,
    pub sndr: Option<f64>,
    /// Hz.
    pub bandwidth: f64,
    /// Hz.
    pub nyquist_rate: f64,
    /// J/bit.
    pub single_bit_energy: f64,
    /// Hz/mm².
    pub sampling_density: Option<f64>,
    /// dB.
    pub schreier_fom: Option<f64>,
    pub warnings: Vec<MetricWarning>,
}

/// Computes every metric whose inputs are present on `record`.
pub fn derive_all(record: &SurveyRecord, osr: f64) -> Result<DerivedMetrics> {
    let nyq = nyquist_rate(record.sample_rate, osr)?;
    let bandwidth = nyq / 2.0;
    check_positive("power", record.power)?;
    let single_bit_energy = record.power / bandwidth;
    let sampling_density = record.area.map(|a| sampling_density(nyq, a)).transpose()?;

    let sndr = record.effective_sndr();
    let enob = record.effective_enob();
    let mut warnings = Vec::new();
    if sndr.is_none() {
        warnings.push(MetricWarning::NoResolution);
    }
    if let Some(e) = enob.filter(|e| *e < 0.0) {
        warnings.push(MetricWarning::NegativeEnob(e));
    }
    let schreier_fom = sndr
        .map(|s| schreier_fom(s, record.sample_rate, record.power))
        .transpose()?;

    Ok(DerivedMetrics {
        osr,
        enob,
        sndr,
        bandwidth,
        nyquist_rate: nyq,
        single_bit_energy,
        sampling_density,
        schreier_fom,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" | "maximize" => Ok(Direction::Maximize),
            "min" | "minimize" => Ok(Direction::Minimize),
            other => Err(Error::domain("direction", format!("`{other}` is not max/min"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Maximize => "max",
            Direction::Minimize => "min",
        })
    }
}

/// Physical dimension of a metric, used for display units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Year,
    Nanometre,
    Watt,
    Hertz,
    Decibel,
    Bits,
    SquareMillimetre,
    JoulePerBit,
    HertzPerSquareMillimetre,
}

/// Any numeric quantity that can be read off a record, raw or derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricKey {
    Year,
    TechNode,
    Power,
    SampleRate,
    Sndr,
    Enob,
    Area,
    Bandwidth,
    NyquistRate,
    SingleBitEnergy,
    SamplingDensity,
    SchreierFom,
    /// f_s · 2^ENOB.
    SpeedResolution,
    /// BW · 2^ENOB.
    BandwidthResolution,
}

impl MetricKey {
    pub const ALL: [MetricKey; 14] = [
        MetricKey::Year,
        MetricKey::TechNode,
        MetricKey::Power,
        MetricKey::SampleRate,
        MetricKey::Sndr,
        MetricKey::Enob,
        MetricKey::Area,
        MetricKey::Bandwidth,
        MetricKey::NyquistRate,
        MetricKey::SingleBitEnergy,
        MetricKey::SamplingDensity,
        MetricKey::SchreierFom,
        MetricKey::SpeedResolution,
        MetricKey::BandwidthResolution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKey::Year => "year",
            MetricKey::TechNode => "tech_nm",
            MetricKey::Power => "power_w",
            MetricKey::SampleRate => "fs_hz",
            MetricKey::Sndr => "sndr_db",
            MetricKey::Enob => "enob",
            MetricKey::Area => "area_mm2",
            MetricKey::Bandwidth => "bandwidth_hz",
            MetricKey::NyquistRate => "nyquist_hz",
            MetricKey::SingleBitEnergy => "ebit_j",
            MetricKey::SamplingDensity => "density_hz_per_mm2",
            MetricKey::SchreierFom => "fom_s_db",
            MetricKey::SpeedResolution => "fs_2enob",
            MetricKey::BandwidthResolution => "bw_2enob",
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            MetricKey::Year => Unit::Year,
            MetricKey::TechNode => Unit::Nanometre,
            MetricKey::Power => Unit::Watt,
            MetricKey::SampleRate
            | MetricKey::Bandwidth
            | MetricKey::NyquistRate
            | MetricKey::SpeedResolution
            | MetricKey::BandwidthResolution => Unit::Hertz,
            MetricKey::Sndr | MetricKey::SchreierFom => Unit::Decibel,
            MetricKey::Enob => Unit::Bits,
            MetricKey::Area => Unit::SquareMillimetre,
            MetricKey::SingleBitEnergy => Unit::JoulePerBit,
            MetricKey::SamplingDensity => Unit::HertzPerSquareMillimetre,
        }
    }

    /// Which way is "better" for this metric.
    pub fn preferred_direction(self) -> Direction {
        match self {
            MetricKey::Power | MetricKey::Area | MetricKey::SingleBitEnergy | MetricKey::TechNode => {
                Direction::Minimize
            }
            _ => Direction::Maximize,
        }
    }

    /// Reads the metric from a record and its derived metrics.
    pub fn value(self, record: &SurveyRecord, derived: &DerivedMetrics) -> Option<f64> {
        match self {
            MetricKey::Year => Some(f64::from(record.year)),
            MetricKey::TechNode => record.tech_node,
            MetricKey::Power => Some(record.power),
            MetricKey::SampleRate => Some(record.sample_rate),
            MetricKey::Sndr => derived.sndr,
            MetricKey::Enob => derived.enob,
            MetricKey::Area => record.area,
            MetricKey::Bandwidth => Some(derived.bandwidth),
            MetricKey::NyquistRate => Some(derived.nyquist_rate),
            MetricKey::SingleBitEnergy => Some(derived.single_bit_energy),
            MetricKey::SamplingDensity => derived.sampling_density,
            MetricKey::SchreierFom => derived.schreier_fom,
            MetricKey::SpeedResolution => derived.enob.map(|e| record.sample_rate * e.exp2()),
            MetricKey::BandwidthResolution => derived.enob.map(|e| derived.bandwidth * e.exp2()),
        }
    }

    /// Convenience: derive and read in one step.
    pub fn value_of(self, record: &SurveyRecord, osr: f64) -> Result<Option<f64>> {
        Ok(self.value(record, &derive_all(record, osr)?))
    }
}

impl FromStr for MetricKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Some(k) = MetricKey::ALL.iter().find(|k| k.name() == s) {
            return Ok(*k);
        }
        Ok(match s.as_str() {
            "tech" | "tech_node" | "lambda" => MetricKey::TechNode,
            "power" => MetricKey::Power,
            "fs" | "sample_rate" => MetricKey::SampleRate,
            "sndr" => MetricKey::Sndr,
            "area" => MetricKey::Area,
            "bw" | "bandwidth" => MetricKey::Bandwidth,
            "nyquist" | "fsnyq" => MetricKey::NyquistRate,
            "ebit" | "e_bit" | "energy" => MetricKey::SingleBitEnergy,
            "density" | "sampling_density" => MetricKey::SamplingDensity,
            "fom" | "fom_s" | "schreier" => MetricKey::SchreierFom,
            "speed_resolution" => MetricKey::SpeedResolution,
            "bandwidth_resolution" => MetricKey::BandwidthResolution,
            _ => return Err(Error::UnknownMetric(s)),
        })
    }
}

impl fmt::Display for MetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
