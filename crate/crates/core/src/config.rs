//! Flat `key = value` configuration with dot-namespaced sections.
//!
//! ```text
//! # budget inputs
//! platform.core_count = 100
//! policy.noc_fraction = 1/3
//! spec.preset = table2-adc
//! spec.max_osr = 2
//! ```
//!
//! Missing keys keep their defaults. Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::budget::{AllocationPolicy, Fraction, PlatformSpec};
use crate::error::{Error, Result};
use crate::gap::{preset, Preset, RequirementSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub platform: PlatformSpec,
    pub policy: AllocationPolicy,
    pub spec: Option<RequirementSpec>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            platform: PlatformSpec::reference_manycore(),
            policy: AllocationPolicy::default(),
            spec: None,
        }
    }
}

fn entries(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected `key = value`")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::Config(format!("line {line_no}: empty key or value")));
        }
        if out.insert(k.to_string(), (line_no, v.to_string())).is_some() {
            return Err(Error::Config(format!("line {line_no}: `{k}` set twice")));
        }
    }
    Ok(out)
}

fn parse_as<T: FromStr>(key: &str, line: usize, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("line {line}: `{v}` is not a valid {key}")))
}

fn fraction(key: &str, line: usize, v: &str) -> Result<Fraction> {
    v.parse::<Fraction>()
        .map_err(|e| Error::Config(format!("line {line}: {key}: {e}")))
}

pub fn parse_config(text: &str) -> Result<Config> {
    let mut kv = entries(text.strip_prefix('\u{feff}').unwrap_or(text))?;
    let mut cfg = Config::default();

    if let Some((line, name)) = kv.remove("spec.preset") {
        match preset(&name) {
            Ok(Preset::Converter(s)) => cfg.spec = Some(s),
            Ok(Preset::Scenario(_)) => {
                return Err(Error::Config(format!(
                    "line {line}: `{name}` is a scenario, not a converter spec"
                )))
            }
            Err(e) => return Err(Error::Config(format!("line {line}: {e}"))),
        }
    }

    for (key, (line, v)) in kv {
        let v = v.as_str();
        let p = &mut cfg.platform;
        let q = &mut cfg.policy;
        if let Some(field) = key.strip_prefix("spec.") {
            let s = cfg.spec.get_or_insert_with(|| RequirementSpec::unconstrained("custom"));
            match field {
                "name" => s.name = v.to_string(),
                "min_bandwidth_hz" => s.min_bandwidth = parse_as(&key, line, v)?,
                "min_nyquist_hz" => s.min_nyquist = parse_as(&key, line, v)?,
                "max_osr" => s.max_osr = parse_as(&key, line, v)?,
                "min_enob" => s.min_enob = parse_as(&key, line, v)?,
                "max_area_mm2" => s.max_area = parse_as(&key, line, v)?,
                "max_energy_per_bit_j" => s.max_energy_per_bit = parse_as(&key, line, v)?,
                _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
            }
            continue;
        }
        match key.as_str() {
            "platform.chip_area_mm2" => p.chip_area_mm2 = parse_as(&key, line, v)?,
            "platform.tdp_w" => p.tdp_w = parse_as(&key, line, v)?,
            "platform.core_count" => p.core_count = parse_as(&key, line, v)?,
            "policy.compute_fraction" => q.compute_fraction = fraction(&key, line, v)?,
            "policy.memory_fraction" => q.memory_fraction = fraction(&key, line, v)?,
            "policy.noc_fraction" => q.noc_fraction = fraction(&key, line, v)?,
            "policy.wireless_share_of_noc" => q.wireless_share_of_noc = fraction(&key, line, v)?,
            "policy.conversion_share_of_wireless" => q.conversion_share_of_wireless = fraction(&key, line, v)?,
            "policy.target_datarate_bps" => q.target_datarate = parse_as(&key, line, v)?,
            _ => return Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
        }
    }

    cfg.platform.validate()?;
    cfg.policy.validate()?;
    if let Some(s) = &cfg.spec {
        s.validate()?;
    }
    Ok(cfg)
}

/// Writes every key. Floats use the shortest round-trip form and fractions
/// stay exact, so `parse_config(&write_config(c)) == c`.
pub fn write_config(cfg: &Config) -> String {
    let mut out = String::new();
    let p = &cfg.platform;
    let q = &cfg.policy;
    let _ = writeln!(out, "platform.chip_area_mm2 = {}", p.chip_area_mm2);
    let _ = writeln!(out, "platform.tdp_w = {}", p.tdp_w);
    let _ = writeln!(out, "platform.core_count = {}", p.core_count);
    let _ = writeln!(out, "policy.compute_fraction = {}", q.compute_fraction);
    let _ = writeln!(out, "policy.memory_fraction = {}", q.memory_fraction);
    let _ = writeln!(out, "policy.noc_fraction = {}", q.noc_fraction);
    let _ = writeln!(out, "policy.wireless_share_of_noc = {}", q.wireless_share_of_noc);
    let _ = writeln!(
        out,
        "policy.conversion_share_of_wireless = {}",
        q.conversion_share_of_wireless
    );
    let _ = writeln!(out, "policy.target_datarate_bps = {:e}", q.target_datarate);
    if let Some(s) = &cfg.spec {
        let _ = writeln!(out, "spec.name = {}", s.name);
        let _ = writeln!(out, "spec.min_bandwidth_hz = {:e}", s.min_bandwidth);
        let _ = writeln!(out, "spec.min_nyquist_hz = {:e}", s.min_nyquist);
        let _ = writeln!(out, "spec.max_osr = {}", s.max_osr);
        let _ = writeln!(out, "spec.min_enob = {}", s.min_enob);
        let _ = writeln!(out, "spec.max_area_mm2 = {}", s.max_area);
        let _ = writeln!(out, "spec.max_energy_per_bit_j = {:e}", s.max_energy_per_bit);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_when_empty() {
        assert_eq!(parse_config("# nothing\n\n").unwrap(), Config::default());
    }

    #[test]
    fn preset_round_trips() {
        for s in [RequirementSpec::table2_adc(), RequirementSpec::table2_adc_1bit()] {
            let cfg = Config {
                spec: Some(s),
                ..Config::default()
            };
            let text = write_config(&cfg);
            assert_eq!(parse_config(&text).unwrap(), cfg, "{text}");
        }
    }

    #[test]
    fn infinite_thresholds_round_trip() {
        let cfg = Config {
            spec: Some(RequirementSpec::unconstrained("open")),
            ..Config::default()
        };
        assert_eq!(parse_config(&write_config(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn preset_with_override() {
        let cfg = parse_config("spec.preset = table2-adc\nspec.max_osr = 2 # tighter\n").unwrap();
        let s = cfg.spec.unwrap();
        assert_eq!(s.max_osr, 2.0);
        assert_eq!(s.max_area, 0.1);
    }

    #[test]
    fn fractions_exact() {
        let cfg = parse_config("policy.noc_fraction = 0.25\npolicy.compute_fraction = 1/4\n").unwrap();
        assert_eq!(cfg.policy.noc_fraction, Fraction::new(1, 4).unwrap());
        assert_eq!(cfg.policy.compute_fraction, Fraction::new(1, 4).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "platform.cores = 3",
            "platform.tdp_w = 1\nplatform.tdp_w = 2",
            "platform.tdp_w",
            "platform.tdp_w = ",
            "platform.core_count = 0",
            "policy.noc_fraction = 3/2",
            "policy.compute_fraction = 1/2\npolicy.memory_fraction = 1/2\n",
            "spec.preset = table1-scenario",
            "spec.preset = nope",
            "spec.max_area_mm2 = abc",
            "spec.colour = red",
        ] {
            assert!(parse_config(text).is_err(), "{text}");
        }
    }
}
