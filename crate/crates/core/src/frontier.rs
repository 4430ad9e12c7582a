//! Pareto frontiers and yearly-best envelopes.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::dataset::{Dataset, Predicate, SurveyRecord};
use crate::error::{Error, Result};
use crate::metrics::{derive_all, Direction, MetricKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Objective {
    pub key: MetricKey,
    pub direction: Direction,
}

impl Objective {
    pub fn new(key: MetricKey, direction: Direction) -> Self {
        Objective { key, direction }
    }

    /// Parses `ebit:min`, `bandwidth:max`, or a bare key with its preferred
    /// direction.
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((k, d)) => Ok(Objective::new(k.parse()?, d.parse()?)),
            None => {
                let key: MetricKey = s.parse()?;
                Ok(Objective::new(key, key.preferred_direction()))
            }
        }
    }
}

/// True iff `a` is at least as good as `b` everywhere and strictly better
/// somewhere. Vectors shorter than `directions` are missing components.
pub fn dominates(a: &[f64], b: &[f64], directions: &[Direction]) -> Result<bool> {
    for v in [a, b] {
        if v.len() != directions.len() {
            return Err(Error::MissingComponent {
                expected: directions.len(),
                got: v.len(),
            });
        }
    }
    let mut strictly = false;
    for ((&x, &y), &d) in a.iter().zip(b).zip(directions) {
        if d.better(y, x) {
            return Ok(false);
        }
        strictly |= d.better(x, y);
    }
    Ok(strictly)
}

fn dominates_unchecked(a: &[f64], b: &[f64], directions: &[Direction]) -> bool {
    let mut strictly = false;
    for ((&x, &y), &d) in a.iter().zip(b).zip(directions) {
        if d.better(y, x) {
            return false;
        }
        strictly |= d.better(x, y);
    }
    strictly
}

/// Indices of the non-dominated points, ascending.
///
/// Points are visited best-first in lexicographic order. A point can only be
/// dominated by one that precedes it in that order, and anything dominated by
/// a discarded point is also dominated by the frontier member that discarded
/// it, so each candidate is checked against the accepted frontier only.
/// Identical vectors do not dominate each other and are all kept.
pub fn pareto_indices(points: &[Vec<f64>], directions: &[Direction]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lexicographic_best_first(&points[i], &points[j], directions));

    let mut front: Vec<usize> = Vec::new();
    for i in order {
        if !front
            .iter()
            .any(|&f| dominates_unchecked(&points[f], &points[i], directions))
        {
            front.push(i);
        }
    }
    front.sort_unstable();
    front
}

fn lexicographic_best_first(a: &[f64], b: &[f64], directions: &[Direction]) -> Ordering {
    for ((&x, &y), &d) in a.iter().zip(b).zip(directions) {
        let ord = match d {
            Direction::Maximize => y.total_cmp(&x),
            Direction::Minimize => x.total_cmp(&y),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    /// Non-dominated record ids, ordered by year then id.
    pub members: Vec<String>,
    /// Records lacking at least one objective value.
    pub excluded: Vec<String>,
}

type ObjectiveVectors<'a> = (Vec<&'a SurveyRecord>, Vec<Vec<f64>>, Vec<String>);

fn objective_vectors<'a>(dataset: &'a Dataset, objectives: &[Objective], osr: f64) -> Result<ObjectiveVectors<'a>> {
    let mut recs = Vec::new();
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for r in dataset.records() {
        let m = derive_all(r, osr)?;
        let v: Option<Vec<f64>> = objectives.iter().map(|o| o.key.value(r, &m)).collect();
        match v {
            Some(v) => {
                recs.push(r);
                points.push(v);
            }
            None => excluded.push(r.id.clone()),
        }
    }
    Ok((recs, points, excluded))
}

pub fn pareto_frontier(dataset: &Dataset, objectives: &[Objective], osr: f64) -> Result<Frontier> {
    if objectives.is_empty() {
        return Err(Error::EmptyInput("objective list".into()));
    }
    let directions: Vec<Direction> = objectives.iter().map(|o| o.direction).collect();
    let (recs, points, excluded) = objective_vectors(dataset, objectives, osr)?;
    let mut members: Vec<&SurveyRecord> = pareto_indices(&points, &directions)
        .into_iter()
        .map(|i| recs[i])
        .collect();
    members.sort_by(|a, b| a.year.cmp(&b.year).then_with(|| a.id.cmp(&b.id)));
    Ok(Frontier {
        members: members.into_iter().map(|r| r.id.clone()).collect(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePoint {
    pub year: i32,
    pub value: f64,
    pub record_id: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSeries {
    pub key: MetricKey,
    pub direction: Direction,
    /// Strictly increasing in year.
    pub points: Vec<EnvelopePoint>,
}

impl EnvelopeSeries {
    pub fn as_xy(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (f64::from(p.year), p.value)).collect()
    }
}

/// Best value of `key` in each calendar year among eligible records that
/// carry the metric. Ties go to the lexicographically smallest id.
pub fn yearly_envelope(
    dataset: &Dataset,
    key: MetricKey,
    direction: Direction,
    eligibility: &Predicate,
    osr: f64,
) -> Result<EnvelopeSeries> {
    let mut best: BTreeMap<i32, EnvelopePoint> = BTreeMap::new();
    for r in dataset.records().iter().filter(|r| eligibility.matches(r)) {
        let Some(value) = key.value_of(r, osr)? else {
            continue;
        };
        let candidate = EnvelopePoint {
            year: r.year,
            value,
            record_id: r.id.clone(),
        };
        best.entry(r.year)
            .and_modify(|cur| {
                if direction.better(value, cur.value) || (value == cur.value && candidate.record_id < cur.record_id) {
                    *cur = candidate.clone();
                }
            })
            .or_insert(candidate);
    }
    if best.is_empty() {
        return Err(Error::EmptyInput(format!("no eligible records carry `{key}`")));
    }
    Ok(EnvelopeSeries {
        key,
        direction,
        points: best.into_values().collect(),
    })
}
