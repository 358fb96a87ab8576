//! JSON instance and solution files, plus bare CSV matrix import.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Realization;
use crate::space::{DistanceSpace, Pair, Solution, WeightedInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub sqdist: Vec<Vec<f64>>,
    pub d: usize,
    #[serde(default)]
    pub k_out: usize,
    #[serde(default)]
    pub k_mod: usize,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_out: Option<Vec<u64>>,
    /// Keys are "i,j" with i < j; missing pairs weigh 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_mod: Option<BTreeMap<String, u64>>,
}

fn parse_pair_key(key: &str) -> Result<Pair> {
    let bad = || Error::InvalidSpec(format!("w_mod key {key:?} is not \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a >= b {
        return Err(bad());
    }
    Pair::new(a, b)
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<WeightedInstance> {
        let space = match &self.labels {
            Some(l) => DistanceSpace::with_labels(l.clone(), &self.sqdist)?,
            None => DistanceSpace::from_rows(&self.sqdist)?,
        };
        let n = space.len();
        let mut inst = WeightedInstance::unit(space, self.d, self.k_out, self.k_mod)?;
        if let Some(w) = &self.w_out {
            inst = inst.with_outlier_weights(w.clone())?;
        }
        for (key, &w) in self.w_mod.iter().flatten() {
            let p = parse_pair_key(key)?;
            if p.hi() >= n {
                return Err(Error::UnknownPoint(p.hi()));
            }
            inst.set_pair_weight(p, w)?;
        }
        let budget = self.budget.unwrap_or_else(|| inst.total_weight());
        Ok(inst.with_budget(budget))
    }

    /// Writes every field explicitly except unit pair weights.
    pub fn from_instance(inst: &WeightedInstance) -> Self {
        let w_mod: BTreeMap<String, u64> =
            inst.non_unit_pair_weights().into_iter().map(|(p, w)| (p.to_string(), w)).collect();
        Self {
            labels: Some(inst.space.labels().to_vec()),
            sqdist: inst.space.rows(),
            d: inst.d,
            k_out: inst.k_out,
            k_mod: inst.k_mod,
            budget: Some(inst.budget),
            w_out: Some(inst.outlier_weights().to_vec()),
            w_mod: (!w_mod.is_empty()).then_some(w_mod),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidSpec(format!("{}: {e}", path.display()))
}

pub fn read_instance(path: &Path) -> Result<WeightedInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_instance(&text)
}

pub fn parse_instance(text: &str) -> Result<WeightedInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    file.to_instance()
}

pub fn instance_json(inst: &WeightedInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst)).expect("plain data serializes")
}

/// A headerless CSV of squared distances; the rest takes defaults.
pub fn read_matrix_csv(path: &Path) -> Result<DistanceSpace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| io_err(path, format!("{f:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    DistanceSpace::from_rows(&rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modification {
    pub pair: [String; 2],
    pub old_sq: f64,
    pub new_sq: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub answer: Answer,
    pub outliers: Vec<String>,
    pub modifications: Vec<Modification>,
    pub cost: u64,
    /// One point per survivor, in index order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<Vec<Vec<f64>>>,
    pub meta: Meta,
}

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

impl SolutionFile {
    pub fn no(meta: Meta) -> Self {
        Self { answer: Answer::No, outliers: Vec::new(), modifications: Vec::new(), cost: 0, realization: None, meta }
    }

    pub fn from_solution(inst: &WeightedInstance, answer: Answer, sol: &Solution, meta: Meta) -> Self {
        let space = &inst.space;
        let modifications = sol
            .modifications
            .iter()
            .map(|(p, &v)| Modification {
                pair: [space.label(p.lo()).to_string(), space.label(p.hi()).to_string()],
                old_sq: space.sq(p.lo(), p.hi()),
                new_sq: v,
            })
            .collect();
        let realization = sol.realization.as_ref().map(|r| {
            sol.survivors(inst.n())
                .iter()
                .map(|i| r.coords.get(i).map(|c| c.iter().map(|&x| round12(x)).collect()).unwrap_or_default())
                .collect()
        });
        Self {
            answer,
            outliers: sol.outliers.iter().map(|&i| space.label(i).to_string()).collect(),
            modifications,
            cost: sol.cost,
            realization,
            meta,
        }
    }

    /// Resolves labels against the instance it answers.
    pub fn to_solution(&self, inst: &WeightedInstance) -> Result<Solution> {
        let space = &inst.space;
        let idx = |l: &str| space.index_of(l).ok_or_else(|| Error::InvalidSpec(format!("unknown label {l:?}")));
        let outliers = self.outliers.iter().map(|l| idx(l)).collect::<Result<_>>()?;
        let mut modifications = BTreeMap::new();
        for m in &self.modifications {
            let (a, b) = (idx(&m.pair[0])?, idx(&m.pair[1])?);
            modifications.insert(Pair::new(a, b)?, m.new_sq);
        }
        let mut sol = Solution { outliers, modifications, realization: None, cost: self.cost };
        if let Some(pts) = &self.realization {
            let survivors = sol.survivors(inst.n());
            if pts.len() != survivors.len() {
                return Err(Error::InvalidSpec("realization length differs from survivor count".into()));
            }
            let mut r = Realization::new(inst.d);
            for (&i, c) in survivors.iter().zip(pts) {
                r.coords.insert(i, c.clone());
            }
            sol.realization = Some(r);
        }
        Ok(sol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{paper_example, paper_witness, vc_reduction};
    use crate::geometry::Geometry;
    use crate::graph::Graph;
    use crate::space::verify_solution;

    #[test]
    fn instance_round_trip() {
        let mut inst = paper_example().with_outlier_weights(vec![1, 2, 3, 1, 1, 1, 1, 1, 1]).unwrap();
        inst.set_pair_weight(Pair(2, 5), 4).unwrap();
        let back = parse_instance(&instance_json(&inst)).unwrap();
        assert_eq!(back, inst);
        let vc = vc_reduction(&Graph::complete(3), 1).unwrap();
        assert_eq!(parse_instance(&instance_json(&vc)).unwrap(), vc);
    }

    #[test]
    fn defaults() {
        let inst = parse_instance(r#"{"sqdist": [[0, 1], [1, 0]], "d": 1}"#).unwrap();
        assert_eq!((inst.k_out, inst.k_mod, inst.budget), (0, 0, 3));
        assert_eq!(inst.space.label(1), "1");
        let w = parse_instance(r#"{"sqdist": [[0, 1], [1, 0]], "d": 1, "w_out": [2, 5], "w_mod": {"0,1": 7}}"#).unwrap();
        assert_eq!(w.budget, 14);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_instance(r#"{"sqdist": [[0, 1], [2, 0]], "d": 1}"#).is_err());
        assert!(parse_instance(r#"{"sqdist": [[0, 1], [1, 0]], "d": 1, "w_mod": {"1,0": 2}}"#).is_err());
        assert!(parse_instance(r#"{"sqdist": [[0, 1], [1, 0]], "d": 1, "w_mod": {"0,5": 2}}"#).is_err());
        assert!(parse_instance("not json").is_err());
    }

    #[test]
    fn solution_round_trip() {
        let g = Geometry::default();
        let inst = paper_example();
        let mut sol = paper_witness();
        let rep = inst.space.apply_modifications(&sol.modifications).unwrap();
        sol.realization = g.realize(&rep, &sol.survivors(9), 2);
        let file = SolutionFile::from_solution(&inst, Answer::Yes, &sol, Meta::default());
        assert_eq!(file.outliers, vec!["7"]);
        assert_eq!(file.modifications[0].pair, ["1".to_string(), "2".to_string()]);
        assert_eq!(file.modifications[0].old_sq, 7.0);
        let text = file.to_json();
        let back: SolutionFile = serde_json::from_str(&text).unwrap();
        let sol2 = back.to_solution(&inst).unwrap();
        assert_eq!(verify_solution(&g, &inst, &sol2), Ok(()));
    }

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-1234567.89012345), -1234567.89012);
    }

    #[test]
    fn csv_import() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "0, 1, 4\n1, 0, 1\n4, 1, 0\n").unwrap();
        let s = read_matrix_csv(&p).unwrap();
        assert_eq!(s.sq(0, 2), 4.0);
        std::fs::write(&p, "0, x\n1, 0\n").unwrap();
        assert!(read_matrix_csv(&p).is_err());
    }
}
