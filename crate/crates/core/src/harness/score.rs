use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{HarnessError, Outcome, RunRecord};

/// Upper edges of the time buckets, in seconds.
const TIME_EDGES: [f64; 8] = [1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 3600.0];
/// Upper edges of the size buckets, in nodes.
const SIZE_EDGES: [usize; 5] = [10, 30, 100, 300, 1000];

/// Pseudo-logarithmic time scale: [0,1) → 0, [1,3) → 1, ... , [1000,3600) → 7,
/// 3600 and beyond → 8.
pub fn time_bucket(seconds: f64) -> usize {
    assert!(seconds >= 0.0, "time_bucket: negative or NaN time {seconds}");
    TIME_EDGES.iter().take_while(|&&e| seconds >= e).count()
}

/// [1,10) → 0, [10,30) → 1, ... , [300,1000) → 4, 1000 and beyond → 5.
pub fn size_bucket(nodes: usize) -> usize {
    assert!(nodes >= 1, "size_bucket: empty expression");
    SIZE_EDGES.iter().take_while(|&&e| nodes >= e).count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineScore {
    pub engine: String,
    pub solved: usize,
    pub uniquely_solved: usize,
    pub among_fastest: usize,
    /// No counterexample found, but no proof either.
    pub unknown_verified: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub outcome: Outcome,
    pub seconds: f64,
    pub time_bucket: usize,
    pub size: Option<usize>,
    pub size_bucket: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkScore {
    pub benchmark: String,
    pub solved_by: Vec<String>,
    pub fastest: Vec<String>,
    pub min_time: Option<f64>,
    pub max_time: Option<f64>,
    pub min_size: Option<usize>,
    pub max_size: Option<usize>,
    pub cells: BTreeMap<String, Cell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub format_version: u32,
    pub engines: Vec<EngineScore>,
    pub benchmarks: Vec<BenchmarkScore>,
}

pub const REPORT_VERSION: u32 = 1;

/// Solved, uniquely-solved and among-the-fastest counts per engine. Only
/// records with outcome `solved` count; the fastest set of a benchmark is
/// every solver whose time bucket equals the best one.
pub fn score(records: &[RunRecord]) -> Result<ScoreReport, HarnessError> {
    let mut grid: BTreeMap<&str, BTreeMap<&str, &RunRecord>> = BTreeMap::new();
    let mut engines: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        engines.insert(&r.engine);
        if grid.entry(&r.benchmark).or_default().insert(&r.engine, r).is_some() {
            return Err(HarnessError::Data(format!("duplicate row for engine `{}` on `{}`", r.engine, r.benchmark)));
        }
    }
    let mut per: BTreeMap<&str, EngineScore> = engines
        .iter()
        .map(|e| {
            let s = EngineScore { engine: e.to_string(), solved: 0, uniquely_solved: 0, among_fastest: 0, unknown_verified: 0 };
            (*e, s)
        })
        .collect();
    let mut benchmarks = Vec::new();
    for (bench, row) in &grid {
        let solved: Vec<&&RunRecord> = row.values().filter(|r| r.outcome == Outcome::Solved).collect();
        for r in row.values().filter(|r| r.outcome == Outcome::UnknownVerified) {
            per.get_mut(r.engine.as_str()).expect("engine").unknown_verified += 1;
        }
        let best = solved.iter().map(|r| time_bucket(r.seconds)).min();
        let fastest: Vec<String> =
            solved.iter().filter(|r| Some(time_bucket(r.seconds)) == best).map(|r| r.engine.clone()).collect();
        for r in &solved {
            let s = per.get_mut(r.engine.as_str()).expect("engine");
            s.solved += 1;
            if solved.len() == 1 {
                s.uniquely_solved += 1;
            }
            if fastest.contains(&r.engine) {
                s.among_fastest += 1;
            }
        }
        let times = solved.iter().map(|r| r.seconds);
        let sizes: Vec<usize> = solved.iter().filter_map(|r| r.size).collect();
        benchmarks.push(BenchmarkScore {
            benchmark: bench.to_string(),
            solved_by: solved.iter().map(|r| r.engine.clone()).collect(),
            fastest,
            min_time: times.clone().reduce(f64::min),
            max_time: times.reduce(f64::max),
            min_size: sizes.iter().min().copied(),
            max_size: sizes.iter().max().copied(),
            cells: row
                .iter()
                .map(|(e, r)| {
                    let cell = Cell {
                        outcome: r.outcome,
                        seconds: r.seconds,
                        time_bucket: time_bucket(r.seconds),
                        size: r.size,
                        size_bucket: r.size.filter(|&n| n > 0).map(size_bucket),
                    };
                    (e.to_string(), cell)
                })
                .collect(),
        });
    }
    Ok(ScoreReport { format_version: REPORT_VERSION, engines: per.into_values().collect(), benchmarks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(bench: &str, engine: &str, outcome: Outcome, seconds: f64) -> RunRecord {
        RunRecord {
            benchmark: bench.into(),
            engine: engine.into(),
            outcome,
            seconds,
            cpu_seconds: None,
            size: (outcome == Outcome::Solved).then_some(5),
            solution: None,
            detail: String::new(),
        }
    }

    #[test]
    fn boundary_probes() {
        assert_eq!(time_bucket(0.5), 0);
        assert_eq!(time_bucket(199.0), 5);
        assert_eq!(time_bucket(3600.0), 8);
        assert_eq!(size_bucket(7), 0);
        assert_eq!(size_bucket(10), 1);
        assert_eq!(size_bucket(1001), 5);
    }

    #[test]
    #[should_panic]
    fn negative_time_is_a_contract_violation() {
        time_bucket(-1.0);
    }

    #[test]
    #[should_panic]
    fn zero_size_is_a_contract_violation() {
        size_bucket(0);
    }

    #[test]
    fn fastest_by_bucket() {
        let rs = vec![
            rec("b", "A", Outcome::Solved, 0.5),
            rec("b", "B", Outcome::Solved, 0.9),
            rec("b", "C", Outcome::Solved, 5.0),
        ];
        let r = score(&rs).unwrap();
        assert_eq!(r.benchmarks[0].fastest, ["A", "B"]);
        let fast: Vec<usize> = r.engines.iter().map(|e| e.among_fastest).collect();
        assert_eq!(fast, [1, 1, 0]);
    }

    #[test]
    fn unique_and_unsolved() {
        let rs = vec![
            rec("one", "A", Outcome::Solved, 2.0),
            rec("one", "B", Outcome::Failed, 1.0),
            rec("none", "A", Outcome::Timeout, 60.0),
            rec("none", "B", Outcome::UnknownVerified, 1.0),
        ];
        let r = score(&rs).unwrap();
        assert_eq!(r.engines[0].uniquely_solved, 1);
        assert_eq!(r.engines[1].unknown_verified, 1);
        let none = r.benchmarks.iter().find(|b| b.benchmark == "none").unwrap();
        assert!(none.solved_by.is_empty() && none.fastest.is_empty());
    }

    #[test]
    fn duplicates_are_rejected() {
        let rs = vec![rec("b", "A", Outcome::Solved, 1.0), rec("b", "A", Outcome::Failed, 1.0)];
        assert!(matches!(score(&rs), Err(HarnessError::Data(_))));
    }
}
