use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use regulie_core::Result;

use crate::checks;
use crate::report::{CheckReport, Measurement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Evolution,
    Bundles,
    Constructions,
    LieTheory,
    Counterexamples,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Evolution,
        Suite::Bundles,
        Suite::Constructions,
        Suite::LieTheory,
        Suite::Counterexamples,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Evolution => "evolution",
            Suite::Bundles => "bundles",
            Suite::Constructions => "constructions",
            Suite::LieTheory => "lie-theory",
            Suite::Counterexamples => "counterexamples",
        }
    }
}

/// A suite name as given on the command line; `all` selects every suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    One(Suite),
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "all" {
            return Ok(Selection::All);
        }
        Suite::ALL
            .iter()
            .find(|x| x.as_str() == s)
            .map(|x| Selection::One(*x))
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.as_str()).collect();
                format!("unknown suite `{s}` (known: all, {})", names.join(", "))
            })
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::All => f.write_str("all"),
            Selection::One(s) => f.write_str(s.as_str()),
        }
    }
}

type CheckFn = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Measurement> + Send + Sync>;

pub struct Check {
    pub id: String,
    pub suite: Suite,
    run: CheckFn,
}

impl Check {
    pub fn new<F>(id: impl Into<String>, suite: Suite, run: F) -> Self
    where
        F: Fn(&mut ChaCha8Rng) -> Result<Measurement> + Send + Sync + 'static,
    {
        Check {
            id: id.into(),
            suite,
            run: Box::new(run),
        }
    }

    pub fn run(&self, seed: u64, scale: f64) -> CheckReport {
        let mut rng = check_rng(seed, &self.id);
        CheckReport::measure(&self.id, scale, || (self.run)(&mut rng))
    }
}

/// FNV-1a of the check id; stable across platforms and releases.
fn stream_of(id: &str) -> u64 {
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The generator a check sees: the run seed, on the check's own stream.
pub fn check_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_of(id));
    rng
}

/// Every registered check, sorted by id.
pub fn registry() -> Vec<Check> {
    let mut all = Vec::new();
    checks::evolution::register(&mut all);
    checks::constructions::register(&mut all);
    checks::bundles::register(&mut all);
    checks::lie_theory::register(&mut all);
    checks::counterexamples::register(&mut all);
    all.sort_by(|a, b| a.id.cmp(&b.id));
    all
}

pub fn select(sel: Selection) -> Vec<Check> {
    registry()
        .into_iter()
        .filter(|c| match sel {
            Selection::All => true,
            Selection::One(s) => c.suite == s,
        })
        .collect()
}

/// Runs the selected checks concurrently; reports come back in id order.
pub fn run_suite(sel: Selection, seed: u64, scale: f64) -> Vec<CheckReport> {
    run_suite_streaming(sel, seed, scale, |_| {})
}

/// Like [`run_suite`], handing each report to `sink` as soon as it and every
/// check before it in id order have finished.
pub fn run_suite_streaming<S>(sel: Selection, seed: u64, scale: f64, mut sink: S) -> Vec<CheckReport>
where
    S: FnMut(&CheckReport),
{
    let checks = select(sel);
    let (tx, rx) = std::sync::mpsc::channel();
    let mut slots: Vec<Option<CheckReport>> = vec![None; checks.len()];
    let mut next = 0;
    // the receiving side stays off the rayon pool so a one-thread pool cannot stall
    std::thread::scope(|scope| {
        scope.spawn(|| {
            checks
                .par_iter()
                .enumerate()
                .for_each_with(tx, |tx, (i, c)| {
                    let _ = tx.send((i, c.run(seed, scale)));
                });
        });
        for (i, report) in rx.iter() {
            slots[i] = Some(report);
            while let Some(Some(r)) = slots.get(next) {
                sink(r);
                next += 1;
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every check reports")).collect()
}
