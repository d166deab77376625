//! Certificate replay.
//!
//! Deliberately self-contained: simplices are re-encoded over a sorted copy of
//! the label universe and every free-face condition is re-derived from the
//! current simplex set, so a bug in the producers cannot hide here.

use std::collections::{BTreeSet, HashMap, HashSet};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::CollapseCertificate;
use crate::par;
use crate::simplicial::SimplicialComplex;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("initial fingerprint {found} does not match certificate {expected}")]
    InitialMismatch { expected: String, found: String },
    #[error("final fingerprint {found} does not match certificate {expected}")]
    FinalMismatch { expected: String, found: String },
    #[error("the starting complex is not downward closed")]
    NotClosed,
    #[error("step {step}: {reason}")]
    BadStep { step: usize, reason: String },
    #[error("replay ends at a different complex than expected")]
    WrongEnd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub steps: usize,
    /// Surviving simplices as sorted label lists.
    pub final_sets: BTreeSet<Vec<String>>,
}

type Cell = Vec<u32>;

struct State {
    names: Vec<String>,
    ids: HashMap<String, u32>,
    cells: HashSet<Cell>,
}

impl State {
    fn load(k: &SimplicialComplex) -> State {
        let mut names: Vec<String> = k.labels().iter().cloned().collect();
        names.sort();
        let ids = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect::<HashMap<_, _>>();
        let cells = k
            .iter()
            .map(|s| {
                let mut c: Cell = s.vertices().iter().map(|&v| ids[&k.labels()[v as usize]]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        State { names, ids, cells }
    }

    fn encode(&self, labels: &[String]) -> Option<Cell> {
        let mut c = labels.iter().map(|l| self.ids.get(l).copied()).collect::<Option<Cell>>()?;
        c.sort_unstable();
        let before = c.len();
        c.dedup();
        (c.len() == before && !c.is_empty()).then_some(c)
    }

    fn plus(c: &Cell, v: u32) -> Cell {
        let mut out = c.clone();
        let pos = out.binary_search(&v).unwrap_err();
        out.insert(pos, v);
        out
    }

    fn closed(&self) -> bool {
        self.cells.iter().all(|c| {
            c.len() == 1
                || (0..c.len()).all(|skip| {
                    let f: Cell = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    self.cells.contains(&f)
                })
        })
    }

    fn maximal(&self) -> Vec<&Cell> {
        let n = self.names.len() as u32;
        self.cells
            .iter()
            .filter(|c| (0..n).all(|v| c.binary_search(&v).is_ok() || !self.cells.contains(&State::plus(c, v))))
            .collect()
    }

    fn fingerprint(&self) -> String {
        let mut lists: Vec<Vec<&str>> = self
            .maximal()
            .into_iter()
            .map(|c| {
                let mut v: Vec<&str> = c.iter().map(|&i| self.names[i as usize].as_str()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        lists.sort_unstable();
        let mut h = Sha256::new();
        for (i, l) in lists.iter().enumerate() {
            if i > 0 {
                h.update([0x1e]);
            }
            h.update(l.join("\u{1f}").as_bytes());
        }
        hex::encode(&h.finalize()[..16])
    }

    fn step(&mut self, free: &[String], coface: &[String]) -> Result<(), String> {
        let tau = self.encode(free).ok_or("free face has unknown or repeated labels")?;
        let sigma = self.encode(coface).ok_or("coface has unknown or repeated labels")?;
        if tau.len() >= sigma.len() || !tau.iter().all(|v| sigma.binary_search(v).is_ok()) {
            return Err("free face is not a proper face of the coface".into());
        }
        if !self.cells.contains(&tau) || !self.cells.contains(&sigma) {
            return Err("free face or coface already removed".into());
        }
        let n = self.names.len() as u32;
        for v in 0..n {
            let in_tau = tau.binary_search(&v).is_ok();
            let in_sigma = sigma.binary_search(&v).is_ok();
            if !in_tau && !in_sigma && self.cells.contains(&State::plus(&tau, v)) {
                return Err(format!(
                    "free face has a coface through {:?} outside the coface",
                    self.names[v as usize]
                ));
            }
            if !in_sigma && self.cells.contains(&State::plus(&sigma, v)) {
                return Err(format!("coface is not maximal: extends by {:?}", self.names[v as usize]));
            }
        }
        let extra: Vec<u32> = sigma.iter().copied().filter(|v| tau.binary_search(v).is_err()).collect();
        for mask in 0u64..(1u64 << extra.len()) {
            let mut rho = tau.clone();
            for (i, &v) in extra.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    rho.push(v);
                }
            }
            rho.sort_unstable();
            self.cells.remove(&rho);
        }
        Ok(())
    }

    fn label_sets(&self) -> BTreeSet<Vec<String>> {
        self.cells
            .iter()
            .map(|c| c.iter().map(|&i| self.names[i as usize].clone()).collect())
            .collect()
    }
}

/// Replays `cert` from `initial`, checking fingerprints and every step.
pub fn replay(initial: &SimplicialComplex, cert: &CollapseCertificate) -> Result<ReplayOutcome, ReplayError> {
    let mut st = State::load(initial);
    if !st.closed() {
        return Err(ReplayError::NotClosed);
    }
    let found = st.fingerprint();
    if found != cert.initial {
        return Err(ReplayError::InitialMismatch {
            expected: cert.initial.clone(),
            found,
        });
    }
    for (i, s) in cert.steps.iter().enumerate() {
        st.step(&s.free_face, &s.coface)
            .map_err(|reason| ReplayError::BadStep { step: i, reason })?;
    }
    let found = st.fingerprint();
    if found != cert.final_ {
        return Err(ReplayError::FinalMismatch {
            expected: cert.final_.clone(),
            found,
        });
    }
    Ok(ReplayOutcome {
        steps: cert.steps.len(),
        final_sets: st.label_sets(),
    })
}

/// [`replay`], then require the survivors to be exactly `expected`.
pub fn replay_to(
    initial: &SimplicialComplex,
    cert: &CollapseCertificate,
    expected: &SimplicialComplex,
) -> Result<ReplayOutcome, ReplayError> {
    let out = replay(initial, cert)?;
    let want: BTreeSet<Vec<String>> = expected
        .iter()
        .map(|s| {
            let mut v: Vec<String> = s.vertices().iter().map(|&i| expected.labels()[i as usize].clone()).collect();
            v.sort();
            v
        })
        .collect();
    if out.final_sets != want {
        return Err(ReplayError::WrongEnd);
    }
    Ok(out)
}

/// Independent replays, in parallel when enabled.
pub fn replay_all(jobs: &[(&SimplicialComplex, &CollapseCertificate)]) -> Vec<Result<ReplayOutcome, ReplayError>> {
    par::map(jobs, |(k, c)| replay(k, c))
}
