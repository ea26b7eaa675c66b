//! Seeded balanced sampling of mined candidates: uniform without
//! replacement per (category, form) cell, capped by the cell quota.
//! Candidates are keyed and sorted before sampling, so the selection
//! depends only on the candidate set, the quota and the seed — not on
//! input order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mine::Candidate;
use crate::corpus::{Category, GenderForm};

/// Per-cell quotas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quota {
    cells: [usize; 4],
}

pub(crate) const CELLS: [(Category, GenderForm); 4] = [
    (Category::Cat1, GenderForm::Feminine),
    (Category::Cat1, GenderForm::Masculine),
    (Category::Cat2, GenderForm::Feminine),
    (Category::Cat2, GenderForm::Masculine),
];

fn cell_index(category: Category, form: GenderForm) -> usize {
    CELLS
        .iter()
        .position(|&(c, f)| c == category && f == form)
        .unwrap()
}

impl Quota {
    /// The same quota for every cell.
    pub fn uniform(per_cell: usize) -> Self {
        Quota {
            cells: [per_cell; 4],
        }
    }

    pub fn new(cat1_f: usize, cat1_m: usize, cat2_f: usize, cat2_m: usize) -> Self {
        Quota {
            cells: [cat1_f, cat1_m, cat2_f, cat2_m],
        }
    }

    pub fn get(&self, category: Category, form: GenderForm) -> usize {
        self.cells[cell_index(category, form)]
    }

    /// Parse `40` (all cells) or `1F=40,1M=40,2F=38,2M=40`.
    pub fn from_spec(spec: &str) -> Result<Self, String> {
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<usize>() {
            return Ok(Quota::uniform(n));
        }
        let mut cells = [0usize; 4];
        for entry in spec.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| format!("quota entry '{entry}' is not CELL=N"))?;
            let idx = match key.trim().to_ascii_uppercase().as_str() {
                "1F" => 0,
                "1M" => 1,
                "2F" => 2,
                "2M" => 3,
                other => return Err(format!("unknown quota cell '{other}' (use 1F,1M,2F,2M)")),
            };
            cells[idx] = value
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("quota value '{value}' is not a number"))?;
        }
        Ok(Quota { cells })
    }
}

/// An under-filled cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shortfall {
    pub category: Category,
    pub form: GenderForm,
    pub requested: usize,
    pub available: usize,
}

/// Selection plus the shortfall report.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceOutcome {
    pub selected: Vec<Candidate>,
    pub shortfalls: Vec<Shortfall>,
}

fn sort_key(c: &Candidate) -> (String, String, String, usize) {
    (
        c.source.clone(),
        c.target.clone(),
        c.rule_id.clone(),
        c.pair_index,
    )
}

/// For each cell, draw `min(quota, available)` candidates uniformly
/// without replacement. Each cell uses its own RNG stream of the seed,
/// so cells never perturb each other.
pub fn balance_sample(candidates: &[Candidate], quota: &Quota, seed: u64) -> BalanceOutcome {
    let mut selected = Vec::new();
    let mut shortfalls = Vec::new();
    for (stream, &(category, form)) in CELLS.iter().enumerate() {
        let mut cell: Vec<&Candidate> = candidates
            .iter()
            .filter(|c| c.category == category && c.form == form)
            .collect();
        cell.sort_by_key(|c| sort_key(c));
        let requested = quota.get(category, form);
        let take = requested.min(cell.len());
        if take < requested {
            shortfalls.push(Shortfall {
                category,
                form,
                requested,
                available: cell.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        // Partial Fisher-Yates: the first `take` slots end up uniform
        // without replacement.
        for i in 0..take {
            let j = rng.gen_range(i..cell.len());
            cell.swap(i, j);
        }
        let mut chosen: Vec<&Candidate> = cell[..take].to_vec();
        chosen.sort_by_key(|c| (c.pair_index, c.rule_id.clone()));
        selected.extend(chosen.into_iter().cloned());
    }
    BalanceOutcome {
        selected,
        shortfalls,
    }
}
