use rayon::prelude::*;

use super::{solve_level, EigenState, SolverOptions};
use crate::field::{FieldProfile, QuantumNumbers, Spin};
use crate::{Error, Result};

/// Relative separation below which two levels count as degenerate.
pub const TIE_TOLERANCE: f64 = 1e-5;

/// Levels ν = 0..=nu_max of one spin branch at fixed m.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub profile: FieldProfile,
    pub m: i32,
    pub spin: Spin,
    pub levels: Vec<EigenState>,
}

impl Spectrum {
    pub fn alphas(&self) -> Vec<f64> {
        self.levels.iter().map(|s| s.alpha).collect()
    }
}

pub fn spectrum(
    profile: &FieldProfile,
    m: i32,
    spin: Spin,
    nu_max: u32,
    opts: &SolverOptions,
) -> Result<Spectrum> {
    let mut levels = (0..=nu_max)
        .into_par_iter()
        .map(|nu| {
            solve_level(profile, QuantumNumbers::new(m, spin, nu), opts).map_err(|e| Error::Level {
                nu,
                spin,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    levels.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(Spectrum {
        profile: *profile,
        m,
        spin,
        levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergedLevel {
    pub alpha: f64,
    pub spin: Spin,
    pub nu: u32,
    /// Index of the degenerate group this level belongs to.
    pub group: usize,
}

/// Merge both spin branches, sort by α (spin-down first on exact ties) and
/// group levels closer than [`TIE_TOLERANCE`].
pub fn merge_levels(down: &[f64], up: &[f64]) -> Vec<MergedLevel> {
    let mut all: Vec<MergedLevel> = down
        .iter()
        .enumerate()
        .map(|(nu, &alpha)| (alpha, Spin::Down, nu))
        .chain(up.iter().enumerate().map(|(nu, &alpha)| (alpha, Spin::Up, nu)))
        .map(|(alpha, spin, nu)| MergedLevel {
            alpha,
            spin,
            nu: nu as u32,
            group: 0,
        })
        .collect();
    all.sort_by(|a, b| a.alpha.total_cmp(&b.alpha).then(a.spin.cmp(&b.spin)));

    let mut group = 0;
    for i in 1..all.len() {
        let (prev, cur) = (all[i - 1].alpha, all[i].alpha);
        if (cur - prev).abs() > TIE_TOLERANCE * cur.abs().max(1.0) {
            group += 1;
        }
        all[i].group = group;
    }
    // Within a tie group list spin-down first.
    all.sort_by(|a, b| a.group.cmp(&b.group).then(a.spin.cmp(&b.spin)).then(a.alpha.total_cmp(&b.alpha)));
    all
}

/// Labels (`d`/`u`) of the lowest `count` levels of both spin branches.
/// Degenerate groups are parenthesized and always emitted whole, so a tie
/// straddling the cut-off extends the string past `count` labels.
pub fn spin_pattern(profile: &FieldProfile, m: i32, count: usize, opts: &SolverOptions) -> Result<String> {
    if count < 2 {
        return Err(Error::InvalidInput(format!("spin pattern needs count >= 2, got {count}")));
    }
    let nu_max = count as u32;
    let down = spectrum(profile, m, Spin::Down, nu_max, opts)?;
    let up = spectrum(profile, m, Spin::Up, nu_max, opts)?;
    Ok(pattern_string(&merge_levels(&down.alphas(), &up.alphas()), count))
}

pub(crate) fn pattern_string(merged: &[MergedLevel], count: usize) -> String {
    let mut out = String::new();
    let mut emitted = 0;
    let mut i = 0;
    while i < merged.len() && emitted < count {
        let group = merged[i].group;
        let members: Vec<char> = merged[i..]
            .iter()
            .take_while(|l| l.group == group)
            .map(|l| l.spin.label())
            .collect();
        if members.len() > 1 {
            out.push('(');
            out.extend(&members);
            out.push(')');
        } else {
            out.push(members[0]);
        }
        emitted += members.len();
        i += members.len();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_marks_ties() {
        let merged = merge_levels(&[0.0, 2.0, 4.0], &[2.0, 4.0 + 1e-7, 6.0]);
        let groups: Vec<usize> = merged.iter().map(|l| l.group).collect();
        assert_eq!(groups, vec![0, 1, 1, 2, 2, 3]);
        assert_eq!(pattern_string(&merged, 5), "d(du)(du)");
        assert_eq!(pattern_string(&merged, 6), "d(du)(du)u");
    }

    #[test]
    fn pattern_without_ties() {
        let merged = merge_levels(&[0.0, 3.0, 7.0], &[1.0, 5.0, 9.0]);
        assert_eq!(pattern_string(&merged, 6), "dududu");
        assert_eq!(pattern_string(&merged, 3), "dud");
    }

    #[test]
    fn spectrum_is_sorted_and_indexed() {
        let p = FieldProfile::new(1e15, 0.0).unwrap();
        let s = spectrum(&p, 0, Spin::Down, 3, &SolverOptions::default()).unwrap();
        let b = p.reduced_amplitude();
        for (nu, level) in s.levels.iter().enumerate() {
            assert_eq!(level.q.nu as usize, nu);
            assert!((level.alpha / (2.0 * b) - nu as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn count_must_be_at_least_two() {
        let p = FieldProfile::new(1e15, 0.0).unwrap();
        assert!(spin_pattern(&p, 0, 1, &SolverOptions::default()).is_err());
    }
}
