//! Augmentation chains with their quivers and weights: the shared driver of
//! the CLI and the acceptance checks.

use crate::error::{Error, Result};
use crate::fixtures::{table1_system, TABLE1};
use crate::picard::SurfaceConfig;
use crate::quiver::{build_quiver_of_sections, QuiverOfSections};
use crate::stability::{augment_weight, Weight};
use crate::toric_system::{reduce_to_plane, ChainStep, ToricSystem};

/// Starting toric form on the plane.
pub const PLANE_TORIC: [i64; 2] = [1, 2];

/// One chain step with both quivers and both weights.
#[derive(Clone, Debug)]
pub struct Step {
    pub step: ChainStep,
    pub q: QuiverOfSections,
    pub q0: QuiverOfSections,
    pub weight: Weight,
    pub weight0: Weight,
}

/// Toric forms along a chain: entry `i` is the form after `i` steps.
pub fn chain_weights(steps: &[ChainStep], base: &[i64]) -> Result<Vec<Vec<i64>>> {
    let mut out = vec![base.to_vec()];
    for st in steps {
        let k = st.meta.k.ok_or_else(|| {
            Error::Inadmissible(format!("step to {} uses the last-position augmentation", st.ts))
        })?;
        let next = augment_weight(out.last().expect("nonempty"), k)?;
        out.push(next);
    }
    Ok(out)
}

/// Every step of the chain reducing `ts` to the plane.
pub fn chain_steps(ts: &ToricSystem, cfg: &SurfaceConfig, base: &[i64]) -> Result<Vec<Step>> {
    let chain = reduce_to_plane(ts, cfg)?;
    let tori = chain_weights(&chain.steps, base)?;
    let mut out = Vec::new();
    for (i, st) in chain.steps.iter().enumerate() {
        let q = build_quiver_of_sections(&st.ts, &st.cfg, Some(&st.meta))?;
        let q0 = build_quiver_of_sections(&st.base, &st.base_cfg, None)?;
        out.push(Step {
            step: st.clone(),
            q,
            q0,
            weight: Weight::from_toric(&tori[i + 1]),
            weight0: Weight::from_toric(&tori[i]),
        });
    }
    Ok(out)
}

/// Automatic weight of a system: the plane form augmented along its chain.
pub fn auto_weight(ts: &ToricSystem, cfg: &SurfaceConfig) -> Result<Weight> {
    let chain = reduce_to_plane(ts, cfg)?;
    let tori = chain_weights(&chain.steps, &PLANE_TORIC)?;
    Ok(Weight::from_toric(tori.last().expect("nonempty")))
}

/// Distinct chain steps over the fixture rows of degree `>= min_degree`.
pub fn fixture_steps(min_degree: u32) -> Result<Vec<Step>> {
    let mut out: Vec<Step> = Vec::new();
    for row in TABLE1.iter().filter(|r| r.degree < 9 && r.degree >= min_degree) {
        let (ts, cfg) = table1_system(row.degree)?;
        for st in chain_steps(&ts, &cfg, &PLANE_TORIC)? {
            if !out.iter().any(|o| o.step.ts == st.step.ts && o.step.cfg == st.step.cfg) {
                out.push(st);
            }
        }
    }
    Ok(out)
}

/// The last chain step of a fixture row: its quiver marked as an augmentation.
pub fn fixture_top_step(degree: u32) -> Result<Step> {
    let (ts, cfg) = table1_system(degree)?;
    chain_steps(&ts, &cfg, &PLANE_TORIC)?
        .pop()
        .ok_or_else(|| Error::Config("the plane has no augmentation step".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::fine_moduli_check;

    #[test]
    fn weights_along_the_degree_seven_chain() {
        let step = fixture_top_step(7).unwrap();
        assert_eq!(step.weight0.toric_form(), vec![2, 5, 4]);
        assert_eq!(step.q.n, 5);
        assert!(fine_moduli_check(&step.weight).fine);
        assert!(step.weight.is_admissible());
    }

    #[test]
    fn fixture_steps_are_distinct() {
        let steps = fixture_steps(5).unwrap();
        assert_eq!(steps.len(), 4);
    }
}
