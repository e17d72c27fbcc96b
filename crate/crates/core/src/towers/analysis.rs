//! Window checks on towers: Mittag-Leffler, pro-triviality and the
//! telescopic normal forms.
//!
//! For periodic towers the checks are exact. With `phi` the composite of one
//! period at stage `i`, the images `Im(i + kP -> i)` are `phi^k(F)`. If two
//! consecutive ones have the same free rank then `phi` restricted to the
//! larger one is a surjection between free groups of equal finite rank, hence
//! injective, so one strict inclusion propagates to every later period.

use rayon::prelude::*;

use super::{ProType, Result, Tower, TowerError};
use crate::free_group::{image, FreeWord, SubgroupGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MlVerdict {
    /// Every analyzed stage has a stable image. `stable_from[i]` is a stage
    /// from which `Im(j -> i)` no longer changes; `stable_ranks[i]` is the
    /// free rank of that stable image.
    HoldsStable {
        stable_from: Vec<usize>,
        stable_ranks: Vec<usize>,
    },
    /// Images at `stage` descend strictly forever; `chain` is a strictly
    /// descending run of them.
    Fails {
        stage: usize,
        chain: Vec<SubgroupGraph>,
    },
    /// Stages whose chain neither stabilized nor was certified to descend.
    Inconclusive { stages: Vec<usize> },
}

impl MlVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            MlVerdict::HoldsStable { .. } => "HOLDS_STABLE",
            MlVerdict::Fails { .. } => "FAILS",
            MlVerdict::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProTrivialWitness {
    /// A nontrivial element lying in every image at the stage.
    StableElement(FreeWord),
    /// Images at the stage descend strictly forever, hence never vanish.
    DescendingChain(Vec<SubgroupGraph>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProTrivialVerdict {
    /// `lags[i]`: least `d` with the composite `i + d -> i` trivial.
    Yes { lags: Vec<usize> },
    No {
        stage: usize,
        witness: ProTrivialWitness,
    },
    Inconclusive { stages: Vec<usize> },
}

impl ProTrivialVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            ProTrivialVerdict::Yes { .. } => "YES",
            ProTrivialVerdict::No { .. } => "NO",
            ProTrivialVerdict::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug)]
enum StageOutcome {
    Stable { from: usize, image: SubgroupGraph },
    Descending { chain: Vec<SubgroupGraph> },
    Undecided,
}

fn check_window(t: &Tower, depth: usize) -> Result<()> {
    match t.last_stage() {
        Some(w) if depth > w => Err(TowerError::WindowExhausted { depth, window: w }),
        _ => Ok(()),
    }
}

fn explicit_stage(t: &Tower, i: usize, window: usize) -> Result<StageOutcome> {
    let mut comp = crate::free_group::FreeHom::identity(t.rank(i)?);
    let mut images = Vec::with_capacity(window - i + 1);
    images.push(SubgroupGraph::full(t.rank(i)?));
    for j in i + 1..=window {
        comp = comp.compose(&t.bond(j)?)?;
        images.push(image(&comp, None)?);
    }
    let n = images.len();
    if n < 2 || images[n - 1] != images[n - 2] {
        return Ok(StageOutcome::Undecided);
    }
    let last = &images[n - 1];
    let first = images.iter().position(|h| h == last).unwrap();
    Ok(StageOutcome::Stable {
        from: i + first,
        image: last.clone(),
    })
}

fn periodic_stage(t: &Tower, i: usize, period: usize) -> Result<StageOutcome> {
    let phi = t.composite(i + period, i)?;
    let mut current = SubgroupGraph::full(t.rank(i)?);
    let mut chain = vec![current.clone()];
    let mut k = 0;
    loop {
        let next = image(&phi, Some(&current))?;
        if next == current {
            let from = refine_stable_from(t, i, period, k, &current)?;
            return Ok(StageOutcome::Stable {
                from,
                image: current,
            });
        }
        if next.graph_rank() == current.graph_rank() {
            let third = image(&phi, Some(&next))?;
            chain.push(next);
            chain.push(third);
            return Ok(StageOutcome::Descending { chain });
        }
        chain.push(next.clone());
        current = next;
        k += 1;
    }
}

/// Least stage in the last period before stabilization whose image already
/// equals the stable one.
fn refine_stable_from(
    t: &Tower,
    i: usize,
    period: usize,
    k: usize,
    stable: &SubgroupGraph,
) -> Result<usize> {
    if k == 0 {
        return Ok(i);
    }
    let lo = i + (k - 1) * period + 1;
    for j in lo..i + k * period {
        if image(&t.composite(j, i)?, None)? == *stable {
            return Ok(j);
        }
    }
    Ok(i + k * period)
}

/// Transfer the outcome at the first periodic stage down to a prefix stage.
fn prefix_stage(t: &Tower, i: usize, s0: usize, at_s0: &StageOutcome) -> Result<StageOutcome> {
    let beta = t.composite(s0, i)?;
    match at_s0 {
        StageOutcome::Stable { from, image: h } => Ok(StageOutcome::Stable {
            from: *from,
            image: image(&beta, Some(h))?,
        }),
        StageOutcome::Descending { chain } => {
            let tail = &chain[chain.len() - 3..];
            let pushed = tail
                .iter()
                .map(|h| image(&beta, Some(h)))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if pushed[0].graph_rank() == tail[0].graph_rank() && verify_descending(&pushed) {
                Ok(StageOutcome::Descending { chain: pushed })
            } else {
                Ok(StageOutcome::Undecided)
            }
        }
        StageOutcome::Undecided => Ok(StageOutcome::Undecided),
    }
}

fn telescopic_stage(t: &Tower, i: usize) -> Result<StageOutcome> {
    let next = image(&t.bond(i + 1)?, None)?;
    if next.is_full() {
        Ok(StageOutcome::Stable {
            from: i,
            image: next,
        })
    } else {
        Ok(StageOutcome::Undecided)
    }
}

fn stage_outcomes(t: &Tower, depth: usize) -> Result<Vec<StageOutcome>> {
    check_window(t, depth)?;
    match t {
        Tower::Explicit(e) => {
            let w = e.window();
            (0..depth)
                .into_par_iter()
                .map(|i| explicit_stage(t, i, w))
                .collect()
        }
        Tower::Telescopic(_) => (0..depth)
            .into_par_iter()
            .map(|i| telescopic_stage(t, i))
            .collect(),
        Tower::Periodic(p) => {
            let s0 = p.periodic_from();
            let period = p.period();
            let at_s0 = if s0 > 0 && depth > 0 {
                Some(periodic_stage(t, s0, period)?)
            } else {
                None
            };
            (0..depth)
                .into_par_iter()
                .map(|i| {
                    if i >= s0 {
                        periodic_stage(t, i, period)
                    } else {
                        prefix_stage(t, i, s0, at_s0.as_ref().unwrap())
                    }
                })
                .collect()
        }
    }
}

/// Mittag-Leffler check on stages `0..depth`.
pub fn mittag_leffler(t: &Tower, depth: usize) -> Result<MlVerdict> {
    let outcomes = stage_outcomes(t, depth)?;
    for (stage, o) in outcomes.iter().enumerate() {
        if let StageOutcome::Descending { chain } = o {
            return Ok(MlVerdict::Fails {
                stage,
                chain: chain.clone(),
            });
        }
    }
    let undecided: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| matches!(o, StageOutcome::Undecided))
        .map(|(i, _)| i)
        .collect();
    if !undecided.is_empty() {
        return Ok(MlVerdict::Inconclusive { stages: undecided });
    }
    let (stable_from, stable_ranks) = outcomes
        .into_iter()
        .map(|o| match o {
            StageOutcome::Stable { from, image } => (from, image.graph_rank()),
            _ => unreachable!("only stable outcomes remain"),
        })
        .unzip();
    Ok(MlVerdict::HoldsStable {
        stable_from,
        stable_ranks,
    })
}

/// Window evidence: the stable-image rank at each analyzed stage, `None`
/// where the chain did not stabilize.
pub fn stable_image_ranks(t: &Tower, depth: usize) -> Result<Vec<Option<usize>>> {
    Ok(stage_outcomes(t, depth)?
        .into_iter()
        .map(|o| match o {
            StageOutcome::Stable { image, .. } => Some(image.graph_rank()),
            _ => None,
        })
        .collect())
}

/// Whether each subgroup strictly contains the next.
pub fn verify_descending(chain: &[SubgroupGraph]) -> bool {
    chain.len() >= 2
        && chain
            .windows(2)
            .all(|w| w[0] != w[1] && w[0].contains_subgroup(&w[1]).unwrap_or(false))
}

/// Least `d <= limit - i` with the composite `i + d -> i` trivial.
fn trivial_lag(t: &Tower, i: usize, limit: usize) -> Result<Option<usize>> {
    let mut comp = crate::free_group::FreeHom::identity(t.rank(i)?);
    if comp.is_trivial() {
        return Ok(Some(0));
    }
    for j in i + 1..=limit {
        comp = comp.compose(&t.bond(j)?)?;
        if comp.is_trivial() {
            return Ok(Some(j - i));
        }
    }
    Ok(None)
}

/// Pro-triviality check on stages `0..depth`.
pub fn pro_trivial(t: &Tower, depth: usize) -> Result<ProTrivialVerdict> {
    check_window(t, depth)?;
    let mut lags = Vec::with_capacity(depth);
    let mut undecided = Vec::new();
    match t {
        Tower::Explicit(_) => {
            for i in 0..depth {
                match trivial_lag(t, i, depth)? {
                    Some(d) => lags.push(d),
                    None => undecided.push(i),
                }
            }
        }
        Tower::Telescopic(_) => {
            for i in 0..depth {
                if t.rank(i)? > 0 {
                    return Ok(ProTrivialVerdict::No {
                        stage: i,
                        witness: ProTrivialWitness::StableElement(FreeWord::generator(
                            t.rank(i)?,
                            1,
                        )?),
                    });
                }
                lags.push(0);
            }
        }
        Tower::Periodic(_) => {
            let outcomes = stage_outcomes(t, depth)?;
            for (i, o) in outcomes.into_iter().enumerate() {
                match o {
                    StageOutcome::Stable { from, image } if image.is_trivial() => {
                        let d = trivial_lag(t, i, from)?
                            .expect("stable trivial image is reached by its stage");
                        lags.push(d);
                    }
                    StageOutcome::Stable { image, .. } => {
                        return Ok(ProTrivialVerdict::No {
                            stage: i,
                            witness: ProTrivialWitness::StableElement(image.basis()[0].clone()),
                        });
                    }
                    StageOutcome::Descending { chain } => {
                        return Ok(ProTrivialVerdict::No {
                            stage: i,
                            witness: ProTrivialWitness::DescendingChain(chain),
                        });
                    }
                    StageOutcome::Undecided => undecided.push(i),
                }
            }
        }
    }
    if undecided.is_empty() {
        Ok(ProTrivialVerdict::Yes { lags })
    } else {
        Ok(ProTrivialVerdict::Inconclusive { stages: undecided })
    }
}

/// Normal form of a standard telescopic tower.
pub fn telescopic_type(t: &Tower) -> Result<ProType> {
    let Tower::Telescopic(inc) = t else {
        return Err(TowerError::NotStandard);
    };
    Ok(match inc.final_rank() {
        None => ProType::TelescopicInf,
        Some(r) => ProType::stable_free(r),
    })
}

/// Pro-isomorphism of standard telescopic towers, decided on normal forms.
pub fn pro_iso_telescopic(a: &Tower, b: &Tower) -> Result<bool> {
    Ok(telescopic_type(a)? == telescopic_type(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::{fold, FreeHom};
    use crate::towers::{ExplicitTower, Increments, PeriodicTower, Tail};
    use proptest::prelude::*;

    fn word(rank: usize, s: &str) -> FreeWord {
        FreeWord::parse(rank, s).unwrap()
    }

    fn periodic(prefix: Vec<usize>, pb: &[&str], block: Vec<usize>, bb: &[&str]) -> Tower {
        let mut ranks = prefix.clone();
        ranks.extend(block.iter().copied());
        let hom = |stage: usize, s: &str| {
            let target = if stage == prefix.len() {
                *prefix.last().unwrap()
            } else {
                ranks[stage - 1]
            };
            FreeHom::parse(ranks[stage], target, s).unwrap()
        };
        let prefix_bonds = pb.iter().enumerate().map(|(i, s)| hom(i + 1, s)).collect();
        let period_bonds = bb
            .iter()
            .enumerate()
            .map(|(m, s)| hom(prefix.len() + m, s))
            .collect();
        Tower::Periodic(PeriodicTower::new(prefix.clone(), prefix_bonds, block, period_bonds).unwrap())
    }

    fn dyadic() -> Tower {
        periodic(vec![1], &[], vec![1], &["a->a a"])
    }

    #[test]
    fn dyadic_fails_at_stage_zero() {
        match mittag_leffler(&dyadic(), 4).unwrap() {
            MlVerdict::Fails { stage, chain } => {
                assert_eq!(stage, 0);
                let expected: Vec<SubgroupGraph> = ["a", "aa", "aaaa"]
                    .iter()
                    .map(|s| fold(1, &[word(1, s)]).unwrap())
                    .collect();
                assert_eq!(chain, expected);
                assert!(verify_descending(&chain));
            }
            other => panic!("expected FAILS, got {other:?}"),
        }
    }

    #[test]
    fn telescopic_holds_with_full_images() {
        let t = Tower::telescopic(Increments::repeat_last(vec![1, 1]).unwrap());
        match mittag_leffler(&t, 6).unwrap() {
            MlVerdict::HoldsStable {
                stable_from,
                stable_ranks,
            } => {
                assert_eq!(stable_from, vec![0, 1, 2, 3, 4, 5]);
                assert_eq!(stable_ranks, vec![1, 2, 3, 4, 5, 6]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_free_tower_holds() {
        let t = periodic(vec![2], &[], vec![2], &["a->a, b->b"]);
        assert_eq!(
            mittag_leffler(&t, 5).unwrap(),
            MlVerdict::HoldsStable {
                stable_from: (0..5).collect(),
                stable_ranks: vec![2; 5],
            }
        );
    }

    #[test]
    fn killing_a_generator_stabilizes_after_one_period() {
        let t = periodic(vec![2], &[], vec![2], &["a->a, b->1"]);
        match mittag_leffler(&t, 3).unwrap() {
            MlVerdict::HoldsStable {
                stable_from,
                stable_ranks,
            } => {
                assert_eq!(stable_from, vec![1, 2, 3]);
                assert_eq!(stable_ranks, vec![1, 1, 1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prefix_inherits_certificate() {
        // Degree-three prefix bond above the dyadic tail.
        let t = periodic(vec![1, 1], &["a->a a a"], vec![1], &["a->a a"]);
        match mittag_leffler(&t, 3).unwrap() {
            MlVerdict::Fails { stage, chain } => {
                assert_eq!(stage, 0);
                assert!(verify_descending(&chain));
            }
            other => panic!("{other:?}"),
        }
        // A trivial prefix bond kills the certificate but not the failure.
        let t = periodic(vec![1, 1], &["a->1"], vec![1], &["a->a a"]);
        assert_eq!(
            mittag_leffler(&t, 3).unwrap(),
            MlVerdict::Fails {
                stage: 1,
                chain: ["a", "aa", "aaaa"]
                    .iter()
                    .map(|s| fold(1, &[word(1, s)]).unwrap())
                    .collect()
            }
        );
    }

    #[test]
    fn explicit_window() {
        let t = dyadic().unroll(3).unwrap();
        let t = Tower::Explicit(t);
        assert_eq!(
            mittag_leffler(&t, 3).unwrap(),
            MlVerdict::Inconclusive {
                stages: vec![0, 1, 2]
            }
        );
        assert!(matches!(
            mittag_leffler(&t, 4),
            Err(TowerError::WindowExhausted {
                depth: 4,
                window: 3
            })
        ));
        let id = Tower::Explicit(
            ExplicitTower::new(vec![2, 2, 2], vec![FreeHom::identity(2), FreeHom::identity(2)])
                .unwrap(),
        );
        assert!(matches!(
            mittag_leffler(&id, 2).unwrap(),
            MlVerdict::HoldsStable { .. }
        ));
    }

    #[test]
    fn pro_trivial_cases() {
        let kill = FreeHom::parse(2, 2, "a->1, b->1").unwrap();
        let t = Tower::Explicit(
            ExplicitTower::new(vec![2, 2, 2, 2], vec![kill.clone(), kill.clone(), kill]).unwrap(),
        );
        assert_eq!(
            pro_trivial(&t, 3).unwrap(),
            ProTrivialVerdict::Yes {
                lags: vec![1, 1, 1]
            }
        );
        let z = Tower::telescopic(Increments::new(vec![1], Tail::Zero).unwrap());
        assert!(matches!(
            pro_trivial(&z, 4).unwrap(),
            ProTrivialVerdict::No { stage: 0, .. }
        ));
        let zero = Tower::telescopic(Increments::new(vec![0], Tail::Zero).unwrap());
        assert_eq!(
            pro_trivial(&zero, 2).unwrap(),
            ProTrivialVerdict::Yes { lags: vec![0, 0] }
        );
        assert!(matches!(
            pro_trivial(&dyadic(), 2).unwrap(),
            ProTrivialVerdict::No {
                stage: 0,
                witness: ProTrivialWitness::DescendingChain(_)
            }
        ));
        let dead = periodic(vec![2], &[], vec![2], &["a->1, b->1"]);
        assert_eq!(
            pro_trivial(&dead, 3).unwrap(),
            ProTrivialVerdict::Yes {
                lags: vec![1, 1, 1]
            }
        );
    }

    #[test]
    fn telescopic_types() {
        let ty = |prefix: Vec<usize>, tail: Tail| {
            telescopic_type(&Tower::telescopic(Increments::new(prefix, tail).unwrap())).unwrap()
        };
        assert_eq!(ty(vec![0, 0], Tail::Repeat(vec![0])), ProType::Trivial);
        assert_eq!(ty(vec![1], Tail::Zero), ProType::ProZ);
        assert_eq!(ty(vec![1], Tail::Repeat(vec![1])), ProType::TelescopicInf);
        assert_eq!(ty(vec![2, 1], Tail::Zero), ProType::StableFree(3));
        assert_eq!(
            telescopic_type(&dyadic()),
            Err(TowerError::NotStandard)
        );
    }

    #[test]
    fn pro_iso_examples() {
        let ones = Tower::telescopic(Increments::repeat_last(vec![1]).unwrap());
        let block = Tower::telescopic(Increments::new(vec![], Tail::Repeat(vec![5, 0])).unwrap());
        let z = Tower::telescopic(Increments::new(vec![1], Tail::Zero).unwrap());
        assert!(pro_iso_telescopic(&ones, &block).unwrap());
        assert!(!pro_iso_telescopic(&z, &ones).unwrap());
        assert!(pro_iso_telescopic(&z, &z).unwrap());
        // window evidence distinguishing the two
        let rz = stable_image_ranks(&z, 5).unwrap();
        let ro = stable_image_ranks(&ones, 5).unwrap();
        assert!(rz.iter().all(|r| *r == Some(1)));
        assert_eq!(ro.last(), Some(&Some(5)));
    }

    fn increments() -> impl Strategy<Value = Increments> {
        (
            proptest::collection::vec(0usize..3, 0..4),
            prop_oneof![
                Just(None),
                proptest::collection::vec(0usize..3, 1..3).prop_map(Some)
            ],
        )
            .prop_map(|(prefix, block)| {
                let tail = block.map(Tail::Repeat).unwrap_or(Tail::Zero);
                Increments::new(prefix, tail).unwrap()
            })
    }

    proptest! {
        #[test]
        fn pro_iso_is_an_equivalence(a in increments(), b in increments(), c in increments()) {
            let (a, b, c) = (Tower::telescopic(a), Tower::telescopic(b), Tower::telescopic(c));
            prop_assert!(pro_iso_telescopic(&a, &a).unwrap());
            prop_assert_eq!(pro_iso_telescopic(&a, &b).unwrap(), pro_iso_telescopic(&b, &a).unwrap());
            if pro_iso_telescopic(&a, &b).unwrap() && pro_iso_telescopic(&b, &c).unwrap() {
                prop_assert!(pro_iso_telescopic(&a, &c).unwrap());
            }
        }

        #[test]
        fn telescopic_always_holds(inc in increments()) {
            let t = Tower::telescopic(inc);
            let verdict = mittag_leffler(&t, 5).unwrap();
            match verdict {
                MlVerdict::HoldsStable { stable_ranks, .. } => {
                    for (i, r) in stable_ranks.iter().enumerate() {
                        prop_assert_eq!(*r, t.rank(i).unwrap());
                    }
                }
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
