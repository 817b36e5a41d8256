use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::DistributionPlan;
use crate::network::{Link, NodeId};

/// Moves the transfer for `target` from path index `from` to path index `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Advance {
    pub target: NodeId,
    pub from: usize,
    pub to: usize,
}

/// Rounds of advances; one round is one timestep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub rounds: Vec<Vec<Advance>>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Checks that no round uses a link twice and that every path is covered
    /// by contiguous, in-order advances.
    pub fn is_valid_for(&self, plan: &DistributionPlan) -> bool {
        let mut progress: BTreeMap<&NodeId, usize> = plan.paths.keys().map(|t| (t, 0)).collect();
        for round in &self.rounds {
            let mut used = BTreeSet::new();
            for adv in round {
                let (Some(path), Some(pos)) = (plan.paths.get(&adv.target), progress.get_mut(&adv.target)) else {
                    return false;
                };
                if adv.from != *pos || adv.to <= adv.from || adv.to >= path.len() {
                    return false;
                }
                for w in path[adv.from..=adv.to].windows(2) {
                    if !used.insert(Link::new(w[0].clone(), w[1].clone())) {
                        return false;
                    }
                }
                *pos = adv.to;
            }
        }
        plan.paths.iter().all(|(t, p)| progress[t] + 1 == p.len())
    }
}

/// Greedy round construction. Each round visits unfinished transfers with the
/// longest remaining path first (ties by target name) and pushes each along its
/// path until it meets a link already used this round.
pub fn schedule(plan: &DistributionPlan) -> Schedule {
    let mut progress: BTreeMap<&NodeId, usize> = plan
        .paths
        .iter()
        .filter(|(_, p)| p.len() > 1)
        .map(|(t, _)| (t, 0))
        .collect();
    let mut rounds = Vec::new();
    while !progress.is_empty() {
        let mut order: Vec<(&NodeId, usize)> = progress
            .iter()
            .map(|(t, &pos)| (*t, plan.paths[*t].len() - 1 - pos))
            .collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut used = BTreeSet::new();
        let mut round = Vec::new();
        for (target, _) in order {
            let path = &plan.paths[target];
            let from = progress[target];
            let mut pos = from;
            while pos + 1 < path.len() && used.insert(Link::new(path[pos].clone(), path[pos + 1].clone())) {
                pos += 1;
            }
            if pos > from {
                round.push(Advance { target: target.clone(), from, to: pos });
            }
            if pos + 1 == path.len() {
                progress.remove(target);
            } else {
                progress.insert(target, pos);
            }
        }
        rounds.push(round);
    }
    Schedule { rounds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gst::PathStrategy;

    fn plan(root: &str, paths: &[&[&str]]) -> DistributionPlan {
        DistributionPlan {
            root: root.into(),
            paths: paths
                .iter()
                .map(|p| (NodeId::from(*p.last().unwrap()), p.iter().map(|&n| NodeId::from(n)).collect()))
                .collect(),
            strategy: PathStrategy::Shortest,
        }
    }

    #[test]
    fn disjoint_paths_take_one_round() {
        let p = plan("r", &[&["r", "a", "b"], &["r", "c"], &["r", "d", "e", "f"], &["r"]]);
        let s = schedule(&p);
        assert_eq!(s.len(), 1);
        assert!(s.is_valid_for(&p));
    }

    #[test]
    fn empty_plan_has_no_rounds() {
        let p = plan("r", &[&["r"]]);
        assert!(schedule(&p).is_empty());
    }

    #[test]
    fn shared_link_forces_pause() {
        // Both use r-a; the longer one goes first, the other waits.
        let p = plan("r", &[&["r", "a", "b"], &["r", "a"]]);
        let s = schedule(&p);
        assert_eq!(s.len(), 2);
        assert_eq!(s.rounds[0], vec![Advance { target: "b".into(), from: 0, to: 2 }]);
        assert!(s.is_valid_for(&p));
    }

    #[test]
    fn bottleneck_paths_need_two_rounds() {
        let p = plan(
            "root",
            &[&["root", "n1", "s1"], &["root", "n1", "n2", "n3", "s2"], &["root", "n2", "n3", "s3"]],
        );
        let s = schedule(&p);
        assert_eq!(s.len(), 2);
        // The s3 transfer pauses at n2 after its first hop.
        assert!(s.rounds[0].contains(&Advance { target: "s3".into(), from: 0, to: 1 }));
        assert!(s.is_valid_for(&p));
    }

    #[test]
    fn validity_rejects_reused_link() {
        let p = plan("r", &[&["r", "a"], &["r", "a", "b"]]);
        let bad = Schedule {
            rounds: vec![vec![
                Advance { target: "a".into(), from: 0, to: 1 },
                Advance { target: "b".into(), from: 0, to: 2 },
            ]],
        };
        assert!(!bad.is_valid_for(&p));
    }
}
