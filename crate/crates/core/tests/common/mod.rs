#![allow(dead_code)]

use listcol::logspace::{classify, implicit_position, Constraint, StepResult, Transition};
use listcol::oracle::brute_subtree;
use listcol::{Colour, Instance, RootedTree, WorkspaceMeter};

/// `L_level(u)` by brute force: colours of `L(u)` that every light subtree
/// of `u` in brackets above `level` can avoid at its root.
pub fn brute_implicit_list(inst: &Instance, tree: &RootedTree, u: usize, level: usize) -> Vec<Colour> {
    inst.lists
        .get(u)
        .iter()
        .copied()
        .filter(|&a| {
            tree.light_children(u)
                .filter(|&c| tree.child_bracket(u, c) > level)
                .all(|c| brute_subtree(inst, tree, c, Some(a)))
        })
        .collect()
}

/// Expected step result at `v` when it must avoid `forbidden`.
pub fn brute_step(inst: &Instance, tree: &RootedTree, v: usize, forbidden: Option<Colour>) -> StepResult {
    if tree.is_leaf(v) {
        return StepResult::Leaf(inst.lists.get(v).iter().any(|&a| Some(a) != forbidden));
    }
    let usable: Vec<Colour> = brute_implicit_list(inst, tree, v, 0)
        .into_iter()
        .filter(|&a| Some(a) != forbidden)
        .collect();
    let all_light_ok = tree.light_children(v).all(|c| brute_subtree(inst, tree, c, None));
    match usable.len() {
        _ if !all_light_ok => StepResult::Inner(Transition::Rej),
        0 => StepResult::Inner(Transition::Rej),
        1 => {
            let l0 = brute_implicit_list(inst, tree, v, 0);
            let p0 = l0.iter().position(|&a| a == usable[0]).unwrap() as u64 + 1;
            StepResult::Inner(Transition::Cr(p0))
        }
        _ => StepResult::Inner(Transition::Nc),
    }
}

/// Compares the solvers' subtree procedures with the brute-force oracles on
/// one instance; returns the number of checks and every disagreement.
pub fn subtree_disagreements(inst: &Instance) -> (usize, Vec<String>) {
    let tree = RootedTree::new(&inst.graph).unwrap();
    let n = inst.n();
    let mut bad = Vec::new();
    let mut checks = 0;
    for v in 0..n {
        for p in 0..=inst.lists.len_of(v) as u64 {
            let mut m = WorkspaceMeter::new(n);
            let expect = brute_subtree(inst, &tree, v, inst.lists.at(v, p));
            checks += 1;
            if listcol::log2::solve_subtree(inst, &tree, v, p, &mut m) != expect {
                bad.push(format!("solve_subtree v={} p={p}", v + 1));
            }
        }
        for level in 0..=tree.bracket_params(v).m {
            let list = brute_implicit_list(inst, &tree, v, level);
            for pos in 1..=inst.lists.len_of(v) as u64 + 1 {
                let mut m = WorkspaceMeter::new(n);
                let got = implicit_position(inst, &tree, v, level, pos, &mut m);
                let want = list.get(pos as usize - 1).map(|&c| inst.lists.position(v, c));
                checks += 1;
                if got != want {
                    bad.push(format!("implicit_position v={} level={level} pos={pos}: {got:?} vs {want:?}", v + 1));
                }
            }
        }
        let mut cons = vec![(Constraint::None, None)];
        if let Some(u) = tree.parent(v) {
            for level in 0..=tree.bracket_params(u).m {
                for (i, &c) in brute_implicit_list(inst, &tree, u, level).iter().enumerate() {
                    cons.push((Constraint::At { level, pos: i as u64 + 1 }, Some(c)));
                }
            }
        }
        for (con, forbidden) in cons {
            let mut m = WorkspaceMeter::new(n);
            let got = classify(inst, &tree, v, con, &mut m);
            let want = brute_step(inst, &tree, v, forbidden);
            checks += 1;
            if got != want {
                bad.push(format!("classify v={} {con:?}: {got:?} vs {want:?}", v + 1));
            }
        }
    }
    (checks, bad)
}
