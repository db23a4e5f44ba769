//! Linear-time 2-SAT via strongly connected components of the implication
//! graph.

use crate::formula::{Assignment, Formula};

/// A satisfying assignment, or `None` when the formula is UNSAT.
pub fn solve(f: &Formula) -> Option<Assignment> {
    let n = f.n_declared();
    let nodes = 2 * n;
    // literal code 2v = x_v, 2v+1 = ¬x_v; edge ¬a -> b and ¬b -> a per clause
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for c in f.clauses() {
        let (a, b) = (c.first(), c.second());
        adj[a.negate().code()].push(b.code());
        adj[b.negate().code()].push(a.code());
    }
    let comp = tarjan(&adj);
    let mut values = Vec::with_capacity(n);
    for v in 0..n {
        let (pos, neg) = (comp[2 * v], comp[2 * v + 1]);
        if pos == neg {
            return None;
        }
        // components come out in reverse topological order
        values.push(pos < neg);
    }
    Some(Assignment::from_values(values))
}

pub fn is_satisfiable(f: &Formula) -> bool {
    solve(f).is_some()
}

/// Iterative Tarjan; returns the component id of every node.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *edge < adj[v].len() {
                let w = adj[v][*edge];
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
