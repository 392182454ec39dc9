//! Brute-force ground truth over the full C(n, k) strategy spaces.
//!
//! Everything here exists to certify the fast paths: exhaustive best
//! responses, the pure minmax/maxmin values, and the exhaustive perturbed-
//! leader argmin. Guarded so a careless call cannot melt the machine.

use std::collections::{BTreeMap, BTreeSet};

use crate::adversary::{cost_after_overwrite, exact_best_response};
use crate::error::OracleError;
use crate::ftpl::FtplState;
use crate::game::{apply_strategies, cost_g, loss_f, GameInstance, Role, Strategy};

/// Enumeration refuses node counts above this.
pub const MAX_ENUM_NODES: usize = 22;
/// Enumeration refuses more than this many k-subsets.
pub const MAX_ENUM_SUBSETS: u128 = 10_000_000;
/// Full double enumeration self-check runs when C(n,k)^2 is at most this.
pub const MAX_SELF_CHECK_PAIRS: u128 = 1_000_000;

/// C(n, k) without overflow at the guarded sizes.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Lexicographic stream of all k-subsets of `0..n`.
pub fn enumerate_subsets(n: usize, k: usize) -> Result<SubsetIter, OracleError> {
    let subsets = binomial(n, k);
    if n > MAX_ENUM_NODES || subsets > MAX_ENUM_SUBSETS {
        return Err(OracleError::TooLarge { n, k, subsets });
    }
    Ok(SubsetIter { n, k, current: None })
}

#[derive(Debug, Clone)]
pub struct SubsetIter {
    n: usize,
    k: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for SubsetIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.k > self.n {
            return None;
        }
        match &mut self.current {
            None => {
                self.current = Some((0..self.k).collect());
                self.current.clone()
            }
            Some(subset) => {
                // rightmost index that can still move right
                let k = self.k;
                let mut pos = k;
                for i in (0..k).rev() {
                    if subset[i] < self.n - k + i {
                        pos = i;
                        break;
                    }
                }
                if pos == k {
                    return None; // exhausted
                }
                subset[pos] += 1;
                for i in pos + 1..k {
                    subset[i] = subset[i - 1] + 1;
                }
                Some(subset.clone())
            }
        }
    }
}

/// Exhaustive game values for an instance.
#[derive(Debug, Clone)]
pub struct MinmaxResult {
    /// min over x of the adversary's best-response cost.
    pub minmax_value: f64,
    /// Lexicographically smallest minimizer.
    pub argmin_x: Strategy,
    /// Worst-case cost of every min k-subset.
    pub per_x_table: BTreeMap<Vec<usize>, f64>,
    /// max over y of the min player's best-response cost.
    pub maxmin_value: f64,
}

/// Enumerates the min player's side exactly; the inner maximization uses the
/// exact top-k best response, which linearity makes optimal. The maxmin side
/// is enumerated symmetrically. When the instance is small enough a full
/// double enumeration re-derives both values as a self-check.
pub fn brute_minmax(inst: &GameInstance) -> Result<MinmaxResult, OracleError> {
    let n = inst.n();
    let k = inst.k();
    let ell = inst.ell();

    let mut per_x_table = BTreeMap::new();
    let mut minmax_value = f64::INFINITY;
    let mut argmin_x: Option<Vec<usize>> = None;
    for x_ids in enumerate_subsets(n, k)? {
        let x = Strategy::new(Role::Min, x_ids.iter().copied());
        let v = apply_strategies(inst.s(), &x, None).expect("roles fixed here");
        let y = exact_best_response(ell, v.values(), k);
        let worst = cost_after_overwrite(ell, v.values(), &y);
        if worst < minmax_value {
            minmax_value = worst;
            argmin_x = Some(x_ids.clone());
        }
        per_x_table.insert(x_ids, worst);
    }

    let mut maxmin_value = f64::NEG_INFINITY;
    for y_ids in enumerate_subsets(n, k)? {
        let n_subset: BTreeSet<usize> = y_ids.iter().copied().collect();
        maxmin_value = maxmin_value.max(min_response_value(inst, &n_subset));
    }

    assert!(
        maxmin_value <= minmax_value + 1e-9,
        "weak duality violated: maxmin {maxmin_value} > minmax {minmax_value}"
    );

    let result = MinmaxResult {
        minmax_value,
        argmin_x: Strategy::new(Role::Min, argmin_x.expect("at least one subset")),
        per_x_table,
        maxmin_value,
    };

    if binomial(n, k).pow(2) <= MAX_SELF_CHECK_PAIRS {
        self_check_by_double_enumeration(inst, &result)?;
    }
    Ok(result)
}

// Min player's exact best response value against a fixed adversary subset:
// selections inside N are overwritten anyway, so take the k biggest gains
// ell_i (1 + s_i) outside N (all gains are nonnegative).
fn min_response_value(inst: &GameInstance, n_subset: &BTreeSet<usize>) -> f64 {
    let ell = inst.ell();
    let s = inst.s().values();
    let mut outside: Vec<usize> = (0..inst.n()).filter(|i| !n_subset.contains(i)).collect();
    outside.sort_by(|&a, &b| {
        let ga = ell[a] * (1.0 + s[a]);
        let gb = ell[b] * (1.0 + s[b]);
        gb.partial_cmp(&ga).unwrap().then(a.cmp(&b))
    });
    let picked: BTreeSet<usize> = outside.iter().copied().take(inst.k()).collect();

    let mut total = 0.0;
    for i in 0..inst.n() {
        if n_subset.contains(&i) {
            total += ell[i];
        } else if picked.contains(&i) {
            total -= ell[i];
        } else {
            total += ell[i] * s[i];
        }
    }
    total
}

// Independent second route: evaluate cost_g on every (x, y) pair and
// re-derive minmax and maxmin from the full payoff table.
fn self_check_by_double_enumeration(
    inst: &GameInstance,
    fast: &MinmaxResult,
) -> Result<(), OracleError> {
    let n = inst.n();
    let k = inst.k();
    let mut minmax = f64::INFINITY;
    for x_ids in enumerate_subsets(n, k)? {
        let x = Strategy::new(Role::Min, x_ids.iter().copied());
        let mut worst = f64::NEG_INFINITY;
        for y_ids in enumerate_subsets(n, k)? {
            let y = Strategy::new(Role::Max, y_ids.iter().copied());
            worst = worst.max(cost_g(inst, &x, &y).expect("roles fixed here"));
        }
        let table = fast.per_x_table.get(&x_ids).expect("table covers every subset");
        assert!(
            (worst - table).abs() <= 1e-9,
            "best-response shortcut disagrees with enumeration at x={x_ids:?}: {table} vs {worst}"
        );
        minmax = minmax.min(worst);
    }
    assert!((minmax - fast.minmax_value).abs() <= 1e-9);

    let mut maxmin = f64::NEG_INFINITY;
    for y_ids in enumerate_subsets(n, k)? {
        let y = Strategy::new(Role::Max, y_ids.iter().copied());
        let mut best = f64::INFINITY;
        for x_ids in enumerate_subsets(n, k)? {
            let x = Strategy::new(Role::Min, x_ids.iter().copied());
            best = best.min(cost_g(inst, &x, &y).expect("roles fixed here"));
        }
        maxmin = maxmin.max(best);
    }
    assert!(
        (maxmin - fast.maxmin_value).abs() <= 1e-9,
        "maxmin shortcut disagrees with enumeration: {} vs {maxmin}",
        fast.maxmin_value
    );
    Ok(())
}

/// Exhaustive perturbed-leader argmin: minimizes cumulative loss plus
/// `R . x` over all k-subsets, ties to the lexicographically smallest.
pub fn brute_ftpl_argmin(state: &FtplState, perturbation: &[f64]) -> Result<Strategy, OracleError> {
    let inst = state.inst();
    let s = inst.s().values();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in enumerate_subsets(inst.n(), inst.k())? {
        let x = Strategy::new(Role::Min, subset.iter().copied());
        let mut total: f64 = state
            .history()
            .iter()
            .map(|n_subset| loss_f(inst, n_subset, &x).expect("role fixed here"))
            .sum();
        // perturbation applies to the delta encoding x_i = -1 - s_i
        total += subset.iter().map(|&i| perturbation[i] * (-1.0 - s[i])).sum::<f64>();
        match &best {
            Some((best_total, _)) if total >= *best_total => {}
            _ => best = Some((total, subset)),
        }
    }
    let (_, subset) = best.expect("at least one subset");
    Ok(Strategy::new(Role::Min, subset))
}
