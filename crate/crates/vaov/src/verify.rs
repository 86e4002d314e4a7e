//! Batch verification: every theorem-level check the library makes, run
//! over a corpus of instances and aggregated into one report.

use crate::maxmin::{maxmin_rule_arbitrary, MaxminPolicy};
use crate::oracle::{self, adversarial_value};
use crate::protocol::{run, NegotiationState};
use crate::rc::{extension_is_wellformed, monotone_extension, rc_set, verify_rc_relations};
use crate::spe::spe_result;
use crate::types::{Instance, Party};
use crate::{maxmin, spe};
use serde::Serialize;

/// Names of the per-instance checks, in report order.
pub const CHECK_NAMES: [&str; 7] = [
    "spe-vs-oracle",
    "rc-membership",
    "rc-relations",
    "monotonicity",
    "maxmin-guarantee",
    "maxmin-optimality",
    "uniqueness",
];

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize)]
pub struct CheckCount {
    pub pass: usize,
    pub fail: usize,
}

/// Aggregated result of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct BatchReport {
    pub instances: usize,
    pub seed: u64,
    pub checks: Vec<(String, CheckCount)>,
    /// Instance files dumped for each failing instance.
    pub failures: Vec<String>,
}

impl BatchReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|(_, c)| c.fail == 0)
    }
}

/// Per-instance verdicts, one per entry of [`CHECK_NAMES`].
pub fn check_instance(instance: &Instance, seed: u64) -> Result<[bool; 7], oracle::OracleError> {
    let o_eq = spe_result(instance);

    let spe_vs_oracle = oracle::solve_spe(instance)?.result == o_eq;
    let rc = rc_set(instance);
    let rc_membership = rc.outcomes.contains(o_eq);
    let rc_relations = verify_rc_relations(instance).all_pass();

    let monotonicity = {
        let extended = monotone_extension(instance, 2, seed);
        let new_eq = spe_result(&extended);
        extension_is_wellformed(instance, &extended, o_eq)
            && extended.order(Party::P1).prefers(new_eq, o_eq)
            && extended.order(Party::P2).prefers(new_eq, o_eq)
    };

    let initial = NegotiationState::initial(instance);
    let mut maxmin_guarantee = true;
    let mut maxmin_optimality = true;
    for focal in [Party::P1, Party::P2] {
        let upper1 = maxmin::upper_set(&initial, instance, focal);
        let locked = adversarial_value(instance, focal, Some(maxmin_rule_arbitrary))?;
        maxmin_guarantee &= upper1.contains(locked);
        let unrestricted = adversarial_value(instance, focal, None)?;
        let floor = instance
            .order(focal)
            .worst_of(upper1.iter())
            .expect("upper set is never empty");
        maxmin_optimality &= unrestricted == floor;
    }

    let uniqueness = oracle::verify_uniqueness(instance)?;

    Ok([
        spe_vs_oracle,
        rc_membership,
        rc_relations,
        monotonicity,
        maxmin_guarantee,
        maxmin_optimality,
        uniqueness,
    ])
}

/// Runs every check over a corpus. `dump` receives (index, instance) for
/// each instance that failed any check and returns the path recorded in
/// the report.
pub fn run_batch<I>(
    instances: I,
    seed: u64,
    mut dump: impl FnMut(usize, &Instance) -> Option<String>,
) -> Result<BatchReport, oracle::OracleError>
where
    I: IntoIterator<Item = Instance>,
{
    let mut counts = [CheckCount::default(); 7];
    let mut failures = Vec::new();
    let mut total = 0usize;
    for (idx, instance) in instances.into_iter().enumerate() {
        total += 1;
        let verdicts = check_instance(&instance, seed.wrapping_add(idx as u64))?;
        let mut any_fail = false;
        for (count, &ok) in counts.iter_mut().zip(&verdicts) {
            if ok {
                count.pass += 1;
            } else {
                count.fail += 1;
                any_fail = true;
            }
        }
        if any_fail {
            if let Some(path) = dump(idx, &instance) {
                failures.push(path);
            }
        }
    }
    Ok(BatchReport {
        instances: total,
        seed,
        checks: CHECK_NAMES
            .iter()
            .map(|n| n.to_string())
            .zip(counts)
            .collect(),
        failures,
    })
}

/// All (order1, order2) pairs of size `m` with first mover p1.
pub fn exhaustive_instances(m: usize) -> impl Iterator<Item = Instance> {
    use itertools::Itertools;
    (0..m as u32)
        .permutations(m)
        .cartesian_product((0..m as u32).permutations(m).collect::<Vec<_>>())
        .map(|(p1, p2)| Instance::from_rankings(&p1, &p2, Party::P1).expect("permutations"))
}

/// Both-maxmin consistency: whenever the round-1 lower-set intersection is
/// empty, maxmin-vs-maxmin play reproduces the SPE result.
pub fn both_maxmin_consistent(instance: &Instance) -> bool {
    let initial = NegotiationState::initial(instance);
    let sets = spe::round_sets(&initial, instance);
    if !sets.intersection.is_empty() {
        return true;
    }
    let mut a = MaxminPolicy::arbitrary();
    let mut b = MaxminPolicy::arbitrary();
    let result = run(instance, &mut a, &mut b)
        .expect("maxmin policies only emit legal actions")
        .result;
    result == spe_result(instance)
}
