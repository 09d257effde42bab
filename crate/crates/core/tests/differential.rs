//! Differential tests: the O(N) operator against the brute-force oracle on
//! seeded random instances, and the operator's cone behavior on random
//! nonnegative inputs. Failure messages carry the full instance for replay.

use tsbvp::oracle::{naive_apply_f, ScenarioGen};
use tsbvp::phi::PExponent;
use tsbvp::solver::{apply_f_operator, in_cone, inner_integral, ProblemSpec};
use tsbvp::timescale::{GridFunction, SampledTimeScale};

const BATTERY_SEED: u64 = 0x7501;

struct Instance {
    seed: u64,
    problem: ProblemSpec,
    input: GridFunction,
}

/// Deterministically expands a seed into a problem plus a random
/// nonnegative input on its grid. Returns None when the drawn scale is too
/// small to host an interior eta.
fn instance(seed: u64) -> Option<Instance> {
    let mut gen = ScenarioGen::new(seed);
    let (scale, resolution) = gen.scale(64);
    let probe = SampledTimeScale::sample(&scale, resolution).ok()?;
    if probe.len() < 3 {
        return None;
    }
    let p = [1.5, 2.0, 3.0][gen.index(3)];
    let eta = probe.point(1 + gen.index(probe.len() - 2));
    let problem = ProblemSpec::new(
        PExponent::new(p).unwrap(),
        scale.horizon(),
        eta,
        gen.positive_f(),
        gen.positive_h(),
        scale,
        resolution,
    )
    .ok()?;
    let values: Vec<f64> = (0..problem.grid().len())
        .map(|_| gen.range(0.0, 3.0))
        .collect();
    let input = GridFunction::new(problem.grid().clone(), values).unwrap();
    Some(Instance {
        seed,
        problem,
        input,
    })
}

fn instances(count: usize) -> Vec<Instance> {
    (0u64..)
        .filter_map(|k| instance(BATTERY_SEED + k))
        .take(count)
        .collect()
}

fn replay_tag(inst: &Instance) -> String {
    format!(
        "seed={} scale=\"{}\" resolution={} p={} eta={} f=\"{}\" h=\"{}\"",
        inst.seed,
        inst.problem.scale().to_text(),
        inst.problem.resolution(),
        inst.problem.exponent().p(),
        inst.problem.eta(),
        inst.problem.f(),
        inst.problem.h(),
    )
}

#[test]
fn optimized_operator_matches_naive_on_fifty_seeded_instances() {
    let battery = instances(50);
    assert_eq!(battery.len(), 50);
    for inst in &battery {
        let fast = apply_f_operator(&inst.problem, &inst.input).unwrap();
        let slow = naive_apply_f(&inst.problem, &inst.input).unwrap();
        let tol = 1e-10 * slow.sup_norm().max(1.0);
        let dist = fast.distance(&slow).unwrap();
        assert!(
            dist <= tol,
            "dist={dist} exceeds {tol}; {}",
            replay_tag(inst)
        );
    }
}

#[test]
fn operator_maps_nonnegative_inputs_into_the_cone() {
    for inst in instances(25) {
        let image = apply_f_operator(&inst.problem, &inst.input).unwrap();
        assert!(
            in_cone(&image),
            "image left the cone; {}",
            replay_tag(&inst)
        );
        for w in image.values().windows(2) {
            assert!(
                w[1] >= w[0] - 1e-12,
                "image not nondecreasing; {}",
                replay_tag(&inst)
            );
        }
    }
}

#[test]
fn operator_head_value_equals_inner_integral_at_eta() {
    for inst in instances(25) {
        let image = apply_f_operator(&inst.problem, &inst.input).unwrap();
        let head = inst
            .problem
            .exponent()
            .phi_inv(inner_integral(&inst.problem, &inst.input, inst.problem.eta()).unwrap());
        // the two sides accumulate the same sum from opposite ends
        let tol = 1e-12 * head.abs().max(1.0);
        assert!(
            (image.value(0) - head).abs() <= tol,
            "head {} vs {head}; {}",
            image.value(0),
            replay_tag(&inst)
        );
    }
}
