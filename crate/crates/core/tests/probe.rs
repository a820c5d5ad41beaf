// Scratch probe, not part of the deliverable.
use hkernel::digraph::{ColouredInstance, Digraph, Pattern};
use hkernel::kernel::{check_kernel, enumerate_h_kernels, KernelCheck};
use hkernel::reductions::{p2_transform, pullback_kernel, smallest_midpoint};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_fixture(rng: &mut ChaCha8Rng) -> Option<(ColouredInstance, Pattern, usize, usize, usize)> {
    let k = rng.random_range(2..=4);
    let mut g = Digraph::new(k).unwrap();
    for c in 0..k {
        g.insert_arc(c, c);
    }
    for a in 0..k {
        for b in 0..k {
            if a != b && rng.random_bool(0.4) {
                g.insert_arc(a, b);
            }
        }
    }
    let h = Pattern::new(g);
    let mut candidates = Vec::new();
    for u in 0..k {
        for v in 0..k {
            if u != v && !h.has_arc(u, v) {
                if let Some(z) = smallest_midpoint(&h, u, v) {
                    candidates.push((u, v, z));
                }
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let (u, v, z) = candidates[rng.random_range(0..candidates.len())];
    let n = rng.random_range(1..=4);
    let mut d = Digraph::new(n).unwrap();
    let mut colours = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.random_bool(0.5) {
                d.insert_arc(a, b);
                colours.push(((a, b), rng.random_range(0..k)));
            }
        }
    }
    Some((ColouredInstance::new(d, k, &colours).unwrap(), h, u, v, z))
}

#[test]
fn probe_equivalence_and_pullback() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut fixtures = 0u64;
    let mut existence_disagreements = 0u64;
    let mut pullback_failures = 0u64;
    let mut fixtures_with_kernels = 0u64;
    let mut first_exist_fail = None;
    let mut first_pullback_fail = None;
    while fixtures < 20000 {
        let Some((inst, h, u, v, z)) = random_fixture(&mut rng) else { continue };
        fixtures += 1;
        let mut ext = h.digraph().clone();
        ext.insert_arc(u, v);
        let h_ext = Pattern::new(ext);
        let t = p2_transform(&inst, &h, u, v, z).unwrap();
        let d_kernels = enumerate_h_kernels(&inst, &h_ext).unwrap();
        let dp_kernels = enumerate_h_kernels(t.transformed(), &h).unwrap();
        if d_kernels.is_empty() != dp_kernels.is_empty() {
            existence_disagreements += 1;
            if first_exist_fail.is_none() {
                first_exist_fail = Some((inst.clone(), h.clone(), u, v, z));
            }
        }
        if !dp_kernels.is_empty() {
            fixtures_with_kernels += 1;
        }
        let mut this_fixture_failed = false;
        for kp in &dp_kernels {
            let k = pullback_kernel(&t, kp).unwrap();
            let check = check_kernel(&inst, &h_ext, &k).unwrap();
            if check != KernelCheck::Valid {
                this_fixture_failed = true;
                if first_pullback_fail.is_none() {
                    first_pullback_fail =
                        Some((inst.clone(), h.clone(), u, v, z, kp.clone(), k, check));
                }
            }
        }
        if this_fixture_failed {
            pullback_failures += 1;
        }
    }
    println!("fixtures: {fixtures}");
    println!("fixtures where D' had kernels: {fixtures_with_kernels}");
    println!("existence disagreements: {existence_disagreements}");
    println!("fixtures with a failing pullback: {pullback_failures}");
    if let Some((inst, h, u, v, z)) = &first_exist_fail {
        println!("-- first existence failure --");
        println!("pattern arcs: {:?}", h.arcs().collect::<Vec<_>>());
        println!("u={u} v={v} z={z}");
        println!(
            "instance arcs/colours: {:?}",
            inst.d().arcs().map(|(a, b)| (a, b, inst.colour(a, b))).collect::<Vec<_>>()
        );
    }
    if let Some((inst, h, u, v, z, kp, k, check)) = &first_pullback_fail {
        println!("-- first pullback failure --");
        println!("pattern arcs: {:?}", h.arcs().collect::<Vec<_>>());
        println!("u={u} v={v} z={z}");
        println!(
            "instance arcs/colours: {:?}",
            inst.d().arcs().map(|(a, b)| (a, b, inst.colour(a, b))).collect::<Vec<_>>()
        );
        println!("kernel of D': {kp:?} pulled back to {k:?}: {check:?}");
    }
}
