//! Direct (literal) evaluation of the randomized ranking system: the
//! distorted order `≺^η`, relegated conflict foci for one η draw, and the
//! per-sample relegated cohesion matrix. Everything here is O(n)-per-pair
//! scan work, intended for small n where the definitions themselves are
//! affordable.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lab::eta::EtaSampler;
use crate::neighbors::NeighborGraph;
use crate::pannld::promoted::RestrictedTables;

/// `compare(x; y, z)` under the stranger randomization:
/// (A) both promoted at x: the true order; (B) promoted beats relegated;
/// (C) both relegated: order by η_{x,y} vs η_{x,z}.
pub fn randomized_compare(
    g: &NeighborGraph,
    rt: &RestrictedTables,
    eta: &EtaSampler,
    x: usize,
    y: usize,
    z: usize,
) -> Result<Ordering> {
    if y == z {
        return Ok(Ordering::Equal);
    }
    if y == x {
        return Ok(Ordering::Less);
    }
    if z == x {
        return Ok(Ordering::Greater);
    }
    let py = g.is_promoted(x, y);
    let pz = g.is_promoted(x, z);
    let mut lookups = 0u64;
    Ok(match (py, pz) {
        (true, true) => {
            if rt.precedes(x, y, z, &mut lookups)? {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => {
            if eta.value(x, y) < eta.value(x, z) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        }
    })
}

fn require_relegated(g: &NeighborGraph, x: usize, y: usize) -> Result<()> {
    if x == y || x >= g.n() || y >= g.n() {
        return Err(Error::InvalidInput(format!(
            "need two distinct valid points, got ({x}, {y})"
        )));
    }
    if g.is_promoted(x, y) {
        return Err(Error::InvalidInput(format!(
            "pair ({x}, {y}) is promoted; relegated focus undefined"
        )));
    }
    Ok(())
}

/// Members of the left relegated focus `U^ℛ_{x‖y}` for one η draw:
/// {x} ∪ (𝒫ₓ∖𝒫_y) ∪ {z ∈ 𝒫ₓ∩𝒫_y : x ≺_z y} ∪ the η-randomized strangers.
pub fn left_relegated_focus(
    g: &NeighborGraph,
    rt: &RestrictedTables,
    eta: &EtaSampler,
    x: usize,
    y: usize,
) -> Result<Vec<usize>> {
    require_relegated(g, x, y)?;
    let mut members = vec![x];
    let exy = eta.value(x, y);
    let mut lookups = 0u64;
    for z in 0..g.n() {
        if z == x || z == y {
            continue;
        }
        let zx = g.is_promoted(x, z);
        let zy = g.is_promoted(y, z);
        let keep = match (zx, zy) {
            (true, false) => true,
            (true, true) => rt.precedes(z, x, y, &mut lookups)?,
            (false, true) => false,
            (false, false) => {
                let exz = eta.value(x, z);
                exz < exy && exz < eta.value(y, z)
            }
        };
        if keep {
            members.push(z);
        }
    }
    members.sort_unstable();
    Ok(members)
}

/// Members of the full relegated conflict focus `U^ℛ_{x,y}(η)`:
/// {x, y} ∪ 𝒫ₓ ∪ 𝒫_y ∪ {z strangers of both : η_{x,y} > min(η_{x,z}, η_{y,z})}.
pub fn relegated_focus_direct(
    g: &NeighborGraph,
    rt: &RestrictedTables,
    eta: &EtaSampler,
    x: usize,
    y: usize,
) -> Result<Vec<usize>> {
    let _ = rt;
    require_relegated(g, x, y)?;
    let mut members = vec![x, y];
    let exy = eta.value(x, y);
    for z in 0..g.n() {
        if z == x || z == y {
            continue;
        }
        let core = g.is_promoted(x, z) || g.is_promoted(y, z);
        if core || exy > eta.value(x, z).min(eta.value(y, z)) {
            members.push(z);
        }
    }
    members.sort_unstable();
    Ok(members)
}

/// |U^ℛ_{x,y}(η)| without materializing the set.
pub fn relegated_focus_size(g: &NeighborGraph, eta: &EtaSampler, x: usize, y: usize) -> usize {
    let mut size = 2usize;
    let exy = eta.value(x, y);
    for z in 0..g.n() {
        if z == x || z == y {
            continue;
        }
        let core = g.is_promoted(x, z) || g.is_promoted(y, z);
        if core || exy > eta.value(x, z).min(eta.value(y, z)) {
            size += 1;
        }
    }
    size
}

/// One η draw of the relegated cohesion matrix on 𝒫 ∪ diagonal.
pub struct RelegatedSample {
    /// C^ℛ_{x,x}(η).
    pub diag: Vec<f64>,
    /// C^ℛ_{x,v}(η) per ordered promoted pair.
    pub offdiag: HashMap<(usize, usize), f64>,
    /// 1/|U^ℛ_{x,y}(η)| per canonical relegated pair.
    pub reciprocals: HashMap<(usize, usize), f64>,
}

/// Evaluate the per-sample formulas literally: the diagonal as the sum of
/// reciprocal focus sizes over ℛₓ, and each promoted entry as the diagonal
/// minus the witnesses in 𝒫_v ∩ ℛₓ that prefer v over x.
pub fn relegated_cohesion_sample(
    g: &NeighborGraph,
    rt: &RestrictedTables,
    eta: &EtaSampler,
) -> Result<RelegatedSample> {
    let n = g.n();
    let norm = 1.0 / (n as f64 - 1.0);
    let mut reciprocals: HashMap<(usize, usize), f64> = HashMap::new();
    for x in 0..n {
        for y in (x + 1)..n {
            if !g.is_promoted(x, y) {
                reciprocals.insert((x, y), 1.0 / relegated_focus_size(g, eta, x, y) as f64);
            }
        }
    }
    let recip = |x: usize, y: usize| reciprocals[&(x.min(y), x.max(y))];

    let mut diag = vec![0.0f64; n];
    for x in 0..n {
        for y in 0..n {
            if y != x && !g.is_promoted(x, y) {
                diag[x] += recip(x, y);
            }
        }
        diag[x] *= norm;
    }

    let mut offdiag: HashMap<(usize, usize), f64> = HashMap::new();
    let mut lookups = 0u64;
    for x in 0..n {
        for &v in g.promoted(x) {
            let mut correction = 0.0;
            for &y in g.promoted(v) {
                if y == x || g.is_promoted(x, y) {
                    continue;
                }
                if rt.precedes(v, y, x, &mut lookups)? {
                    correction += recip(x, y);
                }
            }
            offdiag.insert((x, v), diag[x] - correction * norm);
        }
    }
    Ok(RelegatedSample {
        diag,
        offdiag,
        reciprocals,
    })
}

/// C^ℛ_{x,v}(η) straight from the definition: sum over y ∈ ℛₓ of the
/// left-focus membership indicator over the focus size. Cross-checks the
/// perturbation form in `relegated_cohesion_sample`.
pub fn relegated_cohesion_by_definition(
    g: &NeighborGraph,
    rt: &RestrictedTables,
    eta: &EtaSampler,
    x: usize,
    v: usize,
) -> Result<f64> {
    let n = g.n();
    let norm = 1.0 / (n as f64 - 1.0);
    let mut acc = 0.0;
    for y in 0..n {
        if y == x || g.is_promoted(x, y) {
            continue;
        }
        let left = left_relegated_focus(g, rt, eta, x, y)?;
        if left.binary_search(&v).is_ok() {
            acc += 1.0 / relegated_focus_size(g, eta, x, y) as f64;
        }
    }
    Ok(acc * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::{build_friend_sets, KSpec};
    use crate::pannld::promoted::RestrictedTables;
    use crate::ranking::gen_euclidean;

    fn setup(
        n: usize,
        k: usize,
        seed: u64,
    ) -> (crate::ranking::RankingSystem, NeighborGraph, RestrictedTables) {
        let rs = gen_euclidean(n, 2, seed).unwrap();
        let friends = build_friend_sets(&rs, &KSpec::Uniform(k)).unwrap();
        let g = NeighborGraph::from_friend_sets(friends).unwrap();
        let rt = RestrictedTables::build(&rs, &g).unwrap();
        (rs, g, rt)
    }

    fn some_relegated(g: &NeighborGraph) -> (usize, usize) {
        for x in 0..g.n() {
            for y in (x + 1)..g.n() {
                if !g.is_promoted(x, y) {
                    return (x, y);
                }
            }
        }
        panic!("no relegated pair");
    }

    #[test]
    fn promoted_beats_relegated() {
        let (_rs, g, rt) = setup(20, 4, 1);
        let eta = EtaSampler::new(5);
        let x = 0;
        let v = g.promoted(x)[0];
        let (rx, ry) = some_relegated(&g);
        let z = if rx == x { ry } else if !g.is_promoted(x, rx) && rx != x { rx } else { ry };
        if !g.is_promoted(x, z) && z != x {
            assert_eq!(
                randomized_compare(&g, &rt, &eta, x, v, z).unwrap(),
                Ordering::Less
            );
            assert_eq!(
                randomized_compare(&g, &rt, &eta, x, z, v).unwrap(),
                Ordering::Greater
            );
        }
    }

    #[test]
    fn focus_splits_into_left_parts() {
        let (_rs, g, rt) = setup(24, 4, 3);
        let eta = EtaSampler::new(11);
        let (x, y) = some_relegated(&g);
        let full = relegated_focus_direct(&g, &rt, &eta, x, y).unwrap();
        let lx = left_relegated_focus(&g, &rt, &eta, x, y).unwrap();
        let ly = left_relegated_focus(&g, &rt, &eta, y, x).unwrap();
        assert_eq!(full.len(), relegated_focus_size(&g, &eta, x, y));
        // Disjoint union.
        let mut merged: Vec<usize> = lx.iter().chain(ly.iter()).copied().collect();
        merged.sort_unstable();
        assert_eq!(merged, full);
        for v in &lx {
            assert!(ly.binary_search(v).is_err());
        }
    }

    #[test]
    fn focus_extremes_under_pinning() {
        let (_rs, g, _rt) = setup(20, 5, 7);
        let (x, y) = some_relegated(&g);
        // m_{x,y} from the promoted adjacency.
        let mut core = 2;
        for z in 0..20 {
            if z != x && z != y && (g.is_promoted(x, z) || g.is_promoted(y, z)) {
                core += 1;
            }
        }
        // eta_{x,y} near 0: nothing random joins; near 1: everything does.
        let tiny = EtaSampler::pinned(3, (x, y), 1e-12);
        assert_eq!(relegated_focus_size(&g, &tiny, x, y), core);
        let huge = EtaSampler::pinned(3, (x, y), 1.0 - 1e-12);
        assert_eq!(relegated_focus_size(&g, &huge, x, y), 20);
    }

    #[test]
    fn perturbation_form_matches_definition() {
        let (_rs, g, rt) = setup(18, 4, 9);
        for trial in 0..5u64 {
            let eta = EtaSampler::new(trial);
            let sample = relegated_cohesion_sample(&g, &rt, &eta).unwrap();
            for x in 0..18 {
                let direct = relegated_cohesion_by_definition(&g, &rt, &eta, x, x).unwrap();
                assert!(
                    (sample.diag[x] - direct).abs() < 1e-12,
                    "diag {x}: {} vs {direct}",
                    sample.diag[x]
                );
                for &v in g.promoted(x) {
                    let direct = relegated_cohesion_by_definition(&g, &rt, &eta, x, v).unwrap();
                    let got = sample.offdiag[&(x, v)];
                    assert!(
                        (got - direct).abs() < 1e-12,
                        "({x},{v}): {got} vs {direct}"
                    );
                }
            }
        }
    }

    #[test]
    fn perturbation_witnesses_match_membership_exactly() {
        // Term by term (integers, no rounding): for a promoted pair (x, v)
        // and a relegated partner y of x, v sits in the left focus of
        // (x, y) precisely unless y is a promoted witness preferring v.
        let (_rs, g, rt) = setup(16, 4, 13);
        let eta = EtaSampler::new(21);
        let mut lookups = 0u64;
        for x in 0..16 {
            for &v in g.promoted(x) {
                for y in 0..16 {
                    if y == x || g.is_promoted(x, y) {
                        continue;
                    }
                    let left = left_relegated_focus(&g, &rt, &eta, x, y).unwrap();
                    let in_left = left.binary_search(&v).is_ok();
                    let knocked_out = g.is_promoted(v, y)
                        && rt.precedes(v, y, x, &mut lookups).unwrap();
                    assert_eq!(in_left, !knocked_out, "x={x} v={v} y={y}");
                }
            }
        }
    }

    #[test]
    fn relegated_focus_rejects_promoted_pair() {
        let (_rs, g, rt) = setup(15, 4, 2);
        let eta = EtaSampler::new(0);
        let x = 0;
        let v = g.promoted(x)[0];
        assert!(relegated_focus_direct(&g, &rt, &eta, x, v).is_err());
    }
}
