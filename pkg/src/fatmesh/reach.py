"""Estimators for the tubular (osculatory) radius and the connectivity radius.

The tubular radius is estimated from point samples by the pairwise second-order
bound |y-x|^2 / (2 d(y-x, T_x)); its minimum over ordered sample pairs tightens
onto the true tubular radius as sampling densifies. The connectivity radius is
the largest ambient-ball radius at which manifold slices M cap B(x, r), proxied
by a neighborhood graph over the samples, remain connected. The two are linked
by the inequality omega <= (sqrt(3)/3) kappa, which `check_peltonen_inequality`
certifies with a 5% estimation slack.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConnectivityEstimationError, InvalidInputError

INEQUALITY_SLACK = 0.05
_NORMAL_COMPONENT_FLOOR = 1e-12


@dataclass
class ReachEstimate:
    value: float
    flat: bool = False

    def __float__(self):
        return self.value


@dataclass
class KappaEstimate:
    value: float
    at_cap: bool = False

    def __float__(self):
        return self.value


@dataclass
class RadiusEstimates:
    """Per-region radius estimates feeding the mesh-size schedule."""

    region_id: str
    omega: float
    kappa: float
    sample_count: int
    omega_flat: bool = False
    kappa_at_cap: bool = False


@dataclass
class InequalityReport:
    passed: bool
    margin: float
    omega: float
    kappa: float


def _normal_distances(manifold, x, others):
    """Distance of each difference vector to the tangent space at x."""
    d = others - x
    jac = manifold.jacobian(x) if hasattr(manifold, "jacobian") else None
    if jac is not None and jac.shape[0] == 1:
        # Codimension 1: the normal is just the normalized gradient.
        n = jac[0] / np.linalg.norm(jac[0])
        return np.abs(d @ n)
    frame = manifold.tangent_frame(x)
    tang = d @ frame.T @ frame
    return np.linalg.norm(d - tang, axis=1)


def estimate_osculatory_radius(manifold, samples, cap=None):
    """Point-sample tubular-radius estimate, min over ordered pairs.

    Pairs whose difference is (numerically) tangent are skipped; if every pair
    is skipped the region is flat at sampling precision and the configured cap
    is returned with the flat flag set.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(samples) < 2:
        raise InvalidInputError("need at least 2 samples to estimate a radius")
    if cap is None:
        cap = 8.0 * manifold.extent_radius
    best = np.inf
    for i, x in enumerate(samples):
        others = np.delete(samples, i, axis=0)
        dn = _normal_distances(manifold, x, others)
        keep = dn >= _NORMAL_COMPONENT_FLOOR
        if not np.any(keep):
            continue
        d2 = np.einsum("ij,ij->i", others - x, others - x)
        best = min(best, float((d2[keep] / (2.0 * dn[keep])).min()))
    if not np.isfinite(best):
        return ReachEstimate(value=float(cap), flat=True)
    return ReachEstimate(value=min(best, float(cap)), flat=False)


def _component_count(start_nodes, node_mask, neighbors):
    """Connected components of the induced subgraph, by BFS over masks."""
    seen = np.zeros(len(node_mask), dtype=bool)
    comps = 0
    for s in start_nodes:
        if seen[s]:
            continue
        comps += 1
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            for w in neighbors[v]:
                if node_mask[w] and not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return comps


def estimate_connectivity_radius(
    manifold, samples, omega, cap=None, grid_count=24, max_centers=300
):
    """Largest radius at which every sampled ball slice stays graph-connected.

    The slice sigma(x, s) = M cap B(x, s) is proxied by the sample subgraph
    inside the ambient ball, with neighborhood-graph edges at twice the
    covering-radius proxy (max nearest-neighbor distance). A grid of radii is
    searched for the longest prefix on which every tested center stays
    connected. Disjoint nearby sheets are legitimate input: the balls detect
    the split and the estimate lands below the sheet distance. Only when the
    sample set is globally disconnected AND no tested radius ever saw the
    split (components farther apart than the cap) is the estimate meaningless,
    and ConnectivityEstimationError is raised.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    n = len(samples)
    if n < 2:
        raise InvalidInputError("need at least 2 samples to estimate connectivity")
    tree = cKDTree(samples)
    nn_dist, _ = tree.query(samples, k=2)
    edge_radius = 2.0 * float(nn_dist[:, 1].max())
    pairs = tree.query_pairs(r=edge_radius, output_type="ndarray")
    neighbors = [[] for _ in range(n)]
    for i, j in pairs:
        neighbors[i].append(j)
        neighbors[j].append(i)
    neighbors = [np.array(v, dtype=int) for v in neighbors]

    if cap is None:
        cap = 2.4 * manifold.extent_radius
    cap = max(float(cap), 2.0 * math.sqrt(3.0) * float(omega))
    grid = np.geomspace(edge_radius, cap, grid_count)
    stride = max(1, n // max_centers)
    centers = np.arange(0, n, stride)

    memo = {}

    def level_ok(idx):
        if idx in memo:
            return memo[idx]
        s = grid[idx]
        ok = True
        for ci in centers:
            node_idx = tree.query_ball_point(samples[ci], s)
            if len(node_idx) <= 1:
                continue
            mask = np.zeros(n, dtype=bool)
            mask[node_idx] = True
            if _component_count(node_idx, mask, neighbors) > 1:
                ok = False
                break
        memo[idx] = ok
        return ok

    # Binary search for the first failing grid level; the estimate is the
    # last level of the all-pass prefix. Level 0 (the edge radius itself)
    # always passes: every ball member there is directly linked to the center.
    lo, hi = 1, len(grid)  # invariant: levels < lo pass, levels >= hi fail
    memo[0] = True
    while lo < hi:
        mid = (lo + hi) // 2
        if all(level_ok(k) for k in range(lo, mid + 1)):
            lo = mid + 1
        else:
            hi = mid
    last_pass = lo - 1
    at_cap = last_pass == len(grid) - 1

    if at_cap:
        full_mask = np.ones(n, dtype=bool)
        if _component_count(range(n), full_mask, neighbors) > 1:
            raise ConnectivityEstimationError(
                "sample set disconnected beyond the tested cap; no radius is estimable"
            )
    return KappaEstimate(value=float(grid[last_pass]), at_cap=at_cap)


def check_peltonen_inequality(est):
    """Verify omega <= (sqrt(3)/3) kappa up to the estimation slack."""
    bound = math.sqrt(3.0) / 3.0 * est.kappa
    return InequalityReport(
        passed=est.omega <= bound * (1.0 + INEQUALITY_SLACK),
        margin=bound - est.omega,
        omega=est.omega,
        kappa=est.kappa,
    )
