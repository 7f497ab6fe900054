"""Binary search for the barrier coefficient t.

Larger t weakens the barrier, raising both reward and constraint value;
the search probes midpoints with short training runs and keeps the
largest t whose probe still satisfied the constraint.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, IpoRlError
from .train import train


@dataclass
class Probe:
    t: float
    j_c: float
    limit: float

    @property
    def feasible(self):
        return self.j_c <= self.limit


@dataclass
class TSearchResult:
    recommended: float
    probes: list = field(default_factory=list)


class TSearchFailure(IpoRlError):
    def __init__(self, message, probes):
        super().__init__(message)
        self.probes = probes


def t_search(probe_fn, t_lo, t_hi, budget, tol=0.5):
    """probe_fn(t) -> Probe. Returns the largest probed t that was feasible."""
    if t_lo > t_hi:
        raise ConfigError(f"t_lo must be <= t_hi, got [{t_lo}, {t_hi}]")
    probes = []

    def run(t):
        if budget <= len(probes):
            return None
        p = probe_fn(t)
        probes.append(p)
        return p

    if budget < 1:
        raise TSearchFailure("probe budget exhausted before any probe", probes)

    if t_lo == t_hi:
        p = run(t_lo)
        if p is not None and p.feasible:
            return TSearchResult(t_lo, probes)
        raise TSearchFailure(f"t={t_lo} infeasible (degenerate bracket)", probes)

    best = None
    lo, hi = t_lo, t_hi
    while len(probes) < budget and hi - lo > tol:
        mid = 0.5 * (lo + hi)
        p = run(mid)
        if p is None:
            break
        if p.feasible:
            best = mid if best is None else max(best, mid)
            lo = mid  # go right: larger t, higher reward
        else:
            hi = mid  # go left: smaller t, stronger barrier
    if best is None and len(probes) < budget:
        # the bracket may have collapsed without a feasible midpoint; try t_lo
        p = run(t_lo)
        if p is not None and p.feasible:
            best = t_lo
    if best is None:
        raise TSearchFailure(
            f"no feasible t found in [{t_lo}, {t_hi}] within {budget} probes",
            probes)
    return TSearchResult(best, probes)


def training_probe(scenario, config, seed, probe_iterations=30, tail=5):
    """Probe that runs a short barrier-training job and averages the tail J_C."""
    limit = scenario.spec.limits[0]

    def probe(t):
        cfg = replace(config, t=t, max_iterations=probe_iterations)
        result = train(scenario, "ipo", cfg, seed)
        tail_jc = float(np.mean([m.j_c[0] for m in result.metrics[-tail:]]))
        return Probe(t=t, j_c=tail_jc, limit=limit)

    return probe
