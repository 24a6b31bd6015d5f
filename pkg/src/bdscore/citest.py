"""Score-based conditional-independence statistics and decisions.

The central quantity is the per-sample log score gap

    J(n) = (1/n) [score(X+Y+Z) + score(Z) - score(X+Z) - score(Y+Z)]

for disjoint variable groups X, Y, Z; positive values favor keeping X
and Y dependent given Z.  Its large-sample behavior is tracked by two
companions:

* ``penalized_mutual_information``: the empirical conditional mutual
  information minus the dimension penalty (a-1)(b-1)g/(2n) * log n,
  where a, b, g are the joint arities of X, Y, Z.

* ``bdeu_correction``: the finite-sample term specific to evenly split
  equivalent-sample-size weights.  With d the equivalent sample size,

      D = -(d/ag - 1/2)  S_xz - (d/bg - 1/2) S_yz
        + (d/abg - 1/2) S_xyz + (d/g - 1/2)  S_z

  where each S is the sum of log[(c + w)/(n + d)] over the *entire*
  declared state space of that margin (zero-count cells included) and w
  is the margin's per-cell weight.  Under Jeffreys weights every
  coefficient vanishes; under split weights the term grows with log n
  and is what drags the decision toward dependence on sparse data.

``asymptotic_residuals`` exposes what is left of n*J after removing the
penalized mutual information (and the correction term, for split
weights); bounded residuals over a growing-n grid are the numerical
signature that the expansion above is complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .dataset import Dataset, VarSet, counts
from .numerics import log_base_divisor
from .scores import BDeu, PriorSpec, marginal_score

__all__ = [
    "CIStatistics",
    "CIVerdict",
    "asymptotic_residuals",
    "bdeu_correction",
    "ci_decide_cond",
    "ci_decide_pair",
    "ci_statistics",
    "j_statistic",
    "penalized_mutual_information",
]


@dataclass(frozen=True)
class CIStatistics:
    """The three decision statistics for one (X, Y | Z) query."""

    j: float
    penalized_mi: float
    correction: float
    x_arity: int
    y_arity: int
    z_arity: int
    prior: str
    log_base: str


@dataclass(frozen=True)
class CIVerdict:
    """Outcome of one independence decision at prior probability p."""

    independent: bool
    p: float
    left: float
    right: float


def _resolve_triple(ds: Dataset, x_vars, y_vars, z_vars) -> tuple[VarSet, VarSet, VarSet]:
    xs, ys, zs = ds.subset(x_vars), ds.subset(y_vars), ds.subset(z_vars)
    if len(xs) == 0 or len(ys) == 0:
        raise ValueError("X and Y groups must be nonempty")
    used = set(xs.indices)
    for group in (ys, zs):
        for i in group.indices:
            if i in used:
                raise ValueError("X, Y, Z groups must be pairwise disjoint")
            used.add(i)
    return xs, ys, zs


def j_statistic(ds: Dataset, x_vars, y_vars, z_vars, prior: PriorSpec) -> float:
    """Per-sample log score gap of (X, Y | Z) in nats.

    The empty Z group has joint arity 1 and score 0, so the pairwise and
    the conditional cases are the same code path.
    """
    xs, ys, zs = _resolve_triple(ds, x_vars, y_vars, z_vars)
    xz = xs.union(zs)
    yz = ys.union(zs)
    xyz = xz.union(ys)
    value = (
        marginal_score(ds, xyz, prior)
        + marginal_score(ds, zs, prior)
        - marginal_score(ds, xz, prior)
        - marginal_score(ds, yz, prior)
    )
    return value / ds.n


def penalized_mutual_information(ds: Dataset, x_vars, y_vars, z_vars, base="e") -> float:
    """Empirical conditional mutual information minus its dimension penalty.

    MI is summed over observed cells only (0 log 0 = 0); the penalty
    (a-1)(b-1)g/(2n) * log n uses the declared arities.  Both parts are
    reported in the requested base.
    """
    divisor = log_base_divisor(base)
    xs, ys, zs = _resolve_triple(ds, x_vars, y_vars, z_vars)
    xyz = xs.union(ys).union(zs)
    joint = counts(ds, xyz)
    xz = xs.union(zs)
    yz = ys.union(zs)
    t_xz = joint.marginalize(xz)
    t_yz = joint.marginalize(yz)
    t_z = joint.marginalize(zs)
    p_xz = xyz.positions_of(xz)
    p_yz = xyz.positions_of(yz)
    p_z = xyz.positions_of(zs)

    n = ds.n
    mi = math.fsum(
        (c / n)
        * math.log(
            c
            * t_z.count(tuple(cell[p] for p in p_z))
            / (
                t_xz.count(tuple(cell[p] for p in p_xz))
                * t_yz.count(tuple(cell[p] for p in p_yz))
            )
        )
        for cell, c in joint.items()
    )
    penalty = (
        (xs.joint_arity - 1) * (ys.joint_arity - 1) * zs.joint_arity
        / (2.0 * n)
        * math.log(n)
    )
    return (mi - penalty) / divisor


def bdeu_correction(ds: Dataset, x_vars, y_vars, z_vars, ess: float, base="e") -> float:
    """Finite-sample correction term for evenly split prior weights.

    Every sum runs over the full declared state space of its margin,
    zero-count cells included; absent cells share one closed-form term.
    """
    if not ess > 0.0:
        raise ValueError(f"equivalent sample size must be positive, got {ess!r}")
    divisor = log_base_divisor(base)
    xs, ys, zs = _resolve_triple(ds, x_vars, y_vars, z_vars)
    a = xs.joint_arity
    b = ys.joint_arity
    g = zs.joint_arity
    n = ds.n
    denom = n + ess

    def cell_sum(subset: VarSet, w: float) -> float:
        table = counts(ds, subset)
        observed = math.fsum(math.log((c + w) / denom) for _, c in table.items())
        absent = subset.joint_arity - table.num_nonzero
        return observed + absent * math.log(w / denom)

    s_xz = cell_sum(xs.union(zs), ess / (a * g))
    s_yz = cell_sum(ys.union(zs), ess / (b * g))
    s_xyz = cell_sum(xs.union(ys).union(zs), ess / (a * b * g))
    s_z = cell_sum(zs, ess / g)

    value = (
        -(ess / (a * g) - 0.5) * s_xz
        - (ess / (b * g) - 0.5) * s_yz
        + (ess / (a * b * g) - 0.5) * s_xyz
        + (ess / g - 0.5) * s_z
    )
    return value / divisor


def ci_statistics(ds: Dataset, x_vars, y_vars, z_vars, prior: PriorSpec, base="e") -> CIStatistics:
    """Bundle J, penalized MI, and the split-weight correction for one query.

    The correction is identically zero for non-BDeu priors.
    """
    divisor = log_base_divisor(base)
    xs, ys, zs = _resolve_triple(ds, x_vars, y_vars, z_vars)
    j = j_statistic(ds, x_vars, y_vars, z_vars, prior) / divisor
    pmi = penalized_mutual_information(ds, x_vars, y_vars, z_vars, base=base)
    corr = (
        bdeu_correction(ds, x_vars, y_vars, z_vars, prior.ess, base=base)
        if isinstance(prior, BDeu)
        else 0.0
    )
    return CIStatistics(
        j=j,
        penalized_mi=pmi,
        correction=corr,
        x_arity=xs.joint_arity,
        y_arity=ys.joint_arity,
        z_arity=zs.joint_arity,
        prior=prior.name,
        log_base="2" if divisor != 1.0 else "e",
    )


def ci_decide_cond(ds: Dataset, x, y, z_vars, prior: PriorSpec, p: float) -> CIVerdict:
    """Decide X independent of Y given Z at prior independence probability p.

    Independence wins when

        ln p + score(X+Z) + score(Y+Z) >= ln(1-p) + score(X+Y+Z) + score(Z)

    with ties decided independent.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"prior probability p must lie strictly between 0 and 1, got {p!r}")
    xs, ys, zs = _resolve_triple(ds, [x] if isinstance(x, (str, int)) else x,
                                 [y] if isinstance(y, (str, int)) else y, z_vars)
    xz = xs.union(zs)
    yz = ys.union(zs)
    xyz = xz.union(ys)
    left = math.log(p) + marginal_score(ds, xz, prior) + marginal_score(ds, yz, prior)
    right = (
        math.log(1.0 - p)
        + marginal_score(ds, xyz, prior)
        + marginal_score(ds, zs, prior)
    )
    return CIVerdict(independent=left >= right, p=p, left=left, right=right)


def ci_decide_pair(ds: Dataset, x, y, prior: PriorSpec, p: float) -> CIVerdict:
    """Unconditional independence decision; the Z group is empty."""
    return ci_decide_cond(ds, x, y, (), prior, p)


def asymptotic_residuals(
    datasets: Sequence[Dataset], x_vars, y_vars, z_vars, prior: PriorSpec
) -> list[tuple[int, float]]:
    """Residuals of the J expansion over a growing-n dataset sequence.

    For each dataset: n * (J - penalized MI), minus the correction term
    when the prior splits an equivalent sample size.  All in nats.  The
    datasets are expected to be prefixes of one sampled stream, sorted
    by strictly increasing n over a shared schema.
    """
    sizes = [ds.n for ds in datasets]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"dataset sizes must be strictly increasing, got {sizes}")
    out = []
    for ds in datasets:
        j = j_statistic(ds, x_vars, y_vars, z_vars, prior)
        pmi = penalized_mutual_information(ds, x_vars, y_vars, z_vars, base="e")
        residual = ds.n * (j - pmi)
        if isinstance(prior, BDeu):
            residual -= bdeu_correction(ds, x_vars, y_vars, z_vars, prior.ess, base="e")
        out.append((ds.n, residual))
    return out
