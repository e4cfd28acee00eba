"""End-to-end reduction: from breaking the hashed first register to inverting ``f``.

The hashed function ``f'(h, x) = (h, h(f(x)))`` is attacked on the domain
``W' = {(h, x) : x ∈ S_t}``. The inverter ``A₂`` built from the adversary is
then turned into ``B(y)``: pick ``h`` uniformly, run ``A₂(h, h(y))`` and keep
the ``x`` part of its output. Every quantity is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..funcfam import FunctionFamilyInstance, hashed_function, heavy_set
from ..protocols.params import ProtocolParams
from .adversary import (
    Adversary,
    BindingRelation,
    alternating_adversary,
    evaluate_binding,
    perturbed_adversary,
)
from .inverter import projector_sandwich, run_inverter

TOL = 1e-9


@dataclass(frozen=True)
class ChainStep:
    name: str
    lhs: float
    rhs: float
    asserted: bool = True

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - TOL


@dataclass
class ReductionReport:
    b0: float
    b1: float
    eps: float
    p_uniform: float
    sandwich: float
    p_invert_f: float
    good_pairs: int
    good_pairs_bound: float
    steps: list[ChainStep] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return abs(self.p_uniform - self.sandwich) <= TOL and all(
            s.holds for s in self.steps if s.asserted
        )


def hashed_relation(f: FunctionFamilyInstance, params: ProtocolParams) -> BindingRelation:
    """``W' = {(h, x) : x ∈ S_t}`` on the hashed function."""
    fam = params.first_family()
    fprime = hashed_function(f, fam)
    heavy = heavy_set(f, params.t, params.delta3)
    domain = [(h << f.n) | x for h in range(fam.size) for x in heavy]
    return BindingRelation.of(fprime, domain)


def reduction_pipeline(
    f: FunctionFamilyInstance,
    params: ProtocolParams,
    adversary: Adversary | None = None,
    seed: int | None = 0,
    keep: int = 1,
    noise: float = 0.1,
) -> ReductionReport:
    """Run the reduction and check the probability chain step by step.

    Without an explicit ``adversary`` a locally optimized one, lightly
    perturbed, is built on ``W'``. The counting bound on the set ``T`` of good pairs is
    reported but not asserted.
    """
    rel = hashed_relation(f, params)
    if not rel.domain:
        raise ValueError("the heavy set is empty; nothing to attack")
    fprime = rel.f
    if adversary is None:
        adversary = perturbed_adversary(alternating_adversary(rel, keep, seed=seed), noise, seed)
    rep = evaluate_binding(adversary, rel)
    eps = rep.b0 + rep.b1 - 1
    fam = params.first_family()
    n, v = f.n, fam.out_bits

    outputs = {}
    for y2 in range(1 << fprime.out_bits):
        outputs[y2] = run_inverter(adversary, rel, y2)
    p_uniform = float(np.mean([r.p_inv for r in outputs.values()]))
    sandwich = projector_sandwich(adversary, rel)

    # B inverts f: average over y ~ f(U_n) and uniform h
    hashed = fam.evaluate_many(np.arange(fam.size), np.arange(1 << n))  # [h, y] -> h(y)
    x_of = np.arange(1 << fprime.n) & ((1 << n) - 1)
    p_b = 0.0
    for y in range(1 << n):
        if f.counts[y] == 0:
            continue
        hit = f.table[x_of] == y
        acc = 0.0
        for h in range(fam.size):
            dist = outputs[(h << v) | int(hashed[h, y])].open_distribution
            acc += float(dist[hit].sum())
        p_b += f.p[y] * acc / fam.size

    # T = {(h, x) : p_{h,x} >= ε²/8}
    thresh = eps**2 / 8 if eps > 0 else np.inf
    good = 0
    for z in range(1 << fprime.n):
        y2 = int(fprime.table[z])
        p_hx = outputs[y2].p_inv / int(fprime.counts[y2])
        good += p_hx >= thresh
    good_bound = (eps**2 / 8) * (1 << n) * fam.size if eps > 0 else 0.0

    scale = 2.0 ** (-(params.delta1 + params.delta3))
    lb = (np.sqrt(rep.b1) - np.sqrt(max(0.0, 1 - rep.b0))) ** 2 if rep.b1 > 1 - rep.b0 else 0.0
    steps = [
        ChainStep("uniform-input success >= (sqrt b1 - sqrt(1-b0))^2", p_uniform, lb),
        ChainStep("(sqrt b1 - sqrt(1-b0))^2 >= eps^2/4", lb, max(eps, 0) ** 2 / 4),
        ChainStep("Pr[B inverts f] >= 2^-(d1+d3) * uniform-input success", p_b, scale * p_uniform),
        ChainStep("Pr[B inverts f] >= 2^-(d1+d3) * eps^4/64", p_b, scale * max(eps, 0) ** 4 / 64),
        ChainStep("|T| >= eps^2/8 * 2^n |H|", float(good), good_bound, asserted=False),
    ]
    return ReductionReport(
        rep.b0, rep.b1, eps, p_uniform, sandwich, p_b, good, good_bound, steps
    )
