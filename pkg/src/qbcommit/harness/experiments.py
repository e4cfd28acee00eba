"""Experiment definitions.

Each experiment takes a parameter dict (defaults below, overridable from the
CLI), an optional function table and a seed, and returns a :class:`Report`.
Rows are computed in a thread pool sized by ``QBC_THREADS``; the report is
sorted canonically, so the output never depends on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from ..attack.adversary import BindingRelation, perfect_adversary
from ..attack.cheat import (
    closed_form_optimum,
    explicit_family_optimum,
    optimal_statistical_cheat,
    spectral_optimum,
)
from ..attack.inverter import aggregate_inversion
from ..attack.reduction import reduction_pipeline
from ..funcfam import FunctionFamilyInstance, entropy_buckets, make_family
from ..hashfam import HashFamily, lhl_distance, lhl_output_length
from ..protocols import (
    ProtocolParams,
    base_commit,
    base_verify,
    hiding_report,
    p1_commit,
    p1_verify,
    p2_commit,
    p2_slot_hiding,
    p2_verify,
    p3_commit,
    p3_verify,
    p4_commit,
    p4_verify,
)
from ..protocols.hiding import (
    coverage_enumerated,
    coverage_exact,
    coverage_lower_bound,
    share_marginals_uniform,
)
from .reports import Report, ReportRow


class ConfigError(ValueError):
    """Malformed or out-of-budget experiment configuration (exit status 2)."""


def thread_count() -> int:
    raw = os.environ.get("QBC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"QBC_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("QBC_THREADS must be at least 1")
    return n


def run_pool(tasks: Iterable[Callable[[], list[ReportRow]]]) -> list[ReportRow]:
    tasks = list(tasks)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        chunks = list(pool.map(lambda task: task(), tasks))
    return [row for chunk in chunks for row in chunk]


def _merge(defaults: Mapping[str, Any], params: Mapping[str, Any] | None) -> dict[str, Any]:
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown parameters {sorted(unknown)}; allowed: {sorted(defaults)}")
    return {**defaults, **params}


def _seeds(seed: int, count: int) -> list[int]:
    """Child seeds derived deterministically from the experiment seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


# ------------------------------------------------------------------ correctness

CORRECTNESS_DEFAULTS = {
    "n": 3, "t": 2, "delta1": 0, "delta2": 0, "runs": 50,
    "m_p2": 4, "m_p3": 2, "m_p4": 2, "t_range": [1, 2, 3],
}


def correctness(params=None, f: FunctionFamilyInstance | None = None, seed: int = 0) -> Report:
    """Honest commit then reveal for every protocol; minimum acceptance probability."""
    cfg = _merge(CORRECTNESS_DEFAULTS, params)
    n = cfg["n"] if f is None else f.n
    try:
        p1 = ProtocolParams(n, cfg["t"], cfg["delta1"], cfg["delta2"])
        p2 = ProtocolParams(n, cfg["t"], cfg["delta1"], cfg["delta2"], m=cfg["m_p2"])
        p3 = ProtocolParams(n, cfg["t"], cfg["delta1"], cfg["delta2"], m=cfg["m_p3"])
        p4 = ProtocolParams(
            n, cfg["t"], cfg["delta1"], cfg["delta2"], m=cfg["m_p4"], t_range=tuple(cfg["t_range"])
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    runs = int(cfg["runs"])

    def one(protocol: str, s: int) -> tuple[float, bool, bool]:
        rng = np.random.default_rng(s)
        fn = f if f is not None else make_family("random", n, seed=s)
        w1, w2 = (int(b) for b in rng.integers(0, 2, size=2))
        if protocol == "base":
            c, d = base_commit(fn, w1, rng=rng)
            out, sampled, want = base_verify(c, d, fn), base_verify(c, d, fn, seed=s), (w1,)
        elif protocol == "p1":
            c, d = p1_commit(fn, p1, w1, w2, rng)
            out, sampled, want = p1_verify(c, d, fn, p1), p1_verify(c, d, fn, p1, seed=s), (w1, w2)
        elif protocol == "p2":
            c, d = p2_commit(fn, p2, w1, w2, rng)
            out, sampled, want = p2_verify(c, d, fn, p2), p2_verify(c, d, fn, p2, seed=s), (w1, w2)
        elif protocol == "p3":
            c, d = p3_commit(fn, p3, w1, rng)
            out, sampled, want = p3_verify(c, d, fn, p3), p3_verify(c, d, fn, p3, seed=s), (w1, w1)
        else:
            c, d = p4_commit(fn, p4, w1, rng)
            out, sampled, want = p4_verify(c, d, fn, p4), p4_verify(c, d, fn, p4, seed=s), (w1,)
        return out.probability, out.accepted and sampled.accepted, out.recovered == want

    def task(protocol: str):
        def run():
            results = [one(protocol, s) for s in _seeds(seed + hash_name(protocol), runs)]
            worst = min(p for p, _, _ in results)
            return [
                ReportRow((("protocol", protocol), ("quantity", "min_accept_probability"), ("runs", runs)), worst, 1.0, "eq"),
                ReportRow((("protocol", protocol), ("quantity", "accepted_runs"), ("runs", runs)), sum(a for _, a, _ in results), runs, "eq"),
                ReportRow((("protocol", protocol), ("quantity", "recovered_runs"), ("runs", runs)), sum(r for _, _, r in results), runs, "eq"),
            ]
        return run

    return Report("correctness", run_pool(task(p) for p in ("base", "p1", "p2", "p3", "p4")))


def hash_name(name: str) -> int:
    """Stable small integer from a name (Python's ``hash`` is salted per process)."""
    return sum((i + 1) * ord(c) for i, c in enumerate(name))


# ----------------------------------------------------------------------- hiding

HIDING_DEFAULTS = {"n": 4, "r": [1, 2, 3], "deltas": [0, 1, 2, 3, 4], "condition": "gamma"}


def hiding(params=None, f: FunctionFamilyInstance | None = None, seed: int = 0) -> Report:
    """Distance of the paired commitment from maximally mixed, at ``t = t₀``."""
    cfg = _merge(HIDING_DEFAULTS, params)
    n = cfg["n"]
    if f is not None:
        tables = [(f.regularity if f.regularity is not None else -1, f)]
    else:
        tables = [(r, make_family("regular", n, r=r, seed=seed)) for r in cfg["r"]]

    def task(r, fn):
        def run():
            rows = []
            t0 = entropy_buckets(fn).t0
            for d1 in cfg["deltas"]:
                for d2 in cfg["deltas"]:
                    if d1 > t0 or d2 > fn.n - t0:
                        continue
                    pp = ProtocolParams(fn.n, t0, d1, d2)
                    rep = hiding_report("p1", fn, pp, cfg["condition"])
                    key = (("protocol", "p1"), ("r", r), ("t", t0), ("delta1", d1), ("delta2", d2))
                    for row in rep.rows:
                        bits = "".join(map(str, row.bits))
                        rows.append(ReportRow(key + (("w", bits),), row.distance_to_uniform, row.bound, "le"))
            return rows
        return run

    rows = run_pool(task(r, fn) for r, fn in tables)
    perm = make_family("permutation", n, seed=seed)
    base = hiding_report("base", perm, condition="uniform")
    rows.append(
        ReportRow((("protocol", "base"), ("r", 0), ("t", n), ("delta1", 0), ("delta2", 0), ("w", "01")),
                  base.max_pairwise, 1e-10, "le", tol=0.0)
    )
    return Report("hiding", rows)


# ---------------------------------------------------------------------- binding

BINDING_DEFAULTS = {"q": [1, 2, 3, 4, 5, 6], "samples": 20}


def binding(params=None, f: FunctionFamilyInstance | None = None, seed: int = 0) -> Report:
    """Best ``b₀ + b₁`` against random target sets, compared with ``1 + √ξ``.

    Each set also gets the two-level cheat state at a random weight ``a``,
    whose measured ``b₀, b₁`` are compared with the closed forms. Three
    optima per set: the closed form maximized over ``a``, the measured
    two-level family maximized over ``a``, and the spectral optimum.
    """
    cfg = _merge(BINDING_DEFAULTS, params)

    def task(q, s):
        def run():
            rng = np.random.default_rng(s)
            k = int(rng.integers(1, (1 << q) + 1))
            target = sorted(int(z) for z in rng.choice(1 << q, size=k, replace=False))
            xi = k / (1 << q)
            bound = 1 + math.sqrt(xi)
            key = (("q", q), ("sample", s % 100000), ("size", k))
            a = float(rng.uniform())
            cheat = optimal_statistical_cheat(target, q, a)
            explicit = explicit_family_optimum(target, q)
            spectral = spectral_optimum(target, q)
            return [
                ReportRow(key + (("quantity", "b0_vs_formula"),), cheat.b0, cheat.formula_b0, "eq"),
                ReportRow(key + (("quantity", "b1_vs_formula"),), cheat.b1, cheat.formula_b1, "eq"),
                ReportRow(key + (("quantity", "explicit_vs_spectral"),), explicit, spectral, "eq"),
                ReportRow(key + (("quantity", "closed_form"),), closed_form_optimum(xi), bound, "le"),
                ReportRow(key + (("quantity", "explicit_family"),), explicit, bound, "le"),
                ReportRow(key + (("quantity", "spectral"),), spectral, bound, "le"),
            ]
        return run

    tasks = [task(q, s) for q in cfg["q"] for s in _seeds(seed + q, cfg["samples"])]
    return Report("binding", run_pool(tasks))


# -------------------------------------------------------------------- reduction

REDUCTION_DEFAULTS = {
    "cases": [
        {"kind": "regular", "n": 2, "r": 1, "t": 1, "delta1": 0, "delta3": 0},
        {"kind": "permutation", "n": 2, "r": 0, "t": 2, "delta1": 1, "delta3": 0},
        {"kind": "regular", "n": 3, "r": 1, "t": 2, "delta1": 1, "delta3": 1},
    ],
    "perfect_n": [2, 3],
}


CHAIN_SLUGS = (
    "uniform_success_vs_sqrt_gap",
    "sqrt_gap_vs_eps2_over_4",
    "invert_f_vs_scaled_success",
    "invert_f_vs_scaled_eps4",
    "good_pair_count",
)


def reduction(params=None, f: FunctionFamilyInstance | None = None, seed: int = 0) -> Report:
    """Inverter identities on perfect pairs and the hashed reduction chain."""
    cfg = _merge(REDUCTION_DEFAULTS, params)

    def perfect(n):
        def run():
            rows = []
            for label, fn in (
                ("permutation", make_family("permutation", n, seed=seed)),
                ("compressing", make_family("regular", n + 1, r=1, out_bits=n, seed=seed)),
            ):
                rel = BindingRelation.of(fn, range(1 << fn.n))
                adv, _ = perfect_adversary(rel, keep=1, seed=seed)
                agg = aggregate_inversion(adv, rel)
                key = (("case", f"perfect-{label}"), ("n", n))
                rows.append(ReportRow(key + (("quantity", "p_inv_uniform"),), agg.uniform, 1.0, "eq", 1e-10))
                rows.append(ReportRow(key + (("quantity", "sandwich"),), agg.projector_value, 1.0, "eq", 1e-10))
            return rows
        return run

    def chain(i, case):
        def run():
            try:
                fn = f if f is not None else make_family(case["kind"], case["n"], r=case.get("r", 0), seed=seed)
                pp = ProtocolParams(fn.n, case["t"], case["delta1"], 0, delta3=case["delta3"])
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"bad reduction case {case}: {exc}") from exc
            rep = reduction_pipeline(fn, pp, seed=seed)
            key = (("case", f"chain-{i}"), ("n", fn.n))
            rows = [
                ReportRow(key + (("quantity", "epsilon"),), rep.eps, None, "info"),
                ReportRow(key + (("quantity", "identity"),), rep.p_uniform, rep.sandwich, "eq"),
            ]
            for slug, step in zip(CHAIN_SLUGS, rep.steps):
                rows.append(
                    ReportRow(key + (("quantity", slug),), step.lhs, step.rhs, "ge" if step.asserted else "info")
                )
            return rows
        return run

    tasks = [perfect(n) for n in cfg["perfect_n"]]
    tasks += [chain(i, c) for i, c in enumerate(cfg["cases"])]
    return Report("reduction", run_pool(tasks))


# -------------------------------------------------------------------------- lhl

LHL_DEFAULTS = {"max_len": 6, "eps": [1.0, 0.5, 0.25], "kind": "toeplitz"}


def lhl_grid(max_len: int, eps_values) -> list[tuple[int, int, float, int]]:
    """Every ``(ℓ, λ, ε, v)`` with ``v = λ - 2 log₂(1/ε) ≥ 0``."""
    out = []
    for ell in range(1, max_len + 1):
        for lam in range(0, ell + 1):
            for eps in eps_values:
                v = lhl_output_length(lam, eps)
                if lam - 2 * math.log2(1 / eps) >= 0 and v <= ell:
                    out.append((ell, lam, float(eps), v))
    return out


def lhl(params=None, f: FunctionFamilyInstance | None = None, seed: int = 0) -> Report:
    """Exact hashed-output distance from uniform for flat sources of min-entropy λ."""
    cfg = _merge(LHL_DEFAULTS, params)

    def task(ell, lam, eps, v):
        def run():
            rng = np.random.default_rng([seed, ell, lam])
            support = rng.choice(1 << ell, size=1 << lam, replace=False)
            dist = np.zeros(1 << ell)
            dist[support] = 1.0 / (1 << lam)
            d = lhl_distance(HashFamily(ell, v, cfg["kind"]), dist)
            key = (("len", ell), ("min_entropy", lam), ("eps", eps), ("out", v))
            return [ReportRow(key, d, eps, "le")]
        return run

    return Report("lhl", run_pool(task(*g) for g in lhl_grid(cfg["max_len"], cfg["eps"])))


# ---------------------------------------------------------------- amplification

AMPLIFICATION_DEFAULTS = {
    "mu": 0.25, "m_max": 20, "enum_m_max": 4,
    "profile": [4, 1, 1, 1, 1], "slot_deltas": [[1, 1], [2, 0]],
}


def amplification(params=None, f: FunctionFamilyInstance | None = None, seed: int = 0) -> Report:
    """Coverage ``1 - (1-μ)^m`` and parallel-commitment hiding with one good slot."""
    cfg = _merge(AMPLIFICATION_DEFAULTS, params)
    rows: list[ReportRow] = []
    mu = Fraction(cfg["mu"]).limit_denominator(1 << 20)
    for m in range(1, cfg["m_max"] + 1):
        exact = float(coverage_exact(mu, m))
        key = (("part", "coverage"), ("source", "closed"), ("m", m))
        rows.append(ReportRow(key + (("quantity", "vs_product"),), exact, float(1 - (1 - mu) ** m), "eq", 0.0))
        rows.append(ReportRow(key + (("quantity", "vs_exp"),), exact, coverage_lower_bound(float(mu), m), "ge"))

    fn = f if f is not None else make_family("planted-heavy", 3, profile=cfg["profile"], seed=seed)
    buckets = entropy_buckets(fn)
    for m in range(1, cfg["enum_m_max"] + 1):
        enum = coverage_enumerated(buckets.gamma, fn.n, m)
        key = (("part", "coverage"), ("source", "enumerated"), ("m", m))
        rows.append(ReportRow(key + (("quantity", "vs_product"),), float(enum), float(coverage_exact(buckets.gamma_measure, m)), "eq", 0.0))
        rows.append(ReportRow(key + (("quantity", "vs_exp"),), float(enum), coverage_lower_bound(float(buckets.gamma_measure), m), "ge"))
        rows.append(ReportRow(key + (("quantity", "shares_uniform"),), float(share_marginals_uniform(m)), 1.0, "eq", 0.0))

    reg = make_family("regular", 3, r=1, seed=seed)
    t0 = entropy_buckets(reg).t0

    def slot_task(d1, d2):
        def run():
            pp = ProtocolParams(3, t0, d1, d2, m=2)
            out = []
            for res in p2_slot_hiding(reg, pp, gamma_slot=0):
                key = (("part", "p2_hiding"), ("delta1", d1), ("delta2", d2), ("w", f"{res.bits[0]}{res.bits[1]}"))
                out.append(ReportRow(key + (("quantity", "to_reference"),), res.distance_to_reference, res.slot_distance, "le"))
                out.append(ReportRow(key + (("quantity", "max_pairwise"),), max(res.pairwise.values()), 2 * res.slot_distance, "le"))
            return out
        return run

    rows += run_pool(slot_task(d1, d2) for d1, d2 in cfg["slot_deltas"])
    return Report("amplification", rows)


EXPERIMENTS: dict[str, Callable[..., Report]] = {
    "correctness": correctness,
    "hiding": hiding,
    "binding": binding,
    "reduction": reduction,
    "lhl": lhl,
    "amplification": amplification,
}


def run_experiment(kind: str, params=None, f=None, seed: int = 0) -> Report:
    if kind not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {kind!r}")
    return EXPERIMENTS[kind](params, f, seed).canonical()
