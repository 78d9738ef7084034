"""Randomized sweeps of the classical <=> separable equivalence."""

from __future__ import annotations

import csv
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .errors import InternalInconsistency, UndefinedMeanDirection
from .io import fmt_float
from .separability import CLASSICAL, NONCLASSICAL, CertifyConfig, bloch_correlations, certify, reduce_two_qubit
from .symstate import SymDensity, random_density, scs_mixture
from .witnesses import squeezing_xi2

PPT_MARGIN = 1e-4
TRACE_TOL = 1e-10


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def survey_state(n_qubits, seed):
    """Ginibre state of random rank blended with white noise at a random level.

    Pure Ginibre states are almost all entangled; the noise blend puts both
    verdicts in the corpus.
    """
    rng = _rng(seed)
    noise = rng.uniform()
    rank = int(rng.integers(1, n_qubits + 2))
    g = random_density(n_qubits, int(rng.integers(2 ** 63)), rank).matrix
    d = n_qubits + 1
    return SymDensity(n_qubits, (1 - noise) * g + noise * np.eye(d) / d)


def control_state(n_qubits, seed):
    """Separable control: mixture of 2-5 coherent states in random directions."""
    rng = _rng(seed)
    k = int(rng.integers(2, 6))
    w = rng.dirichlet(np.ones(k))
    z = rng.uniform(-1, 1, k)
    dirs = list(zip(np.arccos(z), rng.uniform(0, 2 * np.pi, k)))
    return scs_mixture(n_qubits, w, dirs)


@dataclass(frozen=True)
class SurveyRecord:
    index: int
    kind: str
    n_qubits: int
    seed: int
    verdict: str
    residual: float | None
    ppt_min: float | None
    concurrence: float | None
    trace_sum: float | None
    xi2: float | None
    violation: str


def _record(job):
    index, kind, n, seed, config = job
    rho = survey_state(n, seed) if kind == "random" else control_state(n, seed)
    problems = []
    try:
        cert = certify(rho, config)
        verdict, residual = cert.verdict, cert.residual
        ppts = [w.value for w in cert.witnesses if w.type == "PPT"]
        conc = next((w.value for w in cert.witnesses if w.type == "Concurrence"), None)
    except InternalInconsistency:
        verdict, residual, ppts, conc = "Error", None, [], None
        problems.append("internal-inconsistency")
    ppt_min = min(ppts) if ppts else None

    trace_sum = None
    if n >= 2:
        trace_sum = bloch_correlations(reduce_two_qubit(rho))[2]
        if abs(trace_sum - 1) >= TRACE_TOL:
            problems.append("trace-sum")
    try:
        xi2 = squeezing_xi2(rho)
    except UndefinedMeanDirection:
        xi2 = None

    if n == 2 and ppt_min is not None and abs(ppt_min) >= PPT_MARGIN:
        if (verdict == CLASSICAL) != (ppt_min >= 0):
            problems.append("ppt-disagreement")
    if kind == "control" and verdict != CLASSICAL:
        problems.append("control-not-classical")
    if xi2 is not None and xi2 < 1 - 1e-3 and verdict != NONCLASSICAL:
        problems.append("squeezed-not-nonclassical")
    return SurveyRecord(index, kind, n, seed, verdict, residual, ppt_min, conc, trace_sum, xi2, ";".join(problems))


def run_survey(n_values, count, seed, controls=0, config=None, jobs=1):
    """Certify ``count`` random states (and ``controls`` separable ones) per N.

    Record ``i`` uses seed ``seed ^ i`` so serial and parallel runs agree.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    config = CertifyConfig() if config is None else config
    todo = []
    for n in n_values:
        for kind, how_many in (("random", count), ("control", controls)):
            for _ in range(how_many):
                i = len(todo)
                todo.append((i, kind, n, seed ^ i, config))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_record, todo, chunksize=4))
    return [_record(job) for job in todo]


def summarize(records):
    verdicts = Counter(r.verdict for r in records)
    by_kind = {kind: dict(Counter(r.verdict for r in records if r.kind == kind))
               for kind in sorted({r.kind for r in records})}
    violations = [r.index for r in records if r.violation]
    return {
        "total": len(records),
        "verdicts": {v: verdicts.get(v, 0) for v in ("Classical", "NonClassical", "Undecided")},
        "by_kind": by_kind,
        "violations": len(violations),
        "violation_indices": violations,
    }


def write_survey_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f.name for f in fields(SurveyRecord)])
        for r in records:
            writer.writerow(["n/a" if v is None else fmt_float(v) if isinstance(v, float) else v
                             for v in astuple(r)])
