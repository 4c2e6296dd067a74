"""p-adic frequency probability, complexity growth and interference-memory simulation."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import _core
from ._core import (
    CheckpointPlan,
    EventSequence,
    PAdic,
    PrecisionExhausted,
    UnsupportedBase,
    generate,
    is_prime,
    lz76,
    plan,
)

__version__ = _core.__version__

RationalLike = Union[int, Fraction, str]

__all__ = [
    "CheckpointPlan",
    "EventSequence",
    "PAdic",
    "PrecisionExhausted",
    "UnsupportedBase",
    "classify_collective",
    "cli",
    "dispersion_test",
    "distance",
    "fit_growth",
    "generate",
    "hensel_sqrt",
    "is_prime",
    "lz76",
    "norm",
    "plan",
    "profile",
    "rational",
    "run_scenario",
    "spec_hash",
    "to_digits",
    "valuation",
    "verify",
]


def _text(q: RationalLike) -> str:
    if isinstance(q, str):
        return q
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def valuation(q: RationalLike, p: int) -> Optional[int]:
    """ord_p q, or None for zero."""
    return _core.valuation(_text(q), p)


def norm(q: RationalLike, p: int) -> Fraction:
    return Fraction(_core.norm(_text(q), p))


def distance(a: RationalLike, b: RationalLike, p: int) -> Fraction:
    return Fraction(_core.distance(_text(a), _text(b), p))


def to_digits(q: RationalLike, p: int, precision: int) -> PAdic:
    return _core.to_digits(_text(q), p, precision)


def hensel_sqrt(q: RationalLike, p: int, precision: int) -> Optional[PAdic]:
    return _core.hensel_sqrt(_text(q), p, precision)


def rational(x: PAdic) -> Fraction:
    """The rational carried by the known digits of x."""
    return Fraction(x.rational())


def verify(seq: EventSequence, checkpoint_plan: CheckpointPlan) -> dict:
    return json.loads(_core.verify(seq, checkpoint_plan))


def classify_collective(
    seq: EventSequence,
    p: int,
    checkpoints: Sequence[int] = (),
    tolerance: float = 1e-3,
    tail: int = 3,
    digits: int = 8,
) -> dict:
    kind, real, padic, trace = _core.classify_collective(seq, p, list(checkpoints), tolerance, tail, digits)
    return {"collective": kind, "real": json.loads(real), "padic": json.loads(padic), "trace_csv": trace}


def profile(seq: EventSequence, growth_base: float = 2.0) -> list[tuple[int, float]]:
    return _core.profile(seq, growth_base)


def fit_growth(points: Iterable[tuple[int, float]], dead_zone: float = 0.5, ceiling: float = 0.25) -> dict:
    return json.loads(_core.fit_growth(list(points), dead_zone, ceiling))


def _spec_text(spec: Union[str, dict]) -> str:
    return spec if isinstance(spec, str) else json.dumps(spec)


def run_scenario(spec: Union[str, dict]) -> tuple[list[dict], dict]:
    """Trial records (without the provenance line) and the run's metrics."""
    ndjson, metrics = _core.run_scenario(_spec_text(spec))
    lines = [json.loads(line) for line in ndjson.splitlines() if line]
    return [r for r in lines if "provenance" not in r], json.loads(metrics)


def spec_hash(spec: Union[str, dict]) -> str:
    return _core.spec_hash(_spec_text(spec))


def dispersion_test(counts: Sequence[int], alpha: float = 0.01) -> dict:
    return json.loads(_core.dispersion_test(list(counts), alpha))


def cli(args: Sequence[str]) -> tuple[int, str, str]:
    """Runs the command line in-process: (exit code, stdout, stderr)."""
    return _core.cli(list(args))
