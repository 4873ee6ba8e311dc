"""
Strategy certificates and the k-ladder.

A certificate at level k carries everything the recursive strategy needs to guarantee k+ε given a
child strategy that guarantees k: the thresholds d_i, the quotas a_i, their exact sum S > 1, and
the tree heights and move bound of the composed strategy. The base certificate (k = 1) stands for
the trivial strategy.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, NoReturn, Optional, Sequence, Tuple

import structlog

from flowgame import metrics
from flowgame.certificates.formulas import quotas, threshold_floor, thresholds
from flowgame.certificates.search import choose_eps, choose_n
from flowgame.errors import CertificateInvariantError, ConfigError, SearchCapExceeded
from flowgame.game.rationals import ONE, ZERO, Rational, as_fraction, format_rat, parse_rat
from flowgame.schemas import CertDocument, LadderDocument, canonical_json
from flowgame.settings import settings

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class StrategyCert:
    k: Fraction
    eps: Fraction
    n: int
    d: Tuple[Fraction, ...]
    aq: Tuple[Fraction, ...]
    S: Fraction
    height: int
    mono_height: int
    steps: int
    child: Optional["StrategyCert"] = field(default=None, repr=False)

    @property
    def is_base(self) -> bool:
        return self.child is None

    @property
    def guarantee(self) -> Fraction:
        """Target the certified strategy reaches in the unit game."""
        return self.k + self.eps

    @property
    def level(self) -> int:
        return 0 if self.child is None else self.child.level + 1

    def chain(self) -> Iterator["StrategyCert"]:
        """This certificate, then its child, down to the base."""
        cert: Optional[StrategyCert] = self
        while cert is not None:
            yield cert
            cert = cert.child

    def z(self, i: int) -> str:
        """Root of left subgame i: 0·1^(i−1)·0."""
        return "0" + "1" * (i - 1) + "0"


BASE_CERT = StrategyCert(
    k=ONE, eps=ZERO, n=0, d=(), aq=(), S=ZERO, height=0, mono_height=0, steps=1, child=None
)


def monotone_height(n: int, child_mono_height: int) -> int:
    """Tree height the monotone strategy needs, from a dry run of its root placement.

    Every left root is 0·1^j·0 with j = max(watermark, previous j + 1); the worst-case watermark
    after a subgame rooted at depth D is D + child height − 1, and a threat root has W + 2 ones.
    """
    watermark = -1
    ones = -1
    height = 0
    for _ in range(n):
        ones = max(watermark, ones + 1)
        root_depth = ones + 2
        watermark = root_depth + child_mono_height - 1
        height = max(height, root_depth + child_mono_height, watermark + 2 + child_mono_height)
    return height


def build_cert(
    child: Optional[StrategyCert] = None,
    eps: Optional[Rational] = None,
    n: Optional[int] = None,
) -> StrategyCert:
    """Certificate one level above `child`; the base certificate when there is no child.

    ε and n default to `choose_eps` and `choose_n`; explicit values are accepted but must still
    give S > 1.
    """
    if child is None:
        return BASE_CERT
    k = child.guarantee
    eps_value = as_fraction(eps) if eps is not None else choose_eps(k)
    n_value = n if n is not None else choose_n(k, eps_value)
    if n_value < 1:
        raise ConfigError(f"n must be positive, got {n_value}")
    d = tuple(thresholds(k, eps_value, n_value))
    aq = tuple(quotas(k, eps_value, n_value))
    total = sum(aq, ZERO)
    if total <= 1:
        raise CertificateInvariantError(f"S={total} ≤ 1 for k={k}, eps={eps_value}, n={n_value}")
    cert = StrategyCert(
        k=k,
        eps=eps_value,
        n=n_value,
        d=d,
        aq=aq,
        S=total,
        height=n_value + 1 + child.height,
        mono_height=monotone_height(n_value, child.mono_height),
        steps=2 + (n_value + 1) * (child.steps + 1),
        child=child,
    )
    metrics.record_cert_built()
    logger.info(
        "cert_built",
        k=format_rat(k),
        eps=format_rat(eps_value),
        n=n_value,
        S=float(total),
        height=cert.height,
        mono_height=cert.mono_height,
        steps=cert.steps,
    )
    return cert


def validate_cert(cert: StrategyCert) -> None:
    """Re-check every certificate invariant exactly, down the whole chain."""
    for c in cert.chain():
        _validate_level(c)


def _fail(cert: StrategyCert, message: str) -> NoReturn:
    raise CertificateInvariantError(f"k={format_rat(cert.k)}: {message}")


def _validate_level(cert: StrategyCert) -> None:
    if cert.is_base:
        if (cert.k, cert.eps, cert.n, cert.height, cert.mono_height, cert.steps) != (ONE, ZERO, 0, 0, 0, 1):
            _fail(cert, "malformed base certificate")
        return
    child = cert.child
    assert child is not None
    k, eps, n = cert.k, cert.eps, cert.n
    if k < 1 or not 0 < eps < 1 or n < 1:
        _fail(cert, "parameters out of range")
    if child.guarantee != k:
        _fail(cert, f"child guarantees {child.guarantee}, expected {k}")
    if len(cert.d) != n or len(cert.aq) != n:
        _fail(cert, "threshold/quota lists do not have n entries")
    if list(cert.d) != thresholds(k, eps, n):
        _fail(cert, "thresholds do not match the threshold equation")
    if list(cert.aq) != quotas(k, eps, n):
        _fail(cert, "quotas do not match the quota equation")
    floor = threshold_floor(k, eps)
    if any(d <= floor for d in cert.d):
        _fail(cert, "threshold at or below ε(1+k)/(k+ε)")
    if any(b <= a for a, b in zip(cert.d, cert.d[1:])):
        _fail(cert, "thresholds not strictly increasing")
    if cert.d[-1] != 1:
        _fail(cert, "last threshold is not 1")
    if any(a <= 0 for a in cert.aq):
        _fail(cert, "non-positive quota")
    if cert.aq[-1] != (1 - eps) / n:
        _fail(cert, "last quota is not (1−ε)/n")
    if cert.S != sum(cert.aq, ZERO) or cert.S <= 1:
        _fail(cert, "quota sum is not an exact S > 1")
    for i, (d, a) in enumerate(zip(cert.d, cert.aq), start=1):
        # threat: the budget left after i subgames, spent against a(1) ≤ 1 − d_i, yields k+ε
        if i < n and k * (1 - eps) * (1 - Fraction(i, n)) / (1 - d) != k + eps:
            _fail(cert, f"threat identity fails at i={i}")
        # quota: the child's share against flow a_i plus ε/d_i yields k+ε
        if k + eps - eps / d != k * ((1 - eps) / n) / a:
            _fail(cert, f"quota identity fails at i={i}")
    if cert.height != n + 1 + child.height:
        _fail(cert, "height does not follow the spine layout")
    if cert.mono_height != monotone_height(n, child.mono_height):
        _fail(cert, "monotone height does not match the placement dry run")
    if cert.steps != 2 + (n + 1) * (child.steps + 1):
        _fail(cert, "step bound does not follow the recursion")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def cert_to_document(cert: StrategyCert) -> CertDocument:
    return CertDocument(
        k=format_rat(cert.k),
        eps=format_rat(cert.eps),
        n=cert.n,
        d=[format_rat(x) for x in cert.d],
        aq=[format_rat(x) for x in cert.aq],
        S=format_rat(cert.S),
        height=cert.height,
        mono_height=cert.mono_height,
        steps=cert.steps,
        child=cert_hash(cert.child) if cert.child is not None else None,
    )


@lru_cache(maxsize=None)
def cert_hash(cert: StrategyCert) -> str:
    return hashlib.sha256(canonical_json(cert_to_document(cert)).encode("utf-8")).hexdigest()


def cert_from_document(doc: CertDocument, child: Optional[StrategyCert] = None) -> StrategyCert:
    if doc.child is not None and (child is None or cert_hash(child) != doc.child):
        raise CertificateInvariantError("child certificate missing or hash mismatch")
    cert = StrategyCert(
        k=parse_rat(doc.k),
        eps=parse_rat(doc.eps),
        n=doc.n,
        d=tuple(parse_rat(x) for x in doc.d),
        aq=tuple(parse_rat(x) for x in doc.aq),
        S=parse_rat(doc.S),
        height=doc.height,
        mono_height=doc.mono_height,
        steps=doc.steps,
        child=child if doc.child is not None else None,
    )
    validate_cert(cert)
    return cert


# ---------------------------------------------------------------------------
# Ladder
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ladder:
    rungs: Tuple[StrategyCert, ...]

    @property
    def top(self) -> StrategyCert:
        return self.rungs[-1]

    def guarantees(self) -> List[Fraction]:
        return [r.guarantee for r in self.rungs]

    def for_target(self, k: Rational) -> StrategyCert:
        """Lowest rung whose guarantee reaches k."""
        k = as_fraction(k)
        for rung in self.rungs:
            if rung.guarantee >= k:
                return rung
        raise SearchCapExceeded(f"ladder tops out at {self.top.guarantee} < {k}")

    def to_document(self) -> LadderDocument:
        return LadderDocument(
            rungs=[cert_to_document(r) for r in self.rungs],
            hashes=[cert_hash(r) for r in self.rungs],
        )


def ladder(k_target: Rational, max_rungs: Optional[int] = None) -> Ladder:
    k_target = as_fraction(k_target)
    if k_target < 1:
        raise ConfigError(f"k_target must be at least 1, got {k_target}")
    cap = max_rungs if max_rungs is not None else settings.LADDER_MAX_RUNGS
    rungs: List[StrategyCert] = [build_cert()]
    while rungs[-1].guarantee < k_target:
        if len(rungs) >= cap:
            raise SearchCapExceeded(f"{cap} rungs reach only {rungs[-1].guarantee} < {k_target}")
        rungs.append(build_cert(rungs[-1]))
    logger.info("ladder_built", rungs=len(rungs), top=format_rat(rungs[-1].guarantee))
    return Ladder(rungs=tuple(rungs))


def ladder_from_document(doc: LadderDocument) -> Ladder:
    if len(doc.rungs) != len(doc.hashes) or not doc.rungs:
        raise CertificateInvariantError("ladder document has mismatched rungs and hashes")
    rungs: List[StrategyCert] = []
    for rung_doc, expected in zip(doc.rungs, doc.hashes):
        child = rungs[-1] if rungs else None
        cert = cert_from_document(rung_doc, child)
        if cert_hash(cert) != expected:
            raise CertificateInvariantError(f"hash mismatch for rung k={rung_doc.k}")
        rungs.append(cert)
    return Ladder(rungs=tuple(rungs))


def rung_table(rungs: Sequence[StrategyCert]) -> List[Dict[str, str]]:
    """Compact per-rung summary for textual output."""
    return [
        {
            "k": format_rat(r.guarantee),
            "eps": format_rat(r.eps),
            "n": str(r.n),
            "height": str(r.height),
            "steps": str(r.steps),
        }
        for r in rungs
    ]
