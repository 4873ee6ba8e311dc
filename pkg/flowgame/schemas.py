"""
Versioned JSON documents: certificates, ladders, semimeasures, match traces and enumeration streams.

Rationals travel as "p/q" strings ("p" when integral, "inf" for +∞) and nodes as bit strings.
`canonical_json` is the only serializer; it sorts keys and drops whitespace so equal documents are
byte-identical.
"""

from __future__ import annotations

import json
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

RAT_PATTERN = r"^(inf|\d+(/\d+)?)$"
NODE_PATTERN = r"^[01]*$"
SIGNED_RAT_PATTERN = r"^-?\d+(/\d+)?$"

Rat = Annotated[str, Field(pattern=RAT_PATTERN)]
Node = Annotated[str, Field(pattern=NODE_PATTERN)]
# submitted values of rejected moves may be negative
SignedRat = Annotated[str, Field(pattern=SIGNED_RAT_PATTERN)]


def canonical_json(doc: Union[BaseModel, Dict[str, Any], List[Any]]) -> str:
    if isinstance(doc, BaseModel):
        doc = doc.model_dump(mode="json", by_alias=True)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


class CertDocument(BaseModel):
    format: Literal[1] = 1
    k: Rat
    eps: Rat
    n: int = Field(ge=0)
    d: List[Rat]
    aq: List[Rat]
    S: Rat
    height: int = Field(ge=0)
    mono_height: int = Field(ge=0)
    steps: int = Field(ge=1)
    child: Optional[str] = None  # hash of the child certificate


class LadderDocument(BaseModel):
    format: Literal[1] = 1
    rungs: List[CertDocument]
    hashes: List[str]


# ---------------------------------------------------------------------------
# Semimeasures
# ---------------------------------------------------------------------------


class WeightEntry(BaseModel):
    node: Node
    weight: Rat


class SemimeasureDocument(BaseModel):
    format: Literal[1] = 1
    height: Optional[int] = Field(default=None, ge=0)
    weights: List[WeightEntry]


# ---------------------------------------------------------------------------
# Match traces (JSONL: header, events, footer)
# ---------------------------------------------------------------------------


class TraceConfig(BaseModel):
    height: int = Field(ge=0)
    root_flow: Rat
    budget: Rat
    target: Rat


class TraceCaps(BaseModel):
    rounds: int = Field(ge=1)
    grace: int = Field(ge=1)


class TraceHeader(BaseModel):
    kind: Literal["header"] = "header"
    format: Literal[1] = 1
    config: TraceConfig
    m_strategy: str
    a_strategy: str
    seed: Optional[int] = None
    cert_hash: Optional[str] = None
    caps: TraceCaps


class UpdateEntry(BaseModel):
    # raw as submitted; only moves the referee accepted are guaranteed to name tree nodes
    node: str
    value: SignedRat


class TraceEvent(BaseModel):
    kind: Literal["event"] = "event"
    index: int = Field(ge=0)
    player: Literal["M", "A"]
    updates: List[UpdateEntry] = Field(default_factory=list)
    height: Optional[int] = Field(default=None, ge=0)  # tree height after growth, when the move grew it
    winning: bool
    claim: Optional[str] = Field(default=None, pattern=NODE_PATTERN)
    status: Literal["ok", "illegal", "resigned"] = "ok"
    error: Optional[str] = None  # exception class of a rejected move or a crashed strategy

    @model_validator(mode="after")
    def _accepted_moves_name_nodes(self) -> "TraceEvent":
        if self.status == "ok":
            for entry in self.updates:
                if not all(ch in "01" for ch in entry.node):
                    raise ValueError(f"accepted move names a non-node {entry.node!r}")
        return self


class TraceFooter(BaseModel):
    kind: Literal["footer"] = "footer"
    verdict: Literal["MWins", "AWins", "Undecided"]
    reason: str
    rounds: int = Field(ge=0)
    leaf: Optional[str] = Field(default=None, pattern=NODE_PATTERN)
    sum: Optional[str] = Field(default=None, pattern=RAT_PATTERN)
    best_leaf: Node
    best_sum: Rat


# ---------------------------------------------------------------------------
# c.e. builder
# ---------------------------------------------------------------------------


class EnumEvent(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    round: int = Field(ge=0)
    position: int = Field(alias="set", ge=0)


class CEReport(BaseModel):
    format: Literal[1] = 1
    verdict: Literal["Settled", "Undecided", "Failed"]
    reason: Optional[str] = None
    rounds: int = Field(ge=0)
    branch: Node
    layer_sums: List[Rat]
    total_sum: Rat
    enumerated: List[int]
    dominance_ok: bool
