"""Compositional question sets over event-token chains.

Three question families over a clip's token chain: binary queries
(boolean combinations of occurrence-count clauses), counting queries
(greedy disjoint occurrences of a short pattern subsequence), and a
total-runs regression. Binary query sets are sampled from a fixed
grammar and filtered to near-balanced empirical probability so the
answer prior carries no signal.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from asap_align.errors import EmptyCorpusError, QueryParseError
from asap_align.model import event_runs

ALPHABET = tuple("0123456789") + ("o", "w")
TOKEN_ALIASES = {"W": "o"}  # capital W reads as wicket in older scorebooks
KINDS = ("atleast", "atmost", "inrange")
COMBINATORS = ("and", "or")
BALANCE_LOW = 0.45
BALANCE_HIGH = 0.55

Chain = Sequence[str]


@dataclass(frozen=True)
class OccurrenceOp:
    """One clause: how often a token may occur in the chain."""

    kind: str
    token: str
    o_min: int | None = None
    o_max: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown op kind {self.kind!r}")
        if self.token not in ALPHABET:
            raise ValueError(f"token {self.token!r} not in the event alphabet")
        need_min = self.kind in ("atleast", "inrange")
        need_max = self.kind in ("atmost", "inrange")
        if need_min != (self.o_min is not None) or need_max != (self.o_max is not None):
            raise ValueError(f"{self.kind} bounds are {self.o_min!r}..{self.o_max!r}")
        for bound in (self.o_min, self.o_max):
            if bound is not None and not 1 <= bound <= 10:
                raise ValueError(f"occurrence bounds live in [1, 10], got {bound}")
        if self.kind == "inrange" and self.o_min > self.o_max:
            raise ValueError("inrange needs o_min <= o_max")

    def evaluate(self, chain: Chain) -> bool:
        count = sum(1 for t in chain if t == self.token)
        if self.kind == "atleast":
            return count >= self.o_min
        if self.kind == "atmost":
            return count <= self.o_max
        return self.o_min <= count <= self.o_max


@dataclass(frozen=True)
class BinaryQuery:
    ops: tuple[OccurrenceOp, ...]
    combinator: str

    def __post_init__(self) -> None:
        if not 1 <= len(self.ops) <= 5:
            raise ValueError("queries join 1 to 5 clauses")
        if self.combinator not in COMBINATORS:
            raise ValueError(f"combinator must be one of {COMBINATORS}")


@dataclass(frozen=True)
class CountingQuery:
    pattern: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.pattern:
            raise ValueError("pattern cannot be empty")
        for token in self.pattern:
            if token not in ALPHABET:
                raise ValueError(f"token {token!r} not in the event alphabet")


def eval_binary(query: BinaryQuery, chain: Chain) -> bool:
    results = (op.evaluate(chain) for op in query.ops)
    return all(results) if query.combinator == "and" else any(results)


def count_pattern(chain: Chain, pattern: Sequence[str]) -> int:
    """Greedy disjoint subsequence count, resetting after each completion.

    ["4", "4", "0", "0"] holds one disjoint (4, 0): the first 4 pairs
    with the first 0, and the leftovers are out of order. ["4", "0",
    "4", "0"] holds two.
    """
    pattern = tuple(pattern)
    CountingQuery(pattern)  # validates
    count = 0
    pos = 0
    for token in chain:
        if token == pattern[pos]:
            pos += 1
            if pos == len(pattern):
                count += 1
                pos = 0
    return count


def total_runs(chain: Chain) -> int:
    """Sum of runs over the chain: digits count face value, a wide one."""
    return sum(event_runs(t) for t in chain)


def empirical_probability(query: BinaryQuery, corpus: Iterable[Chain]) -> float:
    chains = list(corpus)
    if not chains:
        raise EmptyCorpusError("cannot estimate probability over zero chains")
    return sum(eval_binary(query, c) for c in chains) / len(chains)


def filter_balanced(
    queries: Sequence[BinaryQuery],
    corpus: Sequence[Chain],
    low: float = BALANCE_LOW,
    high: float = BALANCE_HIGH,
    mode: str = "per-query",
) -> list[BinaryQuery]:
    """Keep queries whose empirical probability is within [low, high].

    per-query keeps each query on its own merits. set-average instead
    drops the query farthest from the band's midpoint (later of ties)
    until the surviving set's mean probability lands in the band.
    """
    if not 0 <= low <= high <= 1:
        raise ValueError("need 0 <= low <= high <= 1")
    if not corpus:
        raise EmptyCorpusError("cannot balance against zero chains")
    probs = [empirical_probability(q, corpus) for q in queries]
    if mode == "per-query":
        return [q for q, p in zip(queries, probs) if low <= p <= high]
    if mode != "set-average":
        raise ValueError(f"unknown balance mode {mode!r}")
    mid = (low + high) / 2
    survivors = list(range(len(queries)))
    while survivors:
        mean = sum(probs[i] for i in survivors) / len(survivors)
        if low <= mean <= high:
            break
        worst = max(survivors, key=lambda i: (abs(probs[i] - mid), i))
        survivors.remove(worst)
    return [queries[i] for i in survivors]


def generate_query_set(n_queries: int, seed: int) -> list[BinaryQuery]:
    """Sample binary queries from the grammar, byte-stable per seed.

    Per query the draws are: clause count in [1, 5], the clause kinds,
    the combinator, then per clause its minimum in [1, 10], maximum in
    [minimum, 10], and token. Every draw happens even when the kind
    keeps only one bound, so clause contents stay independent of kinds.
    """
    if n_queries < 0:
        raise ValueError("n_queries must be non-negative")
    rng = random.Random(seed)
    out = []
    for _ in range(n_queries):
        num_joins = rng.randint(1, 5)
        kinds = rng.choices(KINDS, k=num_joins)
        combinator = rng.choices(COMBINATORS, k=1)[0]
        ops = []
        for kind in kinds:
            o_min = rng.randint(1, 10)
            o_max = rng.randint(o_min, 10)
            token = rng.choice(ALPHABET)
            ops.append(OccurrenceOp(
                kind=kind,
                token=token,
                o_min=o_min if kind in ("atleast", "inrange") else None,
                o_max=o_max if kind in ("atmost", "inrange") else None,
            ))
        out.append(BinaryQuery(ops=tuple(ops), combinator=combinator))
    return out


def format_query(query: BinaryQuery) -> str:
    """Canonical text form; parse_query(format_query(q)) round-trips."""
    parts = []
    for op in query.ops:
        if op.kind == "atleast":
            parts.append(f"atleast {op.o_min} {op.token}'s")
        elif op.kind == "atmost":
            parts.append(f"atmost {op.o_max} {op.token}'s")
        else:
            parts.append(f"{op.token} inrange [{op.o_min}, {op.o_max}]")
    return f" {query.combinator.upper()} ".join(parts)


_COUNT_RE = re.compile(r"^(atleast|atmost)\s+(\d+)\s+(\S+?)'s$")
_RANGE_RE = re.compile(r"^(\S+)\s+inrange\s+\[\s*(\d+)\s*,\s*(\d+)\s*\]$")


def _parse_token(raw: str, offset: int) -> str:
    token = TOKEN_ALIASES.get(raw, raw)
    if token not in ALPHABET:
        raise QueryParseError(f"unknown event token {raw!r}", offset=offset)
    return token


def _parse_clause(clause: str, offset: int) -> OccurrenceOp:
    clause = clause.strip()
    m = _COUNT_RE.match(clause)
    if m:
        kind, bound, token = m.group(1), int(m.group(2)), _parse_token(m.group(3), offset)
        try:
            if kind == "atleast":
                return OccurrenceOp(kind=kind, token=token, o_min=bound)
            return OccurrenceOp(kind=kind, token=token, o_max=bound)
        except ValueError as exc:
            raise QueryParseError(str(exc), offset=offset) from None
    m = _RANGE_RE.match(clause)
    if m:
        token = _parse_token(m.group(1), offset)
        try:
            return OccurrenceOp(kind="inrange", token=token,
                                o_min=int(m.group(2)), o_max=int(m.group(3)))
        except ValueError as exc:
            raise QueryParseError(str(exc), offset=offset) from None
    raise QueryParseError(f"unrecognized clause {clause!r}", offset=offset)


def parse_query(text: str) -> BinaryQuery:
    """Parse the canonical grammar; offsets in errors index into text."""
    if not text.strip():
        raise QueryParseError("empty query", offset=0)
    has_and = " AND " in text
    has_or = " OR " in text
    if has_and and has_or:
        offset = max(text.find(" AND "), text.find(" OR "))
        raise QueryParseError("queries use a single combinator", offset=offset)
    joiner = " AND " if has_and else " OR "
    combinator = "and" if has_and else "or"
    ops = []
    offset = 0
    for clause in text.split(joiner):
        ops.append(_parse_clause(clause, offset))
        offset += len(clause) + len(joiner)
    if len(ops) == 1:
        combinator = "and"  # single clause: combinator is immaterial, canonical form uses and
    try:
        return BinaryQuery(ops=tuple(ops), combinator=combinator)
    except ValueError as exc:
        raise QueryParseError(str(exc), offset=0) from None


REGRESSION_TEXT = "total runs"

Query = BinaryQuery | CountingQuery


def format_counting(query: CountingQuery) -> str:
    return "count " + " then ".join(query.pattern)


def parse_any(text: str) -> tuple[str, Query | None]:
    """Dispatch on the three question families by surface form.

    Returns (kind, query) where kind is binary | counting | regression;
    the regression question carries no parameters.
    """
    stripped = text.strip()
    if stripped == REGRESSION_TEXT:
        return "regression", None
    if stripped.startswith("count "):
        tokens = tuple(t.strip() for t in stripped[len("count "):].split(" then "))
        try:
            return "counting", CountingQuery(pattern=tokens)
        except ValueError as exc:
            raise QueryParseError(str(exc), offset=len("count ")) from None
    return "binary", parse_query(text)


def answer(kind: str, query: Query | None, chain: Chain) -> bool | int:
    if kind == "binary":
        return eval_binary(query, chain)
    if kind == "counting":
        return count_pattern(chain, query.pattern)
    if kind == "regression":
        return total_runs(chain)
    raise ValueError(f"unknown query kind {kind!r}")


def write_query_set(
    queries: Sequence[tuple[str, Query | None]],
    path: str | Path,
    clip_overs: int = 10,
    seed: int | None = None,
) -> None:
    """Query set file: texts are authoritative, objects are re-parsed on load."""
    rows = []
    for kind, query in queries:
        if kind == "binary":
            text = format_query(query)
        elif kind == "counting":
            text = format_counting(query)
        else:
            text = REGRESSION_TEXT
        rows.append({"kind": kind, "text": text})
    payload = {"clip_overs": clip_overs, "queries": rows}
    if seed is not None:
        payload["seed"] = seed
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_query_set(path: str | Path) -> tuple[list[tuple[str, Query | None]], dict]:
    """Returns ([(kind, query), ...], metadata) from a query set file."""
    with open(path) as fh:
        payload = json.load(fh)
    out = []
    for row in payload["queries"]:
        kind, query = parse_any(row["text"])
        if kind != row.get("kind", kind):
            raise QueryParseError(
                f"text parses as {kind} but file says {row['kind']}", offset=0
            )
        out.append((kind, query))
    meta = {k: v for k, v in payload.items() if k != "queries"}
    return out, meta
