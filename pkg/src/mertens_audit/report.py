"""Verification reports: one record per (claim, n, lambda), rendered as JSON or CSV."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_DOWN, Context, Decimal
from fractions import Fraction
from typing import Iterable

CSV_HEADER = ["claim_id", "n", "lambda", "pass", "margin", "exact", "micros"]
MARGIN_DIGITS = 12

_TRUNCATE = Context(prec=MARGIN_DIGITS, rounding=ROUND_DOWN)


def format_margin(value: Fraction | int | float) -> tuple[str, bool]:
    """Decimal string truncated to 12 significant digits, plus whether it came from an exact value."""
    if isinstance(value, float):
        return str(_TRUNCATE.plus(Decimal(value))), False
    value = Fraction(value)
    if value.denominator == 1:
        return str(_TRUNCATE.plus(Decimal(value.numerator))), True
    quotient = _TRUNCATE.divide(Decimal(value.numerator), Decimal(value.denominator))
    return str(quotient), True


@dataclass(frozen=True)
class ClaimRecord:
    claim_id: str
    n: int | None
    lam: str | None  # "p/q"
    passed: bool
    margin: str
    exact: bool
    micros: int = 0

    @classmethod
    def build(
        cls,
        claim_id: str,
        n: int | None,
        lam: Fraction | None,
        passed: bool,
        margin: Fraction | int | float,
        micros: int = 0,
    ) -> ClaimRecord:
        text, exact = format_margin(margin)
        lam_text = None if lam is None else f"{lam.numerator}/{lam.denominator}"
        return cls(claim_id, n, lam_text, bool(passed), text, exact, int(micros))

    def sort_key(self):
        lam = Fraction(self.lam) if self.lam is not None else Fraction(-1)
        return (self.claim_id, -1 if self.n is None else self.n, lam)


@dataclass
class VerificationReport:
    version: str
    timestamp: str
    config: dict
    claims: list[ClaimRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    @property
    def failures(self) -> list[ClaimRecord]:
        return [c for c in self.claims if not c.passed]

    def sort(self) -> None:
        self.claims.sort(key=ClaimRecord.sort_key)

    def duplicate_keys(self) -> list[tuple]:
        seen: set[tuple] = set()
        dups = []
        for c in self.claims:
            key = (c.claim_id, c.n, c.lam)
            if key in seen:
                dups.append(key)
            seen.add(key)
        return dups

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "timestamp": self.timestamp,
            "config": self.config,
            "notes": self.notes,
            "claims": [
                {
                    "claim_id": c.claim_id,
                    "n": c.n,
                    "lambda": c.lam,
                    "pass": c.passed,
                    "margin": c.margin,
                    "exact": c.exact,
                    "micros": c.micros,
                }
                for c in self.claims
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> VerificationReport:
        claims = [
            ClaimRecord(
                c["claim_id"], c["n"], c["lambda"], c["pass"], c["margin"], c["exact"], c["micros"]
            )
            for c in data["claims"]
        ]
        return cls(data["version"], data["timestamp"], data["config"], claims, list(data.get("notes", [])))

    @classmethod
    def from_json(cls, text: str) -> VerificationReport:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for c in self.claims:
            writer.writerow(
                [
                    c.claim_id,
                    "" if c.n is None else c.n,
                    "" if c.lam is None else c.lam,
                    "true" if c.passed else "false",
                    c.margin,
                    "true" if c.exact else "false",
                    c.micros,
                ]
            )
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def parse_csv_claims(text: str) -> list[ClaimRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("CSV header mismatch")
    out = []
    for claim_id, n, lam, passed, margin, exact, micros in rows[1:]:
        out.append(
            ClaimRecord(
                claim_id,
                int(n) if n else None,
                lam or None,
                passed == "true",
                margin,
                exact == "true",
                int(micros),
            )
        )
    return out


def claim_tuples(claims: Iterable[ClaimRecord]) -> list[tuple]:
    return [(c.claim_id, c.n, c.lam, c.passed) for c in claims]

