from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Any

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CheckRecord:
    """Outcome of verifying one inequality ``left < right`` (or ``<=``).

    ``provenance`` says where each side comes from, e.g. ``{"left": "fem
    upper bound", "right": "closed form"}``. ``extra`` carries check-specific
    numbers (secondary bounds, slack, mesh sizes).
    """

    name: str
    left: float
    right: float
    strict: bool
    status: str
    inputs: dict[str, Any] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return self.left / self.right if self.right != 0 else float("inf")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_row(self) -> dict[str, Any]:
        row = asdict(self)
        row["ratio"] = self.ratio
        return row


def compare(name, left, right, strict=True, rtol=0.0, **kwargs) -> CheckRecord:
    """Build a record for ``left < right`` (strict) or ``left <= right``.

    ``rtol`` loosens the non-strict comparison for quantities that are equal
    in exact arithmetic (e.g. ball equality cases).
    """
    if strict:
        ok = left < right
    else:
        ok = left <= right * (1.0 + rtol) if right >= 0 else left <= right * (1.0 - rtol)
    return CheckRecord(name=name, left=float(left), right=float(right), strict=strict,
                       status=PASS if ok else FAIL, **kwargs)
