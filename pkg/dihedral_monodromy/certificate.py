"""Serializable pass/fail records for the verified statements."""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .constants import STATUS_FAIL, STATUS_INCONCLUSIVE, STATUS_PASS

STATUSES = (STATUS_PASS, STATUS_FAIL, STATUS_INCONCLUSIVE)


@dataclass
class Certificate:
    """
    Outcome of one check.

    Attributes:
        check: Name of the check (see constants.ALL_CHECKS)
        params: Genus, n, preset and orbit(s) the check ran on
        status: PASS, FAIL or INCONCLUSIVE
        witness: JSON-ready evidence; identical across runs with the same seed
        seed: Seed of the random choices, None when the check draws nothing
        runtime_ms: Wall time, excluded from equality
    """

    check: str
    params: Dict[str, Any]
    status: str
    witness: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    runtime_ms: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"Unknown certificate status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == STATUS_PASS

    @property
    def failed(self) -> bool:
        return self.status == STATUS_FAIL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "params": self.params,
            "status": self.status,
            "witness": self.witness,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Certificate":
        return cls(
            check=data["check"],
            params=dict(data.get("params", {})),
            status=data["status"],
            witness=dict(data.get("witness", {})),
            seed=data.get("seed"),
            runtime_ms=int(data.get("runtime_ms", 0)),
        )


def status_from_bool(ok: bool) -> str:
    return STATUS_PASS if ok else STATUS_FAIL


def summarize(certificates: List[Certificate]) -> Dict[str, int]:
    """Count certificates per status, keyed "pass", "fail", "inconclusive"."""
    summary = {"pass": 0, "fail": 0, "inconclusive": 0}
    for cert in certificates:
        summary[cert.status.lower()] += 1
    return summary
