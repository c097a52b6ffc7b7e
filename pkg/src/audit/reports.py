# src/audit/reports.py

import json
import math
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

LOWER_BOUND = "empirical lower bound"
ESTIMATE = "empirical estimate"
SAMPLED = "sampled property"


def _plain(value: Any) -> Any:
    """Strip numpy scalars and tuples so reports serialize as plain JSON."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


class AuditReport(BaseModel):
    """
    Verdict of one audit. `passed` is `statistic <= bound`: for privacy audits
    a pass means no violation was detected, never that the property holds.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    trials: int = Field(ge=0)
    statistic: float
    bound: float
    passed: bool
    label: str
    details: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def build(
        cls,
        name: str,
        trials: int,
        statistic: float,
        bound: float,
        label: str,
        passed: Optional[bool] = None,
        **details: Any,
    ) -> "AuditReport":
        statistic = float(statistic)
        bound = float(bound)
        if passed is None:
            passed = not math.isnan(statistic) and statistic <= bound
        return cls(
            name=name,
            trials=trials,
            statistic=statistic,
            bound=bound,
            passed=bool(passed),
            label=label,
            details=_plain(details),
        )

    def to_json_line(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> "AuditReport":
        return cls(**json.loads(line))
