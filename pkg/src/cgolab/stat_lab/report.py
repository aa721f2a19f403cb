from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class EstimateReport:
    """One measured constant with its provenance.

    ``gate`` names the artifact-chosen ceiling a caller compared against, if any;
    no ceiling here comes from a published constant.  ``interval`` is set when
    an iterative estimate did not settle: ``value`` is then its lower end.
    """

    quantity: str
    params: dict
    value: float
    samples: int
    dispersion: float = 0.0
    extra: dict = field(default_factory=dict)
    min_samples: int = 1
    gate: str = ""
    interval: tuple | None = None

    def __post_init__(self):
        if self.samples < self.min_samples:
            raise ValueError(f"{self.quantity}: {self.samples} samples < required {self.min_samples}")
        if not math.isfinite(self.dispersion):
            raise ValueError(f"{self.quantity}: dispersion is not finite")
