"""Parameter sweeps over the reconstruction estimators.

A sweep re-runs one reconstruction pipeline across a parameter range and
reports RMSE against the rasterized phantom, the reciprocal condition
estimate (kernel pipelines) and the wall time per point as CSV, sorted by
parameter value.  A failing point is marked ``failed`` instead of aborting
the sweep.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .estimators import (AlgebraicReconstruction, FilteredBackProjection,
                         KernelReconstruction)
from .grid import rmse
from .phantom import builtin, rasterize
from .sinogram import Sinogram

SWEEPABLE = {
    "eps": ("kernel", "eps"),
    "nu": ("kernel", "nu"),
    "rho": ("kernel", "rho"),
    "L": ("fbp", "band_limit"),
    "L1": ("kernel", "support"),
    "L2": ("kernel", "length"),
    "h": ("kernel", "scale"),
    "lambda": ("art", "relaxation"),
}


@dataclass(frozen=True)
class SweepSpec:
    """Sweep description: parameter name, inclusive range, fixed config.

    ``parameter`` is one of eps, nu, rho, L, L1, L2, h, lambda; ``fixed``
    holds the estimator's constructor arguments; ``metric`` names the primary
    reported column (rmse, rcond or time).
    """

    parameter: str
    start: float
    stop: float
    step: float
    pipeline: str = "kernel"
    fixed: dict = field(default_factory=dict)
    metric: str = "rmse"

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ValueError(f"unknown sweep parameter: {self.parameter!r}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.start > self.stop:
            raise ValueError("start must not exceed stop")
        if self.metric not in ("rmse", "rcond", "time"):
            raise ValueError(f"unknown metric: {self.metric!r}")
        pipeline, _ = SWEEPABLE[self.parameter]
        if self.pipeline != pipeline:
            raise ValueError(
                f"parameter {self.parameter!r} belongs to the {pipeline} pipeline")

    def values(self) -> np.ndarray:
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


def _make_estimator(pipeline: str, fixed: dict):
    match pipeline:
        case "kernel":
            return KernelReconstruction(**fixed)
        case "fbp":
            return FilteredBackProjection(**fixed)
        case "art":
            return AlgebraicReconstruction(**fixed)
    raise ValueError(f"unknown pipeline: {pipeline!r}")


def run_sweep(spec: SweepSpec, sino: Sinogram) -> list[dict]:
    """Run one reconstruction per grid point; never aborts on point failure.

    Returns a list of row dicts sorted by parameter value with keys
    ``parameter``, ``value``, ``rmse``, ``rcond``, ``seconds``, ``status``.
    """
    phantom_name = sino.provenance.get("phantom")
    reference = None
    _, attr = SWEEPABLE[spec.parameter]
    rows = []
    for value in spec.values():
        est = _make_estimator(spec.pipeline, spec.fixed)
        est.set_params(**{attr: float(value)})
        t0 = time.perf_counter()
        row = {"parameter": spec.parameter, "value": float(value),
               "rmse": np.nan, "rcond": np.nan, "seconds": np.nan,
               "status": "ok"}
        try:
            est.fit(sino)
            row["seconds"] = time.perf_counter() - t0
            if reference is None and phantom_name:
                size = est.predict().shape[0]
                reference = rasterize(builtin(str(phantom_name)), size)
            if reference is not None:
                row["rmse"] = rmse(est.predict(), reference.values)
            row["rcond"] = float(getattr(est, "rcond_", np.nan))
        except Exception as exc:  # a bad point must not kill the sweep
            row["seconds"] = time.perf_counter() - t0
            row["status"] = f"failed: {type(exc).__name__}"
        rows.append(row)
    return rows


def sweep_csv(rows: list[dict]) -> str:
    """Render sweep rows as CSV text, one point per line."""
    out = ["parameter,value,rmse,rcond,seconds,status"]
    for row in rows:
        out.append("{parameter},{value!r},{rmse!r},{rcond!r},{seconds:.6f},{status}"
                   .format(**row))
    return "\n".join(out) + "\n"
