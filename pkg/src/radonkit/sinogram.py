"""Sampled Radon data: acquisition, noise models, CSV round-trip.

The CSV format is line 1 ``# radon-kit sinogram v1``, line 2 a layout tag
(``layout,parallel,N,M,d`` or ``layout,scattered,n``), optional ``# key: value``
provenance comments, then one ``t,theta,value`` row per sample with 17
significant digits so the round-trip is lossless.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import ParallelBeam, SampleSet, Scattered
from .phantom import Phantom, radon_analytic_many

FORMAT_HEADER = "# radon-kit sinogram v1"


class SinogramParseError(ValueError):
    """Malformed sinogram file; carries the offending 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model tag and parameters.

    kind is one of ``none``, ``gaussian`` (mean, variance), ``poisson``
    (scale) or ``salt-pepper`` (density, amplitude; amplitude defaults to the
    sinogram maximum).
    """

    kind: str = "none"
    mean: float = 0.0
    variance: float = 0.0
    scale: float = 1000.0
    density: float = 0.0
    amplitude: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "poisson", "salt-pepper"):
            raise ValueError(f"unknown noise kind: {self.kind!r}")
        if self.variance < 0:
            raise ValueError("variance must be >= 0")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if not self.scale > 0:
            raise ValueError("scale must be positive")


@dataclass(frozen=True)
class Sinogram:
    """Radon values aligned with a sample set, plus provenance metadata."""

    samples: SampleSet
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size != len(self.samples):
            raise ValueError("values must be 1-D and aligned with the samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("sinogram values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


def sample(ph: Phantom, samples: SampleSet) -> Sinogram:
    """Measure the exact Radon transform of a phantom on a sample set."""
    values = radon_analytic_many(ph, samples.t, samples.theta)
    return Sinogram(samples, values, {"phantom": ph.name})


def add_noise(sino: Sinogram, spec: NoiseSpec) -> Sinogram:
    """Return a new sinogram with noise injected per ``spec``.

    Deterministic for a fixed seed.  Gaussian noise adds i.i.d. draws with
    the given mean/variance; Poisson noise replaces v >= 0 by
    Poisson(v*scale)/scale (negative entries pass through); salt-pepper
    replaces a ``density`` fraction of entries by 0 or ``amplitude`` with
    equal probability.
    """
    if spec.kind == "none":
        return replace(sino, provenance={**sino.provenance, "noise": "none"})
    rng = np.random.Generator(np.random.Philox(spec.seed))
    v = sino.values.copy()
    match spec.kind:
        case "gaussian":
            v += rng.normal(spec.mean, np.sqrt(spec.variance), size=v.size)
        case "poisson":
            nonneg = v >= 0.0
            v[nonneg] = rng.poisson(v[nonneg] * spec.scale) / spec.scale
        case "salt-pepper":
            hit = rng.random(v.size) < spec.density
            amp = float(v.max()) if spec.amplitude is None else spec.amplitude
            v[hit] = np.where(rng.random(hit.sum()) < 0.5, 0.0, amp)
    meta = {**sino.provenance, "noise": spec.kind, "noise_seed": spec.seed}
    return Sinogram(sino.samples, v, meta)


def _format_layout(layout) -> str:
    if isinstance(layout, ParallelBeam):
        return (f"layout,parallel,{layout.n_angles},{layout.half_offsets},"
                f"{float(layout.spacing)!r}")
    if isinstance(layout, Scattered):
        return f"layout,scattered,{layout.count}"
    raise ValueError(f"sample set has no serializable layout: {layout!r}")


def write_csv(sino: Sinogram) -> bytes:
    """Serialize a sinogram to CSV bytes (UTF-8, LF line endings)."""
    lines = [FORMAT_HEADER, _format_layout(sino.samples.layout)]
    for key, val in sorted(sino.provenance.items()):
        lines.append(f"# {key}: {val}")
    for t, th, v in zip(sino.samples.t, sino.samples.theta, sino.values):
        lines.append(f"{float(t)!r},{float(th)!r},{float(v)!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_csv(data: bytes) -> Sinogram:
    """Parse CSV bytes produced by :func:`write_csv`.

    Raises
    ------
    SinogramParseError
        On any malformed or truncated content, with the offending line.
    """
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise SinogramParseError(1, f"missing header {FORMAT_HEADER!r}")
    if len(lines) < 2:
        raise SinogramParseError(2, "missing layout line")
    fields = lines[1].strip().split(",")
    expected = None
    if fields[:2] == ["layout", "parallel"]:
        try:
            n, m, d = int(fields[2]), int(fields[3]), float(fields[4])
        except (IndexError, ValueError) as exc:
            raise SinogramParseError(2, f"bad parallel layout: {exc}") from None
        layout = ParallelBeam(n, m, d)
        expected = n * (2 * m + 1)
    elif fields[:2] == ["layout", "scattered"]:
        try:
            count = int(fields[2])
        except (IndexError, ValueError) as exc:
            raise SinogramParseError(2, f"bad scattered layout: {exc}") from None
        layout = Scattered(count)
        expected = count
    else:
        raise SinogramParseError(2, f"unknown layout line: {lines[1]!r}")

    provenance = {}
    ts, thetas, values = [], [], []
    for lineno, raw in enumerate(lines[2:], start=3):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" in body:
                key, _, val = body.partition(":")
                provenance[key.strip()] = val.strip()
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise SinogramParseError(lineno, f"expected t,theta,value, got {raw!r}")
        try:
            t, th, v = (float(p) for p in parts)
        except ValueError:
            raise SinogramParseError(lineno, f"non-numeric row: {raw!r}") from None
        ts.append(t)
        thetas.append(th)
        values.append(v)

    if expected is not None and len(values) != expected:
        raise SinogramParseError(
            len(lines), f"expected {expected} data rows, found {len(values)}"
        )
    samples = SampleSet(np.array(ts), np.array(thetas), layout)
    return Sinogram(samples, np.array(values), provenance)
