"""Image file output: 16-bit ASCII PGM and raw CSV grids."""

import numpy as np

from .grid import ImageGrid

PGM_MAXVAL = 65535


def write_image(image: ImageGrid, path, fmt: str | None = None) -> None:
    """Write an image to ``path`` as PGM (P2, 16-bit) or CSV.

    PGM maps [min, max] affinely onto [0, 65535] and records the original
    range in a comment line; a constant image maps to all zeros with the
    constant recorded.  CSV stores the raw doubles row-major (lossless).
    ``fmt`` defaults to the file extension.
    """
    path = str(path)
    if fmt is None:
        fmt = "csv" if path.lower().endswith(".csv") else "pgm"
    if fmt == "pgm":
        _write_pgm(image, path)
    elif fmt == "csv":
        _write_csv(image, path)
    else:
        raise ValueError(f"unknown image format: {fmt!r}")


def _write_pgm(image: ImageGrid, path: str) -> None:
    v = image.values
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        quantized = np.rint((v - lo) / (hi - lo) * PGM_MAXVAL).astype(int)
    else:
        quantized = np.zeros_like(v, dtype=int)
    k = image.size
    lines = ["P2", f"# range min={lo!r} max={hi!r}", f"{k} {k}", str(PGM_MAXVAL)]
    for row in quantized:
        lines.append(" ".join(str(int(p)) for p in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_csv(image: ImageGrid, path: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for row in image.values:
            fh.write(",".join(repr(float(p)) for p in row) + "\n")


def read_image_csv(path) -> ImageGrid:
    """Read a CSV image written by :func:`write_image` (exact round-trip)."""
    rows = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(p) for p in line.split(",")])
    return ImageGrid(np.array(rows))


def read_pgm(path) -> np.ndarray:
    """Read an ASCII PGM file back into its integer levels (for tests)."""
    with open(path, encoding="ascii") as fh:
        tokens = []
        for line in fh:
            body = line.split("#", 1)[0]
            tokens.extend(body.split())
    if tokens[0] != "P2":
        raise ValueError("not an ASCII PGM file")
    width, height, _maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:4 + width * height]])
    return data.reshape(height, width)
