"""Uniform complex sample grids and their binary serialization.

A GridFunction holds samples of a function on a uniform box grid with the
left-edge convention x[m] = lo + m*h, which is what the FFT synthesis
paths assume.  The binary format is little-endian throughout: a fixed
header (magic, dims, per-axis box and sample count, domain tag) followed
by the samples as complex64 pairs in C order; a JSON metadata twin is
written next to the payload.
"""

import json
import os
import struct
import tempfile

import numpy as np

FOURIER = "FOURIER"
TIME = "TIME"

_MAGIC = b"PWGF"
_VERSION = 1
_DOMAIN_CODE = {FOURIER: 0, TIME: 1}
_DOMAIN_NAME = {v: k for k, v in _DOMAIN_CODE.items()}


class GridFunction:
    """Complex samples on a uniform box grid.

    box_lo/box_hi are per-axis; axis i carries samples.shape[i] points at
    spacing (hi - lo)/N, located at lo + m*h for m = 0..N-1.
    """

    def __init__(self, box_lo, box_hi, samples, domain):
        self.box_lo = np.atleast_1d(np.asarray(box_lo, float))
        self.box_hi = np.atleast_1d(np.asarray(box_hi, float))
        self.samples = np.asarray(samples)
        self.domain = domain
        if domain not in _DOMAIN_CODE:
            raise ValueError(f"unknown domain tag {domain!r}")
        if self.samples.ndim != self.box_lo.size:
            raise ValueError("sample array rank does not match the box")
        if np.any(self.box_hi <= self.box_lo):
            raise ValueError("degenerate box")

    @property
    def dim(self):
        return self.samples.ndim

    @property
    def shape(self):
        return self.samples.shape

    @property
    def spacing(self):
        return (self.box_hi - self.box_lo) / np.array(self.samples.shape)

    def axis_coords(self, axis):
        n = self.samples.shape[axis]
        return self.box_lo[axis] + self.spacing[axis] * np.arange(n)

    def cell_volume(self):
        return float(np.prod(self.spacing))

    def norm_l1(self):
        return float(np.sum(np.abs(self.samples)) * self.cell_volume())

    def norm_l2sq(self):
        return float(np.sum(np.abs(self.samples) ** 2) * self.cell_volume())

    def interp(self, points):
        """Separable linear interpolation; zero outside the box."""
        P = np.atleast_2d(np.asarray(points, float))
        h = self.spacing
        g = (P - self.box_lo) / h
        idx = np.floor(g).astype(np.int64)
        frac = g - idx
        shape = np.array(self.samples.shape)
        out = np.zeros(len(P), dtype=self.samples.dtype)
        if self.dim == 1:
            i = idx[:, 0]
            f = frac[:, 0]
            for di, w in ((0, 1 - f), (1, f)):
                ii = i + di
                ok = (ii >= 0) & (ii < shape[0])
                out[ok] += w[ok] * self.samples[ii[ok]]
            return out
        if self.dim == 2:
            i, j = idx[:, 0], idx[:, 1]
            fx, fy = frac[:, 0], frac[:, 1]
            for di, dj, w in ((0, 0, (1 - fx) * (1 - fy)), (1, 0, fx * (1 - fy)),
                              (0, 1, (1 - fx) * fy), (1, 1, fx * fy)):
                ii, jj = i + di, j + dj
                ok = (ii >= 0) & (ii < shape[0]) & (jj >= 0) & (jj < shape[1])
                out[ok] += w[ok] * self.samples[ii[ok], jj[ok]]
            return out
        raise NotImplementedError("interp supports 1D and 2D grids")

    def meta_dict(self):
        return {"dims": self.dim, "box_lo": self.box_lo.tolist(),
                "box_hi": self.box_hi.tolist(),
                "shape": list(self.samples.shape), "domain": self.domain,
                "format": "complex64-le", "version": _VERSION}


def _atomic_write(path, data):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-grid-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_gridfunction(gf, path):
    """Write header + complex64 payload, plus a '<path>.json' metadata twin."""
    parts = [_MAGIC, struct.pack("<HB", _VERSION, _DOMAIN_CODE[gf.domain]),
             struct.pack("<B", gf.dim)]
    for ax in range(gf.dim):
        parts.append(struct.pack("<ddq", gf.box_lo[ax], gf.box_hi[ax],
                                 gf.samples.shape[ax]))
    payload = np.ascontiguousarray(gf.samples.astype(np.complex64))
    parts.append(payload.tobytes())
    _atomic_write(path, b"".join(parts))
    _atomic_write(path + ".json",
                  (json.dumps(gf.meta_dict(), indent=2) + "\n").encode())


def load_gridfunction(path):
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != _MAGIC:
        raise ValueError("not a grid-function file")
    version, domain_code = struct.unpack_from("<HB", raw, 4)
    if version != _VERSION:
        raise ValueError(f"unsupported version {version}")
    ndim = struct.unpack_from("<B", raw, 7)[0]
    off = 8
    lo, hi, shape = [], [], []
    for _ in range(ndim):
        a, b, n = struct.unpack_from("<ddq", raw, off)
        off += 24
        lo.append(a)
        hi.append(b)
        shape.append(n)
    data = np.frombuffer(raw, dtype="<c8", offset=off).reshape(shape)
    return GridFunction(lo, hi, np.array(data, dtype=np.complex128),
                        _DOMAIN_NAME[domain_code])


def save_matrix(M, path):
    """Dump a dense complex matrix in the grid payload layout (complex64)."""
    M = np.asarray(M)
    header = _MAGIC + struct.pack("<HB", _VERSION, 255) + struct.pack("<B", 2)
    header += struct.pack("<qq", M.shape[0], M.shape[1])
    _atomic_write(path, header + np.ascontiguousarray(M.astype(np.complex64)).tobytes())


def load_matrix(path):
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != _MAGIC or struct.unpack_from("<HB", raw, 4)[1] != 255:
        raise ValueError("not a matrix dump")
    rows, cols = struct.unpack_from("<qq", raw, 8)
    return np.frombuffer(raw, dtype="<c8", offset=24).reshape(rows, cols).astype(
        np.complex128)
