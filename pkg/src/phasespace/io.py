"""File formats: state JSON, CSV tables and the binary grid snapshot.

State JSON
    ``{"dim": d, "matrix": [[[re, im], ...], ...]}`` (row-major) or
    ``{"kind": name, "params": {...}}`` for a built-in state.

CSV
    Header row, one column per field, floats written with 17 significant
    digits. Complex columns are split into ``<name>_re`` and ``<name>_im``.

Snapshot (little-endian)
    ======  =======  ==============================================
    offset  type     content
    ======  =======  ==============================================
    0       8 bytes  magic ``b"PSGRID1\\0"``
    8       uint32   ``n_q``
    12      uint32   ``n_p``
    16      uint32   flags (bit 0: complex payload)
    20      uint32   reserved (0)
    24      float64  ``q_min, q_max, p_min, p_max, hbar`` (5 values)
    64      float64  payload, ``n_q * n_p`` values in ``[q, p]`` C order;
                     complex payloads interleave real and imaginary parts
    ======  =======  ==============================================
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .linalg import validate_density
from .moyal import GridFunction, PhaseGrid
from .states import named_state

__all__ = ["operator_to_json", "operator_from_json", "load_state", "save_state",
           "write_csv", "read_csv", "save_snapshot", "load_snapshot", "atomic_write",
           "sha256_file", "gridfunction_to_csv"]

MAGIC = b"PSGRID1\0"
_HEADER = struct.Struct("<8sIIII5d")


def atomic_write(path, data: bytes) -> Path:
    """Write ``data`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def operator_to_json(matrix) -> dict:
    m = np.asarray(matrix, dtype=complex)
    return {"dim": int(m.shape[0]),
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def operator_from_json(doc: dict) -> np.ndarray:
    try:
        dim = int(doc["dim"])
        raw = np.asarray(doc["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed operator document: {exc}") from None
    if raw.shape != (dim, dim, 2):
        raise ValidationError(f"matrix has shape {raw.shape[:2]}, expected ({dim}, {dim})")
    return raw[..., 0] + 1j * raw[..., 1]


def load_state(source, **defaults) -> np.ndarray:
    """Parse a state document (path, JSON text or dict) into a density matrix.

    Validation failures raise :class:`ValidationError` naming the violated
    invariant (for example ``"matrix not Hermitian"``).
    """
    if isinstance(source, (str, Path)) and not isinstance(source, dict):
        text = Path(source).read_text() if Path(source).exists() else str(source)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"state is not valid JSON: {exc}") from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ValidationError("state document must be a JSON object")
    if "kind" in doc:
        params = {**defaults, **doc.get("params", {})}
        return validate_density(named_state(doc["kind"], **params))
    return validate_density(operator_from_json(doc))


def save_state(path, rho) -> Path:
    text = json.dumps(operator_to_json(rho), indent=1) + "\n"
    return atomic_write(path, text.encode())


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path, columns: dict) -> Path:
    """Write named columns; complex arrays become ``_re``/``_im`` pairs."""
    names, data = [], []
    for name, col in columns.items():
        col = np.asarray(col).ravel()
        if np.iscomplexobj(col):
            names += [f"{name}_re", f"{name}_im"]
            data += [col.real, col.imag]
        else:
            names.append(name)
            data.append(col.astype(float))
    n = {len(c) for c in data}
    if len(n) > 1:
        raise ValidationError("CSV columns must have equal length")
    lines = [",".join(names)]
    lines += [",".join(_fmt(c[i]) for c in data) for i in range(n.pop() if n else 0)]
    return atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a CSV written by :func:`write_csv`; ``_re``/``_im`` pairs are merged."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError("empty CSV")
    header, body = rows[0], rows[1:]
    try:
        arr = np.array([[float(x) for x in r] for r in body if r], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"non-numeric CSV entry: {exc}") from None
    arr = arr.reshape(-1, len(header))
    out = {}
    for i, name in enumerate(header):
        if name.endswith("_im") and name[:-3] + "_re" in header:
            continue
        if name.endswith("_re") and name[:-3] + "_im" in header:
            k = header.index(name[:-3] + "_im")
            out[name[:-3]] = arr[:, i] + 1j * arr[:, k]
        else:
            out[name] = arr[:, i]
    return out


def gridfunction_to_csv(path, f: GridFunction) -> Path:
    Q, P = f.grid.mesh()
    return write_csv(path, {"q": Q, "p": P, "value": f.values})


def save_snapshot(path, f: GridFunction) -> Path:
    g = f.grid
    cplx = np.iscomplexobj(f.values)
    head = _HEADER.pack(MAGIC, g.n_q, g.n_p, int(cplx), 0,
                        g.q_min, g.q_max, g.p_min, g.p_max, g.hbar)
    payload = np.ascontiguousarray(f.values, dtype="<c16" if cplx else "<f8").tobytes()
    return atomic_write(path, head + payload)


def load_snapshot(path) -> GridFunction:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValidationError("snapshot shorter than its header")
    magic, nq, np_, flags, _, qmin, qmax, pmin, pmax, hbar = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValidationError("not a phase-space grid snapshot")
    dt = "<c16" if flags & 1 else "<f8"
    vals = np.frombuffer(data, dtype=dt, offset=_HEADER.size)
    if vals.size != nq * np_:
        raise ValidationError("snapshot payload size does not match its header")
    grid = PhaseGrid(qmin, qmax, pmin, pmax, nq, np_, hbar)
    return GridFunction(vals.reshape(nq, np_).copy(), grid, "state")
