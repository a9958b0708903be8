"""On-disk JSON formats and converters.

A tensor document looks like

    {"mode": "rational", "d": 2, "D": 2, "matrices": [[[entry, ..], ..], ..]}

with one D x D matrix per physical letter.  Purification-form tensors
add "d_env" and list their d * d_env matrices in (letter, environment)
row-major order.  Entries are {"re": [num, den], "im": [num, den]} in
rational mode and {"re": x, "im": y} in float mode.  Float values round
trip bit-exactly through JSON because Python prints shortest repr.

Schema violations raise :class:`SchemaError` with the offending field's
path in the message.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import SchemaError
from .scalars import FLOAT, MODES, RATIONAL, RationalComplex

__all__ = [
    "tensor_to_json",
    "tensor_from_json",
    "save_tensor",
    "load_tensor",
    "canonical_to_json",
    "canonical_from_json",
    "zulc_to_json",
    "zulc_from_json",
    "load_zulc",
    "jsonable",
]


def _fail(where: str, message: str) -> None:
    raise SchemaError(f"{where}: {message}")


def _expect_dict(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        _fail(where, f"expected an object, got {type(obj).__name__}")
    return obj


def _expect_list(obj, where: str, length: int | None = None) -> list:
    if not isinstance(obj, list):
        _fail(where, f"expected a list, got {type(obj).__name__}")
    if length is not None and len(obj) != length:
        _fail(where, f"expected {length} elements, got {len(obj)}")
    return obj


def _expect_int(obj, where: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        _fail(where, f"expected an integer, got {obj!r}")
    return obj


def _expect_number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        _fail(where, f"expected a number, got {obj!r}")
    return float(obj)


def _fraction_from_json(obj, where: str) -> Fraction:
    pair = _expect_list(obj, where, 2)
    num = _expect_int(pair[0], where + "[0]")
    den = _expect_int(pair[1], where + "[1]")
    if den == 0:
        _fail(where, "denominator is zero")
    return Fraction(num, den)


def _entry_from_json(obj, mode: str, where: str):
    entry = _expect_dict(obj, where)
    for key in ("re", "im"):
        if key not in entry:
            _fail(where, f"missing key {key!r}")
    if mode == RATIONAL:
        return RationalComplex(
            _fraction_from_json(entry["re"], where + ".re"),
            _fraction_from_json(entry["im"], where + ".im"),
        )
    return complex(
        _expect_number(entry["re"], where + ".re"),
        _expect_number(entry["im"], where + ".im"),
    )


def _entry_to_json(x, mode: str) -> dict:
    if mode == RATIONAL:
        return {
            "re": [x.re.numerator, x.re.denominator],
            "im": [x.im.numerator, x.im.denominator],
        }
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def _matrix_from_json(obj, mode: str, dim: int, where: str) -> list[list]:
    rows = _expect_list(obj, where, dim)
    out = []
    for r, row in enumerate(rows):
        cells = _expect_list(row, f"{where}[{r}]", dim)
        out.append(
            [_entry_from_json(cell, mode, f"{where}[{r}][{c}]") for c, cell in enumerate(cells)]
        )
    return out


def tensor_to_json(t) -> dict:
    """Serialize an MpsTensor or PurificationTensor to a JSON-ready dict."""
    from .tensors import MpsTensor, PurificationTensor

    if isinstance(t, MpsTensor):
        matrices = [
            [[_entry_to_json(x, t.mode) for x in row] for row in t.mats[i]]
            for i in range(t.d)
        ]
        return {"mode": t.mode, "d": t.d, "D": t.D, "matrices": matrices}
    if isinstance(t, PurificationTensor):
        matrices = [
            [[_entry_to_json(x, t.mode) for x in row] for row in t.mats[i, e]]
            for i in range(t.d)
            for e in range(t.d_env)
        ]
        return {
            "mode": t.mode,
            "d": t.d,
            "d_env": t.d_env,
            "D": t.D,
            "matrices": matrices,
        }
    raise TypeError(f"cannot serialize {type(t).__name__}")


def tensor_from_json(obj, where: str = "tensor"):
    """Parse a tensor document; returns a PurificationTensor when the
    document carries a d_env field, an MpsTensor otherwise."""
    from .tensors import MpsTensor, PurificationTensor

    doc = _expect_dict(obj, where)
    for key in ("mode", "d", "D", "matrices"):
        if key not in doc:
            _fail(where, f"missing key {key!r}")
    mode = doc["mode"]
    if mode not in MODES:
        _fail(where + ".mode", f"expected one of {MODES}, got {mode!r}")
    d = _expect_int(doc["d"], where + ".d")
    dim = _expect_int(doc["D"], where + ".D")
    if d < 1 or dim < 1:
        _fail(where, f"dimensions must be positive, got d={d}, D={dim}")
    if "d_env" in doc:
        d_env = _expect_int(doc["d_env"], where + ".d_env")
        if d_env < 1:
            _fail(where + ".d_env", f"must be positive, got {d_env}")
        mats = _expect_list(doc["matrices"], where + ".matrices", d * d_env)
        rows = []
        for i in range(d):
            row = [
                _matrix_from_json(
                    mats[i * d_env + e], mode, dim, f"{where}.matrices[{i * d_env + e}]"
                )
                for e in range(d_env)
            ]
            rows.append(row)
        return PurificationTensor.from_matrices(rows, mode=mode)
    mats = _expect_list(doc["matrices"], where + ".matrices", d)
    parsed = [_matrix_from_json(m, mode, dim, f"{where}.matrices[{i}]") for i, m in enumerate(mats)]
    return MpsTensor.from_matrices(parsed, mode=mode)


def save_tensor(t, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tensor_to_json(t), fh)
        fh.write("\n")


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc


def load_tensor(path: str):
    return tensor_from_json(_load_json(path), where=path)


# ---------------------------------------------------------------------------
# canonical forms


def canonical_to_json(cf) -> dict:
    blocks = []
    for b in cf.blocks:
        lam = complex(b.weight)
        blocks.append(
            {
                "lambda": [lam.real, lam.imag],
                "tensor": tensor_to_json(b.tensor),
                "Lambda": [float(x) for x in b.fixed_point],
                "multiplicity": int(b.multiplicity),
            }
        )
    return {"blocks": blocks}


def canonical_from_json(obj, where: str = "canonical"):
    from .canonical import CanonicalBlock, CanonicalForm

    doc = _expect_dict(obj, where)
    if "blocks" not in doc:
        _fail(where, "missing key 'blocks'")
    raw = _expect_list(doc["blocks"], where + ".blocks")
    blocks = []
    for k, item in enumerate(raw):
        here = f"{where}.blocks[{k}]"
        entry = _expect_dict(item, here)
        for key in ("lambda", "tensor", "Lambda"):
            if key not in entry:
                _fail(here, f"missing key {key!r}")
        lam = _expect_list(entry["lambda"], here + ".lambda", 2)
        weight = _expect_number(lam[0], here + ".lambda[0]")
        if _expect_number(lam[1], here + ".lambda[1]") != 0.0:
            _fail(here + ".lambda", "block weights are real; phases live in the tensor")
        tensor = tensor_from_json(entry["tensor"], here + ".tensor")
        diag = [
            _expect_number(x, f"{here}.Lambda[{j}]")
            for j, x in enumerate(_expect_list(entry["Lambda"], here + ".Lambda"))
        ]
        mult = _expect_int(entry.get("multiplicity", 1), here + ".multiplicity")
        blocks.append(CanonicalBlock(weight, tensor, np.array(diag), mult))
    return CanonicalForm(tuple(blocks))


def save_canonical(cf, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(canonical_to_json(cf), fh)
        fh.write("\n")


def load_canonical(path: str):
    return canonical_from_json(_load_json(path), where=path)


# ---------------------------------------------------------------------------
# integer generator families


def zulc_to_json(z) -> dict:
    return {"Y": [[[int(x) for x in row] for row in y] for y in z.ys]}


def zulc_from_json(obj, where: str = "instance"):
    from .reduction import ZulcInstance

    if isinstance(obj, dict):
        if "Y" not in obj:
            _fail(where, "missing key 'Y'")
        raw = obj["Y"]
        where = where + ".Y"
    else:
        raw = obj
    mats = _expect_list(raw, where, 5)
    ys = []
    for k, m in enumerate(mats):
        rows = _expect_list(m, f"{where}[{k}]", 3)
        y = []
        for r, row in enumerate(rows):
            cells = _expect_list(row, f"{where}[{k}][{r}]", 3)
            y.append([_expect_int(x, f"{where}[{k}][{r}][{c}]") for c, x in enumerate(cells)])
        ys.append(y)
    return ZulcInstance.from_lists(ys)


def load_zulc(path: str):
    return zulc_from_json(_load_json(path), where=path)


# ---------------------------------------------------------------------------
# report helpers


def jsonable(obj) -> Any:
    """Recursively convert report values into JSON-serializable ones.

    Fractions become [num, den] pairs, complex numbers [re, im] pairs,
    numpy scalars and arrays their Python equivalents.
    """
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, RationalComplex):
        return _entry_to_json(obj, RATIONAL)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    return str(obj)
