"""
Schémas JSON: matrices, régions, fonctions, modèles de dilatation.
Les doubles sont écrits avec 17 chiffres significatifs (exact au bit près).
"""
import json
import math
import re
from typing import Any, Dict

import numpy as np

from tools.errors import InvalidRegion, MalformedInput
from tools.holomorphic import HoloFunction, constant, rational, resolvent
from tools.regions import REGION_KINDS, Region


def _number(value: Any, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedInput(field, "expected a number")
    value = float(value)
    if not math.isfinite(value):
        raise MalformedInput(field, "expected a finite number")
    return value


def _complex(value: Any, field: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(_number(value, field))
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise MalformedInput(field, "expected [re, im]")
    return complex(_number(value[0], f"{field}[0]"), _number(value[1], f"{field}[1]"))


def matrix_to_json(A) -> Dict[str, Any]:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    return {
        "dim": int(A.shape[0]),
        "data": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_json(payload: Any, field: str = "matrix") -> np.ndarray:
    if not isinstance(payload, dict):
        raise MalformedInput(field, "expected an object with 'dim' and 'data'")
    dim = payload.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MalformedInput(f"{field}.dim", "expected a positive integer")
    data = payload.get("data")
    if not isinstance(data, list) or len(data) != dim * dim:
        raise MalformedInput(f"{field}.data", f"expected {dim * dim} [re, im] entries")
    entries = [_complex(z, f"{field}.data[{k}]") for k, z in enumerate(data)]
    return np.asarray(entries, dtype=complex).reshape(dim, dim)


def region_to_json(region: Region) -> Dict[str, Any]:
    return {"kind": region.kind, **{k: float(v) for k, v in region.params().items()}}


def region_from_json(payload: Any, field: str = "region") -> Region:
    if not isinstance(payload, dict):
        raise MalformedInput(field, "expected an object with 'kind'")
    kind = payload.get("kind")
    if kind not in REGION_KINDS:
        raise MalformedInput(f"{field}.kind", f"unknown region kind {kind!r}")
    cls = REGION_KINDS[kind]
    names = list(cls.__dataclass_fields__)
    missing = [n for n in names if n not in payload]
    if missing:
        raise MalformedInput(f"{field}.{missing[0]}", "missing parameter")
    try:
        return cls(**{n: _number(payload[n], f"{field}.{n}") for n in names})
    except InvalidRegion:
        raise
    except TypeError as e:
        raise MalformedInput(field, str(e)) from e


def function_from_json(payload: Any, field: str = "function") -> HoloFunction:
    """Mini-langage: {"num","den"} ou {"kind": resolvent|regularizer|constant, ...}"""
    from tools.funcalc import regularizer_sequence

    if not isinstance(payload, dict):
        raise MalformedInput(field, "expected an object")
    if "num" in payload or "den" in payload:
        for key in ("num", "den"):
            if not isinstance(payload.get(key), list) or not payload[key]:
                raise MalformedInput(f"{field}.{key}", "expected a non-empty coefficient list")
        num = [_complex(z, f"{field}.num[{k}]") for k, z in enumerate(payload["num"])]
        den = [_complex(z, f"{field}.den[{k}]") for k, z in enumerate(payload["den"])]
        if not any(den):
            raise MalformedInput(f"{field}.den", "denominator is identically zero")
        return rational(num, den)
    kind = payload.get("kind")
    if kind == "resolvent":
        power = payload.get("power", 1)
        if isinstance(power, bool) or not isinstance(power, int) or power < 1:
            raise MalformedInput(f"{field}.power", "expected a positive integer")
        return resolvent(_complex(payload.get("mu"), f"{field}.mu"), power)
    if kind == "regularizer":
        n = payload.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise MalformedInput(f"{field}.n", "expected a positive integer")
        eta_prime = _number(payload.get("eta_prime"), f"{field}.eta_prime")
        if eta_prime <= 0:
            raise MalformedInput(f"{field}.eta_prime", "expected a positive number")
        return regularizer_sequence(n, eta_prime)
    if kind == "constant":
        return constant(_complex(payload.get("value"), f"{field}.value"))
    raise MalformedInput(f"{field}.kind", f"unknown function kind {kind!r}")


def model_to_json(model) -> Dict[str, Any]:
    return {"T": matrix_to_json(model.T), "c": model.c, "alpha": model.alpha, "p": model.p}


def model_from_json(payload: Any, field: str = "model"):
    from tools.dilation import DilationModel

    if not isinstance(payload, dict):
        raise MalformedInput(field, "expected an object with T, c, alpha, p")
    T = matrix_from_json(payload.get("T"), f"{field}.T")
    c, alpha, p = (_number(payload.get(k), f"{field}.{k}") for k in ("c", "alpha", "p"))
    return DilationModel(T=T, c=c, alpha=alpha, p=p)


FLOAT_DIGITS = 17
_RAW = "\u0000"
_RAW_NUMBER = re.compile(r'"\\u0000([^"\\]+)\\u0000"')


def format_double(value: float) -> str:
    text = f"{value:.{FLOAT_DIGITS}g}"
    return text if any(ch in text for ch in ".en") else text + ".0"


def _mark_doubles(value: Any) -> Any:
    # flottants finis remplacés par leur texte, réinjecté tel quel après json.dumps
    if isinstance(value, float) and math.isfinite(value):
        return f"{_RAW}{format_double(value)}{_RAW}"
    if isinstance(value, dict):
        return {key: _mark_doubles(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_mark_doubles(item) for item in value]
    return value


def dumps(payload: Any) -> str:
    """JSON déterministe (clés triées, indentation fixe, doubles à 17 chiffres)"""
    text = json.dumps(_mark_doubles(payload), indent=2, sort_keys=True, allow_nan=True)
    return _RAW_NUMBER.sub(r"\1", text) + "\n"


def load_json(path: str, field: str = "input") -> Any:
    try:
        with open(path, "r", encoding="utf-8") as file:
            return json.load(file)
    except FileNotFoundError as e:
        raise MalformedInput(field, f"file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise MalformedInput(field, f"invalid JSON: {e}") from e
