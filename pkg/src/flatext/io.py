"""JSON file formats: moment files, extension output, prebasis and measure files."""

from __future__ import annotations

import json
import logging
import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .atoms import AtomicMeasure
from .extension import Extension, RewritingFamily, family_from_rules
from .linalg import format_rational, parse_rational
from .moments import MomentSequence
from .monomials import MonomialSet, format_monomial, grlex_key

log = logging.getLogger(__name__)


class InputError(ValueError):
    """Malformed or incomplete input file."""


def _read_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    return data


def _exponents(value, n: int, what: str) -> tuple[int, ...]:
    if (
        not isinstance(value, list)
        or len(value) != n
        or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in value)
    ):
        raise InputError(f"{what}: expected {n} nonnegative integers, got {value!r}")
    return tuple(value)


def _n(data: dict) -> int:
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("'n' must be a positive integer")
    return n


def _rational(value, what: str) -> Fraction:
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{what}: {value!r} is not an exact rational string") from None


def moments_from_dict(data: dict) -> tuple[MomentSequence, list[str]]:
    """Parse a moment-file object; returns the sequence and any warnings."""
    n = _n(data)
    if not isinstance(data.get("C"), list) or not data["C"]:
        raise InputError("'C' must be a nonempty list of exponent vectors")
    C = MonomialSet(n, (_exponents(m, n, "C") for m in data["C"]))
    entries = data.get("moments")
    if not isinstance(entries, list):
        raise InputError("'moments' must be a list")
    pairs = []
    for k, entry in enumerate(entries):
        if not isinstance(entry, dict) or "alpha" not in entry or "value" not in entry:
            raise InputError(f"moment #{k} needs 'alpha' and 'value'")
        pairs.append((_exponents(entry["alpha"], n, f"moment #{k}"), _rational(entry["value"], f"moment #{k}")))
    y = MomentSequence.from_pairs(n, C, pairs)
    warnings = []
    if len(y.extra):
        names = ", ".join(format_monomial(m) for m in y.extra)
        warnings.append(f"ignored moments outside C+.C+: {names}")
        log.warning(warnings[-1])
    return y, warnings


def load_moments(path) -> tuple[MomentSequence, list[str]]:
    return moments_from_dict(_read_json(path))


def moments_to_dict(y: MomentSequence, support=None) -> dict:
    support = y.values if support is None else support
    return {
        "n": y.n,
        "C": y.C.to_json(),
        "moments": [
            {"alpha": list(m), "value": format_rational(y[m])}
            for m in sorted(support, key=grlex_key)
        ],
    }


def extension_to_dict(ext: Extension) -> dict:
    data = moments_to_dict(ext.moments)
    data["meta"] = {
        "basis": ext.basis.to_json(),
        "rank": ext.rank,
        "connected": ext.connected,
        "certified": ext.certified,
    }
    return data


def family_from_dict(data: dict) -> RewritingFamily:
    n = _n(data)
    if not isinstance(data.get("B"), list):
        raise InputError("'B' must be a list of exponent vectors")
    B = MonomialSet(n, (_exponents(m, n, "B") for m in data["B"]))
    rules = []
    for k, rule in enumerate(data.get("rules", [])):
        if not isinstance(rule, dict) or "border" not in rule:
            raise InputError(f"rule #{k} needs 'border'")
        border = _exponents(rule["border"], n, f"rule #{k}")
        coeffs: dict = {}
        for term in rule.get("coeffs", []):
            b = _exponents(term.get("b"), n, f"rule #{k} term")
            coeffs[b] = coeffs.get(b, 0) + _rational(term.get("c"), f"rule #{k} term")
        var = rule.get("var")
        if var is not None:
            if not isinstance(var, int) or not 1 <= var <= n:
                raise InputError(f"rule #{k}: 'var' must be in 1..{n}")
            var -= 1
        rules.append((border, coeffs, var))
    try:
        return family_from_rules(B, rules)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def load_family(path) -> RewritingFamily:
    return family_from_dict(_read_json(path))


def family_to_dict(F: RewritingFamily) -> dict:
    def terms(coeffs):
        return [{"b": list(b), "c": format_rational(c)} for b, c in zip(F.basis, coeffs) if c]

    rules = [{"border": list(m), "coeffs": terms(F.rules[m])} for m in sorted(F.rules, key=grlex_key)]
    for (var, m), coeffs in sorted(F.pair_rules.items(), key=lambda kv: (grlex_key(kv[0][1]), kv[0][0])):
        rules.append({"border": list(m), "var": var + 1, "coeffs": terms(coeffs)})
    return {"n": F.n, "B": F.basis.to_json(), "rules": rules}


def _g17(x: float) -> str:
    return "%.17g" % x


def measure_to_json(mu: AtomicMeasure) -> str:
    """Measure file text; floats carry 17 significant digits."""
    atoms = []
    for p, w in zip(mu.points, mu.weights):
        point = ", ".join(_g17(float(np.real(x))) for x in p)
        item = f'{{"point": [{point}], "weight": {_g17(float(np.real(w)))}'
        if mu.complex_atoms:
            imag = ", ".join(_g17(float(np.imag(x))) for x in p)
            item += f', "imag": [{imag}], "weight_imag": {_g17(float(np.imag(w)))}'
        atoms.append(item + "}")
    body = ",\n    ".join(atoms)
    residual = _g17(mu.residual) if np.isfinite(mu.residual) else "null"
    extra = ', "complex_atoms": true' if mu.complex_atoms else ""
    return f'{{"n": {mu.n}, "atoms": [\n    {body}\n  ], "residual": {residual}{extra}}}\n'


def measure_from_dict(data: dict) -> AtomicMeasure:
    n = _n(data)
    atoms = data.get("atoms")
    if not isinstance(atoms, list):
        raise InputError("'atoms' must be a list")
    points, weights = [], []
    for k, atom in enumerate(atoms):
        try:
            point = [float(x) for x in atom["point"]]
            weight = float(atom["weight"])
        except (KeyError, TypeError, ValueError):
            raise InputError(f"atom #{k} needs a numeric 'point' and 'weight'") from None
        if len(point) != n:
            raise InputError(f"atom #{k} has {len(point)} coordinates, expected {n}")
        points.append(point)
        weights.append(weight)
    residual = data.get("residual")
    return AtomicMeasure(
        n,
        np.array(points, dtype=float).reshape(len(points), n),
        np.array(weights, dtype=float),
        residual=float(residual) if residual is not None else float("nan"),
    )


def load_measure(path) -> AtomicMeasure:
    return measure_from_dict(_read_json(path))


def write_text(path, text: str) -> None:
    Path(path).write_text(text)


_SCALAR = r'(?:-?[0-9][0-9.eE+-]*|"[^"\\\n]*"|true|false|null)'
_FLAT_ARRAY = re.compile(r"\[\n\s*(" + _SCALAR + r"(?:,\n\s*" + _SCALAR + r")*)\n\s*\]")


def dump(data: dict) -> str:
    """Deterministic JSON text; arrays of scalars stay on one line."""
    text = json.dumps(data, indent=2, sort_keys=True)
    return _FLAT_ARRAY.sub(lambda m: "[" + re.sub(r",\n\s+", ", ", m.group(1)) + "]", text) + "\n"
