"""Shipped fixtures and case presets (versioned data files)."""
from __future__ import annotations

import json
from importlib import resources

from .hecke import CurveCase, HeckeMatrix
from .modeq import ModularEquation

PRESETS = ("x6star-T5", "x10star-T3", "sl2z-T2")


def _read(name: str) -> str:
    return resources.files("shimhecke").joinpath("data").joinpath(name).read_text()


def load_case(ref: str) -> CurveCase:
    """A preset name or a path to a case configuration file."""
    if ref in PRESETS:
        return CurveCase(json.loads(_read(f"cases/{ref}.json")))
    return CurveCase.load(ref)


def load_modular_equation(name: str) -> ModularEquation:
    return ModularEquation.deserialize(_read(f"{name}.txt"))


def load_matrix_table(name: str) -> dict[int, HeckeMatrix]:
    out = {}
    for line in _read(f"{name}.txt").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        m = HeckeMatrix.parse_machine(line)
        out[m.weight] = m
    return out


def load_transformed_coefficients(name: str) -> dict[int, object]:
    from .scalars import parse_cpoly
    out = {}
    for line in _read(f"{name}.txt").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        idx, body = line.split(":", 1)
        out[int(idx)] = parse_cpoly(body.strip())
    return out


def load_ratfun_fixture(name: str):
    from .ratfun import parse_ratfun
    lines = [l for l in _read(f"{name}.txt").splitlines()
             if l.strip() and not l.startswith("#")]
    return parse_ratfun(lines[0])
