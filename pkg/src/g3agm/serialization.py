"""JSON encoding of inputs and reports.

Scalars are written as ``[re, im]`` pairs of decimal strings with 17
significant digits, which round-trips IEEE doubles exactly.  Input files may
also give plain decimal strings (``"0.25"``) or numbers.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .forms import HomogeneousForm
from .numkernel import ToleranceProfile


def encode_scalar(z) -> list[str]:
    z = complex(z)
    return [format(z.real, ".17g"), format(z.imag, ".17g")]


def decode_scalar(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(float(re), float(im))
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    return complex(v)


def encode_point(p) -> list:
    return [encode_scalar(x) for x in np.asarray(p)]


def decode_point(v) -> np.ndarray:
    return np.array([decode_scalar(x) for x in v], dtype=complex)


def encode_form(F: HomogeneousForm) -> dict:
    return {",".join(map(str, e)): encode_scalar(c) for e, c in zip(
        [tuple(x) for x in F.exponents], F.coeffs) if c != 0}


def decode_form(d: dict) -> HomogeneousForm:
    terms = {tuple(int(x) for x in k.split(",")): decode_scalar(v) for k, v in d.items()}
    return HomogeneousForm.from_dict(terms)


def to_jsonable(obj):
    """Recursively convert numpy and complex values for ``json.dumps``."""
    if isinstance(obj, HomogeneousForm):
        return encode_form(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [to_jsonable(v) for v in obj]
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_scalar(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


@dataclass
class RunConfig:
    """Parsed input document."""

    quartic: HomogeneousForm | None = None
    alpha_pair: tuple | None = None
    alpha_lines: list | None = None
    flag: str | None = None
    configuration: dict | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    precision: str = "double"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        unknown = set(d) - {"quartic", "alpha", "flag", "configuration", "tolerances", "seed",
                            "precision", "description"}
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        cfg = cls(seed=int(d.get("seed", 0)), precision=d.get("precision", "double"),
                  tolerances=dict(d.get("tolerances", {})), flag=d.get("flag"))
        if "quartic" in d:
            cfg.quartic = decode_form(d["quartic"])
            if cfg.quartic.degree != 4 or cfg.quartic.nvars != 3:
                raise ValueError("quartic must be a ternary form of degree 4")
        alpha = d.get("alpha")
        if alpha:
            if "pair" in alpha:
                i, j = (int(x) for x in alpha["pair"])
                cfg.alpha_pair = (i, j)
            elif "lines" in alpha:
                cfg.alpha_lines = [decode_point(v) for v in alpha["lines"]]
                if len(cfg.alpha_lines) != 2:
                    raise ValueError("alpha.lines needs two line coefficient triples")
            else:
                raise ValueError("alpha needs 'pair' or 'lines'")
        if "configuration" in d:
            c = d["configuration"]
            cfg.configuration = {"E": decode_form(c["E"]), "Q": decode_form(c["Q"]),
                                 "q": [decode_point(p) for p in c["q"]]}
            if "flag" in c and cfg.flag is None:
                cfg.flag = c["flag"]
        return cfg

    def to_dict(self) -> dict:
        d: dict = {"seed": self.seed, "precision": self.precision}
        if self.quartic is not None:
            d["quartic"] = encode_form(self.quartic)
        if self.alpha_pair is not None:
            d["alpha"] = {"pair": list(self.alpha_pair)}
        elif self.alpha_lines is not None:
            d["alpha"] = {"lines": [encode_point(v) for v in self.alpha_lines]}
        if self.flag is not None:
            d["flag"] = self.flag
        if self.configuration is not None:
            d["configuration"] = {"E": encode_form(self.configuration["E"]),
                                  "Q": encode_form(self.configuration["Q"]),
                                  "q": [encode_point(p) for p in self.configuration["q"]]}
        if self.tolerances:
            d["tolerances"] = dict(self.tolerances)
        return d

    def profile(self, **overrides) -> ToleranceProfile:
        kw = {k: v for k, v in self.tolerances.items()
              if k in ("eps_point", "eps_rank", "eps_residual", "max_newton_iters")}
        kw.update(seed=self.seed, precision=self.precision)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return ToleranceProfile(**kw)


def load_config(path) -> tuple[RunConfig, str]:
    """Parse a config file; also returns the sha256 of its bytes."""
    with open(path, "rb") as fh:
        raw = fh.read()
    return RunConfig.from_dict(json.loads(raw)), hashlib.sha256(raw).hexdigest()


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, ensure_ascii=False)
