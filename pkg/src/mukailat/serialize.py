"""JSON encodings for lattices, vectors, isometries, and certificates.

Every ``*_to_json`` returns plain dict/list/int/str data (json.dumps-safe);
the matching ``*_from_json`` reconstructs an equal object.  Rationals are
written as ``"p/q"`` strings (plain ints stay ints) so round trips are
bit-exact.  Isometry words are stored as nested lists and rebuilt as the
nested tuples the replay machinery expects.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .extended import BField
from .isometry import Isometry, make_isometry
from .lattice import (IntegralLattice, LatticeError, LatticeVector,
                      RationalVector)
from .model import BrauerRep
from .pipeline import EquivalenceCertificate


def _enc_q(c):
    c = Fraction(c)
    if c.denominator == 1:
        return int(c)
    return f"{c.numerator}/{c.denominator}"


def _dec_q(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, int):
        return Fraction(s)
    raise LatticeError(f"bad rational encoding: {s!r}")


def _listify(obj):
    if isinstance(obj, tuple):
        return [_listify(x) for x in obj]
    return obj


def _tuplify(obj):
    if isinstance(obj, list):
        return tuple(_tuplify(x) for x in obj)
    return obj


# ---------------------------------------------------------------------------
# lattices and vectors


def lattice_to_json(lat: IntegralLattice) -> dict:
    return {
        "label": lat.label,
        "gram": [list(row) for row in lat.gram],
        "hyperbolic_pairs": [list(p) for p in lat.hyperbolic_pairs],
    }


def lattice_from_json(obj: dict) -> IntegralLattice:
    return IntegralLattice(
        gram=tuple(tuple(int(c) for c in row) for row in obj["gram"]),
        label=obj.get("label", ""),
        hyperbolic_pairs=tuple(tuple(int(i) for i in p)
                               for p in obj.get("hyperbolic_pairs", [])),
    )


def vector_to_json(x) -> dict:
    return {
        "lattice": lattice_to_json(x.lattice),
        "coords": [_enc_q(c) for c in x.coords],
    }


def vector_from_json(obj: dict, lattice: IntegralLattice | None = None):
    lat = lattice if lattice is not None else lattice_from_json(obj["lattice"])
    coords = [_dec_q(c) for c in obj["coords"]]
    if all(c.denominator == 1 for c in coords):
        return lat.vector([int(c) for c in coords])
    return lat.rational_vector(coords)


# ---------------------------------------------------------------------------
# isometries


def isometry_to_json(g: Isometry) -> dict:
    return {
        "domain": lattice_to_json(g.domain),
        "codomain": lattice_to_json(g.codomain),
        "num": [[int(c) for c in row] for row in g.num],
        "den": int(g.den),
        "word": _listify(g.word),
    }


def isometry_from_json(obj: dict) -> Isometry:
    return make_isometry(
        lattice_from_json(obj["domain"]),
        lattice_from_json(obj["codomain"]),
        [[int(c) for c in row] for row in obj["num"]],
        int(obj["den"]),
        word=_tuplify(obj.get("word", [])),
    )


# ---------------------------------------------------------------------------
# Brauer representatives


def brauer_to_json(rep: BrauerRep) -> dict:
    return {
        "lattice": lattice_to_json(rep.bfield.b.lattice),
        "b": [_enc_q(c) for c in rep.bfield.b.coords],
        "d": int(rep.bfield.d),
        "picard": [list(row) for row in rep.picard],
    }


def brauer_from_json(obj: dict) -> BrauerRep:
    lat = lattice_from_json(obj["lattice"])
    b = lat.rational_vector([_dec_q(c) for c in obj["b"]])
    return BrauerRep(BField(b, int(obj["d"])),
                     tuple(tuple(int(c) for c in row) for row in obj["picard"]))


# ---------------------------------------------------------------------------
# equivalence certificates (schema 1)


def certificate_to_json(cert: EquivalenceCertificate) -> dict:
    out = {
        "schema": cert.schema,
        "verdict": cert.verdict,
        "diagnostic": cert.diagnostic,
        "epsilon": cert.epsilon,
        "d": cert.d,
        "v_mukai": list(cert.v_mukai),
        "w_mukai": list(cert.w_mukai),
        "n": cert.n,
        "t": cert.t,
        "negated_target": cert.negated_target,
        "isometry_word": None if cert.isometry_word is None
        else _listify(cert.isometry_word),
        "delta_v": None if cert.delta_v is None else list(cert.delta_v),
        "delta_w": None if cert.delta_w is None else list(cert.delta_w),
        "brauer_left": None if cert.brauer_left is None
        else brauer_to_json(cert.brauer_left),
        "brauer_right": None if cert.brauer_right is None
        else brauer_to_json(cert.brauer_right),
        "profile_r": cert.profile_r,
        "gamma": None if cert.gamma is None else list(cert.gamma),
        "k_select": cert.k_select,
        "s_k": cert.s_k,
        "flags": [[k, v] for k, v in cert.flags],
        "replay_log": list(cert.replay_log),
    }
    return out


def certificate_from_json(obj: dict) -> EquivalenceCertificate:
    if obj.get("schema") != 1:
        raise LatticeError(f"unsupported certificate schema: {obj.get('schema')!r}")
    return EquivalenceCertificate(
        schema=1,
        verdict=obj["verdict"],
        diagnostic=obj.get("diagnostic"),
        epsilon=int(obj["epsilon"]),
        d=int(obj["d"]),
        v_mukai=tuple(int(c) for c in obj["v_mukai"]),
        w_mukai=tuple(int(c) for c in obj["w_mukai"]),
        n=int(obj["n"]),
        t=None if obj.get("t") is None else int(obj["t"]),
        negated_target=bool(obj.get("negated_target", False)),
        isometry_word=None if obj.get("isometry_word") is None
        else _tuplify(obj["isometry_word"]),
        delta_v=None if obj.get("delta_v") is None
        else tuple(int(c) for c in obj["delta_v"]),
        delta_w=None if obj.get("delta_w") is None
        else tuple(int(c) for c in obj["delta_w"]),
        brauer_left=None if obj.get("brauer_left") is None
        else brauer_from_json(obj["brauer_left"]),
        brauer_right=None if obj.get("brauer_right") is None
        else brauer_from_json(obj["brauer_right"]),
        profile_r=None if obj.get("profile_r") is None
        else int(obj["profile_r"]),
        gamma=None if obj.get("gamma") is None
        else tuple(int(c) for c in obj["gamma"]),
        k_select=None if obj.get("k_select") is None else int(obj["k_select"]),
        s_k=None if obj.get("s_k") is None else int(obj["s_k"]),
        flags=tuple((k, v) for k, v in obj.get("flags", [])),
        replay_log=tuple(obj.get("replay_log", [])),
    )


def dumps_certificate(cert: EquivalenceCertificate, indent: int | None = 2) -> str:
    return json.dumps(certificate_to_json(cert), indent=indent)


def loads_certificate(s: str) -> EquivalenceCertificate:
    return certificate_from_json(json.loads(s))
