"""Command-line front end.

Exit codes: 0 on verified success, 2 on an honest negative/failed check,
1 on invalid input or replay errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .lattice import (LatticeError, build_standard, discriminant_group,
                      signature)
from .isometry import IsometryError, replay_word, verify
from .transport import eichler_reduce
from .model import (DeltaConstraint, ModelError, brauer_trivial, delta_class,
                    find_delta, make_model, theta, theta_brauer, torsion_order)
from .pipeline import (DecideConfig, K3Input, PipelineError, _algebraic_basis,
                       build_psi_tilde, decide, embed_triple, exp_tH, find_t,
                       mukai_ambient, verify_certificate_report)
from .serialize import (certificate_from_json, dumps_certificate,
                        isometry_to_json, lattice_to_json)

OK, INVALID, FAILED = 0, 1, 2


def _triple(s: str):
    parts = [int(p) for p in s.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected r,k,s")
    return tuple(parts)


def _coords(s: str):
    return [int(p) for p in s.split(",")]


def _emit(args, payload: dict, text: str):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _model_for(d, triple, box):
    if d < 1:
        raise PipelineError("polarization degree d must be >= 1")
    L = mukai_ambient()
    v = embed_triple(L, d, triple)
    return L, v, make_model(v, algebraic=_algebraic_basis(L, d)), box


def cmd_lattice_info(args) -> int:
    lat = build_standard(args.name, args.n)
    pos, neg = signature(lat)
    dg = discriminant_group(lat)
    payload = {
        "lattice": lattice_to_json(lat),
        "rank": lat.rank,
        "signature": [pos, neg],
        "discriminant": lat.det(),
        "invariant_factors": list(dg.invariant_factors),
    }
    _emit(args, payload,
          f"{lat.label}: rank {lat.rank}, signature ({pos},{neg}), "
          f"disc {lat.det()}, discriminant group {list(dg.invariant_factors)}")
    return OK


def cmd_delta_find(args) -> int:
    L, v, M, box = _model_for(args.d, args.v, args.delta_box)
    constraint = None
    if args.w is not None:
        t = args.t if args.t is not None else find_t(*args.w, args.d,
                                                    bound=args.bound_t)
        constraint = DeltaConstraint(exp_tH(L, args.d, t), embed_triple(L, args.d, args.w))
    dc = find_delta(M, constraint, box=box, max_steps=args.transport_steps)
    th = theta(M, dc)
    payload = {
        "n": M.n,
        "delta": list(dc.delta.coords),
        "theta": [int(c) for c in th.rep],
        "theta_order": torsion_order(th),
        "theta_brauer_trivial": brauer_trivial(theta_brauer(M, dc)),
    }
    _emit(args, payload,
          f"n = {M.n}, delta = {list(dc.delta.coords)}, "
          f"order(theta) = {payload['theta_order']}, "
          f"[theta] trivial: {payload['theta_brauer_trivial']}")
    return OK


def cmd_psi_build(args) -> int:
    if args.d < 1:
        raise PipelineError("polarization degree d must be >= 1")
    L = mukai_ambient()
    vx = embed_triple(L, args.d, args.v)
    wy = embed_triple(L, args.d, args.w)
    t = args.t if args.t is not None else find_t(*args.v, args.d,
                                                bound=args.bound_t)
    phi = exp_tH(L, args.d, t)
    alg = _algebraic_basis(L, args.d)
    M_X = make_model(vx, algebraic=alg)
    M_Y = make_model(wy, algebraic=alg)
    dv = find_delta(M_X, DeltaConstraint(phi, wy), box=args.delta_box,
                    max_steps=args.transport_steps)
    dw = delta_class(M_Y, phi(dv.delta) - phi(vx) + wy)
    psi = build_psi_tilde(M_X, M_Y, phi, dv, dw)
    payload = {
        "t": t,
        "delta_v": list(dv.delta.coords),
        "delta_w": list(dw.delta.coords),
        "word_length": len(psi.word),
        "integral": psi.is_integral,
        "isometry": isometry_to_json(psi),
    }
    _emit(args, payload,
          f"t = {t}, word length {len(psi.word)}, integral: {psi.is_integral}, "
          f"psi(v) = w verified")
    return OK


def cmd_eichler_reduce(args) -> int:
    lat = build_standard(args.lattice, args.n)
    x = lat.vector(args.coords)
    word, canon = eichler_reduce(x, max_steps=args.transport_steps)
    g = replay_word(lat, word)
    if not verify(g) or g(x).coords != canon.coords:
        print("internal replay mismatch", file=sys.stderr)
        return FAILED
    payload = {
        "canonical": list(canon.coords),
        "word_length": len(word),
        "word": [list(a) if isinstance(a, tuple) else a for a in word],
    }
    _emit(args, payload,
          f"canonical form {list(canon.coords)} via {len(word)} moves (replay checked)")
    return OK


def cmd_equiv_decide(args) -> int:
    inp = K3Input(args.d, args.v, args.w)
    config = DecideConfig(bound_t=args.bound_t, delta_box=args.delta_box,
                          transport_steps=args.transport_steps)
    cert = decide(inp, config)
    text = dumps_certificate(cert)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print(f"verdict: {cert.verdict}  epsilon: {cert.epsilon}")
        if cert.diagnostic:
            print(f"diagnostic: {cert.diagnostic}")
        for line in cert.replay_log:
            print(f"  {line}")
    if cert.verdict == "failure":
        return FAILED
    ok, reason = verify_certificate_report(cert)
    if not ok:
        print(f"self-verification failed: {reason}", file=sys.stderr)
        return FAILED
    return OK


def cmd_cert_verify(args) -> int:
    with open(args.file) as fh:
        cert = certificate_from_json(json.load(fh))
    ok, reason = verify_certificate_report(cert)
    _emit(args, {"verified": ok, "reason": reason, "verdict": cert.verdict},
          f"{'VERIFIED' if ok else 'REJECTED'} ({cert.verdict}): {reason}")
    return OK if ok else FAILED


def cmd_selftest(args) -> int:
    rng = random.Random(args.seed)
    checks = []
    lat = build_standard("Mukai")
    for _ in range(20):
        pair = lat.hyperbolic_pairs[rng.randrange(4)]
        coords = [0] * lat.rank
        for _ in range(3):
            coords[rng.randrange(lat.rank)] = rng.randint(-3, 3)
        coords[pair[0]] = coords[pair[1]] = 0
        from .isometry import eichler_transvection_in
        checks.append(verify(eichler_transvection_in(lat, pair, lat.vector(coords))))
    cert = decide(K3Input(3, (1, 0, -1), (2, 1, 1)))
    checks.append(cert.verdict == "criterion-case-1")
    checks.append(verify_certificate_report(cert)[0])
    ok = all(checks)
    _emit(args, {"passed": ok, "checks": len(checks)},
          f"selftest: {len(checks)} checks, {'all passed' if ok else 'FAILED'}")
    return OK if ok else FAILED


def _add_common(p):
    p.add_argument("--bound-t", type=int, default=10 ** 6,
                   help="search bound for the twist exponent t")
    p.add_argument("--delta-box", type=int, default=8,
                   help="coordinate box for the delta-class fallback search")
    p.add_argument("--transport-steps", type=int, default=400,
                   help="step bound for transvection reductions")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mukailat", description=__doc__)
    sub = ap.add_subparsers(dest="group", required=True)

    p = sub.add_parser("lattice").add_subparsers(dest="action", required=True) \
        .add_parser("info", help="rank/signature/discriminant of a standard lattice")
    p.add_argument("name", help="U, E8_minus, K3, Mukai, K3n, RankOne")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lattice_info)

    p = sub.add_parser("delta").add_subparsers(dest="action", required=True) \
        .add_parser("find", help="delta-class of a moduli datum")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--v", type=_triple, required=True, metavar="r,k,s")
    p.add_argument("--w", type=_triple, default=None, metavar="r,k,s",
                   help="optional second datum: constrain delta by the pairing")
    p.add_argument("--t", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_delta_find)

    p = sub.add_parser("psi").add_subparsers(dest="action", required=True) \
        .add_parser("build", help="build the extended isometry carrying v to w")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--v", type=_triple, required=True, metavar="r,k,s")
    p.add_argument("--w", type=_triple, required=True, metavar="r,k,s")
    p.add_argument("--t", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_psi_build)

    p = sub.add_parser("eichler").add_subparsers(dest="action", required=True) \
        .add_parser("reduce", help="canonical form of a primitive vector")
    p.add_argument("--lattice", default="Mukai")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--coords", type=_coords, required=True, metavar="c1,c2,...")
    _add_common(p)
    p.set_defaults(func=cmd_eichler_reduce)

    p = sub.add_parser("equiv").add_subparsers(dest="action", required=True) \
        .add_parser("decide", help="decide twisted derived equivalence")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--v", type=_triple, required=True, metavar="r,k,s")
    p.add_argument("--w", type=_triple, required=True, metavar="r,k,s")
    p.add_argument("-o", "--output", default=None,
                   help="write the certificate JSON to this file")
    _add_common(p)
    p.set_defaults(func=cmd_equiv_decide)

    p = sub.add_parser("cert").add_subparsers(dest="action", required=True) \
        .add_parser("verify", help="re-verify a certificate from scratch")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cert_verify)

    p = sub.add_parser("selftest", help="quick randomized consistency check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LatticeError, IsometryError, ModelError, PipelineError,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
