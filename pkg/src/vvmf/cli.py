"""Command line front end: ``vvmf <subcommand> ...``.

Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass, fields, replace

from . import families
from .conformal import SMatrix, check_conformal
from .errors import DomainError
from .frobenius import CharacterVectorExpansion, family_solve, to_q_expansion
from .hypergeom import Rank2Params, dim_M0, rank2_extremal_character
from .mlde import ExponentTuple, monic_from_exponents, theta_from_exponents
from .rings import fraction_str, to_fraction

FORMATS = ("json", "csv", "pretty")
TABLES = ("rank2-extremal", "table3", "hard-hexagon", "rank4-quasi", "H")


@dataclass(frozen=True)
class CliConfig:
    precision_bits: int = 256
    n_terms: int = 25
    format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.precision_bits <= 0 or self.n_terms <= 0 or self.workers <= 0:
            raise DomainError("precision_bits, n_terms and workers must be positive")
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {', '.join(FORMATS)}")


def read_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def split_config(data: dict) -> tuple[dict, dict]:
    """Separate CliConfig keys from the rest (which belong to the scan)."""
    names = {f.name for f in fields(CliConfig)}
    cli, rest = {}, {}
    for k, v in data.items():
        if k in names:
            cli[k] = v if k == "format" else int(v)
        else:
            rest[k] = v
    return cli, rest


# ---------------------------------------------------------------------------
# output


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, sort_keys=False)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["path", "value"])
        for k, v in _flatten(obj):
            w.writerow([k, json.dumps(v) if not isinstance(v, str) else v])
        return buf.getvalue().rstrip("\n")
    return "\n".join(f"{k} = {v}" for k, v in _flatten(obj))


def emit(obj, cfg: CliConfig, out):
    out.write(render(obj, cfg.format) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def _exponents(text: str) -> tuple:
    return tuple(to_fraction(x) for x in text.split(",") if x.strip())


def cmd_solve(args, cfg: CliConfig, out) -> int:
    e = ExponentTuple(_exponents(args.exponents))
    ode = theta_from_exponents(args.rank, e)
    exp = to_q_expansion(family_solve(ode, e, cfg.n_terms), cfg.n_terms).normalized()
    payload = {"rank": args.rank, "exponents": e.to_json(), "expansion": exp.to_json()}
    if args.rank == 4:
        payload["mlde"] = monic_from_exponents(e.values).to_json()
    else:
        payload["note"] = "rank-2 series are the eta-stripped solutions K^f 2F1(...)"
    emit(payload, cfg, out)
    return 0


def cmd_check(args, cfg: CliConfig, out) -> int:
    with open(args.candidate, encoding="utf-8") as fh:
        cand = CharacterVectorExpansion.from_json(json.load(fh))
    with open(args.smatrix, encoding="utf-8") as fh:
        S = SMatrix.from_json(json.load(fh), cfg.precision_bits)
    rep = check_conformal(cand, cand.exponents, S, args.vacuum)
    emit(rep.to_json(), cfg, out)
    return 0


def cmd_scan(args, cfg: CliConfig, out, scan_settings: dict) -> int:
    settings = dict(scan_settings)
    mode = settings.pop("mode", "box")
    if mode == "line":
        family = settings.pop("family", "F")
        nums = settings.pop("numerators", None)
        den = int(settings.pop("denominator", 12))
        if settings:
            raise DomainError(f"unknown line-scan settings: {', '.join(sorted(settings))}")
        numerators = ([int(x) for x in nums.split(",")] if nums else
                      families.f_line_numerators() if family == "F" else families.g_line_numerators())
        verdicts = families.gamma03_line_scan(family, numerators, den, min(cfg.n_terms, 12),
                                              cfg.precision_bits)
        for v in verdicts:
            d = v.to_json()
            d.pop("expansion", None)
            out.write(render(d, "json" if cfg.format == "json" else cfg.format) + "\n")
        return 0
    if mode != "box":
        raise DomainError(f"unknown scan mode {mode!r}")
    settings.setdefault("n_terms", str(cfg.n_terms))
    settings.setdefault("workers", str(cfg.workers))
    scfg = families.scan_config_from_mapping(settings)
    res = families.rank4_scan(scfg)
    for c in res.candidates:
        out.write(render(c.to_json(), cfg.format) + "\n")
    summary = {"tuples_enumerated": res.tuples_enumerated, "tuples_evaluated": res.tuples_evaluated,
               "budget_exhausted": res.budget_exhausted, "candidates": len(res.candidates)}
    sys.stderr.write(json.dumps(summary) + "\n")
    return 0


def _instance_payload(name: str, cfg: CliConfig) -> dict:
    inst = families.builtin_instance(name, cfg.precision_bits)
    n = cfg.n_terms
    exp = inst.expansion(n)
    return {"name": name, "exponents": inst.exponents.to_json(),
            "mlde": inst.mlde.to_json(), "expansion": exp.to_json(),
            "S": inst.S.to_json()}


def cmd_table(args, cfg: CliConfig, out) -> int:
    name = args.name
    if name in ("hard-hexagon", "rank4-quasi"):
        emit(_instance_payload(name, cfg), cfg, out)
    elif name == "table3":
        emit({"rows": [_instance_payload(f"table3-row-{k}", cfg) for k in range(1, 5)]}, cfg, out)
    elif name == "H":
        hv = families.gamma03_H(max(cfg.n_terms, 8), cfg.precision_bits)
        emit({"computed": hv.expansion.to_json(), "computed_S": hv.S.to_json(),
              "listed": hv.reference.to_json(), "listed_S": hv.reference_S.to_json(),
              "mismatches": [[j, k, fraction_str(a) if a is not None else None, str(b)]
                             for j, k, a, b in hv.mismatches()]}, cfg, out)
    else:
        p = Rank2Params(to_fraction(args.c), to_fraction(args.h))
        ch = rank2_extremal_character(p, cfg.n_terms, cfg.precision_bits)
        emit({"c": fraction_str(p.c), "h": fraction_str(p.h), "k1": fraction_str(p.k1),
              "dim_M0": ch.dim.to_json(), "exact_integral": ch.exact_integral,
              "expansion": ch.expansion.to_json()}, cfg, out)
    return 0


def cmd_family(args, cfg: CliConfig, out) -> int:
    lam = to_fraction(args.lam)
    if args.which == "F":
        fam = families.gamma03_family(lam, cfg.n_terms)
        payload = fam.to_json()
    else:
        payload = {"lambda": fraction_str(lam), "reducible": families.is_reducible(lam),
                   "expansion": families.gamma03_G(lam, cfg.n_terms).to_json()}
    emit(payload, cfg, out)
    return 0


def cmd_dim_m0(args, cfg: CliConfig, out) -> int:
    p = Rank2Params(to_fraction(args.c), to_fraction(args.h))
    if args.k1 is not None and p.k1 != args.k1:
        raise DomainError(f"c = {fraction_str(p.c)}, h = {fraction_str(p.h)} give k1 = "
                          f"{fraction_str(p.k1)}, not {args.k1}")
    emit(dim_M0(p, cfg.precision_bits).to_json(), cfg, out)
    return 0


# ---------------------------------------------------------------------------
# parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value settings file")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--precision", type=int, dest="precision_bits")
    common.add_argument("--terms", type=int, dest="n_terms")
    common.add_argument("--workers", type=int)

    p = _Parser(prog="vvmf", description="Exact q-expansions of vector-valued modular forms.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="Frobenius solve from exponents")
    s.add_argument("--rank", type=int, choices=(2, 4), required=True)
    s.add_argument("--exponents", required=True)

    s = sub.add_parser("check", parents=[common], help="(quasi-)conformal check of a candidate")
    s.add_argument("--candidate", required=True)
    s.add_argument("--smatrix", required=True)
    s.add_argument("--vacuum", type=int, default=0)

    sub.add_parser("scan", parents=[common], help="exponent scan driven by a config file")

    s = sub.add_parser("table", parents=[common], help="reproduce a named table")
    s.add_argument("name", choices=TABLES)
    s.add_argument("--c", default="33")
    s.add_argument("--h", default="9/4")

    s = sub.add_parser("family", parents=[common], help="Gamma_0(3) family specialization")
    s.add_argument("family_name", choices=("gamma0-3",))
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--which", choices=("F", "G"), default="F")

    s = sub.add_parser("dim-m0", parents=[common], help="dim M_0 for a rank-2 extremal theory")
    s.add_argument("--c", required=True)
    s.add_argument("--h", required=True)
    s.add_argument("--k1", type=int)
    return p


_NEG_VALUE = re.compile(r"^-[0-9.]")


def normalize_argv(argv) -> list[str]:
    """Join '--opt -1/3' into '--opt=-1/3' so negative rationals parse as values."""
    out = []
    i = 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEG_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


_COMMANDS = {"solve": cmd_solve, "check": cmd_check, "table": cmd_table,
             "family": cmd_family, "dim-m0": cmd_dim_m0}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(normalize_argv(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        file_settings = read_config_file(args.config) if args.config else {}
        cli_file, rest = split_config(file_settings)
        cfg = CliConfig(**cli_file)
        overrides = {k: getattr(args, k) for k in ("precision_bits", "n_terms", "format", "workers")
                     if getattr(args, k) is not None}
        cfg = replace(cfg, **overrides)
        if args.command == "scan":
            if not args.config:
                raise DomainError("scan needs --config")
            return cmd_scan(args, cfg, out, rest)
        if rest:
            raise DomainError(f"unknown settings: {', '.join(sorted(rest))}")
        return _COMMANDS[args.command](args, cfg, out)
    except (DomainError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main():
    raise SystemExit(run())
