"""Command line entry point: ``kahlerprod run | list | lattice``."""
from __future__ import annotations

import argparse
import json
import sys

from . import campaign, gallery, torus
from .errors import ConfigError, GeometryError

EXAMPLE_INSTANCES = ("sphere:1,2", "sphere:1,1", "stiefel:2,4", "stiefel-torus:2,4,1",
                     "stiefel-torus:2,4,2", "calabi-eckmann:1,25")


def _cmd_run(args) -> int:
    cfg = campaign.CampaignConfig.load(args.config)
    if args.seed is not None or args.out is not None:
        data = cfg.to_dict()
        if args.seed is not None:
            data["seed"] = args.seed
        if args.out is not None:
            data["output"]["dir"] = args.out
        cfg = campaign.CampaignConfig.from_dict(data)
    paths = campaign.prepare_output(cfg)
    report = campaign.run_campaign(cfg)
    campaign.write_report(report, paths)
    for res in report.results:
        s = res.summary()
        mr = s["max_residual"]
        mr = "n/a" if mr is None else f"{mr:.3e}"
        print(f"{s['status'].upper():4s}  {res.name:13s} {s['mode']:22s} max residual {mr}  "
              f"samples {s['samples']}  {s['wall_time']:.2f}s")
        if "error" in s:
            print(f"      error: {s['error']}")
    print(f"report: {paths[0]}\ncsv:    {paths[1]}")
    return 0 if report.passed else 1


def _cmd_list(args) -> int:
    print("instance kinds:")
    for kind in gallery.INSTANCE_KINDS:
        print(f"  {kind}")
    print("examples:")
    for name in EXAMPLE_INSTANCES:
        inst = gallery.parse_instance(name)
        usable = [c for c in campaign.CHECKS if campaign.applicable(inst, c) is None]
        print(f"  {name:22s} {inst.description}  [checks: {', '.join(usable)}]")
    print("checks:")
    for c in campaign.CHECKS:
        print(f"  {c}")
    print("  all")
    return 0


def _cmd_lattice(args) -> int:
    a11, a12, a21, a22, c, d = args.entries
    A = ((a11, a12), (a21, a22))
    lat = torus.period_lattice(A)
    rep = torus.check_lattice_claim(A, (c, d))
    out = {
        "mixing": [list(r) for r in A],
        "det": torus.det2(A),
        "generators": [torus.format_vec(lat.v1), torus.format_vec(lat.v2)],
        "covolume": str(lat.covolume),
        "claim": [torus.format_vec(g) for g in rep.claim],
        "containment": rep.verdict,
        "witness": None if rep.witness is None else torus.format_vec(rep.witness),
    }
    if args.json:
        print(json.dumps(out, indent=2))
        return 0
    print(f"A = {out['mixing']}  det = {out['det']}")
    print(f"period lattice generators: {out['generators'][0]}, {out['generators'][1]}")
    print(f"covolume: {out['covolume']}")
    line = f"claimed lattice span_Z{{{out['claim'][0]}, {out['claim'][1]}}}: {rep.verdict}"
    if rep.witness is not None:
        line += f", witness {out['witness']}"
    print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kahlerprod", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a verification campaign from a JSON config")
    r.add_argument("config")
    r.add_argument("--seed", type=int, help="override the config seed")
    r.add_argument("--out", help=f"output directory (default: config, then ${campaign.OUT_ENV}, "
                                 f"then ./{campaign.DEFAULT_OUT})")
    r.set_defaults(func=_cmd_run)

    ls = sub.add_parser("list", help="list instance kinds and checks")
    ls.set_defaults(func=_cmd_list)

    lt = sub.add_parser("lattice", help="period lattice of a mixing matrix")
    lt.add_argument("entries", nargs=6, type=int, metavar="N",
                    help="A11 A12 A21 A22 C D; the claim is Z/C + iZ/D, with C = D = 0 meaning |det A|")
    lt.add_argument("--json", action="store_true")
    lt.set_defaults(func=_cmd_lattice)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
