"""Command-line front end: sweeps and reproductions written as CSV.

    gaussjscc sweep --schemes af,sb,lt,nc --rho 0.1,0.75 --snr-db -20:40:5
    gaussjscc table1
    gaussjscc multiuser --rho 0.8 --n-users 2:10 --snr-db -10:10:10
    gaussjscc sideinfo --si dec --si-gain 0,0.5,1,2 --rho 0.5 --snr-db 0
    gaussjscc oracle-check --samples 1000000

Options may also come from ``--config FILE`` holding ``key = value`` lines
(keys are the long option names); command-line flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .af import AfParams, af_distortions, af_symmetric
from .bounds import nc_distortion
from .errors import ConfigError, JsccError
from .lt import lt_optimize, lt_optimize_symmetric
from .mc import simulate_af_gmac, simulate_af_orthogonal
from .multiuser import multiuser_distortion
from .orthogonal import OrthParams, orth_af_distortions, orth_af_symmetric, orth_sb_distortion
from .power import optimize_af_powers
from .sb import sb_gmac_distortion, sb_optimize
from .side_info import SideInfoSpec, optimize_si

SCHEMES = ("af", "sb", "lt", "nc")
SI_CHOICES = {"none": "none", "enc": "encoders_only", "dec": "decoder_only", "both": "both"}
TABLE1_P2 = (1.0, 5.0, 20.0, 50.0)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return f"{x:.6g}"


# ---------------------------------------------------------------- parsing


def parse_range(text: str, field_name: str) -> list[float]:
    """``start:stop[:step]`` (stop inclusive, step 1 by default) or a single value."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"cannot parse range {text!r}", field=field_name) from None
    if len(nums) == 1:
        return nums
    if len(nums) == 2:
        nums.append(1.0)
    if len(nums) != 3:
        raise ConfigError(f"range must be start:stop[:step], got {text!r}", field=field_name)
    start, stop, step = nums
    if not step > 0:
        raise ConfigError("step must be > 0", field=field_name)
    if stop < start:
        raise ConfigError("empty range (stop < start)", field=field_name)
    k = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 12) for i in range(k + 1)]


def parse_list(text: str, field_name: str, conv=float) -> list:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item and conv is int:
            out += [int(x) for x in parse_range(item, field_name)]
            continue
        try:
            out.append(conv(item))
        except ValueError:
            raise ConfigError(f"bad value {item!r}", field=field_name) from None
    if not out:
        raise ConfigError("list is empty", field=field_name)
    return out


def parse_schemes(text: str, allowed=SCHEMES) -> list[str]:
    out = [s.strip().lower() for s in text.split(",") if s.strip()]
    if not out:
        raise ConfigError("scheme set is empty", field="schemes")
    for s in out:
        if s not in allowed:
            raise ConfigError(f"unknown scheme {s!r}; choose from {','.join(allowed)}", field="schemes")
    return list(dict.fromkeys(out))


def read_config(path: str) -> dict[str, str]:
    """Plain ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e.strerror}") from None
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected key = value", line=no)
        k, val = (s.strip() for s in line.split("=", 1))
        key = k.replace("_", "-")
        if not key:
            raise ConfigError("missing key", line=no)
        out[key] = (val, no)
    return out


def _config_defaults(path: str, sp: argparse.ArgumentParser) -> dict:
    """Turn a config file into parser defaults for subcommand ``sp``."""
    acts = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    out = {}
    for key, (val, no) in read_config(path).items():
        dest = key.replace("-", "_")
        if dest not in acts:
            raise ConfigError(f"unknown option {key!r}", field=key, line=no)
        if isinstance(acts[dest], argparse._StoreTrueAction):
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"expected a boolean, got {val!r}", field=key, line=no)
            val = val.lower() in ("true", "1", "yes")
        elif acts[dest].type is int:
            try:
                val = int(val)
            except ValueError:
                raise ConfigError(f"expected an integer, got {val!r}", field=key, line=no) from None
        elif acts[dest].choices and val not in acts[dest].choices:
            raise ConfigError(f"expected one of {sorted(acts[dest].choices)}, got {val!r}",
                              field=key, line=no)
        out[dest] = val
    return out


# ---------------------------------------------------------------- configs


@dataclass
class SweepConfig:
    schemes: list[str]
    channel: str = "gmac"
    snr_db: list[float] = field(default_factory=lambda: [0.0])
    rho: list[float] = field(default_factory=lambda: [0.5])
    p2_ratio: float | None = None
    mc: bool = False
    samples: int = 100_000
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not self.schemes:
            raise ConfigError("scheme set is empty", field="schemes")
        if self.channel not in ("gmac", "orthogonal"):
            raise ConfigError(f"unknown channel {self.channel!r}", field="channel")
        if self.channel == "orthogonal":
            bad = [s for s in self.schemes if s not in ("af", "sb")]
            if bad:
                raise ConfigError(f"orthogonal channel supports af,sb only; got {','.join(bad)}",
                                  field="schemes")
        if self.p2_ratio is not None:
            if not self.p2_ratio > 0:
                raise ConfigError("p2-ratio must be > 0", field="p2-ratio")
            if "nc" in self.schemes:
                raise ConfigError("nc is only defined for the symmetric case", field="schemes")
        for r in self.rho:
            if not 0.0 <= r < 1.0:
                raise ConfigError(f"rho must lie in [0, 1), got {r}", field="rho")
        if self.samples < 1000:
            raise ConfigError("samples must be >= 1000", field="samples")


def _symmetric_point(scheme, channel, S, rho):
    if channel == "orthogonal":
        return {"af": orth_af_symmetric, "sb": orth_sb_distortion}[scheme](S, rho)
    if scheme == "af":
        return af_symmetric(S, rho)
    if scheme == "sb":
        return sb_gmac_distortion(S, rho)
    if scheme == "lt":
        return lt_optimize_symmetric(S, rho).D
    return nc_distortion(S, rho)


def _asym_point(scheme, channel, P1, P2, rho):
    if scheme == "af":
        if channel == "gmac":
            return af_distortions(AfParams(P1, P2, rho=rho))
        return orth_af_distortions(OrthParams(P1, P2, rho=rho))
    if scheme == "sb":
        r = sb_optimize(P1, P2, rho, channel=channel)
    else:
        r = lt_optimize(P1, P2, rho)
    return r.D1, r.D2


def _sweep_row(task):
    cfg, snr, rho, scheme = task
    S = 10.0 ** (snr / 10.0)
    row = [snr, rho, scheme.upper()]
    if cfg.p2_ratio is None:
        P1 = P2 = S
        row.append(_symmetric_point(scheme, cfg.channel, S, rho))
    else:
        P1, P2 = S, cfg.p2_ratio * S
        d1, d2 = _asym_point(scheme, cfg.channel, P1, P2, rho)
        row += [0.5 * (d1 + d2), d1, d2]
    if cfg.mc:
        if scheme == "af":
            if cfg.channel == "gmac":
                sim = simulate_af_gmac(AfParams(P1, P2, rho=rho), cfg.samples, cfg.seed)
            else:
                sim = simulate_af_orthogonal(OrthParams(P1, P2, rho=rho), cfg.samples, cfg.seed)
            # conservative: the two users' errors are not independent
            row += [0.5 * sim.D_sum, 0.5 * (sim.stderr1 + sim.stderr2)]
        else:
            row += ["", ""]
    return row


def _pmap(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def cmd_sweep(cfg: SweepConfig) -> tuple[list[str], list[list]]:
    """Rows in grid order: snr outer, then rho, then scheme."""
    header = ["snr_db", "rho", "scheme", "D"]
    if cfg.p2_ratio is not None:
        header += ["D1", "D2"]
    if cfg.mc:
        header += ["D_mc", "stderr"]
    tasks = [(cfg, snr, rho, s) for snr in cfg.snr_db for rho in cfg.rho for s in cfg.schemes]
    return header, _pmap(_sweep_row, tasks, cfg.jobs)


def cmd_table1(rho: float = 0.5, P1: float = 10.0, P2s=TABLE1_P2) -> tuple[list[str], list[list]]:
    header = ["P1", "P2", "a_star", "b_star", "D_min"]
    rows = []
    for P2 in P2s:
        sol = optimize_af_powers(P1, P2, rho)
        rows.append([P1, P2, sol.a_star, sol.b_star, sol.D_min])
    return header, rows


def format_table(header, rows) -> str:
    cells = [header] + [[fmt(x) for x in r] for r in rows]
    w = [max(len(c[i]) for c in cells) for i in range(len(header))]
    lines = ["  ".join(c[i].rjust(w[i]) for i in range(len(header))) for c in cells]
    lines.insert(1, "  ".join("-" * x for x in w))
    return "\n".join(lines) + "\n"


def _mu_row(task):
    snr, N, scheme, rho = task
    return [snr, N, scheme.upper(), multiuser_distortion(scheme, N, 10.0 ** (snr / 10.0), rho)]


def cmd_multiuser(rho: float, n_users, snr_db, schemes=("af",), jobs=1):
    for s in schemes:
        if s not in ("af", "sb", "lt"):
            raise ConfigError(f"multiuser supports af,sb,lt only; got {s}", field="schemes")
    for N in n_users:
        if N < 1:
            raise ConfigError(f"user count must be >= 1, got {N}", field="n-users")
    tasks = [(snr, N, s, rho) for snr in snr_db for N in n_users for s in schemes]
    return ["snr_db", "N", "scheme", "D"], _pmap(_mu_row, tasks, jobs)


def _si_row(task):
    snr, s, scheme, avail, rho, channel = task
    S = 10.0 ** (snr / 10.0)
    r = optimize_si(scheme, SideInfoSpec(s, s, avail), S, S, 1.0, rho, channel=channel)
    return [snr, s, scheme.upper(), avail, r.D_sum]


def cmd_sideinfo(rho: float, snr_db, gains, availability, schemes=("af", "sb", "lt"),
                 channel="gmac", jobs=1):
    for s in schemes:
        if s not in ("af", "sb", "lt"):
            raise ConfigError(f"side information supports af,sb,lt only; got {s}", field="schemes")
        if channel == "orthogonal" and s == "lt":
            raise ConfigError("orthogonal channel supports af,sb only", field="schemes")
    for g in gains:
        if not g >= 0:
            raise ConfigError(f"side gain must be >= 0, got {g}", field="si-gain")
    tasks = [(snr, s, sc, a, rho, channel) for snr in snr_db for s in gains
             for sc in schemes for a in availability]
    return ["snr_db", "s", "scheme", "availability", "D_sum"], _pmap(_si_row, tasks, jobs)


def cmd_oracle_check(rhos, snr_db, samples, seed, out=sys.stdout) -> bool:
    """Compare AF closed forms with simulation; one line per check."""
    ok_all = True
    for rho in rhos:
        for snr in snr_db:
            S = 10.0 ** (snr / 10.0)
            cases = [
                ("gmac", af_distortions(AfParams(S, 2 * S, 1.0, 1.5, rho)),
                 simulate_af_gmac(AfParams(S, 2 * S, 1.0, 1.5, rho), samples, seed)),
                ("orthogonal", orth_af_distortions(OrthParams(S, 2 * S, 1.0, 1.5, rho)),
                 simulate_af_orthogonal(OrthParams(S, 2 * S, 1.0, 1.5, rho), samples, seed)),
            ]
            for name, (d1, d2), sim in cases:
                z1 = abs(sim.D1_hat - d1) / sim.stderr1
                z2 = abs(sim.D2_hat - d2) / sim.stderr2
                ok = z1 <= 3 and z2 <= 3
                ok_all &= ok
                out.write(f"{'PASS' if ok else 'FAIL'} {name} rho={fmt(rho)} snr_db={fmt(snr)} "
                          f"z1={z1:.2f} z2={z2:.2f}\n")
    return ok_all


# ---------------------------------------------------------------- main


def write_csv(header, rows, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    text = buf.getvalue()
    if path:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as e:
            raise OSError(f"cannot write {path!r}: {e.strerror}") from None
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussjscc", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, rho, snr, schemes):
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("--rho", default=rho, help="comma-separated correlations")
        sp.add_argument("--snr-db", default=snr, help="start:stop:step in dB (stop inclusive)")
        sp.add_argument("--schemes", default=schemes)
        sp.add_argument("--out", default=None, help="CSV output path (default stdout)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    sp = sub.add_parser("sweep", help="distortion vs SNR for each scheme")
    common(sp, "0.75", "-20:40:5", "af,sb,lt,nc")
    sp.add_argument("--channel", default="gmac", choices=["gmac", "orthogonal"])
    sp.add_argument("--p2-ratio", default=None, help="asymmetric run with P2 = ratio * P1")
    sp.add_argument("--mc", action="store_true", help="add Monte Carlo columns to AF rows")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("table1", help="optimal AF power allocation table")
    sp.add_argument("--config")
    sp.add_argument("--rho", default="0.5")
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("multiuser", help="N-user symmetric distortion vs SNR")
    common(sp, "0.8", "-10:10:10", "af")
    sp.add_argument("--n-users", default="2:10", help="list or start:stop:step")

    sp = sub.add_parser("sideinfo", help="distortion vs side-channel gain")
    common(sp, "0.5", "0", "af,sb,lt")
    sp.add_argument("--channel", default="gmac", choices=["gmac", "orthogonal"])
    sp.add_argument("--si", default="dec", help="comma list of none|enc|dec|both")
    sp.add_argument("--si-gain", default="0,0.5,1,2", help="s1 = s2 values")

    sp = sub.add_parser("oracle-check", help="Monte Carlo check of AF closed forms")
    sp.add_argument("--config")
    sp.add_argument("--rho", default="0,0.5,0.9")
    sp.add_argument("--snr-db", default="-10:30:10")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    return p


def _glue_negative(argv):
    """Let ``--snr-db -20:40:5`` through; argparse would read -20 as a flag."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and re.match(r"-\.?\d", tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None, stdout=sys.stdout) -> int:
    parser = build_parser()
    argv = _glue_negative(list(sys.argv[1:] if argv is None else argv))
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        # config values become defaults, so explicit flags still win
        sp = parser._subparsers._group_actions[0].choices[args.cmd]
        sp.set_defaults(**_config_defaults(args.config, sp))
        args = parser.parse_args(argv)
    rhos = parse_list(str(args.rho), "rho")
    if args.cmd == "table1":
        if len(rhos) != 1:
            raise ConfigError("table1 takes a single rho", field="rho")
        header, rows = cmd_table1(rhos[0])
        stdout.write(format_table(header, rows))
        if args.out:
            write_csv(header, rows, args.out)
        return 0
    snr = parse_range(str(args.snr_db), "snr-db")
    if args.cmd == "oracle-check":
        return 0 if cmd_oracle_check(rhos, snr, args.samples, args.seed, stdout) else 1
    if args.jobs < 1:
        raise ConfigError("jobs must be >= 1", field="jobs")
    if args.cmd == "sweep":
        ratio = None
        if args.p2_ratio not in (None, ""):
            try:
                ratio = float(args.p2_ratio)
            except ValueError:
                raise ConfigError(f"bad number {args.p2_ratio!r}", field="p2-ratio") from None
        cfg = SweepConfig(parse_schemes(args.schemes), args.channel, snr, rhos, ratio,
                          bool(args.mc), args.samples, args.seed, args.jobs)
        header, rows = cmd_sweep(cfg)
    elif args.cmd == "multiuser":
        header, rows = cmd_multiuser(_one(rhos),
                                     parse_list(str(args.n_users), "n-users", int), snr,
                                     parse_schemes(args.schemes), args.jobs)
    else:
        avail = []
        for a in parse_list(args.si, "si", str):
            if a not in SI_CHOICES:
                raise ConfigError(f"unknown availability {a!r}; choose none|enc|dec|both", field="si")
            avail.append(SI_CHOICES[a])
        header, rows = cmd_sideinfo(_one(rhos), snr, parse_list(str(args.si_gain), "si-gain"),
                                    avail, parse_schemes(args.schemes), args.channel, args.jobs)
    text = write_csv(header, rows, args.out)
    if not args.out:
        stdout.write(text)
    return 0


def _one(rhos):
    if len(rhos) != 1:
        raise ConfigError("this command takes a single rho", field="rho")
    return rhos[0]


def main(argv=None) -> int:
    try:
        return run(argv)
    except (JsccError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
