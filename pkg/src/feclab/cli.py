"""Command line front end.

Subcommands:
  sphere    build or inspect a code-weight sphere (--code, --radius, --out)
  simulate  run a Monte-Carlo sweep from a config file (--config, --out,
            --seed, --threads)
  mltruth   run the brute-force ML decoder over the same config's trial
            streams, for oracle reference curves

Relative output and sphere paths resolve under $FECLAB_DATA_DIR when that
variable is set.
"""

from __future__ import annotations

import argparse
import sys

from feclab.codebook import build_ca_polar_code, build_polar_code, build_rm_code
from feclab.simharness import (ConfigError, data_path, load_config, run_sweep,
                               sphere_summary, write_csv)
from feclab.wsphere import build_sphere, save_sphere


def parse_code_spec(spec: str):
    """Parse 'family:N:K' where family is ca-polar, polar, or rm."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"code spec must be family:N:K, got {spec!r}")
    family, n_s, k_s = parts
    n, k = int(n_s), int(k_s)
    if family == "ca-polar":
        return build_ca_polar_code(n, k)
    if family == "polar":
        from feclab.codebook import reliability_order
        return build_polar_code(n, k, reliability_order(n))
    if family == "rm":
        import math
        m = n.bit_length() - 1
        if 1 << m != n:
            raise ConfigError("rm blocklength must be a power of two")
        total = 0
        for r in range(m + 1):
            total += math.comb(m, r)
            if total == k:
                return build_rm_code(m, r)
            if total > k:
                break
        raise ConfigError(f"no Reed-Muller order gives K = {k} at N = {n}")
    raise ConfigError(f"unknown code family {family!r}")


def _cmd_sphere(args) -> int:
    code = parse_code_spec(args.code)
    print(sphere_summary(code, args.radius))
    if args.out:
        sphere = build_sphere(code, args.radius)
        out = data_path(args.out)
        save_sphere(sphere, out)
        print(f"saved to {out}")
    return 0


def _cmd_simulate(args, decoder_kind: str) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    records = run_sweep(config, threads=args.threads, decoder_kind=decoder_kind)
    out = data_path(args.out)
    write_csv(records, out)
    for r in records:
        print(f"{r.code_label} {r.stage1_label} snr={r.snr_db:g}dB "
              f"trials={r.trials} errors={r.block_errors} bler={r.bler:.3e} "
              f"p_act={r.activation_rate:.3f} ed={r.ed_units_mean:.1f}")
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="feclab",
                                     description="short-blocklength FEC laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sphere = sub.add_parser("sphere", help="build/inspect a code-weight sphere")
    p_sphere.add_argument("--code", required=True, help="family:N:K, e.g. ca-polar:256:16")
    p_sphere.add_argument("--radius", type=int, required=True, help="radius index r")
    p_sphere.add_argument("--out", default=None, help="optional sphere file to write")

    for name, help_text in (("simulate", "run a Monte-Carlo sweep"),
                            ("mltruth", "run exact-ML oracle sweeps")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)

    args = parser.parse_args(argv)
    try:
        if args.command == "sphere":
            return _cmd_sphere(args)
        if args.command == "simulate":
            return _cmd_simulate(args, "two_stage")
        return _cmd_simulate(args, "ml")
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
