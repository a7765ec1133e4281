"""Command-line front end: resolve a run configuration, sweep, write CSV.

Examples::

    ntnsim --figure 4a -o fig4a.csv
    ntnsim --scenario GHE --band s --sweep elevation --seed 42
    ntnsim --config run.toml --workers 4
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from typing import Iterable, Sequence

from ntnsim.config import PRESETS, ConfigError, RunConfig, parse_config
from ntnsim.evaluator import SweepRow, failures, sweep

log = logging.getLogger("ntnsim")

CSV_COLUMNS = (
    "scenario", "band", "leo_altitude_km", "alpha_deg", "epsilon_db", "engine",
    "outage", "outage_stderr", "capacity_bps", "capacity_stderr", "n_samples", "seed",
    "per_hop_snr_db", "below_resolution", "error",
)
RESOLUTION_FLOOR = 1e-12


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.9g}"


def row_record(row: SweepRow) -> list[str]:
    below = row.outage is not None and row.outage < RESOLUTION_FLOOR
    return [
        row.scenario, row.band, _num(row.leo_altitude_km), _num(row.alpha_deg),
        _num(row.epsilon_db), row.engine,
        "0" if below else _num(row.outage), _num(row.outage_stderr),
        _num(row.capacity_bps), _num(row.capacity_stderr), _num(row.n_samples), _num(row.seed),
        ";".join(_num(s) for s in row.per_hop_snr_db),
        "1" if below else "0",
        row.error or "",
    ]


def to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row_record(row))
    return buf.getvalue()


def run(config: RunConfig) -> int:
    """Execute the sweep described by ``config`` and write the CSV. Returns the exit status."""
    rows = sweep(config.sweep_spec(), workers=config.workers)
    text = to_csv(rows)
    if config.output == "-":
        sys.stdout.write(text)
    else:
        with open(config.output, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    bad = failures(rows)
    for row in bad:
        log.error("%s alpha=%g eps=%g %s: %s", row.scenario, row.alpha_deg, row.epsilon_db,
                  row.engine, row.error)
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ntnsim",
        description="Capacity and outage of GEO-rooted multi-layer non-terrestrial relay chains.")
    p.add_argument("--config", help="TOML run configuration document")
    p.add_argument("--figure", choices=sorted(PRESETS), help="reproduce one figure panel")
    p.add_argument("--scenario", dest="scenarios", action="append", metavar="NAME",
                   help="GE, GLE, GHE or GLHE; repeatable")
    p.add_argument("--band", help="S or Ka")
    p.add_argument("--leo-altitude", dest="leo_altitudes_km", action="append", type=float,
                   metavar="KM", help="600 or 1200; repeatable")
    p.add_argument("--sweep", dest="axis", choices=["elevation", "threshold"])
    p.add_argument("--elevations", dest="elevation_grid", metavar="GRID",
                   help="e.g. 10:90:10 or 30,60,90")
    p.add_argument("--thresholds", dest="epsilon_grid", metavar="GRID", help="e.g. -20:40:2")
    p.add_argument("--alpha", dest="alpha_deg", type=float, help="elevation for threshold sweeps")
    p.add_argument("--epsilon", dest="epsilon_db", type=float, help="threshold for elevation sweeps")
    p.add_argument("--engine", dest="engines", action="append",
                   choices=["analytic", "monte_carlo", "both"], help="repeatable")
    p.add_argument("--samples", dest="n_samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--environment", choices=["open_rural", "suburban"])
    p.add_argument("--bandwidth-rule", choices=["min", "last_hop"])
    p.add_argument("--hap-carrier", dest="hap_carrier_ghz", type=float, metavar="GHZ")
    p.add_argument("--relay-gt", choices=["uplink", "downlink"],
                   help="catalog column used for a receiving LEO relay")
    p.add_argument("--terrestrial-gt", choices=["physical", "literal"])
    p.add_argument("--outage-on-af", action="store_const", const=True, default=None,
                   help="threshold the end-to-end AF SNR instead of every hop")
    p.add_argument("-o", "--output", help="CSV path, '-' for stdout")
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


GRID_FLAGS = ("--elevations", "--thresholds")


def _attach_grid_values(argv: Sequence[str]) -> list[str]:
    # argparse reads "-20:40:2" as an option, so bind grid values with "="
    out, it = [], iter(argv)
    for tok in it:
        if tok in GRID_FLAGS:
            value = next(it, None)
            out.append(tok if value is None else f"{tok}={value}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_grid_values(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "figure", "verbose")}
    if flags.get("engines") and "both" in flags["engines"]:
        flags["engines"] = ["analytic", "monte_carlo"]
    try:
        config = parse_config(args.config, flags, preset=args.figure)
    except (ConfigError, OSError) as exc:
        parser.error(str(exc))
    log.info("running %d scenario(s) on the %s axis", len(config.scenario_list()), config.axis)
    try:
        return run(config)
    except OSError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
