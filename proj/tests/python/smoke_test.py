#!/usr/bin/env python3
"""Smoke tests for the pflow python module and the CLI surface."""

import argparse
import json
import os
import subprocess
import sys
import tempfile


def parse_args():
    p = argparse.ArgumentParser()
    p.add_argument("--module-dir", required=True)
    p.add_argument("--cli", required=True)
    p.add_argument("--fixtures", required=True)
    return p.parse_args()


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)
    print(f"ok: {msg}")


def module_tests(args):
    sys.path.insert(0, args.module_dir)
    import pflow

    case = pflow.load_case_file(os.path.join(args.fixtures, "twobus.json"))
    check(len(case.buses) == 2, "twobus.json loads with 2 buses")

    res = pflow.solve(case, tol=1e-8)
    check(res["converged"], "twobus solve converges")
    check(res["iterations"] <= 5, "twobus converges in a few iterations")
    check(abs(res["vm"][1] - 0.9730913474638834) < 1e-9, "twobus vm[1] value")
    check(res["visits"]["derivatives_per_iteration"] == 8, "fused visits 2*nnz")

    generic = pflow.solve(case, path="generic")
    check(
        abs(generic["vm"][1] - res["vm"][1]) <= 1e-10,
        "generic path reproduces the fused solution",
    )

    c118 = pflow.load_case_file(os.path.join(args.fixtures, "case118.m"))
    check(len(c118.buses) == 118, "case118.m loads with 118 buses")
    r118 = pflow.solve(c118)
    check(r118["converged"] and r118["iterations"] <= 10, "case118 converges")

    a = pflow.serialize_case_json(pflow.synth_grid(30, 2.5, 0.25, 4))
    b = pflow.serialize_case_json(pflow.synth_grid(30, 2.5, 0.25, 4))
    check(a == b, "synth_grid is deterministic per seed")
    back = pflow.parse_json_case(a)
    check(len(back.buses) == 30, "synth JSON round-trips through the parser")

    reports = pflow.bench(case, runs=3, path="both")
    check(len(reports) == 2, "bench returns one report per path")
    check({r["path"] for r in reports} == {"fused", "generic"}, "bench path labels")
    check(all(r["min_total_ms"] > 0 for r in reports), "bench timings populated")

    try:
        pflow.parse_json_case("{}")
        raise AssertionError("expected ParseError")
    except pflow.ParseError:
        print("ok: schema violation raises ParseError")

    n, values, col_idx, row_ptr = pflow.ybus(case)
    check(n == 2 and len(values) == 4, "ybus exposes the CRS triple")
    check(len(row_ptr) == n + 1 and row_ptr[-1] == len(values), "row pointer shape")


def cli_tests(args):
    run = os.path.join(args.fixtures, "twobus.json")

    proc = subprocess.run(
        [args.cli, "run", run, "--json"], capture_output=True, text=True
    )
    check(proc.returncode == 0, "cli run exits 0 on convergence")
    out = json.loads(proc.stdout)
    check(out["converged"] is True, "cli JSON reports convergence")
    check(
        {"converged", "iterations", "max_mismatch", "buses", "timings_ms", "visits"}
        <= set(out),
        "cli JSON carries the full schema",
    )
    check(out["buses"][0]["id"] == 1 and "va_deg" in out["buses"][0], "bus rows")

    proc = subprocess.run(
        [args.cli, "run", os.path.join(args.fixtures, "missing.m")],
        capture_output=True,
        text=True,
    )
    check(proc.returncode == 1, "cli run exits 1 on unreadable case")

    proc = subprocess.run(
        [args.cli, "run", os.path.join(args.fixtures, "overload.m")],
        capture_output=True,
        text=True,
    )
    check(proc.returncode == 2, "cli run exits 2 on non-convergence")

    fused = subprocess.run(
        [args.cli, "run", os.path.join(args.fixtures, "case118.m"), "--json"],
        capture_output=True,
        text=True,
    )
    generic = subprocess.run(
        [
            args.cli,
            "run",
            os.path.join(args.fixtures, "case118.m"),
            "--path",
            "generic",
            "--json",
        ],
        capture_output=True,
        text=True,
    )
    vf = json.loads(fused.stdout)["buses"]
    vg = json.loads(generic.stdout)["buses"]
    worst = max(abs(a["vm"] - b["vm"]) for a, b in zip(vf, vg))
    check(worst <= 1e-10, "cli fused and generic paths agree on case118")

    with tempfile.TemporaryDirectory() as tmp:
        csv_path = os.path.join(tmp, "bench.csv")
        proc = subprocess.run(
            [args.cli, "bench", run, "--runs", "5", "--path", "both", "--csv", csv_path],
            capture_output=True,
            text=True,
        )
        check(proc.returncode == 0, "cli bench exits 0")
        lines = open(csv_path).read().strip().splitlines()
        check(lines[0] == "case,path,phase,min_ms,runs,n_bus,nnz", "csv header")
        check(len(lines) == 1 + 2 * 4, "csv carries 2 paths x 4 phases")

        out_path = os.path.join(tmp, "grid.json")
        proc = subprocess.run(
            [
                args.cli,
                "synth",
                "--buses",
                "25",
                "--degree",
                "2.5",
                "--seed",
                "7",
                "-o",
                out_path,
            ],
            capture_output=True,
            text=True,
        )
        check(proc.returncode == 0, "cli synth exits 0")
        grid = json.load(open(out_path))
        check(len(grid["buses"]) == 25, "synth output has the requested size")

        proc = subprocess.run(
            [args.cli, "run", out_path, "--json"], capture_output=True, text=True
        )
        check(proc.returncode == 0, "synth output solves from a flat start")


def main():
    args = parse_args()
    module_tests(args)
    cli_tests(args)
    print("smoke tests passed")


if __name__ == "__main__":
    main()
