#!/usr/bin/env python3
"""Run citeaudit on the bundled configs and fixtures and validate every JSON
output against schemas/."""

import argparse
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

ROOT = Path(__file__).resolve().parent.parent
SCHEMAS = ROOT / "schemas"
FIX = ROOT / "tests" / "fixtures"


def registry():
    resources = []
    for p in SCHEMAS.glob("*.schema.json"):
        resources.append((p.name, Resource.from_contents(json.loads(p.read_text()))))
    return Registry().with_resources(resources)


class Checker:
    def __init__(self):
        self.reg = registry()
        self.failures = 0
        self.checked = 0

    def check(self, schema_name, instance, what):
        schema = json.loads((SCHEMAS / schema_name).read_text())
        v = Draft202012Validator(schema, registry=self.reg)
        errors = sorted(v.iter_errors(instance), key=lambda e: list(e.path))
        self.checked += 1
        if errors:
            self.failures += 1
            for e in errors[:5]:
                print(f"FAIL {what}: {'/'.join(map(str, e.path))}: {e.message}")
        else:
            print(f"ok   {what}")

    def check_file(self, schema_name, path):
        self.check(schema_name, json.loads(Path(path).read_text()), str(path))


def run(cmd, **kw):
    return subprocess.run([str(c) for c in cmd], capture_output=True, text=True, **kw)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True, help="citeaudit binary")
    ap.add_argument("--audit-test", help="test_cli_report binary; its mock audit supplies summary.json")
    args = ap.parse_args()
    c = Checker()

    for p in sorted((ROOT / "configs").glob("synth_*.json")):
        c.check_file("synth_spec.schema.json", p)
    c.check_file("audit_config.schema.json", ROOT / "configs" / "audit_three_journals.json")
    c.check_file("audit_config.schema.json", FIX / "audit3" / "config.json")

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for spec in ("synth_mixed.json", "synth_o1.json"):
            out = tmp / spec.removesuffix(".json")
            r = run([args.cli, "simulate", ROOT / "configs" / spec, "--out", out])
            if r.returncode != 0:
                print(f"FAIL simulate {spec}: {r.stderr.strip()}")
                c.failures += 1
                continue
            c.check_file("simulate_summary.schema.json", out / "simulate_summary.json")
            c.check_file("distortion.schema.json", out / "distortion.json")
            c.check_file("evaluation.schema.json", out / "evaluation.json")
            c.check_file("synth_spec.schema.json", out / "spec.json")

        scan_out = tmp / "scan"
        r = run([args.cli, "scan-references", FIX / "scan" / "references.txt", "--candidates",
                 FIX / "scan" / "candidates.json", "--out", scan_out, "--json"])
        lines = [l for l in r.stdout.splitlines() if l.strip()]
        if not lines:
            print("FAIL scan-references produced no findings")
            c.failures += 1
        for i, line in enumerate(lines):
            c.check("finding.schema.json", json.loads(line), f"scan stdout line {i + 1}")
        c.check("scan_summary.schema.json", json.loads(r.stderr.strip().splitlines()[-1]), "scan stderr summary")
        c.check_file("scan_summary.schema.json", scan_out / "scan_summary.json")
        for i, line in enumerate((scan_out / "findings.jsonl").read_text().splitlines()):
            c.check("finding.schema.json", json.loads(line), f"findings.jsonl line {i + 1}")

        a = FIX / "asymmetry"
        r = run([args.cli, "check-record", a / "a01.ris", a / "a01.json", a / "a01.xml", a / "a01.crossref.json", "--json"])
        c.check("record_check.schema.json", json.loads(r.stdout), "check-record a01")

        if args.audit_test:
            env = dict(os.environ, CITEAUDIT_ARTIFACT_DIR=str(tmp))
            r = run([args.audit_test, "--gtest_filter=Audit.ThreeJournalsAgainstMockService"], env=env)
            if r.returncode != 0 or not (tmp / "summary.json").exists():
                print("FAIL mock audit did not produce summary.json")
                print(r.stdout[-2000:])
                c.failures += 1
            else:
                c.check_file("audit_summary.schema.json", tmp / "summary.json")

    print(f"{c.checked} documents checked, {c.failures} failed")
    return 1 if c.failures else 0


if __name__ == "__main__":
    sys.exit(main())
