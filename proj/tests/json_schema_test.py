"""Validates every --json output of the lpwb binary against docs/report.schema.json."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def main() -> int:
    binary, schema_path, data = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    runs = []
    for pl in sorted(data.glob("*.pl")):
        runs.append(["check", pl.name])
        runs.append(["mark", pl.name, "--manifest", "alldiff.manifest"])
    runs += [
        ["explain", "alldiff.pl:2"],
        ["explain", "alldiff.pl:4"],
        ["explain", "alldiff.pl:5"],
        ["slice", "buggy.pl:11"],
        ["slice", "buggy.pl:12"],
        ["slice", "buggy.pl:13"],
        ["slice", "buggy.pl:12", "--kind", "intersect"],
        ["slice", "alldiff.pl:2"],
    ]

    failures = 0
    for args in runs:
        proc = subprocess.run([binary, "--json", *args], cwd=data, capture_output=True, text=True)
        label = " ".join(args)
        if proc.returncode not in (0, 1):
            print(f"FAIL {label}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        doc = json.loads(proc.stdout)
        errors = sorted(validator.iter_errors(doc), key=str)
        if errors:
            print(f"FAIL {label}: {errors[0].message}")
            failures += 1
            continue
        if json.loads(json.dumps(doc)) != doc or doc["command"] != args[0]:
            print(f"FAIL {label}: does not round-trip")
            failures += 1
            continue
        print(f"ok   {label}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
