"""Runs the CLI on each built-in model and validates diagnostics.json against the schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def run(cli, *args):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"{' '.join(args)} failed ({proc.returncode}): {proc.stderr}")


def main():
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        run(cli, "simulate", "--model", "lin_reg", "--n", "30", "--k", "2", "--T", "2", "--out", str(tmp / "lr.csv"))
        run(cli, "simulate", "--model", "hier_gauss", "--n", "4", "--k", "2", "--T", "8", "--out", str(tmp / "hg.csv"))
        cases = {
            "cauchy": ["--model", "cauchy_normal", "--M", "500", "--N", "40", "--scale", "200",
                       "--tolerate-tail-violations"],
            "cauchy_small_n": ["--model", "cauchy_normal", "--M", "500", "--N", "5", "--scale", "200",
                               "--tolerate-tail-violations", "--unconstrained"],
            "lin_reg": ["--model", "lin_reg", "--data", str(tmp / "lr.csv"), "--M", "500", "--N", "40"],
            "hier_gauss": ["--model", "hier_gauss", "--data", str(tmp / "hg.csv"), "--M", "500", "--N", "30"],
        }
        failures = 0
        for name, args in cases.items():
            prefix = str(tmp / f"{name}_")
            run(cli, "run", *args, "--out", prefix)
            doc = json.loads(Path(prefix + "diagnostics.json").read_text())
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            for e in errors:
                print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
            failures += len(errors)
            if len(doc["parameter_names"]) != doc["dimension"]:
                print(f"{name}: parameter_names has {len(doc['parameter_names'])} entries for dimension {doc['dimension']}")
                failures += 1
            print(f"{name}: {'ok' if not errors else 'INVALID'}")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
