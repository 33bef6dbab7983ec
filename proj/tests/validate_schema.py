import json
import subprocess
import sys

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)

commands = [
    ["mesh", "--omega-steps", "5"],
    ["nodes"],
    ["local", "4"],
    ["surface", "4", "--omega-steps", "5", "--kappa-steps", "3"],
    ["ep-atlas"],
    ["string-atlas"],
    ["shaft", "--omega-steps", "5", "--kappa-steps", "2"],
    ["verify"],
]
failed = 0
for args in commands:
    out = subprocess.run([cli, *args, "--format", "json"], check=True, capture_output=True, text=True).stdout
    doc = json.loads(out)
    try:
        jsonschema.validate(doc, schema)
        assert all(len(r) == len(doc["columns"]) for r in doc["rows"]), "row width"
        print("ok  ", args[0])
    except (jsonschema.ValidationError, AssertionError) as e:
        failed += 1
        print("FAIL", args[0], e)
sys.exit(1 if failed else 0)
