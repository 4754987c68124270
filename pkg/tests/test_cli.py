import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from evenfour.cli import COMMANDS, run

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("EVENFOUR_UPDATE_GOLDEN") == "1"

K3 = '{"b1": 0, "b2": 22, "tau": -16, "even": true, "spin": true}'

# (case id, argv without --format, expected exit code)
CASES = [
    ("snf", ["snf", "[[2,4],[6,8]]"], 0),
    ("group", ["group", "[[2,0,0],[0,4,0],[0,0,3]]"], 0),
    ("group_literal", ["group", "free_rank=1", "torsion=[2,4]"], 0),
    ("ext", ["ext", "group={\"torsion\":[2,4]}"], 0),
    ("ext_map", ["ext", '{"group":{"torsion":[4]},"target_exponent":2,"coeffs":[2]}'], 0),
    ("character", ["character", '{"group":{"torsion":[2,4]},"w":[1,1]}'], 0),
    ("cover_plan", ["cover-plan",
                    '{"b1":0,"b2":12,"tau":-8,"torsion":[4],"even":true,"w2":[1]}'], 0),
    ("cover_plan_z8_z2", ["cover-plan",
                          '{"b1":0,"b2":2,"tau":0,"torsion":[2,8],"even":true,"w2":[0,1]}'], 0),
    ("form_classify", ["form-classify", "rank=22", "tau=-16"], 0),
    ("form_classify_definite", ["form-classify", "rank=8", "tau=-8"], 1),
    ("form_build", ["form-build", "p=1", "q=1"], 0),
    ("check_k3", ["check", K3], 0),
    ("check_excluded", ["check", '{"b1":0,"b2":10,"tau":-8,"even":true,"spin":true}'], 1),
    ("replay_theorem3", ["replay",
                         '{"b1":0,"b2":12,"tau":-8,"torsion":[2],"even":true,"w2":[1]}'], 0),
    ("replay_prop15", ["replay", "genus=2"], 0),
    ("rbounds", ["rbounds", '{"tag":"free_product","a":{"tag":"finite_cyclic","n":2},'
                            '"b":{"tag":"finite_cyclic","n":2}}'], 0),
    ("rbounds_surface", ["rbounds", "tag=surface", "g=2"], 0),
    ("rtable", ["rtable"], 0),
]


def invoke(argv, stdin=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err, stdin=stdin)
    return code, out.getvalue(), err.getvalue()


def test_every_subcommand_has_a_case():
    covered = {argv[0] for _, argv, _ in CASES}
    assert covered == set(COMMANDS)


@pytest.mark.parametrize("fmt", ["text", "json"])
@pytest.mark.parametrize("case,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(case, argv, code, fmt):
    got_code, out, err = invoke(argv + ["--format", fmt])
    assert got_code == code, err
    path = GOLDEN / f"{case}.{fmt}"
    if UPDATE:
        path.write_text(out)
    assert out == path.read_text()


@pytest.mark.parametrize("case,argv,code", CASES, ids=[c[0] for c in CASES])
def test_json_round_trip(case, argv, code):
    _, out, _ = invoke(argv + ["--format", "json"])
    obj = json.loads(out)
    assert json.loads(json.dumps(obj, indent=2)) == obj
    assert json.dumps(obj, indent=2) + "\n" == out
    # deterministic
    assert invoke(argv + ["--format", "json"])[1] == out


def test_k3_check_contents():
    _, out, _ = invoke(["check", K3, "--format", "json"])
    obj = json.loads(out)
    assert obj["all_hold"]
    v54 = next(v for v in obj["verdicts"] if v["name"] == "conjecture_54")
    assert v54["slack"] == 2 and v54["citation"]


def test_definite_message():
    code, out, _ = invoke(["form-classify", "rank=8", "tau=-8"])
    assert code == 1 and "definite, excluded" in out


@pytest.mark.parametrize("argv", [
    ["snf", "[[1,2],[3]]"],
    ["snf", "not json["],
    ["group", "torsion=[4,6]"],
    ["check", '{"b1":0,"b2":2,"tau":0,"spin":true}'],
    ["check", '{"b1":0}'],
    ["form-build", "p=1", "q=0"],
    ["rbounds", "tag=unknown"],
    ["replay", "genus=0"],
    ["cover-plan", '{"b1":0,"b2":2,"tau":0,"torsion":[2],"even":true,"w2":[1,1]}'],
])
def test_invalid_input_exits_2(argv):
    code, out, err = invoke(argv)
    assert code == 2 and out == "" and err.startswith("error:")
    assert len(err.strip().splitlines()) == 1


def test_invalid_descriptor_names_rule_and_citation():
    _, _, err = invoke(["check", '{"b1":0,"b2":8,"tau":-8,"even":true,"spin":true}'])
    assert "even_indefinite" in err and "Donaldson" in err


def test_input_file_and_stdin(tmp_path):
    f = tmp_path / "k3.json"
    f.write_text(K3)
    assert invoke(["check", "--input", str(f)])[0] == 0
    assert invoke(["check", "--input", "-"], stdin=io.StringIO(K3))[0] == 0
    assert invoke(["check", "x=1", "--input", str(f)])[0] == 2


def test_cover_plan_alias():
    argv = ['{"b1":0,"b2":12,"tau":-8,"torsion":[4],"even":true,"w2":[1]}', "--format", "json"]
    assert invoke(["cover", "plan"] + argv) == invoke(["cover-plan"] + argv)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "evenfour", "rtable"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "rtable.text").read_text()
