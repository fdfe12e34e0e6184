import json
import os
from pathlib import Path

import pytest

import vbasim

ROOT = Path(os.environ.get("VBASIM_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FIXTURES = ROOT / "fixtures" / "default"


def read(path):
    return path.read_text()


def test_canonical_form_is_a_fixed_point():
    text = read(FIXTURES / "victim_telegram_like.json")
    once = vbasim.canonicalize_manifest(text)
    assert vbasim.canonicalize_manifest(once) == once
    assert once == text


def test_schema_errors_surface_as_python_exceptions():
    with pytest.raises(vbasim.SchemaError):
        vbasim.canonicalize_manifest('{"package": "a", "bogus": 1}')
    assert issubclass(vbasim.SchemaError, vbasim.VbasimError)


def test_customize_fixture():
    out = vbasim.customize(
        read(FIXTURES / "victim_telegram_like.json"),
        read(FIXTURES / "droidplugin_template.json"),
        read(FIXTURES / "catalog" / "org.mascara.payload.json"),
    )
    assert out["violations"] == []
    assert [step for step, _ in out["steps"]] == ["permissions", "trim_malicious", "components", "resources"]
    addon = json.loads(out["addon"])
    victim = json.loads(read(FIXTURES / "victim_telegram_like.json"))
    assert set(victim["permissions"]) <= set(addon["permissions"])
    assert out["rename_map"]


def test_default_matrix_matches_golden():
    out = vbasim.run_matrix(str(FIXTURES / "scenario.json"))
    golden = json.loads(read(ROOT / "tests" / "golden" / "default_matrix.json"))
    assert out["matrix"] == golden["matrix"]
    assert out["digest"] == golden["scenario_digest"]
    assert json.loads(out["report"])["scenario_digest"] == out["digest"]


def test_hook_ablation_flips_only_hooked_mechanisms():
    full = vbasim.run_matrix(str(FIXTURES / "scenario.json"), mode="mascara")["matrix"]["MascaraContainer"]
    bare = vbasim.run_matrix(str(FIXTURES / "scenario.json"), mode="mascara", hooks=False)["matrix"]["MascaraContainer"]
    flipped = {k for k in full if full[k] != bare[k]}
    assert flipped == {"7", "8", "9", "11", "12"}
    with pytest.raises(vbasim.SchemaError):
        vbasim.run_matrix(str(FIXTURES / "scenario.json"), mode="mascara", skip_hooks=["nope"])


def test_corpus_is_deterministic():
    a = vbasim.generate_corpus(10, 7)
    assert a == vbasim.generate_corpus(10, 7)
    assert a != vbasim.generate_corpus(10, 8)
    assert all(vbasim.canonicalize_manifest(t) == t for t in a)


def test_singular_verdicts():
    assert vbasim.singular_check("native", 10) == "Clean"
    assert vbasim.singular_check("virtual", 10, loops=5) == "VirtualDetected"
    with pytest.raises(vbasim.InsufficientWarmupError):
        vbasim.singular_check("native", 3)
