import json

import pytest

from conftest import FIXTURES
from dvcsched.errors import MissingSource
from dvcsched.extraction.naive_bayes import train_nb
from dvcsched.instance_io import FILES, MANIFEST, assembly_rows, load_instance, read_manifest, write_instance_dir
from dvcsched.ingestion import SourceKind
from dvcsched.serialize import instance_to_json
from dvcsched.synth import FIXTURE_PROFILE, SMALL_PROFILE, gen_corpus, gen_instance


@pytest.mark.parametrize("seed", range(1, 6))
def test_regex_round_trip(tmp_path, seed):
    inst = gen_instance(seed, SMALL_PROFILE)
    write_instance_dir(inst, tmp_path, seed, SMALL_PROFILE.to_json())
    assert instance_to_json(load_instance(tmp_path)) == instance_to_json(inst)


def test_manifest_hashes(tmp_path):
    import hashlib

    inst = gen_instance(3, SMALL_PROFILE)
    manifest = write_instance_dir(inst, tmp_path, 3, SMALL_PROFILE.to_json())
    assert read_manifest(tmp_path) == manifest
    assert manifest["version"] == "inst-v1" and manifest["seed"] == 3
    for name, digest in manifest["sha256"].items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest


def test_written_dir_is_deterministic(tmp_path):
    inst = gen_instance(8, SMALL_PROFILE)
    write_instance_dir(inst, tmp_path / "a", 8)
    write_instance_dir(inst, tmp_path / "b", 8)
    for name in list(FILES.values()) + [MANIFEST]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_fixture_matches_generator():
    inst = load_instance(FIXTURES / "seed42")
    assert instance_to_json(inst) == instance_to_json(gen_instance(42, FIXTURE_PROFILE))
    assert json.loads((FIXTURES / "seed42" / MANIFEST).read_text())["seed"] == 42


def test_missing_topology(tmp_path):
    write_instance_dir(gen_instance(1, SMALL_PROFILE), tmp_path)
    (tmp_path / FILES[SourceKind.TOPOLOGY]).unlink()
    with pytest.raises(MissingSource):
        load_instance(tmp_path)


def test_missing_directory(tmp_path):
    with pytest.raises(MissingSource):
        load_instance(tmp_path / "nope")


def test_order_is_optional(tmp_path):
    inst = gen_instance(2, SMALL_PROFILE)
    write_instance_dir(inst, tmp_path)
    (tmp_path / FILES[SourceKind.VEHICLE_ORDER]).unlink()
    (tmp_path / MANIFEST).unlink()
    loaded = load_instance(tmp_path)
    assert loaded.derivative == tmp_path.name and loaded.ct_s == 88
    assert loaded.assembly == inst.assembly


def test_assembly_rows_line_numbers():
    rows = assembly_rows(gen_instance(4, SMALL_PROFILE))
    assert [r.line_no for r in rows] == list(range(2, len(rows) + 2))


def test_other_methods_load(tmp_path):
    inst = gen_instance(2, SMALL_PROFILE)
    write_instance_dir(inst, tmp_path)
    fuzzy = load_instance(tmp_path, method="fuzzy")
    assert set(fuzzy.assembly) <= set(inst.ecus)
    model = train_nb(gen_corpus(7))
    nb = load_instance(tmp_path, method="nb", model=model)
    assert set(nb.assembly) <= set(inst.ecus)
    with pytest.raises(ValueError):
        load_instance(tmp_path, method="nb")
    with pytest.raises(ValueError):
        load_instance(tmp_path, method="bert")
