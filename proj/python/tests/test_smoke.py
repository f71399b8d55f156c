import pytest

import celerlog

SNAPSHOTS = [
    "Snapshotting: 0x0 to /data/version-2/snapshot.0",
    "Snapshotting: 0x100001546 to /data/version-2/snapshot.100001546",
    "Snapshotting: 0x200000b1c to /data/version-2/snapshot.200000b1c",
]


def test_masking():
    assert celerlog.mask_token("123") == "<NUM>"
    assert celerlog.mask_token("hello") == "hello"
    assert celerlog.mask_message(SNAPSHOTS[0]) == "Snapshotting: <NUM> to <CL>"
    with pytest.raises(celerlog.EmptyMessage):
        celerlog.mask_message("   ")


def test_threshold():
    a = ["Failed", "password", "for", "<UCL>"]
    b = ["Failed", "password", "for", "root"]
    assert celerlog.pos_jaccard(a, b) == pytest.approx(0.6)
    assert celerlog.singleton_ratio([0.6, 0.0], 0.60) == 0.5
    assert celerlog.select_threshold([0.6, 0.0]) == 0.60
    with pytest.raises(celerlog.ConfigError):
        celerlog.select_threshold([0.5], p_quantile=2.0)


def test_route_and_parse():
    routed = celerlog.route(SNAPSHOTS)
    assert routed["stats"]["dense_record_count"] == 3
    out = celerlog.parse(SNAPSHOTS, jobs=2)
    templates = {t for t, _, _ in out["results"]}
    assert templates == {"Snapshotting: <*> to <*>"}
    assert out["results"][0][1] == ["0x0", "/data/version-2/snapshot.0"]
    assert out["cost"]["llm_invocations"] == 0


def test_metrics():
    truth = ["a <*>", "a <*>", "b"]
    m = celerlog.evaluate(["a <*> <*>", "a <*> <*>", "b"], truth)
    assert m == {"GA": 1.0, "PA": 1.0, "FGA": 1.0, "FTA": 1.0}
    assert celerlog.normalize_template("a <*> <*> b") == "a <*> b"
    assert celerlog.post_process("took 37 ms") == "took <*> ms"
    assert celerlog.__version__
