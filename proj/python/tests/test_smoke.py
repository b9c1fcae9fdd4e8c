import math

import pytest

import sheeppain as sp


def test_class_lookup():
    assert sp.class_lookup("EF") == ("ears", 0)
    assert sp.class_lookup("EyE")[0] == "eyes"
    with pytest.raises(sp.Error) as info:
        sp.class_lookup("XYZ")
    assert info.value.kind == "validation"


def test_parse_error_carries_line_and_field():
    text = (
        '{"frame_id":0,"timestamp":1,"class":"EF","bbox":[0,0,5,5],"confidence":0.9}\n'
        '{"frame_id":0,"timestamp":1,"class":"EF","bbox":[0,0,5,5],"confidence":1.7}\n'
    )
    with pytest.raises(sp.Error) as info:
        sp.parse_detections(text)
    assert info.value.line == 2
    assert info.value.field == "confidence"
    assert len(sp.parse_detections(text, permissive=True)) == 1


def test_detection_round_trip():
    d = [
        sp.Detection("EFP", 2, sp.BBox(1.5, 2.25, 30, 40), 0.91, frame_id=3, timestamp=17),
        sp.Detection("NSU", 1, sp.BBox(0.1, 0.2, 0.3, 0.4), 0.45),
    ]
    assert sp.parse_detections(sp.serialize_detections(d)) == d
    assert len(sp.filter_confidence(d)) == 2
    assert len(sp.filter_confidence(d, 0.5)) == 1


def test_rotate_bbox():
    r = sp.rotate_bbox(sp.BBox(0, 0, 10, 10), 45)
    assert r.w == pytest.approx(10 * math.sqrt(2), abs=1e-12)
    r = sp.rotate_bbox(sp.BBox(0, 0, 4, 2), 30, 0.0, 0.0)
    assert r.w == pytest.approx(4 * math.cos(math.pi / 6) + 2 * 0.5, abs=1e-12)


def test_fit_score_and_track():
    samples = sp.generate_dataset(1, 80, 0.9)
    assert len(samples) == 80
    config = sp.TrainConfig()
    config.epochs = 30
    params, history, edge_accuracy = sp.fit_model(samples[:60], config)
    assert edge_accuracy == 1.0
    assert len(history) == 30
    assert sp.evaluate(samples[60:], params)["accuracy"] >= 0.9

    zero = [sp.Detection(l, 0, sp.BBox(0, 0, 5, 5), 0.9) for l in ("EF", "EyE", "NNC")]
    assert sp.score_face(zero, params)["nps"] == 0.0
    high = [sp.Detection(l, 2, sp.BBox(0, 0, 5, 5), 0.9) for l in ("EFP", "NExV")]
    report = sp.score_face(high, params, part_weights={"EFP": 2.0})
    assert report["nps"] == 100.0
    assert len(report["assignments"]) == 2

    frames = sp.generate_monitoring_scenario(2, trend="rising")
    series = sp.track_tps(frames, params)
    assert len(series) == 50
    values = [v for _, v, _ in series]
    assert values == sorted(values)

    text = sp.checkpoint_to_string(params, config)
    back, back_config = sp.checkpoint_from_string(text)
    assert back == params
    assert back_config.epochs == 30


def test_self_checks():
    g = sp.gradient_check(trials=5)
    assert g["passed"] and g["max_relative_error"] < 1e-4
    assert sp.parse_graph_oracle(trials=50) == (50, 0)
