"""Facial pain scoring for sheep: detections in, normalized pain score out."""

from ._sheeppain import (
    BBox,
    Detection,
    Error,
    Frame,
    LabeledSample,
    ModelParams,
    PartLabel,
    TrainConfig,
    checkpoint_from_string,
    checkpoint_to_string,
    class_lookup,
    evaluate,
    filter_confidence,
    fit_model,
    generate_dataset,
    generate_monitoring_scenario,
    gradient_check,
    init_params,
    parse_detections,
    parse_graph_oracle,
    rotate_bbox,
    score_face,
    serialize_detections,
    track_tps,
)

__all__ = [
    "BBox",
    "Detection",
    "Error",
    "Frame",
    "LabeledSample",
    "ModelParams",
    "PartLabel",
    "TrainConfig",
    "checkpoint_from_string",
    "checkpoint_to_string",
    "class_lookup",
    "evaluate",
    "filter_confidence",
    "fit_model",
    "generate_dataset",
    "generate_monitoring_scenario",
    "gradient_check",
    "init_params",
    "parse_detections",
    "parse_graph_oracle",
    "rotate_bbox",
    "score_face",
    "serialize_detections",
    "track_tps",
]
