"""JSON Schemas (draft 2020-12) for everything the CLI writes."""

_num = {"type": "number"}
_nums = {"type": "array", "items": _num}
_order = {"type": "integer", "minimum": 0}


def _obj(props, required=None, extra=False):
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": extra,
    }


OVERLAP = _obj({
    "max_order": _order,
    "alpha": _nums,
    "gamma": {"type": "array", "items": _nums},
})

FIT = _obj({
    "threshold_mw": _num,
    "uncertainty_mw": _num,
    "residual_norm": _num,
    "method": {"enum": ["model-fit", "slope-ratio"]},
    "points": {"type": "integer", "minimum": 1},
})

_pair = _obj({"squeezing": _num, "anti_squeezing": _num})

LOSS_BUDGET = _obj({
    "order": _order,
    "corrected_db": _pair, "corrected_linear": _pair,
    "inferred_db": _pair, "inferred_linear": _pair,
    "calculated_db": _pair, "calculated_linear": _pair,
    "eta_detection": _num,
    "eta_estimated": _num, "eta_estimated_err": _num,
    "eta_calculated": _num,
    "eta_cav_backout": _num, "eta_cav_backout_err": _num,
})

TABLE1 = _obj({
    "theoretical": {"type": "array", "items": _obj({
        "order": _order, "relative_threshold": _num, "overlap_factor": _num, "local_intensity_factor": _num})},
    "experimental": {"oneOf": [{"type": "null"}, {"type": "array", "items": _obj({
        "order": _order, "relative_threshold": _num, "uncertainty": _num,
        "fit": {"oneOf": [{"type": "null"}, FIT]}})}]},
    "method": {"enum": ["model-fit", "slope-ratio"]},
    "fit_points": {"type": "integer", "minimum": 2},
})

_row = {"type": "array", "items": _obj({
    "order": _order, "squeezing_db": _num, "anti_squeezing_db": _num,
    "squeezing_linear": {"type": "number", "exclusiveMinimum": 0},
    "anti_squeezing_linear": {"type": "number", "exclusiveMinimum": 0}})}
_est = {"type": "array", "items": _obj({"order": _order, "value": _num, "err": _num})}

TABLE2 = _obj({"corrected": _row, "inferred": _row, "calculated": _row})
TABLE3 = _obj({"estimated": _est, "calculated": {"type": "array", "items": _obj({"order": _order, "value": _num})}})


_gain_mode = _obj({
    "temperature_c": _nums,
    "gain_amplify_vs_temperature": _nums,
    "gain_deamplify_vs_temperature": _nums,
    "pump_mw": _nums,
    "gain_deamplify_vs_pump": _nums,
    "pump_mw_amplify": _nums,
    "gain_amplify_vs_pump": _nums,
    "t_opt_c": _num, "fwhm_c": _num, "p_ratio": _num,
})
_scan_mode = _obj({
    "theta_deg": _nums, "variance_linear": _nums, "variance_db": _nums, "qnl_db": _num, "locked_db": _num})

_per_mode = lambda item: {"type": "object", "patternProperties": {"^[0-9]+0$": item}, "additionalProperties": False}

GAIN = _per_mode(_gain_mode)
PHASE_SCAN = _per_mode(_scan_mode)

SQUEEZE = _obj({
    "loss_budget": {"type": "array", "items": LOSS_BUDGET},
    "table2": TABLE2,
    "table3": TABLE3,
    "eta_cav_backout": _est,
    "phase_scan": PHASE_SCAN,
})

REPORT = _obj({
    "schema_version": {"const": 1},
    "config": {"type": "object", "additionalProperties": _num},
    "overlap": OVERLAP,
    "table1": TABLE1,
    "table2": TABLE2,
    "table3": TABLE3,
    "eta_cav_backout": _est,
    "loss_budget": {"type": "array", "items": LOSS_BUDGET},
    "series": _obj({"gain": GAIN, "phase_scan": PHASE_SCAN}),
    "provenance": _obj({
        "equations": {"type": "object", "additionalProperties": {"type": "string"}},
        "data_dir_used": {"type": "boolean"},
        "curves": {"type": "array", "items": {"type": "string"}},
    }),
})
